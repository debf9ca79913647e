use extremal_core::entanglement::{classify, ppt_coefficients, table2_classify};
use extremal_core::extremal::{closed_form_degenerate, MixtureWeights};
use extremal_core::hamiltonian::HamiltonianParams;
use extremal_core::linalg::eigvalsh;
use serde::{Deserialize, Serialize};

use crate::config::{ParamsSpec, RunConfig};
use crate::error::{CliError, CliResult};
use crate::records::{PptRecord, StateRecord};

/// Tolerance on negative eigenvalues of a classified state literal.
const POSITIVITY_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightPatternRecord {
    pub params: ParamsSpec,
    pub weights: [f64; 4],
    pub case: String,
    /// Weights reordered descending; `permutation[i]` is the original index.
    pub permutation: [usize; 4],
    pub formula: PptRecord,
    pub time_reversal_residual: f64,
    pub kramers_invariant: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyReport {
    pub state: StateRecord,
    /// Coefficients from the invariants, confirmed against the partial transpose.
    pub ppt: PptRecord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight_pattern: Option<WeightPatternRecord>,
}

pub fn classify_command(config: &RunConfig) -> CliResult<ClassifyReport> {
    if let Some(spec) = &config.state {
        let state = spec.resolve()?;
        let lowest = eigvalsh(&state.matrix())[0];
        if lowest < -POSITIVITY_SLACK {
            return Err(CliError::config(format!("state literal is not positive semidefinite (eigenvalue {lowest})")));
        }
        let ppt = ppt_coefficients(&state)?;
        return Ok(ClassifyReport { state: StateRecord::new(0, &state, &classify(&state)), ppt: ppt.into(), weight_pattern: None });
    }
    let weights = config.weights.ok_or_else(|| CliError::config("`classify` requires `state` or `weights`"))?;
    let spec = config
        .hamiltonian
        .as_ref()
        .and_then(|h| h.params)
        .ok_or_else(|| CliError::config("`weights` requires `hamiltonian.params`"))?;
    let params = HamiltonianParams::from(spec);
    let mixture = MixtureWeights::new(weights)?;
    let report = table2_classify(&mixture, &params)?;
    let state = closed_form_degenerate(&params, &mixture)?;
    let ppt = ppt_coefficients(&state)?;
    Ok(ClassifyReport {
        state: StateRecord::new(0, &state, &report.verdict),
        ppt: ppt.into(),
        weight_pattern: Some(WeightPatternRecord {
            params: spec,
            weights,
            case: report.case.as_str().to_owned(),
            permutation: report.permutation,
            formula: report.formula.into(),
            time_reversal_residual: report.time_reversal_residual,
            kramers_invariant: report.kramers_invariant,
        }),
    })
}
