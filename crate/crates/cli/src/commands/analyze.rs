use extremal_core::commutant::{solve_commutant, stratum_of};
use extremal_core::entanglement::classify;
use extremal_core::extremal::{
    closed_form_kramers_pure, closed_form_nondegenerate, solve_mixed_extremal_with, solve_pure_extremal_with,
    ExtremalStateSet, PurityClass,
};
use extremal_core::hamiltonian::{build_time_reversal, time_reversal_commutes, Symmetry};
use extremal_core::linalg::eigvalsh;
use extremal_core::spectral::{region_membership, MixingTarget};
use serde::{Deserialize, Serialize};

use crate::config::{literal_from_matrix, ParamsSpec, ResolvedHamiltonian, RunConfig};
use crate::error::{CliError, CliResult};
use crate::records::{AssignmentRecord, CommutantRecord, StateRecord, StratumRecord};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<ParamsSpec>,
    /// `kramers`, `broken`, `general` or `matrix`.
    pub family: String,
    pub matrix: Vec<Vec<[f64; 2]>>,
    pub eigenvalues: [f64; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeReversalRecord {
    pub commutes: bool,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixingRecord {
    pub c: Vec<f64>,
    pub spectrum: Vec<f64>,
    pub region: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormRecord {
    pub family: String,
    pub mean_values: Vec<f64>,
    pub max_mean_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeReport {
    pub hamiltonian: HamiltonianRecord,
    pub time_reversal: TimeReversalRecord,
    pub stratum: StratumRecord,
    pub commutant: CommutantRecord,
    pub mixing: MixingRecord,
    pub purity: String,
    pub mean_values: Vec<f64>,
    pub states: Vec<StateRecord>,
    pub max_residual: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closed_form: Option<ClosedFormRecord>,
    pub notes: Vec<String>,
}

fn family(h: &ResolvedHamiltonian) -> &'static str {
    match h.params.map(|p| p.symmetry()) {
        Some(Symmetry::Kramers) => "kramers",
        Some(Symmetry::Broken) => "broken",
        Some(Symmetry::General) => "general",
        None => "matrix",
    }
}

pub fn mixing_target(config: &RunConfig) -> CliResult<MixingTarget> {
    let target = match &config.mixing {
        Some(c) => MixingTarget::new(c.clone()),
        None => MixingTarget::pure(4),
    };
    target.require_admissible()?;
    Ok(target)
}

fn closed_form(h: &ResolvedHamiltonian, target: &MixingTarget, set: &ExtremalStateSet, notes: &mut Vec<String>) -> Option<ClosedFormRecord> {
    let params = h.params?;
    if !target.is_pure() {
        return None;
    }
    let (name, outcome) = match params.symmetry() {
        Symmetry::Kramers => ("kramers", closed_form_kramers_pure(&params)),
        Symmetry::Broken => ("broken", closed_form_nondegenerate(&params)),
        Symmetry::General => return None,
    };
    match outcome {
        Ok(closed) => {
            let max_mean_deviation = if closed.mean_values.len() == set.mean_values.len() {
                closed.mean_values.iter().zip(&set.mean_values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
            } else {
                f64::INFINITY
            };
            Some(ClosedFormRecord { family: name.to_owned(), mean_values: closed.mean_values, max_mean_deviation })
        }
        Err(e) => {
            notes.push(format!("closed form not applicable: {e}"));
            None
        }
    }
}

pub fn analyze(config: &RunConfig, seed: u64) -> CliResult<AnalyzeReport> {
    let h = config.hamiltonian.as_ref().ok_or_else(|| CliError::config("missing `hamiltonian`"))?.resolve()?;
    let target = mixing_target(config)?;
    let stratum = stratum_of(&h.matrix)?;
    let commutant = solve_commutant(&h.matrix)?;
    let symmetry = time_reversal_commutes(&h.matrix, &build_time_reversal());
    let options = config.solver_options(seed);
    let set = if target.is_pure() {
        solve_pure_extremal_with(&h.matrix, &options)?
    } else {
        solve_mixed_extremal_with(&h.matrix, &target, &options)?
    };

    let mut notes = set.notes.clone();
    notes.push(format!("n = {} free real parameters in the traceless commutant", stratum.n));
    let closed_form = closed_form(&h, &target, &set, &mut notes);

    let states = set
        .states
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let mut record = StateRecord::new(i, s, &classify(s));
            record.mean_value = Some(set.mean_values[i]);
            record.assignment = Some(AssignmentRecord::from(&set.branch_labels[i]));
            record
        })
        .collect();

    Ok(AnalyzeReport {
        hamiltonian: HamiltonianRecord {
            params: h.params.map(ParamsSpec::from),
            family: family(&h).to_owned(),
            matrix: literal_from_matrix(&h.matrix),
            eigenvalues: eigvalsh(&h.matrix),
        },
        time_reversal: TimeReversalRecord { commutes: symmetry.commutes, residual: symmetry.residual },
        stratum: StratumRecord::from(&stratum),
        commutant: CommutantRecord::new(&commutant),
        mixing: MixingRecord {
            c: target.c.clone(),
            spectrum: target.spectrum.clone().unwrap_or_default(),
            region: region_membership(&target.c).label.as_str().to_owned(),
        },
        purity: match set.purity {
            PurityClass::Pure => "pure",
            PurityClass::Mixed => "mixed",
        }
        .to_owned(),
        mean_values: set.mean_values.clone(),
        states,
        max_residual: set.max_residual,
        closed_form,
        notes,
    })
}
