use extremal_core::extremal::{match_branches, SweepPoint, SweepTable};
use extremal_core::hamiltonian::HamiltonianParams;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::analyze::mixing_target;
use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::output;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub value: f64,
    pub mean_values: Vec<f64>,
    pub separable: Vec<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingRecord {
    pub index: usize,
    pub value: f64,
    pub branches: [usize; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub parameter: String,
    pub mixing: Vec<f64>,
    pub points: Vec<PointRecord>,
    pub crossings: Vec<CrossingRecord>,
}

/// Solves every grid point in parallel; results keep grid order.
pub fn sweep(config: &RunConfig, seed: u64) -> CliResult<SweepTable> {
    let spec = config.sweep.as_ref().ok_or_else(|| CliError::config("missing `sweep`"))?;
    let params = config
        .hamiltonian
        .as_ref()
        .and_then(|h| h.params)
        .ok_or_else(|| CliError::config("`sweep` requires `hamiltonian.params`"))?;
    let template = HamiltonianParams::from(params);
    let target = mixing_target(config)?;
    let options = config.solver_options(seed);
    let points = spec
        .grid()
        .par_iter()
        .map(|&v| SweepPoint::solve(&template, &spec.parameter, v, &target, &options))
        .collect::<Result<Vec<_>, _>>()?;
    let table = match_branches(&spec.parameter, points);
    if table.points.iter().all(|p| p.error.is_some()) {
        let first = table.points[0].error.clone().unwrap_or_default();
        return Err(CliError::Solver(format!("every sweep point failed; first: {first}")));
    }
    Ok(table)
}

pub fn report(config: &RunConfig, table: &SweepTable) -> SweepReport {
    SweepReport {
        parameter: table.parameter.clone(),
        mixing: config.mixing.clone().unwrap_or_else(|| vec![0.0; 3]),
        points: table
            .points
            .iter()
            .map(|p| PointRecord {
                value: p.value,
                mean_values: p.mean_values.clone(),
                separable: p.separable.clone(),
                error: p.error.clone(),
            })
            .collect(),
        crossings: table
            .crossings
            .iter()
            .map(|c| CrossingRecord { index: c.index, value: table.points[c.index].value, branches: [c.branches.0, c.branches.1] })
            .collect(),
    }
}

/// One row per branch and grid point; a failed point gets a single row
/// with empty branch columns and the message in `error`.
pub fn to_csv(table: &SweepTable) -> CliResult<Vec<u8>> {
    let mut rows: Vec<Vec<String>> = Vec::new();
    for p in &table.points {
        if let Some(e) = &p.error {
            rows.push(vec![p.value.to_string(), String::new(), String::new(), String::new(), e.clone()]);
            continue;
        }
        for (i, (m, s)) in p.mean_values.iter().zip(&p.separable).enumerate() {
            rows.push(vec![p.value.to_string(), i.to_string(), m.to_string(), u8::from(*s).to_string(), String::new()]);
        }
    }
    output::csv(&["sweep_value", "branch_index", "mean_value", "separable_flag", "error"], rows)
}
