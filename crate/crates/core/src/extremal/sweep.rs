use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::numeric::{solve_mixed_extremal_with, solve_pure_extremal_with, SolverOptions};
use crate::entanglement::classify;
use crate::hamiltonian::{build_hamiltonian, HamiltonianParams};
use crate::spectral::MixingTarget;
use crate::{Error, Result};

/// Extremal mean values at one sweep value, in branch order once matched.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub value: f64,
    pub mean_values: Vec<f64>,
    /// PPT verdict of the state on each branch.
    pub separable: Vec<bool>,
    /// Solver failure at this point; the sweep continues.
    pub error: Option<String>,
}

/// Two branches exchanged order between grid points `index − 1` and `index`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Crossing {
    pub index: usize,
    pub branches: (usize, usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub parameter: String,
    pub points: Vec<SweepPoint>,
    pub crossings: Vec<Crossing>,
}

impl SweepPoint {
    /// Solves one grid point; errors become part of the record.
    pub fn solve(
        template: &HamiltonianParams,
        parameter: &str,
        value: f64,
        target: &MixingTarget,
        options: &SolverOptions,
    ) -> Result<Self> {
        let params = template
            .with(parameter, value)
            .ok_or_else(|| Error::UnknownParameter(String::from(parameter)))?;
        let outcome = build_hamiltonian(&params).and_then(|h| {
            if target.is_pure() {
                solve_pure_extremal_with(&h, options)
            } else {
                solve_mixed_extremal_with(&h, target, options)
            }
        });
        Ok(match outcome {
            Ok(set) => Self {
                value,
                separable: set.states.iter().map(|s| classify(s).label.is_separable()).collect(),
                mean_values: set.mean_values,
                error: None,
            },
            Err(e) => Self { value, mean_values: Vec::new(), separable: Vec::new(), error: Some(format!("{e}")) },
        })
    }
}

/// Reorders each point's branches to follow the previous successful point
/// by greedy nearest-value matching, and records order exchanges.
pub fn match_branches(parameter: &str, mut points: Vec<SweepPoint>) -> SweepTable {
    let mut crossings = Vec::new();
    let mut previous: Option<Vec<f64>> = None;
    for (index, point) in points.iter_mut().enumerate() {
        if point.error.is_some() {
            continue;
        }
        if let Some(prev) = previous.as_ref().filter(|p| p.len() == point.mean_values.len()) {
            let n = prev.len();
            let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(n * n);
            for (i, a) in prev.iter().enumerate() {
                for (j, b) in point.mean_values.iter().enumerate() {
                    pairs.push(((a - b).abs(), i, j));
                }
            }
            pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
            let mut target_of = alloc::vec![usize::MAX; n];
            let mut taken = alloc::vec![false; n];
            for (_, i, j) in pairs {
                if target_of[i] == usize::MAX && !taken[j] {
                    target_of[i] = j;
                    taken[j] = true;
                }
            }
            let values: Vec<f64> = target_of.iter().map(|&j| point.mean_values[j]).collect();
            let flags: Vec<bool> = target_of.iter().map(|&j| point.separable[j]).collect();
            for a in 0..n {
                for b in a + 1..n {
                    let before = prev[a] - prev[b];
                    let after = values[a] - values[b];
                    if before.abs() > 1e-12 && after.abs() > 1e-12 && (before > 0.0) != (after > 0.0) {
                        crossings.push(Crossing { index, branches: (a, b) });
                    }
                }
            }
            point.mean_values = values;
            point.separable = flags;
        }
        previous = Some(point.mean_values.clone());
    }
    SweepTable { parameter: String::from(parameter), points, crossings }
}

/// Extremal mean values of the family along `grid` for one parameter, with
/// branches matched across grid points.
pub fn sweep_mean_values(
    template: &HamiltonianParams,
    parameter: &str,
    grid: &[f64],
    target: &MixingTarget,
    options: &SolverOptions,
) -> Result<SweepTable> {
    target.require_admissible()?;
    let points = grid
        .iter()
        .map(|&v| SweepPoint::solve(template, parameter, v, target, options))
        .collect::<Result<Vec<_>>>()?;
    Ok(match_branches(parameter, points))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn pure_sweep_at_zero_delta() {
        let template = HamiltonianParams::broken(1.0, 1.0, 0.0, 1.0, 1.0);
        let table =
            sweep_mean_values(&template, "delta", &[0.0], &MixingTarget::pure(4), &SolverOptions::default()).unwrap();
        let got = &table.points[0].mean_values;
        let (r6, r2) = (libm::sqrt(6.0), libm::sqrt(2.0));
        for (g, w) in got.iter().zip([-r6, -r2, r2, r6]) {
            assert!((g - w).abs() < 1e-9, "{got:?}");
        }
        assert!(table.points[0].separable.iter().all(|&s| s));
    }

    #[test]
    fn matching_follows_branches() {
        let mk = |v: f64, values: Vec<f64>| SweepPoint { value: v, separable: vec![true; values.len()], mean_values: values, error: None };
        let table = match_branches("x", vec![mk(0.0, vec![-1.0, 1.0]), mk(1.0, vec![-0.9, 1.1]), mk(2.0, vec![-0.5, 0.5])]);
        assert_eq!(table.points[1].mean_values, vec![-0.9, 1.1]);
        assert!(table.crossings.is_empty());
        let table = match_branches("x", vec![mk(0.0, vec![0.0, 1.0]), mk(1.0, vec![0.45, 0.55]), mk(2.0, vec![0.9, 0.1])]);
        assert_eq!(table.points[2].mean_values, vec![0.1, 0.9]);
        let table = match_branches("x", vec![mk(0.0, vec![0.0, 1.0]), mk(1.0, vec![0.4, 0.6]), mk(2.0, vec![0.0, 1.0])]);
        assert!(table.crossings.is_empty());
    }

    #[test]
    fn unknown_parameter() {
        let template = HamiltonianParams::broken(1.0, 1.0, 0.0, 1.0, 1.0);
        let err = sweep_mean_values(&template, "zeta", &[0.0], &MixingTarget::pure(4), &SolverOptions::default());
        assert_eq!(err.unwrap_err(), Error::UnknownParameter(String::from("zeta")));
    }
}
