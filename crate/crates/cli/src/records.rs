//! Serializable views of library results.

use extremal_core::commutant::{CommutantSolution, LinearRelation, StratumDescriptor};
use extremal_core::entanglement::{EntanglementVerdict, PptCoefficients};
use extremal_core::extremal::Assignment;
use extremal_core::linalg::eigvalsh;
use extremal_core::pauli::{DensityState, FanoOperator};
use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::CliResult;

fn vector(v: &Vector3<f64>) -> [f64; 3] {
    [v[0], v[1], v[2]]
}

fn matrix(m: &Matrix3<f64>) -> [[f64; 3]; 3] {
    std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)]))
}

/// `"r12"` for the coefficient of `σ₁ ⊗ σ₂`.
pub fn coefficient_name((p, q): (usize, usize)) -> String {
    format!("r{p}{q}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PptRecord {
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
}

impl From<PptCoefficients> for PptRecord {
    fn from(p: PptCoefficients) -> Self {
        Self { a2: p.a2, a3: p.a3, a4: p.a4 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictRecord {
    pub a2pt: f64,
    pub a3pt: f64,
    pub a4pt: f64,
    pub det_c: f64,
    pub det_m: f64,
    pub beta: f64,
    pub linear_entropy: f64,
    pub label: String,
    pub violated: Vec<String>,
    pub weight_case: String,
    pub pt_min_eigenvalue: f64,
}

impl From<&EntanglementVerdict> for VerdictRecord {
    fn from(v: &EntanglementVerdict) -> Self {
        Self {
            a2pt: v.a2pt,
            a3pt: v.a3pt,
            a4pt: v.a4pt,
            det_c: v.det_c,
            det_m: v.det_m,
            beta: v.beta,
            linear_entropy: v.linear_entropy,
            label: v.label.as_str().to_owned(),
            violated: v.violated.iter().map(|c| c.as_str().to_owned()).collect(),
            weight_case: v.table2_case.as_str().to_owned(),
            pt_min_eigenvalue: v.pt_min_eigenvalue,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssignmentRecord {
    /// Energy levels of H, ascending.
    pub energies: Vec<f64>,
    /// Eigenvalues of ρ within each level.
    pub blocks: Vec<Vec<f64>>,
}

impl From<&Assignment> for AssignmentRecord {
    fn from(a: &Assignment) -> Self {
        Self { energies: a.energies.clone(), blocks: a.blocks.clone() }
    }
}

/// One extremal (or classified) state with everything derived from it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateRecord {
    pub index: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean_value: Option<f64>,
    pub fano: [[f64; 4]; 4],
    pub tau_a: [f64; 3],
    pub tau_b: [f64; 3],
    pub correlation: [[f64; 3]; 3],
    pub schlienz_mahler: [[f64; 3]; 3],
    pub eigenvalues: [f64; 4],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assignment: Option<AssignmentRecord>,
    pub verdict: VerdictRecord,
}

impl StateRecord {
    pub fn new(index: usize, state: &DensityState, verdict: &EntanglementVerdict) -> Self {
        Self {
            index,
            mean_value: None,
            fano: *state.fano().coeffs(),
            tau_a: vector(state.tau_a()),
            tau_b: vector(state.tau_b()),
            correlation: matrix(state.correlation()),
            schlienz_mahler: matrix(state.schlienz_mahler()),
            eigenvalues: eigvalsh(&state.matrix()),
            assignment: None,
            verdict: verdict.into(),
        }
    }

    /// Rebuilds the state from its Fano coefficients.
    pub fn to_state(&self) -> CliResult<DensityState> {
        Ok(DensityState::from_fano(FanoOperator::new(self.fano))?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StratumRecord {
    pub d: usize,
    pub multiplicities: Vec<usize>,
    pub k: usize,
    pub codim: usize,
    pub dim: usize,
    pub r: usize,
    pub n: usize,
    pub manifold: String,
}

impl From<&StratumDescriptor> for StratumRecord {
    fn from(s: &StratumDescriptor) -> Self {
        Self {
            d: s.d,
            multiplicities: s.multiplicities.clone(),
            k: s.k,
            codim: s.codim,
            dim: s.dim,
            r: s.r,
            n: s.n,
            manifold: s.manifold(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationRecord {
    pub target: String,
    pub terms: Vec<(String, f64)>,
}

impl From<&LinearRelation> for RelationRecord {
    fn from(r: &LinearRelation) -> Self {
        Self {
            target: coefficient_name(r.target),
            terms: r.terms.iter().map(|&(k, w)| (coefficient_name(k), w)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommutantRecord {
    /// `Σ m_j²`, identity included.
    pub dimension: usize,
    pub free: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relations: Option<Vec<RelationRecord>>,
}

impl CommutantRecord {
    pub fn new(solution: &CommutantSolution) -> Self {
        Self {
            dimension: solution.dimension() + 1,
            free: solution.free.iter().map(|&k| coefficient_name(k)).collect(),
            relations: solution.dependent.as_ref().map(|rels| rels.iter().map(RelationRecord::from).collect()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use extremal_core::entanglement::classify;

    #[test]
    fn state_record_round_trips() {
        let state = DensityState::from_fano(FanoOperator::new([
            [1.0, 0.1, -0.2, 0.3],
            [0.05, 0.1 / 3.0, 0.0, 0.0],
            [0.0, 0.0, -0.2, 0.01],
            [0.0, 0.0, 0.0, 0.7],
        ]))
        .unwrap();
        let record = StateRecord::new(3, &state, &classify(&state));
        let text = serde_json::to_string(&record).unwrap();
        let back: StateRecord = serde_json::from_str(&text).unwrap();
        assert_eq!(back, record);
        assert_eq!(back.to_state().unwrap(), state);
    }
}
