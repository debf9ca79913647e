//! Positive-partial-transpose classification of two-qubit states.
//!
//! The characteristic coefficients of the partially transposed state follow
//! from those of ρ and two determinants:
//!
//! ```text
//! a₂ᴾᵀ = a₂,   a₃ᴾᵀ = a₃ + det C / 4,   a₄ᴾᵀ = a₄ + det M / 16.
//! ```
//!
//! The partial transpose is positive semidefinite exactly when
//! `0 ≤ a₂ᴾᵀ ≤ 3/8`, `0 ≤ a₃ᴾᵀ ≤ 1/16` and `0 ≤ a₄ᴾᵀ ≤ 1/256`, which for two
//! qubits decides separability.

use alloc::vec::Vec;
use core::fmt;

use crate::extremal::{closed_form_degenerate, MixtureWeights};
use crate::hamiltonian::{build_time_reversal, HamiltonianParams};
use crate::linalg::{eigvalsh, max_abs};
use crate::pauli::{partial_transpose, DensityState, Subsystem};
use crate::spectral::char_poly_coeffs;
use crate::{Error, Result};

/// Upper bounds of `(a₂ᴾᵀ, a₃ᴾᵀ, a₄ᴾᵀ)`, reached by `I/4`.
pub const PPT_BOUNDS: [f64; 3] = [3.0 / 8.0, 1.0 / 16.0, 1.0 / 256.0];
/// An inequality counts as violated only beyond this margin.
pub const VERDICT_BAND: f64 = 1e-10;
/// Weights of `det C` and `det M` in `a₃ᴾᵀ` and `a₄ᴾᵀ`.
pub const DETERMINANT_WEIGHTS: [f64; 2] = [1.0 / 4.0, 1.0 / 16.0];
/// Allowed disagreement between the determinant route and the explicit
/// partial transpose.
pub const DUAL_PATH_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PptCoefficients {
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
}

impl PptCoefficients {
    pub fn as_array(&self) -> [f64; 3] {
        [self.a2, self.a3, self.a4]
    }

    pub fn max_deviation(&self, other: &Self) -> f64 {
        self.as_array().iter().zip(other.as_array()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// `(a₂, a₃ + det C/4, a₄ + det M/16)` of a state.
pub fn ppt_from_invariants(state: &DensityState) -> PptCoefficients {
    ppt_from_invariants_with(state, DETERMINANT_WEIGHTS)
}

/// `(a₂, a₃ + w₃ det C, a₄ + w₄ det M)` for arbitrary weights.
pub fn ppt_from_invariants_with(state: &DensityState, weights: [f64; 2]) -> PptCoefficients {
    let a = char_poly_coeffs(&state.matrix());
    PptCoefficients {
        a2: a[2],
        a3: a[3] + weights[0] * state.correlation().determinant(),
        a4: a[4] + weights[1] * state.schlienz_mahler().determinant(),
    }
}

/// Characteristic coefficients of the explicit partial transpose on B.
pub fn ppt_from_partial_transpose(state: &DensityState) -> PptCoefficients {
    let a = char_poly_coeffs(&partial_transpose(&state.matrix(), Subsystem::B));
    PptCoefficients { a2: a[2], a3: a[3], a4: a[4] }
}

/// PPT coefficients from the determinant route, checked against the
/// explicit partial transpose.
pub fn ppt_coefficients(state: &DensityState) -> Result<PptCoefficients> {
    let closed = ppt_from_invariants(state);
    let direct = ppt_from_partial_transpose(state);
    let deviation = closed.max_deviation(&direct);
    if !(deviation <= DUAL_PATH_TOLERANCE) {
        return Err(Error::Inconsistent { what: "PPT coefficients", deviation });
    }
    Ok(closed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Separable,
    /// Every inequality holds within the verdict band but at least one only
    /// just; PPT boundary states of two qubits are separable.
    BoundarySeparable,
    Entangled,
}

impl Label {
    pub fn is_separable(&self) -> bool {
        !matches!(self, Label::Entangled)
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Label::Separable => "separable",
            Label::BoundarySeparable => "boundary-separable",
            Label::Entangled => "entangled",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PptCoefficient {
    A2,
    A3,
    A4,
}

impl PptCoefficient {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::A2 => "a2pt",
            Self::A3 => "a3pt",
            Self::A4 => "a4pt",
        }
    }
}

/// Degeneracy pattern of mixture weights, after sorting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Table2Case {
    /// `(¼, ¼, ¼, ¼)`.
    Maximal,
    /// `(1 − 3b, b, b, b)`.
    ThreeEqual,
    /// `(½ − b, ½ − b, b, b)`.
    TwoPair,
    /// `(1 − b − 2c, b, c, c)`.
    TwoEqual,
    /// `(1 − b − c − d, b, c, d)`.
    AllDistinct,
    NotApplicable,
}

impl Table2Case {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Maximal => "maximal",
            Self::ThreeEqual => "three-equal",
            Self::TwoPair => "two-pair",
            Self::TwoEqual => "two-equal",
            Self::AllDistinct => "all-distinct",
            Self::NotApplicable => "n/a",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntanglementVerdict {
    pub a2pt: f64,
    pub a3pt: f64,
    pub a4pt: f64,
    pub det_c: f64,
    pub det_m: f64,
    pub beta: f64,
    /// Linear entropy of subsystem A.
    pub linear_entropy: f64,
    pub label: Label,
    pub violated: Vec<PptCoefficient>,
    pub table2_case: Table2Case,
    /// Smallest eigenvalue of the partial transpose, as an independent check.
    pub pt_min_eigenvalue: f64,
}

impl EntanglementVerdict {
    /// The PT eigenvalue sign agrees with the label, or sits within the band.
    pub fn consistent_with_eigenvalue(&self) -> bool {
        if self.pt_min_eigenvalue.abs() <= VERDICT_BAND {
            return true;
        }
        (self.pt_min_eigenvalue > 0.0) == self.label.is_separable()
    }
}

fn label_for(values: [f64; 3]) -> (Label, Vec<PptCoefficient>) {
    let names = [PptCoefficient::A2, PptCoefficient::A3, PptCoefficient::A4];
    let mut violated = Vec::new();
    let mut marginal = false;
    for ((v, bound), name) in values.iter().zip(PPT_BOUNDS).zip(names) {
        if *v < -VERDICT_BAND || *v > bound + VERDICT_BAND || !v.is_finite() {
            violated.push(name);
        } else if *v < 0.0 || *v > bound {
            marginal = true;
        }
    }
    let label = if !violated.is_empty() {
        Label::Entangled
    } else if marginal {
        Label::BoundarySeparable
    } else {
        Label::Separable
    };
    (label, violated)
}

/// PPT verdict with the accompanying invariants.
pub fn classify(state: &DensityState) -> EntanglementVerdict {
    let ppt = ppt_from_invariants(state);
    let (label, violated) = label_for(ppt.as_array());
    EntanglementVerdict {
        a2pt: ppt.a2,
        a3pt: ppt.a3,
        a4pt: ppt.a4,
        det_c: state.correlation().determinant(),
        det_m: state.schlienz_mahler().determinant(),
        beta: beta_measure(state),
        linear_entropy: linear_entropy(state, Subsystem::A),
        label,
        violated,
        table2_case: Table2Case::NotApplicable,
        pt_min_eigenvalue: eigvalsh(&partial_transpose(&state.matrix(), Subsystem::B))[0],
    }
}

/// `β = (4/15) Tr(MᵀM)`; zero for product states, `4/5` for a Bell state.
pub fn beta_measure(state: &DensityState) -> f64 {
    4.0 / 15.0 * state.schlienz_mahler().norm_squared()
}

/// `S_L = (1 − |τ|²)/2` of one subsystem.
pub fn linear_entropy(state: &DensityState, subsystem: Subsystem) -> f64 {
    let tau = match subsystem {
        Subsystem::A => state.tau_a(),
        Subsystem::B => state.tau_b(),
    };
    0.5 * (1.0 - tau.norm_squared())
}

struct FamilyScalars {
    cap_delta_sq: f64,
    omega_sq: f64,
    delta_sq: f64,
    e_sq: f64,
    q_sq: f64,
}

fn family_scalars(params: &HamiltonianParams) -> Result<FamilyScalars> {
    params.validate()?;
    if !params.is_kramers() {
        return Err(Error::DegenerateParameters("requires s = sigma"));
    }
    let cap_delta_sq = params.delta_cap_sq();
    if cap_delta_sq <= 1e-24 {
        return Err(Error::DegenerateParameters("Delta = 0"));
    }
    let omega_sq = params.omega_sq();
    let delta_sq = params.delta * params.delta;
    Ok(FamilyScalars {
        cap_delta_sq,
        omega_sq,
        delta_sq,
        e_sq: cap_delta_sq + omega_sq + delta_sq,
        q_sq: cap_delta_sq + omega_sq,
    })
}

/// `det C` and `det M` of the Kramers-family mixture in terms of `x, y, z`:
///
/// ```text
/// det C = −ω²/(Δ²+ω²) · xyz
/// det M = ω² / (E² (Δ²+ω²)²) · (Δ²(Δ²+ω²) x²y² + δ²Δ² y²z² − E²(Δ²+ω²) xyz)
/// ```
pub fn det_cm_closed_forms(params: &HamiltonianParams, weights: &MixtureWeights) -> Result<(f64, f64)> {
    let s = family_scalars(params)?;
    let (x, y, z) = (weights.x(), weights.y(), weights.z());
    let det_c = -s.omega_sq / s.q_sq * x * y * z;
    let det_m = s.omega_sq / (s.e_sq * s.q_sq * s.q_sq)
        * (s.cap_delta_sq * s.q_sq * x * x * y * y + s.delta_sq * s.cap_delta_sq * y * y * z * z
            - s.e_sq * s.q_sq * x * y * z);
    Ok((det_c, det_m))
}

/// Row formulas of the five weight patterns. Weights are taken in their
/// actual positions `(P₁, P₂, P₃, P₄)`.
fn table2_formula(case: Table2Case, p: [f64; 4], s: &FamilyScalars) -> PptCoefficients {
    let w = s.omega_sq;
    let dl2 = s.cap_delta_sq;
    let q2 = s.q_sq;
    let e2 = s.e_sq;
    let d2 = s.delta_sq;
    let pref3 = w / (4.0 * q2);
    let pref4 = w / (16.0 * e2 * q2 * q2);
    match case {
        Table2Case::Maximal => PptCoefficients { a2: 3.0 / 8.0, a3: 1.0 / 16.0, a4: 1.0 / 256.0 },
        Table2Case::ThreeEqual => {
            let b = triple_value(p);
            let u = 1.0 - 4.0 * b;
            PptCoefficients {
                a2: 3.0 * (1.0 - 2.0 * b) * b,
                a3: (3.0 - 8.0 * b) * b * b - pref3 * u * u * u,
                a4: (1.0 - 3.0 * b) * b * b * b
                    + pref4 * (u * u * u * (u * d2 * dl2 - q2 * ((4.0 * b - 1.0) * dl2 + e2))),
            }
        }
        Table2Case::TwoPair => {
            let b = p.iter().copied().fold(f64::INFINITY, f64::min);
            PptCoefficients {
                a2: 0.25 + b - 2.0 * b * b,
                a3: 0.5 * (1.0 - 2.0 * b) * b,
                a4: (b - 0.5) * (b - 0.5) * b * b,
            }
        }
        Table2Case::TwoEqual if (p[2] - p[3]).abs() <= 1e-9 => {
            let (b, c) = (p[1], p[2]);
            let g = 2.0 * b + 2.0 * c - 1.0;
            let h = 4.0 * c - 1.0;
            PptCoefficients {
                a2: -b * b - 2.0 * b * c + b + c * (2.0 - 3.0 * c),
                a3: c * (c - 4.0 * b * c - 2.0 * (b - 1.0) * b - 2.0 * c * c) - pref3 * (1.0 - 4.0 * c) * g * g,
                a4: b * c * c * (1.0 - b - 2.0 * c) + pref4 * (g * g * (d2 * dl2 * g * g + h * q2 * (h * dl2 + e2))),
            }
        }
        Table2Case::TwoEqual | Table2Case::AllDistinct | Table2Case::NotApplicable => {
            let (b, c, d) = (p[1], p[2], p[3]);
            let x = 1.0 - 2.0 * c - 2.0 * d;
            let y = 1.0 - 2.0 * b - 2.0 * d;
            let z = 1.0 - 2.0 * b - 2.0 * c;
            PptCoefficients {
                a2: -b * b - d * (b + c) - b * c + b - c * c + c - d * d + d,
                a3: b * (1.0 - c - d) * (c + d) + c * d * (1.0 - c - d) - b * b * (c + d) - pref3 * z * y * x,
                a4: b * c * d * (1.0 - b - c - d)
                    + pref4 * (dl2 * q2 * x * x * y * y + d2 * dl2 * y * y * z * z - e2 * q2 * x * y * z),
            }
        }
    }
}

/// Value shared by three of the four weights.
fn triple_value(p: [f64; 4]) -> f64 {
    for i in 0..4 {
        let count = p.iter().filter(|&&v| (v - p[i]).abs() <= 1e-9).count();
        if count >= 3 {
            return p[i];
        }
    }
    p[1]
}

/// Sorted-descending permutation of the weights and the pattern of equal
/// values (tolerance `1e-9`).
pub fn table2_case(weights: &MixtureWeights) -> (Table2Case, [usize; 4]) {
    let p = weights.probabilities();
    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&a, &b| p[b].total_cmp(&p[a]).then(a.cmp(&b)));
    let sorted: [f64; 4] = core::array::from_fn(|i| p[order[i]]);
    let mut groups: Vec<usize> = Vec::new();
    let mut run = 1;
    for i in 1..4 {
        if (sorted[i] - sorted[i - 1]).abs() <= 1e-9 {
            run += 1;
        } else {
            groups.push(run);
            run = 1;
        }
    }
    groups.push(run);
    groups.sort_unstable_by(|a, b| b.cmp(a));
    let case = match groups.as_slice() {
        [4] => Table2Case::Maximal,
        [3, 1] => Table2Case::ThreeEqual,
        [2, 2] => Table2Case::TwoPair,
        [2, 1, 1] => Table2Case::TwoEqual,
        [1, 1, 1, 1] => Table2Case::AllDistinct,
        _ => Table2Case::NotApplicable,
    };
    (case, order)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table2Report {
    pub case: Table2Case,
    /// Indices of the weights in descending order.
    pub permutation: [usize; 4],
    /// Coefficients from the row formula.
    pub formula: PptCoefficients,
    /// Verdict on the assembled mixture; its PPT values come from the state.
    pub verdict: EntanglementVerdict,
    /// `max |U conj(ρ) − ρ U|`.
    pub time_reversal_residual: f64,
    pub kramers_invariant: bool,
}

/// Classifies a Kramers-family mixture by its weight pattern and checks the
/// matching row formula against the assembled state.
pub fn table2_classify(weights: &MixtureWeights, params: &HamiltonianParams) -> Result<Table2Report> {
    let scalars = family_scalars(params)?;
    let (case, permutation) = table2_case(weights);
    if case == Table2Case::NotApplicable {
        return Err(Error::InvalidWeights);
    }
    let formula = table2_formula(case, weights.probabilities(), &scalars);
    let state = closed_form_degenerate(params, weights)?;
    let assembled = ppt_coefficients(&state)?;
    let deviation = formula.max_deviation(&assembled);
    if !(deviation <= 1e-9) {
        return Err(Error::Inconsistent { what: "weight-pattern PPT formula", deviation });
    }
    let mut verdict = classify(&state);
    verdict.table2_case = case;
    let residual = max_abs(&build_time_reversal().commutator(&state.matrix()));
    Ok(Table2Report {
        case,
        permutation,
        formula,
        verdict,
        time_reversal_residual: residual,
        kramers_invariant: residual <= 1e-10,
    })
}
