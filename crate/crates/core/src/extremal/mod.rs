//! Extremal density matrices: states commuting with H at a prescribed
//! degree of mixing, and their critical mean values `⟨H⟩ᶜ = Tr(Hρᶜ)`.
//!
//! Two routes are provided. The closed forms cover the two symmetry classes
//! of the four-level family; the numeric solver works for any Hermitian 4×4
//! matrix and is checked against an eigendecomposition oracle that
//! enumerates how the target spectrum can be distributed over the energy
//! levels.

mod closed;
mod numeric;
mod sweep;

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::linalg::{eigh, Mat4, C64};
use crate::pauli::DensityState;
use crate::{Error, Result};

pub use closed::{closed_form_degenerate, closed_form_kramers_pure, closed_form_nondegenerate};
pub use numeric::{solve_mixed_extremal, solve_mixed_extremal_with, solve_pure_extremal, solve_pure_extremal_with, Gauge, SolverOptions};
pub use sweep::{match_branches, sweep_mean_values, Crossing, SweepPoint, SweepTable};

/// Probabilities `(P₁, P₂, P₃, P₄)` of the mixture
/// `P₁ρ₁₊ + P₂ρ₂₊ + P₃ρ₁₋ + P₄ρ₂₋`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureWeights {
    p: [f64; 4],
}

impl MixtureWeights {
    pub fn new(p: [f64; 4]) -> Result<Self> {
        let total: f64 = p.iter().sum();
        let in_range = p.iter().all(|&w| w.is_finite() && (-1e-12..=1.0 + 1e-12).contains(&w));
        if !in_range || (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidWeights);
        }
        Ok(Self { p })
    }

    pub fn uniform() -> Self {
        Self { p: [0.25; 4] }
    }

    pub fn probabilities(&self) -> [f64; 4] {
        self.p
    }

    /// `P₁ + P₂ − P₃ − P₄`.
    pub fn x(&self) -> f64 {
        self.p[0] + self.p[1] - self.p[2] - self.p[3]
    }

    /// `P₁ − P₂ + P₃ − P₄`.
    pub fn y(&self) -> f64 {
        self.p[0] - self.p[1] + self.p[2] - self.p[3]
    }

    /// `P₁ − P₂ − P₃ + P₄`.
    pub fn z(&self) -> f64 {
        self.p[0] - self.p[1] - self.p[2] + self.p[3]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PurityClass {
    Pure,
    Mixed,
}

/// How an extremal state distributes its eigenvalues over the energy
/// levels of H: `blocks[l]` lists the eigenvalues of ρ restricted to the
/// eigenspace with energy `energies[l]` (ascending).
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub energies: Vec<f64>,
    pub blocks: Vec<Vec<f64>>,
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (l, (e, block)) in self.energies.iter().zip(&self.blocks).enumerate() {
            if l > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{e:.6}:")?;
            for (i, v) in block.iter().enumerate() {
                write!(f, "{}{v:.6}", if i == 0 { "" } else { "," })?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtremalStateSet {
    pub states: Vec<DensityState>,
    /// `Tr(Hρ)` per state, ascending.
    pub mean_values: Vec<f64>,
    pub purity: PurityClass,
    pub branch_labels: Vec<Assignment>,
    /// Remarks about representatives of solution families and fallbacks.
    pub notes: Vec<String>,
    /// Worst commutation, coefficient or positivity residual over the states.
    pub max_residual: f64,
}

impl ExtremalStateSet {
    pub(crate) fn assemble(h: &Mat4, states: Vec<DensityState>, purity: PurityClass, notes: Vec<String>, c: &[f64]) -> Self {
        let levels = EnergyLevels::of(h);
        let mut pairs: Vec<(f64, DensityState)> = states
            .into_iter()
            .map(|s| (crate::linalg::trace_product_re(h, &s.matrix()), s))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mean_values = pairs.iter().map(|p| p.0).collect();
        let states: Vec<DensityState> = pairs.into_iter().map(|p| p.1).collect();
        let branch_labels = states.iter().map(|s| levels.assignment(&s.matrix())).collect();
        let max_residual = states.iter().map(|s| state_residual(h, &s.matrix(), c)).fold(0.0, f64::max);
        Self { states, mean_values, purity, branch_labels, notes, max_residual }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// Largest of: `‖[ρ,H]‖_max / max(‖H‖_max, 1)`, `|a_k(ρ) − c_k|` and the
/// negative part of the smallest eigenvalue.
pub fn state_residual(h: &Mat4, rho: &Mat4, c: &[f64]) -> f64 {
    let scale = crate::linalg::max_abs(h).max(1.0);
    let comm = crate::linalg::max_abs(&crate::linalg::commutator(rho, h)) / scale;
    let a = crate::spectral::char_poly_coeffs(rho);
    let coeff = c.iter().enumerate().map(|(i, &ck)| (a[i + 2] - ck).abs()).fold(0.0, f64::max);
    let neg = (-crate::linalg::eigvalsh(rho)[0]).max(0.0);
    comm.max(coeff).max(neg)
}

/// Energy levels of H: eigenvalues clustered at `1e-8 · max(1, ‖H‖)`, with
/// an orthonormal basis of each eigenspace.
#[derive(Debug, Clone)]
pub struct EnergyLevels {
    pub energies: Vec<f64>,
    pub bases: Vec<Vec<crate::linalg::Vec4>>,
}

impl EnergyLevels {
    pub fn of(h: &Mat4) -> Self {
        let (vals, vecs) = eigh(h);
        let tol = 1e-8 * vals.iter().fold(1.0f64, |a, v| a.max(v.abs()));
        let mut energies: Vec<f64> = Vec::new();
        let mut members: Vec<Vec<f64>> = Vec::new();
        let mut bases: Vec<Vec<crate::linalg::Vec4>> = Vec::new();
        for (v, vec) in vals.iter().zip(vecs.iter()) {
            match members.last_mut() {
                Some(group) if (v - group[group.len() - 1]).abs() <= tol => {
                    group.push(*v);
                    bases.last_mut().expect("parallel").push(*vec);
                }
                _ => {
                    members.push(vec![*v]);
                    bases.push(vec![*vec]);
                }
            }
        }
        for group in &members {
            energies.push(group.iter().sum::<f64>() / group.len() as f64);
        }
        Self { energies, bases }
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.bases.iter().map(Vec::len).collect()
    }

    /// Eigenvalues of ρ compressed onto each level, descending per level.
    pub fn assignment(&self, rho: &Mat4) -> Assignment {
        let blocks = self
            .bases
            .iter()
            .map(|basis| {
                let m = basis.len();
                let block = DMatrix::<C64>::from_fn(m, m, |i, j| basis[i].dotc(&(rho * basis[j])));
                let mut ev: Vec<f64> = SymmetricEigen::new(block).eigenvalues.iter().copied().collect();
                ev.sort_by(|a, b| b.total_cmp(a));
                ev
            })
            .collect();
        Assignment { energies: self.energies.clone(), blocks }
    }
}

fn cluster_ids(values: &[f64], tol: f64) -> Vec<usize> {
    let mut reps: Vec<f64> = Vec::new();
    values
        .iter()
        .map(|&v| match reps.iter().position(|&r| (r - v).abs() <= tol) {
            Some(i) => i,
            None => {
                reps.push(v);
                reps.len() - 1
            }
        })
        .collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                go(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Distinct ways to split `spectrum` into consecutive groups of the given
/// sizes (groups are distinguishable, order within a group is not), each
/// with the group value sums.
fn distributions(sizes: &[usize], spectrum: &[f64]) -> BTreeMap<Vec<Vec<usize>>, Vec<f64>> {
    let ids = cluster_ids(spectrum, 1e-9);
    let mut out = BTreeMap::new();
    for perm in permutations(spectrum.len()) {
        let mut key = Vec::with_capacity(sizes.len());
        let mut sums = Vec::with_capacity(sizes.len());
        let mut start = 0;
        for &size in sizes {
            let mut group: Vec<usize> = perm[start..start + size].iter().map(|&i| ids[i]).collect();
            group.sort_unstable();
            sums.push(perm[start..start + size].iter().map(|&i| spectrum[i]).sum());
            key.push(group);
            start += size;
        }
        out.entry(key).or_insert(sums);
    }
    out
}

/// Number of solution components for a target spectrum: distinct
/// distributions of the spectrum over the eigenvalue multiplicity groups.
pub fn expected_components(level_sizes: &[usize], spectrum: &[f64]) -> usize {
    distributions(level_sizes, spectrum).len()
}

/// Mean values `Σ_l E_l · (sum of spectrum values on level l)` for every
/// distinct distribution, ascending. Computed from the eigendecomposition of
/// H only.
pub fn assignment_oracle(h: &Mat4, spectrum: &[f64]) -> Vec<f64> {
    let levels = EnergyLevels::of(h);
    let mut out: Vec<f64> = distributions(&levels.sizes(), spectrum)
        .values()
        .map(|sums| sums.iter().zip(&levels.energies).map(|(s, e)| s * e).sum())
        .collect();
    out.sort_by(f64::total_cmp);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{build_hamiltonian, HamiltonianParams};

    #[test]
    fn weights_and_derived_scalars() {
        let w = MixtureWeights::new([0.4, 0.3, 0.2, 0.1]).unwrap();
        assert!((w.x() - 0.4).abs() < 1e-15);
        assert!((w.y() - 0.2).abs() < 1e-15);
        assert!(w.z().abs() < 1e-15);
        assert_eq!(MixtureWeights::new([0.5, 0.5, 0.5, -0.5]), Err(Error::InvalidWeights));
        assert_eq!(MixtureWeights::new([0.5, 0.2, 0.2, 0.2]), Err(Error::InvalidWeights));
        let u = MixtureWeights::uniform();
        assert_eq!((u.x(), u.y(), u.z()), (0.0, 0.0, 0.0));
    }

    #[test]
    fn component_counts() {
        let fig = [0.45, 0.45, 0.05, 0.05];
        assert_eq!(expected_components(&[1, 1, 1, 1], &fig), 6);
        assert_eq!(expected_components(&[2, 2], &fig), 3);
        assert_eq!(expected_components(&[1, 1, 1, 1], &[1.0, 0.0, 0.0, 0.0]), 4);
        assert_eq!(expected_components(&[2, 2], &[1.0, 0.0, 0.0, 0.0]), 2);
        assert_eq!(expected_components(&[1, 1, 1, 1], &[0.25; 4]), 1);
        assert_eq!(expected_components(&[1, 1, 1, 1], &[0.4, 0.3, 0.2, 0.1]), 24);
    }

    #[test]
    fn oracle_on_broken_family() {
        let p = HamiltonianParams::broken(1.0, 1.0, 1.0, 1.0, 1.0);
        let (ep, em) = p.broken_energies();
        let h = build_hamiltonian(&p).unwrap();
        let values = assignment_oracle(&h, &[0.45, 0.45, 0.05, 0.05]);
        let mut want = vec![0.4 * (ep + em), -0.4 * (ep + em), 0.4 * (ep - em), -0.4 * (ep - em), 0.0, 0.0];
        want.sort_by(f64::total_cmp);
        for (g, w) in values.iter().zip(&want) {
            assert!((g - w).abs() < 1e-12, "{values:?}");
        }
    }
}
