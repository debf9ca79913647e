//! The traceless 4×4 Hamiltonian family written in a Kramers-adapted basis,
//! the antiunitary time-reversal operator `T = U∘K` and numerical checks of
//! the two Kramers-pair propositions.

use alloc::vec::Vec;

use crate::linalg::{c, commutator, eigh, frobenius, max_abs, projector, trace_product_re, Mat4, Vec4};
use crate::{Error, Result};

/// Relative tolerance on `|s ∓ σ|` when deciding the symmetry class.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symmetry {
    /// `s = σ`: time-reversal invariant, every level doubly degenerate.
    Kramers,
    /// `s = −σ` with `σ ≠ 0`: time reversal broken, generically non-degenerate.
    Broken,
    General,
}

/// Parameters `(β, γ, δ, ε, σ, s)` of the family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HamiltonianParams {
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub sigma: f64,
    pub s: f64,
}

impl HamiltonianParams {
    pub fn new(beta: f64, gamma: f64, delta: f64, epsilon: f64, sigma: f64, s: f64) -> Self {
        Self { beta, gamma, delta, epsilon, sigma, s }
    }

    /// `s = σ`.
    pub fn kramers(beta: f64, gamma: f64, delta: f64, epsilon: f64, sigma: f64) -> Self {
        Self::new(beta, gamma, delta, epsilon, sigma, sigma)
    }

    /// `s = −σ`.
    pub fn broken(beta: f64, gamma: f64, delta: f64, epsilon: f64, sigma: f64) -> Self {
        Self::new(beta, gamma, delta, epsilon, sigma, -sigma)
    }

    pub fn validate(&self) -> Result<()> {
        let named = [
            ("beta", self.beta),
            ("gamma", self.gamma),
            ("delta", self.delta),
            ("epsilon", self.epsilon),
            ("sigma", self.sigma),
            ("s", self.s),
        ];
        for (name, v) in named {
            if !v.is_finite() {
                return Err(Error::NonFiniteParameter(name));
            }
        }
        Ok(())
    }

    fn scale(&self) -> f64 {
        [self.beta, self.gamma, self.delta, self.epsilon, self.sigma, self.s]
            .iter()
            .fold(0.0f64, |a, v| a.max(v.abs()))
            .max(1.0)
    }

    pub fn symmetry(&self) -> Symmetry {
        let tol = SYMMETRY_TOLERANCE * self.scale();
        if (self.s - self.sigma).abs() <= tol {
            Symmetry::Kramers
        } else if (self.s + self.sigma).abs() <= tol {
            Symmetry::Broken
        } else {
            Symmetry::General
        }
    }

    pub fn is_kramers(&self) -> bool {
        self.symmetry() == Symmetry::Kramers
    }

    pub fn is_broken(&self) -> bool {
        self.symmetry() == Symmetry::Broken
    }

    /// `Δ² = β² + γ²`.
    pub fn delta_cap_sq(&self) -> f64 {
        self.beta * self.beta + self.gamma * self.gamma
    }

    /// `ω² = σ² + ε²`.
    pub fn omega_sq(&self) -> f64 {
        self.sigma * self.sigma + self.epsilon * self.epsilon
    }

    /// Kramers level `E = √(Δ² + ω² + δ²)`; equals `(det H)^{1/4}` when `s = σ`.
    pub fn kramers_energy(&self) -> f64 {
        libm::sqrt(self.delta_cap_sq() + self.omega_sq() + self.delta * self.delta)
    }

    /// `(E₊, E₋)` with `E±² = β² + γ² + δ² + σ² + ε² ± 2σ√(δ² + ε²)`; the
    /// levels of the broken family are `±E₊, ±E₋`.
    pub fn broken_energies(&self) -> (f64, f64) {
        let base = self.delta_cap_sq() + self.omega_sq() + self.delta * self.delta;
        let cross = 2.0 * self.sigma * libm::sqrt(self.delta * self.delta + self.epsilon * self.epsilon);
        (libm::sqrt((base + cross).max(0.0)), libm::sqrt((base - cross).max(0.0)))
    }

    /// Value of a named parameter (`beta`, `gamma`, `delta`, `epsilon`, `sigma`, `s`).
    pub fn get(&self, name: &str) -> Option<f64> {
        Some(match name {
            "beta" => self.beta,
            "gamma" => self.gamma,
            "delta" => self.delta,
            "epsilon" => self.epsilon,
            "sigma" => self.sigma,
            "s" => self.s,
            _ => return None,
        })
    }

    /// Copy with one parameter replaced. Setting `sigma` keeps the symmetry
    /// class by moving `s` along with it.
    pub fn with(&self, name: &str, value: f64) -> Option<Self> {
        let mut out = *self;
        let symmetry = self.symmetry();
        match name {
            "beta" => out.beta = value,
            "gamma" => out.gamma = value,
            "delta" => out.delta = value,
            "epsilon" => out.epsilon = value,
            "s" => out.s = value,
            "sigma" => {
                out.sigma = value;
                match symmetry {
                    Symmetry::Kramers => out.s = value,
                    Symmetry::Broken => out.s = -value,
                    Symmetry::General => {}
                }
            }
            _ => return None,
        }
        Some(out)
    }
}

/// Assemble the family matrix in the basis `{ψ₁, Tψ₁, ψ₂, Tψ₂}`.
pub fn build_hamiltonian(p: &HamiltonianParams) -> Result<Mat4> {
    p.validate()?;
    let HamiltonianParams { beta, gamma, delta, epsilon, sigma, s } = *p;
    let z = c(0.0, 0.0);
    let rows = [
        [c(beta, 0.0), z, c(gamma, -s), c(-epsilon, -delta)],
        [z, c(beta, 0.0), c(epsilon, -delta), c(gamma, sigma)],
        [c(gamma, s), c(epsilon, delta), c(-beta, 0.0), z],
        [c(-epsilon, delta), c(gamma, -sigma), z, c(-beta, 0.0)],
    ];
    Ok(Mat4::from_fn(|i, j| rows[i][j]))
}

/// Antiunitary `T = U∘K` (K = complex conjugation).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeReversalOperator {
    u: Mat4,
}

/// Outcome of an antiunitary commutation test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommutationCheck {
    pub commutes: bool,
    pub residual: f64,
}

impl TimeReversalOperator {
    /// Symplectic block form: `ψ_k ↦ Tψ_k`, `Tψ_k ↦ −ψ_k`.
    pub fn canonical() -> Self {
        let z = c(0.0, 0.0);
        let one = c(1.0, 0.0);
        let u = Mat4::new(z, -one, z, z, one, z, z, z, z, z, z, -one, z, z, one, z);
        Self { u }
    }

    pub fn unitary(&self) -> &Mat4 {
        &self.u
    }

    /// `T|v⟩ = U conj(v)`.
    pub fn apply(&self, v: &Vec4) -> Vec4 {
        self.u * v.conjugate()
    }

    /// `T A T⁻¹ = U conj(A) U†`.
    pub fn conjugate(&self, a: &Mat4) -> Mat4 {
        self.u * a.conjugate() * self.u.adjoint()
    }

    /// `U conj(A) − A U`, the matrix form of `[T, A]`.
    pub fn commutator(&self, a: &Mat4) -> Mat4 {
        self.u * a.conjugate() - a * self.u
    }

    /// `max |U conj(U) + I|`; zero for `T² = −I`.
    pub fn fermionic_residual(&self) -> f64 {
        max_abs(&(self.u * self.u.conjugate() + Mat4::identity()))
    }
}

pub fn build_time_reversal() -> TimeReversalOperator {
    TimeReversalOperator::canonical()
}

/// True iff `max |U conj(H) − H U| ≤ 1e-10`.
pub fn time_reversal_commutes(h: &Mat4, t: &TimeReversalOperator) -> CommutationCheck {
    let residual = max_abs(&t.commutator(h));
    CommutationCheck { commutes: residual <= 1e-10, residual }
}

/// Per-state findings for the first proposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KramersPartnerCheck {
    /// `‖U conj(ρ) − ρ U‖_F`.
    pub t_residual: f64,
    /// `Tr(ρ · TρT⁻¹)`.
    pub partner_overlap: f64,
    /// `‖[TρT⁻¹, H]‖_max`.
    pub partner_commutator: f64,
    pub energy: f64,
    pub partner_energy: f64,
    /// Residual fell below `1e-6 ‖ρ‖_F`; flagged rather than treated as a failure.
    pub degenerate_warning: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Proposition1Report {
    pub states: Vec<KramersPartnerCheck>,
    /// Every state fails to commute with T and is orthogonal to its partner.
    pub holds: bool,
}

/// Pure extremal states of a time-reversal invariant H do not commute with T.
pub fn verify_proposition1(
    h: &Mat4,
    t: &TimeReversalOperator,
    pure_states: &[Mat4],
) -> Result<Proposition1Report> {
    let scale = max_abs(h).max(1.0);
    let symmetry = time_reversal_commutes(h, t);
    if !symmetry.commutes {
        return Err(Error::NotCommuting { residual: symmetry.residual });
    }
    let mut states = Vec::with_capacity(pure_states.len());
    let mut holds = true;
    for rho in pure_states {
        let purity = max_abs(&(rho * rho - rho)).max((rho.trace().re - 1.0).abs());
        if purity > 1e-8 {
            return Err(Error::NotPure { residual: purity });
        }
        let comm = max_abs(&commutator(rho, h));
        if comm > 1e-8 * scale {
            return Err(Error::NotCommuting { residual: comm });
        }
        let partner = t.conjugate(rho);
        let t_residual = frobenius(&t.commutator(rho));
        let partner_overlap = trace_product_re(rho, &partner);
        let check = KramersPartnerCheck {
            t_residual,
            partner_overlap,
            partner_commutator: max_abs(&commutator(&partner, h)),
            energy: trace_product_re(h, rho),
            partner_energy: trace_product_re(h, &partner),
            degenerate_warning: t_residual < 1e-6 * frobenius(rho),
        };
        holds &= !check.degenerate_warning && partner_overlap.abs() <= 1e-10;
        states.push(check);
    }
    Ok(Proposition1Report { states, holds })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KramersProjectorCheck {
    /// `max |P² − P|`.
    pub idempotency: f64,
    pub trace: f64,
    /// `max |U conj(P) − P U|`.
    pub t_residual: f64,
    /// `max |[P, H]|`.
    pub h_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Proposition2Report {
    pub projectors: Vec<KramersProjectorCheck>,
    /// `max |Σ P_k − I|`.
    pub completeness: f64,
    pub holds: bool,
}

/// Rank-two projectors `P = ρ + TρT⁻¹` built from the given pure states.
pub fn verify_proposition2_with(
    h: &Mat4,
    t: &TimeReversalOperator,
    pure_states: &[Mat4],
) -> Result<Proposition2Report> {
    let symmetry = time_reversal_commutes(h, t);
    if !symmetry.commutes {
        return Err(Error::NotCommuting { residual: symmetry.residual });
    }
    let mut projectors = Vec::with_capacity(pure_states.len());
    let mut sum = Mat4::zeros();
    let mut holds = true;
    for rho in pure_states {
        let p = rho + t.conjugate(rho);
        sum += p;
        let check = KramersProjectorCheck {
            idempotency: max_abs(&(p * p - p)),
            trace: p.trace().re,
            t_residual: max_abs(&t.commutator(&p)),
            h_residual: max_abs(&commutator(&p, h)),
        };
        holds &= check.idempotency <= 1e-10
            && (check.trace - 2.0).abs() <= 1e-10
            && check.t_residual <= 1e-10
            && check.h_residual <= 1e-10 * max_abs(h).max(1.0);
        projectors.push(check);
    }
    let completeness = max_abs(&(sum - Mat4::identity()));
    Ok(Proposition2Report { projectors, completeness, holds })
}

/// Builds one Kramers pair per degenerate level from the eigenvectors of H
/// and checks the rank-two projectors.
pub fn verify_proposition2(h: &Mat4, t: &TimeReversalOperator) -> Result<Proposition2Report> {
    let (_, vecs) = eigh(h);
    // Levels come in pairs after sorting; one representative per pair.
    let reps = [projector(&vecs[0]), projector(&vecs[2])];
    verify_proposition2_with(h, t, &reps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eigvalsh;
    use crate::sampling::complex_normal;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn unit_kramers() -> HamiltonianParams {
        HamiltonianParams::kramers(1.0, 1.0, 1.0, 1.0, 1.0)
    }

    #[test]
    fn zero_and_diagonal_examples() {
        let h = build_hamiltonian(&HamiltonianParams::new(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)).unwrap();
        assert_eq!(h, Mat4::zeros());
        let h = build_hamiltonian(&HamiltonianParams::new(1.0, 0.0, 0.0, 0.0, 0.0, 0.0)).unwrap();
        assert_eq!(h, Mat4::from_diagonal(&Vec4::new(c(1.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(-1.0, 0.0))));
    }

    #[test]
    fn unit_kramers_levels() {
        let p = unit_kramers();
        let h = build_hamiltonian(&p).unwrap();
        let e = libm::sqrt(5.0);
        let ev = eigvalsh(&h);
        for (got, want) in ev.iter().zip([-e, -e, e, e]) {
            assert!((got - want).abs() < 1e-12);
        }
        assert!((libm::pow(h.determinant().re, 0.25) - e).abs() < 1e-12);
        assert!((p.kramers_energy() - e).abs() < 1e-15);
        assert_eq!(p.delta_cap_sq(), 2.0);
        assert_eq!(p.omega_sq(), 2.0);
    }

    #[test]
    fn non_finite_rejected() {
        let p = HamiltonianParams::new(f64::NAN, 0.0, 0.0, 0.0, 0.0, 0.0);
        assert_eq!(build_hamiltonian(&p), Err(Error::NonFiniteParameter("beta")));
    }

    #[test]
    fn symmetry_classes() {
        assert_eq!(unit_kramers().symmetry(), Symmetry::Kramers);
        assert_eq!(HamiltonianParams::broken(1.0, 1.0, 1.0, 1.0, 1.0).symmetry(), Symmetry::Broken);
        assert_eq!(HamiltonianParams::new(1.0, 1.0, 1.0, 1.0, 1.0, 0.3).symmetry(), Symmetry::General);
        let p = HamiltonianParams::broken(1.0, 1.0, 1.0, 1.0, 1.0).with("sigma", 2.0).unwrap();
        assert_eq!(p.s, -2.0);
    }

    #[test]
    fn time_reversal_properties() {
        let t = build_time_reversal();
        assert_eq!(t.fermionic_residual(), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let v = Vec4::from_fn(|_, _| complex_normal(&mut rng));
            let w = Vec4::from_fn(|_, _| complex_normal(&mut rng));
            assert!(max_abs(&(t.apply(&t.apply(&v)) + v)) < 1e-14);
            let lhs = t.apply(&v).dotc(&t.apply(&w));
            let rhs = v.dotc(&w).conj();
            assert!((lhs - rhs).norm() < 1e-12);
            assert!(v.dotc(&t.apply(&v)).norm() < 1e-12);
        }
    }

    #[test]
    fn commutation_by_symmetry_class() {
        let t = build_time_reversal();
        let h = build_hamiltonian(&unit_kramers()).unwrap();
        assert!(time_reversal_commutes(&h, &t).commutes);
        let h = build_hamiltonian(&HamiltonianParams::broken(1.0, 1.0, 1.0, 1.0, 1.0)).unwrap();
        let check = time_reversal_commutes(&h, &t);
        assert!(!check.commutes);
        assert!(check.residual > 0.1);
        assert!(time_reversal_commutes(&Mat4::zeros(), &t).commutes);
    }

    #[test]
    fn proposition2_from_eigenvectors() {
        let t = build_time_reversal();
        let h = build_hamiltonian(&HamiltonianParams::kramers(0.3, -1.2, 0.7, 0.4, 0.9)).unwrap();
        let report = verify_proposition2(&h, &t).unwrap();
        assert!(report.holds, "{report:?}");
        assert!(report.completeness < 1e-10);
    }

    #[test]
    fn proposition1_rejects_bad_inputs() {
        let t = build_time_reversal();
        let h = build_hamiltonian(&unit_kramers()).unwrap();
        let mixed = Mat4::identity() * c(0.25, 0.0);
        assert!(matches!(verify_proposition1(&h, &t, &[mixed]), Err(Error::NotPure { .. })));
        let broken = build_hamiltonian(&HamiltonianParams::broken(1.0, 1.0, 1.0, 1.0, 1.0)).unwrap();
        assert!(matches!(verify_proposition1(&broken, &t, &[]), Err(Error::NotCommuting { .. })));
    }
}
