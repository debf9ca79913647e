//! Dirac basis `D_{p,q} = σ_p ⊗ σ_q` and the Fano parametrization of
//! two-qubit operators.
//!
//! An operator is stored as sixteen real coefficients `h_{pq} = Tr(H D_{p,q})`
//! so that `H = ¼ Σ h_{pq} D_{p,q}`. For a state the coefficients split into
//! the two Bloch vectors `τ^A = (r_{10}, r_{20}, r_{30})`,
//! `τ^B = (r_{01}, r_{02}, r_{03})`, the correlation block `C_{st} = r_{st}` and
//! the Schlienz–Mahler matrix `M = C − τ^A τ^Bᵀ`.

use alloc::string::String;
use alloc::vec::Vec;
use nalgebra::{Matrix2, Matrix3, Vector3};

use crate::linalg::{c, hermitian_deviation, max_abs, Mat4, C64, HERMITIAN_TOLERANCE};
use crate::{Error, Result};

/// Which tensor factor an operation acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subsystem {
    A,
    B,
}

/// `σ_0 = I`, `σ_1 = X`, `σ_2 = Y`, `σ_3 = Z`.
pub fn pauli(k: usize) -> Result<Matrix2<C64>> {
    let z = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    Ok(match k {
        0 => Matrix2::new(one, z, z, one),
        1 => Matrix2::new(z, one, one, z),
        2 => Matrix2::new(z, -i, i, z),
        3 => Matrix2::new(one, z, z, -one),
        _ => return Err(Error::IndexOutOfRange { p: k, q: 0 }),
    })
}

/// `σ_p ⊗ σ_q` with the first factor acting on qubit A (block index).
pub fn dirac_basis_element(p: usize, q: usize) -> Result<Mat4> {
    if p > 3 || q > 3 {
        return Err(Error::IndexOutOfRange { p, q });
    }
    let a = pauli(p)?;
    let b = pauli(q)?;
    Ok(Mat4::from_fn(|i, j| a[(i / 2, j / 2)] * b[(i % 2, j % 2)]))
}

/// All sixteen basis elements, indexed `[p][q]`.
pub fn dirac_basis() -> [[Mat4; 4]; 4] {
    core::array::from_fn(|p| core::array::from_fn(|q| dirac_basis_element(p, q).expect("indices in range")))
}

/// Non-zero entries `(row, col, value)` of each Pauli matrix.
const PAULI_ENTRIES: [[(usize, usize, C64); 2]; 4] = [
    [(0, 0, C64::new(1.0, 0.0)), (1, 1, C64::new(1.0, 0.0))],
    [(0, 1, C64::new(1.0, 0.0)), (1, 0, C64::new(1.0, 0.0))],
    [(0, 1, C64::new(0.0, -1.0)), (1, 0, C64::new(0.0, 1.0))],
    [(0, 0, C64::new(1.0, 0.0)), (1, 1, C64::new(-1.0, 0.0))],
];

/// A Hermitian two-qubit operator in Fano coefficients, `H = ¼ Σ h_{pq} D_{p,q}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FanoOperator {
    coeffs: [[f64; 4]; 4],
}

impl FanoOperator {
    pub const fn new(coeffs: [[f64; 4]; 4]) -> Self {
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self::new([[0.0; 4]; 4])
    }

    pub fn coeffs(&self) -> &[[f64; 4]; 4] {
        &self.coeffs
    }

    pub fn get(&self, p: usize, q: usize) -> f64 {
        self.coeffs[p][q]
    }

    pub fn set(&mut self, p: usize, q: usize, value: f64) {
        self.coeffs[p][q] = value;
    }

    /// Decompose a Hermitian matrix; fails when `max |H − H†| > 1e-10`.
    pub fn decompose(h: &Mat4) -> Result<Self> {
        let deviation = hermitian_deviation(h);
        if !(deviation <= HERMITIAN_TOLERANCE) {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self::decompose_unchecked(h))
    }

    /// `h_{pq} = Re Tr(H D_{p,q})`, evaluated from the tensor structure
    /// without forming the products.
    pub fn decompose_unchecked(h: &Mat4) -> Self {
        let mut coeffs = [[0.0; 4]; 4];
        for (p, row) in coeffs.iter_mut().enumerate() {
            for (q, value) in row.iter_mut().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for &(ra, ca, va) in &PAULI_ENTRIES[p] {
                    for &(rb, cb, vb) in &PAULI_ENTRIES[q] {
                        // Tr(H D) = Σ H[i, j] D[j, i]
                        acc += h[(2 * ca + cb, 2 * ra + rb)] * va * vb;
                    }
                }
                *value = acc.re;
            }
        }
        Self { coeffs }
    }

    pub fn compose(&self) -> Mat4 {
        let mut out = Mat4::zeros();
        for p in 0..4 {
            for q in 0..4 {
                let h = self.coeffs[p][q];
                if h == 0.0 {
                    continue;
                }
                for &(ra, ca, va) in &PAULI_ENTRIES[p] {
                    for &(rb, cb, vb) in &PAULI_ENTRIES[q] {
                        out[(2 * ra + rb, 2 * ca + cb)] += va * vb * (0.25 * h);
                    }
                }
            }
        }
        out
    }

    /// Euclidean distance between coefficient arrays.
    pub fn distance(&self, other: &Self) -> f64 {
        let mut acc = 0.0;
        for p in 0..4 {
            for q in 0..4 {
                let d = self.coeffs[p][q] - other.coeffs[p][q];
                acc += d * d;
            }
        }
        libm::sqrt(acc)
    }
}

/// `fano_decompose` in free-function form.
pub fn fano_decompose(h: &Mat4) -> Result<FanoOperator> {
    FanoOperator::decompose(h)
}

pub fn fano_compose(f: &FanoOperator) -> Mat4 {
    f.compose()
}

/// Bloch vectors, correlation and Schlienz–Mahler matrices of a set of
/// Fano coefficients (with `r_{00}` assumed to be 1).
pub fn bloch_and_correlations(
    f: &FanoOperator,
) -> (Vector3<f64>, Vector3<f64>, Matrix3<f64>, Matrix3<f64>) {
    let r = f.coeffs();
    let tau_a = Vector3::new(r[1][0], r[2][0], r[3][0]);
    let tau_b = Vector3::new(r[0][1], r[0][2], r[0][3]);
    let corr = Matrix3::from_fn(|s, t| r[s + 1][t + 1]);
    let sm = corr - tau_a * tau_b.transpose();
    (tau_a, tau_b, corr, sm)
}

/// A unit-trace two-qubit operator with its Fano blocks cached.
///
/// Positivity is *not* enforced here; extremal solvers and the PPT
/// classifier check it where it matters.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityState {
    fano: FanoOperator,
    tau_a: Vector3<f64>,
    tau_b: Vector3<f64>,
    corr: Matrix3<f64>,
    sm: Matrix3<f64>,
}

impl DensityState {
    /// Accepts coefficients whose `r_{00}` is within `1e-9` of one and stores
    /// exactly one.
    pub fn from_fano(fano: FanoOperator) -> Result<Self> {
        let trace = fano.get(0, 0);
        if !((trace - 1.0).abs() <= 1e-9) {
            return Err(Error::NotTraceOne { trace });
        }
        let mut fano = fano;
        fano.set(0, 0, 1.0);
        let (tau_a, tau_b, corr, sm) = bloch_and_correlations(&fano);
        Ok(Self { fano, tau_a, tau_b, corr, sm })
    }

    pub fn from_matrix(rho: &Mat4) -> Result<Self> {
        Self::from_fano(FanoOperator::decompose(rho)?)
    }

    /// Assemble from the Fano blocks `(τ^A, τ^B, C)`.
    pub fn from_blocks(tau_a: Vector3<f64>, tau_b: Vector3<f64>, corr: Matrix3<f64>) -> Self {
        let mut coeffs = [[0.0; 4]; 4];
        coeffs[0][0] = 1.0;
        for s in 0..3 {
            coeffs[s + 1][0] = tau_a[s];
            coeffs[0][s + 1] = tau_b[s];
            for t in 0..3 {
                coeffs[s + 1][t + 1] = corr[(s, t)];
            }
        }
        let fano = FanoOperator::new(coeffs);
        let sm = corr - tau_a * tau_b.transpose();
        Self { fano, tau_a, tau_b, corr, sm }
    }

    pub fn maximally_mixed() -> Self {
        Self::from_blocks(Vector3::zeros(), Vector3::zeros(), Matrix3::zeros())
    }

    pub fn fano(&self) -> &FanoOperator {
        &self.fano
    }

    pub fn tau_a(&self) -> &Vector3<f64> {
        &self.tau_a
    }

    pub fn tau_b(&self) -> &Vector3<f64> {
        &self.tau_b
    }

    /// Correlation matrix `C`.
    pub fn correlation(&self) -> &Matrix3<f64> {
        &self.corr
    }

    /// Schlienz–Mahler matrix `M`.
    pub fn schlienz_mahler(&self) -> &Matrix3<f64> {
        &self.sm
    }

    pub fn matrix(&self) -> Mat4 {
        self.fano.compose()
    }

    /// Convex combination `Σ w_i ρ_i` in coefficient space.
    pub fn mixture(weights: &[f64], states: &[DensityState]) -> Self {
        let mut coeffs = [[0.0; 4]; 4];
        for (w, s) in weights.iter().zip(states) {
            for (p, row) in coeffs.iter_mut().enumerate() {
                for (q, v) in row.iter_mut().enumerate() {
                    *v += w * s.fano.get(p, q);
                }
            }
        }
        coeffs[0][0] = 1.0;
        let fano = FanoOperator::new(coeffs);
        let (tau_a, tau_b, corr, sm) = bloch_and_correlations(&fano);
        Self { fano, tau_a, tau_b, corr, sm }
    }
}

/// Partial transpose on one factor.
///
/// With `ρ = [[F, G], [P, Q]]` in 2×2 blocks (block index = qubit A),
/// transposing A swaps the off-diagonal blocks, `[[F, P], [G, Q]]`, while
/// transposing B transposes every block in place.
pub fn partial_transpose(rho: &Mat4, subsystem: Subsystem) -> Mat4 {
    Mat4::from_fn(|i, j| {
        let (a, b) = (i / 2, i % 2);
        let (a2, b2) = (j / 2, j % 2);
        match subsystem {
            Subsystem::A => rho[(2 * a2 + b, 2 * a + b2)],
            Subsystem::B => rho[(2 * a + b2, 2 * a2 + b)],
        }
    })
}

/// Outcome of one identity family in [`commutator_tables_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityCheck {
    pub name: String,
    pub cases: usize,
    pub max_residual: f64,
    pub passed: bool,
}

fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (1, 2, 3) | (2, 3, 1) | (3, 1, 2) => 1.0,
        (3, 2, 1) | (1, 3, 2) | (2, 1, 3) => -1.0,
        _ => 0.0,
    }
}

fn kron_delta(i: usize, j: usize) -> f64 {
    if i == j {
        1.0
    } else {
        0.0
    }
}

/// Verifies the orthogonality relation, the product rules and the three
/// commutator tables of the Dirac basis by dense arithmetic over every index
/// combination. Entries are integers or `±i`, so every residual is exactly 0.
pub fn commutator_tables_check() -> Vec<IdentityCheck> {
    let d = dirac_basis();
    let two_i = c(0.0, 2.0);
    let mut out = Vec::new();

    let mut record = |name: &str, residuals: &mut dyn Iterator<Item = f64>| {
        let mut cases = 0;
        let mut worst = 0.0f64;
        for r in residuals {
            cases += 1;
            worst = worst.max(r);
        }
        out.push(IdentityCheck { name: String::from(name), cases, max_residual: worst, passed: worst == 0.0 });
    };

    record(
        "Tr(D_jk D_mn) = 4 delta_jm delta_kn",
        &mut (0..256).map(|idx| {
            let (j, k, m, n) = (idx / 64, (idx / 16) % 4, (idx / 4) % 4, idx % 4);
            let tr = (d[j][k] * d[m][n]).trace();
            (tr - c(4.0 * kron_delta(j, m) * kron_delta(k, n), 0.0)).norm()
        }),
    );
    record(
        "D_p0 D_0q = D_0q D_p0 = D_pq",
        &mut (0..16).map(|idx| {
            let (p, q) = (idx / 4, idx % 4);
            let left = max_abs(&(d[p][0] * d[0][q] - d[p][q]));
            let right = max_abs(&(d[0][q] * d[p][0] - d[p][q]));
            left.max(right)
        }),
    );
    let product_rule = |first: bool| {
        (0..9).map(move |idx| {
            let (i, j) = (idx / 3 + 1, idx % 3 + 1);
            let pick = |a: usize| if first { d[a][0] } else { d[0][a] };
            let mut rhs = d[0][0] * c(kron_delta(i, j), 0.0);
            for k in 1..4 {
                rhs += pick(k) * c(0.0, levi_civita(i, j, k));
            }
            max_abs(&(pick(i) * pick(j) - rhs))
        })
    };
    record("D_i0 D_j0 = i eps_ijk D_k0 + delta_ij D_00", &mut product_rule(true));
    record("D_0i D_0j = i eps_ijk D_0k + delta_ij D_00", &mut product_rule(false));
    record(
        "[D_j0, D_mn] = 2i eps_jmq D_qn",
        &mut (0..48).map(|idx| {
            let (j, m, n) = (idx / 16 + 1, (idx / 4) % 4, idx % 4);
            let mut rhs = Mat4::zeros();
            for q in 1..4 {
                rhs += d[q][n] * (two_i * levi_civita(j, m, q));
            }
            max_abs(&(d[j][0] * d[m][n] - d[m][n] * d[j][0] - rhs))
        }),
    );
    record(
        "[D_0j, D_mn] = 2i eps_jnq D_mq",
        &mut (0..48).map(|idx| {
            let (j, m, n) = (idx / 16 + 1, (idx / 4) % 4, idx % 4);
            let mut rhs = Mat4::zeros();
            for q in 1..4 {
                rhs += d[m][q] * (two_i * levi_civita(j, n, q));
            }
            max_abs(&(d[0][j] * d[m][n] - d[m][n] * d[0][j] - rhs))
        }),
    );
    record(
        "[D_ij, D_pq] = 2i (delta_ip eps_jql D_0l + delta_jq eps_ipk D_k0)",
        &mut (0..81).map(|idx| {
            let (i, j, p, q) = (idx / 27 + 1, (idx / 9) % 3 + 1, (idx / 3) % 3 + 1, idx % 3 + 1);
            let mut rhs = Mat4::zeros();
            for l in 1..4 {
                rhs += d[0][l] * (two_i * (kron_delta(i, p) * levi_civita(j, q, l)));
                rhs += d[l][0] * (two_i * (kron_delta(j, q) * levi_civita(i, p, l)));
            }
            max_abs(&(d[i][j] * d[p][q] - d[p][q] * d[i][j] - rhs))
        }),
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eigvalsh, real_matrix};

    fn bell() -> DensityState {
        DensityState::from_blocks(
            Vector3::zeros(),
            Vector3::zeros(),
            Matrix3::from_diagonal(&Vector3::new(1.0, -1.0, 1.0)),
        )
    }

    #[test]
    fn identity_and_xx_elements() {
        assert_eq!(dirac_basis_element(0, 0).unwrap(), Mat4::identity());
        let xx = dirac_basis_element(1, 1).unwrap();
        let anti = real_matrix([
            [0.0, 0.0, 0.0, 1.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [1.0, 0.0, 0.0, 0.0],
        ]);
        assert_eq!(xx, anti);
    }

    #[test]
    fn orthogonality_examples() {
        let d12 = dirac_basis_element(1, 2).unwrap();
        let d21 = dirac_basis_element(2, 1).unwrap();
        assert_eq!((d12 * d12).trace(), c(4.0, 0.0));
        assert_eq!((d12 * d21).trace(), c(0.0, 0.0));
    }

    #[test]
    fn out_of_range_index() {
        assert_eq!(dirac_basis_element(4, 0), Err(Error::IndexOutOfRange { p: 4, q: 0 }));
        assert!(dirac_basis_element(0, 7).is_err());
    }

    #[test]
    fn decompose_identity_and_basis_element() {
        let f = fano_decompose(&Mat4::identity()).unwrap();
        for p in 0..4 {
            for q in 0..4 {
                let want = if (p, q) == (0, 0) { 4.0 } else { 0.0 };
                assert_eq!(f.get(p, q), want);
            }
        }
        let f = fano_decompose(&dirac_basis_element(1, 1).unwrap()).unwrap();
        assert_eq!(f.get(1, 1), 4.0);
        assert_eq!(f.coeffs().iter().flatten().filter(|v| **v != 0.0).count(), 1);
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = Mat4::identity();
        m[(0, 1)] = c(1.0, 0.0);
        assert!(matches!(fano_decompose(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn compose_zero_and_maximally_mixed() {
        assert_eq!(fano_compose(&FanoOperator::zero()), Mat4::zeros());
        let mut f = FanoOperator::zero();
        f.set(0, 0, 1.0);
        assert_eq!(fano_compose(&f), Mat4::identity() * c(0.25, 0.0));
    }

    #[test]
    fn bell_state_blocks() {
        let rho = bell().matrix();
        assert!(max_abs(&(rho * rho - rho)) < 1e-15);
        assert!((rho.trace().re - 1.0).abs() < 1e-15);
        // Projector onto (|00> + |11>)/sqrt(2).
        assert!((rho[(0, 0)].re - 0.5).abs() < 1e-15);
        assert!((rho[(0, 3)].re - 0.5).abs() < 1e-15);
        assert!((rho[(3, 3)].re - 0.5).abs() < 1e-15);
        let from_matrix = DensityState::from_matrix(&rho).unwrap();
        let want = Matrix3::from_diagonal(&Vector3::new(1.0, -1.0, 1.0));
        assert!((from_matrix.correlation() - want).amax() < 1e-15);
        assert!((from_matrix.schlienz_mahler() - want).amax() < 1e-15);
    }

    #[test]
    fn product_state_has_vanishing_m() {
        let a = Vector3::new(0.3, -0.2, 0.5);
        let b = Vector3::new(-0.1, 0.6, 0.2);
        let s = DensityState::from_blocks(a, b, a * b.transpose());
        assert!(s.schlienz_mahler().amax() < 1e-15);
        let m = DensityState::from_matrix(&s.matrix()).unwrap();
        assert!(m.schlienz_mahler().amax() < 1e-12);
        assert!((m.correlation() - a * b.transpose()).amax() < 1e-12);
    }

    #[test]
    fn maximally_mixed_has_no_correlations() {
        let s = DensityState::maximally_mixed();
        assert_eq!(s.tau_a().amax(), 0.0);
        assert_eq!(s.correlation().amax(), 0.0);
        assert_eq!(partial_transpose(&s.matrix(), Subsystem::A), s.matrix());
    }

    #[test]
    fn trace_must_be_one() {
        let mut f = FanoOperator::zero();
        f.set(0, 0, 2.0);
        assert!(matches!(DensityState::from_fano(f), Err(Error::NotTraceOne { .. })));
    }

    #[test]
    fn bell_partial_transpose_has_negative_eigenvalue() {
        let pt = partial_transpose(&bell().matrix(), Subsystem::B);
        let ev = eigvalsh(&pt);
        assert!((ev[0] + 0.5).abs() < 1e-14);
        assert!(ev[1..].iter().all(|v| (v - 0.5).abs() < 1e-14));
    }

    #[test]
    fn partial_transposes_compose_to_full_transpose() {
        let m = Mat4::from_fn(|i, j| c((i * 4 + j) as f64, (i as f64) - (j as f64) * 0.5));
        let both = partial_transpose(&partial_transpose(&m, Subsystem::A), Subsystem::B);
        assert_eq!(both, m.transpose());
        assert_eq!(partial_transpose(&partial_transpose(&m, Subsystem::A), Subsystem::A), m);
    }

    #[test]
    fn commutator_tables_hold_exactly() {
        let checks = commutator_tables_check();
        assert_eq!(checks.len(), 7);
        for check in &checks {
            assert!(check.passed, "{} residual {}", check.name, check.max_residual);
        }
        let d = dirac_basis();
        // [D_10, D_01] = 0, [D_01, D_02] = 2i D_03, [D_11, D_12] = 2i D_03.
        assert_eq!(d[1][0] * d[0][1] - d[0][1] * d[1][0], Mat4::zeros());
        assert_eq!(d[0][1] * d[0][2] - d[0][2] * d[0][1], d[0][3] * c(0.0, 2.0));
        assert_eq!(d[1][1] * d[1][2] - d[1][2] * d[1][1], d[0][3] * c(0.0, 2.0));
    }
}
