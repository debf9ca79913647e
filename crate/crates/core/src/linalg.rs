//! Small dense helpers shared by every module.

use alloc::vec::Vec;
use nalgebra::{Complex, DMatrix, Matrix4, SymmetricEigen, Vector4};

pub type C64 = Complex<f64>;
/// Canonical computational form of a two-qubit operator.
pub type Mat4 = Matrix4<C64>;
pub type Vec4 = Vector4<C64>;

pub const HERMITIAN_TOLERANCE: f64 = 1e-10;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn max_abs<R, Cc, S>(m: &nalgebra::Matrix<C64, R, Cc, S>) -> f64
where
    R: nalgebra::Dim,
    Cc: nalgebra::Dim,
    S: nalgebra::RawStorage<C64, R, Cc>,
{
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_real(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// `max |H − H†|` entrywise.
pub fn hermitian_deviation(m: &Mat4) -> f64 {
    max_abs(&(m - m.adjoint()))
}

pub fn hermitian_deviation_dyn(m: &DMatrix<C64>) -> f64 {
    max_abs(&(m - m.adjoint()))
}

pub fn commutator(a: &Mat4, b: &Mat4) -> Mat4 {
    a * b - b * a
}

pub fn frobenius(m: &Mat4) -> f64 {
    libm::sqrt(m.iter().map(|z| z.norm_sqr()).sum::<f64>())
}

pub fn trace_re(m: &Mat4) -> f64 {
    m.trace().re
}

/// `Re Tr(A B)` without forming the product.
pub fn trace_product_re(a: &Mat4, b: &Mat4) -> f64 {
    let mut acc = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            acc += (a[(i, j)] * b[(j, i)]).re;
        }
    }
    acc
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn eigvalsh(m: &Mat4) -> [f64; 4] {
    let eig = SymmetricEigen::new(*m);
    let mut out = [0.0; 4];
    for (o, v) in out.iter_mut().zip(eig.eigenvalues.iter()) {
        *o = *v;
    }
    out.sort_by(f64::total_cmp);
    out
}

/// Eigenpairs of a Hermitian matrix, ascending by eigenvalue.
pub fn eigh(m: &Mat4) -> ([f64; 4], [Vec4; 4]) {
    let eig = SymmetricEigen::new(*m);
    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut vals = [0.0; 4];
    let mut vecs = [Vec4::zeros(); 4];
    for (k, &i) in order.iter().enumerate() {
        vals[k] = eig.eigenvalues[i];
        vecs[k] = eig.eigenvectors.column(i).into_owned();
    }
    (vals, vecs)
}

pub fn eigvalsh_dyn(m: &DMatrix<C64>) -> Vec<f64> {
    let eig = SymmetricEigen::new(m.clone());
    let mut out: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    out.sort_by(f64::total_cmp);
    out
}

pub fn projector(v: &Vec4) -> Mat4 {
    v * v.adjoint()
}

/// Row-major `4×4` literal of real parts.
pub fn real_matrix(rows: [[f64; 4]; 4]) -> Mat4 {
    Mat4::from_fn(|i, j| c(rows[i][j], 0.0))
}

/// Smallest singular values are compared against `rel · σ_max`.
pub fn numerical_rank(singular_values: &[f64], rel: f64) -> usize {
    let smax = singular_values.iter().fold(0.0f64, |a, &b| a.max(b));
    if smax == 0.0 {
        return 0;
    }
    singular_values.iter().filter(|&&s| s > rel * smax).count()
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}
