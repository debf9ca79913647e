//! Random matrices for tests and verification runs.
//!
//! Normals are drawn with the Box–Muller transform so the module stays
//! `no_std`.

use nalgebra::DMatrix;
use rand::Rng;

use crate::linalg::{c, Mat4, C64};

pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > f64::MIN_POSITIVE {
            let v: f64 = rng.random();
            return libm::sqrt(-2.0 * libm::log(u)) * libm::cos(core::f64::consts::TAU * v);
        }
    }
}

pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    c(standard_normal(rng), standard_normal(rng))
}

/// 4×4 complex Ginibre matrix with standard-normal entries.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R) -> Mat4 {
    Mat4::from_fn(|_, _| complex_normal(rng))
}

/// `GG†/Tr(GG†)`: full rank with probability one.
pub fn ginibre_density<R: Rng + ?Sized>(rng: &mut R) -> Mat4 {
    let g = ginibre(rng);
    let w = g * g.adjoint();
    let tr = w.trace().re;
    w / c(tr, 0.0)
}

/// Hermitian matrix `(G + G†)/2`.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R) -> Mat4 {
    let g = ginibre(rng);
    (g + g.adjoint()) * c(0.5, 0.0)
}

pub fn random_hermitian_dyn<R: Rng + ?Sized>(rng: &mut R, d: usize) -> DMatrix<C64> {
    let g = DMatrix::from_fn(d, d, |_, _| complex_normal(rng));
    (&g + g.adjoint()) * c(0.5, 0.0)
}

/// Haar-random unitary from the QR decomposition of a Ginibre matrix with
/// the phases of `R`'s diagonal absorbed.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R) -> Mat4 {
    let qr = ginibre(rng).qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..4 {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / c(d.norm(), 0.0) } else { c(1.0, 0.0) };
        for i in 0..4 {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Uniform point on the probability simplex (Dirichlet(1,…,1)).
pub fn simplex_point<R: Rng + ?Sized, const N: usize>(rng: &mut R) -> [f64; N] {
    let mut out = [0.0; N];
    let mut total = 0.0;
    for v in out.iter_mut() {
        let u: f64 = rng.random();
        *v = -libm::log(1.0 - u);
        total += *v;
    }
    for v in out.iter_mut() {
        *v /= total;
    }
    out
}
