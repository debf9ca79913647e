//! Extremal density matrices of finite-dimensional Hamiltonians.
//!
//! A state ρ is *extremal* for a Hamiltonian H when `[ρ, H] = 0`; at a
//! prescribed degree of mixing (the characteristic-polynomial coefficients
//! `c_2, …, c_d` of ρ) these are the critical points of `Tr(Hρ)` over the
//! unitary orbit. This crate computes them for 4×4 Hamiltonians and classifies
//! the two-qubit ones with the positive-partial-transpose criterion written in
//! terms of the correlation matrix `C` and the Schlienz–Mahler matrix `M`.
//!
//! Module map:
//!
//! * [`pauli`] – the Dirac basis `σ_p ⊗ σ_q`, Fano coefficients, Bloch vectors,
//!   `C`, `M`, partial transposition.
//! * [`hamiltonian`] – the traceless time-reversal family, the antiunitary
//!   `T = U∘K` and the Kramers-pair propositions.
//! * [`commutant`] – `[ρ, H] = 0` as a linear system, Gram rank, strata.
//! * [`spectral`] – characteristic coefficients, Girard–Waring, Bezoutian,
//!   the admissible mixing region.
//! * [`extremal`] – closed forms and the generic multistart solver.
//! * [`entanglement`] – PPT coefficients, β, linear entropy, weight-pattern cases.
//!
//! The crate is `no_std` and only needs `alloc`.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod commutant;
pub mod entanglement;
mod error;
pub mod extremal;
pub mod hamiltonian;
pub mod linalg;
pub mod pauli;
#[cfg(feature = "sampling")]
pub mod sampling;
pub mod spectral;

pub use error::{Error, Result};
pub use linalg::{Mat4, C64};
