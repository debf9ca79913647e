use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{Matrix3, Vector3};

use super::{ExtremalStateSet, MixtureWeights, PurityClass};
use crate::hamiltonian::{build_hamiltonian, HamiltonianParams};
use crate::pauli::DensityState;
use crate::{Error, Result};

const SMALL: f64 = 1e-12;

fn product_state(tau_a: Vector3<f64>, tau_b: Vector3<f64>) -> DensityState {
    DensityState::from_blocks(tau_a, tau_b, tau_a * tau_b.transpose())
}

/// The four pure extremal states of the time-reversal-broken family
/// (`s = −σ`), ordered `ρ₁₊, ρ₂₊, ρ₁₋, ρ₂₋` before sorting by mean value.
///
/// Every state is a product state (`C = τ^A τ^Bᵀ`, `M = 0`):
///
/// * `ρ₁±`: `τ^A = ±(γ, −(R+σ), β)/E₊`, `τ^B = −(δ, ε, 0)/R`, `⟨H⟩ = ±E₊`;
/// * `ρ₂±`: `τ^A = ±(γ, R−σ, β)/E₋`, `τ^B = (δ, ε, 0)/R`, `⟨H⟩ = ±E₋`,
///
/// with `R = √(δ² + ε²)`.
pub fn closed_form_nondegenerate(params: &HamiltonianParams) -> Result<ExtremalStateSet> {
    let h = build_hamiltonian(params)?;
    if !params.is_broken() {
        return Err(Error::DegenerateParameters("requires s = -sigma"));
    }
    let HamiltonianParams { beta, gamma, delta, epsilon, sigma, .. } = *params;
    let r = libm::sqrt(delta * delta + epsilon * epsilon);
    let (ep, em) = params.broken_energies();
    if gamma.abs() <= SMALL {
        return Err(Error::DegenerateParameters("gamma = 0"));
    }
    if r <= SMALL {
        return Err(Error::DegenerateParameters("delta = epsilon = 0"));
    }
    if em <= SMALL {
        return Err(Error::DegenerateParameters("E- = 0"));
    }
    let tb = Vector3::new(delta, epsilon, 0.0) / r;
    let a1 = Vector3::new(gamma, -(r + sigma), beta) / ep;
    let a2 = Vector3::new(gamma, r - sigma, beta) / em;
    let states = vec![
        product_state(a1, -tb),
        product_state(a2, tb),
        product_state(-a1, -tb),
        product_state(-a2, tb),
    ];
    Ok(ExtremalStateSet::assemble(&h, states, PurityClass::Pure, Vec::new(), &[0.0, 0.0, 0.0]))
}

struct KramersScalars {
    beta: f64,
    gamma: f64,
    delta: f64,
    epsilon: f64,
    sigma: f64,
    /// `Δ = √(β² + γ²)`.
    cap_delta: f64,
    /// `Q = √(Δ² + ω²)`.
    q: f64,
    e: f64,
}

fn kramers_scalars(params: &HamiltonianParams) -> Result<KramersScalars> {
    params.validate()?;
    if !params.is_kramers() {
        return Err(Error::DegenerateParameters("requires s = sigma"));
    }
    let cap_delta = libm::sqrt(params.delta_cap_sq());
    if cap_delta <= SMALL {
        return Err(Error::DegenerateParameters("Delta = 0"));
    }
    Ok(KramersScalars {
        beta: params.beta,
        gamma: params.gamma,
        delta: params.delta,
        epsilon: params.epsilon,
        sigma: params.sigma,
        cap_delta,
        q: libm::sqrt(params.delta_cap_sq() + params.omega_sq()),
        e: params.kramers_energy(),
    })
}

/// Fano blocks of the Kramers-family mixture with `x, y, z` built from the
/// weights; `x = y = z = ±1` gives the four pure states.
fn kramers_blocks(k: &KramersScalars, x: f64, y: f64, z: f64) -> (Vector3<f64>, Vector3<f64>, Matrix3<f64>) {
    let KramersScalars { beta: b, gamma: g, delta: d, epsilon: eps, sigma: s, cap_delta: dl, q, e } = *k;
    let tau_a = Vector3::new(x * g / e, -d * z * dl / (e * q), x * b / e);
    let tau_b = Vector3::new(-y * dl / q, 0.0, 0.0);
    let q2 = q * q;
    let dq = dl * q;
    #[rustfmt::skip]
    let corr = Matrix3::new(
        -z * g * q2,  z * g * d * eps + y * b * e * s,  z * g * d * s - y * b * e * eps,
        x * d * dq,   x * eps * dq,                     x * s * dq,
        -z * b * q2,  z * b * d * eps - y * g * e * s,  z * b * d * s + y * g * e * eps,
    ) / (e * dl * q);
    (tau_a, tau_b, corr)
}

/// The four pure extremal states of the Kramers family (`s = σ`) in the gauge
/// `r₀₂ = r₀₃ = 0`, ordered `ρ₁₊, ρ₂₊, ρ₁₋, ρ₂₋` before sorting; `⟨H⟩ = ±E`
/// with `E = (det H)^{1/4}`.
pub fn closed_form_kramers_pure(params: &HamiltonianParams) -> Result<ExtremalStateSet> {
    let k = kramers_scalars(params)?;
    let h = build_hamiltonian(params)?;
    let states = [
        (1.0, 1.0, 1.0),
        (1.0, -1.0, -1.0),
        (-1.0, 1.0, -1.0),
        (-1.0, -1.0, 1.0),
    ]
    .iter()
    .map(|&(x, y, z)| {
        let (a, b, c) = kramers_blocks(&k, x, y, z);
        DensityState::from_blocks(a, b, c)
    })
    .collect();
    let notes = vec![String::from(
        "Kramers-degenerate levels: each pure extremal state is one member of a 2-parameter family (free r02, r03); shown with r02 = r03 = 0",
    )];
    Ok(ExtremalStateSet::assemble(&h, states, PurityClass::Pure, notes, &[0.0, 0.0, 0.0]))
}

/// The Kramers-family mixture `P₁ρ₁₊ + P₂ρ₂₊ + P₃ρ₁₋ + P₄ρ₂₋` assembled
/// directly from `x, y, z`.
pub fn closed_form_degenerate(params: &HamiltonianParams, weights: &MixtureWeights) -> Result<DensityState> {
    let k = kramers_scalars(params)?;
    let (a, b, c) = kramers_blocks(&k, weights.x(), weights.y(), weights.z());
    Ok(DensityState::from_blocks(a, b, c))
}
