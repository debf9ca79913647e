//! Multistart Gauss–Newton on the commutant.
//!
//! A state commuting with H is `ρ(x) = I/4 + ¼ Σ (N x)_{pq} D_{pq}` where the
//! columns of `N` span the traceless commutant. Optional linear constraints
//! (gauge coefficients set to zero, orthogonality to states already found)
//! are eliminated up front, `x = x_p + Z y`. The residual in `y` stacks the
//! Fano coefficients of `q(ρ) = Π_v (ρ − v)` over the distinct target
//! eigenvalues `v` with `a_k(ρ) − c_k`; its zeros are exactly the commuting
//! states with the target spectrum.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector, SVD};

use super::{expected_components, EnergyLevels, ExtremalStateSet, PurityClass};
use crate::commutant::{commutant_basis, nullspace, require_hermitian, COEFFICIENTS};
use crate::hamiltonian::{build_time_reversal, time_reversal_commutes};
use crate::linalg::{c, eigvalsh, max_abs, projector, trace_product_re, Mat4};
use crate::pauli::{DensityState, FanoOperator};
use crate::spectral::MixingTarget;
use crate::{Error, Result};

/// Which coefficients are pinned to zero on the pure path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Gauge {
    /// `r₀₂ = r₀₃ = 0` when H is time-reversal invariant with two doubly
    /// degenerate levels, nothing otherwise.
    Auto,
    None,
    Coefficients(Vec<(usize, usize)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    /// Quasi-random starting points per search.
    pub seeds: usize,
    pub max_iterations: usize,
    /// Accepted `max |residual|`.
    pub tolerance: f64,
    /// Offset into the Halton sequence.
    pub seed_offset: u64,
    pub gauge: Gauge,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { seeds: 1000, max_iterations: 100, tolerance: 1e-10, seed_offset: 0, gauge: Gauge::Auto }
    }
}

const PRIMES: [u64; 15] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47];

fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let mut result = 0.0;
    let mut f = 1.0 / base as f64;
    while index > 0 {
        result += f * (index % base) as f64;
        index /= base;
        f /= base as f64;
    }
    result
}

/// Point `index` of the Halton sequence mapped to `[−1, 1]^dim`.
fn halton_point(index: u64, dim: usize) -> DVector<f64> {
    DVector::from_fn(dim, |j, _| 2.0 * radical_inverse(index + 1, PRIMES[j % PRIMES.len()]) - 1.0)
}

fn fano_vector(m: &Mat4) -> [f64; 16] {
    let f = FanoOperator::decompose_unchecked(m);
    let mut out = [0.0; 16];
    for p in 0..4 {
        for q in 0..4 {
            out[4 * p + q] = f.get(p, q);
        }
    }
    out
}

fn compose_traceless(r: &DVector<f64>, r00: f64) -> Mat4 {
    let mut f = FanoOperator::zero();
    f.set(0, 0, r00);
    for (row, &(p, q)) in COEFFICIENTS.iter().enumerate() {
        f.set(p, q, r[row]);
    }
    f.compose()
}

/// A linear constraint `Σ w_pq r_pq = rhs` on the traceless coefficients.
struct Constraint {
    weights: DVector<f64>,
    rhs: f64,
}

/// The reduced problem in the free coordinates `y`.
struct Problem {
    /// `ρ` at `y = 0`.
    base: Mat4,
    /// `∂ρ/∂y_j`.
    directions: Vec<Mat4>,
    /// Distinct target eigenvalues.
    roots: Vec<f64>,
    /// `(c_2, c_3, c_4)`.
    target: [f64; 3],
}

const RESIDUAL_LEN: usize = 19;

impl Problem {
    fn new(n_basis: &DMatrix<f64>, constraints: &[Constraint], roots: Vec<f64>, target: [f64; 3]) -> Option<Self> {
        let n = n_basis.ncols();
        let (xp, z) = if constraints.is_empty() {
            (DVector::zeros(n), DMatrix::identity(n, n))
        } else {
            let a = DMatrix::from_fn(constraints.len(), n, |i, j| {
                (0..15).map(|r| constraints[i].weights[r] * n_basis[(r, j)]).sum()
            });
            let b = DVector::from_fn(constraints.len(), |i, _| constraints[i].rhs);
            let svd = SVD::new(a.clone(), true, true);
            let xp = svd.solve(&b, 1e-10).ok()?;
            if (&a * &xp - &b).amax() > 1e-9 {
                return None;
            }
            (xp, nullspace(&a, 1e-10))
        };
        let base = compose_traceless(&(n_basis * &xp), 1.0);
        let nz = n_basis * &z;
        let directions = (0..nz.ncols()).map(|j| compose_traceless(&nz.column(j).into_owned(), 0.0)).collect();
        Some(Self { base, directions, roots, target })
    }

    fn dim(&self) -> usize {
        self.directions.len()
    }

    fn state(&self, y: &DVector<f64>) -> Mat4 {
        let mut rho = self.base;
        for (d, &v) in self.directions.iter().zip(y.iter()) {
            rho += d * c(v, 0.0);
        }
        rho
    }

    fn factors(&self, rho: &Mat4) -> Vec<Mat4> {
        self.roots.iter().map(|&v| rho - Mat4::identity() * c(v, 0.0)).collect()
    }

    fn residual(&self, rho: &Mat4) -> DVector<f64> {
        let q = self.factors(rho).iter().fold(Mat4::identity(), |acc, f| acc * f);
        let a = crate::spectral::char_poly_coeffs(rho);
        let fq = fano_vector(&q);
        DVector::from_fn(RESIDUAL_LEN, |i, _| if i < 16 { fq[i] } else { a[i - 14] - self.target[i - 16] })
    }

    fn jacobian(&self, rho: &Mat4) -> DMatrix<f64> {
        let factors = self.factors(rho);
        let len = factors.len();
        let mut prefix = vec![Mat4::identity(); len + 1];
        for i in 0..len {
            prefix[i + 1] = prefix[i] * factors[i];
        }
        let mut suffix = vec![Mat4::identity(); len + 1];
        for i in (0..len).rev() {
            suffix[i] = factors[i] * suffix[i + 1];
        }
        let mut powers = [Mat4::identity(); 4];
        for j in 1..4 {
            powers[j] = powers[j - 1] * rho;
        }
        let mut t = [0.0; 5];
        for j in 1..=4 {
            t[j] = if j < 4 { powers[j].trace().re } else { trace_product_re(&powers[3], rho) };
        }
        let mut a = [1.0, 0.0, 0.0, 0.0, 0.0];
        for k in 1..=4 {
            let mut acc = 0.0;
            for i in 1..=k {
                acc += if i % 2 == 1 { 1.0 } else { -1.0 } * a[k - i] * t[i];
            }
            a[k] = acc / k as f64;
        }

        let mut jac = DMatrix::zeros(RESIDUAL_LEN, self.dim());
        for (col, b) in self.directions.iter().enumerate() {
            let mut dq = Mat4::zeros();
            for i in 0..len {
                dq += prefix[i] * b * suffix[i + 1];
            }
            let fq = fano_vector(&dq);
            for (row, v) in fq.iter().enumerate() {
                jac[(row, col)] = *v;
            }
            let mut dt = [0.0; 5];
            for j in 1..=4 {
                dt[j] = j as f64 * trace_product_re(&powers[j - 1], b);
            }
            let mut da = [0.0; 5];
            for k in 1..=4 {
                let mut acc = 0.0;
                for i in 1..=k {
                    let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
                    acc += sign * (da[k - i] * t[i] + a[k - i] * dt[i]);
                }
                da[k] = acc / k as f64;
            }
            for k in 2..=4 {
                jac[(14 + k, col)] = da[k];
            }
        }
        jac
    }

    /// Gauss–Newton with minimum-norm steps and backtracking. Returns the
    /// final coordinates and `max |residual|`.
    fn solve(&self, mut y: DVector<f64>, max_iterations: usize) -> (DVector<f64>, f64) {
        let mut rho = self.state(&y);
        let mut f = self.residual(&rho);
        let mut norm = f.norm();
        for _ in 0..max_iterations {
            if f.amax() <= 1e-14 || self.dim() == 0 {
                break;
            }
            let jac = self.jacobian(&rho);
            let svd = SVD::new(jac, true, true);
            let smax = svd.singular_values.iter().fold(0.0f64, |a, &b| a.max(b));
            let Ok(step) = svd.solve(&f, 1e-12 * smax.max(f64::MIN_POSITIVE)) else { break };
            let mut alpha = 1.0;
            let mut improved = false;
            for _ in 0..30 {
                let trial = &y - &step * alpha;
                let trial_rho = self.state(&trial);
                let trial_f = self.residual(&trial_rho);
                let trial_norm = trial_f.norm();
                if trial_norm < norm {
                    y = trial;
                    rho = trial_rho;
                    f = trial_f;
                    norm = trial_norm;
                    improved = true;
                    break;
                }
                alpha *= 0.5;
            }
            if !improved {
                break;
            }
        }
        (y, f.amax())
    }
}

fn distinct_values(spectrum: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for &v in spectrum {
        if !out.iter().any(|&u| (u - v).abs() <= 1e-9) {
            out.push(v);
        }
    }
    out
}

fn is_kramers_like(h: &Mat4) -> bool {
    time_reversal_commutes(h, &build_time_reversal()).commutes && EnergyLevels::of(h).sizes() == vec![2, 2]
}

fn levels_are_degenerate(h: &Mat4) -> bool {
    EnergyLevels::of(h).sizes().len() < 4
}

fn eigenbasis_projectors(h: &Mat4) -> Vec<Mat4> {
    EnergyLevels::of(h).bases.iter().flatten().map(projector).collect()
}

fn gauge_coefficients(h: &Mat4, gauge: &Gauge) -> Vec<(usize, usize)> {
    match gauge {
        Gauge::Auto if is_kramers_like(h) => vec![(0, 2), (0, 3)],
        Gauge::Auto | Gauge::None => Vec::new(),
        Gauge::Coefficients(list) => list.clone(),
    }
}

fn gauge_constraints(labels: &[(usize, usize)]) -> Vec<Constraint> {
    labels
        .iter()
        .filter_map(|&(p, q)| crate::commutant::coefficient_index(p, q))
        .map(|row| {
            let mut weights = DVector::zeros(15);
            weights[row] = 1.0;
            Constraint { weights, rhs: 0.0 }
        })
        .collect()
}

/// `Tr(ρ ρ_i) = 0` ⇔ `Σ r_pq r^i_pq = −1`.
fn orthogonality(found: &Mat4) -> Constraint {
    let f = FanoOperator::decompose_unchecked(found);
    let weights = DVector::from_fn(15, |row, _| {
        let (p, q) = COEFFICIENTS[row];
        f.get(p, q)
    });
    Constraint { weights, rhs: -1.0 }
}

fn min_eigenvalue(rho: &Mat4) -> f64 {
    eigvalsh(rho)[0]
}

/// The complete set of four orthogonal rank-one projectors commuting with H,
/// with their mean values.
pub fn solve_pure_extremal(h: &Mat4) -> Result<ExtremalStateSet> {
    solve_pure_extremal_with(h, &SolverOptions::default())
}

pub fn solve_pure_extremal_with(h: &Mat4, options: &SolverOptions) -> Result<ExtremalStateSet> {
    require_hermitian(h)?;
    let f = FanoOperator::decompose_unchecked(h);
    let n_basis = commutant_basis(&f);
    let labels = gauge_coefficients(h, &options.gauge);
    let mut notes = Vec::new();

    let attempt = |labels: &[(usize, usize)]| -> Result<Vec<Mat4>> {
        let mut found: Vec<Mat4> = Vec::with_capacity(4);
        let mut counter = options.seed_offset;
        let mut best = f64::INFINITY;
        while found.len() < 3 {
            let mut constraints = gauge_constraints(labels);
            constraints.extend(found.iter().map(orthogonality));
            let problem = Problem::new(&n_basis, &constraints, vec![0.0, 1.0], [0.0; 3]).ok_or(
                Error::SolverIncomplete { found: found.len(), expected: 4, residual: f64::INFINITY },
            )?;
            let mut hit = None;
            for _ in 0..options.seeds {
                let y0 = halton_point(counter, problem.dim());
                counter += 1;
                let (y, res) = problem.solve(y0, options.max_iterations);
                best = best.min(res);
                if res <= options.tolerance {
                    let rho = problem.state(&y);
                    if min_eigenvalue(&rho) >= -1e-10 && found.iter().all(|s| trace_product_re(s, &rho).abs() <= 1e-9) {
                        hit = Some(rho);
                        break;
                    }
                }
                if problem.dim() == 0 {
                    break;
                }
            }
            match hit {
                Some(rho) => found.push(rho),
                None => return Err(Error::SolverIncomplete { found: found.len(), expected: 4, residual: best }),
            }
        }
        let last = Mat4::identity() - found.iter().fold(Mat4::zeros(), |acc, s| acc + s);
        let idempotency = max_abs(&(last * last - last));
        if idempotency > 1e-9 || min_eigenvalue(&last) < -1e-10 {
            return Err(Error::SolverIncomplete { found: 3, expected: 4, residual: idempotency });
        }
        found.push(last);
        Ok(found)
    };

    let projectors = match attempt(&labels) {
        Ok(p) => {
            if labels == [(0, 2), (0, 3)] {
                notes.push(String::from(
                    "Kramers-degenerate levels: each pure extremal state is one member of a 2-parameter family (free r02, r03); shown with r02 = r03 = 0",
                ));
            }
            p
        }
        Err(_) if !labels.is_empty() => {
            notes.push(String::from("gauge constraints infeasible for this H; solved without gauge"));
            attempt(&[])?
        }
        Err(_) if levels_are_degenerate(h) => {
            notes.push(String::from(
                "degenerate levels: pure extremal states form continuous families; representatives taken from an eigenbasis of H",
            ));
            eigenbasis_projectors(h)
        }
        Err(e) => return Err(e),
    };

    let states = projectors
        .iter()
        .map(DensityState::from_matrix)
        .collect::<Result<Vec<_>>>()?;
    Ok(ExtremalStateSet::assemble(h, states, PurityClass::Pure, notes, &[0.0, 0.0, 0.0]))
}

/// `Tr(ρ^a Ĥ^b)` for `a = 1..4`, `b = 0..3` with `Ĥ = H / max|λ|`; constant
/// on each connected solution component.
fn moment_signature(rho: &Mat4, h_hat: &Mat4) -> [f64; 16] {
    let mut out = [0.0; 16];
    let mut rp = *rho;
    for a in 0..4 {
        let mut hp = Mat4::identity();
        for b in 0..4 {
            out[4 * a + b] = trace_product_re(&rp, &hp);
            hp *= h_hat;
        }
        rp *= rho;
    }
    out
}

/// One representative state per solution component of
/// `{[ρ, H] = 0, a_k(ρ) = c_k}`. A pure target delegates to
/// [`solve_pure_extremal`].
pub fn solve_mixed_extremal(h: &Mat4, target: &MixingTarget) -> Result<ExtremalStateSet> {
    solve_mixed_extremal_with(h, target, &SolverOptions::default())
}

pub fn solve_mixed_extremal_with(h: &Mat4, target: &MixingTarget, options: &SolverOptions) -> Result<ExtremalStateSet> {
    require_hermitian(h)?;
    if target.d != 4 {
        return Err(Error::Dimension { expected: 4, found: target.d });
    }
    let spectrum = target.require_admissible()?.to_vec();
    if target.is_pure() {
        return solve_pure_extremal_with(h, options);
    }
    let c3 = [target.c[0], target.c[1], target.c[2]];
    let levels = EnergyLevels::of(h);
    let expected = expected_components(&levels.sizes(), &spectrum);

    let n_basis = commutant_basis(&FanoOperator::decompose_unchecked(h));
    let problem = Problem::new(&n_basis, &[], distinct_values(&spectrum), c3).expect("unconstrained problem");
    let scale = levels.energies.iter().fold(0.0f64, |a, e| a.max(e.abs()));
    let h_hat = if scale > 0.0 { h / c(scale, 0.0) } else { *h };

    let mut found: Vec<(FanoOperator, [f64; 16])> = Vec::new();
    let mut best = f64::INFINITY;
    for i in 0..options.seeds {
        if found.len() == expected {
            break;
        }
        let y0 = halton_point(options.seed_offset + i as u64, problem.dim());
        let (y, res) = problem.solve(y0, options.max_iterations);
        best = best.min(res);
        if res > options.tolerance {
            continue;
        }
        let rho = problem.state(&y);
        if min_eigenvalue(&rho) < -1e-10 {
            continue;
        }
        let fano = FanoOperator::decompose_unchecked(&rho);
        let sig = moment_signature(&rho, &h_hat);
        let duplicate = found.iter().any(|(f, s)| {
            f.distance(&fano) < 1e-7 || s.iter().zip(&sig).all(|(a, b)| (a - b).abs() <= 1e-7)
        });
        if !duplicate {
            found.push((fano, sig));
        }
    }
    if found.len() < expected {
        return Err(Error::SolverIncomplete { found: found.len(), expected, residual: best });
    }
    let states = found
        .iter()
        .map(|(f, _)| DensityState::from_fano(*f))
        .collect::<Result<Vec<_>>>()?;
    Ok(ExtremalStateSet::assemble(h, states, PurityClass::Mixed, Vec::new(), &target.c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extremal::assignment_oracle;
    use crate::hamiltonian::{build_hamiltonian, HamiltonianParams};
    use crate::linalg::real_matrix;

    fn assert_close_lists(got: &[f64], want: &[f64], tol: f64) {
        assert_eq!(got.len(), want.len(), "{got:?} vs {want:?}");
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() <= tol, "{got:?} vs {want:?}");
        }
    }

    #[test]
    fn halton_is_deterministic_and_bounded() {
        let p = halton_point(0, 3);
        assert_eq!(p, halton_point(0, 3));
        assert!(p.iter().all(|v| (-1.0..=1.0).contains(v)));
        assert_eq!(radical_inverse(1, 2), 0.5);
        assert_eq!(radical_inverse(3, 2), 0.75);
    }

    #[test]
    fn diagonal_pure() {
        let h = real_matrix([[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0], [0.0, 0.0, -1.0, 0.0], [0.0, 0.0, 0.0, -1.0]]);
        let set = solve_pure_extremal(&h).unwrap();
        assert_close_lists(&set.mean_values, &[-1.0, -1.0, 1.0, 1.0], 1e-10);
    }

    #[test]
    fn broken_pure_matches_closed_form() {
        let p = HamiltonianParams::broken(1.0, 1.0, 1.0, 1.0, 1.0);
        let h = build_hamiltonian(&p).unwrap();
        let numeric = solve_pure_extremal(&h).unwrap();
        let closed = crate::extremal::closed_form_nondegenerate(&p).unwrap();
        assert_close_lists(&numeric.mean_values, &closed.mean_values, 1e-10);
        for (a, b) in numeric.states.iter().zip(&closed.states) {
            assert!(a.fano().distance(b.fano()) < 1e-10);
        }
        let sum = numeric.states.iter().fold(Mat4::zeros(), |acc, s| acc + s.matrix());
        assert!(max_abs(&(sum - Mat4::identity())) < 1e-10);
    }

    #[test]
    fn kramers_pure_uses_gauge() {
        let p = HamiltonianParams::kramers(1.0, 1.0, 1.0, 1.0, 1.0);
        let h = build_hamiltonian(&p).unwrap();
        let set = solve_pure_extremal(&h).unwrap();
        let e = libm::sqrt(5.0);
        assert_close_lists(&set.mean_values, &[-e, -e, e, e], 1e-10);
        assert_eq!(set.notes.len(), 1);
        for s in &set.states {
            assert!(s.fano().get(0, 2).abs() < 1e-10 && s.fano().get(0, 3).abs() < 1e-10);
        }
    }

    #[test]
    fn mixed_broken_six_branches() {
        let p = HamiltonianParams::broken(1.0, 1.0, 1.0, 1.0, 1.0);
        let h = build_hamiltonian(&p).unwrap();
        let target = MixingTarget::new(vec![59.0 / 200.0, 9.0 / 400.0, 81.0 / 160000.0]);
        let set = solve_mixed_extremal(&h, &target).unwrap();
        assert_close_lists(&set.mean_values, &assignment_oracle(&h, &[0.45, 0.45, 0.05, 0.05]), 1e-8);
        assert!(set.max_residual < 1e-9);
    }

    #[test]
    fn mixed_kramers_components() {
        let p = HamiltonianParams::kramers(0.7, 1.3, 0.2, -0.5, 0.9);
        let h = build_hamiltonian(&p).unwrap();
        let target = MixingTarget::new(vec![59.0 / 200.0, 9.0 / 400.0, 81.0 / 160000.0]);
        let set = solve_mixed_extremal(&h, &target).unwrap();
        assert_eq!(set.len(), 3);
        assert_close_lists(&set.mean_values, &assignment_oracle(&h, &[0.45, 0.45, 0.05, 0.05]), 1e-8);
    }

    #[test]
    fn maximally_mixed_target() {
        let h = build_hamiltonian(&HamiltonianParams::broken(0.3, 0.4, 0.5, 0.6, 0.7)).unwrap();
        let set = solve_mixed_extremal(&h, &MixingTarget::new(vec![3.0 / 8.0, 1.0 / 16.0, 1.0 / 256.0])).unwrap();
        assert_eq!(set.len(), 1);
        assert!(set.mean_values[0].abs() < 1e-10);
        assert!(set.states[0].fano().distance(DensityState::maximally_mixed().fano()) < 1e-9);
    }

    #[test]
    fn inadmissible_target_rejected() {
        let h = build_hamiltonian(&HamiltonianParams::broken(0.3, 0.4, 0.5, 0.6, 0.7)).unwrap();
        let err = solve_mixed_extremal(&h, &MixingTarget::new(vec![0.5, 0.0, 0.0])).unwrap_err();
        assert!(matches!(err, Error::InadmissibleTarget { .. }));
    }

    #[test]
    fn pure_target_delegates() {
        let h = build_hamiltonian(&HamiltonianParams::broken(0.3, 0.4, 0.5, 0.6, 0.7)).unwrap();
        let set = solve_mixed_extremal(&h, &MixingTarget::pure(4)).unwrap();
        assert_eq!(set.purity, PurityClass::Pure);
        assert_eq!(set.len(), 4);
    }

    #[test]
    fn identity_falls_back_to_eigenbasis() {
        let set = solve_pure_extremal(&Mat4::identity()).unwrap();
        assert_eq!(set.len(), 4);
        assert!(set.mean_values.iter().all(|m| (m - 1.0).abs() < 1e-12));
        assert!(set.max_residual < 1e-12);
        assert!(set.notes.iter().any(|n| n.contains("continuous families")));
    }
}
