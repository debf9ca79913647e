//! Characteristic-polynomial coefficients of a density matrix and the region
//! of admissible mixing targets.
//!
//! Conventions: for a `d×d` state with spectrum `λ`, the characteristic
//! polynomial is `P_d(x) = Σ_k (−1)^k a_k x^{d−k}` with `a_k = e_k(λ)`, so
//! `a_0 = a_1 = 1` and `a_d = det ρ`. A *mixing target* fixes `c_k = a_k` for
//! `k = 2, …, d`. Power sums are `t_j = Tr ρ^j` with `t_0 = d`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::linalg::{binomial, factorial, Mat4, C64};
use crate::{Error, Result};

/// Tolerance on the box bounds `0 ≤ c_k ≤ binom(d,k)/d^k`.
pub const BOUND_TOLERANCE: f64 = 1e-12;
/// Relative rounding allowance: `e_k(B) ≥ −POSITIVITY_TOLERANCE · d · Σ|μ| · e_{k−1}(|μ|)`,
/// with `μ` the eigenvalues of B, accepts a Bezoutian as positive semidefinite.
pub const POSITIVITY_TOLERANCE: f64 = 1e-14;
/// `|det B| ≤ SURFACE_BAND · Π B_ii` puts a point on a degeneracy surface.
pub const SURFACE_BAND: f64 = 1e-10;
/// Relative threshold for the numerical rank of a Bezoutian.
pub const BEZOUTIAN_RANK_THRESHOLD: f64 = 1e-9;
/// Slack on the reconstructed spectrum lying in `[0, 1]` and summing to one;
/// nearly coincident roots are recovered only to about `√ε`.
pub const RECONSTRUCTION_TOLERANCE: f64 = 1e-6;

/// Integer partitions of `n` as descending part lists, coarsest first:
/// `4 → [4], [3,1], [2,2], [2,1,1], [1,1,1,1]`.
pub fn integer_partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(remaining: usize, max_part: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if remaining == 0 {
            out.push(prefix.clone());
            return;
        }
        for part in (1..=remaining.min(max_part)).rev() {
            prefix.push(part);
            go(remaining - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        go(n, n, &mut Vec::new(), &mut out);
    }
    out
}

/// Non-negative integer solutions of `1·q_1 + 2·q_2 + … + k·q_k = k`, each
/// returned as `[q_1, …, q_k]`. Their number is the partition function `p(k)`.
pub fn diophantine_partitions(k: usize) -> Vec<Vec<usize>> {
    integer_partitions(k)
        .into_iter()
        .map(|parts| {
            let mut q = vec![0usize; k];
            for p in parts {
                q[p - 1] += 1;
            }
            q
        })
        .collect()
}

fn check_available(available: usize, needed: usize) -> Result<()> {
    if available < needed {
        Err(Error::MissingTerms { needed, available })
    } else {
        Ok(())
    }
}

/// `a_k` from `t_1, …, t_k` (`t[0] = t_1`) by the Girard–Waring partition sum
/// `a_k = Σ_q Π_j (−1)^{(j−1) q_j} t_j^{q_j} / (j^{q_j} q_j!)`.
pub fn girard_waring(t: &[f64], k: usize) -> Result<f64> {
    check_available(t.len(), k)?;
    if k == 0 {
        return Ok(1.0);
    }
    let mut total = 0.0;
    for q in diophantine_partitions(k) {
        let mut term = 1.0;
        for (idx, &qj) in q.iter().enumerate() {
            if qj == 0 {
                continue;
            }
            let j = idx + 1;
            let sign = if (j - 1) * qj % 2 == 0 { 1.0 } else { -1.0 };
            term *= sign * libm::pow(t[idx], qj as f64) / (libm::pow(j as f64, qj as f64) * factorial(qj));
        }
        total += term;
    }
    Ok(total)
}

/// `t_k` from `a_1, …, a_k` (`a[0] = a_1`) by the inverse partition sum
/// `t_k = Σ_q (−1)^{k+|q|} k (|q|−1)! / Π q_j! · Π a_j^{q_j}`, `|q| = Σ q_j`.
pub fn girard_waring_inverse(a: &[f64], k: usize) -> Result<f64> {
    check_available(a.len(), k)?;
    if k == 0 {
        return Err(Error::MissingTerms { needed: 1, available: 0 });
    }
    let mut total = 0.0;
    for q in diophantine_partitions(k) {
        let m: usize = q.iter().sum();
        let sign = if (k + m) % 2 == 0 { 1.0 } else { -1.0 };
        let mut term = sign * k as f64 * factorial(m - 1);
        for (idx, &qj) in q.iter().enumerate() {
            if qj > 0 {
                term *= libm::pow(a[idx], qj as f64) / factorial(qj);
            }
        }
        total += term;
    }
    Ok(total)
}

/// Which way a Plemelj–Smithies determinant converts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Power sums to the coefficient `a_k`.
    CoefficientFromPowerSums,
    /// Coefficients to the power sum `t_k`.
    PowerSumFromCoefficients,
}

/// Hessenberg-determinant forms
/// `a_k = det[[t_1,1,0,…],[t_2,t_1,2,…],…,[t_k,…,t_1]] / k!` and
/// `t_k = det[[a_1,1,0,…],[2a_2,a_1,1,…],…,[k a_k,a_{k−1},…,a_1]]`.
pub fn plemelj_smithies(values: &[f64], k: usize, direction: Direction) -> Result<f64> {
    check_available(values.len(), k)?;
    if k == 0 {
        return Ok(1.0);
    }
    let m = DMatrix::from_fn(k, k, |i, j| {
        if j == i + 1 {
            match direction {
                Direction::CoefficientFromPowerSums => (i + 1) as f64,
                Direction::PowerSumFromCoefficients => 1.0,
            }
        } else if j <= i {
            let v = values[i - j];
            if j == 0 && direction == Direction::PowerSumFromCoefficients {
                (i + 1) as f64 * v
            } else {
                v
            }
        } else {
            0.0
        }
    });
    let det = m.determinant();
    Ok(match direction {
        Direction::CoefficientFromPowerSums => det / factorial(k),
        Direction::PowerSumFromCoefficients => det,
    })
}

/// `a_0, …, a_m` from power sums by Newton's identities (`t[0] = t_1`).
pub fn coefficients_from_power_sums(t: &[f64], m: usize) -> Result<Vec<f64>> {
    check_available(t.len(), m)?;
    let mut a = vec![0.0; m + 1];
    a[0] = 1.0;
    for k in 1..=m {
        let mut acc = 0.0;
        for i in 1..=k {
            let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
            acc += sign * a[k - i] * t[i - 1];
        }
        a[k] = acc / k as f64;
    }
    Ok(a)
}

/// `t_1, …, t_m` from `a_0, …, a_d` by Newton's identities, with `a_k = 0`
/// for `k > d`.
pub fn power_sums_from_coefficients(a: &[f64], m: usize) -> Vec<f64> {
    let get = |k: usize| a.get(k).copied().unwrap_or(0.0);
    let mut t = Vec::with_capacity(m);
    for k in 1..=m {
        let mut acc = if k % 2 == 1 { 1.0 } else { -1.0 } * k as f64 * get(k);
        for i in 1..k {
            let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
            acc += sign * get(i) * t[k - i - 1];
        }
        t.push(acc);
    }
    t
}

/// Power sums `t_j = Tr ρ^j` for `j = 1, …, m`, with the dimension so that
/// `t_0 = d` is available too.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSums {
    pub d: usize,
    /// `t[0] = t_1`.
    pub t: Vec<f64>,
}

impl PowerSums {
    pub fn of_spectrum(spectrum: &[f64], m: usize) -> Self {
        let t = (1..=m).map(|j| spectrum.iter().map(|&x| libm::pow(x, j as f64)).sum()).collect();
        Self { d: spectrum.len(), t }
    }

    pub fn of_state(rho: &Mat4, m: usize) -> Self {
        let mut t = Vec::with_capacity(m);
        let mut power = *rho;
        for _ in 0..m {
            t.push(power.trace().re);
            power *= rho;
        }
        Self { d: 4, t }
    }

    /// From `a_0, …, a_d` of a `d`-dimensional state.
    pub fn from_coefficients(a: &[f64], m: usize) -> Self {
        Self { d: a.len() - 1, t: power_sums_from_coefficients(a, m) }
    }

    /// `t_j`, with `t_0 = d`.
    pub fn get(&self, j: usize) -> Option<f64> {
        if j == 0 {
            Some(self.d as f64)
        } else {
            self.t.get(j - 1).copied()
        }
    }
}

/// `a_0, …, a_d` from a spectrum (elementary symmetric polynomials).
pub fn char_poly_coeffs_from_spectrum(spectrum: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; spectrum.len() + 1];
    e[0] = 1.0;
    for (n, &x) in spectrum.iter().enumerate() {
        for k in (1..=n + 1).rev() {
            e[k] += x * e[k - 1];
        }
    }
    e
}

/// `a_0, …, a_4` of a 4×4 Hermitian matrix from traces of its powers.
pub fn char_poly_coeffs(m: &Mat4) -> [f64; 5] {
    let t = PowerSums::of_state(m, 4).t;
    let a = coefficients_from_power_sums(&t, 4).expect("four power sums");
    [a[0], a[1], a[2], a[3], a[4]]
}

/// `t_0, …, t_6` of a unit-trace 4×4 state in terms of `(c_2, c_3, c_4)`.
pub fn power_sums_d4(c2: f64, c3: f64, c4: f64) -> [f64; 7] {
    [
        4.0,
        1.0,
        1.0 - 2.0 * c2,
        1.0 - 3.0 * c2 + 3.0 * c3,
        2.0 * c2 * c2 - 4.0 * c2 + 4.0 * c3 - 4.0 * c4 + 1.0,
        5.0 * c2 * c2 - 5.0 * c2 * c3 - 5.0 * c2 + 5.0 * c3 - 5.0 * c4 + 1.0,
        -2.0 * c2 * c2 * c2 + 9.0 * c2 * c2 - 12.0 * c2 * c3 + 6.0 * c2 * c4 - 6.0 * c2 + 3.0 * c3 * c3 + 6.0 * c3
            - 6.0 * c4
            + 1.0,
    ]
}

/// Hankel matrix `B_ij = t_{i+j}` (`i, j = 0, …, d−1`); equals `V Vᵀ` for the
/// Vandermonde matrix of the spectrum.
pub fn bezoutian(t: &PowerSums, d: usize) -> Result<DMatrix<f64>> {
    let needed = 2 * (d.max(1) - 1);
    check_available(t.t.len(), needed)?;
    Ok(DMatrix::from_fn(d, d, |i, j| t.get(i + j).expect("checked length")))
}

/// Numerical rank of a symmetric matrix (threshold `1e-9 · max |λ|`).
pub fn bezoutian_rank(b: &DMatrix<f64>) -> usize {
    let eig = SymmetricEigen::new(b.clone());
    let vals: Vec<f64> = eig.eigenvalues.iter().map(|x| x.abs()).collect();
    crate::linalg::numerical_rank(&vals, BEZOUTIAN_RANK_THRESHOLD)
}

/// `(#positive − #negative)` eigenvalues of a symmetric matrix, ignoring
/// those below the rank threshold.
pub fn signature(b: &DMatrix<f64>) -> i64 {
    let eig = SymmetricEigen::new(b.clone());
    let smax = eig.eigenvalues.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
    eig.eigenvalues
        .iter()
        .map(|&x| {
            if x.abs() <= BEZOUTIAN_RANK_THRESHOLD * smax {
                0
            } else if x > 0.0 {
                1
            } else {
                -1
            }
        })
        .sum()
}

/// Elementary symmetric functions `e_1, …, e_n` of the eigenvalues of the
/// symmetric matrix `b`.
pub fn symmetric_functions_of(b: &DMatrix<f64>) -> Vec<f64> {
    elementary_symmetric(nalgebra::SymmetricEigen::new(b.clone()).eigenvalues.as_slice())
}

/// `e_1, …, e_n` of the given values.
fn elementary_symmetric(values: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; values.len() + 1];
    e[0] = 1.0;
    for (i, &v) in values.iter().enumerate() {
        for k in (1..=i + 1).rev() {
            e[k] += v * e[k - 1];
        }
    }
    e.remove(0);
    e
}

fn horner(poly: &[f64], x: f64) -> f64 {
    poly.iter().rev().fold(0.0, |acc, &a| acc * x + a)
}

fn horner_abs(poly: &[f64], x: f64) -> f64 {
    let ax = x.abs();
    poly.iter().rev().fold(0.0, |acc, &a| acc * ax + a.abs())
}

fn bisect(poly: &[f64], mut lo: f64, mut hi: f64) -> f64 {
    let lo_sign = horner(poly, lo) < 0.0;
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = horner(poly, mid);
        if v == 0.0 {
            return mid;
        }
        if (v < 0.0) == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Distinct real roots of a real polynomial (coefficients in ascending
/// powers) with their multiplicities, ascending.
///
/// The roots of `P'` split the line into intervals on which `P` is monotone;
/// each sign change is refined by bisection. A critical point at which `P`
/// vanishes to rounding accuracy is a multiple root whose multiplicity is one
/// more than its multiplicity in `P'`. Fewer roots than the degree means the
/// rest come in complex-conjugate pairs.
pub fn real_roots(poly: &[f64]) -> Vec<(f64, usize)> {
    let mut p: Vec<f64> = poly.to_vec();
    while p.last() == Some(&0.0) {
        p.pop();
    }
    let deg = p.len().saturating_sub(1);
    if deg == 0 {
        return Vec::new();
    }
    if deg == 1 {
        return vec![(-p[0] / p[1], 1)];
    }
    let lead = p[deg];
    let bound = 1.0 + p[..deg].iter().fold(0.0f64, |a, &x| a.max((x / lead).abs()));
    let dp: Vec<f64> = p.iter().enumerate().skip(1).map(|(i, &a)| i as f64 * a).collect();
    let critical = real_roots(&dp);

    let mut roots = Vec::new();
    let mut nodes: Vec<(f64, bool)> = Vec::with_capacity(critical.len() + 2);
    nodes.push((-bound, false));
    for &(x, m) in &critical {
        let is_root = horner(&p, x).abs() <= 32.0 * f64::EPSILON * horner_abs(&p, x);
        if is_root {
            roots.push((x, m + 1));
        }
        nodes.push((x, is_root));
    }
    nodes.push((bound, false));
    for w in nodes.windows(2) {
        let ((l, l_root), (r, r_root)) = (w[0], w[1]);
        if l_root || r_root || l >= r {
            continue;
        }
        let (fl, fr) = (horner(&p, l), horner(&p, r));
        if fl == 0.0 {
            roots.push((l, 1));
        } else if fl * fr < 0.0 {
            roots.push((bisect(&p, l, r), 1));
        }
    }
    roots.sort_by(|a, b| a.0.total_cmp(&b.0));
    roots
}

/// All complex roots via companion-matrix eigenvalues; an independent check
/// on [`real_roots`] (it splits multiple roots by about `√eps`).
pub fn companion_roots(poly: &[f64]) -> Vec<C64> {
    let mut p: Vec<f64> = poly.to_vec();
    while p.last() == Some(&0.0) {
        p.pop();
    }
    let deg = p.len().saturating_sub(1);
    if deg == 0 {
        return Vec::new();
    }
    let lead = p[deg];
    let m = DMatrix::from_fn(deg, deg, |i, j| {
        if j == deg - 1 {
            -p[i] / lead
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    m.complex_eigenvalues().iter().copied().collect()
}

/// `P_d(x)` in ascending powers for a mixing target `c = (c_2, …, c_d)`.
pub fn characteristic_polynomial(c: &[f64]) -> Vec<f64> {
    let d = c.len() + 1;
    let mut a = vec![1.0, 1.0];
    a.extend_from_slice(c);
    (0..=d).map(|power| {
        let k = d - power;
        if k % 2 == 0 { a[k] } else { -a[k] }
    })
    .collect()
}

/// Roots of `P_d` with multiplicities expanded; `None` when some roots are
/// complex.
pub fn reconstruct_spectrum(c: &[f64]) -> Option<Vec<f64>> {
    let d = c.len() + 1;
    let roots = real_roots(&characteristic_polynomial(c));
    let count: usize = roots.iter().map(|r| r.1).sum();
    if count != d {
        return None;
    }
    let mut out = Vec::with_capacity(d);
    for (x, m) in roots {
        out.extend(core::iter::repeat(x).take(m));
    }
    Some(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegionLabel {
    Interior,
    /// A doubly degenerate eigenvalue.
    TwoFoldSurface,
    /// A (at least) triply degenerate eigenvalue.
    ThreeFoldCurve,
    Outside,
}

impl RegionLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Interior => "interior",
            Self::TwoFoldSurface => "two-fold-surface",
            Self::ThreeFoldCurve => "three-fold-curve",
            Self::Outside => "outside",
        }
    }
}

impl fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MembershipReport {
    pub admissible: bool,
    pub bounds_ok: bool,
    /// `e_1(B), …, e_d(B)`; `e_d = det B`.
    pub bezoutian_invariants: Vec<f64>,
    pub bezoutian_rank: usize,
    pub label: RegionLabel,
    /// Reconstructed spectrum (ascending) when admissible.
    pub spectrum: Option<Vec<f64>>,
    /// Set when the inequalities accept but the roots are not all real in `[0, 1]`.
    pub diagnostic: Option<String>,
}

/// Admissibility of `c = (c_2, …, c_d)`: the box bounds plus positive
/// semidefiniteness of the Bezoutian, tested through the elementary symmetric
/// functions of its eigenvalues. Accepted targets are certified by
/// reconstructing the spectrum.
pub fn region_membership(c: &[f64]) -> MembershipReport {
    let d = c.len() + 1;
    let bounds_ok = c.iter().enumerate().all(|(i, &ck)| {
        let k = i + 2;
        let upper = binomial(d, k) / libm::pow(d as f64, k as f64);
        ck.is_finite() && ck >= -BOUND_TOLERANCE && ck <= upper + BOUND_TOLERANCE
    });
    let mut a = vec![1.0, 1.0];
    a.extend_from_slice(c);
    let t = PowerSums::from_coefficients(&a, 2 * (d - 1));
    let b = bezoutian(&t, d).expect("enough power sums");
    let mu = nalgebra::SymmetricEigen::new(b.clone()).eigenvalues;
    let inv = elementary_symmetric(mu.as_slice());
    let magnitude: Vec<f64> = mu.iter().map(|m| m.abs()).collect();
    let scale = elementary_symmetric(&magnitude);
    let slack = POSITIVITY_TOLERANCE * d as f64 * scale[0];
    let positive = inv
        .iter()
        .enumerate()
        .all(|(i, &e)| e >= -slack * if i == 0 { 1.0 } else { scale[i - 1] });
    let rank = bezoutian_rank(&b);
    let admissible = bounds_ok && positive;

    if !admissible {
        return MembershipReport {
            admissible,
            bounds_ok,
            bezoutian_invariants: inv,
            bezoutian_rank: rank,
            label: RegionLabel::Outside,
            spectrum: None,
            diagnostic: None,
        };
    }

    let spectrum = reconstruct_spectrum(c);
    let mut diagnostic = None;
    match &spectrum {
        None => diagnostic = Some(String::from("inequalities hold but the characteristic polynomial has complex roots")),
        Some(s) => {
            let sum: f64 = s.iter().sum();
            let tol = RECONSTRUCTION_TOLERANCE;
            if s.iter().any(|&x| !(-tol..=1.0 + tol).contains(&x)) || (sum - 1.0).abs() > tol {
                diagnostic = Some(String::from("reconstructed spectrum leaves [0, 1]"));
            }
        }
    }

    let det = inv[d - 1];
    let diag_product: f64 = (0..d).map(|i| b[(i, i)]).product();
    let label = if det.abs() > SURFACE_BAND * diag_product {
        RegionLabel::Interior
    } else {
        let max_mult = spectrum.as_deref().map_or(2, max_cluster);
        if max_mult >= 3 {
            RegionLabel::ThreeFoldCurve
        } else {
            RegionLabel::TwoFoldSurface
        }
    };

    MembershipReport {
        admissible,
        bounds_ok,
        bezoutian_invariants: inv,
        bezoutian_rank: rank,
        label,
        spectrum,
        diagnostic,
    }
}

/// Largest group of sorted values within `1e-6` of their neighbour.
fn max_cluster(sorted: &[f64]) -> usize {
    let mut best = 1;
    let mut run = 1;
    for w in sorted.windows(2) {
        if (w[1] - w[0]).abs() <= 1e-6 {
            run += 1;
            best = best.max(run);
        } else {
            run = 1;
        }
    }
    best
}

/// A prescribed degree of mixing `(c_2, …, c_d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixingTarget {
    pub d: usize,
    pub c: Vec<f64>,
    pub admissible: bool,
    pub spectrum: Option<Vec<f64>>,
}

impl MixingTarget {
    pub fn new(c: Vec<f64>) -> Self {
        let report = region_membership(&c);
        let spectrum = if report.diagnostic.is_none() { report.spectrum } else { None };
        Self { d: c.len() + 1, admissible: report.admissible && spectrum.is_some(), spectrum, c }
    }

    /// The pure-state target `c = 0`.
    pub fn pure(d: usize) -> Self {
        Self::new(vec![0.0; d - 1])
    }

    pub fn from_spectrum(spectrum: &[f64]) -> Result<Self> {
        let total: f64 = spectrum.iter().sum();
        if (total - 1.0).abs() > 1e-9 || spectrum.iter().any(|&x| x < -1e-12) {
            return Err(Error::InvalidWeights);
        }
        let a = char_poly_coeffs_from_spectrum(spectrum);
        Ok(Self::new(a[2..].to_vec()))
    }

    pub fn is_pure(&self) -> bool {
        self.c.iter().all(|&x| x.abs() <= BOUND_TOLERANCE)
    }

    pub fn require_admissible(&self) -> Result<&[f64]> {
        match (&self.spectrum, self.admissible) {
            (Some(s), true) => Ok(s),
            _ => Err(Error::InadmissibleTarget {
                reason: alloc::format!("(c_2, …, c_d) = {:?} is outside the admissible region", self.c),
            }),
        }
    }
}

/// Axis-aligned grid over `(c_2, c_3, c_4)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub resolution: [usize; 3],
    pub lower: [f64; 3],
    pub upper: [f64; 3],
}

impl GridSpec {
    /// The full bounding box `[0, 3/8] × [0, 1/16] × [0, 1/256]`.
    pub fn bounding_box(resolution: [usize; 3]) -> Self {
        Self { resolution, lower: [0.0; 3], upper: [3.0 / 8.0, 1.0 / 16.0, 1.0 / 256.0] }
    }

    pub fn len(&self) -> usize {
        self.resolution.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Point `index` in row-major order (`c_4` fastest).
    pub fn point(&self, index: usize) -> [f64; 3] {
        let [n2, n3, n4] = self.resolution;
        let idx = [index / (n3 * n4), (index / n4) % n3, index % n4];
        let ns = [n2, n3, n4];
        core::array::from_fn(|axis| {
            if ns[axis] <= 1 {
                self.lower[axis]
            } else {
                self.lower[axis] + (self.upper[axis] - self.lower[axis]) * idx[axis] as f64 / (ns[axis] - 1) as f64
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionPoint {
    pub c: [f64; 3],
    pub label: RegionLabel,
    pub bezoutian_rank: usize,
}

pub fn classify_point(c: [f64; 3]) -> RegionPoint {
    let report = region_membership(&c);
    RegionPoint { c, label: report.label, bezoutian_rank: report.bezoutian_rank }
}

/// Classifies every grid point, in row-major order.
pub fn region_sample(grid: &GridSpec) -> Vec<RegionPoint> {
    (0..grid.len()).map(|i| classify_point(grid.point(i))).collect()
}

/// Imaginary parts below this count as real in [`companion_roots`] checks.
pub const COMPANION_IMAG_TOLERANCE: f64 = 1e-8;

/// Oracle for membership: all roots of `P_d` real (companion eigenvalues,
/// imaginary parts within `1e-8`) and inside `[0, 1]`.
pub fn companion_membership(c: &[f64]) -> bool {
    let roots = companion_roots(&characteristic_polynomial(c));
    roots.iter().all(|z| z.im.abs() <= COMPANION_IMAG_TOLERANCE && z.re >= -1e-9 && z.re <= 1.0 + 1e-9)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn partition_counts() {
        let counts: Vec<usize> = (1..=8).map(|k| diophantine_partitions(k).len()).collect();
        assert_eq!(counts, vec![1, 2, 3, 5, 7, 11, 15, 22]);
        assert_eq!(diophantine_partitions(1), vec![vec![1]]);
        for k in 1..=7 {
            for q in diophantine_partitions(k) {
                assert_eq!(q.iter().enumerate().map(|(i, x)| (i + 1) * x).sum::<usize>(), k);
            }
        }
    }

    #[test]
    fn coefficient_examples() {
        let a = char_poly_coeffs_from_spectrum(&[0.25; 4]);
        assert!(close(a[2], 3.0 / 8.0, 1e-15) && close(a[3], 1.0 / 16.0, 1e-15) && close(a[4], 1.0 / 256.0, 1e-15));
        assert_eq!(char_poly_coeffs_from_spectrum(&[1.0, 0.0, 0.0, 0.0]), vec![1.0, 1.0, 0.0, 0.0, 0.0]);
        let a = char_poly_coeffs_from_spectrum(&[0.45, 0.45, 0.05, 0.05]);
        assert!(close(a[2], 59.0 / 200.0, 1e-15));
        assert!(close(a[3], 9.0 / 400.0, 1e-15));
        assert!(close(a[4], 81.0 / 160000.0, 1e-16));
        let rho = Mat4::identity() * c(0.25, 0.0);
        let m = char_poly_coeffs(&rho);
        assert!(close(m[2], 0.375, 1e-15) && close(m[4], 1.0 / 256.0, 1e-16));
    }

    #[test]
    fn girard_waring_examples() {
        assert!(close(girard_waring(&[1.0, 0.5], 2).unwrap(), 0.25, 1e-15));
        for k in 2..=6 {
            assert!(girard_waring(&[1.0; 6], k).unwrap().abs() < 1e-14);
            assert!(close(girard_waring_inverse(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0], k).unwrap(), 1.0, 1e-14));
        }
        assert_eq!(girard_waring(&[1.0], 2), Err(Error::MissingTerms { needed: 2, available: 1 }));
        let a = [1.0, 59.0 / 200.0, 9.0 / 400.0, 81.0 / 160000.0];
        assert!(close(girard_waring_inverse(&a, 2).unwrap(), 41.0 / 100.0, 1e-15));
        assert!(close(girard_waring_inverse(&a, 3).unwrap(), 73.0 / 400.0, 1e-15));
    }

    #[test]
    fn plemelj_smithies_low_order() {
        let t = [0.7, 0.3];
        let a2 = plemelj_smithies(&t, 2, Direction::CoefficientFromPowerSums).unwrap();
        assert!(close(a2, (0.49 - 0.3) / 2.0, 1e-15));
        let a = [1.0, 0.2];
        let t2 = plemelj_smithies(&a, 2, Direction::PowerSumFromCoefficients).unwrap();
        assert!(close(t2, 1.0 - 0.4, 1e-15));
    }

    #[test]
    fn closed_power_sums_match_newton() {
        let spectrum = [0.4, 0.3, 0.2, 0.1];
        let a = char_poly_coeffs_from_spectrum(&spectrum);
        let closed = power_sums_d4(a[2], a[3], a[4]);
        let direct = PowerSums::of_spectrum(&spectrum, 6);
        for j in 0..=6 {
            assert!(close(closed[j], direct.get(j).unwrap(), 1e-15), "t_{j}");
        }
    }

    #[test]
    fn bezoutian_examples() {
        let rank_of = |s: &[f64]| bezoutian_rank(&bezoutian(&PowerSums::of_spectrum(s, 6), 4).unwrap());
        assert_eq!(rank_of(&[0.25; 4]), 1);
        assert_eq!(rank_of(&[0.45, 0.45, 0.05, 0.05]), 2);
        let b = bezoutian(&PowerSums::of_spectrum(&[0.4, 0.3, 0.2, 0.1], 6), 4).unwrap();
        assert_eq!(bezoutian_rank(&b), 4);
        assert!(symmetric_functions_of(&b).iter().all(|&e| e > 0.0));
        let b = bezoutian(&PowerSums::of_spectrum(&[0.45, 0.45, 0.05, 0.05], 6), 4).unwrap();
        assert!(b.determinant().abs() < 1e-18);
    }

    #[test]
    fn interlacing_roots() {
        // x³(x − 1)
        let roots = real_roots(&[0.0, 0.0, 0.0, -1.0, 1.0]);
        assert_eq!(roots, vec![(0.0, 3), (1.0, 1)]);
        // x² + 1
        assert!(real_roots(&[1.0, 0.0, 1.0]).is_empty());
        let s = reconstruct_spectrum(&[59.0 / 200.0, 9.0 / 400.0, 81.0 / 160000.0]).unwrap();
        for (x, want) in s.iter().zip([0.05, 0.05, 0.45, 0.45]) {
            assert!(close(*x, want, 1e-12), "{s:?}");
        }
        let s = reconstruct_spectrum(&[3.0 / 8.0, 1.0 / 16.0, 1.0 / 256.0]).unwrap();
        assert!(s.iter().all(|&x| close(x, 0.25, 1e-12)));
    }

    #[test]
    fn membership_examples() {
        let pure = region_membership(&[0.0, 0.0, 0.0]);
        assert!(pure.admissible);
        assert_eq!(pure.label, RegionLabel::ThreeFoldCurve);
        let mixed = region_membership(&[3.0 / 8.0, 1.0 / 16.0, 1.0 / 256.0]);
        assert!(mixed.admissible);
        assert_eq!(mixed.bezoutian_rank, 1);
        assert_ne!(mixed.label, RegionLabel::Interior);
        let fig = region_membership(&[59.0 / 200.0, 9.0 / 400.0, 81.0 / 160000.0]);
        assert!(fig.admissible);
        assert_eq!(fig.label, RegionLabel::TwoFoldSurface);
        assert_eq!(fig.bezoutian_rank, 2);
        let generic = char_poly_coeffs_from_spectrum(&[0.4, 0.3, 0.2, 0.1]);
        assert_eq!(region_membership(&generic[2..]).label, RegionLabel::Interior);
        assert!(!region_membership(&[0.5, 0.0, 0.0]).admissible);
        assert!(!region_membership(&[0.3, 0.06, 0.0039]).admissible || companion_membership(&[0.3, 0.06, 0.0039]));
    }

    #[test]
    fn two_dimensional_slice() {
        for i in 0..=20 {
            let c2 = 0.3 * i as f64 / 20.0;
            assert_eq!(region_membership(&[c2, 0.0, 0.0]).admissible, c2 <= 0.25 + 1e-12, "c2 = {c2}");
        }
    }

    #[test]
    fn grid_order() {
        let g = GridSpec::bounding_box([2, 3, 4]);
        assert_eq!(g.len(), 24);
        assert_eq!(g.point(0), [0.0, 0.0, 0.0]);
        assert_eq!(g.point(1)[2], 1.0 / 256.0 / 3.0);
        assert_eq!(g.point(23), [3.0 / 8.0, 1.0 / 16.0, 1.0 / 256.0]);
        assert_eq!(region_sample(&g).len(), 24);
    }

    #[test]
    fn mixing_target_constructors() {
        let t = MixingTarget::from_spectrum(&[0.45, 0.45, 0.05, 0.05]).unwrap();
        assert!(t.admissible);
        assert!(MixingTarget::pure(4).is_pure());
        assert!(MixingTarget::new(vec![0.5, 0.0, 0.0]).require_admissible().is_err());
        assert_eq!(MixingTarget::from_spectrum(&[0.5, 0.2]), Err(Error::InvalidWeights));
    }
}
