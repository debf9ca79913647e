//! The condition `[ρ, H] = 0` as a real linear system on the fifteen
//! traceless Fano coefficients of ρ, the rank of that system and the
//! eigenvalue-multiplicity stratum it identifies.
//!
//! Coefficients are ordered row-major over `(p, q) ≠ (0, 0)`, so column `j`
//! of every matrix here corresponds to `COEFFICIENTS[j]`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use nalgebra::{DMatrix, SVD};

use crate::linalg::{c, hermitian_deviation, hermitian_deviation_dyn, numerical_rank, Mat4, C64, HERMITIAN_TOLERANCE};
use crate::pauli::{fano_decompose, FanoOperator};
use crate::spectral::integer_partitions;
use crate::{Error, Result};

/// Singular values below `RANK_THRESHOLD · σ_max` count as zero.
pub const RANK_THRESHOLD: f64 = 1e-9;
/// Normalized singular values inside `[lo, hi]` make the rank unreliable.
pub const BORDERLINE_BAND: (f64, f64) = (1e-10, 1e-8);

/// The fifteen traceless coefficient labels in column order.
pub const COEFFICIENTS: [(usize, usize); 15] = [
    (0, 1),
    (0, 2),
    (0, 3),
    (1, 0),
    (1, 1),
    (1, 2),
    (1, 3),
    (2, 0),
    (2, 1),
    (2, 2),
    (2, 3),
    (3, 0),
    (3, 1),
    (3, 2),
    (3, 3),
];

/// Order in which coefficients are tried as free variables; it reproduces the
/// free sets `{r10, r02, r11}` and `{r10, r01, r02, r03, r11, r12, r13}` of
/// the broken and Kramers families.
pub const FREE_PREFERENCE: [(usize, usize); 15] = [
    (1, 0),
    (0, 2),
    (1, 1),
    (0, 1),
    (0, 3),
    (1, 2),
    (1, 3),
    (2, 0),
    (2, 1),
    (2, 2),
    (2, 3),
    (3, 0),
    (3, 1),
    (3, 2),
    (3, 3),
];

/// Column of `(p, q)`; `None` for `(0, 0)` or out-of-range labels.
pub fn coefficient_index(p: usize, q: usize) -> Option<usize> {
    if p > 3 || q > 3 || (p, q) == (0, 0) {
        None
    } else {
        Some(4 * p + q - 1)
    }
}

/// `σ_a σ_b = φ σ_c`, returned as `(φ, c)` with φ ∈ {1, ±i}.
fn pauli_mul(a: usize, b: usize) -> (C64, usize) {
    match (a, b) {
        (0, x) | (x, 0) => (c(1.0, 0.0), x),
        (x, y) if x == y => (c(1.0, 0.0), 0),
        _ => {
            let k = 6 - a - b;
            let cyclic = matches!((a, b), (1, 2) | (2, 3) | (3, 1));
            (c(0.0, if cyclic { 1.0 } else { -1.0 }), k)
        }
    }
}

/// Real 15×15 matrix `L` with `L·r = 0 ⇔ [ρ, H] = 0`.
///
/// Uses `[D_pq, D_mn] = 2i Im(φ_pm φ_qn) D_{p∘m, q∘n}`, so every entry is an
/// integer combination of the Fano coefficients of H divided by 8. The row
/// for `D_00` vanishes identically and is omitted.
pub fn commutator_constraint_matrix(h: &Mat4) -> Result<DMatrix<f64>> {
    let f = fano_decompose(h)?;
    Ok(constraint_from_fano(&f))
}

pub(crate) fn constraint_from_fano(f: &FanoOperator) -> DMatrix<f64> {
    let mut l = DMatrix::zeros(15, 15);
    for (col, &(p, q)) in COEFFICIENTS.iter().enumerate() {
        for m in 0..4 {
            for n in 0..4 {
                let hmn = f.get(m, n);
                if hmn == 0.0 {
                    continue;
                }
                let (phi_a, k) = pauli_mul(p, m);
                let (phi_b, l_idx) = pauli_mul(q, n);
                let weight = (phi_a * phi_b).im;
                if weight != 0.0 {
                    let row = coefficient_index(k, l_idx).expect("commutator has no identity component");
                    l[(row, col)] += weight * hmn / 8.0;
                }
            }
        }
    }
    l
}

fn sorted_singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

fn dim_tangent_rank(svals: &[f64]) -> Result<usize> {
    let smax = svals.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return Ok(0);
    }
    let rank = numerical_rank(svals, RANK_THRESHOLD);
    if svals.iter().any(|&s| s / smax >= BORDERLINE_BAND.0 && s / smax <= BORDERLINE_BAND.1) {
        return Err(Error::AmbiguousStratum { rank, candidates: Vec::new() });
    }
    Ok(rank)
}

/// Numerical rank of the constraint matrix (threshold `1e-9 · σ_max`).
pub fn gram_rank(h: &Mat4) -> Result<usize> {
    let l = commutator_constraint_matrix(h)?;
    Ok(numerical_rank(&sorted_singular_values(&l), RANK_THRESHOLD))
}

/// Generalized Gell-Mann basis of `d×d` Hermitian matrices (identity first),
/// orthogonal under the trace inner product.
pub fn hermitian_basis(d: usize) -> Vec<DMatrix<C64>> {
    let mut out = Vec::with_capacity(d * d);
    out.push(DMatrix::identity(d, d));
    for j in 0..d {
        for k in (j + 1)..d {
            let mut sym = DMatrix::zeros(d, d);
            sym[(j, k)] = c(1.0, 0.0);
            sym[(k, j)] = c(1.0, 0.0);
            out.push(sym);
            let mut asym = DMatrix::zeros(d, d);
            asym[(j, k)] = c(0.0, -1.0);
            asym[(k, j)] = c(0.0, 1.0);
            out.push(asym);
        }
    }
    for l in 1..d {
        let norm = libm::sqrt(2.0 / (l * (l + 1)) as f64);
        let mut diag = DMatrix::zeros(d, d);
        for i in 0..l {
            diag[(i, i)] = c(norm, 0.0);
        }
        diag[(l, l)] = c(-(l as f64) * norm, 0.0);
        out.push(diag);
    }
    out
}

/// Columns are `vec(i[G_k, H])` (real and imaginary parts stacked) for each
/// traceless basis element `G_k`.
fn tangent_matrix(h: &DMatrix<C64>) -> DMatrix<f64> {
    let d = h.nrows();
    let basis = hermitian_basis(d);
    let mut t = DMatrix::zeros(2 * d * d, d * d - 1);
    for (col, g) in basis.iter().skip(1).enumerate() {
        let comm = g * h - h * g;
        for (i, z) in comm.iter().enumerate() {
            t[(i, col)] = z.re;
            t[(d * d + i, col)] = z.im;
        }
    }
    t
}

/// Gram rank for any dimension, from the tangent vectors of the unitary orbit.
pub fn gram_rank_dyn(h: &DMatrix<C64>) -> Result<usize> {
    check_square_hermitian(h)?;
    Ok(numerical_rank(&sorted_singular_values(&tangent_matrix(h)), RANK_THRESHOLD))
}

fn check_square_hermitian(h: &DMatrix<C64>) -> Result<()> {
    if h.nrows() != h.ncols() {
        return Err(Error::Dimension { expected: h.nrows(), found: h.ncols() });
    }
    let dev = hermitian_deviation_dyn(h);
    if dev > HERMITIAN_TOLERANCE {
        return Err(Error::NotHermitian { deviation: dev });
    }
    Ok(())
}

/// One row of the strata table: eigenvalue multiplicities and the derived
/// dimensions.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StratumDescriptor {
    pub d: usize,
    /// Descending.
    pub multiplicities: Vec<usize>,
    /// Number of distinct eigenvalues.
    pub k: usize,
    /// `Σ m_j² − k`.
    pub codim: usize,
    /// `d² − codim`.
    pub dim: usize,
    /// Flag-manifold dimension `dim − k`.
    pub r: usize,
    /// Free parameters `(d² − 1) − r`.
    pub n: usize,
}

impl StratumDescriptor {
    pub fn from_multiplicities(mut multiplicities: Vec<usize>) -> Self {
        multiplicities.retain(|&m| m > 0);
        multiplicities.sort_unstable_by(|a, b| b.cmp(a));
        let d: usize = multiplicities.iter().sum();
        let k = multiplicities.len();
        let codim = multiplicities.iter().map(|m| m * m).sum::<usize>() - k;
        let dim = d * d - codim;
        let r = dim - k;
        Self { d, multiplicities, k, codim, dim, r, n: d * d - 1 - r }
    }

    /// Every multiplicity pattern of dimension `d`, finest last.
    pub fn table(d: usize) -> Vec<Self> {
        integer_partitions(d).into_iter().map(Self::from_multiplicities).collect()
    }

    /// Name of the orbit manifold `U(d)/Π U(m_j)`: `Point`, `CP^{d−1}`,
    /// a Grassmannian `Gr(m, d)` or a flag manifold `Fl(n_1, …; d)` with the
    /// partial sums of the multiplicities.
    pub fn manifold(&self) -> String {
        let d = self.d;
        match self.multiplicities.as_slice() {
            [_] => String::from("Point"),
            [m, 1] if *m + 1 == d => format!("CP^{}", d - 1),
            [a, b] => format!("Gr({}, {d})", (*a).min(*b)),
            ms if ms.iter().all(|&m| m == 1) => format!("Fl({d})"),
            ms => {
                let mut sums = Vec::with_capacity(ms.len() - 1);
                let mut acc = 0;
                for m in &ms[..ms.len() - 1] {
                    acc += m;
                    sums.push(acc.to_string());
                }
                format!("Fl({}; {d})", sums.join(", "))
            }
        }
    }

    /// Descriptors of dimension `d` whose manifold dimension is `r`.
    pub fn with_rank(d: usize, r: usize) -> Vec<Self> {
        Self::table(d).into_iter().filter(|s| s.r == r).collect()
    }
}

fn stratum_from_rank(d: usize, rank: usize) -> Result<StratumDescriptor> {
    let mut matches = StratumDescriptor::with_rank(d, rank);
    match matches.len() {
        1 => Ok(matches.remove(0)),
        _ => Err(Error::AmbiguousStratum {
            rank,
            candidates: matches.into_iter().map(|s| s.multiplicities).collect(),
        }),
    }
}

/// Stratum of a 4×4 Hamiltonian, detected from the rank of the constraint
/// matrix without diagonalizing H.
pub fn stratum_of(h: &Mat4) -> Result<StratumDescriptor> {
    let l = commutator_constraint_matrix(h)?;
    let rank = dim_tangent_rank(&sorted_singular_values(&l))?;
    stratum_from_rank(4, rank)
}

/// Stratum of a `d×d` Hamiltonian; fails when several multiplicity patterns
/// share the measured rank (first possible at `d = 7`).
pub fn stratum_of_dyn(h: &DMatrix<C64>) -> Result<StratumDescriptor> {
    check_square_hermitian(h)?;
    let rank = dim_tangent_rank(&sorted_singular_values(&tangent_matrix(h)))?;
    stratum_from_rank(h.nrows(), rank)
}

/// A solved coefficient written in terms of the free ones.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearRelation {
    pub target: (usize, usize),
    /// `(free coefficient, weight)`; weights below `1e-12` are dropped.
    pub terms: Vec<((usize, usize), f64)>,
}

impl LinearRelation {
    pub fn coefficient_of(&self, free: (usize, usize)) -> f64 {
        self.terms.iter().find(|(k, _)| *k == free).map_or(0.0, |(_, w)| *w)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommutantSolution {
    /// Free coefficient labels; `free.len() = 15 − r`.
    pub free: Vec<(usize, usize)>,
    /// Dependent coefficients, each linear in the free ones; `None` when no
    /// well-conditioned pivot exists in the preferred ordering.
    pub dependent: Option<Vec<LinearRelation>>,
    /// Orthonormal basis of the traceless commutant, one column per vector,
    /// rows in `COEFFICIENTS` order.
    pub basis: DMatrix<f64>,
}

impl CommutantSolution {
    pub fn dimension(&self) -> usize {
        self.basis.ncols()
    }

    /// State coefficients (`r00 = 1`) from coordinates in the orthonormal basis.
    pub fn from_basis(&self, coords: &[f64]) -> Result<FanoOperator> {
        if coords.len() != self.basis.ncols() {
            return Err(Error::Dimension { expected: self.basis.ncols(), found: coords.len() });
        }
        let mut f = FanoOperator::zero();
        f.set(0, 0, 1.0);
        for (row, &(p, q)) in COEFFICIENTS.iter().enumerate() {
            let v: f64 = (0..coords.len()).map(|j| self.basis[(row, j)] * coords[j]).sum();
            f.set(p, q, v);
        }
        Ok(f)
    }

    /// State coefficients (`r00 = 1`) from values of the free coefficients.
    pub fn from_free(&self, values: &[f64]) -> Result<FanoOperator> {
        let relations = self
            .dependent
            .as_ref()
            .ok_or(Error::DegenerateParameters("no pivot in the preferred coefficient order"))?;
        if values.len() != self.free.len() {
            return Err(Error::Dimension { expected: self.free.len(), found: values.len() });
        }
        let mut f = FanoOperator::zero();
        f.set(0, 0, 1.0);
        for (&(p, q), &v) in self.free.iter().zip(values) {
            f.set(p, q, v);
        }
        for rel in relations {
            let v: f64 = rel
                .terms
                .iter()
                .map(|(k, w)| w * values[self.free.iter().position(|x| x == k).expect("term is free")])
                .sum();
            f.set(rel.target.0, rel.target.1, v);
        }
        Ok(f)
    }

    pub fn relation(&self, target: (usize, usize)) -> Option<&LinearRelation> {
        self.dependent.as_ref()?.iter().find(|r| r.target == target)
    }
}

/// Orthonormal nullspace basis (15 × n) of a constraint matrix.
pub(crate) fn nullspace(l: &DMatrix<f64>, rel: f64) -> DMatrix<f64> {
    let cols = l.ncols();
    // Pad to square so the SVD returns a complete right basis.
    let mut sq = DMatrix::zeros(l.nrows().max(cols), cols);
    sq.rows_mut(0, l.nrows()).copy_from(l);
    let svd = SVD::new(sq, false, true);
    let vt = svd.v_t.expect("requested V^T");
    let smax = svd.singular_values.iter().fold(0.0f64, |a, &b| a.max(b));
    let null: Vec<usize> = (0..cols).filter(|&i| svd.singular_values[i] <= rel * smax || smax == 0.0).collect();
    let mut out = DMatrix::zeros(cols, null.len());
    for (j, &i) in null.iter().enumerate() {
        out.set_column(j, &vt.row(i).transpose());
    }
    out
}

fn min_singular(m: &DMatrix<f64>) -> f64 {
    m.singular_values().iter().fold(f64::INFINITY, |a, &b| a.min(b))
}

/// Nullspace of the constraint matrix as an orthonormal basis plus, when
/// possible, explicit relations for the dependent coefficients.
pub fn solve_commutant(h: &Mat4) -> Result<CommutantSolution> {
    let l = commutator_constraint_matrix(h)?;
    let basis = nullspace(&l, RANK_THRESHOLD);
    let n = basis.ncols();

    let mut free_rows: Vec<usize> = Vec::with_capacity(n);
    for &(p, q) in FREE_PREFERENCE.iter() {
        if free_rows.len() == n {
            break;
        }
        let row = coefficient_index(p, q).expect("traceless label");
        let mut trial = free_rows.clone();
        trial.push(row);
        let sub = DMatrix::from_fn(trial.len(), n, |i, j| basis[(trial[i], j)]);
        if min_singular(&sub) > 1e-8 {
            free_rows = trial;
        }
    }
    let free: Vec<(usize, usize)> = free_rows.iter().map(|&r| COEFFICIENTS[r]).collect();

    let dependent = if free_rows.len() == n {
        let n_free = DMatrix::from_fn(n, n, |i, j| basis[(free_rows[i], j)]);
        n_free.clone().try_inverse().map(|inv| {
            let mut rels = Vec::with_capacity(15 - n);
            for (row, &label) in COEFFICIENTS.iter().enumerate() {
                if free_rows.contains(&row) {
                    continue;
                }
                let coeffs = basis.row(row) * &inv;
                let terms = free
                    .iter()
                    .zip(coeffs.iter())
                    .filter(|(_, w)| w.abs() > 1e-12)
                    .map(|(&k, &w)| (k, w))
                    .collect();
                rels.push(LinearRelation { target: label, terms });
            }
            rels
        })
    } else {
        None
    };

    Ok(CommutantSolution { free, dependent, basis })
}

/// Commutant basis for an already-decomposed operator; used by the solver.
pub(crate) fn commutant_basis(f: &FanoOperator) -> DMatrix<f64> {
    nullspace(&constraint_from_fano(f), RANK_THRESHOLD)
}

/// Confirms that `H` is accepted as 4×4 Hermitian; shared by callers that
/// only need the check.
pub fn require_hermitian(h: &Mat4) -> Result<()> {
    let dev = hermitian_deviation(h);
    if dev > HERMITIAN_TOLERANCE {
        Err(Error::NotHermitian { deviation: dev })
    } else {
        Ok(())
    }
}

/// Dimension of the commutant of a diagonalizable `H`, `Σ m_j²`, from a
/// stratum; equals `d² − r`.
pub fn commutant_dimension(s: &StratumDescriptor) -> usize {
    s.multiplicities.iter().map(|m| m * m).sum()
}
