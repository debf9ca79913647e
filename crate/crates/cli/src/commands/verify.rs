//! Seeded invariant suites, one per library module.

use extremal_core::commutant::{commutant_dimension, solve_commutant, stratum_of};
use extremal_core::entanglement::{
    classify, det_cm_closed_forms, ppt_from_invariants_with, ppt_from_partial_transpose, table2_classify, Label,
    DETERMINANT_WEIGHTS, DUAL_PATH_TOLERANCE,
};
use extremal_core::extremal::{
    closed_form_degenerate, closed_form_kramers_pure, closed_form_nondegenerate, solve_mixed_extremal_with,
    solve_pure_extremal_with, state_residual, MixtureWeights, SolverOptions,
};
use extremal_core::hamiltonian::{
    build_hamiltonian, build_time_reversal, time_reversal_commutes, verify_proposition1, verify_proposition2,
    HamiltonianParams,
};
use extremal_core::linalg::{c, eigvalsh, max_abs, Mat4};
use extremal_core::pauli::{commutator_tables_check, pauli, DensityState, FanoOperator};
use extremal_core::sampling::{ginibre_density, random_hermitian, simplex_point};
use extremal_core::spectral::{
    bezoutian, bezoutian_rank, char_poly_coeffs_from_spectrum, companion_membership, girard_waring,
    girard_waring_inverse, region_membership, MixingTarget, PowerSums,
};
use nalgebra::{Matrix2, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{Fault, RunConfig};
use crate::error::{CliError, CliResult};

pub const DEFAULT_SAMPLES: usize = 200;

/// Relative size of the injected `ppt_constant` fault.
const FAULT_SCALE: f64 = 1e-3;

/// Smallest nonzero eigenvalue gap in the Bezoutian rank check; the rank
/// threshold cannot resolve roots much closer than this.
const MIN_RANK_GAP: f64 = 0.05;

/// Smallest eigenvalue gap of the random mixing targets given to the solver.
const MIN_TARGET_GAP: f64 = 1e-3;

pub const SUITES: [&str; 6] = [
    "pauli_algebra",
    "hamiltonian_model",
    "commutant_analysis",
    "spectral_positivity",
    "extremal_solver",
    "entanglement_ppt",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub cases: usize,
    /// Worst residual, or the number of failing cases for counting checks.
    pub worst: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteRecord {
    pub module: String,
    pub passed: bool,
    pub checks: Vec<CheckRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifySummary {
    pub seed: u64,
    pub samples: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fault: Option<Fault>,
    pub passed: bool,
    pub suites: Vec<SuiteRecord>,
}

impl VerifySummary {
    pub fn failures(&self) -> Vec<String> {
        self.suites
            .iter()
            .flat_map(|s| s.checks.iter().filter(|c| !c.passed).map(move |c| format!("{}::{}", s.module, c.name)))
            .collect()
    }
}

struct Ctx {
    rng: ChaCha8Rng,
    samples: usize,
    fault: Option<Fault>,
    checks: Vec<CheckRecord>,
}

impl Ctx {
    fn record(&mut self, name: &str, cases: usize, worst: f64, tolerance: f64) {
        let passed = worst <= tolerance;
        self.checks.push(CheckRecord { name: name.to_owned(), cases, worst, tolerance, passed });
    }

    fn count(&mut self, name: &str, cases: usize, failures: usize) {
        self.record(name, cases, failures as f64, 0.0);
    }

    fn uniform(&mut self) -> f64 {
        self.rng.random_range(-2.0..2.0)
    }

    fn draw(&mut self) -> [f64; 5] {
        std::array::from_fn(|_| self.uniform())
    }

    fn kramers(&mut self) -> HamiltonianParams {
        loop {
            let [b, g, d, e, s] = self.draw();
            let p = HamiltonianParams::kramers(b, g, d, e, s);
            if g.abs() > 0.1 && p.delta_cap_sq().sqrt() > 0.1 && p.omega_sq().sqrt() > 0.1 {
                return p;
            }
        }
    }

    fn broken(&mut self) -> HamiltonianParams {
        loop {
            let [b, g, d, e, s] = self.draw();
            let p = HamiltonianParams::broken(b, g, d, e, s);
            let (_, em) = p.broken_energies();
            if g.abs() > 0.1 && p.omega_sq().sqrt() > 0.1 && s.abs() > 0.1 && d.hypot(e) > 0.1 && em > 0.1 {
                return p;
            }
        }
    }

    fn density_spectrum(&mut self, d: usize) -> Vec<f64> {
        let raw: Vec<f64> = (0..d).map(|_| self.rng.random_range(0.0..1.0)).collect();
        let total: f64 = raw.iter().sum();
        raw.iter().map(|x| x / total).collect()
    }

    fn bloch(&mut self) -> Vector3<f64> {
        let v = Vector3::new(self.uniform(), self.uniform(), self.uniform());
        v * (self.rng.random_range(0.0..1.0) / v.norm().max(1e-12))
    }
}

fn qubit(v: &Vector3<f64>) -> Matrix2<extremal_core::C64> {
    let mut m = Matrix2::identity();
    for k in 0..3 {
        m += pauli(k + 1).expect("pauli index") * c(v[k], 0.0);
    }
    m * c(0.5, 0.0)
}

fn pauli_algebra(ctx: &mut Ctx) {
    for check in commutator_tables_check() {
        ctx.record(&check.name, check.cases, check.max_residual, 0.0);
    }
    let mut worst = 0.0f64;
    for _ in 0..ctx.samples {
        let h = random_hermitian(&mut ctx.rng);
        let back = FanoOperator::decompose(&h).map(|f| f.compose()).unwrap_or_else(|_| Mat4::zeros());
        worst = worst.max(max_abs(&(back - h)) / max_abs(&h).max(1.0));
    }
    ctx.record("fano_round_trip", ctx.samples, worst, 1e-13);

    let mut worst = 0.0f64;
    for _ in 0..ctx.samples {
        let (a, b) = (ctx.bloch(), ctx.bloch());
        let product: Mat4 = qubit(&a).kronecker(&qubit(&b));
        let state = DensityState::from_blocks(a, b, a * b.transpose());
        worst = worst.max(max_abs(&(state.matrix() - product))).max(state.schlienz_mahler().amax());
    }
    ctx.record("product_states", ctx.samples, worst, 1e-14);
}

fn hamiltonian_model(ctx: &mut Ctx) {
    let t = build_time_reversal();
    let mut spectrum = 0.0f64;
    let mut symmetry = 0.0f64;
    let mut broken_commuting = 0;
    for _ in 0..ctx.samples {
        let p = ctx.kramers();
        let h = build_hamiltonian(&p).expect("finite parameters");
        let e = p.kramers_energy();
        for (got, want) in eigvalsh(&h).iter().zip([-e, -e, e, e]) {
            spectrum = spectrum.max((got - want).abs());
        }
        symmetry = symmetry.max(time_reversal_commutes(&h, &t).residual);

        let p = ctx.broken();
        let h = build_hamiltonian(&p).expect("finite parameters");
        let (ep, em) = p.broken_energies();
        let mut want = [-ep, -em, em, ep];
        want.sort_by(f64::total_cmp);
        for (got, want) in eigvalsh(&h).iter().zip(want) {
            spectrum = spectrum.max((got - want).abs());
        }
        broken_commuting += usize::from(time_reversal_commutes(&h, &t).commutes);
    }
    ctx.record("closed_form_spectra", 2 * ctx.samples, spectrum, 1e-12);
    ctx.record("kramers_time_reversal", ctx.samples, symmetry, 1e-12);
    ctx.count("broken_time_reversal", ctx.samples, broken_commuting);

    let mut failures = 0;
    let cases = ctx.samples.div_ceil(4);
    for _ in 0..cases {
        let p = ctx.kramers();
        let h = build_hamiltonian(&p).expect("finite parameters");
        let ok = closed_form_kramers_pure(&p).ok().is_some_and(|set| {
            let m: Vec<Mat4> = set.states.iter().map(DensityState::matrix).collect();
            verify_proposition1(&h, &t, &m).is_ok_and(|r| r.holds)
                && verify_proposition2(&h, &t).is_ok_and(|r| r.holds && r.completeness <= 1e-10)
        });
        failures += usize::from(!ok);
    }
    ctx.count("kramers_pairs", cases, failures);
}

fn commutant_analysis(ctx: &mut Ctx) {
    let mut failures = 0;
    for i in 0..ctx.samples {
        let (h, want) = match i % 3 {
            0 => (build_hamiltonian(&ctx.kramers()).expect("finite parameters"), (8, 7)),
            1 => (build_hamiltonian(&ctx.broken()).expect("finite parameters"), (12, 3)),
            _ => (random_hermitian(&mut ctx.rng), (12, 3)),
        };
        let ok = match (stratum_of(&h), solve_commutant(&h)) {
            (Ok(s), Ok(sol)) => (s.r, s.n) == want && sol.dimension() + 1 == commutant_dimension(&s),
            _ => false,
        };
        failures += usize::from(!ok);
    }
    ctx.count("stratum_and_dimension", ctx.samples, failures);
    let identity = stratum_of(&Mat4::identity());
    let ok = identity.is_ok_and(|s| s.n == 15 && s.manifold() == "Point");
    ctx.count("identity_stratum", 1, usize::from(!ok));
}

fn spectral_positivity(ctx: &mut Ctx) {
    let mut worst = 0.0f64;
    for i in 0..ctx.samples {
        let d = 2 + i % 5;
        let spectrum = ctx.density_spectrum(d);
        let t = PowerSums::of_spectrum(&spectrum, d);
        let a = char_poly_coeffs_from_spectrum(&spectrum);
        let forward: Vec<f64> = (1..=d).map(|k| girard_waring(&t.t, k).unwrap_or(f64::NAN)).collect();
        for k in 1..=d {
            let back = girard_waring_inverse(&forward, k).unwrap_or(f64::NAN);
            let err = (forward[k - 1] - a[k]).abs().max((back - t.t[k - 1]).abs());
            worst = worst.max(if err.is_nan() { f64::INFINITY } else { err });
        }
    }
    ctx.record("power_sum_round_trip", ctx.samples, worst, 1e-12);

    let (mut rejected, mut wrong_rank) = (0, 0);
    for i in 0..ctx.samples {
        let (s, distinct) = loop {
            let mut s = ctx.density_spectrum(4);
            match i % 3 {
                1 => s[1] = s[0],
                2 => (s[1], s[3]) = (s[0], s[2]),
                _ => {}
            }
            let total: f64 = s.iter().sum();
            s.iter_mut().for_each(|x| *x /= total);
            let mut distinct = s.clone();
            distinct.sort_by(f64::total_cmp);
            distinct.dedup();
            if distinct.windows(2).all(|w| w[1] - w[0] >= MIN_RANK_GAP) {
                break (s, distinct.len());
            }
        };
        let a = char_poly_coeffs_from_spectrum(&s);
        rejected += usize::from(!region_membership(&a[2..]).admissible);
        let rank = bezoutian(&PowerSums::of_spectrum(&s, 6), 4).map(|b| bezoutian_rank(&b));
        wrong_rank += usize::from(rank.ok() != Some(distinct));
    }
    ctx.count("degenerate_spectra_admissible", ctx.samples, rejected);
    ctx.count("bezoutian_rank_counts_distinct", ctx.samples, wrong_rank);

    let cases = 10 * ctx.samples;
    let mut failures = 0;
    for _ in 0..cases {
        let c = [
            ctx.rng.random_range(0.0..0.375),
            ctx.rng.random_range(0.0..0.0625),
            ctx.rng.random_range(0.0..1.0 / 256.0),
        ];
        failures += usize::from(region_membership(&c).admissible != companion_membership(&c));
    }
    ctx.count("membership_vs_companion_roots", cases, failures);
}

fn extremal_solver(ctx: &mut Ctx) {
    let options = SolverOptions::default();
    let mut worst = 0.0f64;
    let cases = ctx.samples.div_ceil(2);
    for _ in 0..cases {
        let h = random_hermitian(&mut ctx.rng);
        worst = worst.max(match solve_pure_extremal_with(&h, &options) {
            Ok(set) if set.len() == 4 => {
                set.mean_values.iter().zip(eigvalsh(&h)).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
            }
            _ => f64::INFINITY,
        });
    }
    ctx.record("pure_mean_values_are_eigenvalues", cases, worst, 1e-8);

    let mut worst = 0.0f64;
    for i in 0..cases {
        let p = if i % 2 == 0 { ctx.kramers() } else { ctx.broken() };
        let closed = if i % 2 == 0 { closed_form_kramers_pure(&p) } else { closed_form_nondegenerate(&p) };
        let numeric = build_hamiltonian(&p).and_then(|h| solve_pure_extremal_with(&h, &options));
        worst = worst.max(match (closed, numeric) {
            (Ok(a), Ok(b)) if a.len() == b.len() => {
                a.mean_values.iter().zip(&b.mean_values).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
            }
            _ => f64::INFINITY,
        });
    }
    ctx.record("closed_forms_match_solver", cases, worst, 1e-8);

    let cases = ctx.samples.div_ceil(10);
    let mut worst = 0.0f64;
    for _ in 0..cases {
        let h = random_hermitian(&mut ctx.rng);
        let spectrum = loop {
            let s = ctx.density_spectrum(4);
            let mut sorted = s.clone();
            sorted.sort_by(f64::total_cmp);
            if sorted.windows(2).all(|w| w[1] - w[0] >= MIN_TARGET_GAP) {
                break s;
            }
        };
        let target = MixingTarget::from_spectrum(&spectrum).expect("density spectrum");
        worst = worst.max(match solve_mixed_extremal_with(&h, &target, &options) {
            Ok(set) if !set.is_empty() => {
                set.states.iter().map(|s| state_residual(&h, &s.matrix(), &target.c)).fold(0.0, f64::max)
            }
            _ => f64::INFINITY,
        });
    }
    ctx.record("mixed_states_meet_target", cases, worst, 1e-8);
}

fn entanglement_ppt(ctx: &mut Ctx) {
    let mut weights = DETERMINANT_WEIGHTS;
    if ctx.fault == Some(Fault::PptConstant) {
        weights[0] *= 1.0 + FAULT_SCALE;
    }
    let mut worst = 0.0f64;
    let mut disagreements = 0;
    for _ in 0..ctx.samples {
        let state = DensityState::from_matrix(&ginibre_density(&mut ctx.rng)).expect("Hermitian sample");
        worst = worst.max(ppt_from_invariants_with(&state, weights).max_deviation(&ppt_from_partial_transpose(&state)));
        disagreements += usize::from(!classify(&state).consistent_with_eigenvalue());
    }
    ctx.record("ppt_dual_path", ctx.samples, worst, DUAL_PATH_TOLERANCE);
    ctx.count("verdict_matches_partial_transpose", ctx.samples, disagreements);

    let cases = ctx.samples.div_ceil(4);
    let mut failures = 0;
    let mut worst = 0.0f64;
    for _ in 0..cases {
        let broken = closed_form_nondegenerate(&ctx.broken());
        failures += usize::from(!broken.is_ok_and(|set| set.states.iter().all(|s| classify(s).label.is_separable())));

        let p = ctx.kramers();
        let pure = closed_form_kramers_pure(&p);
        failures += usize::from(!pure.is_ok_and(|set| set.states.iter().all(|s| classify(s).label == Label::Entangled)));

        let w = MixtureWeights::new(simplex_point(&mut ctx.rng)).expect("simplex point");
        worst = worst.max(match (det_cm_closed_forms(&p, &w), closed_form_degenerate(&p, &w)) {
            (Ok((dc, dm)), Ok(state)) => {
                let v = classify(&state);
                (dc - v.det_c).abs().max((dm - v.det_m).abs())
            }
            _ => f64::INFINITY,
        });
        failures += usize::from(table2_classify(&w, &p).is_err());
    }
    ctx.count("family_verdicts", 3 * cases, failures);
    ctx.record("kramers_determinants", cases, worst, 1e-10);
}

fn run_suite(index: usize, seed: u64, samples: usize, fault: Option<Fault>) -> SuiteRecord {
    let mut ctx = Ctx {
        rng: ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(index as u64)),
        samples,
        fault,
        checks: Vec::new(),
    };
    match index {
        0 => pauli_algebra(&mut ctx),
        1 => hamiltonian_model(&mut ctx),
        2 => commutant_analysis(&mut ctx),
        3 => spectral_positivity(&mut ctx),
        4 => extremal_solver(&mut ctx),
        _ => entanglement_ppt(&mut ctx),
    }
    SuiteRecord { module: SUITES[index].to_owned(), passed: ctx.checks.iter().all(|c| c.passed), checks: ctx.checks }
}

pub fn verify(config: &RunConfig, seed: u64) -> CliResult<VerifySummary> {
    let spec = config.verify.clone().unwrap_or_default();
    let samples = spec.samples.unwrap_or(DEFAULT_SAMPLES);
    let selected: Vec<usize> = match &spec.suites {
        None => (0..SUITES.len()).collect(),
        Some(names) => names
            .iter()
            .map(|n| {
                SUITES.iter().position(|s| s == n).ok_or_else(|| {
                    CliError::config(format!("unknown suite `{n}` (expected one of {})", SUITES.join(", ")))
                })
            })
            .collect::<CliResult<_>>()?,
    };
    let suites: Vec<SuiteRecord> =
        selected.par_iter().map(|&i| run_suite(i, seed, samples, spec.inject_fault)).collect();
    Ok(VerifySummary { seed, samples, fault: spec.inject_fault, passed: suites.iter().all(|s| s.passed), suites })
}
