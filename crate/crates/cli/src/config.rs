//! The JSON run configuration.
//!
//! ```json
//! {
//!   "command": "sweep",
//!   "hamiltonian": { "params": { "beta": 1, "gamma": 1, "delta": 0, "epsilon": 1, "sigma": 1, "s": -1 } },
//!   "mixing": [0.295, 0.0225, 0.00050625],
//!   "sweep": { "parameter": "delta", "start": -3, "stop": 3, "steps": 121 },
//!   "output": { "path": "mixed-sweep.csv", "format": "csv" },
//!   "seed": 7
//! }
//! ```
//!
//! A Hamiltonian may instead be given as `{ "matrix": [[...], ...] }` with
//! entries that are either real numbers or `[re, im]` pairs.

use std::fmt;
use std::path::{Path, PathBuf};

use extremal_core::extremal::{Gauge, SolverOptions};
use extremal_core::hamiltonian::HamiltonianParams;
use extremal_core::linalg::{c, Mat4};
use extremal_core::pauli::FanoOperator;
use extremal_core::spectral::GridSpec;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Analyze,
    Sweep,
    Region,
    Classify,
    Verify,
}

impl Command {
    pub fn as_str(&self) -> &'static str {
        match self {
            Command::Analyze => "analyze",
            Command::Sweep => "sweep",
            Command::Region => "region",
            Command::Classify => "classify",
            Command::Verify => "verify",
        }
    }

    fn default_format(&self) -> Format {
        match self {
            Command::Sweep | Command::Region => Format::Csv,
            _ => Format::Json,
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSpec {
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub sigma: f64,
    pub s: f64,
}

impl From<ParamsSpec> for HamiltonianParams {
    fn from(p: ParamsSpec) -> Self {
        HamiltonianParams::new(p.beta, p.gamma, p.delta, p.epsilon, p.sigma, p.s)
    }
}

impl From<HamiltonianParams> for ParamsSpec {
    fn from(p: HamiltonianParams) -> Self {
        ParamsSpec { beta: p.beta, gamma: p.gamma, delta: p.delta, epsilon: p.epsilon, sigma: p.sigma, s: p.s }
    }
}

/// A matrix entry: `1.5` or `[1.5, -0.5]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

pub type MatrixLiteral = Vec<Vec<Entry>>;

pub fn matrix_from_literal(rows: &MatrixLiteral) -> CliResult<Mat4> {
    if rows.len() != 4 || rows.iter().any(|r| r.len() != 4) {
        return Err(CliError::config("matrix literals must be 4x4"));
    }
    let mut m = Mat4::zeros();
    for (i, row) in rows.iter().enumerate() {
        for (j, entry) in row.iter().enumerate() {
            let (re, im) = match *entry {
                Entry::Real(x) => (x, 0.0),
                Entry::Complex([x, y]) => (x, y),
            };
            if !re.is_finite() || !im.is_finite() {
                return Err(CliError::config(format!("matrix entry ({i}, {j}) is not finite")));
            }
            m[(i, j)] = c(re, im);
        }
    }
    Ok(m)
}

pub fn literal_from_matrix(m: &Mat4) -> Vec<Vec<[f64; 2]>> {
    (0..4).map(|i| (0..4).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<ParamsSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<MatrixLiteral>,
}

/// The Hamiltonian in both forms, the parameters when the family was used.
#[derive(Debug, Clone)]
pub struct ResolvedHamiltonian {
    pub params: Option<HamiltonianParams>,
    pub matrix: Mat4,
}

impl HamiltonianSpec {
    pub fn resolve(&self) -> CliResult<ResolvedHamiltonian> {
        match (&self.params, &self.matrix) {
            (Some(p), None) => {
                let params = HamiltonianParams::from(*p);
                let matrix = extremal_core::hamiltonian::build_hamiltonian(&params)?;
                Ok(ResolvedHamiltonian { params: Some(params), matrix })
            }
            (None, Some(rows)) => {
                let matrix = matrix_from_literal(rows)?;
                extremal_core::commutant::require_hermitian(&matrix)?;
                Ok(ResolvedHamiltonian { params: None, matrix })
            }
            _ => Err(CliError::config("`hamiltonian` needs exactly one of `params` or `matrix`")),
        }
    }
}

/// A two-qubit state for `classify`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct StateSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<MatrixLiteral>,
    /// Coefficients `r_pq` with `ρ = ¼ Σ r_pq σ_p⊗σ_q`; `r_00` must be 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fano: Option<[[f64; 4]; 4]>,
}

impl StateSpec {
    pub fn resolve(&self) -> CliResult<extremal_core::pauli::DensityState> {
        use extremal_core::pauli::DensityState;
        match (&self.matrix, &self.fano) {
            (Some(rows), None) => Ok(DensityState::from_matrix(&matrix_from_literal(rows)?)?),
            (None, Some(coeffs)) => {
                let mut f = FanoOperator::zero();
                for (p, row) in coeffs.iter().enumerate() {
                    for (q, &v) in row.iter().enumerate() {
                        f.set(p, q, v);
                    }
                }
                Ok(DensityState::from_fano(f)?)
            }
            _ => Err(CliError::config("`state` needs exactly one of `matrix` or `fano`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub parameter: String,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl SweepSpec {
    pub fn grid(&self) -> Vec<f64> {
        let last = (self.steps - 1) as f64;
        (0..self.steps).map(|i| self.start + (self.stop - self.start) * i as f64 / last).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Resolution {
    Uniform(usize),
    PerAxis([usize; 3]),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionSpec {
    pub resolution: Resolution,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper: Option<[f64; 3]>,
}

impl RegionSpec {
    pub fn grid(&self) -> GridSpec {
        let resolution = match self.resolution {
            Resolution::Uniform(n) => [n; 3],
            Resolution::PerAxis(r) => r,
        };
        let mut grid = GridSpec::bounding_box(resolution);
        if let Some(lower) = self.lower {
            grid.lower = lower;
        }
        if let Some(upper) = self.upper {
            grid.upper = upper;
        }
        grid
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GaugeSpec {
    Auto,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seeds: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iterations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gauge: Option<GaugeSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fault {
    /// Perturbs the `det C` weight of the PPT coefficient identity.
    PptConstant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct VerifySpec {
    /// Random draws per sampled check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inject_fault: Option<Fault>,
    /// Restrict the run to these suites.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suites: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hamiltonian: Option<HamiltonianSpec>,
    /// `(c_2, c_3, c_4)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mixing: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<[f64; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<StateSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<RegionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifySpec>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::config(format!("{e}")))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    fn present(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        let mut mark = |name, set: bool| {
            if set {
                out.push(name);
            }
        };
        mark("hamiltonian", self.hamiltonian.is_some());
        mark("mixing", self.mixing.is_some());
        mark("sweep", self.sweep.is_some());
        mark("weights", self.weights.is_some());
        mark("state", self.state.is_some());
        mark("region", self.region.is_some());
        mark("solver", self.solver.is_some());
        mark("verify", self.verify.is_some());
        out
    }

    /// Checks that the fields needed by `command` are present, that no
    /// field belonging to another command is, and the static constraints.
    pub fn validate(&self, command: Command) -> CliResult<()> {
        if let Some(declared) = self.command {
            if declared != command {
                return Err(CliError::config(format!("config declares command `{declared}` but `{command}` was run")));
            }
        }
        let allowed: &[&str] = match command {
            Command::Analyze => &["hamiltonian", "mixing", "solver"],
            Command::Sweep => &["hamiltonian", "mixing", "sweep", "solver"],
            Command::Region => &["region"],
            Command::Classify => &["state", "weights", "hamiltonian"],
            Command::Verify => &["verify"],
        };
        for field in self.present() {
            if !allowed.contains(&field) {
                return Err(CliError::config(format!("field `{field}` is not used by `{command}`")));
            }
        }
        let require = |ok: bool, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(CliError::config(format!("`{command}` requires {what}")))
            }
        };
        match command {
            Command::Analyze => require(self.hamiltonian.is_some(), "`hamiltonian`")?,
            Command::Sweep => {
                require(self.hamiltonian.as_ref().is_some_and(|h| h.params.is_some()), "`hamiltonian.params`")?;
                require(self.sweep.is_some(), "a `sweep` block")?;
            }
            Command::Region => require(self.region.is_some(), "a `region` block")?,
            Command::Classify => {
                let by_state = self.state.is_some() && self.weights.is_none() && self.hamiltonian.is_none();
                let by_weights = self.state.is_none()
                    && self.weights.is_some()
                    && self.hamiltonian.as_ref().is_some_and(|h| h.params.is_some());
                require(by_state || by_weights, "either `state` or `weights` with `hamiltonian.params`")?;
            }
            Command::Verify => {}
        }
        if let Some(h) = &self.hamiltonian {
            if h.params.is_some() == h.matrix.is_some() {
                return Err(CliError::config("`hamiltonian` needs exactly one of `params` or `matrix`"));
            }
        }
        if let Some(c) = &self.mixing {
            if c.len() != 3 {
                return Err(CliError::config(format!("`mixing` needs (c2, c3, c4), got {} values", c.len())));
            }
            if c.iter().any(|x| !x.is_finite()) {
                return Err(CliError::config("`mixing` values must be finite"));
            }
        }
        if let Some(s) = &self.sweep {
            if s.steps < 2 {
                return Err(CliError::config(format!("`sweep.steps` must be at least 2, got {}", s.steps)));
            }
            if !s.start.is_finite() || !s.stop.is_finite() {
                return Err(CliError::config("`sweep.start` and `sweep.stop` must be finite"));
            }
            if HamiltonianParams::kramers(0.0, 0.0, 0.0, 0.0, 0.0).get(&s.parameter).is_none() {
                return Err(CliError::config(format!(
                    "unknown sweep parameter `{}` (expected beta, gamma, delta, epsilon, sigma or s)",
                    s.parameter
                )));
            }
        }
        if let Some(r) = &self.region {
            let grid = r.grid();
            if grid.resolution.contains(&0) {
                return Err(CliError::config("`region.resolution` must be positive"));
            }
            if grid.lower.iter().chain(&grid.upper).any(|x| !x.is_finite()) {
                return Err(CliError::config("`region` bounds must be finite"));
            }
        }
        if let Some(solver) = &self.solver {
            if solver.seeds == Some(0) || solver.max_iterations == Some(0) {
                return Err(CliError::config("`solver.seeds` and `solver.max_iterations` must be positive"));
            }
            if solver.tolerance.is_some_and(|t| !(t > 0.0 && t.is_finite())) {
                return Err(CliError::config("`solver.tolerance` must be positive"));
            }
        }
        if let Some(v) = &self.verify {
            if v.samples == Some(0) {
                return Err(CliError::config("`verify.samples` must be positive"));
            }
        }
        Ok(())
    }

    pub fn solver_options(&self, seed: u64) -> SolverOptions {
        let mut options = SolverOptions { seed_offset: seed, ..SolverOptions::default() };
        if let Some(s) = &self.solver {
            if let Some(n) = s.seeds {
                options.seeds = n;
            }
            if let Some(n) = s.max_iterations {
                options.max_iterations = n;
            }
            if let Some(t) = s.tolerance {
                options.tolerance = t;
            }
            if s.gauge == Some(GaugeSpec::None) {
                options.gauge = Gauge::None;
            }
        }
        options
    }

    /// Output format: the config, then the `--out` extension, then the
    /// command's default.
    pub fn format(&self, command: Command, out: Option<&Path>) -> Format {
        if let Some(f) = self.output.as_ref().and_then(|o| o.format) {
            return f;
        }
        match out.and_then(|p| p.extension()).and_then(|e| e.to_str()) {
            Some("json") => Format::Json,
            Some("csv") => Format::Csv,
            _ => command.default_format(),
        }
    }

    pub fn output_path(&self) -> Option<&Path> {
        self.output.as_ref().and_then(|o| o.path.as_deref())
    }
}
