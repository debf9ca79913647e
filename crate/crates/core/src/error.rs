use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A Dirac/Pauli index outside `0..4`.
    IndexOutOfRange { p: usize, q: usize },
    /// Input matrix is not Hermitian; `deviation` is `max |H − H†|`.
    NotHermitian { deviation: f64 },
    /// Input matrix has the wrong shape.
    Dimension { expected: usize, found: usize },
    /// A density-state input whose trace is not one.
    NotTraceOne { trace: f64 },
    NonFiniteParameter(&'static str),
    /// A state that was required to be a rank-one projector is not.
    NotPure { residual: f64 },
    /// A state that was required to commute with the Hamiltonian does not.
    NotCommuting { residual: f64 },
    /// Not enough power sums or coefficients for the requested order.
    MissingTerms { needed: usize, available: usize },
    /// The mixing target lies outside the admissible region.
    InadmissibleTarget { reason: String },
    /// Gram rank sits too close to the threshold, or matches several strata.
    AmbiguousStratum { rank: usize, candidates: Vec<Vec<usize>> },
    /// The closed form does not apply to these parameters.
    DegenerateParameters(&'static str),
    /// Weight vector is not a probability vector.
    InvalidWeights,
    /// The multistart solver did not find every expected solution.
    SolverIncomplete { found: usize, expected: usize, residual: f64 },
    /// Two independent evaluation routes disagreed.
    Inconsistent { what: &'static str, deviation: f64 },
    /// A parameter name that the Hamiltonian family does not have.
    UnknownParameter(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::IndexOutOfRange { p, q } => {
                write!(f, "basis index ({p}, {q}) out of range 0..4")
            }
            Error::NotHermitian { deviation } => {
                write!(f, "matrix is not Hermitian (max |H - H^dagger| = {deviation:e})")
            }
            Error::Dimension { expected, found } => {
                write!(f, "expected a {expected}x{expected} matrix, found dimension {found}")
            }
            Error::NotTraceOne { trace } => write!(f, "state has trace {trace}, expected 1"),
            Error::NonFiniteParameter(name) => write!(f, "parameter `{name}` is not finite"),
            Error::NotPure { residual } => {
                write!(f, "state is not a rank-one projector (|rho^2 - rho| = {residual:e})")
            }
            Error::NotCommuting { residual } => {
                write!(f, "state does not commute with the Hamiltonian (residual {residual:e})")
            }
            Error::MissingTerms { needed, available } => {
                write!(f, "need {needed} terms, only {available} supplied")
            }
            Error::InadmissibleTarget { reason } => {
                write!(f, "mixing target is not admissible: {reason}")
            }
            Error::AmbiguousStratum { rank, candidates } => {
                write!(f, "gram rank {rank} does not identify a unique stratum ({} candidates)", candidates.len())
            }
            Error::DegenerateParameters(why) => write!(f, "closed form not applicable: {why}"),
            Error::InvalidWeights => f.write_str("weights must be non-negative and sum to 1"),
            Error::SolverIncomplete { found, expected, residual } => write!(
                f,
                "solver found {found} of {expected} solutions (best failing residual {residual:e})"
            ),
            Error::Inconsistent { what, deviation } => {
                write!(f, "internal consistency failure in {what} (deviation {deviation:e})")
            }
            Error::UnknownParameter(name) => write!(f, "unknown parameter `{name}`"),
        }
    }
}

impl core::error::Error for Error {}
