use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// Errors raised by the simulation core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// One entry per violated invariant.
    Validation(Vec<String>),
    /// Argument outside the domain of a scalar function.
    Domain(String),
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    IndexOutOfRange { index: usize, n_sites: usize },
    /// The correlated rate matrix at `omega` has an eigenvalue below the clamp threshold.
    NonPositiveRates { omega: f64, eigenvalue: f64 },
    /// A jump channel with a negative or non-finite rate was passed to assembly.
    InvalidRate { index: usize, rate: f64 },
    /// Spatial correlations requested but the network carries no geometry.
    MissingGeometry,
    NoDecayPath,
    StepSizeUnderflow { t: f64, h: f64 },
    /// A trajectory sample violated a density-matrix invariant.
    InvalidState { t: f64, detail: String },
    InvalidPartition {
        missing: Vec<(usize, usize)>,
        duplicated: Vec<(usize, usize)>,
        out_of_range: Vec<(usize, usize)>,
    },
    UndefinedAverage { quantum_yield: f64 },
    NotPure { purity: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Validation(problems) => {
                write!(f, "validation failed: ")?;
                for (i, p) in problems.iter().enumerate() {
                    if i > 0 {
                        write!(f, "; ")?;
                    }
                    write!(f, "{p}")?;
                }
                Ok(())
            }
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::DimensionMismatch {
                what,
                expected,
                found,
            } => write!(f, "dimension mismatch in {what}: expected {expected}, found {found}"),
            Error::IndexOutOfRange { index, n_sites } => {
                write!(f, "site index {index} out of range 1..={n_sites}")
            }
            Error::NonPositiveRates { omega, eigenvalue } => write!(
                f,
                "correlated rate matrix at omega = {omega:e} ps^-1 has negative eigenvalue {eigenvalue:e} ps^-1"
            ),
            Error::InvalidRate { index, rate } => {
                write!(f, "jump channel {index} has invalid rate {rate}")
            }
            Error::MissingGeometry => write!(
                f,
                "bath correlation length > 0 needs site positions or a distance matrix"
            ),
            Error::NoDecayPath => write!(
                f,
                "excited-subspace generator is singular: no decay path; give every site a nonzero gamma or a path to a kappa site"
            ),
            Error::StepSizeUnderflow { t, h } => {
                write!(f, "step size underflow at t = {t} ps (h = {h:e} ps)")
            }
            Error::InvalidState { t, detail } => {
                write!(f, "invalid density matrix at t = {t} ps: {detail}")
            }
            Error::InvalidPartition {
                missing,
                duplicated,
                out_of_range,
            } => write!(
                f,
                "invalid pair partition: missing {missing:?}, duplicated {duplicated:?}, out of range {out_of_range:?}"
            ),
            Error::UndefinedAverage { quantum_yield } => write!(
                f,
                "entanglement yield undefined: quantum yield {quantum_yield:e} is below 1e-12"
            ),
            Error::NotPure { purity } => {
                write!(f, "state is not pure (purity {purity}); mixed-state one-tangle is not supported")
            }
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
