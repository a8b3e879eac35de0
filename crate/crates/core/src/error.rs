use thiserror::Error;

/// Errors raised by the numeric core and the verification harness.
///
/// Magnitudes are carried as `f64` regardless of the scalar type in use.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty linear combination")]
    EmptyCombination,
    #[error("invalid series: {0}")]
    InvalidSeries(String),
    #[error("degenerate division: |denominator(0)| = {0:e}")]
    DegenerateDivision(f64),
    #[error("branch risk: power base constant term {re} + {im}i is not 1")]
    BranchRisk { re: f64, im: f64 },
    #[error("point |z| = {modulus} outside the domain [{lower}, {upper}]")]
    Domain { modulus: f64, lower: f64, upper: f64 },
    #[error("not a Schwarz function: {0}")]
    NotSchwarz(String),
    #[error("invalid operator parameters: alpha = {alpha}, beta = {beta}")]
    InvalidParams { alpha: f64, beta: f64 },
    #[error("quadrature oracle unstable: estimated error {0:e}")]
    OracleUnstable(f64),
    #[error("curve passes within {distance:e} of the test point")]
    TooClose { distance: f64 },
    #[error("degenerate derivative: |s'| = {0:e}")]
    DegenerateDerivative(f64),
    #[error("degenerate base expression: {0}")]
    DegenerateBase(String),
    #[error("invalid dominant specification: {0}")]
    Spec(String),
    #[error("usage: {0}")]
    Usage(String),
    #[error("random generator rejected {0} consecutive samples")]
    GeneratorStuck(usize),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
