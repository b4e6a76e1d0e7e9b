use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the estimation, fitting and interval routines.
///
/// The enum is `Clone` so a cached GLD fit failure can be handed to every
/// method that asks for the fit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid bracket: f({lo}) = {f_lo} and f({hi}) = {f_hi} do not differ in sign")]
    InvalidBracket {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("invalid GLD parameters: {0}")]
    InvalidParams(String),

    #[error("empty data")]
    EmptyData,

    #[error("non-finite value {value} at position {index}")]
    NonFiniteData { index: usize, value: f64 },

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("too few observations: need at least {min}, got {n}")]
    TooFewObservations { n: usize, min: usize },

    #[error("data required for the {0} bandwidth rule")]
    DataRequired(&'static str),

    #[error("non-positive data: {0}")]
    NonPositiveData(String),

    #[error("zero density estimate: {0}")]
    ZeroDensity(String),

    #[error("GLD fit failed: {0}")]
    FitFailure(String),

    #[error("degenerate beta parameters ({a}, {b})")]
    DegenerateBeta { a: f64, b: f64 },

    #[error("method {0} cannot be used here: {1}")]
    IncompatibleMethod(String, String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("data file line {line}: {message}")]
    DataLine { line: usize, message: String },

    #[error("invalid experiment spec at {path}: {message}")]
    Spec { path: String, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn check_probability(name: &str, u: f64) -> Result<()> {
    if u > 0.0 && u < 1.0 {
        Ok(())
    } else {
        Err(domain(format!("{name} = {u} is outside (0, 1)")))
    }
}
