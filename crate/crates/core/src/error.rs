use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("{0} is not square-free")]
    NotSquareFree(u64),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("range error: requested {requested} terms, at most {available} are valid")]
    Range { requested: usize, available: usize },

    #[error("block is not periodic mod {period}: entry {index} differs from entry {reference}")]
    PeriodicityViolation {
        period: u64,
        /// 1-based index n of the first a(dn^2) that breaks periodicity.
        index: usize,
        reference: usize,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("pole of {function} at {location}")]
    Pole { function: &'static str, location: String },

    #[error("character mod {modulus} is not primitive (conductor {conductor})")]
    Imprimitive { modulus: u64, conductor: u64 },

    #[error("parity violation: {0}")]
    Parity(String),

    #[error("coefficient series is identically zero on range")]
    ZeroSeries,

    #[error("growth bound |B(n)| <= {c} n^{lambda} fails at n = {n}")]
    GrowthBound { c: f64, lambda: f64, n: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
        Error::Parse {
            line,
            message: e.to_string(),
        }
    }
}
