use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{what} = {value} is outside the supported range {range}")]
    OutOfRange { what: &'static str, value: u64, range: &'static str },

    #[error("{0} is not a prime power")]
    NotPrimePower(u64),

    #[error("no prime congruent to 1 mod {0} found below the search bound")]
    NoSuitablePrime(u64),

    #[error("reconstruction bound of {bound_bits:.1} bits exceeds the {modulus_bits:.1}-bit modulus product; attach more moduli")]
    BoundExceeded { bound_bits: f64, modulus_bits: f64 },

    #[error("float shadow {shadow} disagrees with exact value {exact}")]
    ShadowMismatch { shadow: String, exact: String },

    #[error("value is not a rational number after reduction: {0}")]
    NotRational(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("context mismatch: {0}")]
    ContextMismatch(String),

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}
