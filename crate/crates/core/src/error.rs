use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{value} exceeds the supported bound {cap}")]
    TooLarge { value: u64, cap: u64 },

    #[error("{0} is not a unit of Z[1/{1}]")]
    NotAUnit(String, u64),

    #[error("{value} does not lie in Z[1/{modulus}]")]
    Domain { value: String, modulus: u64 },

    #[error("operands live in Z[1/{0}] and Z[1/{1}]")]
    ContextMismatch(u64, u64),

    #[error("factors {0} and {1} are not coprime; only pairwise coprime factor lists are supported")]
    NotCoprime(u64, u64),

    #[error("elements belong to different groups")]
    SpecMismatch,

    #[error("index {index} out of range for {len} factors")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("group {0} is not of the form Gamma_n (every factor an even prime power)")]
    NotGammaN(String),

    #[error("cannot parse {input:?}: {reason}")]
    Parse { input: String, reason: String },

    #[error("vertices belong to different trees (T^{0} and T^{1})")]
    TreeMismatch(u64, u64),

    #[error("malformed path: {0}")]
    MalformedPath(String),

    #[error("resource cap exceeded: {0}")]
    CapExceeded(String),

    #[error("i/o: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}
