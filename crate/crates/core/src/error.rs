use thiserror::Error;

/// Errors raised by every module of the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid character label `{0}` (expected N:index with gcd(index, N) = 1)")]
    Label(String),

    #[error("character {label} is not primitive (conductor {conductor})")]
    NotPrimitive { label: String, conductor: u64 },

    #[error("weight {k} has parity {k_parity} but the character has parity {eta_parity}")]
    Parity { k: i64, k_parity: u8, eta_parity: u8 },

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error("unsupported place p = {p}: {reason}")]
    UnsupportedPlace { p: u64, reason: String },

    #[error("uncertified result: {0}")]
    Uncertified(String),

    #[error("undecided at depth {depth}; increase the depth")]
    DepthExceeded { depth: u32 },
}

/// Coarse classification used to map errors onto process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Domain,
    Unsupported,
    Uncertified,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::UnsupportedPlace { .. } => ErrorKind::Unsupported,
            Error::Uncertified(_) | Error::DepthExceeded { .. } => ErrorKind::Uncertified,
            _ => ErrorKind::Domain,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind() {
            ErrorKind::Domain => 2,
            ErrorKind::Unsupported => 3,
            ErrorKind::Uncertified => 4,
        }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
