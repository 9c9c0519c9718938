use sag_core::Error;

/// A failed command, classified by the exit code it maps to.
#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl Failure {
    pub fn config(msg: impl Into<String>) -> Self {
        Failure::Config(msg.into())
    }

    pub fn data(msg: impl Into<String>) -> Self {
        Failure::Data(msg.into())
    }

    pub fn internal(msg: impl Into<String>) -> Self {
        Failure::Internal(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => 2,
            Failure::Data(_) => 3,
            Failure::Internal(_) => 4,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::InvalidPayoff { .. }
            | Error::InvalidConfig(_)
            | Error::InvalidSpec(_)
            | Error::InvalidBucketWidth(_)
            | Error::TooManyTypes { .. } => Failure::Config(msg),
            Error::EmptyHistory
            | Error::OutOfOrderAlert { .. }
            | Error::TimestampOutOfRange(_)
            | Error::UnknownType(_) => Failure::Data(msg),
            _ => Failure::Internal(msg),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Data(e.to_string())
    }
}
