use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid payoffs for type {type_id}: {reason}")]
    InvalidPayoff { type_id: usize, reason: String },

    #[error("signaling scheme violates probability closure for type {type_id}")]
    InvalidScheme { type_id: usize },

    #[error("branch has zero probability mass")]
    ZeroMass,

    #[error("unknown alert type {0}")]
    UnknownType(usize),

    #[error("malformed linear program: {0}")]
    MalformedProgram(String),

    #[error("simplex exceeded the pivot limit of {limit}")]
    CycleLimit { limit: usize },

    #[error("no candidate best-response type admits a feasible strategy")]
    NoFeasibleType,

    #[error("solver returned an unbounded program")]
    Unbounded,

    #[error("degenerate denominator in the zero-silent-audit condition")]
    DegenerateDenominator,

    #[error("historical log contains no cycles")]
    EmptyHistory,

    #[error("bucket width {0}s does not evenly divide a cycle")]
    InvalidBucketWidth(u32),

    #[error("alert at {timestamp}s arrived before the cycle clock {clock}s")]
    OutOfOrderAlert { timestamp: u32, clock: u32 },

    #[error("timestamp {0}s is outside the audit cycle")]
    TimestampOutOfRange(u32),

    #[error("oracle supports at most {max} types, got {got}")]
    TooManyTypes { max: usize, got: usize },

    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
