use thiserror::Error;

/// Errors raised by the simulator, circuit builders and experiment drivers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("capacity error: {n_qubits} qubits requested, supported range is 1..={max}")]
    Capacity { n_qubits: usize, max: usize },

    #[error("qubit index {index} out of range for a {n_qubits}-qubit register")]
    QubitIndex { index: usize, n_qubits: usize },

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("parameter length mismatch: expected {expected}, got {actual}")]
    ParamLength { expected: usize, actual: usize },

    #[error("observable must act on at least one qubit")]
    EmptyObservable,

    #[error("shot count must be at least 1")]
    ZeroShots,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Process exit status used by the command-line front end.
    ///
    /// 2 = configuration, 3 = resource/capacity, 4 = internal numerical error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidArgument(_) => 2,
            Error::Capacity { .. } | Error::Io(_) => 3,
            _ => 4,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
