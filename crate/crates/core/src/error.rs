use thiserror::Error;

use crate::circuit::GateKind;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid gate: {0}")]
    InvalidGate(String),
    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),
    #[error("parameter count mismatch: expected {expected}, got {got}")]
    ParamCountMismatch { expected: usize, got: usize },
    #[error("unbound symbol {0}")]
    UnboundSymbol(usize),
    #[error("invalid ansatz shape: n={n}, reps={reps} (need n >= 2, reps >= 1)")]
    InvalidAnsatzShape { n: usize, reps: usize },
    #[error("unknown ansatz '{0}'")]
    UnknownAnsatz(String),
    #[error("invalid backend: {0}")]
    InvalidBackend(String),
    #[error("self-loop on qubit {0}")]
    SelfLoop(usize),
    #[error("disconnected coupling graph")]
    Disconnected,
    #[error("circuit does not fit backend: {logical} logical qubits, {physical} physical")]
    DoesNotFit { logical: usize, physical: usize },
    #[error("unsupported gate kind {0}")]
    UnsupportedGate(GateKind),
    #[error("qubit index {index} out of range for {num_qubits} qubits")]
    QubitOutOfRange { index: usize, num_qubits: usize },
    #[error("too many qubits to simulate: {active} active (limit {limit})")]
    TooManyQubits { active: usize, limit: usize },
    #[error("need at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("incomplete heatmap grid, missing cells (n, reps): {0:?}")]
    IncompleteGrid(Vec<(usize, usize)>),
    #[error("invalid config: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse {
            line: e.line(),
            msg: e.to_string(),
        }
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
