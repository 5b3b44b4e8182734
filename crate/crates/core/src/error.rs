use thiserror::Error;

/// Errors raised anywhere in the simulator and estimator stack.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is not unitary (max deviation {0:.3e})")]
    NonUnitary(f64),
    #[error("unknown qubit label `{0}`")]
    UnknownLabel(String),
    #[error("duplicate qubit label `{0}`")]
    DuplicateLabel(String),
    #[error("register of {0} qubits exceeds the {max}-qubit cap", max = crate::qcore::MAX_QUBITS)]
    TooManyQubits(usize),
    #[error("Kraus operators are not complete (max deviation {0:.3e})")]
    IncompleteKraus(f64),
    #[error("projectors do not form a complete orthogonal set (max deviation {0:.3e})")]
    IncompleteProjectors(f64),
    #[error("invalid density matrix: {0}")]
    InvalidState(String),
    #[error("empty subsystem selection")]
    EmptySelection,
    #[error("parameter `{name}` out of range: {detail}")]
    Parameter { name: String, detail: String },
    #[error("target unreachable: {0}")]
    Unreachable(String),
    #[error("circuit violation at op {index}: {reason}")]
    Circuit { index: usize, reason: String },
    #[error("circuit parse error on line {line}: {reason}")]
    CircuitParse { line: usize, reason: String },
    #[error("estimator input rejected: {0}")]
    Estimator(String),
    #[error("config error at `{path}`: {reason}")]
    Config { path: String, reason: String },
    #[error("{stage}: {source}")]
    Stage {
        stage: String,
        #[source]
        source: Box<Error>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(name: &str, detail: impl Into<String>) -> Self {
        Error::Parameter {
            name: name.to_owned(),
            detail: detail.into(),
        }
    }

    /// Wrap an error with the name of the experiment stage that produced it.
    pub fn at_stage(self, stage: &str) -> Self {
        Error::Stage {
            stage: stage.to_owned(),
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
