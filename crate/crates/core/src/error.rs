use thiserror::Error;

/// Broad failure class, used to pick CLI exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    Parse,
    Validation,
    Resource,
    Internal,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Parse => 2,
            ErrorKind::Validation => 3,
            ErrorKind::Resource => 4,
            ErrorKind::Internal => 70,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ErrorKind::Parse => "parse",
            ErrorKind::Validation => "validation",
            ErrorKind::Resource => "resource",
            ErrorKind::Internal => "internal",
        }
    }
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("line {}: {message}", line.map_or("?".to_string(), |l| l.to_string()))]
    Parse { line: Option<usize>, message: String },
    #[error("line {}: unknown vertex `{id}`", line.map_or("?".to_string(), |l| l.to_string()))]
    UnknownVertex { line: Option<usize>, id: String },
    #[error("vertex `{0}` is a sink (emits no edge)")]
    Sink(String),
    #[error("duplicate edge {src} -> {dst} : {label}")]
    DuplicateEdge { src: String, dst: String, label: String },
    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),
    #[error("graph declares no vertices")]
    NoVertices,
    #[error("more than {limit} vertices")]
    TooManyVertices { limit: usize },
    #[error("more than {limit} edges")]
    TooManyEdges { limit: usize },
}

impl GraphError {
    pub fn kind(&self) -> ErrorKind {
        match self {
            GraphError::Parse { .. } | GraphError::UnknownVertex { .. } => ErrorKind::Parse,
            GraphError::Sink(_)
            | GraphError::DuplicateEdge { .. }
            | GraphError::DuplicateVertex(_)
            | GraphError::NoVertices => ErrorKind::Validation,
            GraphError::TooManyVertices { .. } | GraphError::TooManyEdges { .. } => ErrorKind::Resource,
        }
    }
}

/// Errors raised by the analysis stages after a graph has been validated.
#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("every vertex is a source; the accommodating family is {{∅}}")]
    EmptyOmega0,
    #[error("{atoms} atoms exceed the configured budget of {limit}")]
    AtomBudgetExceeded { atoms: usize, limit: usize },
    #[error("subset automaton exceeds {limit} states")]
    StateBudgetExceeded { limit: usize },
    #[error("quotient by {core:?} is not well defined: {detail}")]
    WellDefinednessFailure { core: Vec<String>, detail: String },
    #[error("oracle needs an injective labeling: {0}")]
    OracleInapplicable(String),
    #[error("{0}")]
    Usage(String),
}

impl AnalysisError {
    pub fn kind(&self) -> ErrorKind {
        match self {
            AnalysisError::Graph(g) => g.kind(),
            AnalysisError::EmptyOmega0 | AnalysisError::OracleInapplicable(_) => ErrorKind::Validation,
            AnalysisError::AtomBudgetExceeded { .. } | AnalysisError::StateBudgetExceeded { .. } => ErrorKind::Resource,
            AnalysisError::WellDefinednessFailure { .. } => ErrorKind::Internal,
            AnalysisError::Usage(_) => ErrorKind::Parse,
        }
    }
}

pub type Result<T, E = AnalysisError> = std::result::Result<T, E>;
