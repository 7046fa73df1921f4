use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CcsError {
    #[error("tau has no complement")]
    TauComplement,
    #[error("undefined constant `{0}`")]
    UndefinedConstant(String),
    #[error("root constant `{0}` is not defined")]
    MissingRoot(String),
    #[error("unguarded recursion through a static operator at constant `{0}`")]
    UnguardedRecursion(String),
    #[error("max_states must be at least 1")]
    ZeroStateBound,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError { line, column, message: message.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LogicError {
    #[error("formula has free variables: {}", .0.join(", "))]
    FreeVariables(Vec<String>),
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("refusing to evaluate over a truncated LTS")]
    Truncated,
    #[error("cycle label sets must be positive and disjoint")]
    BadCycleSets,
    #[error("label `{0}` is not allowed in a {1} modality")]
    BadModalLabel(String, &'static str),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimulationError {
    #[error("refusing to decide simulation over a truncated LTS")]
    Truncated,
    #[error(transparent)]
    Ccs(#[from] CcsError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AbstractionError {
    #[error("path does not resolve: {0}")]
    BadPath(String),
    #[error("rule {rule} does not match at {target}: {reason}")]
    Mismatch { rule: &'static str, target: String, reason: String },
    #[error("side condition of {rule} fails: {reason}")]
    SideCondition { rule: &'static str, reason: String },
    #[error("rule {rule}: {reason}")]
    BadParams { rule: &'static str, reason: String },
    #[error(transparent)]
    Ccs(#[from] CcsError),
}
