use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid argument `{arg}`: {reason}")]
    InvalidArgument { arg: &'static str, reason: String },

    #[error("{what}: size {size} exceeds the cap of {cap}")]
    CapExceeded { what: &'static str, size: usize, cap: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("graph is not bipartite; odd cycle {cycle:?}")]
    NotBipartite { cycle: Vec<usize> },

    #[error("vertex {0} is isolated")]
    IsolatedVertex(usize),

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("weak duality violated: primal {primal} exceeds dual {dual}")]
    WeakDuality { primal: f64, dual: f64 },

    #[error("numerical quality: {0}")]
    Numerical(String),

    #[error("certification failed: {0}")]
    Certification(String),
}
