use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("unknown variable `{name}` at position {pos}")]
    UnknownVariable { name: String, pos: usize },

    #[error("invalid exponent at position {pos}: {msg}")]
    InvalidExponent { pos: usize, msg: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("variable subset must be nonempty")]
    EmptySubset,

    #[error("the zero polynomial has no Newton polyhedron")]
    ZeroPolynomial,

    #[error("polynomial must be nonconstant: {0}")]
    ConstantPolynomial(String),

    #[error("normal vector must be nonzero")]
    ZeroNormal,

    #[error("face does not belong to the Newton polyhedron of this polynomial")]
    FaceMismatch,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("no feasible grid point found in the search box")]
    NoFeasiblePoint,

    #[error("inconsistent result: {0}")]
    Inconsistent(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
