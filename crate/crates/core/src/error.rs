use thiserror::Error;

/// Errors raised by the potential-theory operators.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    #[error("incompatible family: pieces disagree at vertex {vertex}")]
    IncompatibleFamily { vertex: usize },

    #[error("value at vertex {vertex} is infinite; a finite value is required")]
    NotInSort { vertex: usize },

    #[error("not in the positive superharmonic cone: {0}")]
    NotInCone(String),

    #[error("irregular domain: interior vertex {vertex} has no route to the boundary")]
    IrregularDomain { vertex: usize },

    #[error("empty set: {0}")]
    EmptySet(&'static str),

    #[error("sequence is not monotone at step {step}, vertex {vertex}")]
    NotMonotone { step: usize, vertex: usize },

    #[error("no convergence after {iterations} iterations (last change {last_change:e})")]
    Convergence { iterations: usize, last_change: f64 },

    #[error("size cap exceeded: {size} > {cap}")]
    SizeCap { size: usize, cap: usize },

    #[error("no Green function: {0}")]
    NoGreenFunction(String),

    #[error("column {column} is disconnected from the base point")]
    DisconnectedFromBase { column: usize },

    #[error("function is not representable by the boundary kernels (residual {residual:e})")]
    NotRepresentable { residual: f64 },

    #[error("unsupported resolution {0}; expected one of 16, 32, 64, 128")]
    UnsupportedResolution(usize),

    #[error("degenerate regularity test: {0}")]
    DegenerateTest(String),

    #[error("no polar witness: the capacity sequence does not vanish")]
    WitnessUnavailable,

    #[error("thinness undefined: vertex {0} lies in the set")]
    ThinnessUndefined(usize),

    #[error("refinement error: {0}")]
    Refinement(String),

    #[error("schema error at line {line}: {message}")]
    Schema { line: usize, message: String },

    #[error("solver failure: {0}")]
    Solver(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
