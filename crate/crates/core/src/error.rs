use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Grid layout cannot be realized (e.g. odd qubit count for a 2D grid).
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid target: {0}")]
    InvalidTarget(String),

    /// Every sampled function value was zero, so there is nothing to normalize.
    #[error("degenerate target: all sampled amplitudes are zero")]
    DegenerateTarget,

    #[error("state vector has length {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("state vector contains non-finite amplitudes")]
    NonFinite,

    #[error("bond index {k} out of range for {bonds} bonds")]
    BondOutOfRange { k: usize, bonds: usize },

    #[error("{n} qubits exceeds the configured maximum of {max}")]
    TooLarge { n: usize, max: usize },

    #[error("qubit index {qubit} out of range for {n} qubits")]
    QubitOutOfRange { qubit: usize, n: usize },

    #[error("two-qubit gate on non-adjacent qubits ({0}, {1})")]
    NonAdjacent(usize, usize),

    #[error("matrix is not orthogonal (deviation {0:.3e})")]
    NotOrthogonal(f64),

    /// Raw unitary gates are still present where only `ry`/`cx` are allowed.
    #[error("circuit contains raw unitary gates; synthesize first")]
    SynthesizeFirst,

    /// Two-qubit decomposition did not reproduce its input.
    #[error("gate synthesis failed (residual {0:.3e})")]
    SynthesisFailed(f64),

    /// Reflections cannot be written with `ry` alone.
    #[error("single-qubit gate has determinant -1 and cannot be expressed with ry")]
    ImproperSingleQubit,

    #[error("invalid ansatz: {0}")]
    InvalidAnsatz(String),

    #[error("parameter vector has length {got}, expected {expected}")]
    ParameterLength { expected: usize, got: usize },

    #[error("loss {0} requires a target state")]
    MissingTarget(&'static str),

    #[error("non-finite loss at iteration {iter} (loss = {loss})")]
    NonFiniteLoss { iter: usize, loss: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    /// A run produced numbers that contradict an identity it must satisfy.
    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("cannot emit an empty report list")]
    EmptyReport,

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
