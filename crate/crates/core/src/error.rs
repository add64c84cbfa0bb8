use thiserror::Error;

/// Errors raised while building meshes, assembling or solving systems.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SwgError {
    #[error("{axis} breaks must be strictly increasing (violation at index {index})")]
    NonMonotoneBreaks { axis: char, index: usize },

    #[error("{axis} breaks need at least 2 points, got {len}")]
    TooFewPoints { axis: char, len: usize },

    #[error("number of subdivisions must be at least 1")]
    ZeroSubdivisions,

    #[error("element ({i}, {j}) outside a {nx}x{ny} mesh")]
    IndexOutOfRange {
        i: usize,
        j: usize,
        nx: usize,
        ny: usize,
    },

    #[error("meshsize must be positive, got {0}")]
    NonPositiveMeshsize(f64),

    #[error("diffusion must be positive, got ({a11}, {a22}) at ({x}, {y})")]
    NonPositiveDiffusion { x: f64, y: f64, a11: f64, a22: f64 },

    #[error("off-diagonal diffusion tensors are not supported")]
    OffDiagonalDiffusion,

    #[error("reaction coefficient must be non-negative, got {0}")]
    NegativeReaction(f64),

    #[error("stabilization parameter must be positive, got {0}")]
    NonPositiveKappa(f64),

    #[error("singular configuration: {0}")]
    SingularConfig(String),

    #[error("unknown problem '{0}' (expected one of tc1, tc2, tc3, fd1, fd2, custom)")]
    UnknownProblem(String),

    #[error("discrete norms are only defined on uniform square meshes")]
    NonUniformMesh,

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid solver configuration: {0}")]
    InvalidSolverConfig(String),

    #[error("matrix is singular: {0}")]
    SingularMatrix(String),

    #[error("iterative solver did not converge after {iterations} iterations (relative residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("relative residual {residual:e} exceeds the accepted bound {bound:e}")]
    ResidualCheckFailed { residual: f64, bound: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

pub type Result<T> = std::result::Result<T, SwgError>;
