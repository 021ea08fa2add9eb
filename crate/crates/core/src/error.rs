use thiserror::Error;

/// Errors produced while building meshes, assembling or solving.
#[derive(Debug, Error)]
pub enum Error {
    #[error("triangle {0} is degenerate (vertices are collinear)")]
    DegenerateTriangle(usize),

    #[error("triangle {triangle} references vertex {vertex}, but the mesh has {count} vertices")]
    VertexOutOfRange {
        triangle: usize,
        vertex: usize,
        count: usize,
    },

    #[error("triangle {0} repeats a vertex")]
    RepeatedVertex(usize),

    #[error("mesh is not conforming: edge ({0}, {1}) is shared by more than two triangles")]
    NonConforming(usize, usize),

    #[error("invalid penalty configuration: {0}")]
    InvalidPenalty(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("system matrix is not positive definite on the interior dofs (choose a > 1): {0}")]
    NotPositiveDefinite(String),

    #[error("conjugate gradients did not converge after {iterations} iterations (relative residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("eigenvalue iteration did not converge after {iterations} solves (relative residual {residual:e})")]
    EigenNoConvergence { iterations: usize, residual: f64 },

    #[error("cannot evaluate the singular solution at the reentrant corner")]
    SingularPoint,

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("level {level}: {source}")]
    AtLevel {
        level: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
