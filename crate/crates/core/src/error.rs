use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate polygon: {0}")]
    DegeneratePolygon(String),
    #[error("polygon is not convex at vertex {vertex}")]
    NonConvexInput { vertex: usize },
    #[error("point ({x}, {y}) is {distance:e} away from the boundary")]
    NotOnBoundary { x: f64, y: f64, distance: f64 },
    #[error("configuration is not a half-length parallelogram: {0}")]
    NotHalfLength(String),
    #[error("pivotal configuration")]
    PivotalConfiguration,
    #[error("exceptional configuration ({0})")]
    ExceptionalConfiguration(String),
    #[error("label p{label} sits at a polygon vertex")]
    VertexCoincidence { label: usize },
    #[error("constraint matrix has rank {rank}, expected 8")]
    RankDeficient { rank: usize },
    #[error("objective gradient is not in the row space (residual {residual:e})")]
    GradientNotInRowSpace { residual: f64 },
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
