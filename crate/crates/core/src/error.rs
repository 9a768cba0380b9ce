use thiserror::Error;

/// Errors raised by geometric constructions, transforms and analysis.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension {0} is outside the supported range 3..=6")]
    UnsupportedDimension(usize),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("event coincides with the cone vertex")]
    VertexCoincidence,
    #[error("time component of a null difference vanishes")]
    TimeComponentVanishes,
    #[error("events are not coherent")]
    NotCoherent,
    #[error("vector is not null")]
    NotNull,
    #[error("inputs are collinear")]
    Collinear,
    #[error("no transversal coherent point found")]
    NoTransversal,
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("invalid axis or plane index")]
    BadAxis,
    #[error("matrix is singular")]
    Singular,
    #[error("matrix is not a rank-one Hermitian projection")]
    NotProjection,
    #[error("samples are rank deficient")]
    DegenerateSamples,
    #[error("epsilon {0} must lie in (0, 0.25)")]
    EpsilonTooLarge(f64),
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("map is constant along the probed coherent line")]
    LineCollapse,
    #[error("vertex fit did not converge from any start")]
    NoConvergence,
    #[error("event is outside the map's finite domain")]
    OutsideDomain,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
