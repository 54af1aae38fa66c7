use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max |A - A^dagger| = {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("zero vector cannot be normalized")]
    ZeroNorm,
    #[error("operator is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },
    #[error("trace {trace:.12} differs from 1")]
    TraceNotOne { trace: f64 },
    #[error("matrix is not unitary (max |U^dagger U - I| = {deviation:.3e})")]
    NotUnitary { deviation: f64 },
    #[error("basis is not trace-orthonormal (max deviation {deviation:.3e})")]
    NonOrthogonalBasis { deviation: f64 },
    #[error("basis has {got} elements, expected {expected} to span u({n})")]
    IncompleteBasis { n: usize, expected: usize, got: usize },
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("point is not interior: {0}")]
    NotInterior(String),
    #[error("grid error: {0}")]
    Grid(String),
    #[error("eigendecomposition did not converge")]
    NoConvergence,
}

pub type Result<T> = std::result::Result<T, Error>;
