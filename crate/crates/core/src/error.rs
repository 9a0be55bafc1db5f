use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is not Hermitian (defect {0:.3e})")]
    NotHermitian(f64),
    #[error("invalid Gell-Mann label {0}")]
    InvalidLabel(String),
    #[error("degenerate eigenvalue: {0}")]
    Degenerate(String),
    #[error("basis check failed: {0}")]
    BasisCheck(String),
    #[error("not a witness: {0}")]
    NotAWitness(String),
    #[error("decomposition check failed: residual {residual:.3e}, min eigenvalue {min_eig:.3e}")]
    Decomposition { residual: f64, min_eig: f64 },
    #[error("points are affinely dependent at index {0}")]
    AffinelyDependent(usize),
    #[error("need exactly {expected} points, got {got}")]
    PointCount { expected: usize, got: usize },
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("no convergence: {0}")]
    NonConvergence(String),
    #[error("cycle detected after {0} iterations")]
    Cycle(usize),
    #[error("orbit exceeded {0} elements")]
    OrbitTooLarge(usize),
}
