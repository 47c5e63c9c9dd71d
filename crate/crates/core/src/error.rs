use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("infeasible input: {0}")]
    Infeasible(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("quadrature budget exhausted: requested abs tol {tol}, reached {reached}")]
    QuadratureBudget { tol: f64, reached: f64 },
}

pub type Result<T> = std::result::Result<T, CoreError>;
