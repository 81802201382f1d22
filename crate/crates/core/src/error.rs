use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("polytope is unbounded in direction {0:?}")]
    Unbounded(Vec<f64>),
    #[error("body has empty interior")]
    DegenerateDimension,
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("enumeration budget exceeded: {cells} cells > {budget}")]
    TooLarge { cells: u128, budget: u128 },
    #[error("point is not in S: {0}")]
    PointNotInS(String),
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    #[error("lift infeasible: u = {0:?} lies outside the projection")]
    LiftInfeasible(Vec<f64>),
    #[error("rounded point {0:?} left the rounding cube")]
    RoundingOutOfRange(Vec<f64>),
    #[error("matrix is not unimodular (det = {0})")]
    NotUnimodular(i128),
    #[error("parameter out of domain: {0}")]
    ParameterDomain(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("linear program failed: {0}")]
    Lp(String),
}
