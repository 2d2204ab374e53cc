use thiserror::Error;

/// Errors produced by the arithmetic, potential-theoretic and dynamical routines.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("zero polynomial is not allowed here")]
    ZeroPolynomial,
    #[error("zero value has no logarithm")]
    ZeroValue,
    #[error("polynomial is not squarefree (zero discriminant)")]
    NotSquarefree,
    #[error("degree {0} too small for this operation")]
    DegreeTooSmall(usize),
    #[error("root finder did not converge: best inclusion radius {best_bound:e} after {iterations} iterations")]
    RootsNotConverged { best_bound: f64, iterations: usize },
    #[error("quadrature did not reach tolerance (estimated error {0:e})")]
    Quadrature(f64),
    #[error("supports of the two sets overlap")]
    OverlappingSupports,
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    #[error("points live over different primes ({0} and {1})")]
    PrimeMismatch(u64, u64),
    #[error("measure is not admissible: {0}")]
    InvalidMeasure(String),
    #[error("configuration outside the admissible domain: {0}")]
    Inadmissible(String),
    #[error("tree function is not affine along an edge")]
    NonAffine,
    #[error("atom does not lie on the tree")]
    NotOnTree,
    #[error("work budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("tolerance {tol:e} not reached within depth {depth}")]
    DepthExceeded { tol: f64, depth: usize },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
