use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("input of degree {degree} exceeds the operator's stored order {max_order}")]
    DegreeBudgetExceeded { degree: u32, max_order: u32 },

    #[error("action is inconsistent at monomial {alpha:?}")]
    InconsistentAction { alpha: Vec<u32> },

    #[error("expected an algebra element (zero constant term)")]
    NotAlgebraElement,

    #[error("expected a group element (constant term one)")]
    NotGroupElement,

    #[error("degree budget {budget} exceeds operator order {max_order} (or seed degree {seed_degree} exceeds budget)")]
    DegreeBudgetExceedsOperatorOrder {
        seed_degree: u32,
        budget: u32,
        max_order: u32,
    },

    #[error("subspace is not invariant: image of basis vector {index} leaves the span")]
    NotInvariant { index: usize },

    #[error("basis vectors are linearly dependent")]
    DependentBasis,

    #[error("polynomial does not lie in the certified subspace")]
    NotInSubspace,

    #[error("grid point {point:?} lies outside K")]
    GridPointOutsideK { point: Vec<String> },

    #[error("moment order 2d = {needed} exceeds operator order {max_order}")]
    DegreeBudget { needed: u32, max_order: u32 },

    #[error("invalid K: {0}")]
    InvalidK(String),

    #[error("invalid Lévy triplet: {0}")]
    InvalidTriplet(String),

    #[error("negative time {0}")]
    NegativeTime(String),

    #[error("operator is not degree preserving")]
    NotDegreePreserving,

    #[error("invalid atomic functional: {0}")]
    InvalidFunctional(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
