use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid cone: {0}")]
    InvalidCone(String),

    #[error("invalid direction set: {0}")]
    InvalidDirectionSet(String),

    /// The feasibility tableau could not be pivoted reliably, or the witness it
    /// produced failed the residual re-check.
    #[error("ill-conditioned feasibility tableau: {0}")]
    IllConditioned(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Downward bracketing of a scalarization never became infeasible.
    #[error("separation margin below resolution (t reached {t:e} and was still feasible)")]
    SeparationBelowResolution { t: f64 },

    #[error("invalid partial order: {0}")]
    InvalidPoset(String),

    #[error("functional is not monotone: {lower} precedes {upper} but eta({lower}) > eta({upper})")]
    NonMonotone { lower: usize, upper: usize },

    #[error("condition (A) fails: the minimum of eta over the section of {x0} is not finite")]
    ConditionA { x0: usize },

    #[error("antisymmetry violated: points {0} and {1} dominate each other")]
    Antisymmetry(usize, usize),

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("invalid problem: {0}")]
    InvalidProblem(String),
}

impl Error {
    /// Errors that point at tolerance or numerical trouble rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(
            self,
            Error::IllConditioned(_)
                | Error::SeparationBelowResolution { .. }
                | Error::Antisymmetry(..)
                | Error::Invariant(_)
        )
    }
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
