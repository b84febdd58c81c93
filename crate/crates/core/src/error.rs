//! Error type shared by all modules.

use core::fmt;

/// Everything that can go wrong in this crate.
///
/// Non-convergence of the solver is NOT an error; it is reported through
/// `SolveResult::converged`. Errors are reserved for violated preconditions
/// and numerical breakdown.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A precondition on an argument was violated.
    InvalidArgument(&'static str),
    /// An integrand or sample evaluated to a non-finite value.
    NonFinite {
        /// Which quantity blew up.
        what: &'static str,
        /// Radius at which it happened.
        at: f64,
    },
    /// Gram matrix lost positive definiteness during orthonormalization.
    IllConditionedBasis {
        /// Index of the basis function whose pivot collapsed.
        pivot: usize,
    },
    /// Line search could not find an acceptable step above the step floor.
    StalledSolver {
        /// Iteration at which the search stalled.
        iteration: usize,
    },
    /// Peak bound is undefined because beta + m^2/R^2 = 0.
    DegenerateBound,
    /// Ratio check applied to the zero profile.
    UndefinedRatio,
    /// Too few tail points above the noise floor for a decay fit.
    InsufficientTail {
        /// Number of usable points found (fewer than the required 8).
        usable: usize,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::NonFinite { what, at } => {
                write!(f, "non-finite {what} at r = {at}")
            }
            Error::IllConditionedBasis { pivot } => {
                write!(f, "basis ill-conditioned: pivot {pivot} collapsed")
            }
            Error::StalledSolver { iteration } => {
                write!(f, "line search stalled at iteration {iteration}")
            }
            Error::DegenerateBound => write!(f, "peak bound degenerate: beta + m^2/R^2 = 0"),
            Error::UndefinedRatio => write!(f, "ratio undefined for the zero profile"),
            Error::InsufficientTail { usable } => {
                write!(f, "decay fit needs 8 tail points, found {usable}")
            }
        }
    }
}

impl core::error::Error for Error {}

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;
