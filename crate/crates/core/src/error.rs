use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on the arguments was violated.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// An evaluation point fell outside the domain of the object.
    #[error("outside domain: {0}")]
    Domain(String),

    /// A linear system was too ill-conditioned to trust.
    #[error("ill-conditioned system (condition estimate {cond:.3e}): {context}")]
    Conditioning { cond: f64, context: String },

    /// The LSE solver ran out of iterations. Carries the best iterate.
    #[error(
        "solver did not converge in {iterations} iterations \
         (worst Fenchel violation {worst_violation:.3e})"
    )]
    NonConvergence {
        iterations: usize,
        worst_violation: f64,
        best: Box<crate::lse::LseFit>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn argument(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
