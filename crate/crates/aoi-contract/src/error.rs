//! Error taxonomy shared across the crate.
//!
//! Errors are split by how a caller should react:
//!
//! * [`Error::Domain`] — a parameter or argument is outside the model's
//!   domain (non-positive duration, decreasing type grid, an update cycle
//!   no longer than the idle tail, ...). These are caller bugs or bad
//!   configuration and carry the offending quantity in the message.
//! * [`Error::NonpositivePerformance`] — the satisfaction argument
//!   `g = α(K − Ā) + (1 − α)(H − D̄)` came out at or below zero, so the
//!   logarithmic satisfaction is undefined at that operating point. Solvers
//!   treat this as "candidate excluded", not as a failure.
//! * [`Error::Infeasible`] — an optimization has no admissible point at all
//!   (for example every grid frequency drives performance non-positive).
//! * [`Error::Config`] — a scenario file or override could not be parsed or
//!   refers to unknown keys; carries the key path when known.
//! * [`Error::Numeric`] — a computation produced a non-finite value where a
//!   finite one is guaranteed by the model. Indicates a genuine numeric
//!   breakdown rather than a modelling choice.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// All failure modes surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A value lies outside the mathematical domain of the model.
    #[error("domain error in {what}: {details}")]
    Domain {
        /// Which quantity or operation was violated.
        what: &'static str,
        /// Human-readable description including the offending values.
        details: String,
    },

    /// The satisfaction argument `g` was zero or negative, so `β·ln(g)`
    /// does not exist at the requested operating point.
    #[error("nonpositive performance: g = {g} (satisfaction β·ln(g) undefined)")]
    NonpositivePerformance {
        /// The offending value of `g`.
        g: f64,
    },

    /// No admissible solution exists for the requested optimization.
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// A scenario configuration could not be loaded or applied.
    #[error("config error at `{path}`: {message}")]
    Config {
        /// Dotted key path of the offending entry, or `<root>`.
        path: String,
        /// What went wrong.
        message: String,
    },

    /// A computation produced NaN or infinity where the model guarantees a
    /// finite value.
    #[error("numeric error: {0}")]
    Numeric(String),
}

impl Error {
    /// Convenience constructor for [`Error::Domain`].
    pub fn domain(what: &'static str, details: impl Into<String>) -> Self {
        Error::Domain {
            what,
            details: details.into(),
        }
    }

    /// Convenience constructor for [`Error::Config`].
    pub fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }
}
