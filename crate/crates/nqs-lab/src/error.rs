//! Crate-wide error type.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong across the mean-field, network, Hilbert-space
/// and harness layers.
#[derive(Debug, Error)]
pub enum Error {
    /// A constructor or operation received a parameter outside its domain.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter {
        /// Name of the offending parameter.
        name: &'static str,
        /// Human-readable description of the violation.
        reason: String,
    },

    /// A fixed-point iteration ran out of its iteration budget.
    #[error(
        "fixed-point iteration did not converge after {iters} iterations \
         (last iterate {last:.6e}, residual {residual:.3e})"
    )]
    NonConvergence {
        /// Number of iterations performed.
        iters: usize,
        /// Final iterate when the budget ran out.
        last: f64,
        /// Final step size |x_{n+1} − x_n|.
        residual: f64,
    },

    /// A decay-length fit received a trajectory it cannot fit.
    #[error("decay-length fit rejected the trajectory: {0}")]
    DecayFit(String),

    /// Exact enumeration was requested beyond the guarded system size.
    #[error("{num_spins} spins exceeds the exact-enumeration guard of {max}")]
    SystemTooLarge {
        /// Requested number of spins.
        num_spins: usize,
        /// Largest supported number of spins for this operation.
        max: usize,
    },

    /// Two objects that must agree on a dimension do not.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch {
        /// The dimension required by the receiving object.
        expected: usize,
        /// The dimension actually supplied.
        got: usize,
    },

    /// The shifted sum of exponentials cancelled to zero, so the
    /// log-amplitude has no finite value.
    #[error("amplitude sum cancelled to zero; log-amplitude undefined")]
    AmplitudeCancellation,

    /// A wavefunction with zero norm cannot be normalized.
    #[error("wavefunction has zero norm")]
    ZeroNorm,

    /// An internal consistency check failed (e.g. an expectation value that
    /// must be real came out complex).
    #[error("numerical integrity check failed: {0}")]
    NumericalIntegrity(String),

    /// An ensemble sweep exceeded its failure budget and was abandoned.
    #[error("sweep aborted: {0}")]
    SweepAborted(String),

    /// Configuration file or command-line arguments are invalid.
    #[error("configuration error: {0}")]
    Config(String),

    /// Underlying I/O failure while reading configs or writing results.
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
