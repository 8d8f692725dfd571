//! Crate-wide error type.

use thiserror::Error;

/// Errors reported by the spectral machinery and solvers.
#[derive(Debug, Error)]
pub enum Error {
    /// Geometry needs `n >= 3` so the Gegenbauer index `(n - 2) / 2` is positive.
    #[error("ambient dimension must satisfy n >= 3, got n = {0}")]
    InvalidDimension(u32),

    /// Quadrature rules need at least one node.
    #[error("quadrature rule needs at least one node, got m = 0")]
    EmptyRule,

    /// The eigendecomposition behind a Gauss rule did not converge.
    #[error("symmetric eigendecomposition failed while building a {0}-node rule")]
    EigenFailure(usize),

    /// Analysis of nodal data onto `L + 1` modes needs `m >= L + 1` nodes.
    #[error("truncation L = {l} needs at least {} nodes, rule has m = {m}", l + 1)]
    TruncationTooLarge { l: usize, m: usize },

    /// A nodal data vector did not match the rule it was paired with.
    #[error("expected {expected} nodal values to match the rule, got {got}")]
    NodeCountMismatch { expected: usize, got: usize },

    /// Two boundary functions (or a function and a rule) live on different spheres.
    #[error("dimension mismatch: operands live on S^{} and S^{}", .0 - 1, .1 - 1)]
    DimensionMismatch(u32, u32),

    /// Problem parameters must satisfy `a > 0` and `q > 1`.
    #[error("invalid problem parameters: need a > 0 and q > 1, got a = {a}, q = {q}")]
    InvalidParameters { a: f64, q: f64 },

    /// The exponent exceeds the critical trace exponent `n / (n - 2)`.
    #[error("exponent q = {q} exceeds the critical exponent {q_crit} for n = {n}")]
    SupercriticalExponent { q: f64, q_crit: f64, n: u32 },

    /// A coordinate was outside the closed unit ball / half-space domain.
    #[error("point outside the admissible domain: {0}")]
    PointOutOfDomain(String),

    /// Fractional powers of nonpositive nodal values are refused rather than
    /// clamped, so an escape from the positive cone is never masked.
    #[error("nonpositive nodal value {value:.3e} at node {index} under non-integer exponent {exponent}")]
    NonPositiveNodalValue {
        index: usize,
        value: f64,
        exponent: f64,
    },

    /// Newton hit a (numerically) singular Jacobian.
    #[error("singular Jacobian at iteration {iteration} (smallest singular value {sigma_min:.3e})")]
    SingularJacobian { iteration: usize, sigma_min: f64 },

    /// The positivity-preserving line search ran out of halvings.
    #[error("line search failed after {halvings} halvings at iteration {iteration}: {reason}")]
    LineSearchFailed {
        iteration: usize,
        halvings: u32,
        reason: String,
    },

    /// A bracketing root search was handed a bracket without a sign change.
    #[error("no sign change on bracket [{lo}, {hi}]: f(lo) = {f_lo:.3e}, f(hi) = {f_hi:.3e}")]
    NoSignChange {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    /// Continuation could not advance even with the minimal step.
    #[error("continuation stalled: last successful a = {last_a}, failed to reach a = {failed_a}")]
    ContinuationStalled { last_a: f64, failed_a: f64 },

    /// The family parameter `s` must lie in `[0, 1)`.
    #[error("family parameter s = {0} outside [0, 1)")]
    InvalidFamilyParameter(f64),

    /// Asymptotic least-squares fit was too ill-conditioned to trust.
    #[error("ill-conditioned asymptotic fit: {0}")]
    IllConditionedFit(String),

    /// Not enough samples/radii were supplied to a fit or probe.
    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
