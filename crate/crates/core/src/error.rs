//! Crate-wide error type. Every fallible operation returns a dedicated
//! variant carrying the values that made it fail.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("invalid grid: dim={dim}, N={n}, L={len}: {reason}")]
    InvalidGrid { dim: usize, n: usize, len: f64, reason: &'static str },

    #[error("grid mismatch: left (dim={0}, N={1}, L={2}) vs right (dim={3}, N={4}, L={5})")]
    GridMismatch(usize, usize, f64, usize, usize, f64),

    #[error("Hermitian symmetry violated: defect {defect:.3e} exceeds {tol:.3e} (relative)")]
    SymmetryViolation { defect: f64, tol: f64 },

    #[error("multiplier '{name}' is not finite at lattice frequency |omega|^2 = {omega_sq}")]
    NonFiniteSymbol { name: String, omega_sq: f64 },

    #[error("multiplier '{name}' is not even on the lattice: |s(w) - s(-w)| = {defect:.3e}")]
    UnevenSymbol { name: String, defect: f64 },

    #[error("block index {j} outside [-1, {j_max}]")]
    BlockOutOfRange { j: i32, j_max: i32 },

    #[error("unsupported Besov exponent pair (p, q) = ({p}, {q}); supported: (2,2) and (inf,inf)")]
    UnsupportedBesovExponents { p: String, q: String },

    #[error("operation requires dim = {required}, grid has dim = {actual}")]
    DimensionMismatch { required: usize, actual: usize },

    #[error(
        "eigensolver did not converge: {converged} of {requested} pairs at tol {tol:.3e} \
         after {restarts} restarts; best residuals {best_residuals:?}"
    )]
    EigensolverNonConvergence {
        requested: usize,
        converged: usize,
        tol: f64,
        restarts: usize,
        best_residuals: Vec<f64>,
    },

    #[error(
        "resolvent fixed point diverged at a = {a} (update ratio {ratio:.3}); \
         retry with a larger shift, e.g. a = {suggested}"
    )]
    ContractionFailure { a: f64, ratio: f64, suggested: f64 },

    #[error(
        "resolvent residual {residual:.3e} exceeds {allowed:.3e} at a = {a} \
         after {iterations} iterations"
    )]
    ResolventResidual { a: f64, residual: f64, allowed: f64, iterations: usize },

    #[error("zero field where a nonzero field is required: {context}")]
    ZeroField { context: &'static str },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("eigenvalue bracket not found in [{lo}, {hi}] after widening {attempts} times")]
    BracketNotFound { lo: f64, hi: f64, attempts: usize },

    #[error("Riccati substep floor {floor:.3e} reached at x = {x}")]
    SubstepFloor { x: f64, floor: f64 },

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("resource budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("experiment record incomplete: {0}")]
    IncompleteRecord(String),

    #[error("snapshot format error: {0}")]
    SnapshotFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
