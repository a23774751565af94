use thiserror::Error;

use crate::instance::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An instance failed validation; carries one entry per violated invariant.
    #[error("invalid instance: {}", format_violations(.0))]
    InvalidInstance(Vec<Violation>),

    /// The optimal response has zero reference probability (or is out of range).
    #[error("degenerate instance: {0}")]
    DegenerateInstance(String),

    /// A constructor or bound was called outside its stated parameter range.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Exhaustive enumeration would visit more ordered draw sequences than the guard allows.
    #[error("enumeration infeasible: {states:.3e} ordered sequences exceed the limit of {limit:.3e}")]
    EnumerationInfeasible { states: f64, limit: f64 },

    /// Not enough data points for the requested report.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// The minimal-budget formula diverges at eps_rm = 0.
    #[error("undefined budget: eps_rm must be positive (the log term diverges at 0)")]
    UndefinedBudget,

    /// A strategy config string did not parse.
    #[error("bad strategy spec `{spec}`: {reason}")]
    BadStrategySpec { spec: String, reason: String },

    /// A trajectory log line was malformed.
    #[error("line {line}: {reason}")]
    Ingest { line: usize, reason: String },

    /// An answer group mixed correct and incorrect trajectories.
    #[error("prompt `{prompt}`: group `{group}` mixes is_correct values")]
    InconsistentCorrectness { prompt: String, group: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

fn format_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
