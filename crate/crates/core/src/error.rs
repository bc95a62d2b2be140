use thiserror::Error;

use crate::model::Violation;
use crate::solver::Deficit;

#[derive(Debug, Error)]
pub enum Error {
    #[error("category shares sum to {sum}, which exceeds 1")]
    ShareSumExceedsOne { sum: f64 },

    #[error("share for category `{category}` is {fraction}, expected a value in [0, 1]")]
    ShareOutOfRange { category: String, fraction: f64 },

    #[error("unknown question id `{0}`")]
    UnknownQuestionId(String),

    #[error("duplicate question id `{0}`")]
    DuplicateQuestionId(String),

    #[error("ballot `{ballot_id}` answers question `{question_id}` more than once")]
    DuplicateBallot { ballot_id: String, question_id: String },

    #[error("ballot `{ballot_id}` does not answer question `{question_id}`")]
    MissingAnswer { ballot_id: String, question_id: String },

    #[error("unknown candidate `{0}`")]
    UnknownCandidate(String),

    #[error("election config is invalid: {}", summarize(.0))]
    InvalidConfig(Vec<Violation>),

    #[error("roster has {size} candidates; brute force is limited to {limit}")]
    RosterTooLarge { size: usize, limit: usize },

    #[error("search exceeded the node budget of {budget}")]
    NodeBudgetExceeded { budget: u64 },

    #[error("no committee satisfies the criteria ({} deficit(s))", .0.len())]
    Infeasible(Vec<Deficit>),

    #[error("{seats} seats cannot be filled from {roster} candidates, even without criteria")]
    UnsatisfiableEvenEmpty { seats: u32, roster: usize },

    #[error("invalid what-if edit: {0}")]
    InvalidEdit(String),

    #[error("{context}: {message}")]
    Parse { context: String, message: String },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn summarize(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| v.message.as_str())
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
