//! Criteria-constrained committee elections.
//!
//! An election runs in two phases. Voters first accept or reject
//! representation criteria (seat bounds per gender, age band, region, ...),
//! then approve up to `S` candidates each. Counting picks the size-k
//! committee with the most votes among those meeting every accepted
//! criterion, exactly and deterministically.
//!
//! Modules follow the pipeline: [`criteria_vote`] and [`tally`] count the two
//! phases, [`solver`] selects the committee, [`explain`] turns the outcome
//! into reports, and [`ledger`] publishes and re-verifies the count.

pub mod check;
pub mod criteria_vote;
pub mod error;
pub mod explain;
pub mod io;
pub mod ledger;
pub mod lp;
pub mod model;
pub mod monthey;
pub mod random;
pub mod solver;
pub mod tally;
pub mod whatif;

pub use error::{Error, Result};
