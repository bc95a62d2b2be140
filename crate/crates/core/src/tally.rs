//! Phase 2 counting under plurality-at-large: each valid ballot gives one vote
//! to every candidate it selects.

use std::collections::BTreeSet;
use std::thread;

use crate::model::{Ballot, ElectionConfig, InvalidReason, Rejection, TallyResult, Votes};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BallotValidity {
    Valid,
    Invalid(InvalidReason),
}

/// An empty selection is a valid abstention. Offending ballots are rejected
/// whole, never truncated.
pub fn validate_ballot(ballot: &Ballot, config: &ElectionConfig) -> BallotValidity {
    if ballot.selections.len() > config.max_selections as usize {
        return BallotValidity::Invalid(InvalidReason::TooManySelections);
    }
    let roster = config.candidate_ids();
    if ballot.selections.iter().any(|id| !roster.contains(id.as_str())) {
        return BallotValidity::Invalid(InvalidReason::UnknownCandidate);
    }
    BallotValidity::Valid
}

#[derive(Default)]
struct Partial {
    votes: Votes,
    counted: u64,
    rejected: Vec<Rejection>,
}

impl Partial {
    fn merge(mut self, other: Partial) -> Partial {
        for (id, n) in other.votes.iter() {
            self.votes.add(id, n);
        }
        self.counted += other.counted;
        self.rejected.extend(other.rejected);
        self
    }
}

fn count_chunk(ballots: &[Ballot], config: &ElectionConfig, roster: &BTreeSet<&str>) -> Partial {
    let mut partial = Partial::default();
    for ballot in ballots {
        let reason = if ballot.selections.len() > config.max_selections as usize {
            Some(InvalidReason::TooManySelections)
        } else if ballot.selections.iter().any(|id| !roster.contains(id.as_str())) {
            Some(InvalidReason::UnknownCandidate)
        } else {
            None
        };
        match reason {
            Some(reason) => partial.rejected.push(Rejection {
                ballot_id: ballot.ballot_id.clone(),
                reason,
            }),
            None => {
                partial.counted += 1;
                for id in &ballot.selections {
                    partial.votes.add(id, 1);
                }
            }
        }
    }
    partial
}

fn finish(partial: Partial, config: &ElectionConfig) -> TallyResult {
    let mut votes = Votes::zeroed(config);
    for (id, n) in partial.votes.iter() {
        votes.add(id, n);
    }
    let mut rejected = partial.rejected;
    rejected.sort_by(|a, b| a.ballot_id.cmp(&b.ballot_id).then_with(|| a.reason.cmp(&b.reason)));
    TallyResult {
        total_votes_cast: votes.total(),
        votes,
        ballots_counted: partial.counted,
        ballots_rejected: rejected,
    }
}

/// Per-candidate totals over the valid ballots. Every roster candidate gets
/// an entry, and the result does not depend on ballot order.
pub fn count_votes(ballots: &[Ballot], config: &ElectionConfig) -> TallyResult {
    let roster = config.candidate_ids();
    finish(count_chunk(ballots, config, &roster), config)
}

/// Same result as [`count_votes`], counted on `workers` threads.
pub fn count_votes_parallel(ballots: &[Ballot], config: &ElectionConfig, workers: usize) -> TallyResult {
    let workers = workers.max(1);
    let chunk = ballots.len().div_ceil(workers).max(1);
    let roster = config.candidate_ids();
    let merged = thread::scope(|scope| {
        let handles: Vec<_> = ballots
            .chunks(chunk)
            .map(|part| scope.spawn(|| count_chunk(part, config, &roster)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("counting worker panicked"))
            .fold(Partial::default(), Partial::merge)
    });
    finish(merged, config)
}
