use std::collections::BTreeSet;

use itertools::Itertools;

use crate::check;
use crate::error::{Error, Result};
use crate::model::{ElectionConfig, Votes};

use super::{SolveOutcome, SolveStatus, SolverOptions};

/// Largest roster the exhaustive solver accepts.
pub const BRUTE_FORCE_LIMIT: usize = 24;

/// Enumerate every size-k committee. Returns the optimum, every co-optimal
/// committee (capped like the main solver) and, as `forced`, the candidates
/// common to all feasible committees. `node_count` is the number of
/// committees examined. Never relaxes: infeasible configs come back
/// `INFEASIBLE`.
pub fn brute_force_solve(votes: &Votes, config: &ElectionConfig, options: &SolverOptions) -> Result<SolveOutcome> {
    let m = config.roster.len();
    if m > BRUTE_FORCE_LIMIT {
        return Err(Error::RosterTooLarge {
            size: m,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let roster = config.candidate_ids();
    if let Some((unknown, _)) = votes.iter().find(|(id, _)| !roster.contains(id)) {
        return Err(Error::UnknownCandidate(unknown.to_string()));
    }

    let ids: Vec<&str> = config.roster.iter().map(|c| c.candidate_id.as_str()).collect();
    let mut best: Option<u64> = None;
    let mut optimal: BTreeSet<Vec<String>> = BTreeSet::new();
    let mut total = 0u64;
    let mut common: Option<BTreeSet<&str>> = None;
    let mut examined = 0u64;

    for committee in ids.iter().copied().combinations(config.seats as usize) {
        examined += 1;
        if !check::satisfies(committee.iter().copied(), config) {
            continue;
        }
        let members: BTreeSet<&str> = committee.iter().copied().collect();
        common = Some(match common {
            None => members,
            Some(c) => c.intersection(&members).copied().collect(),
        });

        let objective: u64 = committee.iter().map(|id| votes.get(id)).sum();
        if best.is_none_or(|b| objective > b) {
            best = Some(objective);
            optimal.clear();
            total = 0;
        }
        if best == Some(objective) {
            total += 1;
            let mut sorted: Vec<String> = committee.iter().map(|s| s.to_string()).collect();
            sorted.sort();
            optimal.insert(sorted);
        }
    }

    let Some(objective) = best else {
        let mut outcome = SolveOutcome::infeasible(votes.clone(), config.tie_policy, Vec::new());
        outcome.node_count = examined;
        return Ok(outcome);
    };

    let all: Vec<Vec<String>> = optimal.into_iter().collect();
    let mut outcome = SolveOutcome::assemble(
        SolveStatus::Optimal,
        objective,
        all,
        total,
        config.tie_policy,
        options,
        votes.clone(),
    );
    outcome.forced = common.unwrap_or_default().into_iter().map(str::to_string).collect();
    outcome.node_count = examined;
    Ok(outcome)
}
