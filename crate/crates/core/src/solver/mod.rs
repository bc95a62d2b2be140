//! Exact committee selection: the size-k committee with the most votes among
//! those meeting every criterion.
//!
//! [`solve`] is the production path (branch-and-bound). [`brute_force_solve`]
//! enumerates every committee and serves as the reference oracle for small
//! rosters. Both implement [`CommitteeSolver`], as can any external solver
//! plugged in for cross-checking.

mod bnb;
mod brute;
mod feasibility;
mod forced;
mod instance;
mod relax;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{ensure_valid, ElectionConfig, RelaxationPolicy, TiePolicy, Votes};

pub use brute::{brute_force_solve, BRUTE_FORCE_LIMIT};
pub use feasibility::{check_feasibility, Deficit, Feasibility};
pub use forced::find_forced_candidates;
pub use relax::{free_seats, relax_until_feasible, RelaxationAction, RelaxationRecord};

/// Node budget for batch solves.
pub const DEFAULT_NODE_BUDGET: u64 = 50_000_000;
/// Node budget for interactive what-if solves.
pub const WHATIF_NODE_BUDGET: u64 = 1_000_000;
/// Maximum number of co-optimal committees reported.
pub const CO_OPTIMAL_CAP: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverOptions {
    pub node_budget: u64,
    pub co_optimal_cap: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            node_budget: DEFAULT_NODE_BUDGET,
            co_optimal_cap: CO_OPTIMAL_CAP,
        }
    }
}

impl SolverOptions {
    pub fn with_budget(node_budget: u64) -> Self {
        Self {
            node_budget,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    RelaxedOptimal,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    /// Empty when infeasible.
    pub committee: BTreeSet<String>,
    pub objective: u64,
    /// How `committee` was picked among co-optimal committees.
    pub tie_policy: TiePolicy,
    /// Every co-optimal committee (capped), only under `REPORT_ALL`.
    pub co_optimal_committees: Vec<Vec<String>>,
    /// Number of co-optimal committees found, regardless of the cap.
    pub co_optimal_total: u64,
    /// Candidates present in every feasible committee.
    pub forced: BTreeSet<String>,
    pub applied_relaxations: Vec<RelaxationRecord>,
    /// Why the original config was infeasible, when it was.
    pub deficits: Vec<Deficit>,
    pub node_count: u64,
    /// The vote totals this outcome was computed from.
    pub votes: Votes,
}

impl SolveOutcome {
    pub(crate) fn infeasible(votes: Votes, tie_policy: TiePolicy, deficits: Vec<Deficit>) -> Self {
        Self {
            status: SolveStatus::Infeasible,
            committee: BTreeSet::new(),
            objective: 0,
            tie_policy,
            co_optimal_committees: Vec::new(),
            co_optimal_total: 0,
            forced: BTreeSet::new(),
            applied_relaxations: Vec::new(),
            deficits,
            node_count: 0,
            votes,
        }
    }

    /// `committees` must be sorted, smallest first.
    pub(crate) fn assemble(
        status: SolveStatus,
        objective: u64,
        mut committees: Vec<Vec<String>>,
        total: u64,
        tie_policy: TiePolicy,
        options: &SolverOptions,
        votes: Votes,
    ) -> Self {
        committees.truncate(options.co_optimal_cap.max(1));
        let committee = committees
            .first()
            .map(|c| c.iter().cloned().collect())
            .unwrap_or_default();
        let co_optimal_committees = match tie_policy {
            TiePolicy::ReportAll => committees,
            TiePolicy::Lexicographic => Vec::new(),
        };
        Self {
            status,
            committee,
            objective,
            tie_policy,
            co_optimal_committees,
            co_optimal_total: total,
            forced: BTreeSet::new(),
            applied_relaxations: Vec::new(),
            deficits: Vec::new(),
            node_count: 0,
            votes,
        }
    }

    pub fn is_solved(&self) -> bool {
        self.status != SolveStatus::Infeasible
    }

    /// More than one committee reaches the optimum.
    pub fn is_tied(&self) -> bool {
        self.co_optimal_total > 1
    }
}

/// Anything that can pick a committee for a config: the built-in solvers, or
/// an adapter around an external ILP solver used for cross-checking.
pub trait CommitteeSolver {
    fn name(&self) -> &str;
    fn solve(&self, votes: &Votes, config: &ElectionConfig) -> Result<SolveOutcome>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct BranchAndBound(pub SolverOptions);

impl CommitteeSolver for BranchAndBound {
    fn name(&self) -> &str {
        "branch-and-bound"
    }

    fn solve(&self, votes: &Votes, config: &ElectionConfig) -> Result<SolveOutcome> {
        solve_with(votes, config, &self.0)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct BruteForce(pub SolverOptions);

impl CommitteeSolver for BruteForce {
    fn name(&self) -> &str {
        "brute-force"
    }

    fn solve(&self, votes: &Votes, config: &ElectionConfig) -> Result<SolveOutcome> {
        brute_force_solve(votes, config, &self.0)
    }
}

pub fn solve(votes: &Votes, config: &ElectionConfig) -> Result<SolveOutcome> {
    solve_with(votes, config, &SolverOptions::default())
}

/// Solve with explicit options.
///
/// An infeasible config yields an `INFEASIBLE` outcome under
/// [`RelaxationPolicy::Fail`], and is relaxed then solved (`RELAXED_OPTIMAL`)
/// under [`RelaxationPolicy::FreeSeatsThenDrop`].
pub fn solve_with(votes: &Votes, config: &ElectionConfig, options: &SolverOptions) -> Result<SolveOutcome> {
    ensure_valid(config)?;
    // Rejects votes for unknown candidates before any work.
    instance::Instance::build(votes, config)?;

    let (effective, relaxations, status, deficits) = match check_feasibility(&config.roster, config) {
        Feasibility::Feasible => (config.clone(), Vec::new(), SolveStatus::Optimal, Vec::new()),
        Feasibility::Infeasible { deficits } => match config.relaxation_policy {
            RelaxationPolicy::Fail => {
                return Ok(SolveOutcome::infeasible(votes.clone(), config.tie_policy, deficits));
            }
            RelaxationPolicy::FreeSeatsThenDrop => {
                let (relaxed, records) = relax_until_feasible(config)?;
                (relaxed, records, SolveStatus::RelaxedOptimal, deficits)
            }
        },
    };

    let inst = instance::Instance::build(votes, &effective)?;
    let cap = match effective.tie_policy {
        TiePolicy::ReportAll => options.co_optimal_cap,
        TiePolicy::Lexicographic => 1,
    };
    let found = bnb::search(&inst, cap, options.node_budget)?;
    let Some(objective) = found.objective else {
        // Unreachable after the feasibility check; reported rather than
        // panicking so a defect shows up as an infeasible outcome.
        let mut outcome = SolveOutcome::infeasible(votes.clone(), config.tie_policy, deficits);
        outcome.node_count = found.nodes;
        return Ok(outcome);
    };

    let mut outcome = SolveOutcome::assemble(
        status,
        objective,
        found.committees,
        found.total,
        effective.tie_policy,
        options,
        votes.clone(),
    );
    outcome.forced = find_forced_candidates(&effective)?;
    outcome.applied_relaxations = relaxations;
    outcome.deficits = deficits;
    outcome.node_count = found.nodes;
    Ok(outcome)
}

/// The config a solve actually optimised over: the input itself, or its
/// relaxation when the outcome records applied relaxations.
pub fn effective_config(config: &ElectionConfig, outcome: &SolveOutcome) -> Result<ElectionConfig> {
    if outcome.applied_relaxations.is_empty() {
        Ok(config.clone())
    } else {
        Ok(relax_until_feasible(config)?.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::check;
    use crate::model::{Bound, CandidateRecord, CategoryBound, CriterionSpec};

    fn gender_config(seats: u32, people: &[(&str, &str)], m: Bound, f: Bound) -> ElectionConfig {
        ElectionConfig {
            election_id: "t".into(),
            seats,
            max_selections: seats,
            roster: people
                .iter()
                .map(|(id, g)| CandidateRecord::new(id, id, [("gender", *g)]))
                .collect(),
            criteria: vec![CriterionSpec::new(
                "gender",
                1,
                vec![CategoryBound::new("M", m), CategoryBound::new("F", f)],
            )],
            tie_policy: TiePolicy::ReportAll,
            relaxation_policy: RelaxationPolicy::Fail,
        }
    }

    fn votes(pairs: &[(&str, u64)]) -> Votes {
        pairs.iter().map(|(id, v)| (id.to_string(), *v)).collect()
    }

    fn five() -> (ElectionConfig, Votes) {
        let cfg = gender_config(
            2,
            &[("a", "M"), ("b", "M"), ("c", "F"), ("d", "F"), ("e", "F")],
            Bound::Exact(1),
            Bound::Exact(1),
        );
        let v = votes(&[("a", 10), ("b", 9), ("c", 8), ("d", 7), ("e", 1)]);
        (cfg, v)
    }

    #[test]
    fn balanced_pair_matches_enumeration() {
        let (cfg, v) = five();
        let fast = solve(&v, &cfg).unwrap();
        let slow = brute_force_solve(&v, &cfg, &SolverOptions::default()).unwrap();
        let expected: BTreeSet<String> = ["a", "c"].iter().map(|s| s.to_string()).collect();
        assert_eq!(fast.committee, expected);
        assert_eq!(fast.objective, 18);
        assert_eq!(slow.committee, expected);
        assert_eq!(slow.objective, 18);
        assert_eq!(slow.node_count, 10);
        assert!(check::satisfies(fast.committee.iter().map(String::as_str), &cfg));
    }

    #[test]
    fn whole_roster_when_k_equals_m() {
        let (mut cfg, v) = five();
        cfg.criteria.clear();
        cfg.seats = 5;
        let out = solve(&v, &cfg).unwrap();
        assert_eq!(out.committee.len(), 5);
        assert_eq!(out.objective, 35);
        assert_eq!(out.forced.len(), 5);
    }

    #[test]
    fn unsatisfiable_supply_is_infeasible() {
        let (mut cfg, v) = five();
        cfg.seats = 3;
        cfg.criteria[0].categories[0].bound = Bound::AtLeast(3);
        cfg.criteria[0].categories[1].bound = Bound::AtLeast(0);
        let out = solve(&v, &cfg).unwrap();
        assert_eq!(out.status, SolveStatus::Infeasible);
        assert!(out.committee.is_empty());
        assert!(matches!(
            out.deficits[0],
            Deficit::CategoryShortfall {
                supply: 2,
                required: 3,
                ..
            }
        ));
        let slow = brute_force_solve(&v, &cfg, &SolverOptions::default()).unwrap();
        assert_eq!(slow.status, SolveStatus::Infeasible);
    }

    #[test]
    fn symmetric_candidates_tie() {
        let cfg = gender_config(
            2,
            &[("a", "M"), ("b", "M"), ("c", "F")],
            Bound::Exact(1),
            Bound::Exact(1),
        );
        let v = votes(&[("a", 5), ("b", 5), ("c", 3)]);
        let out = solve(&v, &cfg).unwrap();
        assert_eq!(out.co_optimal_committees.len(), 2);
        assert_eq!(out.co_optimal_total, 2);
        assert_eq!(out.committee, ["a", "c"].iter().map(|s| s.to_string()).collect());

        let mut lex = cfg.clone();
        lex.tie_policy = TiePolicy::Lexicographic;
        let out = solve(&v, &lex).unwrap();
        assert!(out.co_optimal_committees.is_empty());
        assert_eq!(out.co_optimal_total, 2);
        assert_eq!(out.committee, ["a", "c"].iter().map(|s| s.to_string()).collect());
    }

    #[test]
    fn node_budget_is_enforced() {
        let (cfg, v) = five();
        let err = solve_with(&v, &cfg, &SolverOptions::with_budget(2)).unwrap_err();
        assert!(matches!(err, crate::Error::NodeBudgetExceeded { budget: 2 }));
    }

    #[test]
    fn votes_for_strangers_are_rejected() {
        let (cfg, mut v) = five();
        v.set("zz", 3);
        assert!(matches!(solve(&v, &cfg), Err(crate::Error::UnknownCandidate(_))));
    }

    #[test]
    fn relaxation_policy_frees_seats() {
        let (mut cfg, v) = five();
        cfg.seats = 3;
        cfg.criteria[0].categories[0].bound = Bound::AtLeast(3);
        cfg.criteria[0].categories[1].bound = Bound::AtLeast(0);
        cfg.relaxation_policy = RelaxationPolicy::FreeSeatsThenDrop;
        let out = solve(&v, &cfg).unwrap();
        assert_eq!(out.status, SolveStatus::RelaxedOptimal);
        assert_eq!(out.applied_relaxations.len(), 1);
        assert_eq!(out.objective, 27);
        assert!(!out.deficits.is_empty());
    }
}
