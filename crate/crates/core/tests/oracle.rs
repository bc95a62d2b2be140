//! The branch-and-bound solver against exhaustive enumeration.

use std::collections::BTreeSet;

use pact_core::check;
use pact_core::model::{RelaxationPolicy, TiePolicy};
use pact_core::random::{random_election, RandomShape};
use pact_core::solver::{
    brute_force_solve, find_forced_candidates, relax_until_feasible, solve_with, SolveStatus, SolverOptions,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const TRIALS: usize = 1200;

#[test]
fn matches_brute_force_on_random_elections() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0dac1e);
    let options = SolverOptions::default();
    let (mut solved, mut relaxed, mut infeasible, mut tied) = (0, 0, 0, 0);

    for trial in 0..TRIALS {
        let (config, votes) = random_election(&mut rng, &RandomShape::default());
        let outcome =
            solve_with(&votes, &config, &options).unwrap_or_else(|e| panic!("trial {trial}: {e}\n{config:?}"));

        // The oracle sees the config the solver actually optimised over.
        let mut oracle_config = if outcome.status == SolveStatus::RelaxedOptimal {
            relax_until_feasible(&config).unwrap().0
        } else {
            config.clone()
        };
        oracle_config.tie_policy = TiePolicy::ReportAll;
        let oracle = brute_force_solve(&votes, &oracle_config, &options).unwrap();

        match outcome.status {
            SolveStatus::Infeasible => {
                infeasible += 1;
                assert_eq!(config.relaxation_policy, RelaxationPolicy::Fail, "trial {trial}");
                assert_eq!(oracle.status, SolveStatus::Infeasible, "trial {trial}");
                assert!(outcome.committee.is_empty());
            }
            status => {
                if status == SolveStatus::RelaxedOptimal {
                    relaxed += 1;
                    assert_eq!(
                        brute_force_solve(&votes, &config, &options).unwrap().status,
                        SolveStatus::Infeasible
                    );
                } else {
                    solved += 1;
                }
                assert_eq!(oracle.status, SolveStatus::Optimal, "trial {trial}");
                assert_eq!(
                    outcome.objective, oracle.objective,
                    "trial {trial}\n{config:?}\n{votes:?}"
                );
                let members = outcome.committee.iter().map(String::as_str);
                assert!(
                    check::committee_breaches(members, &oracle_config).is_empty(),
                    "trial {trial}: committee breaks the criteria"
                );
                assert_eq!(votes.sum_of(outcome.committee.iter()), outcome.objective);
                assert_eq!(outcome.co_optimal_total, oracle.co_optimal_total, "trial {trial}");

                // Lexicographic and report-all both pick the smallest co-optimal committee.
                let smallest: BTreeSet<String> = oracle.co_optimal_committees[0].iter().cloned().collect();
                assert_eq!(outcome.committee, smallest, "trial {trial}");
                if config.tie_policy == TiePolicy::ReportAll {
                    assert_eq!(
                        outcome.co_optimal_committees, oracle.co_optimal_committees,
                        "trial {trial}"
                    );
                }
                if outcome.is_tied() {
                    tied += 1;
                }
            }
        }
    }

    // The generator must exercise every branch, or the comparison proves little.
    assert!(
        solved > 300 && relaxed > 50 && infeasible > 50 && tied > 50,
        "{solved} {relaxed} {infeasible} {tied}"
    );
}

#[test]
fn forced_set_is_the_intersection_of_all_feasible_committees() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let shape = RandomShape {
        max_candidates: 15,
        ..RandomShape::default()
    };
    let options = SolverOptions::default();
    let mut checked = 0;
    let mut nonempty = 0;
    while checked < 600 {
        let (config, votes) = random_election(&mut rng, &shape);
        let oracle = brute_force_solve(&votes, &config, &options).unwrap();
        if oracle.status == SolveStatus::Infeasible {
            assert!(find_forced_candidates(&config).is_err());
            continue;
        }
        let forced = find_forced_candidates(&config).unwrap();
        assert_eq!(forced, oracle.forced, "{config:?}");
        checked += 1;
        if !forced.is_empty() && forced.len() < config.seats as usize {
            nonempty += 1;
        }
    }
    assert!(nonempty > 30, "only {nonempty} instances with a partial forced set");
}
