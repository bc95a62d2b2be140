//! Compare the branch-and-bound solver with exhaustive enumeration on random
//! small elections.
//!
//! cargo run --release -p pact-core --example oracle_check [-- trials]

use pact_core::random::{random_election, RandomShape};
use pact_core::solver::{relax_until_feasible, BranchAndBound, BruteForce, CommitteeSolver, SolveStatus};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> pact_core::Result<()> {
    let trials: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(300);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (bnb, brute) = (BranchAndBound::default(), BruteForce::default());
    let mut nodes = (0u64, 0u64);
    for _ in 0..trials {
        let (config, votes) = random_election(&mut rng, &RandomShape::default());
        let fast = bnb.solve(&votes, &config)?;
        // Enumeration never relaxes, so hand it the relaxed config.
        let target = match fast.status {
            SolveStatus::RelaxedOptimal => relax_until_feasible(&config)?.0,
            _ => config,
        };
        let slow = brute.solve(&votes, &target)?;
        assert_eq!(fast.objective, slow.objective);
        nodes.0 += fast.node_count;
        nodes.1 += slow.node_count;
    }
    println!(
        "{} and {} agree on {trials} random elections ({} vs {} nodes)",
        bnb.name(),
        brute.name(),
        nodes.0,
        nodes.1
    );
    Ok(())
}
