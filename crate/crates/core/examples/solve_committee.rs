//! Select the best committee under the criteria, with and without them, and
//! show how ties are reported.

use std::time::Instant;

use pact_core::model::TiePolicy;
use pact_core::monthey;
use pact_core::solver::solve;

fn main() -> pact_core::Result<()> {
    let config = monthey::config();
    let votes = monthey::votes();

    let started = Instant::now();
    let outcome = solve(&votes, &config)?;
    println!(
        "{:?}: {} votes, committee {:?} ({} nodes, {:?})",
        outcome.status,
        outcome.objective,
        outcome.committee,
        outcome.node_count,
        started.elapsed()
    );

    // Q and R tie at 56 for the last unconstrained seat.
    let free = solve(&votes, &config.without_criteria())?;
    println!(
        "without criteria: {} votes, {} co-optimal committees",
        free.objective, free.co_optimal_total
    );
    for committee in &free.co_optimal_committees {
        println!("  {}", committee.join(" "));
    }

    let mut lex = config.without_criteria();
    lex.tie_policy = TiePolicy::Lexicographic;
    let picked = solve(&votes, &lex)?;
    println!("lexicographic pick: {:?}", picked.committee);
    Ok(())
}
