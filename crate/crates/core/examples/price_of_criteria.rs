//! What the criteria cost in votes.

use pact_core::explain::price_report;
use pact_core::monthey;
use pact_core::solver::SolverOptions;

fn main() -> pact_core::Result<()> {
    let price = price_report(&monthey::votes(), &monthey::config(), &SolverOptions::default())?;
    println!("{} votes cast", price.total_votes_cast);
    println!(
        "without criteria: {} elected, {} lost ({})",
        price.unconstrained_objective, price.lost_votes_unconstrained, price.lost_pct_unconstrained
    );
    println!(
        "with criteria:    {} elected, {} lost ({})",
        price.constrained_objective, price.lost_votes_constrained, price.lost_pct_constrained
    );
    println!("price: {} votes ({})", price.price, price.price_pct);
    Ok(())
}
