//! Relax criteria that no committee can meet: free seats first, then drop
//! whole criteria starting from the least preferred.

use pact_core::model::{Bound, RelaxationPolicy};
use pact_core::monthey;
use pact_core::solver::{relax_until_feasible, solve};

fn main() -> pact_core::Result<()> {
    let votes = monthey::votes();
    let mut config = monthey::config();
    config.criteria[1].categories[2].bound = Bound::AtLeast(5);

    let (_, records) = relax_until_feasible(&config)?;
    for r in &records {
        println!(
            "{:?} {} {:?}: {:?} -> {:?} ({} seats freed)",
            r.action, r.criterion, r.category, r.old_bound, r.new_bound, r.freed_seats
        );
    }
    let outcome = solve(&votes, &config)?;
    println!("{:?}, {} votes", outcome.status, outcome.objective);

    config.relaxation_policy = RelaxationPolicy::Fail;
    let strict = solve(&votes, &config)?;
    println!("with relaxation disabled: {:?}", strict.status);
    Ok(())
}
