//! Export the committee problem for an external ILP solver and check its
//! answer against ours.

use pact_core::lp::{cross_check, parse_assignment, to_lp};
use pact_core::monthey;
use pact_core::solver::solve;

fn main() -> pact_core::Result<()> {
    let config = monthey::config();
    let votes = monthey::votes();
    let model = to_lp(&votes, &config);
    print!("{}", model.text);

    // Stand-in for a solver's solution listing.
    let outcome = solve(&votes, &config)?;
    let listing: String = model
        .variables
        .iter()
        .map(|(var, id)| format!("{var} {}\n", u8::from(outcome.committee.contains(id))))
        .collect();
    let external = parse_assignment(&model, &listing);
    let check = cross_check(&external, &votes, &config, &outcome);
    eprintln!(
        "external objective {}, agrees: {}",
        check.external_objective, check.agrees
    );
    Ok(())
}
