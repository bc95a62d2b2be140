//! Phase 1: count the yes/no/blank vote on each criterion and build the
//! phase-2 config from the accepted ones.

use pact_core::criteria_vote::{build_election_config, tally_criteria_vote};
use pact_core::monthey;

fn main() -> pact_core::Result<()> {
    let ballots = monthey::phase1_ballots(monthey::FIXTURE_SEED);
    let result = tally_criteria_vote(&monthey::questions(), &ballots)?;

    println!("{} participants", result.participants);
    for q in &result.questions {
        println!(
            "{:<7} yes {:>5}  no {:>5}  blank {:>5}  {}",
            q.question_id,
            q.yes_pct.to_string(),
            q.no_pct.to_string(),
            q.blank_pct.to_string(),
            if q.accepted { "accepted" } else { "rejected" }
        );
    }

    let config = build_election_config(monthey::base(), &result);
    println!("phase-2 config binds {} criteria", config.criteria.len());
    Ok(())
}
