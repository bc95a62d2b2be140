//! Phase 2: count approval ballots, rejecting over-long or unknown
//! selections, on one thread and on several.

use pact_core::model::Ballot;
use pact_core::monthey;
use pact_core::tally::{count_votes, count_votes_parallel};

fn main() {
    let config = monthey::config();
    let mut ballots = monthey::phase2_ballots(monthey::FIXTURE_SEED);
    ballots.push(Ballot::new("spoiled", ["A", "nobody"]));

    let tally = count_votes(&ballots, &config);
    println!(
        "{} ballots counted, {} rejected, {} votes cast",
        tally.ballots_counted,
        tally.ballots_rejected.len(),
        tally.total_votes_cast
    );
    for r in &tally.ballots_rejected {
        println!("  rejected {}: {:?}", r.ballot_id, r.reason);
    }
    for (id, votes) in tally.votes.ranking().iter().take(5) {
        println!("  {id:<3} {votes}");
    }

    let parallel = count_votes_parallel(&ballots, &config, 4);
    assert_eq!(parallel, tally);
    println!("4-worker count agrees");
}
