//! Issue salted receipts, publish the ballots, then check a receipt and
//! re-verify the whole count, before and after tampering.

use pact_core::ledger::{verify_count, verify_receipt, Ledger, Salt};
use pact_core::monthey;
use pact_core::solver::{solve, SolverOptions};
use pact_core::tally::count_votes;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> pact_core::Result<()> {
    let config = monthey::config();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut ledger = Ledger::new();
    let mut receipts = Vec::new();
    for ballot in monthey::phase2_ballots(monthey::FIXTURE_SEED) {
        receipts.push(ledger.append(ballot, &Salt::random(&mut rng))?);
    }
    let published = ledger.published().to_vec();
    println!(
        "receipt {}: {:?}",
        receipts[0].ballot_id,
        verify_receipt(&receipts[0], &published)
    );

    let tally = count_votes(&published, &config);
    let outcome = solve(&tally.votes, &config)?;
    let options = SolverOptions::default();
    println!("recount: {:?}", verify_count(&published, &config, &outcome, &options));

    let mut tampered = published.clone();
    tampered[0].selections.insert("N".into());
    println!("receipt after tampering: {:?}", verify_receipt(&receipts[0], &tampered));
    let check = verify_count(&tampered, &config, &outcome, &options);
    println!(
        "recount after tampering: {}",
        serde_json::to_string(&check).expect("serializable")
    );
    Ok(())
}
