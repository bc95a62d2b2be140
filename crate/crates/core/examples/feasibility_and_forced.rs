//! Can any committee meet the criteria, and who is guaranteed a seat?

use pact_core::model::Bound;
use pact_core::monthey;
use pact_core::solver::{check_feasibility, find_forced_candidates, Feasibility};

fn main() -> pact_core::Result<()> {
    let config = monthey::config();
    println!("feasible: {}", check_feasibility(&config.roster, &config).is_feasible());
    println!("forced: {:?}", find_forced_candidates(&config)?);

    // Five members over 65 when only four are running.
    let mut strict = config.clone();
    strict.criteria[1].categories[2].bound = Bound::AtLeast(5);
    if let Feasibility::Infeasible { deficits } = check_feasibility(&strict.roster, &strict) {
        for d in deficits {
            println!("deficit: {}", serde_json::to_string(&d).expect("serializable"));
        }
    }
    Ok(())
}
