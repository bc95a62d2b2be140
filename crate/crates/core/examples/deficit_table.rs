//! How far a partial committee is from each criterion: the top 13 plus the
//! two guaranteed candidates over 65.

use pact_core::explain::deficit_report;
use pact_core::monthey;

fn main() -> pact_core::Result<()> {
    let partial = [
        "A", "B", "C", "D", "E", "F", "G", "H", "I", "J", "K", "L", "M", "T", "Z",
    ];
    let report = deficit_report(partial, &monthey::config())?;
    for row in &report.rows {
        println!(
            "{:<7} {:<9} {:>3}  reached {:>2}  difference {:+}",
            row.criterion,
            row.category,
            row.target.to_string(),
            row.reached,
            row.difference
        );
    }
    println!("{} criteria unmet", report.unmet.len());
    Ok(())
}
