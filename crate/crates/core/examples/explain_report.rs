//! Render the full Monthey report: results table, price of the criteria and
//! why lower-voted candidates were seated.
//!
//! cargo run -p pact-core --example explain_report [-- text|markdown|json]

use pact_core::explain::{build_report, render_report, ReportFormat};
use pact_core::monthey;
use pact_core::solver::{solve, SolverOptions};

fn main() -> pact_core::Result<()> {
    let format: ReportFormat = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "text".into())
        .parse()
        .map_err(|message| pact_core::Error::Parse {
            context: "format".into(),
            message,
        })?;
    let config = monthey::config();
    let votes = monthey::votes();
    let outcome = solve(&votes, &config)?;
    let report = build_report(&outcome, &votes, &config, &SolverOptions::default())?;
    print!("{}", render_report(&report, format)?);
    Ok(())
}
