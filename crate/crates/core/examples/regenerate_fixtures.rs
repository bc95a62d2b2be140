//! Rewrite `fixtures/monthey` from the built-in dataset.
//!
//! cargo run -p pact-core --example regenerate_fixtures [-- <dir> [seed]]

use std::path::PathBuf;

use pact_core::monthey;

fn main() -> pact_core::Result<()> {
    let mut args = std::env::args().skip(1);
    let dir = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/monthey"));
    let seed = args
        .next()
        .and_then(|s| s.parse().ok())
        .unwrap_or(monthey::FIXTURE_SEED);
    monthey::write_fixtures(&dir, seed)?;
    println!("wrote Monthey fixtures to {} (seed {seed})", dir.display());
    Ok(())
}
