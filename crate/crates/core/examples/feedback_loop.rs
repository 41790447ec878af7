//! Re-inject bunched failures into the same splitter. Exact per-round
//! numbers next to a seeded Monte Carlo run.

use whichway::scenarios::{scenario_feedback, DEFAULT_SEED};
use whichway::Statistics;

fn main() -> whichway::error::Result<()> {
    let report = scenario_feedback(8, Statistics::Fermion, 50_000, DEFAULT_SEED)?;
    let t = report.table("rounds").unwrap();
    println!("{}", t.columns.join("  "));
    for row in &t.rows {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        println!("{}", cells.join("  "));
    }
    Ok(())
}
