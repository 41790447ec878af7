//! Both outputs of the first splitter feed a second splitter each. Every
//! two-detector pattern heralds a Bell pair; together they occur 3/4 of the time.

use whichway::scenarios::scenario_fig2;
use whichway::Statistics;

fn main() -> whichway::error::Result<()> {
    let report = scenario_fig2(Statistics::Fermion)?;
    println!(
        "coincidence probability {:.4}",
        report.number("coincidence_probability").unwrap()
    );
    let table = report.table("branches").unwrap();
    for row in &table.rows {
        println!("{:<6} p = {}  {}", row[0].to_string(), row[1], row[3]);
    }
    Ok(())
}
