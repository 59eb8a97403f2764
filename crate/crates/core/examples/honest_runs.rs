//! Exact honest-execution distributions and the completeness check.
//!
//!     cargo run --example honest_runs

use std::collections::BTreeMap;

use cheatlab::catalog::ProtocolId;
use cheatlab::honest::{completeness_check, honest_distribution};

fn main() -> cheatlab::Result<()> {
    for id in ProtocolId::all() {
        let report = completeness_check(&id)?;
        let overall = honest_distribution(&id, &BTreeMap::new())?;
        let outcomes: Vec<String> = overall.iter().map(|(l, p)| format!("{l}: {p}")).collect();
        println!(
            "{:<18} {} cases {}  {}",
            id.to_string(),
            report.cases.len(),
            if report.passed { "complete" } else { "INCOMPLETE" },
            outcomes.join(", ")
        );
    }
    let fixed = BTreeMap::from([("y".to_string(), 1), ("x0".to_string(), 0), ("x1".to_string(), 1)]);
    let d = honest_distribution(&ProtocolId::Ot, &fixed)?;
    println!("\nOT with y = 1, x = (0, 1): decoded=1 with probability {}", d.probability("decoded=1"));
    Ok(())
}
