//! Write a canonical problem in sparse SDPA format, read it back and solve.
//!
//!     cargo run --release --example sdpa_roundtrip -- ot_alice

use cheatlab::builders::ModelId;
use cheatlab::sdp::{canonicalize, export_sdpa, facial_reduce, SdpaData};
use cheatlab::solver::{solve_canonical, SolverOptions};

fn main() -> cheatlab::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "ot_alice".into());
    let problem = name.parse::<ModelId>()?.build()?;
    let canonical = canonicalize(&facial_reduce(&problem)?.problem)?;
    let text = export_sdpa(&canonical, &name);
    let path = std::env::temp_dir().join(format!("{}.dat-s", name.replace([':', '+'], "_")));
    std::fs::write(&path, &text)?;
    println!("wrote {} ({} lines)", path.display(), text.lines().count());

    let back = SdpaData::parse(&std::fs::read_to_string(&path)?)?.to_canonical()?;
    let opts = SolverOptions::ipm();
    let a = solve_canonical(&canonical, &opts)?.primal_objective;
    let b = solve_canonical(&back, &opts)?.primal_objective;
    println!("direct {a:.10}, after round trip {b:.10}");
    Ok(())
}
