//! Facial reduction shrinks each variable to the face forced by the
//! rank-deficient constraint data, and restores Slater's condition.
//!
//!     cargo run --release --example facial_reduction -- rot2_bob

use cheatlab::builders::ModelId;
use cheatlab::sdp::{canonicalize, facial_reduce};
use cheatlab::solver::{solve, SolverOptions};

fn main() -> cheatlab::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "rot2_bob".into());
    let model: ModelId = name.parse()?;
    let problem = model.build()?;
    let reduced = facial_reduce(&problem)?;
    for f in &reduced.faces {
        println!("{:<10} {:>4} -> {:>4}", f.variable, f.original_dim(), f.reduced_dim());
    }
    let canonical = canonicalize(&reduced.problem)?;
    println!("{} constraint rows after reduction ({} dependent rows dropped)", canonical.num_rows(), canonical.dropped_rows);
    let sol = solve(&problem, &SolverOptions::ipm(), true)?;
    println!("{name}: {} {:.8} in {:.1} s", sol.result.status, sol.result.value, sol.result.wall_ms / 1e3);
    Ok(())
}
