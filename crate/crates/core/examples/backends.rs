//! The interior point method and ADMM on the same canonical data.
//!
//!     cargo run --release --example backends -- wcf_bob

use cheatlab::builders::ModelId;
use cheatlab::solver::{solve, SolverOptions};

fn main() -> cheatlab::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "wcf_bob".into());
    let problem = name.parse::<ModelId>()?.build()?;
    for opts in [SolverOptions::ipm(), SolverOptions::admm()] {
        let r = solve(&problem, &opts, true)?.result;
        println!(
            "{:<4} {:<8} value {:.8} gap {:.1e} residuals {:.1e}/{:.1e} iterations {:>5} ({:.0} ms)",
            r.backend.to_string(),
            r.status.to_string(),
            r.value,
            r.gap,
            r.primal_residual,
            r.dual_residual,
            r.iterations,
            r.wall_ms
        );
    }
    Ok(())
}
