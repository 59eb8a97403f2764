//! A stochastic switch is a two-stage program: one first message shared by
//! every task Bob might pick. Dropping that binding gives the plain average
//! of the stand-alone optima, which the switch can only match or undercut.
//!
//!     cargo run --release --example switches

use cheatlab::builders::{build_switch_alice, uniform, ModelId};
use cheatlab::catalog::Task;
use cheatlab::solver::{solve, SolverOptions};

fn main() -> cheatlab::Result<()> {
    let opts = SolverOptions::ipm();
    for name in ["switch_alice:bc+ot", "switch_alice:bc+wcf", "switch_alice:ot+wcf", "switch_alice:bc+wcf+ot", "switch_xot_dr_alice"] {
        let program = name.parse::<ModelId>()?.two_stage()?.expect("scenario model");
        let bound = solve(&program.compose()?, &opts, true)?.result.value;
        let free = solve(&program.compose_unbound()?, &opts, true)?.result.value;
        println!("{name:<24} shared message {bound:.6}   independent messages {free:.6}");
    }

    // Bob's selection probabilities are a parameter of the builder.
    println!();
    for p in [0.1, 0.5, 0.9] {
        let program = build_switch_alice(&[Task::Bc, Task::Ot], &[p, 1.0 - p])?;
        let v = solve(&program.compose()?, &opts, true)?.result.value;
        println!("P(c = BC) = {p:.1}: {v:.6}");
    }
    let _ = uniform(2);
    Ok(())
}
