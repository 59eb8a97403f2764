//! Build one cheating program by name, solve it and certify the answer.
//!
//!     cargo run --release --example solve_model -- switch_alice:bc+wcf

use cheatlab::builders::ModelId;
use cheatlab::solver::{certify, solve, SolverOptions};

fn main() -> cheatlab::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "bc_alice".into());
    let model: ModelId = name.parse()?;
    let problem = model.build()?;
    for v in problem.variables() {
        println!("variable {:<14} {}", v.name, v.space);
    }
    let sol = solve(&problem, &SolverOptions::ipm(), true)?;
    let r = &sol.result;
    println!("{}: {} value {:.8} after {} iterations ({:.0} ms)", r.model, r.status, r.value, r.iterations, r.wall_ms);
    let cert = certify(r, &sol.canonical, 1e-6)?;
    println!("dual bound {:.8}, certificate passed: {}", cert.upper_bound, cert.passed);
    if let Some(first) = problem.first_message.as_ref() {
        let m = r.primal[first].matrix();
        let diag: Vec<String> = (0..m.nrows()).map(|i| format!("{:.4}", m[(i, i)].re)).collect();
        println!("first message diagonal: [{}]", diag.join(", "));
    }
    Ok(())
}
