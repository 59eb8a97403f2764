//! Fix Alice's first message and let the solver optimize everything else.
//! This checks whether a reported optimal state really attains the optimum.
//!
//!     cargo run --release --example candidate_states

use cheatlab::builders::{restrict_and_solve, ModelId};
use cheatlab::report::manifest;
use cheatlab::solver::SolverOptions;

fn main() -> cheatlab::Result<()> {
    for row in manifest()? {
        let Some(spec) = &row.candidate else { continue };
        let model: ModelId = row.model.parse()?;
        let problem = model.build()?;
        let var = problem.first_message.clone().expect("candidate rows have a first message");
        let sigma = spec.operator(&problem.variable(&var)?.space)?;
        let sol = restrict_and_solve(&model, &sigma, &SolverOptions::ipm(), true)?;
        let v = sol.result.value;
        let verdict = if (v - row.expected).abs() <= spec.tolerance { "attains" } else { "falls short of" };
        println!("{:<24} {v:.6} {verdict} {:.6} (± {:e})", row.model, row.expected, spec.tolerance);
    }
    Ok(())
}
