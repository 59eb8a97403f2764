//! Bob cheats perfectly in the switch between strong and weak coin flipping:
//! he measures the first qutrit and picks whichever task he has already won.
//!
//!     cargo run --release --example scf_attack

use cheatlab::builders::{build_scf_switch_bob, build_scf_switch_bob_forced_coin, scf_attack_assignment};
use cheatlab::solver::{solve, verify_candidate, SolverOptions};

fn main() -> cheatlab::Result<()> {
    let problem = build_scf_switch_bob()?;
    let report = verify_candidate(&problem, &scf_attack_assignment()?, 1e-9)?;
    println!("attack: feasible {} with success {:.10}", report.feasible, report.objective);
    let best = solve(&problem, &SolverOptions::ipm(), true)?.result.value;
    println!("optimum over all strategies: {best:.8}");
    let forced = solve(&build_scf_switch_bob_forced_coin()?, &SolverOptions::ipm(), true)?.result.value;
    println!("when Bob must pick the weak coin: {forced:.8}");
    Ok(())
}
