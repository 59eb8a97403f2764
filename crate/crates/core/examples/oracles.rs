//! Closed-form values next to the SDP optima they should match.
//!
//!     cargo run --release --example oracles

use cheatlab::builders::ModelId;
use cheatlab::catalog::{commit_state, rot_state};
use cheatlab::oracle::{helstrom, symmetric_qutrit_commitment_value};
use cheatlab::solver::{solve, SolverOptions};

fn main() -> cheatlab::Result<()> {
    let bob_view = |y| commit_state(y).and_then(|s| s.density().partial_trace(&["A"]));
    let (rho0, rho1) = (bob_view(0)?, bob_view(1)?);
    let opts = SolverOptions::ipm();
    let value = |name: &str| -> cheatlab::Result<f64> { Ok(solve(&name.parse::<ModelId>()?.build()?, &opts, true)?.result.value) };

    let h = helstrom(&rho0, &rho1)?;
    for name in ["bc_bob", "ot_bob", "switch_bob:bc+wcf+ot"] {
        println!("{name:<22} {:.8}   Helstrom {h:.8}", value(name)?);
    }
    // Bob telling the two plain ROT states apart; Alice's best cheat in the
    // first ROT variant happens to reach the same number.
    let rot = helstrom(&rot_state(0)?.density(), &rot_state(1)?.density())?;
    println!("{:<22} {:.8}   Helstrom of ROT states {rot:.8}", "rot1_alice", value("rot1_alice")?);
    let f = symmetric_qutrit_commitment_value(&rho0, &rho1)?;
    println!("{:<22} {:.8}   fidelity sweep {f:.8}", "bc_alice", value("bc_alice")?);
    Ok(())
}
