//! Bob against the switch between strong and weak coin flipping.
//!
//! Bob returns `c` and `z` after seeing both qutrits `B0 B1`. On `c = 0` the
//! strong coin `y xor z` must come out 1; on `c = 1` Alice must see `⊥` on
//! `A_zbar`, which is the weak-coin outcome 1.

use std::collections::BTreeMap;

use super::{diagonal_operator, space, wcf_purification};
use crate::catalog::{unit, LOST};
use crate::error::Result;
use crate::sdp::{LinearMap, SdpProblem, Term};
use crate::tensor::TensorOperator;

fn scf_objective(d: &[usize]) -> f64 {
    let (c, y, a0, a1, z) = (d[0], d[1], d[2], d[3], d[4]);
    let won = if c == 0 { y ^ z == 1 } else { (if z == 0 { a1 } else { a0 }) == LOST };
    if won {
        1.0
    } else {
        0.0
    }
}

pub fn build_scf_switch_bob() -> Result<SdpProblem> {
    let mut p = SdpProblem::new("scf_switch_bob");
    let view = space(&[("C", 2), ("Y", 2), ("A0", 3), ("A1", 3), ("Z", 2)])?;
    p.declare_variable("final", view.clone())?;
    p.add_objective("final", diagonal_operator(&view, scf_objective))?;
    p.add_constraint(
        "alice_registers",
        vec![Term::new("final", LinearMap::partial_trace(&view, &["C", "Z"])?)],
        wcf_purification()?.density().partial_trace(&["B0", "B1"])?,
    )?;
    Ok(p)
}

/// The same program with Bob forced to select the weak coin (`c = 1`).
pub fn build_scf_switch_bob_forced_coin() -> Result<SdpProblem> {
    let mut p = build_scf_switch_bob()?;
    p.name = "scf_switch_bob(c=1)".into();
    let view = p.variable("final")?.space.clone();
    p.add_constraint(
        "forced_choice",
        vec![Term::new("final", LinearMap::partial_trace(&view, &["Y", "A0", "A1", "Z"])?)],
        unit("C", 2, 1, 1)?,
    )?;
    Ok(p)
}

/// Bob measures `B0`. Seeing `k < 2` reveals `y = k`, so he picks the strong
/// coin with `z = 1 xor k`; seeing `⊥` means `A0` also holds `⊥`, so he picks
/// the weak coin with `z = 1`.
pub fn scf_attack_assignment() -> Result<BTreeMap<String, TensorOperator>> {
    let psi = wcf_purification()?;
    let view = space(&[("C", 2), ("Y", 2), ("A0", 3), ("A1", 3), ("Z", 2)])?;
    let mut tau = TensorOperator::zeros(view.clone());
    for k in 0..3 {
        let Some((prob, post)) = psi.collapse("B0", k)? else { continue };
        let (c, z) = if k == LOST { (1, 1) } else { (0, 1 ^ k) };
        let alice = post.density().partial_trace(&["B0", "B1"])?.scale(crate::catalog::to_f64(&prob));
        let branch = unit("C", 2, c, c)?.kron(&alice)?.kron(&unit("Z", 2, z, z)?)?;
        tau = tau.add(&branch.aligned_to(&view)?)?;
    }
    Ok(BTreeMap::from([("final".to_string(), tau)]))
}
