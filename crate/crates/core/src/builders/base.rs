//! Cheating SDPs of the stand-alone protocols.

use super::{diagonal_operator, purification, space, FIRST_MESSAGE};
use crate::catalog::{commit_state, controlled_ot_unitary, xot_state, Party, Task};
use crate::error::{Error, Result};
use crate::sdp::{EqualityRhs, LinearMap, SdpProblem, Side, Term};
use crate::tensor::TensorOperator;

/// Stand-alone cheating problem for one task and one dishonest party.
pub fn build_base(task: Task, party: Party) -> Result<SdpProblem> {
    match (task, party) {
        (Task::Bc, Party::Alice) => reveal_alice("bc_alice", &[commit_state(0)?, commit_state(1)?]),
        (Task::Dr3, Party::Alice) => reveal_alice("dr3_alice", &[xot_state(0)?, xot_state(1)?, xot_state(2)?]),
        (Task::Wcf, Party::Alice) => wcf_alice(),
        (Task::Ot, Party::Alice) => ot_alice("ot_alice"),
        (Task::Xot, Party::Alice) => ot_alice("xot_alice"),
        (Task::Bc, Party::Bob) => guess_bob("bc_bob"),
        (Task::Ot, Party::Bob) => guess_bob("ot_bob"),
        (Task::Wcf, Party::Bob) => wcf_bob(),
        (Task::Xot | Task::Dr3, Party::Bob) => {
            Err(Error::Unsupported(format!("no cheating-Bob formulation for {}", task.name())))
        }
    }
}

/// Alice sends `B` of some state, learns which value to reveal (uniform over
/// the targets) and then sends `A`; Bob projects onto the target.
fn reveal_alice(name: &str, targets: &[crate::catalog::PureState]) -> Result<SdpProblem> {
    let mut p = SdpProblem::new(name);
    let ab = space(&[("A", 3), ("B", 3)])?;
    p.declare_variable(FIRST_MESSAGE, space(&[("B", 3)])?)?;
    let weight = 1.0 / targets.len() as f64;
    for (y, target) in targets.iter().enumerate() {
        let var = format!("reveal{y}");
        p.declare_variable(var.clone(), ab.clone())?;
        p.add_objective(&var, target.density().scale(weight))?;
        p.add_equality(
            format!("commit({y})"),
            Term::new(var, LinearMap::partial_trace(&ab, &["A"])?),
            EqualityRhs::Term(Term::new(FIRST_MESSAGE, LinearMap::identity(space(&[("B", 3)])?))),
        )?;
    }
    p.add_unit_trace(FIRST_MESSAGE)?;
    p.first_message = Some(FIRST_MESSAGE.into());
    Ok(p)
}

/// `P_z`: accept `phi_y` on `A_z B_z` and see outcome 1 (`|2>`) on `B_zbar`.
fn wcf_alice_target(z: usize) -> Result<TensorOperator> {
    let full = space(&[("Y", 2), ("A0", 3), ("B0", 3), ("A1", 3), ("B1", 3)])?;
    let (a, b, other_b) = if z == 0 { ("A0", "B0", "B1") } else { ("A1", "B1", "B0") };
    let mut acc = TensorOperator::zeros(full.clone());
    for y in 0..2 {
        let pick = diagonal_operator(&space(&[("Y", 2)])?, |d| if d[0] == y { 1.0 } else { 0.0 });
        let phi = commit_state(y)?.relabel(&[a, b])?.density();
        let lost = diagonal_operator(&space(&[(other_b, 3)])?, |d| if d[0] == 2 { 1.0 } else { 0.0 });
        acc = acc.add(&pick.kron(&phi)?.kron(&lost)?.embed(&full)?)?;
    }
    Ok(acc)
}

fn wcf_alice() -> Result<SdpProblem> {
    let mut p = SdpProblem::new("wcf_alice");
    let full = space(&[("Y", 2), ("A0", 3), ("B0", 3), ("A1", 3), ("B1", 3)])?;
    let sent = space(&[("B0", 3), ("B1", 3)])?;
    p.declare_variable(FIRST_MESSAGE, space(&[("B0", 3)])?)?;
    p.declare_variable("sent", sent.clone())?;
    for z in 0..2 {
        let var = format!("reveal{z}");
        p.declare_variable(var.clone(), full.clone())?;
        p.add_objective(&var, wcf_alice_target(z)?.scale(0.5))?;
        p.add_equality(
            format!("bob_qutrits({z})"),
            Term::new(var, LinearMap::partial_trace(&full, &["Y", "A0", "A1"])?),
            EqualityRhs::Term(Term::new("sent", LinearMap::identity(sent.clone()))),
        )?;
    }
    p.add_equality(
        "first_qutrit",
        Term::new("sent", LinearMap::partial_trace(&sent, &["B1"])?),
        EqualityRhs::Term(Term::new(FIRST_MESSAGE, LinearMap::identity(space(&[("B0", 3)])?))),
    )?;
    p.add_unit_trace(FIRST_MESSAGE)?;
    p.first_message = Some(FIRST_MESSAGE.into());
    Ok(p)
}

/// `rho -> Tr_B U2 (|psi><psi|_X ⊗ rho) U2^dagger` from Alice's qutrit to
/// Bob's uniformly random bits.
pub fn ot_channel() -> Result<LinearMap> {
    let b = space(&[("B", 3)])?;
    let bits = space(&[("X0", 2), ("X1", 2)])?;
    let uniform = TensorOperator::from_real(bits, &nalgebra::DMatrix::from_element(4, 4, 0.25))?;
    let u2 = controlled_ot_unitary()?;
    LinearMap::compose(vec![
        LinearMap::tensor_with_constant(&b, uniform, Side::Left)?,
        LinearMap::conjugate_by_operator(&u2),
        LinearMap::partial_trace(u2.space(), &["B"])?,
    ])
}

fn ot_alice(name: &str) -> Result<SdpProblem> {
    let mut p = SdpProblem::new(name);
    let guess = space(&[("X0", 2), ("X1", 2), ("G0", 2), ("G1", 2)])?;
    p.declare_variable(FIRST_MESSAGE, space(&[("B", 3)])?)?;
    p.declare_variable("guess", guess.clone())?;
    p.add_objective("guess", diagonal_operator(&guess, |d| if d[0] == d[2] && d[1] == d[3] { 1.0 } else { 0.0 }))?;
    p.add_equality(
        "bob_bits",
        Term::new("guess", LinearMap::partial_trace(&guess, &["G0", "G1"])?),
        EqualityRhs::Term(Term::new(FIRST_MESSAGE, ot_channel()?)),
    )?;
    p.add_unit_trace(FIRST_MESSAGE)?;
    p.first_message = Some(FIRST_MESSAGE.into());
    Ok(p)
}

/// Bob guesses `y` after receiving `B` of the commitment state.
fn guess_bob(name: &str) -> Result<SdpProblem> {
    let mut p = SdpProblem::new(name);
    let view = space(&[("Y", 2), ("A", 3), ("G", 2)])?;
    p.declare_variable("final", view.clone())?;
    p.add_objective("final", diagonal_operator(&view, |d| if d[0] == d[2] { 1.0 } else { 0.0 }))?;
    let psi = purification(&[("Y", 2), ("A", 3), ("B", 3)], |y| vec![vec![y, y, y], vec![y, 2, 2]], 2)?;
    p.add_constraint(
        "alice_registers",
        vec![Term::new("final", LinearMap::partial_trace(&view, &["G"])?)],
        psi.density().partial_trace(&["B"])?,
    )?;
    Ok(p)
}

/// `Q`: Alice sees 0 on `A_zbar` after Bob announces `z`.
pub(super) fn coin_zero(d_a0: usize, d_a1: usize, z: usize) -> bool {
    let other = if z == 0 { d_a1 } else { d_a0 };
    other < 2
}

fn wcf_bob() -> Result<SdpProblem> {
    let mut p = SdpProblem::new("wcf_bob");
    let view = space(&[("Y", 2), ("A0", 3), ("A1", 3), ("Z", 2)])?;
    p.declare_variable("final", view.clone())?;
    p.add_objective("final", diagonal_operator(&view, |d| if coin_zero(d[1], d[2], d[3]) { 1.0 } else { 0.0 }))?;
    p.add_constraint(
        "alice_registers",
        vec![Term::new("final", LinearMap::partial_trace(&view, &["Z"])?)],
        wcf_purification()?.density().partial_trace(&["B0", "B1"])?,
    )?;
    Ok(p)
}

/// `sum_y |y> |phi_y>_{A0 B0} |phi_y>_{A1 B1} / sqrt 2`.
pub fn wcf_purification() -> Result<crate::catalog::PureState> {
    purification(&[("Y", 2), ("A0", 3), ("B0", 3), ("A1", 3), ("B1", 3)], |y| {
        let mut t = Vec::new();
        for first in [y, 2] {
            for second in [y, 2] {
                t.push(vec![y, first, first, second, second]);
            }
        }
        t
    }, 2)
}
