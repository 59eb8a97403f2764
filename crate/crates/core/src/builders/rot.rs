//! Rabin oblivious transfer switches: Bob either runs the transfer or tests
//! Alice and restarts. Acceptance of a test is credited with probability 1.

use super::{diagonal_operator, space, FIRST_MESSAGE};
use crate::catalog::{commit_state, rot_state, Party, PureState, LOST};
use crate::error::{Error, Result};
use crate::sdp::{EqualityRhs, LinearMap, SdpProblem, Term};
use crate::tensor::TensorOperator;

pub fn build_rot_switch(variant: u8, party: Party) -> Result<SdpProblem> {
    match (variant, party) {
        (1, Party::Alice) => single_qutrit_alice(),
        (1, Party::Bob) => single_qutrit_bob(),
        (2, Party::Alice) => entangled_alice(),
        (2, Party::Bob) => entangled_bob(),
        _ => Err(Error::Unsupported(format!("no Rabin OT switch variant {variant}"))),
    }
}

fn accept_message(p: &mut SdpProblem, var: &str, traced: &[&str]) -> Result<()> {
    let s = p.variable(var)?.space.clone();
    let b = space(&[("B", 3)])?;
    p.add_equality(
        format!("first_message({var})"),
        Term::new(var, LinearMap::partial_trace(&s, traced)?),
        EqualityRhs::Term(Term::new(FIRST_MESSAGE, LinearMap::identity(b))),
    )
}

/// `sum_y |y><y|_Y ⊗ target(y)`.
fn labelled_targets(targets: [TensorOperator; 2]) -> Result<TensorOperator> {
    let mut acc: Option<TensorOperator> = None;
    for (y, t) in targets.into_iter().enumerate() {
        let pick = diagonal_operator(&space(&[("Y", 2)])?, |d| if d[0] == y { 1.0 } else { 0.0 });
        let term = pick.kron(&t)?;
        acc = Some(match acc {
            None => term,
            Some(a) => a.add(&term)?,
        });
    }
    Ok(acc.expect("two targets"))
}

fn single_qutrit_alice() -> Result<SdpProblem> {
    let mut p = SdpProblem::new("rot1_alice");
    p.declare_variable(FIRST_MESSAGE, space(&[("B", 3)])?)?;
    let guess = space(&[("G", 2), ("B", 3)])?;
    p.declare_variable("guess", guess.clone())?;
    // G = 0 claims Bob saw y, G = 1 claims he saw nothing.
    let matched = diagonal_operator(&guess, |d| if (d[0] == 0) == (d[1] != LOST) { 1.0 } else { 0.0 });
    p.add_objective("guess", matched.scale(0.5))?;
    let reveal = space(&[("Y", 2), ("B", 3)])?;
    p.declare_variable("reveal", reveal)?;
    let test = labelled_targets([rot_state(0)?.density(), rot_state(1)?.density()])?;
    p.add_objective("reveal", test.scale(0.5))?;
    accept_message(&mut p, "guess", &["G"])?;
    accept_message(&mut p, "reveal", &["Y"])?;
    p.add_unit_trace(FIRST_MESSAGE)?;
    p.first_message = Some(FIRST_MESSAGE.into());
    Ok(p)
}

fn entangled_alice() -> Result<SdpProblem> {
    let mut p = SdpProblem::new("rot2_alice");
    p.declare_variable(FIRST_MESSAGE, space(&[("B", 3)])?)?;
    let lost = diagonal_operator(&space(&[("B", 3)])?, |d| if d[0] == LOST { 1.0 } else { 0.0 });
    p.add_objective(FIRST_MESSAGE, lost.scale(0.5))?;
    p.declare_variable("reveal", space(&[("Y", 2), ("A", 3), ("B", 3)])?)?;
    let test = labelled_targets([commit_state(0)?.density(), commit_state(1)?.density()])?;
    p.add_objective("reveal", test.scale(0.5))?;
    accept_message(&mut p, "reveal", &["Y", "A"])?;
    p.add_unit_trace(FIRST_MESSAGE)?;
    p.first_message = Some(FIRST_MESSAGE.into());
    Ok(p)
}

/// `sum_{y0 y1} |y0>_{Y0} |y0>_{Y0'} |y1>_{Y1} |phi_y0> |phi_y1> / 2`, where
/// each `phi` occupies `per_round` registers per round.
fn two_round_purification(per_round: &[&str], state: impl Fn(usize) -> Result<PureState>) -> Result<PureState> {
    let mut regs = vec![("Y0", 2), ("Y0'", 2), ("Y1", 2)];
    let labels: Vec<Vec<String>> =
        (0..2).map(|r| per_round.iter().map(|l| format!("{l}{r}")).collect()).collect();
    for round in &labels {
        for l in round {
            regs.push((l.as_str(), 3));
        }
    }
    let full = space(&regs)?;
    let mut amps = vec![num_rational::Rational64::from_integer(0); full.dim()];
    for y0 in 0..2 {
        for y1 in 0..2 {
            let (s0, s1) = (state(y0)?, state(y1)?);
            for (i0, a0) in s0.amplitudes().iter().enumerate() {
                for (i1, a1) in s1.amplitudes().iter().enumerate() {
                    if *a0.numer() == 0 || *a1.numer() == 0 {
                        continue;
                    }
                    let mut digits = vec![y0, y0, y1];
                    digits.extend(s0.space().digits_of(i0));
                    digits.extend(s1.space().digits_of(i1));
                    amps[full.index_of(&digits)] += a0 * a1;
                }
            }
        }
    }
    PureState::new(full, amps)
}

/// `Q`: Bob picked `c` and his guess for `y_c` is right.
fn round_guess(p: &mut SdpProblem, last: &crate::tensor::Space) -> Result<()> {
    let y0 = last.position("Y0").expect("Y0");
    let y1 = last.position("Y1").expect("Y1");
    let g0 = last.position("G0").expect("G0");
    let g1 = last.position("G1").expect("G1");
    let q = diagonal_operator(last, |d| {
        let hit = if d[0] == 0 { d[y0] == d[g0] } else { d[y1] == d[g1] };
        if hit {
            1.0
        } else {
            0.0
        }
    });
    p.add_objective("final", q)
}

fn two_round_bob(
    name: &str,
    per_round: &[&str],
    state: impl Fn(usize) -> Result<PureState>,
    interim_regs: &[(&str, usize)],
    last_regs: &[(&str, usize)],
    revealed: &[&str],
) -> Result<SdpProblem> {
    let mut p = SdpProblem::new(name);
    let psi = two_round_purification(per_round, state)?;
    let interim = space(interim_regs)?;
    let last = space(last_regs)?;
    p.declare_variable("interim", interim.clone())?;
    p.declare_variable("final", last.clone())?;
    round_guess(&mut p, &last)?;
    p.add_constraint(
        "alice_registers",
        vec![Term::new("interim", LinearMap::partial_trace(&interim, &["C", "G0"])?)],
        psi.density().partial_trace(&["B0"])?,
    )?;
    p.add_equality(
        "first_guess_kept",
        Term::new("final", LinearMap::partial_trace(&last, &["G1"])?),
        EqualityRhs::Term(Term::new("interim", LinearMap::partial_trace(&interim, revealed)?)),
    )?;
    Ok(p)
}

fn single_qutrit_bob() -> Result<SdpProblem> {
    two_round_bob(
        "rot1_bob",
        &["B"],
        rot_state,
        &[("C", 2), ("Y0", 2), ("Y0'", 2), ("Y1", 2), ("B1", 3), ("G0", 2)],
        &[("C", 2), ("Y0", 2), ("Y1", 2), ("G0", 2), ("G1", 2)],
        &["Y0'", "B1"],
    )
}

fn entangled_bob() -> Result<SdpProblem> {
    two_round_bob(
        "rot2_bob",
        &["A", "B"],
        commit_state,
        &[("C", 2), ("Y0", 2), ("Y0'", 2), ("Y1", 2), ("A0", 3), ("A1", 3), ("B1", 3), ("G0", 2)],
        &[("C", 2), ("Y0", 2), ("Y1", 2), ("A1", 3), ("G0", 2), ("G1", 2)],
        &["Y0'", "A0", "B1"],
    )
}
