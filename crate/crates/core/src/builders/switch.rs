//! Stochastic switches between the base tasks.

use super::base::coin_zero;
use super::{build_base, diagonal_operator, purification, space, wcf_purification, FIRST_MESSAGE};
use crate::catalog::{Party, Task};
use crate::error::{Error, Result};
use crate::sdp::{EqualityRhs, LinearMap, Scenario, SdpProblem, Term, TwoStageSdp, Variable};

pub fn uniform(n: usize) -> Vec<f64> {
    vec![1.0 / n as f64; n]
}

fn check_tasks(tasks: &[Task], allowed: &[Task]) -> Result<()> {
    if tasks.len() < 2 {
        return Err(Error::Unsupported("a switch needs at least two tasks".into()));
    }
    for (i, t) in tasks.iter().enumerate() {
        if !allowed.contains(t) || tasks[..i].contains(t) {
            return Err(Error::Unsupported(format!("task list {tasks:?} for a switch")));
        }
    }
    Ok(())
}

/// The first message of every Alice scenario, renamed onto the shared `B`.
fn alice_scenario(task: Task, probability: f64) -> Result<Scenario> {
    let problem = build_base(task, Party::Alice)?;
    let own = problem.variable(FIRST_MESSAGE)?.space.clone();
    let binding = if own.contains("B") {
        LinearMap::identity(own)
    } else {
        LinearMap::relabel(&own, &["B"])?
    };
    Ok(Scenario {
        name: task.name().to_ascii_lowercase(),
        probability,
        problem,
        binding: Term::new(FIRST_MESSAGE, binding),
    })
}

fn alice_switch(name: String, tasks: &[Task], probs: &[f64]) -> Result<TwoStageSdp> {
    if probs.len() != tasks.len() {
        return Err(Error::Dimension(format!("{} probabilities for {} tasks", probs.len(), tasks.len())));
    }
    let scenarios = tasks.iter().zip(probs).map(|(t, p)| alice_scenario(*t, *p)).collect::<Result<Vec<_>>>()?;
    let stage_one = Variable { name: FIRST_MESSAGE.into(), space: space(&[("B", 3)])? };
    TwoStageSdp::new(name, stage_one, scenarios)
}

/// Alice commits to one first message on `B`; Bob then picks a task with the
/// given probabilities.
pub fn build_switch_alice(tasks: &[Task], probs: &[f64]) -> Result<TwoStageSdp> {
    check_tasks(tasks, &[Task::Bc, Task::Wcf, Task::Ot])?;
    let names: Vec<String> = tasks.iter().map(|t| t.name().to_ascii_lowercase()).collect();
    alice_switch(format!("switch_alice:{}", names.join("+")), tasks, probs)
}

pub fn build_xot_dr_switch_alice() -> Result<TwoStageSdp> {
    alice_switch("switch_xot_dr_alice".into(), &[Task::Xot, Task::Dr3], &uniform(2))
}

/// Bob's switch programs. Bob's choice `c` is a register of the final state,
/// so his selection is optimized along with everything else.
pub fn build_switch_bob(tasks: &[Task]) -> Result<SdpProblem> {
    check_tasks(tasks, &[Task::Bc, Task::Wcf, Task::Ot])?;
    let name = format!("switch_bob:{}", tasks.iter().map(|t| t.name().to_ascii_lowercase()).collect::<Vec<_>>().join("+"));
    match tasks.iter().position(|t| *t == Task::Wcf) {
        None => guess_switch_bob(name, tasks.len()),
        Some(coin) => coin_switch_bob(name, tasks.len(), coin),
    }
}

/// Both tasks ask Bob to guess `y` from the same commitment qutrit.
fn guess_switch_bob(name: String, choices: usize) -> Result<SdpProblem> {
    let mut p = SdpProblem::new(name);
    let view = space(&[("C", choices), ("Y", 2), ("A", 3), ("G", 2)])?;
    p.declare_variable("final", view.clone())?;
    p.add_objective("final", diagonal_operator(&view, |d| if d[1] == d[3] { 1.0 } else { 0.0 }))?;
    let psi = purification(&[("Y", 2), ("A", 3), ("B", 3)], |y| vec![vec![y, y, y], vec![y, 2, 2]], 2)?;
    p.add_constraint(
        "alice_registers",
        vec![Term::new("final", LinearMap::partial_trace(&view, &["C", "G"])?)],
        psi.density().partial_trace(&["B"])?,
    )?;
    Ok(p)
}

/// Switches containing coin flipping: the guess is returned with `c`, before
/// `B1` arrives; the coin choice `z` comes last.
fn coin_switch_bob(name: String, choices: usize, coin: usize) -> Result<SdpProblem> {
    let mut p = SdpProblem::new(name);
    let interim = space(&[("C", choices), ("Y", 2), ("A0", 3), ("A1", 3), ("B1", 3), ("G", 2)])?;
    let last = space(&[("C", choices), ("Y", 2), ("A0", 3), ("A1", 3), ("Z", 2), ("G", 2)])?;
    p.declare_variable("interim", interim.clone())?;
    p.declare_variable("final", last.clone())?;
    p.add_objective(
        "final",
        diagonal_operator(&last, |d| {
            let won = if d[0] == coin { coin_zero(d[2], d[3], d[4]) } else { d[1] == d[5] };
            if won {
                1.0
            } else {
                0.0
            }
        }),
    )?;
    p.add_constraint(
        "alice_registers",
        vec![Term::new("interim", LinearMap::partial_trace(&interim, &["C", "G"])?)],
        wcf_purification()?.density().partial_trace(&["B0"])?,
    )?;
    p.add_equality(
        "guess_kept",
        Term::new("final", LinearMap::partial_trace(&last, &["Z"])?),
        EqualityRhs::Term(Term::new("interim", LinearMap::partial_trace(&interim, &["B1"])?)),
    )?;
    Ok(p)
}
