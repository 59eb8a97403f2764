//! Mechanical construction of every cheating SDP, keyed by [`ModelId`].

mod base;
mod rot;
mod scf;
mod switch;

use std::fmt;
use std::str::FromStr;

pub use base::{build_base, ot_channel, wcf_purification};
pub use rot::build_rot_switch;
pub use scf::{build_scf_switch_bob, build_scf_switch_bob_forced_coin, scf_attack_assignment};
pub use switch::{build_switch_alice, build_switch_bob, build_xot_dr_switch_alice, uniform};

use crate::catalog::{Party, PureState, Task};
use crate::error::{Error, Result};
use crate::sdp::{LinearMap, SdpProblem, Term, TwoStageSdp};
use crate::solver::{solve, Solution, SolverOptions};
use crate::tensor::{Space, TensorOperator};

/// Variable holding the first message of Alice in every model that has one.
pub const FIRST_MESSAGE: &str = "message";

/// Density tolerance for operators handed to [`restrict_and_solve`].
const DENSITY_TOL: f64 = 1e-6;

pub(crate) fn space(regs: &[(&str, usize)]) -> Result<Space> {
    Space::new(regs)
}

/// Diagonal operator whose entry at basis state `d` is `f(d)`.
pub(crate) fn diagonal_operator(space: &Space, f: impl Fn(&[usize]) -> f64) -> TensorOperator {
    let diag: Vec<f64> = (0..space.dim()).map(|i| f(&space.digits_of(i))).collect();
    TensorOperator::diagonal(space.clone(), &diag).expect("diagonal has the space dimension")
}

/// `sum_y |y> |terms(y)>` with unit amplitude on every listed basis state.
/// The first register is the classical input `y`.
pub fn purification(
    regs: &[(&str, usize)],
    terms: impl Fn(usize) -> Vec<Vec<usize>>,
    ydim: usize,
) -> Result<PureState> {
    let all: Vec<Vec<usize>> = (0..ydim).flat_map(terms).collect();
    let refs: Vec<&[usize]> = all.iter().map(Vec::as_slice).collect();
    PureState::superposition(space(regs)?, &refs)
}

/// Every cheating model, named as on the command line.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ModelId {
    Base(Task, Party),
    SwitchAlice(Vec<Task>),
    SwitchBob(Vec<Task>),
    Rot { variant: u8, party: Party },
    XotDrSwitchAlice,
    ScfSwitchBob,
}

impl ModelId {
    pub fn all() -> Vec<ModelId> {
        use Party::*;
        use Task::*;
        let pairs = [vec![Bc, Ot], vec![Bc, Wcf], vec![Ot, Wcf], vec![Bc, Wcf, Ot]];
        let mut out = vec![
            ModelId::Base(Bc, Alice),
            ModelId::Base(Bc, Bob),
            ModelId::Base(Wcf, Alice),
            ModelId::Base(Wcf, Bob),
            ModelId::Base(Ot, Alice),
            ModelId::Base(Ot, Bob),
        ];
        for tasks in pairs {
            out.push(ModelId::SwitchAlice(tasks.clone()));
            out.push(ModelId::SwitchBob(tasks));
        }
        out.extend([
            ModelId::Rot { variant: 1, party: Alice },
            ModelId::Rot { variant: 1, party: Bob },
            ModelId::Rot { variant: 2, party: Alice },
            ModelId::Rot { variant: 2, party: Bob },
            ModelId::Base(Xot, Alice),
            ModelId::Base(Dr3, Alice),
            ModelId::XotDrSwitchAlice,
            ModelId::ScfSwitchBob,
        ]);
        out
    }

    pub fn name(&self) -> String {
        self.to_string()
    }

    pub fn party(&self) -> Party {
        match self {
            ModelId::Base(_, p) | ModelId::Rot { party: p, .. } => *p,
            ModelId::SwitchAlice(_) | ModelId::XotDrSwitchAlice => Party::Alice,
            ModelId::SwitchBob(_) | ModelId::ScfSwitchBob => Party::Bob,
        }
    }

    /// The two-stage form, for models built from scenarios.
    pub fn two_stage(&self) -> Result<Option<TwoStageSdp>> {
        match self {
            ModelId::SwitchAlice(tasks) => Ok(Some(build_switch_alice(tasks, &uniform(tasks.len()))?)),
            ModelId::XotDrSwitchAlice => Ok(Some(build_xot_dr_switch_alice()?)),
            _ => Ok(None),
        }
    }

    /// The flattened problem handed to the solver.
    pub fn build(&self) -> Result<SdpProblem> {
        let mut p = match self {
            ModelId::Base(task, party) => build_base(*task, *party)?,
            ModelId::SwitchAlice(_) | ModelId::XotDrSwitchAlice => {
                self.two_stage()?.expect("scenario model").compose()?
            }
            ModelId::SwitchBob(tasks) => build_switch_bob(tasks)?,
            ModelId::Rot { variant, party } => build_rot_switch(*variant, *party)?,
            ModelId::ScfSwitchBob => build_scf_switch_bob()?,
        };
        p.name = self.name();
        Ok(p)
    }
}

fn task_list(tasks: &[Task]) -> String {
    tasks.iter().map(|t| t.name().to_ascii_lowercase()).collect::<Vec<_>>().join("+")
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelId::Base(task, party) => {
                let who = if *party == Party::Alice { "alice" } else { "bob" };
                write!(f, "{}_{who}", task.name().to_ascii_lowercase())
            }
            ModelId::SwitchAlice(tasks) => write!(f, "switch_alice:{}", task_list(tasks)),
            ModelId::SwitchBob(tasks) => write!(f, "switch_bob:{}", task_list(tasks)),
            ModelId::Rot { variant, party } => {
                let who = if *party == Party::Alice { "alice" } else { "bob" };
                write!(f, "rot{variant}_{who}")
            }
            ModelId::XotDrSwitchAlice => f.write_str("switch_xot_dr_alice"),
            ModelId::ScfSwitchBob => f.write_str("scf_switch_bob"),
        }
    }
}

impl FromStr for ModelId {
    type Err = Error;

    /// Exact names from [`ModelId::all`]; switch task lists may come in any order.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let unknown = || Error::UnknownModel(s.clone());
        if let Some((head, list)) = s.split_once(':') {
            let mut wanted: Vec<Task> = list.split('+').map(str::parse).collect::<Result<_>>().map_err(|_| unknown())?;
            wanted.sort();
            return ModelId::all()
                .into_iter()
                .find(|m| match m {
                    ModelId::SwitchAlice(t) | ModelId::SwitchBob(t) => {
                        let mut t = t.clone();
                        t.sort();
                        m.to_string().starts_with(&format!("{head}:")) && t == wanted
                    }
                    _ => false,
                })
                .ok_or_else(unknown);
        }
        ModelId::all().into_iter().find(|m| m.to_string() == s).ok_or_else(unknown)
    }
}

/// Solve `model` with its first-message variable pinned to `first_message`.
pub fn restrict_and_solve(
    model: &ModelId,
    first_message: &TensorOperator,
    opts: &SolverOptions,
    reduce: bool,
) -> Result<Solution> {
    let problem = restricted_problem(model, first_message)?;
    solve(&problem, opts, reduce)
}

/// The problem solved by [`restrict_and_solve`].
pub fn restricted_problem(model: &ModelId, first_message: &TensorOperator) -> Result<SdpProblem> {
    let mut problem = model.build()?;
    let var = problem
        .first_message
        .clone()
        .ok_or_else(|| Error::Domain(format!("model {model} has no first-message variable")))?;
    let expected = problem.variable(&var)?.space.clone();
    if !first_message.space().same_registers(&expected) {
        return Err(Error::Dimension(format!(
            "first message of {model} lives on {expected}, got an operator on {}",
            first_message.space()
        )));
    }
    if !first_message.is_density(DENSITY_TOL) {
        return Err(Error::Domain("first message is not a density operator".into()));
    }
    let pinned = first_message.aligned_to(&expected)?;
    problem.add_constraint(
        format!("fixed({var})"),
        vec![Term::new(var.clone(), LinearMap::identity(expected))],
        pinned,
    )?;
    Ok(problem)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twenty_two_models_with_unique_names() {
        let all = ModelId::all();
        assert_eq!(all.len(), 22);
        let mut names: Vec<String> = all.iter().map(ModelId::name).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), 22);
    }

    #[test]
    fn names_round_trip_and_switches_ignore_order() {
        for m in ModelId::all() {
            assert_eq!(m.name().parse::<ModelId>().unwrap(), m);
        }
        let m: ModelId = "switch_alice:ot+bc".parse().unwrap();
        assert_eq!(m.name(), "switch_alice:bc+ot");
        let m: ModelId = "SWITCH_BOB:OT+WCF+BC".parse().unwrap();
        assert_eq!(m.name(), "switch_bob:bc+wcf+ot");
        assert!(matches!("nonsense".parse::<ModelId>(), Err(Error::UnknownModel(_))));
        assert!("switch_alice:bc+xot".parse::<ModelId>().is_err());
    }

    #[test]
    fn every_model_builds() {
        for m in ModelId::all() {
            let p = m.build().unwrap_or_else(|e| panic!("{m}: {e}"));
            assert_eq!(p.name, m.name());
            for c in p.objective().values() {
                assert!(c.is_hermitian(1e-12));
            }
        }
    }

    #[test]
    fn largest_variable_is_864() {
        let p = ModelId::Rot { variant: 2, party: Party::Bob }.build().unwrap();
        assert_eq!(p.variable("interim").unwrap().space.dim(), 864);
    }

    #[test]
    fn restriction_checks_input() {
        let m = ModelId::Base(Task::Bc, Party::Alice);
        let b = space(&[("B", 3)]).unwrap();
        let not_density = TensorOperator::diagonal(b.clone(), &[1.0, 1.0, 0.0]).unwrap();
        assert!(matches!(restricted_problem(&m, &not_density), Err(Error::Domain(_))));
        let wrong = TensorOperator::identity(space(&[("B", 2)]).unwrap()).scale(0.5);
        assert!(matches!(restricted_problem(&m, &wrong), Err(Error::Dimension(_))));
        let bob = ModelId::Base(Task::Bc, Party::Bob);
        let ok = TensorOperator::identity(b).scale(1.0 / 3.0);
        assert!(matches!(restricted_problem(&bob, &ok), Err(Error::Domain(_))));
    }
}
