use std::collections::BTreeMap;

use serde_json::{json, Value};

use super::map::LinearMap;
use crate::error::{Error, Result};
use crate::tensor::{Space, TensorOperator, HERMITIAN_TOL};

/// A positive semidefinite matrix variable on a labelled space.
#[derive(Clone, Debug, PartialEq)]
pub struct Variable {
    pub name: String,
    pub space: Space,
}

/// One summand `map(variable)` of a linear constraint.
#[derive(Clone, Debug)]
pub struct Term {
    pub variable: String,
    pub map: LinearMap,
}

impl Term {
    pub fn new(variable: impl Into<String>, map: LinearMap) -> Self {
        Self { variable: variable.into(), map }
    }
}

/// `sum_k terms[k] = rhs`.
#[derive(Clone, Debug)]
pub struct Constraint {
    pub label: String,
    pub terms: Vec<Term>,
    pub rhs: TensorOperator,
}

/// The right-hand side of an equality.
pub enum EqualityRhs {
    Constant(TensorOperator),
    Term(Term),
}

/// `max sum_v <C_v, X_v>` subject to linear equalities, every `X_v` PSD.
#[derive(Clone, Debug, Default)]
pub struct SdpProblem {
    pub name: String,
    variables: Vec<Variable>,
    objective: BTreeMap<String, TensorOperator>,
    constraints: Vec<Constraint>,
    /// Variable holding the first message sent, when the model has one.
    pub first_message: Option<String>,
}

impl SdpProblem {
    pub fn new(name: impl Into<String>) -> Self {
        Self { name: name.into(), ..Default::default() }
    }

    pub fn declare_variable(&mut self, name: impl Into<String>, space: Space) -> Result<()> {
        let name = name.into();
        if self.variables.iter().any(|v| v.name == name) {
            return Err(Error::DuplicateName(name));
        }
        self.variables.push(Variable { name, space });
        Ok(())
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn variable(&self, name: &str) -> Result<&Variable> {
        self.variables
            .iter()
            .find(|v| v.name == name)
            .ok_or_else(|| Error::Domain(format!("no variable `{name}` in problem `{}`", self.name)))
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn objective(&self) -> &BTreeMap<String, TensorOperator> {
        &self.objective
    }

    /// Add `<coefficient, X_var>` to the objective.
    pub fn add_objective(&mut self, var: &str, coefficient: TensorOperator) -> Result<()> {
        let space = self.variable(var)?.space.clone();
        if !coefficient.is_hermitian(HERMITIAN_TOL) {
            return Err(Error::Domain(format!("objective coefficient for `{var}` is not Hermitian")));
        }
        if !coefficient.space().same_registers(&space) {
            return Err(Error::Dimension(format!(
                "objective coefficient on {} for variable `{var}` on {space}",
                coefficient.space()
            )));
        }
        let coefficient = coefficient.aligned_to(&space)?;
        let entry = self.objective.entry(var.to_string()).or_insert_with(|| TensorOperator::zeros(space));
        *entry = entry.add(&coefficient)?;
        Ok(())
    }

    /// Add `sum terms = rhs`.
    pub fn add_constraint(&mut self, label: impl Into<String>, terms: Vec<Term>, rhs: TensorOperator) -> Result<()> {
        let label = label.into();
        if terms.is_empty() {
            return Err(Error::Domain(format!("constraint `{label}` has no terms")));
        }
        let out = terms[0].map.output_space();
        for t in &terms {
            let var = self.variable(&t.variable)?;
            if t.map.input_space() != var.space {
                return Err(Error::Dimension(format!(
                    "constraint `{label}`: map expects {} but `{}` lives on {}",
                    t.map.input_space(),
                    t.variable,
                    var.space
                )));
            }
            if t.map.output_space() != out {
                return Err(Error::Dimension(format!(
                    "constraint `{label}`: terms map into {} and {}",
                    out,
                    t.map.output_space()
                )));
            }
        }
        if !rhs.space().same_registers(&out) {
            return Err(Error::Dimension(format!(
                "constraint `{label}`: left side on {out}, right side on {}",
                rhs.space()
            )));
        }
        if !rhs.is_hermitian(HERMITIAN_TOL) {
            return Err(Error::Domain(format!("constraint `{label}`: right side is not Hermitian")));
        }
        let rhs = rhs.aligned_to(&out)?;
        self.constraints.push(Constraint { label, terms, rhs });
        Ok(())
    }

    /// `lhs = rhs` where the right side is a constant or another mapped variable.
    pub fn add_equality(&mut self, label: impl Into<String>, lhs: Term, rhs: EqualityRhs) -> Result<()> {
        match rhs {
            EqualityRhs::Constant(c) => self.add_constraint(label, vec![lhs], c),
            EqualityRhs::Term(t) => {
                let out = t.map.output_space();
                let neg = Term::new(t.variable, t.map.scaled(-1.0));
                self.add_constraint(label, vec![lhs, neg], TensorOperator::zeros(out))
            }
        }
    }

    /// `Tr X_var = 1`.
    pub fn add_unit_trace(&mut self, var: &str) -> Result<()> {
        let space = self.variable(var)?.space.clone();
        let map = LinearMap::partial_trace(&space, &space.labels())?;
        self.add_constraint(
            format!("trace({var})"),
            vec![Term::new(var, map)],
            TensorOperator::identity(Space::trivial()),
        )
    }

    /// True when every constant and map coefficient is real.
    pub fn is_real(&self) -> bool {
        self.objective.values().all(|c| c.is_real(0.0))
            && self
                .constraints
                .iter()
                .all(|c| c.rhs.is_real(0.0) && c.terms.iter().all(|t| t.map.is_real()))
    }

    /// Objective value of an assignment.
    pub fn objective_value(&self, assignment: &BTreeMap<String, TensorOperator>) -> Result<f64> {
        let mut total = 0.0;
        for (var, coef) in &self.objective {
            let x = assignment
                .get(var)
                .ok_or_else(|| Error::Domain(format!("assignment is missing variable `{var}`")))?;
            total += crate::tensor::frobenius_inner(coef.matrix(), x.aligned_to(coef.space())?.matrix());
        }
        Ok(total)
    }

    /// Frobenius norm of `sum terms - rhs` for every constraint.
    pub fn constraint_residuals(&self, assignment: &BTreeMap<String, TensorOperator>) -> Result<Vec<f64>> {
        self.constraints
            .iter()
            .map(|c| {
                let mut acc = c.rhs.matrix().scale(-1.0);
                for t in &c.terms {
                    let x = assignment
                        .get(&t.variable)
                        .ok_or_else(|| Error::Domain(format!("assignment is missing variable `{}`", t.variable)))?;
                    acc += t.map.apply(x)?.matrix();
                }
                Ok(acc.norm())
            })
            .collect()
    }

    /// A copy with every variable renamed to `prefix/name`.
    pub fn prefixed(&self, prefix: &str) -> SdpProblem {
        let rename = |n: &str| format!("{prefix}/{n}");
        SdpProblem {
            name: self.name.clone(),
            variables: self
                .variables
                .iter()
                .map(|v| Variable { name: rename(&v.name), space: v.space.clone() })
                .collect(),
            objective: self.objective.iter().map(|(k, v)| (rename(k), v.clone())).collect(),
            constraints: self
                .constraints
                .iter()
                .map(|c| Constraint {
                    label: format!("{prefix}/{}", c.label),
                    terms: c.terms.iter().map(|t| Term::new(rename(&t.variable), t.map.clone())).collect(),
                    rhs: c.rhs.clone(),
                })
                .collect(),
            first_message: self.first_message.as_deref().map(rename),
        }
    }

    /// Scale every objective coefficient.
    pub fn scale_objective(&mut self, factor: f64) {
        for v in self.objective.values_mut() {
            *v = v.scale(factor);
        }
    }

    /// Merge all variables, objective terms and constraints of `other`.
    pub fn absorb(&mut self, other: SdpProblem) -> Result<()> {
        for v in other.variables {
            self.declare_variable(v.name, v.space)?;
        }
        for (k, c) in other.objective {
            self.add_objective(&k, c)?;
        }
        for c in other.constraints {
            self.add_constraint(c.label, c.terms, c.rhs)?;
        }
        Ok(())
    }

    /// Human-readable dump with composition trees.
    pub fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "first_message": self.first_message,
            "variables": self.variables.iter().map(|v| json!({
                "name": v.name,
                "space": v.space.registers().iter().map(|r| json!([r.label, r.dim])).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
            "objective": self.objective.iter().map(|(k, c)| json!({"variable": k, "coefficient": c.to_json()})).collect::<Vec<_>>(),
            "constraints": self.constraints.iter().map(|c| json!({
                "label": c.label,
                "terms": c.terms.iter().map(|t| json!({"variable": t.variable, "map": t.map.to_json()})).collect::<Vec<_>>(),
                "rhs": c.rhs.to_json(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// One second-stage branch of a two-stage program.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    pub probability: f64,
    pub problem: SdpProblem,
    /// Maps a variable of `problem` onto the stage-one space.
    pub binding: Term,
}

/// `max sum_w p_w <C_w, Y_w>` where each branch is tied to a shared
/// stage-one variable through `binding_w(Y_w) = X`.
#[derive(Clone, Debug)]
pub struct TwoStageSdp {
    pub name: String,
    pub stage_one: Variable,
    pub scenarios: Vec<Scenario>,
}

impl TwoStageSdp {
    pub fn new(name: impl Into<String>, stage_one: Variable, scenarios: Vec<Scenario>) -> Result<Self> {
        if scenarios.is_empty() {
            return Err(Error::Domain("two-stage program needs at least one scenario".into()));
        }
        let mut total = 0.0;
        for s in &scenarios {
            if !(s.probability >= 0.0) {
                return Err(Error::Domain(format!("scenario `{}` has negative probability", s.name)));
            }
            total += s.probability;
            s.problem.variable(&s.binding.variable)?;
            if s.binding.map.output_space() != stage_one.space {
                return Err(Error::Dimension(format!(
                    "scenario `{}` binds onto {} instead of {}",
                    s.name,
                    s.binding.map.output_space(),
                    stage_one.space
                )));
            }
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!("scenario probabilities sum to {total}")));
        }
        Ok(Self { name: name.into(), stage_one, scenarios })
    }

    /// Flatten into one program. Branch variables are renamed `branch/name`.
    pub fn compose(&self) -> Result<SdpProblem> {
        self.flatten(true)
    }

    /// Flatten without the binding equalities: every branch picks its own
    /// first message, so the value is the weighted average of the branch optima.
    pub fn compose_unbound(&self) -> Result<SdpProblem> {
        self.flatten(false)
    }

    fn flatten(&self, bind: bool) -> Result<SdpProblem> {
        let mut out = SdpProblem::new(self.name.clone());
        if bind {
            out.declare_variable(self.stage_one.name.clone(), self.stage_one.space.clone())?;
            out.first_message = Some(self.stage_one.name.clone());
        }
        for s in &self.scenarios {
            let mut branch = s.problem.prefixed(&s.name);
            branch.scale_objective(s.probability);
            branch.first_message = None;
            out.absorb(branch)?;
            if !bind {
                continue;
            }
            let bound = format!("{}/{}", s.name, s.binding.variable);
            out.add_equality(
                format!("bind({})", s.name),
                Term::new(bound, s.binding.map.clone()),
                EqualityRhs::Term(Term::new(
                    self.stage_one.name.clone(),
                    LinearMap::identity(self.stage_one.space.clone()),
                )),
            )?;
        }
        Ok(out)
    }
}

/// Free-function form of [`TwoStageSdp::compose`].
pub fn compose_two_stage(program: &TwoStageSdp) -> Result<SdpProblem> {
    program.compose()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicate_variable_rejected() {
        let mut p = SdpProblem::new("t");
        let s = Space::new(&[("A", 2)]).unwrap();
        p.declare_variable("x", s.clone()).unwrap();
        assert!(matches!(p.declare_variable("x", s), Err(Error::DuplicateName(_))));
    }

    #[test]
    fn constraint_dimension_checked() {
        let mut p = SdpProblem::new("t");
        let s = Space::new(&[("A", 2)]).unwrap();
        p.declare_variable("x", s.clone()).unwrap();
        let rhs = TensorOperator::identity(Space::new(&[("B", 3)]).unwrap());
        let err = p.add_constraint("c", vec![Term::new("x", LinearMap::identity(s))], rhs);
        assert!(matches!(err, Err(Error::Dimension(_))));
    }

    #[test]
    fn probabilities_must_sum_to_one() {
        let s = Space::new(&[("B", 2)]).unwrap();
        let mut p = SdpProblem::new("b");
        p.declare_variable("y", s.clone()).unwrap();
        let scen = |pr: f64| Scenario {
            name: "w".into(),
            probability: pr,
            problem: p.clone(),
            binding: Term::new("y", LinearMap::identity(s.clone())),
        };
        let stage = Variable { name: "x".into(), space: s.clone() };
        assert!(TwoStageSdp::new("t", stage.clone(), vec![scen(0.7)]).is_err());
        assert!(TwoStageSdp::new("t", stage.clone(), vec![scen(-0.5), scen(1.5)]).is_err());
        assert!(TwoStageSdp::new("t", stage, vec![scen(1.0)]).is_ok());
    }
}
