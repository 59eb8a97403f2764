use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::{SolveResult, Status};
use crate::error::{Error, Result};
use crate::sdp::{CanonicalSdp, SdpProblem};
use crate::tensor::{real_min_eigenvalue, TensorOperator};

/// How a hand-written assignment fares against a problem.
#[derive(Clone, Debug, Serialize)]
pub struct CandidateReport {
    pub objective: f64,
    /// `(constraint label, Frobenius residual)`.
    pub residuals: Vec<(String, f64)>,
    /// `(variable, smallest eigenvalue)`.
    pub min_eigenvalues: Vec<(String, f64)>,
    pub max_residual: f64,
    pub feasible: bool,
}

/// Check an assignment of every variable against the constraints.
pub fn verify_candidate(
    problem: &SdpProblem,
    candidate: &BTreeMap<String, TensorOperator>,
    tol: f64,
) -> Result<CandidateReport> {
    for v in problem.variables() {
        let x = candidate
            .get(&v.name)
            .ok_or_else(|| Error::Domain(format!("candidate does not assign variable `{}`", v.name)))?;
        if !x.space().same_registers(&v.space) {
            return Err(Error::Dimension(format!(
                "candidate for `{}` lives on {} instead of {}",
                v.name,
                x.space(),
                v.space
            )));
        }
    }
    for name in candidate.keys() {
        problem.variable(name)?;
    }
    let residuals = problem.constraint_residuals(candidate)?;
    let residuals: Vec<(String, f64)> =
        problem.constraints().iter().map(|c| c.label.clone()).zip(residuals).collect();
    let min_eigenvalues: Vec<(String, f64)> = problem
        .variables()
        .iter()
        .map(|v| (v.name.clone(), candidate[&v.name].min_eigenvalue()))
        .collect();
    let hermitian = candidate.values().all(|x| x.is_hermitian(tol.max(1e-12)));
    let max_residual = residuals.iter().map(|r| r.1).fold(0.0, f64::max);
    let feasible = hermitian && max_residual <= tol && min_eigenvalues.iter().all(|e| e.1 >= -tol);
    Ok(CandidateReport { objective: problem.objective_value(candidate)?, residuals, min_eigenvalues, max_residual, feasible })
}

/// Independent check of an optimal solve against the raw canonical data.
#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub primal_residual: f64,
    pub primal_min_eigenvalue: f64,
    pub dual_slack_min_eigenvalue: f64,
    /// Dual objective corrected for any negative slack eigenvalue, using the
    /// trace of the primal point as the scale.
    pub upper_bound: f64,
    pub passed: bool,
}

pub fn certify(result: &SolveResult, canonical: &CanonicalSdp, tol: f64) -> Result<Certificate> {
    if result.status != Status::Optimal {
        return Err(Error::Domain(format!("cannot certify a solve with status {}", result.status)));
    }
    let raw = &result.raw;
    if raw.x.len() != canonical.blocks.len() || raw.y.len() != canonical.num_rows() {
        return Err(Error::Dimension("solution does not match the canonical problem".into()));
    }
    let b = DVector::from_vec(canonical.rhs.clone());
    let primal_objective: f64 = canonical.objective.iter().zip(&raw.x).map(|(c, x)| c.dot(x)).sum();
    let dual_objective = b.dot(&raw.y);
    let primal_residual = (canonical.apply(&raw.x) - &b).norm();
    let aty = canonical.adjoint(&raw.y);
    let slack: Vec<DMatrix<f64>> = aty.iter().zip(&canonical.objective).map(|(a, c)| a - c).collect();
    let primal_min_eigenvalue = raw.x.iter().map(real_min_eigenvalue).fold(f64::INFINITY, f64::min);
    let dual_slack_min_eigenvalue = slack.iter().map(real_min_eigenvalue).fold(f64::INFINITY, f64::min);
    let trace: f64 = raw.x.iter().map(|x| x.trace()).sum();
    let upper_bound = dual_objective + (-dual_slack_min_eigenvalue).max(0.0) * trace;
    let scale = 1.0 + primal_objective.abs() + dual_objective.abs();
    let passed = primal_residual <= tol
        && primal_min_eigenvalue >= -tol
        && dual_slack_min_eigenvalue >= -tol
        && (primal_objective - dual_objective).abs() <= tol * scale
        && upper_bound >= primal_objective - tol * scale;
    Ok(Certificate {
        primal_objective,
        dual_objective,
        primal_residual,
        primal_min_eigenvalue,
        dual_slack_min_eigenvalue,
        upper_bound,
        passed,
    })
}
