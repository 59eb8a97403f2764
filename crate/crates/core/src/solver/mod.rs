//! Primal-dual interior point and ADMM backends for canonical SDPs.

mod admm;
mod certify;
mod ipm;
mod psd;

use std::collections::BTreeMap;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

pub use certify::{certify, verify_candidate, Certificate, CandidateReport};

use crate::error::{Error, Result};
use crate::sdp::{canonicalize, facial_reduce, CanonicalSdp, ReducedProblem, SdpProblem};
use crate::tensor::TensorOperator;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Ipm,
    Admm,
}

impl std::fmt::Display for Backend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Backend::Ipm => "ipm",
            Backend::Admm => "admm",
        })
    }
}

impl std::str::FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ipm" => Ok(Backend::Ipm),
            "admm" => Ok(Backend::Admm),
            other => Err(Error::Parse(format!("unknown backend `{other}` (expected ipm or admm)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub backend: Backend,
    pub tol_gap: f64,
    pub tol_feas: f64,
    /// Zero is allowed and returns the starting point with status `max_iter`.
    pub max_iterations: usize,
    /// Wall-clock budget in seconds; when it runs out the status is `max_iter`.
    pub time_limit: Option<f64>,
    pub verbosity: u8,
}

impl SolverOptions {
    pub fn ipm() -> Self {
        Self { backend: Backend::Ipm, tol_gap: 1e-8, tol_feas: 1e-8, max_iterations: 200, time_limit: None, verbosity: 0 }
    }

    pub fn admm() -> Self {
        Self { backend: Backend::Admm, tol_gap: 1e-6, tol_feas: 1e-6, max_iterations: 50_000, time_limit: None, verbosity: 0 }
    }

    pub fn for_backend(backend: Backend) -> Self {
        match backend {
            Backend::Ipm => Self::ipm(),
            Backend::Admm => Self::admm(),
        }
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tol_gap = tol;
        self.tol_feas = tol;
        self
    }

    pub fn with_time_limit(mut self, seconds: f64) -> Self {
        self.time_limit = Some(seconds);
        self
    }

    pub(crate) fn out_of_time(&self, start: Instant) -> bool {
        self.time_limit.is_some_and(|t| start.elapsed().as_secs_f64() >= t)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol_gap > 0.0) || !(self.tol_feas > 0.0) {
            return Err(Error::Domain("solver tolerances must be positive".into()));
        }
        Ok(())
    }
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self::ipm()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Optimal,
    MaxIter,
    InfeasibleDetected,
    NumericalFailure,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Optimal => "optimal",
            Status::MaxIter => "max_iter",
            Status::InfeasibleDetected => "infeasible_detected",
            Status::NumericalFailure => "numerical_failure",
        })
    }
}

/// Iterates of a backend on the canonical problem, maximization form:
/// primal `W`, dual `y`, slack `Z = A^T y - C`.
#[derive(Clone, Debug)]
pub struct RawSolution {
    pub status: Status,
    pub x: Vec<DMatrix<f64>>,
    pub y: DVector<f64>,
    pub z: Vec<DMatrix<f64>>,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub gap: f64,
    pub iterations: usize,
    /// `<X, Z>` after every iteration (IPM only).
    pub complementarity_history: Vec<f64>,
}

/// Result of solving a structured problem.
#[derive(Clone, Debug)]
pub struct SolveResult {
    pub model: String,
    pub backend: Backend,
    pub status: Status,
    pub value: f64,
    pub dual_value: f64,
    pub gap: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub iterations: usize,
    pub wall_ms: f64,
    /// Optimal point on the original variable spaces.
    pub primal: BTreeMap<String, TensorOperator>,
    /// Dual multiplier of every kept canonical row.
    pub duals: Vec<f64>,
    pub reduced: bool,
    pub raw: RawSolution,
}

impl SolveResult {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "model": self.model,
            "backend": self.backend.to_string(),
            "status": self.status.to_string(),
            "value": self.value,
            "gap": self.gap,
            "primal_residual": self.primal_residual,
            "dual_residual": self.dual_residual,
            "iterations": self.iterations,
            "wall_ms": self.wall_ms,
        })
    }
}

/// A solve together with the canonical data it ran on.
#[derive(Clone, Debug)]
pub struct Solution {
    pub result: SolveResult,
    pub canonical: CanonicalSdp,
    pub reduction: Option<ReducedProblem>,
}

/// Both backends hold a dense `m x m` matrix over the constraint rows.
const ROW_MATRIX_BYTES_LIMIT: usize = 2_500_000_000;

pub(crate) fn check_row_budget(m: usize) -> Result<()> {
    if m.saturating_mul(m).saturating_mul(8) > ROW_MATRIX_BYTES_LIMIT {
        return Err(Error::Solver(format!(
            "{m} constraint rows need a {:.1} GB dense row matrix; enable facial reduction",
            (m as f64).powi(2) * 8.0 / 1e9
        )));
    }
    Ok(())
}

/// Run a backend on canonical data.
pub fn solve_canonical(p: &CanonicalSdp, opts: &SolverOptions) -> Result<RawSolution> {
    opts.validate()?;
    match opts.backend {
        Backend::Ipm => ipm::solve(p, opts),
        Backend::Admm => admm::solve(p, opts),
    }
}

/// Canonicalize (optionally after facial reduction), solve, and map back.
pub fn solve(problem: &SdpProblem, opts: &SolverOptions, reduce: bool) -> Result<Solution> {
    let start = Instant::now();
    let reduction = if reduce { Some(facial_reduce(problem)?) } else { None };
    let target = reduction.as_ref().map_or(problem, |r| &r.problem);
    let canonical = canonicalize(target)?;
    if opts.verbosity > 0 {
        eprintln!(
            "{}: blocks {:?}, {} rows ({} dropped)",
            problem.name,
            canonical.blocks.iter().map(|b| b.size).collect::<Vec<_>>(),
            canonical.num_rows(),
            canonical.dropped_rows
        );
    }
    let raw = solve_canonical(&canonical, opts)?;
    let mut on_target = BTreeMap::new();
    for (k, w) in raw.x.iter().enumerate() {
        on_target.insert(canonical.blocks[k].variable.clone(), canonical.block_operator(k, w));
    }
    let primal = match &reduction {
        Some(r) => r.lift(&on_target)?,
        None => on_target,
    };
    let result = SolveResult {
        model: problem.name.clone(),
        backend: opts.backend,
        status: raw.status,
        value: raw.primal_objective,
        dual_value: raw.dual_objective,
        gap: raw.gap,
        primal_residual: raw.primal_residual,
        dual_residual: raw.dual_residual,
        iterations: raw.iterations,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
        primal,
        duals: raw.y.iter().copied().collect(),
        reduced: reduction.as_ref().is_some_and(|r| r.changed),
        raw,
    };
    Ok(Solution { result, canonical, reduction })
}

/// Residual and gap measures shared by both backends (maximization form).
pub(crate) fn measures(
    p: &CanonicalSdp,
    x: &[DMatrix<f64>],
    y: &DVector<f64>,
    z: &[DMatrix<f64>],
) -> (f64, f64, f64, f64, f64) {
    let b = DVector::from_vec(p.rhs.clone());
    let rp = &b - p.apply(x);
    let aty = p.adjoint(y);
    let mut rd_sq = 0.0;
    let mut c_sq = 0.0;
    for k in 0..x.len() {
        rd_sq += (&aty[k] - &z[k] - &p.objective[k]).norm_squared();
        c_sq += p.objective[k].norm_squared();
    }
    let pobj = p.objective_value(x);
    let dobj = b.dot(y);
    let pinf = rp.norm() / (1.0 + b.norm());
    let dinf = rd_sq.sqrt() / (1.0 + c_sq.sqrt());
    let compl: f64 = x.iter().zip(z).map(|(a, b)| a.dot(b)).sum();
    let denom = 1.0 + pobj.abs() + dobj.abs();
    let gap = ((pobj - dobj).abs() / denom).max(compl.abs() / denom);
    (pobj, dobj, pinf, dinf, gap)
}
