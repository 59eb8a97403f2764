//! Alternating direction augmented Lagrangian method on the dual problem,
//! with a cached factorization of `A A^T` and residual-balanced penalty.
//!
//! Works on `min <-C, X>`; reported quantities are converted back to the
//! maximization form.

use nalgebra::{DMatrix, DVector};

use super::psd::project_psd;
use super::{check_row_budget, measures, RawSolution, SolverOptions, Status};
use crate::error::{Error, Result};
use crate::linalg::Cholesky;
use crate::sdp::CanonicalSdp;

const CHECK_EVERY: usize = 10;
const BALANCE_RATIO: f64 = 5.0;
const PENALTY_FACTOR: f64 = 1.6;

pub fn solve(p: &CanonicalSdp, opts: &SolverOptions) -> Result<RawSolution> {
    let m = p.num_rows();
    check_row_budget(m)?;
    let gram = p.gram();
    let chol = Cholesky::new(gram).map_err(|j| Error::Solver(format!("row {j} of A A^T is not positive")))?;
    let b = DVector::from_vec(p.rhs.clone());
    let cmin: Vec<DMatrix<f64>> = p.objective.iter().map(|c| -c).collect();

    let mut x: Vec<DMatrix<f64>> = p.blocks.iter().map(|b| DMatrix::zeros(b.size, b.size)).collect();
    let mut s: Vec<DMatrix<f64>> = x.clone();
    let mut y = DVector::zeros(m);
    let mut mu = 1.0;
    let mut status = Status::MaxIter;
    let mut iterations = 0;

    let report = |x: &[DMatrix<f64>], y: &DVector<f64>, s: &[DMatrix<f64>]| {
        // Maximization form: dual multipliers -y, slack S.
        measures(p, x, &(-y), s)
    };

    let start = std::time::Instant::now();
    loop {
        if iterations > 0 && iterations % CHECK_EVERY == 0 {
            let (_, _, pinf, dinf, gap) = report(&x, &y, &s);
            if opts.verbosity > 1 {
                eprintln!("admm {iterations:6}: gap {gap:.3e} pinf {pinf:.3e} dinf {dinf:.3e} mu {mu:.2e}");
            }
            if gap <= opts.tol_gap && pinf <= opts.tol_feas && dinf <= opts.tol_feas {
                status = Status::Optimal;
                break;
            }
            if pinf > BALANCE_RATIO * dinf {
                mu = (mu * PENALTY_FACTOR).min(1e4);
            } else if dinf > BALANCE_RATIO * pinf {
                mu = (mu / PENALTY_FACTOR).max(1e-4);
            }
        }
        if iterations >= opts.max_iterations || opts.out_of_time(start) {
            break;
        }
        let ax = p.apply(&x);
        let s_minus_c: Vec<DMatrix<f64>> = s.iter().zip(&cmin).map(|(s, c)| s - c).collect();
        let rhs = (&ax - &b) * mu + p.apply(&s_minus_c);
        y = -chol.solve(&rhs);
        let aty = p.adjoint(&y);
        for k in 0..x.len() {
            let v = &cmin[k] - &aty[k] - &x[k] * mu;
            let sk = project_psd(&v);
            x[k] = (&sk - &v) / mu;
            s[k] = sk;
        }
        iterations += 1;
    }

    if iterations == 0 && opts.max_iterations == 0 {
        status = Status::MaxIter;
    }
    let ymax = -&y;
    let (pobj, dobj, pinf, dinf, gap) = measures(p, &x, &ymax, &s);
    Ok(RawSolution {
        status,
        x,
        y: ymax,
        z: s,
        primal_objective: pobj,
        dual_objective: dobj,
        primal_residual: pinf,
        dual_residual: dinf,
        gap,
        iterations,
        complementarity_history: Vec::new(),
    })
}
