//! Infeasible-start primal-dual path following with the HKM direction and
//! Mehrotra predictor-corrector steps.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::psd::{max_step, spd_inverse, symmetrize};
use super::{check_row_budget, measures, RawSolution, SolverOptions, Status};
use crate::error::Result;
use crate::linalg::Cholesky;
use crate::sdp::CanonicalSdp;

const STEP_FRACTION: f64 = 0.99;
/// Iterates this large mean the problem has no bounded optimum.
const DIVERGENCE: f64 = 1e12;

type Entries = Vec<(usize, usize, f64)>;

/// Rows touching each block, with their entries restricted to it.
fn rows_by_block(p: &CanonicalSdp) -> Vec<Vec<(usize, Entries)>> {
    let mut out: Vec<Vec<(usize, Entries)>> = vec![Vec::new(); p.blocks.len()];
    for (r, row) in p.rows.iter().enumerate() {
        let mut per: Vec<Entries> = vec![Vec::new(); p.blocks.len()];
        for &(k, i, j, v) in &row.entries {
            per[k].push((i, j, v));
        }
        for (k, e) in per.into_iter().enumerate() {
            if !e.is_empty() {
                out[k].push((r, e));
            }
        }
    }
    out
}

/// `X A Zinv` for a sparse symmetric `A`.
fn x_a_zinv(x: &DMatrix<f64>, zinv: &DMatrix<f64>, a: &Entries) -> DMatrix<f64> {
    let n = x.nrows();
    if a.len() < n / 2 {
        let mut g = DMatrix::zeros(n, n);
        for &(p, q, v) in a {
            g.ger(v, &x.column(p), &zinv.row(q).transpose(), 1.0);
            if p != q {
                g.ger(v, &x.column(q), &zinv.row(p).transpose(), 1.0);
            }
        }
        g
    } else {
        let mut xa = DMatrix::zeros(n, n);
        for &(p, q, v) in a {
            xa.column_mut(q).axpy(v, &x.column(p), 1.0);
            if p != q {
                xa.column_mut(p).axpy(v, &x.column(q), 1.0);
            }
        }
        xa * zinv
    }
}

fn sparse_dot(a: &Entries, g: &DMatrix<f64>) -> f64 {
    a.iter()
        .map(|&(p, q, v)| if p == q { v * g[(p, p)] } else { v * (g[(p, q)] + g[(q, p)]) })
        .sum()
}

/// Lower triangle of `M_ij = <A_i, X A_j Zinv>`, mirrored at the end.
fn schur(m: usize, by_block: &[Vec<(usize, Entries)>], x: &[DMatrix<f64>], zinv: &[DMatrix<f64>]) -> DMatrix<f64> {
    let mut mat = DMatrix::<f64>::zeros(m, m);
    for (k, rows) in by_block.iter().enumerate() {
        if rows.is_empty() {
            continue;
        }
        let mut position = vec![usize::MAX; m];
        for (pos, (r, _)) in rows.iter().enumerate() {
            position[*r] = pos;
        }
        mat.as_mut_slice().par_chunks_mut(m).enumerate().for_each(|(j, col)| {
            let pos = position[j];
            if pos == usize::MAX {
                return;
            }
            let g = x_a_zinv(&x[k], &zinv[k], &rows[pos].1);
            for (i, entries) in &rows[pos..] {
                col[*i] += sparse_dot(entries, &g);
            }
        });
    }
    for j in 0..m {
        for i in j + 1..m {
            mat[(j, i)] = mat[(i, j)];
        }
    }
    mat
}

fn factor_schur(mat: &DMatrix<f64>) -> Option<Cholesky> {
    if let Ok(ch) = Cholesky::new(mat.clone()) {
        return Some(ch);
    }
    let scale = (0..mat.nrows()).map(|i| mat[(i, i)]).fold(0.0f64, f64::max).max(1e-300);
    let mut shift = 1e-14 * scale;
    for _ in 0..6 {
        let mut reg = mat.clone();
        for i in 0..reg.nrows() {
            reg[(i, i)] += shift;
        }
        if let Ok(ch) = Cholesky::new(reg) {
            return Some(ch);
        }
        shift *= 100.0;
    }
    None
}

fn inner(a: &[DMatrix<f64>], b: &[DMatrix<f64>]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.dot(y)).sum()
}

struct Direction {
    dx: Vec<DMatrix<f64>>,
    dy: DVector<f64>,
    dz: Vec<DMatrix<f64>>,
}

#[allow(clippy::too_many_arguments)]
fn direction(
    p: &CanonicalSdp,
    schur_mat: &DMatrix<f64>,
    chol: &Cholesky,
    x: &[DMatrix<f64>],
    zinv: &[DMatrix<f64>],
    rp: &DVector<f64>,
    rd: &[DMatrix<f64>],
    target: &[DMatrix<f64>],
) -> Direction {
    let g: Vec<DMatrix<f64>> = (0..x.len()).map(|k| &target[k] - &x[k] - &x[k] * &rd[k] * &zinv[k]).collect();
    let rhs = p.apply(&g) - rp;
    let mut dy = chol.solve(&rhs);
    // One step of iterative refinement keeps late iterations accurate.
    let res = &rhs - schur_mat * &dy;
    dy += chol.solve(&res);
    let aty = p.adjoint(&dy);
    let dz: Vec<DMatrix<f64>> = (0..x.len()).map(|k| &aty[k] + &rd[k]).collect();
    let dx: Vec<DMatrix<f64>> = (0..x.len())
        .map(|k| symmetrize(&(&target[k] - &x[k] * &dz[k] * &zinv[k])) - &x[k])
        .collect();
    Direction { dx, dy, dz }
}

fn step_length(x: &[DMatrix<f64>], d: &[DMatrix<f64>]) -> f64 {
    let a = x.iter().zip(d).map(|(x, d)| max_step(x, d)).fold(f64::INFINITY, f64::min);
    (STEP_FRACTION * a).min(1.0)
}

pub fn solve(p: &CanonicalSdp, opts: &SolverOptions) -> Result<RawSolution> {
    let m = p.num_rows();
    check_row_budget(m)?;
    let by_block = rows_by_block(p);
    let b = DVector::from_vec(p.rhs.clone());
    let bmax = b.amax();
    let total_n: usize = p.blocks.iter().map(|b| b.size).sum::<usize>().max(1);

    let mut x: Vec<DMatrix<f64>> = p
        .blocks
        .iter()
        .map(|blk| {
            let n = blk.size as f64;
            DMatrix::identity(blk.size, blk.size) * 10f64.max(n.sqrt()).max(bmax * n.sqrt())
        })
        .collect();
    let mut z: Vec<DMatrix<f64>> = p
        .blocks
        .iter()
        .zip(&p.objective)
        .map(|(blk, c)| {
            let n = blk.size as f64;
            DMatrix::identity(blk.size, blk.size) * 10f64.max(n.sqrt()).max(c.norm())
        })
        .collect();
    let mut y = DVector::zeros(m);
    let mut history = Vec::new();
    let mut status = Status::MaxIter;
    let mut iterations = 0;

    let start = std::time::Instant::now();
    loop {
        let (_, _, pinf, dinf, gap) = measures(p, &x, &y, &z);
        if opts.verbosity > 1 {
            eprintln!("ipm {iterations:3}: gap {gap:.3e} pinf {pinf:.3e} dinf {dinf:.3e}");
        }
        if gap <= opts.tol_gap && pinf <= opts.tol_feas && dinf <= opts.tol_feas {
            status = Status::Optimal;
            break;
        }
        if iterations >= opts.max_iterations || opts.out_of_time(start) {
            break;
        }
        if x.iter().any(|m| m.amax() > DIVERGENCE) || y.amax() > DIVERGENCE {
            status = Status::InfeasibleDetected;
            break;
        }
        let Some(zinv) = z.iter().map(spd_inverse).collect::<Option<Vec<_>>>() else {
            status = Status::NumericalFailure;
            break;
        };
        let rp = &b - p.apply(&x);
        let aty = p.adjoint(&y);
        let rd: Vec<DMatrix<f64>> = (0..x.len()).map(|k| &aty[k] - &z[k] - &p.objective[k]).collect();
        let schur_mat = schur(m, &by_block, &x, &zinv);
        let Some(chol) = factor_schur(&schur_mat) else {
            status = Status::NumericalFailure;
            break;
        };
        let mu = inner(&x, &z) / total_n as f64;

        let zero: Vec<DMatrix<f64>> = x.iter().map(|b| DMatrix::zeros(b.nrows(), b.ncols())).collect();
        let pred = direction(p, &schur_mat, &chol, &x, &zinv, &rp, &rd, &zero);
        let ap = step_length(&x, &pred.dx);
        let ad = step_length(&z, &pred.dz);
        let mut mu_aff = 0.0;
        for k in 0..x.len() {
            mu_aff += (&x[k] + &pred.dx[k] * ap).dot(&(&z[k] + &pred.dz[k] * ad));
        }
        mu_aff /= total_n as f64;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

        let target: Vec<DMatrix<f64>> =
            (0..x.len()).map(|k| &zinv[k] * (sigma * mu) - &pred.dx[k] * &pred.dz[k] * &zinv[k]).collect();
        let corr = direction(p, &schur_mat, &chol, &x, &zinv, &rp, &rd, &target);
        let ap = step_length(&x, &corr.dx);
        let ad = step_length(&z, &corr.dz);
        if ap < 1e-12 && ad < 1e-12 {
            status = Status::NumericalFailure;
            break;
        }
        for k in 0..x.len() {
            x[k] = symmetrize(&(&x[k] + &corr.dx[k] * ap));
            z[k] = symmetrize(&(&z[k] + &corr.dz[k] * ad));
        }
        y += &corr.dy * ad;
        iterations += 1;
        history.push(inner(&x, &z));
    }

    let (pobj, dobj, pinf, dinf, gap) = measures(p, &x, &y, &z);
    Ok(RawSolution {
        status,
        x,
        y,
        z,
        primal_objective: pobj,
        dual_objective: dobj,
        primal_residual: pinf,
        dual_residual: dinf,
        gap,
        iterations,
        complementarity_history: history,
    })
}
