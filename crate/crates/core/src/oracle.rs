//! Closed-form reference values computed without any SDP: trace norms,
//! the Helstrom discrimination bound and Uhlmann fidelities.

use crate::error::{Error, Result};
use crate::tensor::{hermitian_eigh, CMatrix, TensorOperator};

fn same_space(a: &TensorOperator, b: &TensorOperator) -> Result<TensorOperator> {
    b.aligned_to(a.space())
        .map_err(|_| Error::Dimension(format!("operators on {} and {}", a.space(), b.space())))
}

/// Sum of absolute eigenvalues of a Hermitian operator.
pub fn trace_norm(a: &TensorOperator) -> f64 {
    hermitian_eigh(a.matrix()).0.iter().map(|l| l.abs()).sum()
}

/// Optimal success probability of telling `rho0` from `rho1`, equal priors.
pub fn helstrom(rho0: &TensorOperator, rho1: &TensorOperator) -> Result<f64> {
    let rho1 = same_space(rho0, rho1)?;
    Ok(0.5 + 0.25 * trace_norm(&rho0.sub(&rho1)?))
}

fn psd_sqrt(m: &CMatrix) -> CMatrix {
    let (vals, vecs) = hermitian_eigh(m);
    let mut scaled = vecs.clone();
    for (k, v) in vals.iter().enumerate() {
        let s = v.max(0.0).sqrt();
        for i in 0..scaled.nrows() {
            scaled[(i, k)] *= s;
        }
    }
    &scaled * vecs.adjoint()
}

/// Root fidelity `Tr sqrt(sqrt(rho) sigma sqrt(rho))`.
pub fn fidelity(rho: &TensorOperator, sigma: &TensorOperator) -> Result<f64> {
    let sigma = same_space(rho, sigma)?;
    let r = psd_sqrt(rho.matrix());
    let inner = &r * sigma.matrix() * &r;
    let inner = (&inner + inner.adjoint()) * crate::tensor::cr(0.5);
    Ok(hermitian_eigh(&inner).0.iter().map(|l| l.max(0.0).sqrt()).sum())
}

/// Best `½[F(σ,ρ0)² + F(σ,ρ1)²]` over `σ = diag(a, a, 1-2a)` on one qutrit,
/// by a grid sweep of `a` refined with golden-section search.
pub fn symmetric_qutrit_commitment_value(rho0: &TensorOperator, rho1: &TensorOperator) -> Result<f64> {
    if rho0.dim() != 3 {
        return Err(Error::Dimension(format!("expected a qutrit operator, got dimension {}", rho0.dim())));
    }
    let rho1 = same_space(rho0, rho1)?;
    let value = |a: f64| -> Result<f64> {
        let sigma = TensorOperator::diagonal(rho0.space().clone(), &[a, a, 1.0 - 2.0 * a])?;
        Ok(0.5 * (fidelity(&sigma, rho0)?.powi(2) + fidelity(&sigma, &rho1)?.powi(2)))
    };
    const STEPS: usize = 500;
    let mut best = (0.0, f64::NEG_INFINITY);
    for k in 0..=STEPS {
        let a = 0.5 * k as f64 / STEPS as f64;
        let v = value(a)?;
        if v > best.1 {
            best = (a, v);
        }
    }
    let h = 0.5 / STEPS as f64;
    let (mut lo, mut hi) = ((best.0 - h).max(0.0), (best.0 + h).min(0.5));
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..60 {
        let (m1, m2) = (hi - g * (hi - lo), lo + g * (hi - lo));
        if value(m1)? < value(m2)? {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    Ok(value(0.5 * (lo + hi))?.max(best.1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{commit_state, rot_state};

    fn bob_view(y: usize) -> TensorOperator {
        commit_state(y).unwrap().density().partial_trace(&["A"]).unwrap()
    }

    #[test]
    fn helstrom_of_commitment_halves() {
        assert!((helstrom(&bob_view(0), &bob_view(1)).unwrap() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn helstrom_of_pure_states() {
        // 1/2 + 1/2 sqrt(1 - |<a|b>|^2) with overlap 1/2.
        let a = rot_state(0).unwrap().density();
        let b = rot_state(1).unwrap().density();
        let expected = 0.5 + 0.5 * 0.75f64.sqrt();
        assert!((helstrom(&a, &b).unwrap() - expected).abs() < 1e-12);
        // The reported four-digit discrimination value.
        assert!((expected - 0.9330).abs() < 5e-5);
    }

    #[test]
    fn fidelity_of_commuting_states() {
        // sum_i sqrt(p_i q_i) over the shared eigenbasis.
        let f = fidelity(&bob_view(0), &bob_view(1)).unwrap();
        assert!((f - 0.5).abs() < 1e-12);
        assert!((fidelity(&bob_view(0), &bob_view(0)).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn commitment_sweep_finds_three_quarters() {
        let v = symmetric_qutrit_commitment_value(&bob_view(0), &bob_view(1)).unwrap();
        assert!((v - 0.75).abs() < 1e-9, "{v}");
    }
}
