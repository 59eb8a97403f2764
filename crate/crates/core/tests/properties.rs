use std::collections::BTreeMap;

use nalgebra::DMatrix;
use proptest::prelude::*;

use cheatlab::catalog::ProtocolId;
use cheatlab::honest::{honest_distribution, input_domains};
use cheatlab::tensor::{c, CMatrix, Space, TensorOperator};

fn random_operator(space: Space, seed: &[f64]) -> TensorOperator {
    let n = space.dim();
    let m = CMatrix::from_fn(n, n, |i, j| c(seed[(i * n + j) % seed.len()], seed[(j * n + i + 1) % seed.len()]));
    TensorOperator::new(space, m).unwrap()
}

/// `G G^dagger / Tr`, a random density operator.
fn random_density(space: Space, seed: &[f64]) -> TensorOperator {
    let g = random_operator(space.clone(), seed);
    let m = g.matrix() * g.matrix().adjoint();
    let t = m.trace().re;
    TensorOperator::new(space, m / c(t, 0.0)).unwrap()
}

fn dims() -> impl Strategy<Value = (usize, usize, usize)> {
    (1usize..4, 1usize..4, 1usize..3)
}

fn seed() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, 7..40)
}

fn close(a: &TensorOperator, b: &TensorOperator) -> bool {
    (a.matrix() - b.matrix()).camax() < 1e-10
}

proptest! {
    #[test]
    fn partial_trace_of_product_factorizes((da, db, _) in dims(), s in seed(), t in seed()) {
        let a = random_operator(Space::new(&[("A", da)]).unwrap(), &s);
        let b = random_operator(Space::new(&[("B", db)]).unwrap(), &t);
        let ab = a.kron(&b).unwrap();
        let reduced = ab.partial_trace(&["B"]).unwrap();
        let tr = b.trace();
        let expected = TensorOperator::new(a.space().clone(), a.matrix() * tr).unwrap();
        prop_assert!(close(&reduced, &expected));
    }

    #[test]
    fn partial_traces_compose((da, db, dc) in dims(), s in seed()) {
        let space = Space::new(&[("A", da), ("B", db), ("C", dc)]).unwrap();
        let rho = random_operator(space, &s);
        let at_once = rho.partial_trace(&["A", "C"]).unwrap();
        let in_steps = rho.partial_trace(&["C"]).unwrap().partial_trace(&["A"]).unwrap();
        prop_assert!(close(&at_once, &in_steps));
        prop_assert!((rho.trace() - at_once.trace()).norm() < 1e-10);
    }

    #[test]
    fn permutation_round_trips((da, db, dc) in dims(), s in seed()) {
        let space = Space::new(&[("A", da), ("B", db), ("C", dc)]).unwrap();
        let rho = random_operator(space.clone(), &s);
        let back = rho.permute(&["C", "A", "B"]).unwrap().aligned_to(&space).unwrap();
        prop_assert!(close(&rho, &back));
    }

    #[test]
    fn partial_trace_keeps_density((da, db, _) in dims(), s in seed()) {
        let rho = random_density(Space::new(&[("A", da), ("B", db)]).unwrap(), &s);
        prop_assert!(rho.is_density(1e-9));
        prop_assert!(rho.partial_trace(&["A"]).unwrap().is_density(1e-9));
    }

    #[test]
    fn real_embedding_preserves_inner_products(n in 1usize..5, s in seed(), t in seed()) {
        let space = Space::new(&[("X", n)]).unwrap();
        let herm = |g: TensorOperator| {
            let m = (g.matrix() + g.matrix().adjoint()) * c(0.5, 0.0);
            TensorOperator::new(space.clone(), m).unwrap()
        };
        let (a, b) = (herm(random_operator(space.clone(), &s)), herm(random_operator(space.clone(), &t)));
        let embedded: f64 = a.real_embed().dot(&b.real_embed());
        prop_assert!((embedded - 2.0 * a.inner(&b).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn diagonal_operator_has_its_entries(d in prop::collection::vec(0.0f64..1.0, 1..6)) {
        let space = Space::new(&[("X", d.len())]).unwrap();
        let op = TensorOperator::diagonal(space, &d).unwrap();
        let expected = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(d.clone()));
        prop_assert!((op.matrix().map(|z| z.re) - expected).amax() == 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn honest_distributions_are_exact_and_normalized(pick in 0usize..1000, values in prop::collection::vec(0usize..4, 6)) {
        let all = ProtocolId::all();
        let id = &all[pick % all.len()];
        let domains = input_domains(id).unwrap();
        // Fix a random subset of the inputs, each to a legal value.
        let fixed: BTreeMap<String, usize> = domains
            .iter()
            .zip(&values)
            .filter(|(_, v)| **v < 3)
            .map(|((name, size), v)| (name.clone(), v % size))
            .collect();
        let d = honest_distribution(id, &fixed).unwrap();
        prop_assert!(d.is_normalized());
    }
}
