use std::collections::BTreeMap;

use greenkern::kernels::matern_operator;
use greenkern::{adjoint, compose, gram_operator, symbol_norm, symbol_of, DiffOperator, MultiIndex, VectorOperator};
use proptest::prelude::*;

fn op_strategy(dim: usize) -> impl Strategy<Value = DiffOperator> {
    prop::collection::vec(
        (prop::collection::vec(0u32..=3, dim), -4i32..=4),
        1..6,
    )
    .prop_map(move |terms| {
        DiffOperator::from_terms(
            dim,
            terms
                .into_iter()
                .map(|(e, c)| (MultiIndex::new(e).unwrap(), c as f64)),
        )
        .unwrap()
    })
}

fn dim_and_ops() -> impl Strategy<Value = (DiffOperator, DiffOperator)> {
    (1usize..=3).prop_flat_map(|d| (op_strategy(d), op_strategy(d)))
}

proptest! {
    #[test]
    fn adjoint_is_an_involution((a, _) in dim_and_ops()) {
        prop_assert_eq!(adjoint(&adjoint(&a)), a);
    }

    #[test]
    fn adjoint_reverses_composition((a, b) in dim_and_ops()) {
        let lhs = adjoint(&compose(&a, &b).unwrap());
        let rhs = compose(&adjoint(&b), &adjoint(&a)).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn gram_operator_is_self_adjoint((a, b) in dim_and_ops()) {
        let vp = VectorOperator::new(vec![a, b]).unwrap();
        let l = gram_operator(&vp).unwrap();
        prop_assert_eq!(adjoint(&l), l.clone());
        // Its terms are all of even order.
        prop_assert!(l.terms().all(|(alpha, _)| alpha.order() % 2 == 0));
    }

    #[test]
    fn symbols_are_conjugate_symmetric(
        (a, _) in dim_and_ops(),
        x in prop::collection::vec(-3.0f64..3.0, 3),
    ) {
        let x = &x[..a.dim()];
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        let s = symbol_of(&a);
        let (p, q) = (s.eval(x), s.eval(&neg));
        prop_assert!((p - q.conj()).norm() <= 1e-12 * (1.0 + p.norm()));
    }

    #[test]
    fn symbol_norm_is_the_symbol_of_the_gram_operator((a, b) in dim_and_ops()) {
        let vp = VectorOperator::new(vec![a, b]).unwrap();
        let sn = symbol_norm(&vp);
        let l = symbol_of(&gram_operator(&vp).unwrap());
        for x in [[0.3, -1.1, 0.7], [1.5, 0.2, -0.4]] {
            let x = &x[..vp.dim()];
            let (u, v) = (sn.eval(x), l.eval(x));
            prop_assert!((u - v.re).abs() <= 1e-12 * (1.0 + u.abs()));
            prop_assert!(v.im.abs() <= 1e-12 * (1.0 + u.abs()));
            prop_assert!(u >= 0.0);
        }
    }
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

/// Terms of `(σ²I − Δ)^n = Σ_k C(n,k) σ^{2(n−k)} (−1)^k Σ_{|β|=k} k!/β! D^{2β}`.
fn binomial_oracle(sigma: f64, n: u32, dim: usize) -> BTreeMap<Vec<u32>, f64> {
    fn compositions(k: u32, parts: usize) -> Vec<Vec<u32>> {
        if parts == 1 {
            return vec![vec![k]];
        }
        (0..=k)
            .flat_map(|first| {
                compositions(k - first, parts - 1).into_iter().map(move |mut rest| {
                    rest.insert(0, first);
                    rest
                })
            })
            .collect()
    }
    let mut out = BTreeMap::new();
    for k in 0..=n {
        let binom = factorial(n) / (factorial(k) * factorial(n - k));
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        for beta in compositions(k, dim) {
            let multinomial = factorial(k) / beta.iter().map(|&b| factorial(b)).product::<f64>();
            let alpha: Vec<u32> = beta.iter().map(|b| 2 * b).collect();
            *out.entry(alpha).or_insert(0.0) +=
                binom * sigma.powi(2 * (n - k) as i32) * sign * multinomial;
        }
    }
    out
}

#[test]
fn matern_gram_is_the_binomial_expansion() {
    for dim in 1..=3 {
        for n in 1..=4 {
            for sigma in [0.5, 1.0, 2.0] {
                let l = gram_operator(&matern_operator(sigma, n, dim).unwrap()).unwrap();
                let oracle = binomial_oracle(sigma, n, dim);
                let got: BTreeMap<Vec<u32>, f64> =
                    l.terms().map(|(a, c)| (a.exponents().to_vec(), c)).collect();
                assert_eq!(
                    got.keys().collect::<Vec<_>>(),
                    oracle.keys().collect::<Vec<_>>(),
                    "term set, d={dim} n={n} σ={sigma}"
                );
                for (alpha, want) in &oracle {
                    let have = got[alpha];
                    // The weights enter as square roots, so the products are
                    // exact only up to the rounding of sqrt.
                    assert!(
                        (have - want).abs() <= 1e-12 * want.abs(),
                        "d={dim} n={n} σ={sigma} α={alpha:?}: {have} vs {want}"
                    );
                }
            }
        }
    }
}

#[test]
fn integer_weight_matern_gram_is_bitwise_exact() {
    // With σ = 1 and n = 1 both weights are exactly 1.
    let l = gram_operator(&matern_operator(1.0, 1, 2).unwrap()).unwrap();
    let oracle = binomial_oracle(1.0, 1, 2);
    let got: BTreeMap<Vec<u32>, f64> = l.terms().map(|(a, c)| (a.exponents().to_vec(), c)).collect();
    assert_eq!(got, oracle);
}
