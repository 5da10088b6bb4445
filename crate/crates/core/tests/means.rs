mod common;

use common::*;
use meanswitch_core::means::{discrete_mean, double_mean, double_mean_fused};
use meanswitch_core::{ProbabilityVector, SimpleMeasure};
use proptest::prelude::*;

fn weights_and_values() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (1usize..=8).prop_flat_map(|k| (raw_weights(k), proptest::collection::vec(value(), k)))
}

proptest! {
    #[test]
    fn mean_lies_between_values(g in gen_index(), (w, t) in weights_and_values()) {
        let values = to_interval(&t);
        let m = discrete_mean(&gens()[g], &interval(), &normalize(&w), &values).unwrap().value;
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(m >= lo - 1e-12 && m <= hi + 1e-12);
    }

    #[test]
    fn double_mean_lies_between_entries(u in gen_index(), v in gen_index(), (l, mu, xi) in instance_parts()) {
        let m = double_mean(&gens()[u], &gens()[v], &interval(), &l, &mu, &xi).unwrap().value;
        prop_assert!(m >= xi.min() - 1e-12 && m <= xi.max() + 1e-12);
    }

    #[test]
    fn affine_invariance(g in gen_index(), (a, b) in affine_coefficients(), (w, t) in weights_and_values()) {
        let (g, i, w, values) = (gens()[g], interval(), normalize(&w), to_interval(&t));
        let x = discrete_mean(&g, &i, &w, &values).unwrap().value;
        let y = discrete_mean(&g.wrapped(a, b).unwrap(), &i, &w, &values).unwrap().value;
        prop_assert!((x - y).abs() <= 1e-10 * x.abs());
    }

    #[test]
    fn permutation_invariance(g in gen_index(), (w, t) in weights_and_values(), shift in 0usize..8) {
        let (g, i) = (gens()[g], interval());
        let values = to_interval(&t);
        let k = values.len();
        let rot = |v: &[f64]| (0..k).map(|j| v[(j + shift) % k]).collect::<Vec<f64>>();
        let mut rev_w = w.clone();
        rev_w.reverse();
        let mut rev_v = values.clone();
        rev_v.reverse();
        let x = discrete_mean(&g, &i, &normalize(&w), &values).unwrap().value;
        for (pw, pv) in [(rot(&w), rot(&values)), (rev_w, rev_v)] {
            let y = discrete_mean(&g, &i, &normalize(&pw), &pv).unwrap().value;
            prop_assert!((x - y).abs() <= 1e-14 * x.abs(), "{x} vs {y}");
        }
    }

    #[test]
    fn fused_and_staged_agree(u in gen_index(), v in gen_index(), (l, mu, xi) in instance_parts()) {
        let (u, v, i) = (gens()[u], gens()[v], interval());
        let staged = double_mean(&u, &v, &i, &l, &mu, &xi).unwrap().value;
        let fused = double_mean_fused(&u, &v, &i, &l, &mu, &xi).unwrap();
        prop_assert!((staged - fused).abs() <= 1e-12);
    }

    #[test]
    fn equal_values_give_that_value(w in proptest::collection::vec(0.01f64..1.0, 1..10), v in -1e3f64..1e3) {
        let p = normalize(&w);
        let e = p.expectation(&vec![v; p.len()]).unwrap();
        prop_assert!((e - v).abs() <= 1e-14 * v.abs());
    }

    #[test]
    fn measures_are_normalized_and_monotone(
        atoms in proptest::collection::vec((0.0f64..=1.0, 0.01f64..1.0), 0..4),
        uniform_share in 0.0f64..1.0,
        shift in 0.0f64..2.0,
    ) {
        let uniform = if atoms.is_empty() { 1.0 } else { uniform_share };
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        let atoms = atoms.iter().map(|&(x, m)| (x, m * (1.0 - uniform) / total)).collect();
        let measure = SimpleMeasure::new(atoms, uniform).unwrap();
        prop_assert!((measure.integrate(|_| 1.0).unwrap() - 1.0).abs() <= 1e-12);
        let f = |x: f64| (3.0 * x).sin();
        let lower = measure.integrate(f).unwrap();
        let upper = measure.integrate(|x| f(x) + shift * x * x).unwrap();
        prop_assert!(lower <= upper + 1e-12);
    }
}

#[test]
fn degenerate_vectors_are_representable_but_rejectable() {
    let p = ProbabilityVector::point_mass(3, 1).unwrap();
    assert!(!p.is_nondegenerate());
    assert!(p.require_nondegenerate().is_err());
}
