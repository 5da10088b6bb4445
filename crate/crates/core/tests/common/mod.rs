#![allow(dead_code)]

use meanswitch_core::catalog::{catalog, catalog_interval};
use meanswitch_core::{GeneratorSpec, Interval, ProbabilityVector, ValueMatrix};
use proptest::prelude::*;

pub fn gens() -> Vec<GeneratorSpec> {
    catalog()
}

pub fn interval() -> Interval {
    catalog_interval()
}

pub fn gen_index() -> impl Strategy<Value = usize> {
    0..catalog().len()
}

/// Points of the catalog interval.
pub fn value() -> impl Strategy<Value = f64> {
    0.0f64..=1.0f64
}

pub fn to_interval(ts: &[f64]) -> Vec<f64> {
    let i = interval();
    ts.iter().map(|&t| i.lerp(t)).collect()
}

/// Raw positive weights, normalized on use.
pub fn raw_weights(k: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(0.01f64..1.0, k)
}

pub fn normalize(raw: &[f64]) -> ProbabilityVector {
    let total: f64 = raw.iter().sum();
    ProbabilityVector::new(raw.iter().map(|w| w / total).collect()).unwrap()
}

/// `(m, n, λ, μ, Ξ)` with entries in the catalog interval.
pub fn instance_parts() -> impl Strategy<Value = (ProbabilityVector, ProbabilityVector, ValueMatrix)> {
    (1usize..=4, 1usize..=4).prop_flat_map(|(m, n)| {
        (raw_weights(m), raw_weights(n), proptest::collection::vec(value(), m * n)).prop_map(move |(l, u, t)| {
            (normalize(&l), normalize(&u), ValueMatrix::new(m, n, to_interval(&t)).unwrap())
        })
    })
}

pub fn affine_coefficients() -> impl Strategy<Value = (f64, f64)> {
    (0.1f64..10.0, any::<bool>(), -10.0f64..10.0).prop_map(|(a, neg, b)| (if neg { -a } else { a }, b))
}
