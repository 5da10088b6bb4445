mod common;

use common::*;
use meanswitch_core::{GeneratorSpec, Interval};
use proptest::prelude::*;

fn round_trip_error(g: &GeneratorSpec, i: &Interval, x: f64) -> f64 {
    let back = g.invert(i, g.evaluate(i, x).unwrap()).unwrap();
    (back - x).abs() / x.abs().max(1.0)
}

#[test]
fn round_trip_on_dense_grid() {
    let extra = [("pow:2", 0.0, 10.0), ("exp:2", -3.0, 3.0), ("pow:-2", 0.1, 5.0), ("log|affine:-1:0", 1.0, 100.0)];
    let mut cases: Vec<(GeneratorSpec, Interval)> = gens().into_iter().map(|g| (g, interval())).collect();
    cases.extend(extra.iter().map(|(s, lo, hi)| (s.parse().unwrap(), Interval::new(*lo, *hi).unwrap())));
    for (g, i) in cases {
        for k in 0..=4096 {
            let x = i.lerp(k as f64 / 4096.0);
            assert!(round_trip_error(&g, &i, x) <= 1e-10, "{g} at {x}");
        }
    }
}

#[test]
fn monotone_with_constant_sign() {
    let i = interval();
    for g in gens() {
        let ys: Vec<f64> = (0..=2000).map(|k| g.evaluate(&i, i.lerp(k as f64 / 2000.0)).unwrap()).collect();
        let up = ys[1] > ys[0];
        assert!(ys.windows(2).all(|w| (w[1] > w[0]) == up && w[1] != w[0]), "{g}");
    }
}

proptest! {
    #[test]
    fn round_trip_random(k in gen_index(), t in value()) {
        let i = interval();
        prop_assert!(round_trip_error(&gens()[k], &i, i.lerp(t)) <= 1e-10);
    }

    #[test]
    fn image_brackets_values(k in gen_index(), t in value()) {
        let (g, i) = (gens()[k], interval());
        let image = g.image(&i).unwrap();
        prop_assert!(image.contains(g.evaluate(&i, i.lerp(t)).unwrap()));
    }

    #[test]
    fn wrap_composes(k in gen_index(), (a, b) in affine_coefficients(), t in value()) {
        let (g, i) = (gens()[k], interval());
        let x = i.lerp(t);
        let wrapped = g.wrapped(a, b).unwrap().evaluate(&i, x).unwrap();
        let direct = a * g.evaluate(&i, x).unwrap() + b;
        prop_assert!((wrapped - direct).abs() <= 1e-14 * direct.abs().max(1.0), "{wrapped} vs {direct}");
    }

    #[test]
    fn text_round_trip(k in gen_index(), (a, b) in affine_coefficients()) {
        let g = gens()[k].wrapped(a, b).unwrap();
        let back: GeneratorSpec = g.to_string().parse().unwrap();
        prop_assert_eq!(back, g);
    }
}
