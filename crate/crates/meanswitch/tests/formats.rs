use meanswitch::canonical;
use meanswitch::formats::{matrix_to_csv, parse_matrix};
use meanswitch_core::ValueMatrix;
use proptest::prelude::*;
use serde_json::json;

fn finite() -> impl Strategy<Value = f64> {
    any::<f64>().prop_filter("finite", |x| x.is_finite())
}

proptest! {
    #[test]
    fn canonical_floats_round_trip(xs in proptest::collection::vec(finite(), 0..20), n in any::<u64>()) {
        let text = canonical::to_string(&json!({"xs": xs, "n": n, "label": "τ\"\n"}));
        prop_assert_eq!(canonical::normalize(&text).unwrap(), text.clone());
        let back: serde_json::Value = serde_json::from_str(&text).unwrap();
        for (a, b) in back["xs"].as_array().unwrap().iter().zip(&xs) {
            prop_assert_eq!(a.as_f64().unwrap().to_bits(), b.to_bits());
        }
    }

    #[test]
    fn csv_matrices_round_trip(rows in 1usize..5, cols in 1usize..5, seed in proptest::collection::vec(-1e6f64..1e6, 25)) {
        let m = ValueMatrix::new(rows, cols, seed[..rows * cols].to_vec()).unwrap();
        prop_assert_eq!(parse_matrix(&matrix_to_csv(&m)).unwrap(), m);
    }
}
