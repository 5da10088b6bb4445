//! The fixed generator catalog used by the verification suites.

use alloc::vec::Vec;

use crate::generators::{GeneratorSpec, Interval};

/// Shared interval on which every catalog generator is valid.
pub const CATALOG_LO: f64 = 0.5;
pub const CATALOG_HI: f64 = 3.0;

pub const CATALOG: [&str; 12] = [
    "id",
    "affine:-2:1",
    "pow:2",
    "pow:2|affine:-1:4",
    "pow:3",
    "pow:-1",
    "pow:0.5",
    "exp:1",
    "exp:1|affine:3:-1",
    "exp:-0.5",
    "log",
    "log|affine:2:3",
];

pub fn catalog_interval() -> Interval {
    Interval::new(CATALOG_LO, CATALOG_HI).expect("catalog interval is valid")
}

pub fn catalog() -> Vec<GeneratorSpec> {
    CATALOG.iter().map(|s| s.parse().expect("catalog entries parse")).collect()
}

/// All ordered pairs `(i, j)` with `i ≠ j`.
pub fn ordered_pairs() -> Vec<(usize, usize)> {
    let k = CATALOG.len();
    (0..k).flat_map(|i| (0..k).filter(move |&j| j != i).map(move |j| (i, j))).collect()
}
