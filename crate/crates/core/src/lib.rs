//! Quasi-arithmetic means on finite and simple probability spaces, and the
//! switch equation that decides when two iterated means commute.
//!
//! For a continuous injection `w` on an interval `I`, the `w`-mean of values
//! `x_i` under weights `p_i` is `w⁻¹(Σ p_i w(x_i))`. A pair of generators
//! `(f, g)` is a switch when the `f`-mean of row-wise `g`-means equals the
//! `g`-mean of column-wise `f`-means for every value matrix. Non-degenerate
//! switches are exactly the affinely related pairs `f = a·g + b`; this crate
//! evaluates both sides, searches for counterexamples, and packages the
//! checks into reproducible suites.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod affinity;
pub mod catalog;
mod error;
pub mod generators;
pub mod means;
pub mod measures;
pub mod nelder_mead;
pub mod numeric;
pub mod rng;
pub mod search;
pub mod switch;
pub mod verify;

pub use error::{Error, ErrorClass, Result};
pub use generators::{Affine, GeneratorImage, GeneratorKind, GeneratorSpec, Interval};
pub use means::{Kernel, MeanValue, ValueMatrix};
pub use measures::{ProbabilityVector, SimpleMeasure};
pub use switch::{ContinuousSwitchInstance, ResidualReport, SwitchInstance};
