//! Small numeric kernels shared by the rest of the crate: deterministic
//! summation, monotone bisection and Gauss–Legendre quadrature.

use alloc::vec::Vec;

use crate::{Error, Result};

/// Below this many terms sums are accumulated left to right.
pub const PAIRWISE_CUTOFF: usize = 32;

/// Bisection stops once the bracket is narrower than this fraction of its
/// starting width.
pub const BISECTION_REL_TOL: f64 = 1e-13;
pub const BISECTION_MAX_ITER: usize = 200;

pub(crate) fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

/// Sum of `term(i)` for `i in 0..len`: left to right up to
/// [`PAIRWISE_CUTOFF`] terms, pairwise tree above that.
pub fn pairwise_sum_by<F: Fn(usize) -> f64>(len: usize, term: F) -> f64 {
    fn go<F: Fn(usize) -> f64>(start: usize, end: usize, term: &F) -> f64 {
        if end - start <= PAIRWISE_CUTOFF {
            let mut acc = 0.0;
            for i in start..end {
                acc += term(i);
            }
            acc
        } else {
            let mid = start + (end - start) / 2;
            go(start, mid, term) + go(mid, end, term)
        }
    }
    go(0, len, &term)
}

pub fn pairwise_sum(values: &[f64]) -> f64 {
    pairwise_sum_by(values.len(), |i| values[i])
}

/// Weighted sum `Σ weights[i] · values[i]`; callers check lengths.
pub fn dot(weights: &[f64], values: &[f64]) -> f64 {
    debug_assert_eq!(weights.len(), values.len());
    pairwise_sum_by(weights.len(), |i| weights[i] * values[i])
}

/// Solves `func(x) = target` on `[lo, hi]` for a monotone `func` of either
/// orientation. The target must be bracketed by the endpoint values.
pub fn bisect_monotone<F: Fn(f64) -> f64>(func: F, lo: f64, hi: f64, target: f64) -> Result<f64> {
    bisect_monotone_tol(func, lo, hi, target, BISECTION_REL_TOL)
}

/// [`bisect_monotone`] with an explicit relative bracket tolerance; `0.0`
/// bisects until the bracket cannot shrink further.
pub fn bisect_monotone_tol<F: Fn(f64) -> f64>(func: F, lo: f64, hi: f64, target: f64, rel_tol: f64) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let fa = func(a) - target;
    let fb = func(b) - target;
    if !(fa.is_finite() && fb.is_finite()) {
        return Err(Error::NonFinite("bisection bracket"));
    }
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if (fa > 0.0) == (fb > 0.0) {
        return Err(Error::InversionFailure);
    }
    let increasing = fb > 0.0;
    let tol = rel_tol * (hi - lo);
    for _ in 0..BISECTION_MAX_ITER {
        let mid = 0.5 * (a + b);
        if b - a <= tol || mid <= a || mid >= b {
            break;
        }
        let fm = func(mid) - target;
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm > 0.0) == increasing {
            b = mid;
        } else {
            a = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// An `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes are the roots of `P_n`, found by Newton iteration from the
    /// Chebyshev-like initial guesses; weights follow from `P_n'`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "quadrature needs at least one node");
        let mut nodes = alloc::vec![0.0; n];
        let mut weights = alloc::vec![0.0; n];
        let pi = core::f64::consts::PI;
        for i in 0..n.div_ceil(2) {
            let mut x = libm::cos(pi * (i as f64 + 0.75) / (n as f64 + 0.5));
            let mut deriv = 0.0;
            for _ in 0..100 {
                let (p, dp) = legendre_with_derivative(n, x);
                deriv = dp;
                let step = p / dp;
                x -= step;
                if abs(step) <= 1e-16 {
                    let (_, dp) = legendre_with_derivative(n, x);
                    deriv = dp;
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * deriv * deriv);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Composite rule: `panels` equal sub-intervals of `[a, b]`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, panels: usize, func: F) -> f64 {
        let width = (b - a) / panels as f64;
        let half = 0.5 * width;
        pairwise_sum_by(panels, |k| {
            let center = a + (k as f64 + 0.5) * width;
            half * pairwise_sum_by(self.nodes.len(), |i| {
                self.weights[i] * func(center + half * self.nodes[i])
            })
        })
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let n = n as f64;
    (p1, n * (x * p1 - p0) / (x * x - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sixteen_point_rule_matches_tabulated_values() {
        let rule = GaussLegendre::new(16);
        // Abramowitz & Stegun, Table 25.4.
        let expected = [
            (0.095_012_509_837_637_44, 0.189_450_610_455_068_5),
            (0.281_603_550_779_258_9, 0.182_603_415_044_923_6),
            (0.989_400_934_991_649_9, 0.027_152_459_411_754_09),
        ];
        for (x, w) in expected {
            let i = rule.nodes().iter().position(|&n| (n - x).abs() < 1e-12).unwrap();
            assert!((rule.weights()[i] - w).abs() < 1e-14);
        }
        assert!((pairwise_sum(rule.weights()) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn composite_rule_is_exact_for_low_degree_polynomials() {
        let rule = GaussLegendre::new(16);
        let v = rule.integrate(0.0, 1.0, 32, |x| x * x * x * x * x);
        assert!((v - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn pairwise_sum_matches_sequential_for_exact_values() {
        let values: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&values), 499_500.0);
    }

    #[test]
    fn bisection_handles_both_orientations() {
        let up = bisect_monotone(|x| x * x, 0.0, 2.0, 2.0).unwrap();
        assert!((up - core::f64::consts::SQRT_2).abs() < 1e-12);
        let down = bisect_monotone(|x| -x, -1.0, 3.0, -2.5).unwrap();
        assert!((down - 2.5).abs() < 1e-12);
        assert_eq!(bisect_monotone(|x| x, 0.0, 1.0, 2.0), Err(Error::InversionFailure));
    }
}
