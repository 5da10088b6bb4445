//! Derivative-free maximization of `|residual|` over value matrices and,
//! optionally, weights. A large residual is a witness that the two
//! generators do not switch.

use alloc::vec::Vec;
use core::cell::RefCell;

use crate::generators::{BoundGenerator, GeneratorSpec, Interval};
use crate::means::ValueMatrix;
use crate::measures::ProbabilityVector;
use crate::nelder_mead::{minimize, NelderMeadOptions};
use crate::numeric::abs;
use crate::rng::{self, Rng};
use crate::switch::{discrete_residual, discrete_sides_bound, SwitchInstance};
use crate::{Error, Result};

/// Fraction of a parameter's box width used for the initial simplex.
pub const INITIAL_STEP_FRACTION: f64 = 0.05;
/// Unconstrained weight parameters are seeded uniformly in `[0, 2]`.
const WEIGHT_SEED_WIDTH: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Constraint {
    #[default]
    None,
    Symmetric,
    RankOne,
}

impl Constraint {
    pub fn name(&self) -> &'static str {
        match self {
            Constraint::None => "none",
            Constraint::Symmetric => "symmetric",
            Constraint::RankOne => "rank_one",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub m: usize,
    pub n: usize,
    pub restarts: usize,
    pub seed: u64,
    pub max_evals: usize,
    pub constraint: Constraint,
    pub optimize_weights: bool,
    /// Lower bound on every weight when weights are optimized.
    pub weight_floor: f64,
    /// Fixed weights used when `optimize_weights` is off; uniform if `None`.
    pub lambda: Option<ProbabilityVector>,
    pub mu: Option<ProbabilityVector>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            m: 2,
            n: 2,
            restarts: 32,
            seed: 42,
            max_evals: 1000,
            constraint: Constraint::None,
            optimize_weights: false,
            weight_floor: 0.05,
            lambda: None,
            mu: None,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n == 0 {
            return Err(Error::InvalidArgument("matrix dimensions must be positive"));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidArgument("restarts must be at least 1"));
        }
        if self.max_evals == 0 {
            return Err(Error::InvalidArgument("max_evals must be positive"));
        }
        if self.constraint == Constraint::Symmetric && self.m != self.n {
            return Err(Error::InvalidArgument("symmetric constraint needs a square matrix"));
        }
        if !(self.weight_floor > 0.0 && self.weight_floor < 0.5) {
            return Err(Error::InvalidArgument("weight_floor must lie in (0, 0.5)"));
        }
        if self.optimize_weights && self.weight_floor * self.m.max(self.n) as f64 >= 1.0 {
            return Err(Error::InvalidArgument("weight_floor times dimension must be below 1"));
        }
        for (w, len) in [(&self.lambda, self.m), (&self.mu, self.n)] {
            if let Some(w) = w {
                if w.len() != len {
                    return Err(Error::LengthMismatch { expected: len, found: w.len() });
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RestartSummary {
    pub restart: usize,
    pub best_abs_residual: f64,
    pub evals: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub best_instance: SwitchInstance,
    pub best_abs_residual: f64,
    pub evals_used: usize,
    pub restarts: Vec<RestartSummary>,
}

/// `(Ξ + Ξᵀ)/2` for `Symmetric`, the leading singular term for `RankOne`;
/// both clamped into `interval`.
pub fn apply_constraint(matrix: &ValueMatrix, constraint: Constraint, interval: &Interval) -> Result<ValueMatrix> {
    let (rows, cols) = (matrix.rows(), matrix.cols());
    let data: Vec<f64> = match constraint {
        Constraint::None => matrix.data().to_vec(),
        Constraint::Symmetric => {
            if rows != cols {
                return Err(Error::InvalidArgument("symmetric constraint needs a square matrix"));
            }
            (0..rows * cols).map(|k| 0.5 * (matrix.get(k / cols, k % cols) + matrix.get(k % cols, k / cols))).collect()
        }
        Constraint::RankOne => {
            let (u, v) = leading_singular_pair(matrix);
            (0..rows * cols).map(|k| u[k / cols] * v[k % cols]).collect()
        }
    };
    ValueMatrix::new(rows, cols, data.into_iter().map(|x| interval.clamp(x)).collect())
}

/// The outer product `u vᵀ`, clamped into `interval`.
pub fn rank_one_matrix(u: &[f64], v: &[f64], interval: &Interval) -> Result<ValueMatrix> {
    let data = u.iter().flat_map(|a| v.iter().map(move |b| interval.clamp(a * b))).collect();
    ValueMatrix::new(u.len(), v.len(), data)
}

/// Boxes for the two factors of a rank-one matrix such that every product
/// lands in `interval`.
pub fn rank_one_boxes(interval: &Interval) -> ((f64, f64), (f64, f64)) {
    let (lo, hi) = (interval.lo(), interval.hi());
    if lo >= 0.0 {
        let b = (libm::sqrt(lo), libm::sqrt(hi));
        (b, b)
    } else if hi <= 0.0 {
        let (a, b) = (libm::sqrt(-hi), libm::sqrt(-lo));
        ((a, b), (-b, -a))
    } else {
        let r = libm::sqrt(lo.abs().min(hi));
        ((-r, r), (-r, r))
    }
}

/// `σ u vᵀ` split as `(σ u, v)`, by power iteration on `ΞᵀΞ`.
fn leading_singular_pair(matrix: &ValueMatrix) -> (Vec<f64>, Vec<f64>) {
    let (rows, cols) = (matrix.rows(), matrix.cols());
    let mut v = alloc::vec![1.0 / libm::sqrt(cols as f64); cols];
    let mut u = alloc::vec![0.0; rows];
    for _ in 0..200 {
        for (i, ui) in u.iter_mut().enumerate() {
            *ui = matrix.row(i).iter().zip(&v).map(|(a, b)| a * b).sum();
        }
        let mut next: Vec<f64> = (0..cols).map(|j| (0..rows).map(|i| matrix.get(i, j) * u[i]).sum()).collect();
        let norm = libm::sqrt(next.iter().map(|x| x * x).sum());
        if norm == 0.0 {
            return (alloc::vec![0.0; rows], v);
        }
        next.iter_mut().for_each(|x| *x /= norm);
        let delta = next.iter().zip(&v).map(|(a, b)| abs(a - b)).fold(0.0, f64::max);
        v = next;
        if delta < 1e-15 {
            break;
        }
    }
    for (i, ui) in u.iter_mut().enumerate() {
        *ui = matrix.row(i).iter().zip(&v).map(|(a, b)| a * b).sum();
    }
    (u, v)
}

/// Maps `k − 1` free parameters to `k` weights, each at least `floor`.
/// The last coordinate is pinned to 1 so the map has no scale redundancy.
pub fn weights_from_params(params: &[f64], floor: f64) -> Vec<f64> {
    let k = params.len() + 1;
    let total: f64 = params.iter().map(|p| p * p).sum::<f64>() + 1.0;
    let free = 1.0 - k as f64 * floor;
    params.iter().map(|p| p * p).chain(core::iter::once(1.0)).map(|s| floor + free * s / total).collect()
}

/// Layout of the optimizer's parameter vector.
struct Layout {
    m: usize,
    n: usize,
    constraint: Constraint,
    matrix_params: usize,
    /// Per-coordinate box for the matrix parameters.
    boxes: Vec<(f64, f64)>,
    optimize_weights: bool,
    floor: f64,
}

impl Layout {
    fn new(cfg: &SearchConfig, interval: &Interval) -> Self {
        let (m, n) = (cfg.m, cfg.n);
        let full = (interval.lo(), interval.hi());
        let boxes: Vec<(f64, f64)> = match cfg.constraint {
            Constraint::None => alloc::vec![full; m * n],
            Constraint::Symmetric => alloc::vec![full; m * (m + 1) / 2],
            Constraint::RankOne => {
                let (ub, vb) = rank_one_boxes(interval);
                core::iter::repeat_n(ub, m).chain(core::iter::repeat_n(vb, n)).collect()
            }
        };
        let mut boxes = boxes;
        let matrix_params = boxes.len();
        if cfg.optimize_weights {
            boxes.extend(core::iter::repeat_n((0.0, WEIGHT_SEED_WIDTH), m + n - 2));
        }
        Self { m, n, constraint: cfg.constraint, matrix_params, boxes, optimize_weights: cfg.optimize_weights, floor: cfg.weight_floor }
    }

    fn dim(&self) -> usize {
        self.boxes.len()
    }

    fn project(&self, x: &mut [f64]) {
        for (v, &(lo, hi)) in x.iter_mut().zip(&self.boxes).take(self.matrix_params) {
            *v = v.clamp(lo, hi);
        }
    }

    fn matrix(&self, x: &[f64], interval: &Interval) -> Result<ValueMatrix> {
        let (m, n) = (self.m, self.n);
        match self.constraint {
            Constraint::None => ValueMatrix::new(m, n, x[..m * n].to_vec()),
            Constraint::Symmetric => {
                let mut data = alloc::vec![0.0; m * m];
                let mut k = 0;
                for i in 0..m {
                    for j in i..m {
                        data[i * m + j] = x[k];
                        data[j * m + i] = x[k];
                        k += 1;
                    }
                }
                ValueMatrix::new(m, m, data)
            }
            Constraint::RankOne => rank_one_matrix(&x[..m], &x[m..m + n], interval),
        }
    }

    fn weights(&self, x: &[f64], fixed_lambda: &[f64], fixed_mu: &[f64]) -> (Vec<f64>, Vec<f64>) {
        if !self.optimize_weights {
            return (fixed_lambda.to_vec(), fixed_mu.to_vec());
        }
        let w = &x[self.matrix_params..];
        let (a, b) = w.split_at(self.m - 1);
        (weights_from_params(a, self.floor), weights_from_params(b, self.floor))
    }

    fn start(&self, rng: &mut Rng) -> (Vec<f64>, Vec<f64>) {
        let mut x = Vec::with_capacity(self.dim());
        let mut steps = Vec::with_capacity(self.dim());
        for &(lo, hi) in &self.boxes {
            let v = rng::uniform(rng, lo, hi);
            let step = INITIAL_STEP_FRACTION * (hi - lo);
            x.push(v);
            steps.push(if v + step <= hi { step } else { -step });
        }
        (x, steps)
    }
}

/// Runs `cfg.restarts` Nelder–Mead descents on `−|residual|`.
pub fn maximize_residual(f: &GeneratorSpec, g: &GeneratorSpec, interval: &Interval, cfg: &SearchConfig) -> Result<SearchResult> {
    maximize_residual_observed(f, g, interval, cfg, |_, _, _| {})
}

/// [`maximize_residual`], calling `observer(matrix, λ, μ)` on every
/// evaluated point.
pub fn maximize_residual_observed<O>(
    f: &GeneratorSpec,
    g: &GeneratorSpec,
    interval: &Interval,
    cfg: &SearchConfig,
    observer: O,
) -> Result<SearchResult>
where
    O: FnMut(&ValueMatrix, &[f64], &[f64]),
{
    cfg.validate()?;
    let (fb, gb) = (f.bind(*interval)?, g.bind(*interval)?);
    let layout = Layout::new(cfg, interval);
    let fixed_lambda = match &cfg.lambda {
        Some(w) => w.clone(),
        None => ProbabilityVector::uniform(cfg.m)?,
    };
    let fixed_mu = match &cfg.mu {
        Some(w) => w.clone(),
        None => ProbabilityVector::uniform(cfg.n)?,
    };
    let observer = RefCell::new(observer);
    let failure: RefCell<Option<Error>> = RefCell::new(None);

    let objective = |x: &[f64]| -> f64 {
        let r = evaluate(&fb, &gb, &layout, x, interval, fixed_lambda.weights(), fixed_mu.weights(), &observer);
        match r {
            Ok(v) => -abs(v),
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::INFINITY
            }
        }
    };

    let opts = NelderMeadOptions { max_evals: cfg.max_evals, ..Default::default() };
    let mut summaries = Vec::with_capacity(cfg.restarts);
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut evals_used = 0;
    for r in 0..cfg.restarts {
        let mut rng = rng::stream(cfg.seed, r as u64);
        let (x0, steps) = layout.start(&mut rng);
        let run = minimize(&objective, |x: &mut [f64]| layout.project(x), &x0, &steps, &opts);
        if let Some(e) = failure.borrow_mut().take() {
            return Err(e);
        }
        evals_used += run.evals;
        let score = -run.value;
        summaries.push(RestartSummary { restart: r, best_abs_residual: score, evals: run.evals, converged: run.converged });
        if best.as_ref().is_none_or(|(b, _)| score > *b) {
            best = Some((score, run.x));
        }
    }

    let (_, x) = best.ok_or(Error::InvalidArgument("restarts must be at least 1"))?;
    let matrix = layout.matrix(&x, interval)?;
    let (lambda, mu) = layout.weights(&x, fixed_lambda.weights(), fixed_mu.weights());
    let instance = SwitchInstance::new(*f, *g, *interval, ProbabilityVector::new(lambda)?, ProbabilityVector::new(mu)?, matrix)?;
    let report = discrete_residual(&instance)?;
    Ok(SearchResult { best_instance: instance, best_abs_residual: abs(report.residual), evals_used, restarts: summaries })
}

#[allow(clippy::too_many_arguments)]
fn evaluate<O: FnMut(&ValueMatrix, &[f64], &[f64])>(
    f: &BoundGenerator,
    g: &BoundGenerator,
    layout: &Layout,
    x: &[f64],
    interval: &Interval,
    fixed_lambda: &[f64],
    fixed_mu: &[f64],
    observer: &RefCell<O>,
) -> Result<f64> {
    let matrix = layout.matrix(x, interval)?;
    let (lambda, mu) = layout.weights(x, fixed_lambda, fixed_mu);
    (observer.borrow_mut())(&matrix, &lambda, &mu);
    // Same normalization as ProbabilityVector::new so the final
    // re-evaluation reproduces this value exactly.
    let lambda = ProbabilityVector::new(lambda)?;
    let mu = ProbabilityVector::new(mu)?;
    let sides = discrete_sides_bound(f, g, lambda.weights(), mu.weights(), &matrix, &matrix.transpose())?;
    Ok(sides.residual())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    fn gen(s: &str) -> GeneratorSpec {
        s.parse().unwrap()
    }

    #[test]
    fn affine_pair_stays_null() {
        let cfg = SearchConfig::default();
        let r = maximize_residual(&gen("exp:1|affine:3:-1"), &gen("exp:1"), &iv(0.0, 1.0), &cfg).unwrap();
        assert!(r.best_abs_residual <= 1e-9, "{}", r.best_abs_residual);
    }

    #[test]
    fn finds_known_witness() {
        let cfg = SearchConfig::default();
        let r = maximize_residual(&gen("id"), &gen("pow:2"), &iv(1.0, 2.0), &cfg).unwrap();
        assert!(r.best_abs_residual >= 0.0811, "{}", r.best_abs_residual);
        assert_eq!(r.restarts.len(), 32);
        assert_eq!(r.evals_used, r.restarts.iter().map(|s| s.evals).sum::<usize>());
    }

    #[test]
    fn single_row_or_column_is_null() {
        for (m, n) in [(1, 3), (3, 1)] {
            let cfg = SearchConfig { m, n, restarts: 4, ..Default::default() };
            let r = maximize_residual(&gen("log"), &gen("pow:3"), &iv(0.5, 3.0), &cfg).unwrap();
            assert!(r.best_abs_residual <= 1e-12, "{}", r.best_abs_residual);
        }
    }

    #[test]
    fn constraint_examples() {
        let i = iv(0.0, 10.0);
        let m = ValueMatrix::from_rows(&[vec![1.0, 3.0], vec![2.0, 4.0]]).unwrap();
        let s = apply_constraint(&m, Constraint::Symmetric, &i).unwrap();
        assert_eq!(s.data(), &[1.0, 2.5, 2.5, 4.0]);
        assert_eq!(apply_constraint(&s, Constraint::Symmetric, &i).unwrap(), s);
        let r = rank_one_matrix(&[1.0, 2.0], &[1.0, 1.5], &iv(1.0, 3.0)).unwrap();
        assert_eq!(r.data(), &[1.0, 1.5, 2.0, 3.0]);
        let back = apply_constraint(&r, Constraint::RankOne, &iv(1.0, 3.0)).unwrap();
        for (a, b) in back.data().iter().zip(r.data()) {
            assert!((a - b).abs() < 1e-13);
        }
        let rect = ValueMatrix::from_rows(&[vec![1.0, 2.0, 3.0]]).unwrap();
        assert!(apply_constraint(&rect, Constraint::Symmetric, &i).is_err());
    }

    #[test]
    fn rank_one_boxes_keep_products_inside() {
        for (lo, hi) in [(1.0, 3.0), (-4.0, -1.0), (-2.0, 5.0), (0.0, 2.0)] {
            let ((a, b), (c, d)) = rank_one_boxes(&iv(lo, hi));
            for x in [a, b, 0.5 * (a + b)] {
                for y in [c, d, 0.5 * (c + d)] {
                    assert!(x * y >= lo - 1e-12 && x * y <= hi + 1e-12, "{lo} {hi} {x} {y}");
                }
            }
        }
    }

    #[test]
    fn weight_map_respects_floor() {
        let w = weights_from_params(&[0.0, 3.0, -1.0], 0.05);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(w.iter().all(|&x| (0.05..=0.95).contains(&x)));
        assert_eq!(weights_from_params(&[], 0.1), vec![1.0]);
    }

    #[test]
    fn config_validation() {
        let bad = [
            SearchConfig { restarts: 0, ..Default::default() },
            SearchConfig { weight_floor: 0.5, ..Default::default() },
            SearchConfig { m: 2, n: 3, constraint: Constraint::Symmetric, ..Default::default() },
            SearchConfig { m: 3, optimize_weights: true, weight_floor: 0.4, ..Default::default() },
        ];
        for cfg in bad {
            assert!(cfg.validate().is_err(), "{cfg:?}");
        }
    }
}
