//! Packaged verification suites. Each suite draws its random cases from
//! per-case streams of the root seed, so a report depends only on
//! `(suite, seed, sizes)`.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::affinity::{
    build_phi_surface, daroczy_pales_check, detect_affine, normalize_pair_default, AFFINE_THRESHOLD, AFFINITY_GRID,
    PHI_SURFACE_GRID,
};
use crate::catalog::{catalog, catalog_interval, ordered_pairs};
use crate::generators::{GeneratorSpec, Interval};
use crate::means::{discrete_mean, double_mean, Kernel, ValueMatrix};
use crate::measures::{ProbabilityVector, SimpleMeasure};
use crate::numeric::abs;
use crate::rng::{self, Rng};
use crate::search::{maximize_residual, SearchConfig};
use crate::switch::{continuous_residual, discrete_residual, reduce_to_discrete, ContinuousSwitchInstance, SwitchInstance};
use crate::{Error, Result};

pub const SUITES: [&str; 10] = [
    "containment",
    "affine_invariance",
    "sufficiency",
    "reduction",
    "fubini",
    "daroczy_pales",
    "phi_affine",
    "falsify_nonaffine",
    "theorem_roundtrip",
    "degenerate",
];

pub const SUFFICIENCY_BOUND: f64 = 1e-9;
pub const FALSIFICATION_FLOOR: f64 = 1e-4;
pub const CONTAINMENT_SLACK: f64 = 1e-12;
pub const CLAMP_RATE_BOUND: f64 = 1e-3;
pub const INVARIANCE_RELATIVE_BOUND: f64 = 1e-10;
pub const REDUCTION_BOUND: f64 = 1e-12;
pub const FUBINI_BOUND: f64 = 1e-12;
pub const DAROCZY_PALES_BOUND: f64 = 1e-13;
pub const PHI_PLANE_BOUND: f64 = 1e-9;
pub const PHI_NONAFFINE_FLOOR: f64 = 1e-3;
pub const DEGENERATE_BOUND: f64 = 1e-10;
/// Residual of `(id, pow:2)` on `[1, 2]` at `[[1, 2], [2, 1]]` is about 0.0811388.
pub const KNOWN_WITNESS_FLOOR: f64 = 0.0811;

/// Case counts per suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteSizes {
    /// Random instances per generator or pair in the sufficiency suites.
    pub per_pair: usize,
    pub containment: usize,
    pub invariance: usize,
    pub reduction: usize,
    pub daroczy_pales: usize,
    pub degenerate: usize,
    pub restarts: usize,
    pub max_evals: usize,
}

impl Default for SuiteSizes {
    fn default() -> Self {
        Self {
            per_pair: 100,
            containment: 100_000,
            invariance: 10_000,
            reduction: 1_000,
            daroczy_pales: 10_000,
            degenerate: 1_000,
            restarts: 32,
            max_evals: SearchConfig::default().max_evals,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckKind {
    /// Passes when `observed ≤ bound`.
    AtMost,
    /// Passes when `observed ≥ bound`.
    AtLeast,
}

impl CheckKind {
    pub fn name(&self) -> &'static str {
        match self {
            CheckKind::AtMost => "at_most",
            CheckKind::AtLeast => "at_least",
        }
    }

    fn holds(&self, observed: f64, bound: f64) -> bool {
        match self {
            CheckKind::AtMost => observed <= bound,
            CheckKind::AtLeast => observed >= bound,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub observed: f64,
    pub bound: f64,
    pub kind: CheckKind,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, observed: f64, bound: f64, kind: CheckKind) -> Self {
        Self { name: name.into(), observed, bound, kind, pass: kind.holds(observed, bound) }
    }
}

/// Outcome for one ordered generator pair.
#[derive(Debug, Clone, PartialEq)]
pub struct PairOutcome {
    pub f: String,
    pub g: String,
    pub affine: bool,
    pub sup_error: f64,
    pub observed: f64,
    pub bound: f64,
    pub kind: CheckKind,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub cases_run: usize,
    pub checks: Vec<Check>,
    pub pairs: Vec<PairOutcome>,
    pub pass: bool,
}

pub fn run_suite(name: &str, seed: u64, sizes: &SuiteSizes) -> Result<SuiteReport> {
    let tag = SUITES.iter().position(|s| *s == name).ok_or_else(|| Error::UnknownSuite(name.to_string()))? as u64;
    let mut ctx = Context { seed, tag, next_case: 0, cases_run: 0, checks: Vec::new(), pairs: Vec::new() };
    match name {
        "containment" => containment(&mut ctx, sizes)?,
        "affine_invariance" => affine_invariance(&mut ctx, sizes)?,
        "sufficiency" => sufficiency(&mut ctx, sizes)?,
        "reduction" => reduction(&mut ctx, sizes)?,
        "fubini" => fubini(&mut ctx)?,
        "daroczy_pales" => daroczy_pales(&mut ctx, sizes)?,
        "phi_affine" => phi_affine(&mut ctx)?,
        "falsify_nonaffine" => falsify_nonaffine(&mut ctx, sizes)?,
        "theorem_roundtrip" => theorem_roundtrip(&mut ctx, sizes)?,
        "degenerate" => degenerate(&mut ctx, sizes)?,
        _ => unreachable!("suite names are checked above"),
    }
    let pass = ctx.checks.iter().all(|c| c.pass) && ctx.pairs.iter().all(|p| p.pass);
    Ok(SuiteReport { suite: name.to_string(), seed, cases_run: ctx.cases_run, checks: ctx.checks, pairs: ctx.pairs, pass })
}

/// Every suite, in [`SUITES`] order.
pub fn run_all(seed: u64, sizes: &SuiteSizes) -> Result<Vec<SuiteReport>> {
    SUITES.iter().map(|s| run_suite(s, seed, sizes)).collect()
}

struct Context {
    seed: u64,
    tag: u64,
    next_case: u64,
    cases_run: usize,
    checks: Vec<Check>,
    pairs: Vec<PairOutcome>,
}

impl Context {
    /// A fresh stream for the next case.
    fn case_rng(&mut self) -> Rng {
        let id = (self.tag << 40) | self.next_case;
        self.next_case += 1;
        self.cases_run += 1;
        rng::stream(self.seed, id)
    }

    fn check(&mut self, name: impl Into<String>, observed: f64, bound: f64, kind: CheckKind) {
        self.checks.push(Check::new(name, observed, bound, kind));
    }
}

fn pick<'a, T>(rng: &mut Rng, items: &'a [T]) -> &'a T {
    &items[rng::int_in(rng, 0, items.len() - 1)]
}

fn random_affine(rng: &mut Rng) -> (f64, f64) {
    let magnitude = rng::uniform(rng, 0.1, 10.0);
    let a = if rng::coin(rng, 0.5) { magnitude } else { -magnitude };
    (a, rng::uniform(rng, -10.0, 10.0))
}

/// Strictly positive weights, so any vector of length ≥ 2 is non-degenerate.
fn random_weights(rng: &mut Rng, k: usize) -> Result<ProbabilityVector> {
    let raw: Vec<f64> = (0..k).map(|_| rng::uniform(rng, 0.05, 1.0)).collect();
    let total: f64 = raw.iter().sum();
    ProbabilityVector::new(raw.into_iter().map(|w| w / total).collect())
}

fn random_values(rng: &mut Rng, k: usize, interval: &Interval) -> Vec<f64> {
    (0..k).map(|_| rng::uniform(rng, interval.lo(), interval.hi())).collect()
}

fn random_instance(rng: &mut Rng, f: GeneratorSpec, g: GeneratorSpec, interval: &Interval) -> Result<SwitchInstance> {
    let m = rng::int_in(rng, 1, 4);
    let n = rng::int_in(rng, 1, 4);
    let lambda = random_weights(rng, m)?;
    let mu = random_weights(rng, n)?;
    let matrix = ValueMatrix::new(m, n, random_values(rng, m * n, interval))?;
    SwitchInstance::new(f, g, *interval, lambda, mu, matrix)
}

fn containment(ctx: &mut Context, sizes: &SuiteSizes) -> Result<()> {
    let (gens, interval) = (catalog(), catalog_interval());
    let (mut worst, mut clamped) = (0.0f64, 0usize);
    for _ in 0..sizes.containment {
        let mut rng = ctx.case_rng();
        let w = *pick(&mut rng, &gens);
        let k = rng::int_in(&mut rng, 1, 8);
        let weights = random_weights(&mut rng, k)?;
        let values = random_values(&mut rng, k, &interval);
        let mean = discrete_mean(&w, &interval, &weights, &values)?;
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        worst = worst.max(lo - mean.value).max(mean.value - hi);
        clamped += mean.clamped as usize;
    }
    ctx.check("max_outside_value_range", worst, CONTAINMENT_SLACK, CheckKind::AtMost);
    let rate = clamped as f64 / sizes.containment.max(1) as f64;
    ctx.check("clamp_rate", rate, CLAMP_RATE_BOUND, CheckKind::AtMost);
    Ok(())
}

fn affine_invariance(ctx: &mut Context, sizes: &SuiteSizes) -> Result<()> {
    let (gens, interval) = (catalog(), catalog_interval());
    let (mut single, mut double) = (0.0f64, 0.0f64);
    for case in 0..sizes.invariance {
        let mut rng = ctx.case_rng();
        let u = *pick(&mut rng, &gens);
        let (a, b) = random_affine(&mut rng);
        let u2 = u.wrapped(a, b)?;
        if case % 2 == 0 {
            let k = rng::int_in(&mut rng, 1, 8);
            let weights = random_weights(&mut rng, k)?;
            let values = random_values(&mut rng, k, &interval);
            let x = discrete_mean(&u, &interval, &weights, &values)?.value;
            let y = discrete_mean(&u2, &interval, &weights, &values)?.value;
            single = single.max(abs(x - y) / abs(x));
        } else {
            let v = *pick(&mut rng, &gens);
            let (c, d) = random_affine(&mut rng);
            let v2 = v.wrapped(c, d)?;
            let inst = random_instance(&mut rng, u, v, &interval)?;
            let x = double_mean(&u, &v, &interval, &inst.lambda, &inst.mu, &inst.matrix)?.value;
            let y = double_mean(&u2, &v2, &interval, &inst.lambda, &inst.mu, &inst.matrix)?.value;
            double = double.max(abs(x - y) / abs(x));
        }
    }
    ctx.check("max_relative_difference_mean", single, INVARIANCE_RELATIVE_BOUND, CheckKind::AtMost);
    ctx.check("max_relative_difference_double_mean", double, INVARIANCE_RELATIVE_BOUND, CheckKind::AtMost);
    Ok(())
}

fn max_abs_residual(ctx: &mut Context, f: GeneratorSpec, g: GeneratorSpec, cases: usize) -> Result<f64> {
    let interval = catalog_interval();
    let mut worst = 0.0f64;
    for _ in 0..cases {
        let mut rng = ctx.case_rng();
        let inst = random_instance(&mut rng, f, g, &interval)?;
        worst = worst.max(abs(discrete_residual(&inst)?.residual));
    }
    Ok(worst)
}

fn sufficiency(ctx: &mut Context, sizes: &SuiteSizes) -> Result<()> {
    let interval = catalog_interval();
    for g in catalog() {
        let mut worst = 0.0f64;
        for _ in 0..sizes.per_pair {
            let mut rng = ctx.case_rng();
            let (a, b) = random_affine(&mut rng);
            let f = g.wrapped(a, b)?;
            let inst = random_instance(&mut rng, f, g, &interval)?;
            worst = worst.max(abs(discrete_residual(&inst)?.residual));
            worst = worst.max(abs(discrete_residual(&inst.swapped())?.residual));
        }
        ctx.check(alloc::format!("max_abs_residual[affine∘{g}, {g}]"), worst, SUFFICIENCY_BOUND, CheckKind::AtMost);
    }
    let gens = catalog();
    for (i, j) in ordered_pairs() {
        let fit = detect_affine(&gens[i], &gens[j], &interval, AFFINITY_GRID)?;
        if fit.is_affine(AFFINE_THRESHOLD) {
            let worst = max_abs_residual(ctx, gens[i], gens[j], sizes.per_pair)?;
            push_pair(ctx, &gens[i], &gens[j], true, fit.sup_error, worst, SUFFICIENCY_BOUND, CheckKind::AtMost);
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn push_pair(
    ctx: &mut Context,
    f: &GeneratorSpec,
    g: &GeneratorSpec,
    affine: bool,
    sup_error: f64,
    observed: f64,
    bound: f64,
    kind: CheckKind,
) {
    ctx.pairs.push(PairOutcome {
        f: f.to_string(),
        g: g.to_string(),
        affine,
        sup_error,
        observed,
        bound,
        kind,
        pass: kind.holds(observed, bound),
    });
}

/// Atoms and/or a uniform part; the caller retries if a cut is degenerate.
fn random_simple_measure(rng: &mut Rng) -> Result<SimpleMeasure> {
    let atoms = rng::int_in(rng, 0, 3);
    let uniform = if atoms == 0 { 1.0 } else if rng::coin(rng, 0.5) { rng::uniform(rng, 0.1, 0.9) } else { 0.0 };
    let raw: Vec<(f64, f64)> = (0..atoms).map(|_| (rng::unit(rng), rng::uniform(rng, 0.05, 1.0))).collect();
    let total: f64 = raw.iter().map(|a| a.1).sum();
    let scale = if total > 0.0 { (1.0 - uniform) / total } else { 0.0 };
    SimpleMeasure::new(raw.into_iter().map(|(x, m)| (x, m * scale)).collect(), uniform)
}

fn random_step_instance(rng: &mut Rng, gens: &[GeneratorSpec], interval: &Interval) -> Result<ContinuousSwitchInstance> {
    loop {
        let f = *pick(rng, gens);
        let g = *pick(rng, gens);
        let lambda = random_simple_measure(rng)?;
        let mu = random_simple_measure(rng)?;
        let v = random_values(rng, 4, interval);
        let s = rng::uniform(rng, 0.05, 0.95);
        let t = rng::uniform(rng, 0.05, 0.95);
        let cut_ok = |m: f64| m > 0.0 && m < 1.0;
        if cut_ok(lambda.mass_below(s)) && cut_ok(mu.mass_below(t)) {
            let kernel = Kernel::step(v[0], v[1], v[2], v[3], s, t)?;
            return ContinuousSwitchInstance::new(f, g, *interval, lambda, mu, kernel);
        }
    }
}

fn reduction(ctx: &mut Context, sizes: &SuiteSizes) -> Result<()> {
    let (gens, interval) = (catalog(), catalog_interval());
    let mut worst = 0.0f64;
    for _ in 0..sizes.reduction {
        let mut rng = ctx.case_rng();
        let inst = random_step_instance(&mut rng, &gens, &interval)?;
        let continuous = continuous_residual(&inst)?;
        let reduced = discrete_residual(&reduce_to_discrete(&inst)?.instance)?;
        worst = worst.max(abs(continuous.residual - reduced.residual));
        worst = worst.max(abs(continuous.lhs - reduced.lhs)).max(abs(continuous.rhs - reduced.rhs));
    }
    ctx.check("max_continuous_vs_reduced", worst, REDUCTION_BOUND, CheckKind::AtMost);
    Ok(())
}

fn fubini(ctx: &mut Context) -> Result<()> {
    ctx.cases_run += 1;
    let id = GeneratorSpec::identity();
    let inst = ContinuousSwitchInstance::new(
        id,
        id,
        Interval::new(0.0, 1.0)?,
        SimpleMeasure::lebesgue(),
        SimpleMeasure::lebesgue(),
        Kernel::bilinear(0.0, 0.0, 0.0, 1.0)?,
    )?;
    let r = continuous_residual(&inst)?;
    ctx.check("lhs_minus_quarter", abs(r.lhs - 0.25), FUBINI_BOUND, CheckKind::AtMost);
    ctx.check("rhs_minus_quarter", abs(r.rhs - 0.25), FUBINI_BOUND, CheckKind::AtMost);
    Ok(())
}

fn daroczy_pales(ctx: &mut Context, sizes: &SuiteSizes) -> Result<()> {
    let mut worst = 0.0f64;
    for _ in 0..sizes.daroczy_pales {
        let mut rng = ctx.case_rng();
        let kappa = rng::uniform(&mut rng, 1e-6, 1.0 - 1e-6);
        let x = rng::uniform(&mut rng, -10.0, 10.0);
        let y = rng::uniform(&mut rng, -10.0, 10.0);
        worst = worst.max(daroczy_pales_check(kappa, x, y)?);
    }
    ctx.check("max_identity_residual", worst, DAROCZY_PALES_BOUND, CheckKind::AtMost);
    Ok(())
}

fn phi_affine(ctx: &mut Context) -> Result<()> {
    let (gens, interval) = (catalog(), catalog_interval());
    let alpha = 0.5;
    for (i, j) in ordered_pairs() {
        let fit = detect_affine(&gens[i], &gens[j], &interval, AFFINITY_GRID)?;
        if !fit.is_affine(AFFINE_THRESHOLD) {
            continue;
        }
        ctx.cases_run += 1;
        let surface = build_phi_surface(&normalize_pair_default(&gens[i], &gens[j], &interval)?, alpha, PHI_SURFACE_GRID)?;
        let plane_error = surface
            .fit_residual
            .max(abs(surface.coef_a + surface.coef_b - 1.0))
            .max(abs(surface.coef_c));
        let observed = if surface.coef_a > 0.0 && surface.coef_a < 1.0 { plane_error } else { f64::INFINITY };
        push_pair(ctx, &gens[i], &gens[j], true, fit.sup_error, observed, PHI_PLANE_BOUND, CheckKind::AtMost);
    }
    ctx.cases_run += 1;
    let (id, square) = (GeneratorSpec::identity(), GeneratorSpec::power(2.0)?);
    let surface = build_phi_surface(&normalize_pair_default(&id, &square, &interval)?, alpha, PHI_SURFACE_GRID)?;
    ctx.check("nonaffine_fit_residual[id, pow:2]", surface.fit_residual, PHI_NONAFFINE_FLOOR, CheckKind::AtLeast);
    Ok(())
}

fn search_config(ctx: &Context, sizes: &SuiteSizes) -> SearchConfig {
    SearchConfig { restarts: sizes.restarts, seed: ctx.seed, max_evals: sizes.max_evals, ..Default::default() }
}

fn falsify_nonaffine(ctx: &mut Context, sizes: &SuiteSizes) -> Result<()> {
    let (gens, interval) = (catalog(), catalog_interval());
    let cfg = search_config(ctx, sizes);
    let mut weakest = f64::INFINITY;
    for (i, j) in ordered_pairs() {
        let fit = detect_affine(&gens[i], &gens[j], &interval, AFFINITY_GRID)?;
        if fit.is_affine(AFFINE_THRESHOLD) {
            continue;
        }
        ctx.cases_run += 1;
        let found = maximize_residual(&gens[i], &gens[j], &interval, &cfg)?.best_abs_residual;
        weakest = weakest.min(found);
        push_pair(ctx, &gens[i], &gens[j], false, fit.sup_error, found, FALSIFICATION_FLOOR, CheckKind::AtLeast);
    }
    ctx.check("min_best_abs_residual", weakest, FALSIFICATION_FLOOR, CheckKind::AtLeast);

    ctx.cases_run += 2;
    let unit = Interval::new(1.0, 2.0)?;
    let (id, square) = (GeneratorSpec::identity(), GeneratorSpec::power(2.0)?);
    let found = maximize_residual(&id, &square, &unit, &cfg)?.best_abs_residual;
    ctx.check("searched_witness[id, pow:2, [1,2]]", found, KNOWN_WITNESS_FLOOR, CheckKind::AtLeast);
    let half = ProbabilityVector::uniform(2)?;
    let matrix = ValueMatrix::new(2, 2, alloc::vec![1.0, 2.0, 2.0, 1.0])?;
    let known = discrete_residual(&SwitchInstance::new(id, square, unit, half.clone(), half, matrix)?)?;
    ctx.check("known_witness[id, pow:2, [1,2]]", abs(known.residual), KNOWN_WITNESS_FLOOR, CheckKind::AtLeast);
    Ok(())
}

fn theorem_roundtrip(ctx: &mut Context, sizes: &SuiteSizes) -> Result<()> {
    let (gens, interval) = (catalog(), catalog_interval());
    let cfg = search_config(ctx, sizes);
    for (i, j) in ordered_pairs() {
        let (f, g) = (gens[i], gens[j]);
        let fit = detect_affine(&f, &g, &interval, AFFINITY_GRID)?;
        if fit.is_affine(AFFINE_THRESHOLD) {
            let worst = max_abs_residual(ctx, f, g, sizes.per_pair)?;
            push_pair(ctx, &f, &g, true, fit.sup_error, worst, SUFFICIENCY_BOUND, CheckKind::AtMost);
        } else {
            ctx.cases_run += 1;
            let found = maximize_residual(&f, &g, &interval, &cfg)?.best_abs_residual;
            push_pair(ctx, &f, &g, false, fit.sup_error, found, FALSIFICATION_FLOOR, CheckKind::AtLeast);
        }
    }
    Ok(())
}

fn degenerate(ctx: &mut Context, sizes: &SuiteSizes) -> Result<()> {
    let (gens, interval) = (catalog(), catalog_interval());
    let (mut worst, mut unflagged) = (0.0f64, 0usize);
    for _ in 0..sizes.degenerate {
        let mut rng = ctx.case_rng();
        let f = *pick(&mut rng, &gens);
        let g = *pick(&mut rng, &gens);
        let mut inst = random_instance(&mut rng, f, g, &interval)?;
        let m = inst.matrix.rows();
        inst.lambda = ProbabilityVector::point_mass(m, rng::int_in(&mut rng, 0, m - 1))?;
        let r = discrete_residual(&inst)?;
        worst = worst.max(abs(r.residual));
        unflagged += !r.degenerate_lambda as usize;
    }
    ctx.check("max_abs_residual_point_mass_lambda", worst, DEGENERATE_BOUND, CheckKind::AtMost);
    ctx.check("unflagged_degenerate_instances", unflagged as f64, 0.0, CheckKind::AtMost);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SuiteSizes {
        SuiteSizes {
            per_pair: 5,
            containment: 500,
            invariance: 200,
            reduction: 10,
            daroczy_pales: 200,
            degenerate: 50,
            restarts: 4,
            max_evals: 400,
        }
    }

    #[test]
    fn unknown_suite_is_an_error() {
        assert_eq!(run_suite("nope", 1, &small()), Err(Error::UnknownSuite("nope".into())));
    }

    #[test]
    fn cheap_suites_pass_and_repeat() {
        for name in ["containment", "affine_invariance", "sufficiency", "reduction", "fubini", "daroczy_pales", "degenerate"] {
            let a = run_suite(name, 1, &small()).unwrap();
            assert!(a.pass, "{a:?}");
            assert_eq!(a, run_suite(name, 1, &small()).unwrap());
        }
    }

    #[test]
    fn fubini_checks_both_sides() {
        let r = run_suite("fubini", 1, &small()).unwrap();
        assert_eq!(r.checks.len(), 2);
        assert!(r.pass);
    }
}
