//! JSON shapes of the command outputs.

use meanswitch_core::affinity::{AffineFit, PhiSurface, AFFINE_THRESHOLD};
use meanswitch_core::search::{SearchConfig, SearchResult};
use meanswitch_core::switch::{discrete_residual, Reduction};
use meanswitch_core::verify::{Check, PairOutcome, SuiteReport};
use meanswitch_core::{Interval, ResidualReport, ValueMatrix};
use serde_json::{json, Value};

use crate::error::CliResult;

pub fn matrix(m: &ValueMatrix) -> Value {
    json!({"rows": m.rows(), "cols": m.cols(), "data": m.data()})
}

fn interval(i: &Interval) -> Value {
    json!([i.lo(), i.hi()])
}

pub fn residual(r: &ResidualReport) -> Value {
    json!({
        "lhs": r.lhs,
        "rhs": r.rhs,
        "residual": r.residual,
        "clamped_lhs": r.clamped_lhs,
        "clamped_rhs": r.clamped_rhs,
        "degenerate_lambda": r.degenerate_lambda,
        "degenerate_mu": r.degenerate_mu,
    })
}

/// The reduced discrete instance, its residual and the continuous residual
/// it stands for.
pub fn reduction(red: &Reduction, continuous: &ResidualReport) -> CliResult<Value> {
    let discrete = discrete_residual(&red.instance)?;
    Ok(json!({
        "a_mass": red.a_mass,
        "b_mass": red.b_mass,
        "lambda": red.instance.lambda.weights(),
        "mu": red.instance.mu.weights(),
        "matrix": matrix(&red.instance.matrix),
        "discrete": residual(&discrete),
        "continuous": residual(continuous),
        "difference": (continuous.residual - discrete.residual).abs(),
    }))
}

pub fn affinity(fit: &AffineFit) -> Value {
    json!({
        "a": fit.a,
        "b": fit.b,
        "sup_error": fit.sup_error,
        "threshold": AFFINE_THRESHOLD,
        "verdict": if fit.is_affine(AFFINE_THRESHOLD) { "affine" } else { "non_affine" },
    })
}

pub fn phi(surface: &PhiSurface) -> Value {
    json!({
        "A": surface.coef_a,
        "B": surface.coef_b,
        "C": surface.coef_c,
        "fit_residual": surface.fit_residual,
        "diagonal_residual": surface.diagonal_residual,
        "alpha": surface.alpha,
        "grid": surface.grid,
        "xi0": surface.phi().xi0(),
        "x0": surface.phi().x0(),
    })
}

pub fn search(result: &SearchResult, cfg: &SearchConfig) -> CliResult<Value> {
    let inst = &result.best_instance;
    let report = discrete_residual(inst)?;
    let restarts: Vec<Value> = result
        .restarts
        .iter()
        .map(|s| json!({"restart": s.restart, "best_abs_residual": s.best_abs_residual, "evals": s.evals, "converged": s.converged}))
        .collect();
    Ok(json!({
        "f": inst.f.to_string(),
        "g": inst.g.to_string(),
        "interval": interval(&inst.interval),
        "best_abs_residual": result.best_abs_residual,
        "evals_used": result.evals_used,
        "best_instance": {
            "lambda": inst.lambda.weights(),
            "mu": inst.mu.weights(),
            "matrix": matrix(&inst.matrix),
        },
        "residual": residual(&report),
        "config": {
            "m": cfg.m,
            "n": cfg.n,
            "restarts": cfg.restarts,
            "seed": cfg.seed,
            "max_evals": cfg.max_evals,
            "constraint": cfg.constraint.name(),
            "optimize_weights": cfg.optimize_weights,
            "weight_floor": cfg.weight_floor,
        },
        "restarts": restarts,
    }))
}

fn check(c: &Check) -> Value {
    json!({"name": c.name, "observed": c.observed, "bound": c.bound, "kind": c.kind.name(), "pass": c.pass})
}

fn pair(p: &PairOutcome) -> Value {
    json!({
        "f": p.f,
        "g": p.g,
        "affine": p.affine,
        "sup_error": p.sup_error,
        "observed": p.observed,
        "bound": p.bound,
        "kind": p.kind.name(),
        "pass": p.pass,
    })
}

pub fn suite(r: &SuiteReport) -> Value {
    json!({
        "suite": r.suite,
        "seed": r.seed,
        "cases_run": r.cases_run,
        "checks": r.checks.iter().map(check).collect::<Vec<_>>(),
        "pairs": r.pairs.iter().map(pair).collect::<Vec<_>>(),
        "pass": r.pass,
    })
}

pub fn suites(seed: u64, reports: &[SuiteReport]) -> Value {
    json!({
        "seed": seed,
        "pass": reports.iter().all(|r| r.pass),
        "suites": reports.iter().map(suite).collect::<Vec<_>>(),
    })
}
