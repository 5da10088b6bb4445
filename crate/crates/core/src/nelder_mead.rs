//! Nelder–Mead simplex minimization with projection onto a feasible set.

use alloc::vec::Vec;

use crate::numeric::abs;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadOptions {
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
    pub max_evals: usize,
    /// Stop once every vertex is within this (max-norm) distance of the best.
    pub diameter_tol: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self { reflection: 1.0, expansion: 2.0, contraction: 0.5, shrink: 0.5, max_evals: 2000, diameter_tol: 1e-10 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
    pub converged: bool,
}

/// Minimizes `objective` from the simplex `x0, x0 + steps[i]·e_i`. Every
/// candidate passes through `project` before it is evaluated, so all
/// evaluated points are feasible.
pub fn minimize<F, P>(mut objective: F, project: P, x0: &[f64], steps: &[f64], opts: &NelderMeadOptions) -> NelderMeadResult
where
    F: FnMut(&[f64]) -> f64,
    P: Fn(&mut [f64]),
{
    let dim = x0.len();
    assert_eq!(steps.len(), dim, "one initial step per coordinate");
    let mut evals = 0;
    let mut eval = |x: &mut Vec<f64>, evals: &mut usize| -> f64 {
        project(x);
        *evals += 1;
        let v = objective(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    let mut start = x0.to_vec();
    let v = eval(&mut start, &mut evals);
    simplex.push((start, v));
    for i in 0..dim {
        let mut p = x0.to_vec();
        p[i] += steps[i];
        let v = eval(&mut p, &mut evals);
        simplex.push((p, v));
    }

    let mut converged = false;
    while evals < opts.max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = &simplex[0].0;
        let diameter = simplex[1..]
            .iter()
            .flat_map(|(p, _)| p.iter().zip(best).map(|(a, b)| abs(a - b)))
            .fold(0.0, f64::max);
        if diameter < opts.diameter_tol {
            converged = true;
            break;
        }

        let mut centroid = alloc::vec![0.0; dim];
        for (p, _) in &simplex[..dim] {
            for (c, x) in centroid.iter_mut().zip(p) {
                *c += x / dim as f64;
            }
        }
        let worst = simplex[dim].clone();
        let along = |t: f64| -> Vec<f64> { centroid.iter().zip(&worst.0).map(|(c, w)| c + t * (c - w)).collect() };

        let mut reflected = along(opts.reflection);
        let fr = eval(&mut reflected, &mut evals);
        if fr < simplex[0].1 {
            let mut expanded = along(opts.reflection * opts.expansion);
            let fe = eval(&mut expanded, &mut evals);
            simplex[dim] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
            continue;
        }
        if fr < simplex[dim - 1].1 {
            simplex[dim] = (reflected, fr);
            continue;
        }
        let (mut contracted, bound) = if fr < worst.1 {
            (along(opts.reflection * opts.contraction), fr)
        } else {
            (along(-opts.contraction), worst.1)
        };
        let fc = eval(&mut contracted, &mut evals);
        if fc < bound {
            simplex[dim] = (contracted, fc);
            continue;
        }
        let best = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let mut p: Vec<f64> = best.iter().zip(&vertex.0).map(|(b, x)| b + opts.shrink * (x - b)).collect();
            let v = eval(&mut p, &mut evals);
            *vertex = (p, v);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, value) = simplex.swap_remove(0);
    NelderMeadResult { x, value, evals, converged }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimizes_rosenbrock() {
        let rosen = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let opts = NelderMeadOptions { max_evals: 10_000, ..Default::default() };
        let r = minimize(rosen, |_| {}, &[-1.2, 1.0], &[0.1, 0.1], &opts);
        assert!(r.converged);
        assert!((r.x[0] - 1.0).abs() < 1e-6 && (r.x[1] - 1.0).abs() < 1e-6, "{:?}", r.x);
    }

    #[test]
    fn projection_keeps_points_feasible() {
        let seen = core::cell::RefCell::new(Vec::new());
        let obj = |x: &[f64]| {
            seen.borrow_mut().push(x.to_vec());
            -(x[0] + x[1])
        };
        let clamp = |x: &mut [f64]| x.iter_mut().for_each(|v| *v = v.clamp(0.0, 1.0));
        let r = minimize(obj, clamp, &[0.2, 0.4], &[0.05, 0.05], &NelderMeadOptions::default());
        assert!((r.value + 2.0).abs() < 1e-9);
        assert!(seen.borrow().iter().flatten().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn respects_evaluation_budget() {
        let opts = NelderMeadOptions { max_evals: 50, ..Default::default() };
        let r = minimize(|x: &[f64]| x.iter().map(|v| libm::sin(*v * 1e3)).sum(), |_| {}, &[0.0; 4], &[1.0; 4], &opts);
        assert!(r.evals <= 50 + 5);
    }
}
