//! Affinity between generators.
//!
//! [`detect_affine`] fits `f ≈ a·g + b` from the interval endpoints and
//! reports the worst deviation on a grid. [`normalize_pair`] rescales a pair
//! so both generators map `ξ₀ ↦ 0` and `x₀ ↦ 1`, giving the bijection
//! `φ = g₀ ∘ f₀⁻¹` of `[0, 1]`; [`build_phi_surface`] tabulates
//! `Φ(p, q) = φ(α·φ⁻¹(p) + (1 − α)·φ⁻¹(q))` and fits a plane to it. For a
//! commuting pair `φ` is the identity and `Φ` is exactly `α·p + (1 − α)·q`.

use alloc::vec::Vec;

use crate::generators::{BoundGenerator, GeneratorSpec, Interval};
use crate::numeric::{abs, bisect_monotone_tol, pairwise_sum_by};
use crate::{Error, Result};

/// `detect_affine` sup errors at or below this classify a pair as affine.
pub const AFFINE_THRESHOLD: f64 = 1e-8;

/// Default grid for [`detect_affine`].
pub const AFFINITY_GRID: usize = 1025;

/// Tabulation nodes for `φ`.
pub const PHI_NODES: usize = 257;

/// Default lattice size for [`build_phi_surface`].
pub const PHI_SURFACE_GRID: usize = 129;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineFit {
    pub a: f64,
    pub b: f64,
    /// `max |f(x) − (a·g(x) + b)|` over the grid.
    pub sup_error: f64,
}

impl AffineFit {
    pub fn is_affine(&self, threshold: f64) -> bool {
        self.sup_error <= threshold
    }
}

/// Fits `f = a·g + b` through the endpoints of `interval` and measures the
/// deviation on `grid_size` equally spaced points.
pub fn detect_affine(f: &GeneratorSpec, g: &GeneratorSpec, interval: &Interval, grid_size: usize) -> Result<AffineFit> {
    if grid_size < 3 {
        return Err(Error::InvalidArgument("affinity grid needs at least 3 points"));
    }
    let (fb, gb) = (f.bind(*interval)?, g.bind(*interval)?);
    let (lo, hi) = (interval.lo(), interval.hi());
    let dg = gb.eval(hi)? - gb.eval(lo)?;
    if dg == 0.0 {
        return Err(Error::InvalidGenerator("g takes equal values at the interval endpoints"));
    }
    let a = (fb.eval(hi)? - fb.eval(lo)?) / dg;
    let b = fb.eval(lo)? - a * gb.eval(lo)?;
    let mut sup_error: f64 = 0.0;
    for k in 0..grid_size {
        let x = interval.lerp(k as f64 / (grid_size - 1) as f64);
        sup_error = sup_error.max(abs(fb.eval(x)? - (a * gb.eval(x)? + b)));
    }
    Ok(AffineFit { a, b, sup_error })
}

/// Worst violation of `Φ(κv₁ + (1−κ)v₂) = κΦ(v₁) + (1−κ)Φ(v₂)` over all
/// pairs of points of a `samples × samples` lattice on `[0, 1]²`.
pub fn check_kappa_affine<F: Fn(f64, f64) -> f64>(phi: F, kappa: f64, samples: usize) -> Result<f64> {
    if !(kappa > 0.0 && kappa < 1.0) {
        return Err(Error::InvalidArgument("kappa must lie in (0, 1)"));
    }
    if samples < 2 {
        return Err(Error::InvalidArgument("kappa check needs at least 2 samples per axis"));
    }
    let step = 1.0 / (samples - 1) as f64;
    let points: Vec<(f64, f64)> = (0..samples)
        .flat_map(|i| (0..samples).map(move |j| (i as f64 * step, j as f64 * step)))
        .collect();
    let values: Vec<f64> = points.iter().map(|&(p, q)| phi(p, q)).collect();
    let mut worst: f64 = 0.0;
    for (v1, &phi1) in points.iter().zip(&values) {
        for (v2, &phi2) in points.iter().zip(&values) {
            let mixed = phi(kappa * v1.0 + (1.0 - kappa) * v2.0, kappa * v1.1 + (1.0 - kappa) * v2.1);
            let violation = abs(mixed - (kappa * phi1 + (1.0 - kappa) * phi2));
            if !violation.is_finite() {
                return Err(Error::NonFinite("kappa-affinity check"));
            }
            worst = worst.max(violation);
        }
    }
    Ok(worst)
}

/// Residual of the algebraic identity
/// `(x+y)/2 = κ(κ(x+y)/2 + (1−κ)x) + (1−κ)(κy + (1−κ)(x+y)/2)`.
pub fn daroczy_pales_check(kappa: f64, x: f64, y: f64) -> Result<f64> {
    if !(kappa > 0.0 && kappa < 1.0) {
        return Err(Error::InvalidArgument("kappa must lie in (0, 1)"));
    }
    let mid = (x + y) / 2.0;
    let nested = kappa * (kappa * mid + (1.0 - kappa) * x) + (1.0 - kappa) * (kappa * y + (1.0 - kappa) * mid);
    Ok(abs(mid - nested))
}

/// Monotone cubic Hermite interpolant (Fritsch–Carlson slopes) on a uniform
/// grid over `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
struct Pchip {
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl Pchip {
    fn new(values: Vec<f64>) -> Self {
        let n = values.len();
        debug_assert!(n >= 2);
        let h = 1.0 / (n - 1) as f64;
        let secants: Vec<f64> = values.windows(2).map(|w| (w[1] - w[0]) / h).collect();
        let mut slopes = alloc::vec![0.0; n];
        if n == 2 {
            slopes[0] = secants[0];
            slopes[1] = secants[0];
            return Self { values, slopes };
        }
        for k in 1..n - 1 {
            let (d0, d1) = (secants[k - 1], secants[k]);
            if d0 * d1 > 0.0 {
                // Weighted harmonic mean; equal spacing makes both weights 3h.
                slopes[k] = 2.0 / (1.0 / d0 + 1.0 / d1);
            }
        }
        slopes[0] = end_slope(secants[0], secants[1]);
        slopes[n - 1] = end_slope(secants[n - 2], secants[n - 3]);
        Self { values, slopes }
    }

    fn eval(&self, u: f64) -> f64 {
        let n = self.values.len();
        let u = u.clamp(0.0, 1.0);
        let scaled = u * (n - 1) as f64;
        let k = (libm::floor(scaled) as usize).min(n - 2);
        let t = scaled - k as f64;
        let h = 1.0 / (n - 1) as f64;
        let (y0, y1) = (self.values[k], self.values[k + 1]);
        let (d0, d1) = (self.slopes[k], self.slopes[k + 1]);
        let omt = 1.0 - t;
        let h00 = (1.0 + 2.0 * t) * omt * omt;
        let h10 = t * omt * omt;
        let h01 = t * t * (3.0 - 2.0 * t);
        let h11 = t * t * (t - 1.0);
        h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1
    }
}

/// Three-point end slope, limited to preserve monotonicity.
fn end_slope(first: f64, second: f64) -> f64 {
    let d = (3.0 * first - second) / 2.0;
    if d * first <= 0.0 {
        0.0
    } else if first * second <= 0.0 && abs(d) > abs(3.0 * first) {
        3.0 * first
    } else {
        d
    }
}

/// `φ = g₀ ∘ f₀⁻¹` on `[0, 1]` for a normalized generator pair.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiFunction {
    xi0: f64,
    x0: f64,
    f: BoundGenerator,
    g: BoundGenerator,
    f_anchor: (f64, f64),
    g_anchor: (f64, f64),
    interp: Pchip,
}

impl PhiFunction {
    /// The anchor mapped to 0.
    pub fn xi0(&self) -> f64 {
        self.xi0
    }

    /// The anchor mapped to 1.
    pub fn x0(&self) -> f64 {
        self.x0
    }

    /// `I₀ = [min(ξ₀, x₀), max(ξ₀, x₀)]`.
    pub fn normalized_interval(&self) -> Interval {
        Interval::new(self.xi0.min(self.x0), self.xi0.max(self.x0)).expect("anchors are distinct")
    }

    /// `f₀(x) = (f(x) − f(ξ₀)) / (f(x₀) − f(ξ₀))`.
    pub fn f0(&self, x: f64) -> Result<f64> {
        let (at_xi, at_x) = self.f_anchor;
        Ok((self.f.eval(x)? - at_xi) / (at_x - at_xi))
    }

    pub fn g0(&self, x: f64) -> Result<f64> {
        let (at_xi, at_x) = self.g_anchor;
        Ok((self.g.eval(x)? - at_xi) / (at_x - at_xi))
    }

    /// Tabulated `φ(k / (n − 1))`.
    pub fn nodes(&self) -> &[f64] {
        &self.interp.values
    }

    pub fn eval(&self, u: f64) -> f64 {
        self.interp.eval(u)
    }

    /// `φ⁻¹(p)` by bisection on the interpolant.
    pub fn inverse(&self, p: f64) -> Result<f64> {
        bisect_monotone_tol(|u| self.interp.eval(u), 0.0, 1.0, p.clamp(0.0, 1.0), 0.0)
    }

    /// `max_k |φ(u_k) − u_k|` over the tabulation nodes.
    pub fn deviation_from_identity(&self) -> f64 {
        let n = self.interp.values.len();
        self.interp
            .values
            .iter()
            .enumerate()
            .map(|(k, &v)| abs(v - k as f64 / (n - 1) as f64))
            .fold(0.0, f64::max)
    }
}

/// Normalizes `(f, g)` at anchors `ξ₀ ≠ x₀` and tabulates `φ`.
pub fn normalize_pair(f: &GeneratorSpec, g: &GeneratorSpec, interval: &Interval, xi0: f64, x0: f64) -> Result<PhiFunction> {
    normalize_pair_with_nodes(f, g, interval, xi0, x0, PHI_NODES)
}

/// [`normalize_pair`] at the default anchors `ξ₀ = I.lo`, `x₀ = I.hi`.
pub fn normalize_pair_default(f: &GeneratorSpec, g: &GeneratorSpec, interval: &Interval) -> Result<PhiFunction> {
    normalize_pair(f, g, interval, interval.lo(), interval.hi())
}

pub fn normalize_pair_with_nodes(
    f: &GeneratorSpec,
    g: &GeneratorSpec,
    interval: &Interval,
    xi0: f64,
    x0: f64,
    nodes: usize,
) -> Result<PhiFunction> {
    if xi0 == x0 {
        return Err(Error::InvalidArgument("normalization anchors must differ"));
    }
    if nodes < 3 {
        return Err(Error::InvalidArgument("phi tabulation needs at least 3 nodes"));
    }
    let (fb, gb) = (f.bind(*interval)?, g.bind(*interval)?);
    let f_anchor = (fb.eval(xi0)?, fb.eval(x0)?);
    let g_anchor = (gb.eval(xi0)?, gb.eval(x0)?);
    let sub = Interval::new(xi0.min(x0), xi0.max(x0))?;
    let mut values = Vec::with_capacity(nodes);
    for k in 0..nodes {
        let u = k as f64 / (nodes - 1) as f64;
        let v = if k == 0 {
            0.0
        } else if k == nodes - 1 {
            1.0
        } else {
            let x = sub.clamp(fb.invert(f_anchor.0 + u * (f_anchor.1 - f_anchor.0))?.x);
            ((gb.eval(x)? - g_anchor.0) / (g_anchor.1 - g_anchor.0)).clamp(0.0, 1.0)
        };
        values.push(v);
    }
    if values.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InversionFailure);
    }
    Ok(PhiFunction { xi0, x0, f: fb, g: gb, f_anchor, g_anchor, interp: Pchip::new(values) })
}

/// `Φ(p, q) = φ(α·φ⁻¹(p) + (1 − α)·φ⁻¹(q))` tabulated on a lattice, with a
/// least-squares plane `A·p + B·q + C`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiSurface {
    phi: PhiFunction,
    pub alpha: f64,
    pub grid: usize,
    /// Row-major `grid × grid`; entry `(i, j)` is `Φ(i/(grid−1), j/(grid−1))`.
    pub values: Vec<f64>,
    pub coef_a: f64,
    pub coef_b: f64,
    pub coef_c: f64,
    /// `max |Φ − (A·p + B·q + C)|` over the lattice.
    pub fit_residual: f64,
    /// `max |Φ(u, u) − u|` over the lattice diagonal.
    pub diagonal_residual: f64,
}

impl PhiSurface {
    pub fn phi(&self) -> &PhiFunction {
        &self.phi
    }

    /// Evaluates `Φ` anywhere in `[0, 1]²`.
    pub fn eval(&self, p: f64, q: f64) -> Result<f64> {
        let inner = self.alpha * self.phi.inverse(p)? + (1.0 - self.alpha) * self.phi.inverse(q)?;
        Ok(self.phi.eval(inner))
    }

    /// A plane fit consistent with `Φ(u, u) = u`: `A + B = 1`, `C = 0`,
    /// `0 < A < 1`, each within `tol`, and fit residual within `tol`.
    pub fn plane_checks(&self, tol: f64) -> bool {
        self.fit_residual <= tol
            && abs(self.coef_a + self.coef_b - 1.0) <= tol
            && abs(self.coef_c) <= tol
            && self.coef_a > 0.0
            && self.coef_a < 1.0
    }
}

pub fn build_phi_surface(phi: &PhiFunction, alpha: f64, grid: usize) -> Result<PhiSurface> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument("alpha must lie in (0, 1)"));
    }
    if grid < 2 {
        return Err(Error::InvalidArgument("phi surface grid needs at least 2 points"));
    }
    let step = 1.0 / (grid - 1) as f64;
    let inverses = (0..grid).map(|i| phi.inverse(i as f64 * step)).collect::<Result<Vec<f64>>>()?;
    let mut values = Vec::with_capacity(grid * grid);
    for i in 0..grid {
        for j in 0..grid {
            values.push(phi.eval(alpha * inverses[i] + (1.0 - alpha) * inverses[j]));
        }
    }
    let (coef_a, coef_b, coef_c) = fit_plane(grid, &values)?;
    let mut fit_residual: f64 = 0.0;
    for i in 0..grid {
        for j in 0..grid {
            let (p, q) = (i as f64 * step, j as f64 * step);
            fit_residual = fit_residual.max(abs(values[i * grid + j] - (coef_a * p + coef_b * q + coef_c)));
        }
    }
    let diagonal_residual = (0..grid).map(|i| abs(values[i * grid + i] - i as f64 * step)).fold(0.0, f64::max);
    Ok(PhiSurface {
        phi: phi.clone(),
        alpha,
        grid,
        values,
        coef_a,
        coef_b,
        coef_c,
        fit_residual,
        diagonal_residual,
    })
}

/// Least squares for `v ≈ A·p + B·q + C` on the uniform lattice, via the
/// normal equations in centered coordinates.
fn fit_plane(grid: usize, values: &[f64]) -> Result<(f64, f64, f64)> {
    let step = 1.0 / (grid - 1) as f64;
    let n = grid * grid;
    let coord = |k: usize| ((k / grid) as f64 * step - 0.5, (k % grid) as f64 * step - 0.5);
    let mean_v = pairwise_sum_by(n, |k| values[k]) / n as f64;
    let spp = pairwise_sum_by(n, |k| coord(k).0 * coord(k).0);
    let sqq = pairwise_sum_by(n, |k| coord(k).1 * coord(k).1);
    let spq = pairwise_sum_by(n, |k| coord(k).0 * coord(k).1);
    let spv = pairwise_sum_by(n, |k| coord(k).0 * (values[k] - mean_v));
    let sqv = pairwise_sum_by(n, |k| coord(k).1 * (values[k] - mean_v));
    let det = spp * sqq - spq * spq;
    if det == 0.0 || !det.is_finite() {
        return Err(Error::NonFinite("plane fit"));
    }
    let a = (spv * sqq - sqv * spq) / det;
    let b = (sqv * spp - spv * spq) / det;
    // Undo the centering at (0.5, 0.5).
    let c = mean_v - 0.5 * a - 0.5 * b;
    Ok((a, b, c))
}
