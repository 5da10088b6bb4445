//! The `w`-mean `w⁻¹(∫ w∘h dγ)` in discrete and continuous form, and the
//! iterated `(u, v)`-mean over a product of two probability spaces.

use alloc::vec::Vec;

use crate::generators::{BoundGenerator, GeneratorSpec, Interval};
use crate::measures::{ProbabilityVector, SimpleMeasure};
use crate::numeric::{dot, pairwise_sum_by};
use crate::{Error, Result};

/// A mean together with whether its generator inverse had to clamp.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanValue {
    pub value: f64,
    pub clamped: bool,
}

/// Row-major `rows × cols` matrix of values.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl ValueMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidMatrix("matrix needs at least one row and one column"));
        }
        if data.len() != rows * cols {
            return Err(Error::LengthMismatch { expected: rows * cols, found: data.len() });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("matrix entries"));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidMatrix("rows have different lengths"));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn constant(rows: usize, cols: usize, value: f64) -> Result<Self> {
        Self::new(rows, cols, alloc::vec![value; rows * cols])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j));
            }
        }
        Self { rows: self.cols, cols: self.rows, data }
    }

    pub fn min(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn check_within(&self, interval: &Interval) -> Result<()> {
        match self.data.iter().find(|&&x| !interval.contains(x)) {
            Some(&x) => Err(Error::OutsideInterval { x, lo: interval.lo(), hi: interval.hi() }),
            None => Ok(()),
        }
    }
}

/// A bounded kernel `h: [0,1]² → I`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kernel {
    /// `c00 + c10·x + c01·y + c11·x·y`.
    Bilinear { c00: f64, c10: f64, c01: f64, c11: f64 },
    /// `a` on `[0,s)×[0,t)`, `b` on `[s,1]×[0,t)`, `c` on `[0,s)×[t,1]`,
    /// `d` on `[s,1]×[t,1]`.
    Step { a: f64, b: f64, c: f64, d: f64, s: f64, t: f64 },
}

impl Kernel {
    pub fn bilinear(c00: f64, c10: f64, c01: f64, c11: f64) -> Result<Self> {
        if [c00, c10, c01, c11].iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("kernel coefficients"));
        }
        Ok(Kernel::Bilinear { c00, c10, c01, c11 })
    }

    pub fn step(a: f64, b: f64, c: f64, d: f64, s: f64, t: f64) -> Result<Self> {
        if [a, b, c, d].iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("kernel values"));
        }
        if !((0.0..=1.0).contains(&s) && (0.0..=1.0).contains(&t)) {
            return Err(Error::InvalidArgument("step cut points must lie in [0, 1]"));
        }
        Ok(Kernel::Step { a, b, c, d, s, t })
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match *self {
            Kernel::Bilinear { c00, c10, c01, c11 } => c00 + c10 * x + c01 * y + c11 * x * y,
            Kernel::Step { a, b, c, d, s, t } => match (x < s, y < t) {
                (true, true) => a,
                (false, true) => b,
                (true, false) => c,
                (false, false) => d,
            },
        }
    }

    /// Exact `(min, max)` of `h` over `[0,1]²`: bilinear forms attain their
    /// extrema at the corners; step kernels at the values on non-empty cells.
    pub fn range(&self) -> (f64, f64) {
        let values: Vec<f64> = match *self {
            Kernel::Bilinear { .. } => {
                [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)].iter().map(|&(x, y)| self.eval(x, y)).collect()
            }
            Kernel::Step { a, b, c, d, s, t } => {
                let (left, bottom) = (s > 0.0, t > 0.0);
                [(a, left && bottom), (b, bottom), (c, left), (d, true)]
                    .iter()
                    .filter(|(_, present)| *present)
                    .map(|(v, _)| *v)
                    .collect()
            }
        };
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }

    /// Range must sit inside `[I.lo + margin, I.hi − margin]`.
    pub fn check_within(&self, interval: &Interval, margin: f64) -> Result<()> {
        let (lo, hi) = self.range();
        if margin >= 0.0 && lo >= interval.lo() + margin && hi <= interval.hi() - margin {
            Ok(())
        } else {
            Err(Error::KernelOutOfRange { lo, hi })
        }
    }

    /// Points in `x` where sections `h(x, ·)` jump.
    pub fn x_breaks(&self) -> Vec<f64> {
        match *self {
            Kernel::Bilinear { .. } => Vec::new(),
            Kernel::Step { s, .. } => alloc::vec![s],
        }
    }

    pub fn y_breaks(&self) -> Vec<f64> {
        match *self {
            Kernel::Bilinear { .. } => Vec::new(),
            Kernel::Step { t, .. } => alloc::vec![t],
        }
    }

    /// `h^op(y, x) = h(x, y)`.
    pub fn transposed(&self) -> Self {
        match *self {
            Kernel::Bilinear { c00, c10, c01, c11 } => Kernel::Bilinear { c00, c10: c01, c01: c10, c11 },
            Kernel::Step { a, b, c, d, s, t } => Kernel::Step { a, b: c, c: b, d, s: t, t: s },
        }
    }
}

/// `w⁻¹(Σ p_i · w(x_i))` for an already bound generator.
pub(crate) fn mean_bound(w: &BoundGenerator, weights: &[f64], values: &[f64]) -> Result<MeanValue> {
    if weights.len() != values.len() {
        return Err(Error::LengthMismatch { expected: weights.len(), found: values.len() });
    }
    let mapped = values.iter().map(|&x| w.eval(x)).collect::<Result<Vec<f64>>>()?;
    let pre = w.invert(dot(weights, &mapped))?;
    Ok(MeanValue { value: pre.x, clamped: pre.clamped })
}

/// Weighted `w`-mean of `values`.
pub fn discrete_mean(
    w: &GeneratorSpec,
    interval: &Interval,
    weights: &ProbabilityVector,
    values: &[f64],
) -> Result<MeanValue> {
    mean_bound(&w.bind(*interval)?, weights.weights(), values)
}

/// `w`-mean of `func` under a simple measure; `func` must map `[0, 1]` into
/// the interval.
pub fn continuous_mean<F: Fn(f64) -> f64>(
    w: &GeneratorSpec,
    interval: &Interval,
    measure: &SimpleMeasure,
    func: F,
) -> Result<MeanValue> {
    continuous_mean_bound(&w.bind(*interval)?, measure, &[], |x| Ok(func(x)))
}

pub(crate) fn continuous_mean_bound<F: Fn(f64) -> Result<f64>>(
    w: &BoundGenerator,
    measure: &SimpleMeasure,
    breaks: &[f64],
    func: F,
) -> Result<MeanValue> {
    let integral = measure.try_integrate_with_breaks(breaks, |x| w.eval(func(x)?))?;
    let pre = w.invert(integral)?;
    Ok(MeanValue { value: pre.x, clamped: pre.clamped })
}

/// The `(u, v)`-mean: `u`-mean over rows (weights `outer`) of the row-wise
/// `v`-means (weights `inner`). Computed as a mean of means.
pub fn double_mean(
    u: &GeneratorSpec,
    v: &GeneratorSpec,
    interval: &Interval,
    outer: &ProbabilityVector,
    inner: &ProbabilityVector,
    matrix: &ValueMatrix,
) -> Result<MeanValue> {
    double_mean_bound(&u.bind(*interval)?, &v.bind(*interval)?, outer.weights(), inner.weights(), matrix)
}

pub(crate) fn double_mean_bound(
    u: &BoundGenerator,
    v: &BoundGenerator,
    outer: &[f64],
    inner: &[f64],
    matrix: &ValueMatrix,
) -> Result<MeanValue> {
    check_dims(outer, inner, matrix)?;
    let mut clamped = false;
    let mut row_means = Vec::with_capacity(matrix.rows());
    for i in 0..matrix.rows() {
        let m = mean_bound(v, inner, matrix.row(i))?;
        clamped |= m.clamped;
        row_means.push(m.value);
    }
    let m = mean_bound(u, outer, &row_means)?;
    Ok(MeanValue { value: m.value, clamped: clamped || m.clamped })
}

/// Same quantity as [`double_mean`], written as one nested sum instead of
/// composing one-dimensional means.
pub fn double_mean_fused(
    u: &GeneratorSpec,
    v: &GeneratorSpec,
    interval: &Interval,
    outer: &ProbabilityVector,
    inner: &ProbabilityVector,
    matrix: &ValueMatrix,
) -> Result<f64> {
    let (u, v) = (u.bind(*interval)?, v.bind(*interval)?);
    let (outer, inner) = (outer.weights(), inner.weights());
    check_dims(outer, inner, matrix)?;
    matrix.check_within(interval)?;
    let cols = matrix.cols();
    let data = matrix.data();
    let mut outer_terms = Vec::with_capacity(matrix.rows());
    for (i, &lambda) in outer.iter().enumerate() {
        let s = pairwise_sum_by(cols, |j| inner[j] * v.eval(data[i * cols + j]).unwrap_or(f64::NAN));
        outer_terms.push(lambda * u.eval(v.invert(s)?.x)?);
    }
    let total = pairwise_sum_by(outer_terms.len(), |i| outer_terms[i]);
    Ok(u.invert(total)?.x)
}

fn check_dims(outer: &[f64], inner: &[f64], matrix: &ValueMatrix) -> Result<()> {
    if outer.len() != matrix.rows() {
        return Err(Error::LengthMismatch { expected: matrix.rows(), found: outer.len() });
    }
    if inner.len() != matrix.cols() {
        return Err(Error::LengthMismatch { expected: matrix.cols(), found: inner.len() });
    }
    Ok(())
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

    fn pv(w: &[f64]) -> ProbabilityVector {
        ProbabilityVector::new(w.to_vec()).unwrap()
    }

    #[test]
    fn discrete_mean_examples() {
        let half = pv(&[0.5, 0.5]);
        let m = discrete_mean(&gen("pow:2"), &iv(0.0, 10.0), &half, &[1.0, 7.0]).unwrap();
        // sqrt((1 + 49) / 2)
        assert_eq!(m.value, 5.0);
        assert!(!m.clamped);
        let m = discrete_mean(&gen("log"), &iv(0.5, 8.0), &half, &[1.0, 4.0]).unwrap();
        // exp((ln 1 + ln 4) / 2)
        assert!((m.value - 2.0).abs() < 1e-15);
        for g in ["id", "pow:-1", "exp:0.7", "log|affine:-2:1"] {
            let m = discrete_mean(&gen(g), &iv(0.5, 8.0), &pv(&[0.2, 0.3, 0.5]), &[3.3, 3.3, 3.3]).unwrap();
            assert!((m.value - 3.3).abs() < 1e-14, "{g}");
        }
    }

    #[test]
    fn discrete_mean_errors() {
        let half = pv(&[0.5, 0.5]);
        assert!(matches!(
            discrete_mean(&gen("id"), &iv(0.0, 1.0), &half, &[0.5]),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            discrete_mean(&gen("id"), &iv(0.0, 1.0), &half, &[0.5, 2.0]),
            Err(Error::OutsideInterval { .. })
        ));
    }

    #[test]
    fn continuous_mean_examples() {
        let leb = SimpleMeasure::lebesgue();
        let m = continuous_mean(&gen("id"), &iv(-1.0, 2.0), &leb, |x| x).unwrap();
        assert!((m.value - 0.5).abs() < 1e-15);
        let atom = SimpleMeasure::dirac(0.3).unwrap();
        let m = continuous_mean(&gen("id"), &iv(-1.0, 2.0), &atom, |x| x).unwrap();
        assert_eq!(m.value, 0.3);
        // ∫₀¹ (x + 0.1)² dx = (1.1³ − 0.1³) / 3
        let exact = ((1.331f64 - 0.001) / 3.0).sqrt();
        let m = continuous_mean(&gen("pow:2"), &iv(0.1, 2.0), &leb, |x| x + 0.1).unwrap();
        assert!((m.value - exact).abs() < 1e-14);
    }

    #[test]
    fn double_mean_examples() {
        let i = iv(1.0, 2.0);
        let half = pv(&[0.5, 0.5]);
        let xi = ValueMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        let m = double_mean(&gen("id"), &gen("pow:2"), &i, &half, &half, &xi).unwrap();
        assert!((m.value - 2.5f64.sqrt()).abs() < 1e-15);

        let xi = ValueMatrix::from_rows(&[vec![1.0, 1.5, 1.2], vec![1.9, 1.1, 2.0]]).unwrap();
        let (lam, mu) = (pv(&[0.3, 0.7]), pv(&[0.2, 0.5, 0.3]));
        let m = double_mean(&gen("id"), &gen("id"), &i, &lam, &mu, &xi).unwrap();
        let mut expected = 0.0;
        for r in 0..2 {
            for c in 0..3 {
                expected += lam.weights()[r] * mu.weights()[c] * xi.get(r, c);
            }
        }
        assert!((m.value - expected).abs() < 1e-15);

        let c = ValueMatrix::constant(3, 2, 1.7).unwrap();
        let m = double_mean(&gen("exp:2"), &gen("pow:-1"), &i, &pv(&[0.2, 0.2, 0.6]), &half, &c).unwrap();
        assert!((m.value - 1.7).abs() < 1e-14);
    }

    #[test]
    fn fused_and_staged_agree() {
        let i = iv(0.5, 3.0);
        let xi = ValueMatrix::from_rows(&[vec![0.5, 2.5, 1.25], vec![3.0, 0.75, 1.0]]).unwrap();
        let (lam, mu) = (pv(&[0.4, 0.6]), pv(&[0.1, 0.6, 0.3]));
        for (u, v) in [("log", "pow:3"), ("exp:-0.5", "id"), ("pow:0.5|affine:-1:2", "exp:1")] {
            let staged = double_mean(&gen(u), &gen(v), &i, &lam, &mu, &xi).unwrap().value;
            let fused = double_mean_fused(&gen(u), &gen(v), &i, &lam, &mu, &xi).unwrap();
            assert!((staged - fused).abs() < 1e-12, "{u} {v}");
        }
    }

    #[test]
    fn double_mean_dimension_errors() {
        let xi = ValueMatrix::constant(2, 3, 1.0).unwrap();
        let half = pv(&[0.5, 0.5]);
        assert!(double_mean(&gen("id"), &gen("id"), &iv(0.0, 2.0), &half, &half, &xi).is_err());
        assert!(ValueMatrix::new(0, 2, vec![]).is_err());
        assert!(ValueMatrix::new(2, 2, vec![1.0; 3]).is_err());
        assert!(ValueMatrix::from_rows(&[vec![1.0], vec![1.0, 2.0]]).is_err());
    }

    #[test]
    fn kernel_range_and_transpose() {
        let k = Kernel::bilinear(0.0, 0.0, 0.0, 1.0).unwrap();
        assert_eq!(k.range(), (0.0, 1.0));
        assert!(k.check_within(&iv(-1.0, 2.0), 0.5).is_ok());
        assert!(k.check_within(&iv(0.0, 2.0), 0.5).is_err());
        let s = Kernel::step(1.0, 2.0, 3.0, 4.0, 0.0, 0.5).unwrap();
        assert_eq!(s.range(), (2.0, 4.0));
        let full = Kernel::step(1.0, 2.0, 3.0, 4.0, 0.25, 0.5).unwrap();
        for &(x, y) in &[(0.1, 0.1), (0.3, 0.1), (0.1, 0.7), (0.9, 0.9)] {
            assert_eq!(full.eval(x, y), full.transposed().eval(y, x));
            assert_eq!(k.eval(x, y), k.transposed().eval(y, x));
        }
    }

    #[test]
    fn transpose_matrix() {
        let xi = ValueMatrix::from_rows(&[vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]).unwrap();
        let t = xi.transpose();
        assert_eq!((t.rows(), t.cols()), (3, 2));
        assert_eq!(t.data(), &[1.0, 4.0, 2.0, 5.0, 3.0, 6.0]);
        assert_eq!(t.transpose(), xi);
    }
}
