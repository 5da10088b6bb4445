//! Both sides of the switch equation
//!
//! ```text
//! f⁻¹(∫ f(g⁻¹(∫ g∘h dμ)) dλ)  =  g⁻¹(∫ g(f⁻¹(∫ f∘h dλ)) dμ)
//! ```
//!
//! for discrete (matrix) and simple continuous instances, and the reduction
//! of step kernels to 2×2 discrete instances.

use core::cell::Cell;

use crate::generators::{BoundGenerator, GeneratorSpec, Interval};
use crate::means::{continuous_mean_bound, double_mean_bound, Kernel, MeanValue, ValueMatrix};
use crate::measures::{ProbabilityVector, SimpleMeasure};
use crate::{Error, Result};

/// A discrete instance: generators, weights and an `m × n` value matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SwitchInstance {
    pub f: GeneratorSpec,
    pub g: GeneratorSpec,
    pub interval: Interval,
    pub lambda: ProbabilityVector,
    pub mu: ProbabilityVector,
    pub matrix: ValueMatrix,
}

impl SwitchInstance {
    pub fn new(
        f: GeneratorSpec,
        g: GeneratorSpec,
        interval: Interval,
        lambda: ProbabilityVector,
        mu: ProbabilityVector,
        matrix: ValueMatrix,
    ) -> Result<Self> {
        f.validate(&interval)?;
        g.validate(&interval)?;
        if lambda.len() != matrix.rows() {
            return Err(Error::LengthMismatch { expected: matrix.rows(), found: lambda.len() });
        }
        if mu.len() != matrix.cols() {
            return Err(Error::LengthMismatch { expected: matrix.cols(), found: mu.len() });
        }
        matrix.check_within(&interval)?;
        Ok(Self { f, g, interval, lambda, mu, matrix })
    }

    /// Roles of `(f, λ, rows)` and `(g, μ, columns)` exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            f: self.g,
            g: self.f,
            interval: self.interval,
            lambda: self.mu.clone(),
            mu: self.lambda.clone(),
            matrix: self.matrix.transpose(),
        }
    }
}

/// A continuous instance over `[0,1]²` with simple measures and a bounded kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousSwitchInstance {
    pub f: GeneratorSpec,
    pub g: GeneratorSpec,
    pub interval: Interval,
    pub lambda: SimpleMeasure,
    pub mu: SimpleMeasure,
    pub kernel: Kernel,
}

impl ContinuousSwitchInstance {
    pub fn new(
        f: GeneratorSpec,
        g: GeneratorSpec,
        interval: Interval,
        lambda: SimpleMeasure,
        mu: SimpleMeasure,
        kernel: Kernel,
    ) -> Result<Self> {
        f.validate(&interval)?;
        g.validate(&interval)?;
        kernel.check_within(&interval, 0.0)?;
        Ok(Self { f, g, interval, lambda, mu, kernel })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InstanceEcho {
    Discrete(SwitchInstance),
    Continuous(ContinuousSwitchInstance),
}

/// Both sides of one switch equation, in the value scale of the interval.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs − rhs`.
    pub residual: f64,
    pub clamped_lhs: bool,
    pub clamped_rhs: bool,
    pub degenerate_lambda: bool,
    pub degenerate_mu: bool,
    pub instance: InstanceEcho,
}

/// The two sides of a discrete instance, without building a report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sides {
    pub lhs: MeanValue,
    pub rhs: MeanValue,
}

impl Sides {
    pub fn residual(&self) -> f64 {
        self.lhs.value - self.rhs.value
    }
}

pub(crate) fn discrete_sides_bound(
    f: &BoundGenerator,
    g: &BoundGenerator,
    lambda: &[f64],
    mu: &[f64],
    matrix: &ValueMatrix,
    transposed: &ValueMatrix,
) -> Result<Sides> {
    let lhs = double_mean_bound(f, g, lambda, mu, matrix)?;
    let rhs = double_mean_bound(g, f, mu, lambda, transposed)?;
    Ok(Sides { lhs, rhs })
}

pub fn discrete_sides(inst: &SwitchInstance) -> Result<Sides> {
    let f = inst.f.bind(inst.interval)?;
    let g = inst.g.bind(inst.interval)?;
    discrete_sides_bound(
        &f,
        &g,
        inst.lambda.weights(),
        inst.mu.weights(),
        &inst.matrix,
        &inst.matrix.transpose(),
    )
}

/// `M^{f,g}_{λ,μ}(Ξ) − M^{g,f}_{μ,λ}(Ξᵀ)`.
pub fn discrete_residual(inst: &SwitchInstance) -> Result<ResidualReport> {
    let sides = discrete_sides(inst)?;
    Ok(ResidualReport {
        lhs: sides.lhs.value,
        rhs: sides.rhs.value,
        residual: sides.residual(),
        clamped_lhs: sides.lhs.clamped,
        clamped_rhs: sides.rhs.clamped,
        degenerate_lambda: !inst.lambda.is_nondegenerate(),
        degenerate_mu: !inst.mu.is_nondegenerate(),
        instance: InstanceEcho::Discrete(inst.clone()),
    })
}

/// `outer⁻¹(∫ outer(inner⁻¹(∫ inner∘h(x, ·) dν)) dγ(x))`.
fn continuous_side(
    outer: &BoundGenerator,
    outer_measure: &SimpleMeasure,
    inner: &BoundGenerator,
    inner_measure: &SimpleMeasure,
    kernel: &Kernel,
) -> Result<MeanValue> {
    let inner_clamped = Cell::new(false);
    let x_breaks = kernel.x_breaks();
    let y_breaks = kernel.y_breaks();
    let m = continuous_mean_bound(outer, outer_measure, &x_breaks, |x| {
        let section = continuous_mean_bound(inner, inner_measure, &y_breaks, |y| Ok(kernel.eval(x, y)))?;
        if section.clamped {
            inner_clamped.set(true);
        }
        Ok(section.value)
    })?;
    Ok(MeanValue { value: m.value, clamped: m.clamped || inner_clamped.get() })
}

pub fn continuous_residual(inst: &ContinuousSwitchInstance) -> Result<ResidualReport> {
    let f = inst.f.bind(inst.interval)?;
    let g = inst.g.bind(inst.interval)?;
    let lhs = continuous_side(&f, &inst.lambda, &g, &inst.mu, &inst.kernel)?;
    let rhs = continuous_side(&g, &inst.mu, &f, &inst.lambda, &inst.kernel.transposed())?;
    Ok(ResidualReport {
        lhs: lhs.value,
        rhs: rhs.value,
        residual: lhs.value - rhs.value,
        clamped_lhs: lhs.clamped,
        clamped_rhs: rhs.clamped,
        degenerate_lambda: !inst.lambda.is_nondegenerate(),
        degenerate_mu: !inst.mu.is_nondegenerate(),
        instance: InstanceEcho::Continuous(inst.clone()),
    })
}

/// A step-kernel instance collapsed onto the two-point spaces `{A, Aᶜ}` and
/// `{B, Bᶜ}` with `A = [0, s)`, `B = [0, t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Reduction {
    pub instance: SwitchInstance,
    /// `λ([0, s))`.
    pub a_mass: f64,
    /// `μ([0, t))`.
    pub b_mass: f64,
}

pub fn reduce_to_discrete(inst: &ContinuousSwitchInstance) -> Result<Reduction> {
    let Kernel::Step { a, b, c, d, s, t } = inst.kernel else {
        return Err(Error::NotStepKernel);
    };
    let a_mass = inst.lambda.mass_below(s);
    let b_mass = inst.mu.mass_below(t);
    for mass in [a_mass, b_mass] {
        if !(mass > 0.0 && mass < 1.0) {
            return Err(Error::DegenerateCut { mass });
        }
    }
    let lambda = ProbabilityVector::new(alloc::vec![a_mass, 1.0 - a_mass])?;
    let mu = ProbabilityVector::new(alloc::vec![b_mass, 1.0 - b_mass])?;
    let matrix = ValueMatrix::new(2, 2, alloc::vec![a, c, b, d])?;
    let instance = SwitchInstance::new(inst.f, inst.g, inst.interval, lambda, mu, matrix)?;
    Ok(Reduction { instance, a_mass, b_mass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use alloc::vec::Vec;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    fn gen(s: &str) -> GeneratorSpec {
        s.parse().unwrap()
    }

    fn half() -> ProbabilityVector {
        ProbabilityVector::uniform(2).unwrap()
    }

    fn inst(f: &str, g: &str, i: Interval, rows: &[Vec<f64>]) -> SwitchInstance {
        let m = ValueMatrix::from_rows(rows).unwrap();
        let lam = ProbabilityVector::uniform(m.rows()).unwrap();
        let mu = ProbabilityVector::uniform(m.cols()).unwrap();
        SwitchInstance::new(gen(f), gen(g), i, lam, mu, m).unwrap()
    }

    #[test]
    fn discrete_residual_examples() {
        let r = discrete_residual(&inst("id", "pow:2", iv(1.0, 2.0), &[vec![1.0, 2.0], vec![2.0, 1.0]])).unwrap();
        assert!((r.lhs - 2.5f64.sqrt()).abs() < 1e-15);
        assert!((r.rhs - 1.5).abs() < 1e-15);
        assert!((r.residual - (2.5f64.sqrt() - 1.5)).abs() < 1e-15);
        assert!((r.residual - 0.081_138_8).abs() < 1e-7);

        let r = discrete_residual(&inst("log", "id", iv(0.5, 8.0), &[vec![1.0, 4.0], vec![4.0, 1.0]])).unwrap();
        assert!((r.lhs - 2.5).abs() < 1e-15);
        assert!((r.rhs - 2.0).abs() < 1e-15);
        assert!((r.residual - 0.5).abs() < 1e-15);
        assert!(!r.degenerate_lambda && !r.degenerate_mu);
    }

    #[test]
    fn affine_pairs_and_constant_matrices_commute() {
        let i = iv(0.5, 3.0);
        let rows = [vec![0.5, 2.9, 1.3], vec![2.2, 0.7, 3.0]];
        for g in ["id", "pow:2", "pow:-1", "exp:1", "exp:-0.5", "log"] {
            let f = gen(g).wrapped(2.0, 3.0).unwrap().to_text();
            assert!(discrete_residual(&inst(&f, g, i, &rows)).unwrap().residual.abs() <= 1e-9, "{g}");
            let r = discrete_residual(&inst("pow:3", g, i, &[vec![1.7; 3], vec![1.7; 3]])).unwrap();
            assert!(r.residual.abs() <= 1e-12, "{g}");
        }
    }

    #[test]
    fn swapping_roles_negates_residual() {
        let a = inst("exp:1", "log", iv(0.5, 3.0), &[vec![0.5, 3.0], vec![2.0, 1.0], vec![0.9, 1.4]]);
        let r1 = discrete_residual(&a).unwrap().residual;
        let r2 = discrete_residual(&a.swapped()).unwrap().residual;
        assert!(r1.abs() > 1e-3);
        assert!((r1 + r2).abs() <= 1e-12);
    }

    #[test]
    fn single_row_or_column_commutes() {
        let r = discrete_residual(&inst("exp:1", "pow:3", iv(0.5, 3.0), &[vec![0.5, 3.0, 1.0]])).unwrap();
        assert!(r.residual.abs() <= 1e-12);
        let r = discrete_residual(&inst("exp:1", "pow:3", iv(0.5, 3.0), &[vec![0.5], vec![3.0]])).unwrap();
        assert!(r.residual.abs() <= 1e-12);
    }

    #[test]
    fn degenerate_weights_are_flagged_and_null() {
        let m = ValueMatrix::from_rows(&[vec![0.6, 2.0], vec![2.5, 1.0]]).unwrap();
        let lam = ProbabilityVector::point_mass(2, 1).unwrap();
        let s = SwitchInstance::new(gen("pow:2"), gen("log"), iv(0.5, 3.0), lam, half(), m).unwrap();
        let r = discrete_residual(&s).unwrap();
        assert!(r.degenerate_lambda);
        assert!(!r.degenerate_mu);
        assert!(r.residual.abs() <= 1e-10);
    }

    #[test]
    fn instance_validation() {
        let m = ValueMatrix::constant(2, 3, 1.0).unwrap();
        assert!(SwitchInstance::new(gen("id"), gen("id"), iv(0.0, 2.0), half(), half(), m.clone()).is_err());
        let three = ProbabilityVector::uniform(3).unwrap();
        assert!(SwitchInstance::new(gen("id"), gen("log"), iv(0.0, 2.0), half(), three.clone(), m.clone()).is_err());
        assert!(SwitchInstance::new(gen("id"), gen("id"), iv(1.5, 2.0), half(), three, m).is_err());
    }

    #[test]
    fn fubini_case() {
        let leb = SimpleMeasure::lebesgue();
        let k = Kernel::bilinear(0.0, 0.0, 0.0, 1.0).unwrap();
        let c = ContinuousSwitchInstance::new(gen("id"), gen("id"), iv(-1.0, 2.0), leb.clone(), leb, k).unwrap();
        let r = continuous_residual(&c).unwrap();
        assert!((r.lhs - 0.25).abs() <= 1e-12);
        assert!((r.rhs - 0.25).abs() <= 1e-12);
        assert!(r.residual.abs() <= 1e-12);
    }

    #[test]
    fn equal_generators_commute_continuously() {
        let lam = SimpleMeasure::new(vec![(0.2, 0.3)], 0.7).unwrap();
        let mu = SimpleMeasure::new(vec![(0.9, 0.5), (0.1, 0.25)], 0.25).unwrap();
        let k = Kernel::bilinear(0.6, 1.1, 0.4, 0.8).unwrap();
        for g in ["pow:2", "exp:-0.5", "log"] {
            let c = ContinuousSwitchInstance::new(gen(g), gen(g), iv(0.5, 3.0), lam.clone(), mu.clone(), k).unwrap();
            assert!(continuous_residual(&c).unwrap().residual.abs() <= 1e-10, "{g}");
        }
    }

    #[test]
    fn reduction_examples() {
        let leb = SimpleMeasure::lebesgue();
        let k = Kernel::step(1.0, 2.5, 1.5, 3.0, 0.5, 0.25).unwrap();
        let c = ContinuousSwitchInstance::new(gen("id"), gen("pow:2"), iv(0.5, 3.0), leb.clone(), leb.clone(), k).unwrap();
        let red = reduce_to_discrete(&c).unwrap();
        assert_eq!(red.instance.lambda.weights(), &[0.5, 0.5]);
        assert_eq!(red.instance.mu.weights(), &[0.25, 0.75]);
        assert_eq!(red.instance.matrix.data(), &[1.0, 1.5, 2.5, 3.0]);
        let cont = continuous_residual(&c).unwrap().residual;
        let disc = discrete_residual(&red.instance).unwrap().residual;
        assert!(cont.abs() > 1e-3);
        assert!((cont - disc).abs() <= 1e-12);

        let cut0 = Kernel::step(1.0, 2.5, 1.5, 3.0, 0.0, 0.25).unwrap();
        let c0 = ContinuousSwitchInstance::new(gen("id"), gen("pow:2"), iv(0.5, 3.0), leb.clone(), leb.clone(), cut0).unwrap();
        assert_eq!(reduce_to_discrete(&c0), Err(Error::DegenerateCut { mass: 0.0 }));

        let flat = Kernel::step(2.0, 2.0, 2.0, 2.0, 0.3, 0.6).unwrap();
        let cf = ContinuousSwitchInstance::new(gen("log"), gen("pow:2"), iv(0.5, 3.0), leb.clone(), leb.clone(), flat).unwrap();
        let red = reduce_to_discrete(&cf).unwrap();
        assert!(discrete_residual(&red.instance).unwrap().residual.abs() <= 1e-15);

        let bil = ContinuousSwitchInstance::new(gen("id"), gen("id"), iv(-1.0, 2.0), leb.clone(), leb, Kernel::bilinear(0.0, 0.0, 0.0, 1.0).unwrap()).unwrap();
        assert_eq!(reduce_to_discrete(&bil), Err(Error::NotStepKernel));
    }

    #[test]
    fn kernel_outside_interval_is_rejected() {
        let leb = SimpleMeasure::lebesgue();
        let k = Kernel::bilinear(0.0, 0.0, 0.0, 1.0).unwrap();
        assert!(matches!(
            ContinuousSwitchInstance::new(gen("log"), gen("id"), iv(0.5, 2.0), leb.clone(), leb, k),
            Err(Error::KernelOutOfRange { .. })
        ));
    }
}
