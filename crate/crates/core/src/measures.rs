//! Finite probability vectors and simple probability measures on `[0, 1]`
//! (finitely many atoms plus a multiple of Lebesgue measure).

use alloc::vec::Vec;
use core::cell::RefCell;

use crate::numeric::{abs, dot, pairwise_sum, pairwise_sum_by, GaussLegendre};
use crate::{Error, Result};

/// Allowed deviation of a total mass from 1.
pub const MASS_TOL: f64 = 1e-12;

/// Gauss–Legendre points per panel.
pub const QUADRATURE_POINTS: usize = 16;
/// Uniform panels on `[0, 1]` before splitting at break points.
pub const QUADRATURE_PANELS: usize = 32;

/// Weights `p_1, …, p_k ≥ 0` summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector {
    weights: Vec<f64>,
    nondegenerate: bool,
}

impl ProbabilityVector {
    /// Validates and renormalizes `weights`.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptyWeights);
        }
        for (index, &weight) in weights.iter().enumerate() {
            if !weight.is_finite() {
                return Err(Error::NonFinite("weights"));
            }
            if weight < 0.0 {
                return Err(Error::NegativeWeight { index, weight });
            }
        }
        let sum = pairwise_sum(&weights);
        if abs(sum - 1.0) > MASS_TOL {
            return Err(Error::WeightSum(sum));
        }
        let weights = if sum == 1.0 { weights } else { weights.iter().map(|w| w / sum).collect() };
        let nondegenerate = weights.iter().filter(|&&w| w > 0.0).count() >= 2;
        Ok(Self { weights, nondegenerate })
    }

    pub fn uniform(len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::EmptyWeights);
        }
        Self::new(alloc::vec![1.0 / len as f64; len])
    }

    pub fn point_mass(len: usize, index: usize) -> Result<Self> {
        if index >= len {
            return Err(Error::InvalidArgument("point-mass index out of range"));
        }
        let mut w = alloc::vec![0.0; len];
        w[index] = 1.0;
        Self::new(w)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// At least two strictly positive weights, so some event has probability
    /// strictly between 0 and 1.
    pub fn is_nondegenerate(&self) -> bool {
        self.nondegenerate
    }

    pub fn require_nondegenerate(&self) -> Result<&Self> {
        if self.nondegenerate {
            Ok(self)
        } else {
            Err(Error::DegenerateMeasure)
        }
    }

    /// `Σ p_i · values_i`.
    pub fn expectation(&self, values: &[f64]) -> Result<f64> {
        if values.len() != self.weights.len() {
            return Err(Error::LengthMismatch { expected: self.weights.len(), found: values.len() });
        }
        Ok(dot(&self.weights, values))
    }
}

/// Atoms `(location, mass)` in `[0, 1]` plus `uniform` times Lebesgue
/// measure on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimpleMeasure {
    atoms: Vec<(f64, f64)>,
    uniform: f64,
}

impl SimpleMeasure {
    pub fn new(atoms: Vec<(f64, f64)>, uniform: f64) -> Result<Self> {
        if !uniform.is_finite() || uniform < 0.0 {
            return Err(Error::InvalidMeasure("uniform weight must be finite and non-negative"));
        }
        for &(loc, mass) in &atoms {
            if !(0.0..=1.0).contains(&loc) {
                return Err(Error::InvalidMeasure("atom locations must lie in [0, 1]"));
            }
            if !mass.is_finite() || mass < 0.0 {
                return Err(Error::InvalidMeasure("atom masses must be finite and non-negative"));
            }
        }
        let total = pairwise_sum_by(atoms.len(), |i| atoms[i].1) + uniform;
        if abs(total - 1.0) > MASS_TOL {
            return Err(Error::InvalidMeasure("total mass must be 1"));
        }
        Ok(Self { atoms, uniform })
    }

    /// Lebesgue measure on `[0, 1]`.
    pub fn lebesgue() -> Self {
        Self { atoms: Vec::new(), uniform: 1.0 }
    }

    pub fn dirac(location: f64) -> Result<Self> {
        Self::new(alloc::vec![(location, 1.0)], 0.0)
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn uniform_weight(&self) -> f64 {
        self.uniform
    }

    /// Measure of `[0, cut)`.
    pub fn mass_below(&self, cut: f64) -> f64 {
        let atoms = pairwise_sum_by(self.atoms.len(), |i| {
            let (loc, mass) = self.atoms[i];
            if loc < cut {
                mass
            } else {
                0.0
            }
        });
        atoms + self.uniform * cut.clamp(0.0, 1.0)
    }

    /// Some event has measure strictly inside `(0, 1)`.
    pub fn is_nondegenerate(&self) -> bool {
        self.uniform > 0.0 || self.atoms.iter().filter(|a| a.1 > 0.0).count() >= 2
    }

    /// `∫ func dμ` over `[0, 1]`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, func: F) -> Result<f64> {
        self.integrate_with_breaks(&[], func)
    }

    /// Like [`integrate`](Self::integrate) for integrands that are smooth
    /// except at `breaks`; quadrature panels are split there.
    pub fn integrate_with_breaks<F: Fn(f64) -> f64>(&self, breaks: &[f64], func: F) -> Result<f64> {
        let atoms = pairwise_sum_by(self.atoms.len(), |i| {
            let (loc, mass) = self.atoms[i];
            mass * func(loc)
        });
        let continuous = if self.uniform > 0.0 { self.uniform * quadrature_unit(breaks, &func) } else { 0.0 };
        let total = atoms + continuous;
        if total.is_finite() {
            Ok(total)
        } else {
            Err(Error::NonFinite("integrand"))
        }
    }

    /// Fallible integrand; the first error raised wins.
    pub fn try_integrate_with_breaks<F: Fn(f64) -> Result<f64>>(&self, breaks: &[f64], func: F) -> Result<f64> {
        let failure: RefCell<Option<Error>> = RefCell::new(None);
        let value = self.integrate_with_breaks(breaks, |x| match func(x) {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        });
        match failure.into_inner() {
            Some(e) => Err(e),
            None => value,
        }
    }
}

/// Composite Gauss–Legendre over `[0, 1]`, with the uniform panel grid
/// refined at each interior break point.
fn quadrature_unit<F: Fn(f64) -> f64>(breaks: &[f64], func: &F) -> f64 {
    let rule = GaussLegendre::new(QUADRATURE_POINTS);
    let mut edges: Vec<f64> = (0..=QUADRATURE_PANELS).map(|k| k as f64 / QUADRATURE_PANELS as f64).collect();
    edges.extend(breaks.iter().copied().filter(|&b| b > 0.0 && b < 1.0));
    edges.sort_by(f64::total_cmp);
    edges.dedup();
    pairwise_sum_by(edges.len() - 1, |k| rule.integrate(edges[k], edges[k + 1], 1, func))
}
