//! Catalog of continuous strictly monotone generators `w: I → R`.
//!
//! Only catalog members can be built, so continuity and injectivity hold by
//! construction. Every member has a closed-form inverse; values slightly
//! outside the image (floating noise) are clamped back to it and reported.

use alloc::format;
use alloc::string::String;
use core::fmt;
use core::str::FromStr;

use crate::{Error, Result};

/// Relative amount by which an argument to an inverse may leave the image
/// hull and still be accepted (after clamping).
pub const IMAGE_EXCEEDANCE_TOL: f64 = 1e-9;

/// A finite, non-degenerate closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_finite() && hi.is_finite() && lo < hi {
            Ok(Self { lo, hi })
        } else {
            Err(Error::InvalidInterval { lo, hi })
        }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn clamp(&self, x: f64) -> f64 {
        x.clamp(self.lo, self.hi)
    }

    /// Point at fraction `t ∈ [0, 1]` of the way from `lo` to `hi`.
    pub fn lerp(&self, t: f64) -> f64 {
        self.clamp(self.lo + t * (self.hi - self.lo))
    }
}

/// `x ↦ a·x + b` with `a ≠ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Affine {
    pub a: f64,
    pub b: f64,
}

impl Affine {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidGenerator("affine coefficients must be finite"));
        }
        if a == 0.0 {
            return Err(Error::InvalidGenerator("affine slope must be non-zero"));
        }
        Ok(Self { a, b })
    }

    pub fn apply(&self, x: f64) -> f64 {
        self.a * x + self.b
    }

    pub fn apply_inverse(&self, y: f64) -> f64 {
        (y - self.b) / self.a
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Affine) -> Affine {
        Affine { a: self.a * inner.a, b: self.a * inner.b + self.b }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GeneratorKind {
    Identity,
    Affine(Affine),
    /// `x ↦ x^p`, `p ≠ 0`, on positive intervals (`[0, hi]` allowed when `p > 0`).
    Power(f64),
    /// `x ↦ exp(t·x)`, `t ≠ 0`.
    Exponential(f64),
    /// `x ↦ ln x` on positive intervals.
    Logarithm,
}

/// A catalog generator with an optional affine post-composition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    pub wrap: Option<Affine>,
}

/// Closed hull `[lo, hi]` of `w[I]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorImage {
    pub lo: f64,
    pub hi: f64,
}

impl GeneratorImage {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, y: f64) -> bool {
        self.lo <= y && y <= self.hi
    }
}

/// Result of an inversion: the preimage and whether the argument had to be
/// clamped into the image hull first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Preimage {
    pub x: f64,
    pub clamped: bool,
}

impl GeneratorSpec {
    pub const fn new(kind: GeneratorKind) -> Self {
        Self { kind, wrap: None }
    }

    pub const fn identity() -> Self {
        Self::new(GeneratorKind::Identity)
    }

    pub fn affine(a: f64, b: f64) -> Result<Self> {
        Ok(Self::new(GeneratorKind::Affine(Affine::new(a, b)?)))
    }

    pub fn power(p: f64) -> Result<Self> {
        if !p.is_finite() || p == 0.0 {
            return Err(Error::InvalidGenerator("power exponent must be finite and non-zero"));
        }
        Ok(Self::new(GeneratorKind::Power(p)))
    }

    pub fn exponential(t: f64) -> Result<Self> {
        if !t.is_finite() || t == 0.0 {
            return Err(Error::InvalidGenerator("exponential rate must be finite and non-zero"));
        }
        Ok(Self::new(GeneratorKind::Exponential(t)))
    }

    pub const fn logarithm() -> Self {
        Self::new(GeneratorKind::Logarithm)
    }

    /// `affine(a, b) ∘ self`, folding into any existing wrap.
    pub fn wrapped(self, a: f64, b: f64) -> Result<Self> {
        let outer = Affine::new(a, b)?;
        let wrap = match self.wrap {
            Some(inner) => outer.compose(&inner),
            None => outer,
        };
        Affine::new(wrap.a, wrap.b)?;
        Ok(Self { kind: self.kind, wrap: Some(wrap) })
    }

    /// Checks parameter invariants and that the generator is finite on `interval`.
    pub fn validate(&self, interval: &Interval) -> Result<()> {
        match self.kind {
            GeneratorKind::Identity => {}
            GeneratorKind::Affine(aff) => {
                Affine::new(aff.a, aff.b)?;
            }
            GeneratorKind::Power(p) => {
                if !p.is_finite() || p == 0.0 {
                    return Err(Error::InvalidGenerator("power exponent must be finite and non-zero"));
                }
                // x^p stays continuous and injective at 0 when p > 0.
                if interval.lo() < 0.0 || (interval.lo() == 0.0 && p < 0.0) {
                    return Err(Error::InvalidGenerator("power generators need a positive interval"));
                }
            }
            GeneratorKind::Exponential(t) => {
                if !t.is_finite() || t == 0.0 {
                    return Err(Error::InvalidGenerator("exponential rate must be finite and non-zero"));
                }
            }
            GeneratorKind::Logarithm => {
                if interval.lo() <= 0.0 {
                    return Err(Error::InvalidGenerator("logarithm needs a positive interval"));
                }
            }
        }
        if let Some(w) = self.wrap {
            Affine::new(w.a, w.b)?;
        }
        let (a, b) = (self.eval_raw(interval.lo()), self.eval_raw(interval.hi()));
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidGenerator("generator overflows on the interval"));
        }
        if a == b {
            return Err(Error::InvalidGenerator("generator is not injective at floating precision"));
        }
        Ok(())
    }

    /// Validates once and returns a generator bound to `interval`.
    pub fn bind(&self, interval: Interval) -> Result<BoundGenerator> {
        self.validate(&interval)?;
        let (a, b) = (self.eval_raw(interval.lo()), self.eval_raw(interval.hi()));
        Ok(BoundGenerator {
            spec: *self,
            interval,
            image: GeneratorImage { lo: a.min(b), hi: a.max(b) },
            increasing: b > a,
        })
    }

    pub fn evaluate(&self, interval: &Interval, x: f64) -> Result<f64> {
        self.bind(*interval)?.eval(x)
    }

    pub fn invert(&self, interval: &Interval, y: f64) -> Result<f64> {
        Ok(self.bind(*interval)?.invert(y)?.x)
    }

    pub fn image(&self, interval: &Interval) -> Result<GeneratorImage> {
        Ok(self.bind(*interval)?.image)
    }

    fn eval_base(&self, x: f64) -> f64 {
        match self.kind {
            GeneratorKind::Identity => x,
            GeneratorKind::Affine(aff) => aff.apply(x),
            GeneratorKind::Power(p) => power(x, p),
            GeneratorKind::Exponential(t) => libm::exp(t * x),
            GeneratorKind::Logarithm => libm::log(x),
        }
    }

    fn invert_base(&self, y: f64) -> f64 {
        match self.kind {
            GeneratorKind::Identity => y,
            GeneratorKind::Affine(aff) => aff.apply_inverse(y),
            GeneratorKind::Power(p) => root(y, p),
            GeneratorKind::Exponential(t) => libm::log(y) / t,
            GeneratorKind::Logarithm => libm::exp(y),
        }
    }

    fn eval_raw(&self, x: f64) -> f64 {
        let y = self.eval_base(x);
        match self.wrap {
            Some(w) => w.apply(y),
            None => y,
        }
    }

    fn invert_raw(&self, y: f64) -> f64 {
        let y = match self.wrap {
            Some(w) => w.apply_inverse(y),
            None => y,
        };
        self.invert_base(y)
    }
}

fn power(x: f64, p: f64) -> f64 {
    if p == 1.0 {
        x
    } else if p == 2.0 {
        x * x
    } else if p == -1.0 {
        1.0 / x
    } else if p == 0.5 {
        libm::sqrt(x)
    } else {
        libm::pow(x, p)
    }
}

fn root(y: f64, p: f64) -> f64 {
    if p == 1.0 {
        y
    } else if p == 2.0 {
        libm::sqrt(y)
    } else if p == 3.0 {
        libm::cbrt(y)
    } else if p == -1.0 {
        1.0 / y
    } else if p == 0.5 {
        y * y
    } else {
        libm::pow(y, 1.0 / p)
    }
}

/// A validated generator on a fixed interval, cheap to evaluate repeatedly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundGenerator {
    spec: GeneratorSpec,
    interval: Interval,
    image: GeneratorImage,
    increasing: bool,
}

impl BoundGenerator {
    pub fn spec(&self) -> &GeneratorSpec {
        &self.spec
    }

    pub fn interval(&self) -> &Interval {
        &self.interval
    }

    pub fn image(&self) -> GeneratorImage {
        self.image
    }

    pub fn is_increasing(&self) -> bool {
        self.increasing
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if !self.interval.contains(x) {
            return Err(Error::OutsideInterval { x, lo: self.interval.lo(), hi: self.interval.hi() });
        }
        Ok(self.spec.eval_raw(x))
    }

    /// Inverse of the corestriction to the image. Arguments within
    /// [`IMAGE_EXCEEDANCE_TOL`] of the hull are clamped onto it.
    pub fn invert(&self, y: f64) -> Result<Preimage> {
        let GeneratorImage { lo, hi } = self.image;
        let slack = IMAGE_EXCEEDANCE_TOL * (hi - lo);
        let (y, clamped) = if lo <= y && y <= hi {
            (y, false)
        } else if lo - slack <= y && y <= hi + slack {
            (y.clamp(lo, hi), true)
        } else {
            return Err(Error::OutOfImage { y, lo, hi });
        };
        let x = self.spec.invert_raw(y);
        if x.is_nan() {
            return Err(Error::NonFinite("generator inverse"));
        }
        // Closed-form inverses may land an ulp or so outside the interval.
        Ok(Preimage { x: self.interval.clamp(x), clamped })
    }
}

impl fmt::Display for Affine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "affine:{}:{}", self.a, self.b)
    }
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            GeneratorKind::Identity => f.write_str("id")?,
            GeneratorKind::Affine(aff) => write!(f, "{aff}")?,
            GeneratorKind::Power(p) => write!(f, "pow:{p}")?,
            GeneratorKind::Exponential(t) => write!(f, "exp:{t}")?,
            GeneratorKind::Logarithm => f.write_str("log")?,
        }
        if let Some(w) = self.wrap {
            write!(f, "|{w}")?;
        }
        Ok(())
    }
}

fn parse_number(text: &str, what: &str) -> Result<f64> {
    let v: f64 = text
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad {what} `{text}`")))?;
    if !v.is_finite() {
        return Err(Error::Parse(format!("{what} must be finite, got `{text}`")));
    }
    Ok(v)
}

fn parse_affine(args: &[&str], original: &str) -> Result<Affine> {
    match args {
        [a, b] => Affine::new(parse_number(a, "slope")?, parse_number(b, "offset")?),
        _ => Err(Error::Parse(format!("`{original}`: affine takes two parameters, affine:A:B"))),
    }
}

/// Parses the generator mini-language: `id`, `affine:A:B`, `pow:P`, `exp:T`,
/// `log`, optionally followed by `|affine:A:B`.
impl FromStr for GeneratorSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split('|');
        let base = parts.next().unwrap_or("").trim();
        let wrap = parts.next().map(str::trim);
        if parts.next().is_some() {
            return Err(Error::Parse(format!("`{s}`: at most one wrap suffix is allowed")));
        }
        let fields: alloc::vec::Vec<&str> = base.split(':').collect();
        let spec = match fields.as_slice() {
            ["id"] => Self::identity(),
            ["log"] => Self::logarithm(),
            ["affine", rest @ ..] => Self::new(GeneratorKind::Affine(parse_affine(rest, s)?)),
            ["pow", p] => Self::power(parse_number(p, "exponent")?)?,
            ["exp", t] => Self::exponential(parse_number(t, "rate")?)?,
            _ => return Err(Error::Parse(format!("unknown generator `{base}`"))),
        };
        match wrap {
            None => Ok(spec),
            Some(w) => match w.split(':').collect::<alloc::vec::Vec<_>>().as_slice() {
                ["affine", rest @ ..] => {
                    let aff = parse_affine(rest, s)?;
                    Ok(Self { kind: spec.kind, wrap: Some(aff) })
                }
                _ => Err(Error::Parse(format!("`{s}`: wrap suffix must be affine:A:B"))),
            },
        }
    }
}

impl GeneratorSpec {
    /// Mini-language form, parseable by [`FromStr`].
    pub fn to_text(&self) -> String {
        format!("{self}")
    }
}

/// True when `|a − b| ≤ tol · max(1, |a|, |b|)`.
#[cfg(test)]
fn close(a: f64, b: f64, tol: f64) -> bool {
    use crate::numeric::abs;
    abs(a - b) <= tol * 1f64.max(abs(a)).max(abs(b))
}
