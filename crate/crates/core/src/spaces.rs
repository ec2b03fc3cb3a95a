//! Valued monoids, scalars and contracting structures on pointed normed spaces.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpaceError {
    #[error("scalar {scalar:?} does not belong to monoid {monoid:?}")]
    KindMismatch { monoid: ValuedMonoid, scalar: Scalar },
    #[error("point has length {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("the absorbing scalar has no inverse action")]
    AbsorbingScalar,
    #[error("the standard real action needs a real monoid, got {0:?}")]
    StandardNeedsReals(ValuedMonoid),
    #[error("invalid monoid parameter: {0}")]
    BadParameter(String),
}

/// A valued monoid Σ together with its valuation `v : Σ → ℝ₊`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "r")]
pub enum ValuedMonoid {
    Reals,
    NonnegReals,
    UnitInterval,
    /// `ℕ ∪ {∞}` under addition with `v(n) = r^n`.
    NrMonoid(f64),
}

impl ValuedMonoid {
    pub fn nr(r: f64) -> Result<Self, SpaceError> {
        if r > 0.0 && r < 1.0 {
            Ok(ValuedMonoid::NrMonoid(r))
        } else {
            Err(SpaceError::BadParameter(format!("r must lie in (0,1), got {r}")))
        }
    }

    pub fn is_real(&self) -> bool {
        !matches!(self, ValuedMonoid::NrMonoid(_))
    }

    pub fn ratio(&self) -> Option<f64> {
        match self {
            ValuedMonoid::NrMonoid(r) => Some(*r),
            _ => None,
        }
    }

    pub fn contains(&self, t: &Scalar) -> bool {
        match (self, t) {
            (ValuedMonoid::Reals, Scalar::Real(x)) => x.is_finite(),
            (ValuedMonoid::NonnegReals, Scalar::Real(x)) => x.is_finite() && *x >= 0.0,
            (ValuedMonoid::UnitInterval, Scalar::Real(x)) => (0.0..=1.0).contains(x),
            (ValuedMonoid::NrMonoid(_), Scalar::Nat(_) | Scalar::Infinity) => true,
            _ => false,
        }
    }

    pub fn one(&self) -> Scalar {
        if self.is_real() {
            Scalar::Real(1.0)
        } else {
            Scalar::Nat(0)
        }
    }

    pub fn zero(&self) -> Scalar {
        if self.is_real() {
            Scalar::Real(0.0)
        } else {
            Scalar::Infinity
        }
    }

    pub fn label(&self) -> String {
        match self {
            ValuedMonoid::Reals => "reals".into(),
            ValuedMonoid::NonnegReals => "rplus".into(),
            ValuedMonoid::UnitInterval => "unit".into(),
            ValuedMonoid::NrMonoid(r) => format!("nr({r})"),
        }
    }
}

/// An element of a valued monoid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Scalar {
    Real(f64),
    Nat(u32),
    /// The absorbing element of `ℕ ∪ {∞}`.
    Infinity,
}

impl Scalar {
    /// Monoid product. For `ℕ ∪ {∞}` the law is addition.
    pub fn mul(&self, other: &Scalar) -> Option<Scalar> {
        match (self, other) {
            (Scalar::Real(a), Scalar::Real(b)) => Some(Scalar::Real(a * b)),
            (Scalar::Infinity, Scalar::Nat(_) | Scalar::Infinity)
            | (Scalar::Nat(_), Scalar::Infinity) => Some(Scalar::Infinity),
            (Scalar::Nat(a), Scalar::Nat(b)) => Some(a.checked_add(*b).map_or(Scalar::Infinity, Scalar::Nat)),
            _ => None,
        }
    }
}

/// Returns `v(t)`.
pub fn valuation(m: &ValuedMonoid, t: &Scalar) -> Result<f64, SpaceError> {
    if !m.contains(t) {
        return Err(SpaceError::KindMismatch { monoid: *m, scalar: *t });
    }
    Ok(match (m, t) {
        (_, Scalar::Real(x)) => x.abs(),
        (ValuedMonoid::NrMonoid(r), Scalar::Nat(n)) => r.powi(*n as i32),
        (_, Scalar::Infinity) => 0.0,
        _ => unreachable!("membership checked above"),
    })
}

/// Geometric schedule of nonzero scalars with valuations decreasing to 0.
///
/// For `NrMonoid` the schedule is `0, 1, 2, …` and `seed_ratio` is ignored.
pub fn scalar_schedule(m: &ValuedMonoid, count: usize, seed_ratio: f64) -> Vec<Scalar> {
    match m {
        ValuedMonoid::NrMonoid(_) => (0..count as u32).map(Scalar::Nat).collect(),
        _ => {
            let mut out = Vec::with_capacity(count);
            let mut t = 1.0;
            for _ in 0..count {
                out.push(Scalar::Real(t));
                t *= seed_ratio;
            }
            out
        }
    }
}

/// Norms on coordinate spaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Norm {
    L1,
    #[default]
    L2,
    LInf,
}

impl Norm {
    pub fn from_p(p: &str) -> Option<Norm> {
        match p {
            "1" => Some(Norm::L1),
            "2" => Some(Norm::L2),
            "inf" | "oo" | "infinity" => Some(Norm::LInf),
            _ => None,
        }
    }

    pub fn norm(&self, x: &[f64]) -> f64 {
        match self {
            Norm::L1 => x.iter().map(|v| v.abs()).sum(),
            Norm::L2 => x.iter().map(|v| v * v).sum::<f64>().sqrt(),
            Norm::LInf => x.iter().fold(0.0, |m, v| m.max(v.abs())),
        }
    }

    pub fn dist(&self, x: &[f64], y: &[f64]) -> f64 {
        match self {
            Norm::L1 => x.iter().zip(y).map(|(a, b)| (a - b).abs()).sum(),
            Norm::L2 => x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt(),
            Norm::LInf => x.iter().zip(y).fold(0.0, |m, (a, b)| m.max((a - b).abs())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Variant {
    /// `t⋆x = a + v(t)(x − a)`.
    #[default]
    Canonical,
    /// `t⋆x = a + t(x − a)`, real monoids only.
    StandardReal,
}

/// A pointed normed coordinate space with an external action of a valued monoid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractingSpace {
    pub dim: usize,
    pub base: Vec<f64>,
    pub norm: Norm,
    pub variant: Variant,
    pub monoid: ValuedMonoid,
}

impl ContractingSpace {
    pub fn new(base: Vec<f64>, norm: Norm, variant: Variant, monoid: ValuedMonoid) -> Result<Self, SpaceError> {
        if variant == Variant::StandardReal && !monoid.is_real() {
            return Err(SpaceError::StandardNeedsReals(monoid));
        }
        Ok(ContractingSpace { dim: base.len(), base, norm, variant, monoid })
    }

    /// Canonical structure centred at the origin.
    pub fn origin(dim: usize, monoid: ValuedMonoid) -> Self {
        ContractingSpace {
            dim,
            base: vec![0.0; dim],
            norm: Norm::L2,
            variant: Variant::Canonical,
            monoid,
        }
    }

    fn factor(&self, t: &Scalar) -> Result<f64, SpaceError> {
        match (self.variant, t) {
            (Variant::StandardReal, Scalar::Real(x)) if self.monoid.contains(t) => Ok(*x),
            _ => valuation(&self.monoid, t),
        }
    }

    fn check_dim(&self, x: &[f64]) -> Result<(), SpaceError> {
        if x.len() != self.dim {
            return Err(SpaceError::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        Ok(())
    }

    pub fn dist(&self, x: &[f64], y: &[f64]) -> f64 {
        self.norm.dist(x, y)
    }
}

/// The external operation `t⋆x`.
pub fn star(s: &ContractingSpace, t: &Scalar, x: &[f64]) -> Result<Vec<f64>, SpaceError> {
    s.check_dim(x)?;
    let c = s.factor(t)?;
    if c == 0.0 {
        return Ok(s.base.clone());
    }
    Ok(s.base.iter().zip(x).map(|(a, xi)| a + c * (xi - a)).collect())
}

/// The inverse operation `t⋆⁻¹y`.
pub fn star_inv(s: &ContractingSpace, t: &Scalar, y: &[f64]) -> Result<Vec<f64>, SpaceError> {
    s.check_dim(y)?;
    let c = s.factor(t)?;
    if c == 0.0 {
        return Err(SpaceError::AbsorbingScalar);
    }
    Ok(s.base.iter().zip(y).map(|(a, yi)| a + (yi - a) / c).collect())
}
