//! Exact distance to `K∞ = ∪ₙ 3ⁿK`, `K` the triadic Cantor set, via triadic codes.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

/// Cap on the number of digits examined before giving up on cycle detection.
pub const DIGIT_CAP: usize = 10_000;

/// Triadic code `s` with `φ(s) = Σ s_n 3^n`, truncated after its first digit 1.
///
/// Digits run downward from exponent `top`. When no digit 1 occurs the code is
/// eventually periodic from `cycle_start` on (or `truncated` if the cap was hit).
/// At boundaries the expansion without a 1 is used (`1/3 = 0.0222…`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TriadicCode {
    pub top: i64,
    pub digits: Vec<u8>,
    pub cycle_start: Option<usize>,
    pub truncated: bool,
}

impl TriadicCode {
    fn exponent(&self, i: usize) -> i64 {
        self.top - i as i64
    }

    /// `k(s) = sup{n | s_n = 1}`.
    pub fn k(&self) -> Option<i64> {
        self.digits.iter().position(|d| *d == 1).map(|i| self.exponent(i))
    }

    /// Digits in `{0, 2}` only.
    pub fn in_k_tilde(&self) -> bool {
        self.k().is_none()
    }

    fn cycle(&self) -> &[u8] {
        self.cycle_start.map_or(&[], |c| &self.digits[c..])
    }

    /// Eventually 0 downward.
    pub fn is_tri_plus(&self) -> bool {
        self.in_k_tilde() && !self.cycle().is_empty() && self.cycle().iter().all(|d| *d == 0)
    }

    /// Eventually 2 downward.
    pub fn is_tri_minus(&self) -> bool {
        self.in_k_tilde() && !self.cycle().is_empty() && self.cycle().iter().all(|d| *d == 2)
    }

    fn prefix_value(&self, upto: usize) -> BigRational {
        let mut acc = BigRational::zero();
        for (i, d) in self.digits[..upto].iter().enumerate() {
            acc += BigRational::from_integer(BigInt::from(*d)) * pow3(self.exponent(i));
        }
        acc
    }

    /// `φ(s)`. Truncated codes give the value of the examined digits.
    pub fn phi(&self) -> BigRational {
        match self.cycle_start {
            None => self.prefix_value(self.digits.len()),
            Some(c) => {
                let cyc = &self.digits[c..];
                let l = cyc.len() as i64;
                // Σ_{j≥0} 3^{-jl} · (value of one period)
                let one_period = self.prefix_value(self.digits.len()) - self.prefix_value(c);
                let ratio = pow3(-l);
                self.prefix_value(c) + one_period / (BigRational::one() - ratio)
            }
        }
    }

    /// `φ(p(s))` and `φ(q(s))`: `s_k` replaced by 0 followed by 2s, resp. by 2 followed by 0s.
    pub fn bracket(&self) -> Option<(BigRational, BigRational)> {
        let i = self.digits.iter().position(|d| *d == 1)?;
        let k = self.exponent(i);
        let prefix = self.prefix_value(i);
        let unit = pow3(k);
        Some((&prefix + &unit, prefix + unit * BigRational::from_integer(BigInt::from(2))))
    }
}

fn pow3(n: i64) -> BigRational {
    let p = BigInt::from(3).pow(n.unsigned_abs() as u32);
    if n >= 0 {
        BigRational::from_integer(p)
    } else {
        BigRational::new(BigInt::one(), p)
    }
}

/// Smallest `m` with `x ≤ 3^m`, for `x > 0`.
fn cover_exponent(x: &BigRational) -> i64 {
    let mut m: i64 = 0;
    while x > &pow3(m) {
        m += 1;
    }
    while x <= &pow3(m - 1) {
        m -= 1;
    }
    m
}

/// Triadic code of `x ≥ 0`, read until its first digit 1.
pub fn triadic_code(x: &BigRational) -> TriadicCode {
    assert!(!x.is_negative(), "triadic codes are defined for x ≥ 0");
    if x.is_zero() {
        return TriadicCode { top: 0, digits: vec![0], cycle_start: Some(0), truncated: false };
    }
    let m = cover_exponent(x);
    // y = x / 3^m ∈ (1/3, 1], tracked as n / d with d fixed
    let y = x / pow3(m);
    let d = y.denom().clone();
    let mut n = y.numer().clone();
    let mut digits = Vec::new();
    let mut seen: HashMap<BigInt, usize> = HashMap::new();
    let two_d = &d * 2;
    loop {
        if let Some(&pos) = seen.get(&n) {
            return TriadicCode { top: m - 1, digits, cycle_start: Some(pos), truncated: false };
        }
        if digits.len() >= DIGIT_CAP {
            return TriadicCode { top: m - 1, digits, cycle_start: None, truncated: true };
        }
        seen.insert(n.clone(), digits.len());
        let t = &n * 3;
        if t <= d {
            digits.push(0);
            n = t;
        } else if t >= two_d {
            digits.push(2);
            n = t - &two_d;
        } else {
            digits.push(1);
            return TriadicCode { top: m - 1, digits, cycle_start: None, truncated: false };
        }
    }
}

/// Membership of `x` in `K∞`, `K∞⁺` (left gap) and `K∞⁻` (right gap), with the
/// bracketing points of `K∞` when `x` lies in a gap.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CantorLocation {
    pub in_kinf: bool,
    pub in_kplus: bool,
    pub in_kminus: bool,
    pub bracket: Option<(f64, f64)>,
    pub distance: f64,
    /// Digit search hit the cap; `x` is within `3^{top−cap}` of `K∞`.
    pub truncated: bool,
}

/// Exact location for a rational `x`. Negative `x` lies in the unbounded left gap.
pub fn cantor_locate_exact(x: &BigRational) -> (CantorLocation, BigRational) {
    if x.is_negative() {
        let loc = CantorLocation {
            in_kinf: false,
            in_kplus: false,
            in_kminus: false,
            bracket: None,
            distance: (-x).to_f64().unwrap_or(f64::INFINITY),
            truncated: false,
        };
        return (loc, -x);
    }
    if x.is_zero() {
        let loc = CantorLocation {
            in_kinf: true,
            in_kplus: true,
            in_kminus: false,
            bracket: None,
            distance: 0.0,
            truncated: false,
        };
        return (loc, BigRational::zero());
    }
    let code = triadic_code(x);
    match code.bracket() {
        Some((lo, hi)) => {
            let dist = (x - &lo).min(&hi - x);
            let loc = CantorLocation {
                in_kinf: false,
                in_kplus: false,
                in_kminus: false,
                bracket: Some((lo.to_f64().unwrap(), hi.to_f64().unwrap())),
                distance: dist.to_f64().unwrap(),
                truncated: false,
            };
            (loc, dist)
        }
        None => {
            let loc = CantorLocation {
                in_kinf: true,
                in_kplus: code.is_tri_plus(),
                in_kminus: code.is_tri_minus(),
                bracket: None,
                distance: 0.0,
                truncated: code.truncated,
            };
            (loc, BigRational::zero())
        }
    }
}

pub fn cantor_locate(x: f64) -> CantorLocation {
    match BigRational::from_float(x) {
        Some(q) => cantor_locate_exact(&q).0,
        None => CantorLocation {
            in_kinf: false,
            in_kplus: false,
            in_kminus: false,
            bracket: None,
            distance: f64::NAN,
            truncated: false,
        },
    }
}

/// `d(x, K∞)` computed exactly.
pub fn cantor_distance_exact(x: &BigRational) -> BigRational {
    cantor_locate_exact(x).1
}

/// `d(x, K∞)` for a float, exact up to the final rounding.
pub fn cantor_distance(x: f64) -> f64 {
    if x < 0.0 {
        return -x;
    }
    match BigRational::from_float(x) {
        Some(q) => cantor_distance_exact(&q).to_f64().unwrap_or(f64::NAN),
        None => f64::NAN,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn distance_examples() {
        assert_eq!(cantor_distance(-2.0), 2.0);
        assert_eq!(cantor_distance(1.0), 0.0);
        assert_eq!(cantor_distance_exact(&q(1, 2)), q(1, 6));
        assert_eq!(cantor_distance_exact(&q(3, 2)), q(1, 2));
        assert_eq!(cantor_distance_exact(&q(1, 4)), q(0, 1));
        assert_eq!(cantor_distance_exact(&q(10, 1)), q(1, 1));
        assert_eq!(cantor_distance_exact(&q(15, 1)), q(3, 1));
    }

    #[test]
    fn locate_examples() {
        let l = cantor_locate(0.0);
        assert!(l.in_kinf && l.bracket.is_none());
        let (l, _) = cantor_locate_exact(&q(1, 3));
        assert!(l.in_kinf && l.in_kminus && !l.in_kplus);
        let (l, _) = cantor_locate_exact(&q(2, 3));
        assert!(l.in_kinf && l.in_kplus && !l.in_kminus);
        let (l, _) = cantor_locate_exact(&q(1, 2));
        assert!(!l.in_kinf);
        assert_eq!(l.bracket, Some((1.0 / 3.0, 2.0 / 3.0)));
        let (l, _) = cantor_locate_exact(&q(1, 4));
        assert!(l.in_kinf && !l.in_kplus && !l.in_kminus);
        let (l, _) = cantor_locate_exact(&q(2, 1));
        assert!(l.in_kplus);
        let (l, _) = cantor_locate_exact(&q(1, 1));
        assert!(l.in_kminus);
    }

    #[test]
    fn code_phi_roundtrip() {
        for (n, d) in [(1, 4), (3, 4), (2, 3), (1, 3), (7, 1), (5, 27), (1, 10), (9, 13)] {
            let x = q(n, d);
            let c = triadic_code(&x);
            if c.in_k_tilde() {
                assert_eq!(c.phi(), x, "{n}/{d}");
            } else {
                let (lo, hi) = c.bracket().unwrap();
                assert!(lo < x && x < hi);
            }
        }
    }
}
