//! Scalar fields used by every polynomial and algebra routine.
//!
//! Two implementations exist: [`Rational`] (arbitrary precision, never rounds)
//! and `f64`. Everything above this module is generic over [`Scalar`].

use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational number, always normalized with a positive denominator.
pub type Rational = num_rational::BigRational;

pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// True when arithmetic never rounds.
    const EXACT: bool;

    fn from_i64(v: i64) -> Self;
    fn from_rational(r: &Rational) -> Self;
    fn to_f64(&self) -> f64;
    fn is_negative(&self) -> bool;

    /// Parses a coefficient literal: an integer, a ratio `p/q`, or a decimal.
    fn parse_literal(text: &str) -> Option<Self>;

    fn abs(&self) -> Self {
        if self.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// Zero test at tolerance `tol`. Exact scalars ignore `tol`.
    fn is_negligible(&self, tol: f64) -> bool {
        if Self::EXACT {
            self.is_zero()
        } else {
            self.to_f64().abs() <= tol
        }
    }

    /// JSON rendering: exact values as `"p/q"` strings, floats as numbers.
    fn to_json(&self) -> serde_json::Value;
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }

    fn parse_literal(text: &str) -> Option<Self> {
        parse_rational(text)
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(self.to_string())
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_rational(r: &Rational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn is_negative(&self) -> bool {
        *self < 0.0
    }

    fn parse_literal(text: &str) -> Option<Self> {
        if let Some((num, den)) = text.split_once('/') {
            let num: f64 = num.trim().parse().ok()?;
            let den: f64 = den.trim().parse().ok()?;
            if den == 0.0 {
                return None;
            }
            return Some(num / den);
        }
        text.trim().parse().ok().filter(|v: &f64| v.is_finite())
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Number::from_f64(*self)
            .map(serde_json::Value::Number)
            .unwrap_or(serde_json::Value::Null)
    }
}

/// Parses `"p"`, `"p/q"`, or a plain decimal such as `"-1.25"` exactly.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    if let Some((num, den)) = text.split_once('/') {
        let num = parse_decimal(num.trim())?;
        let den = parse_decimal(den.trim())?;
        if den.is_zero() {
            return None;
        }
        return Some(num / den);
    }
    parse_decimal(text)
}

fn parse_decimal(text: &str) -> Option<Rational> {
    let (negative, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text.strip_prefix('+').unwrap_or(text)),
    };
    if body.is_empty() {
        return None;
    }
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: BigInt = digits.parse().ok()?;
    let denom = num_traits::pow(BigInt::from(10), frac_part.len());
    let value = Rational::new(numer, denom);
    Some(if negative { -value } else { value })
}

/// Best rational approximation with denominator at most `max_den`
/// (continued-fraction convergents).
pub fn rationalize(value: f64, max_den: i64) -> Option<Rational> {
    if !value.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut x = value;
    for _ in 0..64 {
        let a = x.floor();
        if a.abs() > 1e15 {
            break;
        }
        let ai = a as i128;
        let h2 = ai * h1 + h0;
        let k2 = ai * k1 + k0;
        if k2 > max_den as i128 {
            break;
        }
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        let frac = x - a;
        if frac.abs() < 1e-15 {
            break;
        }
        x = 1.0 / frac;
    }
    if k1 == 0 {
        return None;
    }
    Some(Rational::new(BigInt::from(h1), BigInt::from(k1)))
}

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter()
        .zip(b)
        .fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

pub fn scale<S: Scalar>(t: &S, v: &[S]) -> Vec<S> {
    v.iter().map(|x| t.clone() * x.clone()).collect()
}

pub fn axpy<S: Scalar>(t: &S, x: &[S], y: &[S]) -> Vec<S> {
    x.iter()
        .zip(y)
        .map(|(a, b)| t.clone() * a.clone() + b.clone())
        .collect()
}

pub fn sub_vec<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter().zip(b).map(|(x, y)| x.clone() - y.clone()).collect()
}

pub fn add_vec<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter().zip(b).map(|(x, y)| x.clone() + y.clone()).collect()
}

pub fn to_f64_vec<S: Scalar>(v: &[S]) -> Vec<f64> {
    v.iter().map(Scalar::to_f64).collect()
}

pub fn norm_f64(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Euclidean norm of a scalar vector, evaluated in `f64`.
pub fn magnitude<S: Scalar>(v: &[S]) -> f64 {
    v.iter()
        .map(|x| {
            let f = x.to_f64();
            f * f
        })
        .sum::<f64>()
        .sqrt()
}

pub fn unit_vector<S: Scalar>(n: usize, i: usize) -> Vec<S> {
    (0..n)
        .map(|k| if k == i { S::one() } else { S::zero() })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_ratio_and_decimal_exactly() {
        assert_eq!(parse_rational("2/3"), Some(rat(2, 3)));
        assert_eq!(parse_rational("-1.25"), Some(rat(-5, 4)));
        assert_eq!(parse_rational("0.5/2"), Some(rat(1, 4)));
        assert_eq!(parse_rational("7"), Some(rat(7, 1)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("."), None);
        assert_eq!(parse_rational("x"), None);
    }

    #[test]
    fn rational_is_normalized() {
        let r = rat(4, -6);
        assert_eq!(r, rat(-2, 3));
        assert!(r.denom() > &BigInt::from(0));
    }

    #[test]
    fn rationalize_recovers_small_fractions() {
        assert_eq!(rationalize(1.0 / 6.0, 1000), Some(rat(1, 6)));
        assert_eq!(rationalize(-1.0 / 12.0, 1000), Some(rat(-1, 12)));
        assert_eq!(rationalize(0.0, 1000), Some(rat(0, 1)));
    }

    #[test]
    fn float_literal_parsing() {
        assert_eq!(<f64 as Scalar>::parse_literal("1/4"), Some(0.25));
        assert_eq!(<f64 as Scalar>::parse_literal("inf"), None);
    }
}
