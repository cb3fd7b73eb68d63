//! Exact arithmetic in Q, capped-precision arithmetic in Q_p and in totally
//! ramified extensions Q_p(pi) with pi^e = p, and exact comparisons in the
//! value group.
//!
//! Absolute values never appear as floating point numbers. An absolute value
//! `p^(-v)` is carried by its valuation `v`, a rational number or `+inf`, and
//! every comparison against a rational threshold is reduced to integer
//! arithmetic.

mod ext;
mod padic;
mod scalar;

pub use ext::{ext_arithmetic, ExtElement};
pub use padic::{padic_arithmetic, ArithOp, Padic};
pub use scalar::Scalar;

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rational valuations. Denominators divide the ramification index of the
/// field carrying the element, so machine integers are plenty.
pub type Val = Ratio<i64>;

/// Default number of p-adic digits carried by approximate quantities.
pub const DEFAULT_PRECISION: u32 = 64;
/// Default floor below which a relative precision counts as exhausted.
pub const DEFAULT_MIN_PRECISION: u32 = 8;
/// Default bound on radius searches.
pub const DEFAULT_MAX_RADIUS_EXPONENT: i64 = 64;

/// A rational prime, checked at construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Self> {
        if p < 2 {
            return Err(Error::NotPrime(p));
        }
        let mut d = 2u64;
        while d * d <= p {
            if p.is_multiple_of(d) {
                return Err(Error::NotPrime(p));
            }
            d += 1;
        }
        Ok(Prime(p))
    }

    pub fn get(self) -> u64 {
        self.0
    }

    pub fn big(self) -> BigInt {
        BigInt::from(self.0)
    }

    /// `p^n` as a big integer.
    pub fn pow(self, n: u32) -> BigInt {
        num_traits::pow(self.big(), n as usize)
    }

    /// `p^k` as an exact rational, `k` of either sign.
    pub fn rational_pow(self, k: i64) -> BigRational {
        let base = BigRational::from_integer(self.pow(k.unsigned_abs() as u32));
        if k >= 0 {
            base
        } else {
            base.recip()
        }
    }
}

impl TryFrom<u64> for Prime {
    type Error = Error;
    fn try_from(p: u64) -> Result<Self> {
        Prime::new(p)
    }
}

impl From<Prime> for u64 {
    fn from(p: Prime) -> u64 {
        p.0
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Working precision of the capped p-adic layer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Settings {
    /// Relative precision (p-adic digits) of approximate quantities.
    pub precision: u32,
    /// Results whose honest precision drops below this raise `PrecisionExhausted`.
    pub min_precision: u32,
    /// Largest `k` tried when searching for a radius `p^-k`.
    pub max_radius_exponent: i64,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            precision: DEFAULT_PRECISION,
            min_precision: DEFAULT_MIN_PRECISION,
            max_radius_exponent: DEFAULT_MAX_RADIUS_EXPONENT,
        }
    }
}

impl Settings {
    pub fn with_precision(precision: u32) -> Self {
        Settings { precision, min_precision: DEFAULT_MIN_PRECISION.min(precision), ..Settings::default() }
    }
}

/// The prime together with the precision settings; threaded through every
/// computation that may leave exact arithmetic.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Context {
    pub p: Prime,
    pub settings: Settings,
}

impl Context {
    pub fn new(p: Prime) -> Self {
        Context { p, settings: Settings::default() }
    }

    pub fn with_precision(p: Prime, precision: u32) -> Self {
        Context { p, settings: Settings::with_precision(precision) }
    }

    pub fn precision(&self) -> u32 {
        self.settings.precision
    }

    pub fn floor(&self) -> u32 {
        self.settings.min_precision
    }
}

/// A valuation: a rational number, or `+inf` for zero.
///
/// The derived order puts every finite valuation below `Infinite`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Valuation {
    Finite(Val),
    Infinite,
}

impl Valuation {
    pub fn int(v: i64) -> Self {
        Valuation::Finite(Val::from_integer(v))
    }

    pub fn frac(n: i64, d: i64) -> Self {
        Valuation::Finite(Val::new(n, d))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Valuation::Infinite)
    }

    pub fn finite(&self) -> Option<Val> {
        match self {
            Valuation::Finite(v) => Some(*v),
            Valuation::Infinite => None,
        }
    }

    /// `+inf` absorbs.
    pub fn add(self, other: Valuation) -> Valuation {
        match (self, other) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinite,
        }
    }

    pub fn add_val(self, other: Val) -> Valuation {
        self.add(Valuation::Finite(other))
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{}", v),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

impl FromStr for Valuation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t == "inf" || t == "+inf" {
            return Ok(Valuation::Infinite);
        }
        t.parse::<Val>()
            .map(Valuation::Finite)
            .map_err(|_| Error::Parse(format!("invalid valuation {s:?}")))
    }
}

impl Serialize for Valuation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Valuation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Serde adapter writing a [`Val`] as the string `"r/s"`.
pub mod val_str {
    use super::Val;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Val, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Val, D::Error> {
        let s = String::deserialize(d)?;
        s.trim().parse::<Val>().map_err(serde::de::Error::custom)
    }
}

/// An element `p^(-v)` of the value group extended by zero, ordered by size.
///
/// Norms, operator norms and Lipschitz bounds are all reported as magnitudes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Magnitude(Valuation);

impl Magnitude {
    pub const ZERO: Magnitude = Magnitude(Valuation::Infinite);

    pub fn one() -> Self {
        Magnitude(Valuation::int(0))
    }

    /// The magnitude `p^(-v)`.
    pub fn from_valuation(v: Valuation) -> Self {
        Magnitude(v)
    }

    pub fn p_pow_neg(v: Val) -> Self {
        Magnitude(Valuation::Finite(v))
    }

    pub fn valuation(&self) -> Valuation {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_infinite()
    }

    pub fn times(self, other: Magnitude) -> Magnitude {
        Magnitude(self.0.add(other.0))
    }

    /// `self / other`; `other` must be nonzero.
    pub fn over(self, other: Magnitude) -> Magnitude {
        match other.0 {
            Valuation::Finite(w) => Magnitude(self.0.add_val(-w)),
            Valuation::Infinite => panic!("division by the zero magnitude"),
        }
    }

    pub fn inverse(self) -> Magnitude {
        Magnitude::one().over(self)
    }

    pub fn powi(self, n: i64) -> Magnitude {
        match self.0 {
            Valuation::Finite(v) => Magnitude(Valuation::Finite(v * n)),
            Valuation::Infinite if n > 0 => Magnitude::ZERO,
            Valuation::Infinite if n == 0 => Magnitude::one(),
            Valuation::Infinite => panic!("negative power of the zero magnitude"),
        }
    }

    /// Ordering of this magnitude against a positive rational threshold.
    pub fn cmp_threshold(&self, a: &Threshold, p: Prime) -> Ordering {
        compare_threshold(a, self.0, p).reverse()
    }

    /// Exact rational value when the exponent is an integer.
    pub fn to_rational(&self, p: Prime) -> Option<BigRational> {
        match self.0 {
            Valuation::Infinite => Some(BigRational::zero()),
            Valuation::Finite(v) if v.is_integer() => Some(p.rational_pow(-v.to_integer())),
            _ => None,
        }
    }

    /// Human readable form, `p^(r/s)` when the value is irrational.
    pub fn display(&self, p: Prime) -> String {
        match self.to_rational(p) {
            Some(q) => q.to_string(),
            None => format!("{}^({})", p, -self.0.finite().unwrap()),
        }
    }
}

impl PartialOrd for Magnitude {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Magnitude {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.cmp(&self.0)
    }
}

/// A positive rational threshold `a`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Threshold(BigRational);

impl Threshold {
    pub fn new(a: BigRational) -> Result<Self> {
        if !a.is_positive() {
            return Err(Error::precondition(format!("threshold must be positive, got {a}")));
        }
        Ok(Threshold(a))
    }

    pub fn from_ratio(n: i64, d: i64) -> Result<Self> {
        if d == 0 {
            return Err(Error::DivisionByZero);
        }
        Threshold::new(BigRational::new(n.into(), d.into()))
    }

    pub fn one() -> Self {
        Threshold(BigRational::one())
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    pub fn recip(&self) -> Threshold {
        Threshold(self.0.recip())
    }

    /// `p^k` as a threshold.
    pub fn p_power(p: Prime, k: i64) -> Threshold {
        Threshold(p.rational_pow(k))
    }

    /// The valuation `v` with `a = p^(-v)`, when `a` is an integral power of `p`.
    pub fn as_value_group(&self, p: Prime) -> Option<i64> {
        let (v, unit) = split_rational(&self.0, p)?;
        if unit.is_one() {
            Some(-v)
        } else {
            None
        }
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for Threshold {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Threshold::new(parse_rational(s)?)
    }
}

/// Parses `"num/den"` or `"int"`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let t = s.trim();
    let bad = || Error::Parse(format!("invalid rational literal {s:?}"));
    match t.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::DivisionByZero);
            }
            Ok(BigRational::new(n, d))
        }
        None => t.parse::<BigInt>().map(BigRational::from_integer).map_err(|_| bad()),
    }
}

/// Formats a rational as `"num/den"` or `"int"`.
pub fn format_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// p-adic valuation of a nonzero integer.
pub(crate) fn int_valuation(n: &BigInt, p: Prime) -> i64 {
    debug_assert!(!n.is_zero());
    let pb = p.big();
    let mut m = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(&pb);
        if !r.is_zero() {
            return v;
        }
        m = q;
        v += 1;
    }
}

/// Writes a nonzero rational as `p^v * u` with `u` a p-adic unit.
pub(crate) fn split_rational(q: &BigRational, p: Prime) -> Option<(i64, BigRational)> {
    if q.is_zero() {
        return None;
    }
    let vn = int_valuation(q.numer(), p);
    let vd = int_valuation(q.denom(), p);
    let v = vn - vd;
    let u = q / p.rational_pow(v);
    Some((v, u))
}

/// Exact p-adic valuation of a rational number; `+inf` for zero.
pub fn valuation_of_rational(q: &BigRational, p: Prime) -> Valuation {
    match split_rational(q, p) {
        Some((v, _)) => Valuation::int(v),
        None => Valuation::Infinite,
    }
}

/// Orders the threshold `a` against the absolute value `p^(-v)`.
///
/// With `a = u/w` and `v = r/s` (`s > 0`) this compares `u^s * p^r` with
/// `w^s` when `r >= 0`, and `u^s` with `w^s * p^(-r)` otherwise. The zero
/// absolute value (`v = +inf`) lies below every threshold.
pub fn compare_threshold(a: &Threshold, v: Valuation, p: Prime) -> Ordering {
    let v = match v {
        Valuation::Infinite => return Ordering::Greater,
        Valuation::Finite(v) => v,
    };
    let r = *v.numer();
    let s = *v.denom();
    debug_assert!(s > 0);
    let s = s as usize;
    let u = num_traits::pow(a.0.numer().clone(), s);
    let w = num_traits::pow(a.0.denom().clone(), s);
    let pr = p.pow(r.unsigned_abs() as u32);
    if r >= 0 {
        (u * pr).cmp(&w)
    } else {
        u.cmp(&(w * pr))
    }
}

/// Approximate real value of a magnitude; for diagnostics and test oracles only.
pub fn magnitude_to_f64(m: &Magnitude, p: Prime) -> f64 {
    match m.valuation() {
        Valuation::Infinite => 0.0,
        Valuation::Finite(v) => {
            let e = v.numer().to_f64().unwrap() / v.denom().to_f64().unwrap();
            (p.get() as f64).powf(-e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn primes_are_checked() {
        assert!(Prime::new(2).is_ok());
        assert!(Prime::new(97).is_ok());
        assert_eq!(Prime::new(1), Err(Error::NotPrime(1)));
        assert_eq!(Prime::new(91), Err(Error::NotPrime(91)));
    }

    #[test]
    fn rational_valuations() {
        let p2 = Prime::new(2).unwrap();
        let p5 = Prime::new(5).unwrap();
        assert_eq!(valuation_of_rational(&q("8"), p2), Valuation::int(3));
        assert_eq!(valuation_of_rational(&q("3/4"), p2), Valuation::int(-2));
        assert_eq!(valuation_of_rational(&q("0"), p5), Valuation::Infinite);
        assert_eq!(valuation_of_rational(&q("-50/3"), p5), Valuation::int(2));
    }

    #[test]
    fn threshold_comparisons() {
        let p2 = Prime::new(2).unwrap();
        let p3 = Prime::new(3).unwrap();
        let t = |s: &str| s.parse::<Threshold>().unwrap();
        assert_eq!(compare_threshold(&t("3/4"), Valuation::int(1), p2), Ordering::Greater);
        assert_eq!(compare_threshold(&t("1"), Valuation::int(0), p3), Ordering::Equal);
        assert_eq!(compare_threshold(&t("1/3"), Valuation::frac(1, 2), p2), Ordering::Less);
        assert_eq!(compare_threshold(&t("1/1000"), Valuation::Infinite, p2), Ordering::Greater);
        assert_eq!(compare_threshold(&t("4"), Valuation::int(-2), p2), Ordering::Equal);
    }

    #[test]
    fn thresholds_must_be_positive() {
        assert!("0".parse::<Threshold>().is_err());
        assert!("-1/2".parse::<Threshold>().is_err());
        let p = Prime::new(3).unwrap();
        assert_eq!("1/9".parse::<Threshold>().unwrap().as_value_group(p), Some(2));
        assert_eq!("2/9".parse::<Threshold>().unwrap().as_value_group(p), None);
    }

    #[test]
    fn magnitudes_order_by_size() {
        let half = Magnitude::p_pow_neg(Val::from_integer(1));
        let two = Magnitude::p_pow_neg(Val::from_integer(-1));
        assert!(half < two);
        assert!(Magnitude::ZERO < half);
        assert_eq!(half.times(two), Magnitude::one());
        let p = Prime::new(2).unwrap();
        assert_eq!(half.to_rational(p), Some(q("1/2")));
        assert_eq!(Magnitude::p_pow_neg(Val::new(1, 2)).display(p), "2^(-1/2)");
    }

    #[test]
    fn rational_literals() {
        assert_eq!(q(" 6/4 "), BigRational::new(3.into(), 2.into()));
        assert_eq!(format_rational(&q("-3")), "-3");
        assert_eq!(format_rational(&q("2/-6")), "-1/3");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!("inf".parse::<Valuation>().unwrap(), Valuation::Infinite);
        assert_eq!("-1/2".parse::<Valuation>().unwrap(), Valuation::frac(-1, 2));
    }
}
