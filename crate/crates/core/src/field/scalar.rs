//! The two-tier scalar used by the linear algebra: exact rationals, or
//! capped-precision p-adic approximations once Hensel lifting has entered.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{split_rational, Padic, Prime};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Scalar {
    Exact(BigRational),
    Approx(Padic),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar::Exact(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::Exact(BigRational::from_integer(n.into()))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Scalar::Exact(BigRational::new(n.into(), d.into()))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Exact(q) => Some(q),
            Scalar::Approx(_) => None,
        }
    }

    /// Known to be exactly zero.
    pub fn is_certainly_zero(&self) -> bool {
        match self {
            Scalar::Exact(q) => q.is_zero(),
            Scalar::Approx(x) => x.is_exact_zero(),
        }
    }

    /// Known to be nonzero.
    pub fn is_certainly_nonzero(&self) -> bool {
        match self {
            Scalar::Exact(q) => !q.is_zero(),
            Scalar::Approx(x) => !x.is_zero(),
        }
    }

    pub fn is_approx_zero(&self) -> bool {
        matches!(self, Scalar::Approx(x) if x.is_approx_zero())
    }

    /// Valuation of a value known to be nonzero.
    pub fn valuation(&self, p: Prime) -> Option<i64> {
        match self {
            Scalar::Exact(q) => split_rational(q, p).map(|(v, _)| v),
            Scalar::Approx(x) => x.valuation(),
        }
    }

    /// Lower bound for the valuation: the valuation itself when nonzero, the
    /// absolute precision of an approximate zero, `None` for an exact zero.
    pub fn valuation_bound(&self, p: Prime) -> Option<i64> {
        match self {
            Scalar::Exact(q) => split_rational(q, p).map(|(v, _)| v),
            Scalar::Approx(x) => x.valuation().or_else(|| x.abs_precision()),
        }
    }

    /// Significant digits; `u32::MAX` for exact values.
    pub fn rel_precision(&self) -> u32 {
        match self {
            Scalar::Exact(_) => u32::MAX,
            Scalar::Approx(x) => x.rel_precision(),
        }
    }

    /// Converts to an approximation with `prec` relative digits.
    pub fn to_approx(&self, p: Prime, prec: u32) -> Scalar {
        match self {
            Scalar::Exact(q) => Scalar::Approx(Padic::from_rational(q, p, prec)),
            Scalar::Approx(x) => Scalar::Approx(x.truncate(prec)),
        }
    }

    /// Exact value when exact, otherwise the rational representative.
    pub fn to_rational_lossy(&self) -> BigRational {
        match self {
            Scalar::Exact(q) => q.clone(),
            Scalar::Approx(x) => x.to_rational(),
        }
    }

    pub fn checked_div(&self, other: &Scalar) -> Result<Scalar> {
        match (self, other) {
            (_, Scalar::Exact(d)) if d.is_zero() => Err(Error::DivisionByZero),
            (Scalar::Exact(n), Scalar::Exact(d)) => Ok(Scalar::Exact(n / d)),
            (Scalar::Exact(n), Scalar::Approx(d)) => {
                if d.is_zero() {
                    return Err(Error::precision("division by an approximate zero"));
                }
                if n.is_zero() {
                    return Ok(Scalar::zero());
                }
                let prec = d.rel_precision().max(1);
                Padic::from_rational(n, d.prime(), prec).checked_div(d).map(Scalar::Approx)
            }
            (Scalar::Approx(n), Scalar::Exact(d)) => {
                let prec = n.rel_precision().max(1);
                n.checked_div(&Padic::from_rational(d, n.prime(), prec)).map(Scalar::Approx)
            }
            (Scalar::Approx(n), Scalar::Approx(d)) => n.checked_div(d).map(Scalar::Approx),
        }
    }

    /// Inverse of a unit part: `u^-1` where `self = p^v u`, so that
    /// `self * result = p^v`.
    pub fn unit_inverse(&self, p: Prime) -> Result<Scalar> {
        let v = self
            .valuation(p)
            .ok_or_else(|| Error::precision("unit part of a zero"))?;
        Scalar::Exact(p.rational_pow(v)).checked_div(self)
    }

    /// Residue of a p-integral value modulo p.
    pub fn residue(&self, p: Prime) -> Result<u64> {
        use num_traits::ToPrimitive;
        let pb = p.big();
        match self {
            Scalar::Exact(q) => {
                if q.is_zero() {
                    return Ok(0);
                }
                let inv = q
                    .denom()
                    .modinv(&pb)
                    .ok_or_else(|| Error::precondition("residue of a non-integral value"))?;
                let r = (q.numer() * inv) % &pb;
                let r = if r < num_bigint::BigInt::zero() { r + &pb } else { r };
                Ok(r.to_u64().unwrap())
            }
            Scalar::Approx(x) => match x.valuation() {
                Some(v) if v > 0 => Ok(0),
                Some(0) => Ok(x.unit_digits()[0]),
                Some(_) => Err(Error::precondition("residue of a non-integral value")),
                None => match x.abs_precision() {
                    Some(a) if a <= 0 => Err(Error::precision("residue of O(p^0)")),
                    _ => Ok(0),
                },
            },
        }
    }
}

fn lift(exact: &BigRational, approx: &Padic, for_add: bool) -> Padic {
    let p = approx.prime();
    if for_add {
        match approx.abs_precision() {
            Some(abs) => Padic::from_rational_abs(exact, p, abs),
            None => Padic::from_rational(exact, p, 1),
        }
    } else {
        Padic::from_rational(exact, p, approx.rel_precision().max(1))
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &'a Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a + b),
            (Scalar::Exact(a), Scalar::Approx(b)) | (Scalar::Approx(b), Scalar::Exact(a)) => {
                if a.is_zero() || b.is_exact_zero() {
                    return if a.is_zero() { Scalar::Approx(b.clone()) } else { Scalar::Exact(a.clone()) };
                }
                Scalar::Approx(&lift(a, b, true) + b)
            }
            (Scalar::Approx(a), Scalar::Approx(b)) => Scalar::Approx(a + b),
        }
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &'a Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &'a Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a * b),
            (Scalar::Exact(a), Scalar::Approx(b)) | (Scalar::Approx(b), Scalar::Exact(a)) => {
                if a.is_zero() {
                    return Scalar::zero();
                }
                if a.is_one() {
                    return Scalar::Approx(b.clone());
                }
                if b.is_zero() {
                    // O(p^k) * a = O(p^(k + v(a)))
                    let v = split_rational(a, b.prime()).unwrap().0;
                    return match b.abs_precision() {
                        Some(k) => Scalar::Approx(Padic::approx_zero(b.prime(), k + v)),
                        None => Scalar::zero(),
                    };
                }
                Scalar::Approx(&lift(a, b, false) * b)
            }
            (Scalar::Approx(a), Scalar::Approx(b)) => Scalar::Approx(a * b),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(a) => Scalar::Exact(-a),
            Scalar::Approx(x) => Scalar::Approx(-x),
        }
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        &self + &rhs
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        &self - &rhs
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl From<BigRational> for Scalar {
    fn from(q: BigRational) -> Self {
        Scalar::Exact(q)
    }
}

impl From<Padic> for Scalar {
    fn from(x: Padic) -> Self {
        Scalar::Approx(x)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(q) => write!(f, "{}", super::format_rational(q)),
            Scalar::Approx(x) => write!(f, "{}", x),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_stays_exact() {
        let a = Scalar::ratio(1, 3);
        let b = Scalar::ratio(2, 3);
        assert_eq!(&a + &b, Scalar::one());
        assert_eq!((&a * &b).as_rational().unwrap(), &BigRational::new(2.into(), 9.into()));
        assert!(a.checked_div(&Scalar::zero()).is_err());
    }

    #[test]
    fn mixing_respects_precision() {
        let p = Prime::new(2).unwrap();
        let x = Scalar::Approx(Padic::from_int(3, p, 10));
        let s = &x + &Scalar::from_int(5);
        assert_eq!(s.valuation(p), Some(3));
        // 3 + 5 = 8, the sum is known modulo 2^10.
        assert!(matches!(&s, Scalar::Approx(y) if y.abs_precision() == Some(10)));
        let m = &x * &Scalar::from_int(4);
        assert_eq!(m.valuation(p), Some(2));
        assert_eq!(m.rel_precision(), 10);
        let z = &x - &Scalar::from_int(3);
        assert!(z.is_approx_zero());
        assert!((&z * &Scalar::zero()).is_certainly_zero());
    }

    #[test]
    fn residues() {
        let p = Prime::new(5).unwrap();
        assert_eq!(Scalar::ratio(1, 2).residue(p).unwrap(), 3);
        assert_eq!(Scalar::ratio(-1, 1).residue(p).unwrap(), 4);
        assert!(Scalar::ratio(1, 5).residue(p).is_err());
        assert_eq!(Scalar::ratio(7, 3).to_approx(p, 6).residue(p).unwrap(), 4);
    }
}
