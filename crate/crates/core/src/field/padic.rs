//! Capped relative precision p-adic numbers.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{int_valuation, split_rational, Prime};
use crate::error::{Error, Result};

/// An element of Q_p known to finitely many digits.
///
/// Three states are kept apart: the exact zero, an approximate zero `O(p^k)`
/// (every known digit vanished) and a nonzero `p^v * u + O(p^(v+N))` with `u`
/// a unit modulo `p^N`. Arithmetic never invents digits: the result of an
/// operation records the precision that its inputs actually determine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Padic {
    p: Prime,
    repr: Repr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Repr {
    ExactZero,
    Zero { abs: i64 },
    Unit { val: i64, unit: BigInt, prec: u32 },
}

fn modulo(x: BigInt, m: &BigInt) -> BigInt {
    x.mod_floor(m)
}

impl Padic {
    pub fn exact_zero(p: Prime) -> Self {
        Padic { p, repr: Repr::ExactZero }
    }

    /// `O(p^abs)`.
    pub fn approx_zero(p: Prime, abs: i64) -> Self {
        Padic { p, repr: Repr::Zero { abs } }
    }

    /// `p^val * unit` with `prec` relative digits; `unit` must be prime to `p`.
    pub fn from_parts(p: Prime, val: i64, unit: BigInt, prec: u32) -> Self {
        assert!(prec > 0, "relative precision must be positive");
        let m = p.pow(prec);
        let unit = modulo(unit, &m);
        debug_assert!(!(&unit % p.big()).is_zero(), "unit divisible by p");
        Padic { p, repr: Repr::Unit { val, unit, prec } }
    }

    /// A rational number with `prec` relative digits.
    pub fn from_rational(q: &BigRational, p: Prime, prec: u32) -> Self {
        let Some((v, u)) = split_rational(q, p) else {
            return Padic::exact_zero(p);
        };
        let prec = prec.max(1);
        let m = p.pow(prec);
        let inv = u.denom().modinv(&m).expect("denominator is a unit");
        Padic::from_parts(p, v, u.numer() * inv, prec)
    }

    /// A rational number known modulo `p^abs`.
    pub fn from_rational_abs(q: &BigRational, p: Prime, abs: i64) -> Self {
        match split_rational(q, p) {
            None => Padic::exact_zero(p),
            Some((v, _)) if v >= abs => Padic::approx_zero(p, abs),
            Some((v, _)) => Padic::from_rational(q, p, (abs - v) as u32),
        }
    }

    pub fn from_int(n: i64, p: Prime, prec: u32) -> Self {
        Padic::from_rational(&BigRational::from_integer(n.into()), p, prec)
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self.repr, Repr::ExactZero)
    }

    pub fn is_approx_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero { .. })
    }

    /// Exact or approximate zero.
    pub fn is_zero(&self) -> bool {
        !matches!(self.repr, Repr::Unit { .. })
    }

    /// Valuation of a nonzero element.
    pub fn valuation(&self) -> Option<i64> {
        match self.repr {
            Repr::Unit { val, .. } => Some(val),
            _ => None,
        }
    }

    /// The exponent `k` such that the element is known modulo `p^k`; `None` when exact.
    pub fn abs_precision(&self) -> Option<i64> {
        match self.repr {
            Repr::ExactZero => None,
            Repr::Zero { abs } => Some(abs),
            Repr::Unit { val, prec, .. } => Some(val + prec as i64),
        }
    }

    /// Number of significant digits; zero for both kinds of zero.
    pub fn rel_precision(&self) -> u32 {
        match self.repr {
            Repr::Unit { prec, .. } => prec,
            _ => 0,
        }
    }

    pub fn unit(&self) -> Option<&BigInt> {
        match &self.repr {
            Repr::Unit { unit, .. } => Some(unit),
            _ => None,
        }
    }

    /// Base-p digits of the unit part, least significant first.
    pub fn unit_digits(&self) -> Vec<u64> {
        let Repr::Unit { unit, prec, .. } = &self.repr else {
            return Vec::new();
        };
        let pb = self.p.big();
        let mut m = unit.clone();
        let mut out = Vec::with_capacity(*prec as usize);
        for _ in 0..*prec {
            let (q, r) = m.div_rem(&pb);
            out.push(r.to_u64().unwrap());
            m = q;
        }
        out
    }

    /// Drops digits so that at most `prec` relative digits remain.
    pub fn truncate(&self, prec: u32) -> Padic {
        match &self.repr {
            Repr::Unit { val, unit, prec: old } if *old > prec => {
                if prec == 0 {
                    return Padic::approx_zero(self.p, *val);
                }
                Padic::from_parts(self.p, *val, unit.clone(), prec)
            }
            _ => self.clone(),
        }
    }

    /// Replaces an exact zero by `O(p^abs)`; other values are unchanged.
    pub fn with_abs_cap(&self, abs: i64) -> Padic {
        match &self.repr {
            Repr::ExactZero => Padic::approx_zero(self.p, abs),
            Repr::Zero { abs: a } => Padic::approx_zero(self.p, (*a).min(abs)),
            Repr::Unit { val, unit, prec } => {
                let keep = abs - val;
                if keep <= 0 {
                    Padic::approx_zero(self.p, abs)
                } else if keep < *prec as i64 {
                    Padic::from_parts(self.p, *val, unit.clone(), keep as u32)
                } else {
                    self.clone()
                }
            }
        }
    }

    /// Exact multiplication by `p^k`.
    pub fn shift(&self, k: i64) -> Padic {
        let repr = match &self.repr {
            Repr::ExactZero => Repr::ExactZero,
            Repr::Zero { abs } => Repr::Zero { abs: abs + k },
            Repr::Unit { val, unit, prec } => Repr::Unit { val: val + k, unit: unit.clone(), prec: *prec },
        };
        Padic { p: self.p, repr }
    }

    /// The rational representative `p^v * u` with `0 < u < p^N`.
    pub fn to_rational(&self) -> BigRational {
        match &self.repr {
            Repr::Unit { val, unit, .. } => {
                BigRational::from_integer(unit.clone()) * self.p.rational_pow(*val)
            }
            _ => BigRational::zero(),
        }
    }

    /// Smallest-height rational agreeing with this element on all known digits.
    ///
    /// Uses the half-extended Euclidean algorithm on the unit part; returns
    /// `None` when no fraction with numerator and denominator below
    /// `sqrt(p^N / 2)` exists.
    pub fn reconstruct_rational(&self) -> Option<BigRational> {
        let (val, unit, prec) = match &self.repr {
            Repr::ExactZero => return Some(BigRational::zero()),
            Repr::Zero { .. } => return None,
            Repr::Unit { val, unit, prec } => (*val, unit, *prec),
        };
        let m = self.p.pow(prec);
        let bound = (&m / BigInt::from(2)).sqrt();
        let (mut r0, mut r1) = (m.clone(), unit.clone());
        let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
        while r1 > bound {
            let q = &r0 / &r1;
            let r2 = &r0 - &q * &r1;
            let t2 = &t0 - &q * &t1;
            r0 = std::mem::replace(&mut r1, r2);
            t0 = std::mem::replace(&mut t1, t2);
        }
        if t1.is_zero() || t1.abs() > bound || !r1.gcd(&t1).is_one() {
            return None;
        }
        let frac = BigRational::new(r1, t1);
        Some(frac * self.p.rational_pow(val))
    }

    fn check_prime(&self, other: &Padic) {
        assert_eq!(self.p, other.p, "p-adic operands over different primes");
    }

    pub fn add_ref(&self, other: &Padic) -> Padic {
        self.check_prime(other);
        let p = self.p;
        match (&self.repr, &other.repr) {
            (Repr::ExactZero, _) => other.clone(),
            (_, Repr::ExactZero) => self.clone(),
            (Repr::Zero { abs: a }, Repr::Zero { abs: b }) => Padic::approx_zero(p, (*a).min(*b)),
            (Repr::Zero { abs }, Repr::Unit { .. }) => other.with_abs_cap(*abs),
            (Repr::Unit { .. }, Repr::Zero { abs }) => self.with_abs_cap(*abs),
            (
                Repr::Unit { val: vx, unit: ux, prec: nx },
                Repr::Unit { val: vy, unit: uy, prec: ny },
            ) => {
                let vmin = (*vx).min(*vy);
                let abs = (vx + *nx as i64).min(vy + *ny as i64);
                let rel = (abs - vmin) as u32;
                let m = p.pow(rel);
                // a term shifted past the common precision contributes nothing
                let aligned = |u: &BigInt, v: i64| {
                    if v - vmin >= rel as i64 {
                        BigInt::zero()
                    } else {
                        u * p.pow((v - vmin) as u32)
                    }
                };
                let sx = aligned(ux, *vx);
                let sy = aligned(uy, *vy);
                let s = modulo(sx + sy, &m);
                if s.is_zero() {
                    return Padic::approx_zero(p, abs);
                }
                let t = int_valuation(&s, p);
                let unit = s / p.pow(t as u32);
                Padic::from_parts(p, vmin + t, unit, rel - t as u32)
            }
        }
    }

    pub fn neg_ref(&self) -> Padic {
        match &self.repr {
            Repr::Unit { val, unit, prec } => {
                let m = self.p.pow(*prec);
                Padic::from_parts(self.p, *val, &m - unit, *prec)
            }
            _ => self.clone(),
        }
    }

    pub fn mul_ref(&self, other: &Padic) -> Padic {
        self.check_prime(other);
        let p = self.p;
        match (&self.repr, &other.repr) {
            (Repr::ExactZero, _) | (_, Repr::ExactZero) => Padic::exact_zero(p),
            (Repr::Zero { abs: a }, Repr::Zero { abs: b }) => Padic::approx_zero(p, a + b),
            (Repr::Zero { abs }, Repr::Unit { val, .. })
            | (Repr::Unit { val, .. }, Repr::Zero { abs }) => Padic::approx_zero(p, abs + val),
            (
                Repr::Unit { val: vx, unit: ux, prec: nx },
                Repr::Unit { val: vy, unit: uy, prec: ny },
            ) => {
                let prec = (*nx).min(*ny);
                Padic::from_parts(p, vx + vy, ux * uy, prec)
            }
        }
    }

    /// Division; an approximate-zero divisor exhausts precision.
    pub fn checked_div(&self, other: &Padic) -> Result<Padic> {
        self.check_prime(other);
        let p = self.p;
        let (vy, uy, ny) = match &other.repr {
            Repr::ExactZero => return Err(Error::DivisionByZero),
            Repr::Zero { abs } => {
                return Err(Error::precision(format!("division by O({p}^{abs})")))
            }
            Repr::Unit { val, unit, prec } => (*val, unit, *prec),
        };
        Ok(match &self.repr {
            Repr::ExactZero => Padic::exact_zero(p),
            Repr::Zero { abs } => Padic::approx_zero(p, abs - vy),
            Repr::Unit { val, unit, prec } => {
                let n = (*prec).min(ny);
                let m = p.pow(n);
                let inv = uy.modinv(&m).expect("unit is invertible");
                Padic::from_parts(p, val - vy, unit * inv, n)
            }
        })
    }

    /// Fails when this value is an approximate zero or carries fewer than `floor` digits.
    pub fn certify(self, floor: u32) -> Result<Padic> {
        match &self.repr {
            Repr::Zero { abs } => Err(Error::precision(format!(
                "all digits cancelled, result is O({}^{abs})",
                self.p
            ))),
            Repr::Unit { prec, .. } if *prec < floor => Err(Error::precision(format!(
                "only {prec} significant digits remain (floor {floor})"
            ))),
            _ => Ok(self),
        }
    }
}

/// The four field operations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// One checked operation on p-adic numbers.
///
/// Fails with `PrecisionExhausted` when the honest precision of the result
/// falls below `floor` digits, including the case where every digit cancels.
pub fn padic_arithmetic(x: &Padic, y: &Padic, op: ArithOp, floor: u32) -> Result<Padic> {
    if x.p != y.p {
        return Err(Error::PrimeMismatch(x.p.get(), y.p.get()));
    }
    let r = match op {
        ArithOp::Add => x + y,
        ArithOp::Sub => x - y,
        ArithOp::Mul => x * y,
        ArithOp::Div => x.checked_div(y)?,
    };
    r.certify(floor)
}

impl<'a> Add<&'a Padic> for &'a Padic {
    type Output = Padic;
    fn add(self, rhs: &'a Padic) -> Padic {
        self.add_ref(rhs)
    }
}

impl<'a> Sub<&'a Padic> for &'a Padic {
    type Output = Padic;
    fn sub(self, rhs: &'a Padic) -> Padic {
        self.add_ref(&rhs.neg_ref())
    }
}

impl<'a> Mul<&'a Padic> for &'a Padic {
    type Output = Padic;
    fn mul(self, rhs: &'a Padic) -> Padic {
        self.mul_ref(rhs)
    }
}

impl Neg for &Padic {
    type Output = Padic;
    fn neg(self) -> Padic {
        self.neg_ref()
    }
}

impl fmt::Display for Padic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::ExactZero => write!(f, "0"),
            Repr::Zero { abs } => write!(f, "O({}^{})", self.p, abs),
            Repr::Unit { val, unit, prec } => {
                write!(f, "{}*{}^{} + O({}^{})", unit, self.p, val, self.p, val + *prec as i64)
            }
        }
    }
}
