//! Univariate polynomials with exact or p-adic coefficients.

use std::fmt;

use num_rational::BigRational;

use super::Matrix;
use crate::error::{Error, Result};
use crate::field::{parse_rational, Prime, Scalar};

/// `c_0 + c_1 t + ... + c_d t^d`, coefficients in ascending order.
///
/// Trailing exact zeros are trimmed, so the stored leading coefficient is
/// never an exact zero. The zero polynomial has no coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    coeffs: Vec<Scalar>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Scalar>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_certainly_zero()) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Polynomial { coeffs: vec![Scalar::one()] }
    }

    /// The variable `t`.
    pub fn t() -> Self {
        Polynomial::monomial(Scalar::one(), 1)
    }

    /// `c t^k`.
    pub fn monomial(c: Scalar, k: usize) -> Self {
        let mut coeffs = vec![Scalar::zero(); k];
        coeffs.push(c);
        Polynomial::new(coeffs)
    }

    pub fn from_rationals(coeffs: &[BigRational]) -> Self {
        Polynomial::new(coeffs.iter().cloned().map(Scalar::Exact).collect())
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Polynomial::new(coeffs.iter().map(|&c| Scalar::from_int(c)).collect())
    }

    /// Parses ascending coefficients given as rational literals.
    pub fn parse(coeffs: &[&str]) -> Result<Self> {
        let cs = coeffs.iter().map(|s| parse_rational(s).map(Scalar::Exact)).collect::<Result<_>>()?;
        Ok(Polynomial::new(cs))
    }

    /// `prod (t - r_i)`.
    pub fn from_roots(roots: &[BigRational]) -> Self {
        roots.iter().fold(Polynomial::one(), |acc, r| {
            acc.mul(&Polynomial::new(vec![Scalar::Exact(-r.clone()), Scalar::one()]))
        })
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Scalar {
        self.coeffs.get(i).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn leading(&self) -> Option<&Scalar> {
        self.coeffs.last()
    }

    pub fn is_exact(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_exact)
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(|c| *c == Scalar::one())
    }

    /// Exact coefficients, if every coefficient is exact.
    pub fn rationals(&self) -> Option<Vec<BigRational>> {
        self.coeffs.iter().map(|c| c.as_rational().cloned()).collect()
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        Polynomial::new((0..n).map(|i| &self.coeff(i) + &other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn scale(&self, c: &Scalar) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![Scalar::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_certainly_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        Polynomial::new(out)
    }

    /// Multiplication by `t^k`.
    pub fn shift_up(&self, k: usize) -> Polynomial {
        if self.is_zero() {
            return Polynomial::zero();
        }
        let mut coeffs = vec![Scalar::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Polynomial { coeffs }
    }

    /// Drops the `k` lowest coefficients (division by `t^k` when they vanish).
    pub fn shift_down(&self, k: usize) -> Polynomial {
        Polynomial::new(self.coeffs.iter().skip(k).cloned().collect())
    }

    /// Number of exactly vanishing low-order coefficients.
    pub fn low_zeros(&self) -> usize {
        self.coeffs.iter().take_while(|c| c.is_certainly_zero()).count()
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        self.coeffs.iter().rev().fold(Scalar::zero(), |acc, c| &(&acc * x) + c)
    }

    /// `f(M)` by Horner's rule.
    pub fn eval_matrix(&self, m: &Matrix) -> Matrix {
        let n = m.nrows();
        let mut acc = Matrix::zeros(n, n);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(m).add(&Matrix::identity(n).scale(c));
        }
        acc
    }

    /// Divides by the leading coefficient.
    pub fn monic(&self) -> Result<Polynomial> {
        let lc = self.leading().ok_or(Error::DivisionByZero)?.clone();
        let coeffs = self.coeffs.iter().map(|c| c.checked_div(&lc)).collect::<Result<Vec<_>>>()?;
        let mut out = Polynomial::new(coeffs);
        if let Some(last) = out.coeffs.last_mut() {
            *last = Scalar::one();
        }
        Ok(out)
    }

    /// Euclidean division over Q; both polynomials must be exact.
    pub fn div_rem(&self, d: &Polynomial) -> Result<(Polynomial, Polynomial)> {
        let (Some(num), Some(den)) = (self.rationals(), d.rationals()) else {
            return Err(Error::precondition("exact division needs exact coefficients"));
        };
        let Some(dd) = d.degree() else {
            return Err(Error::DivisionByZero);
        };
        let lc = den[dd].clone();
        let mut r = num;
        if r.len() <= dd {
            return Ok((Polynomial::zero(), self.clone()));
        }
        let mut q = vec![BigRational::from_integer(0.into()); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] / &lc;
            for (i, di) in den.iter().enumerate() {
                r[k + i] -= &c * di;
            }
            q[k] = c;
        }
        r.truncate(dd);
        Ok((Polynomial::from_rationals(&q), Polynomial::from_rationals(&r)))
    }

    /// Coefficients as p-adic approximations with `prec` relative digits.
    pub fn to_approx(&self, p: Prime, prec: u32) -> Polynomial {
        Polynomial { coeffs: self.coeffs.iter().map(|c| c.to_approx(p, prec)).collect() }
    }

    pub fn derivative(&self) -> Polynomial {
        Polynomial::new(
            self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * &Scalar::from_int(i as i64)).collect(),
        )
    }

    /// Coefficients rendered as strings, ascending.
    pub fn to_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(|c| c.to_string()).collect()
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_certainly_zero())
            .map(|(i, c)| match i {
                0 => format!("({c})"),
                1 => format!("({c})*t"),
                _ => format!("({c})*t^{i}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}
