//! Totally ramified extensions Q_p(pi) with pi^e = p.

use std::fmt;

use super::{Padic, Prime, Val, Valuation};
use crate::error::{Error, Result};

/// `sum_i c_i pi^i` with `0 <= i < e` and `pi^e = p`.
///
/// The value group of the extension is `(1/e)Z`, so the valuation of a
/// nonzero element is the minimum of `v(c_i) + i/e`; the fractional parts
/// are pairwise distinct and never cancel.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtElement {
    p: Prime,
    coeffs: Vec<Padic>,
}

impl ExtElement {
    pub fn new(p: Prime, coeffs: Vec<Padic>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::precondition("ramification index must be at least 1"));
        }
        if coeffs.iter().any(|c| c.prime() != p) {
            return Err(Error::precondition("coefficients over a different prime"));
        }
        Ok(ExtElement { p, coeffs })
    }

    /// Embeds a base-field element.
    pub fn from_base(x: Padic, e: usize) -> Self {
        let p = x.prime();
        let mut coeffs = vec![Padic::exact_zero(p); e];
        coeffs[0] = x;
        ExtElement { p, coeffs }
    }

    /// The uniformizer `pi`, with `prec` digits on its unit coefficient.
    pub fn uniformizer(p: Prime, e: usize, prec: u32) -> Self {
        let mut coeffs = vec![Padic::exact_zero(p); e];
        if e == 1 {
            coeffs[0] = Padic::from_int(1, p, prec).shift(1);
        } else {
            coeffs[1] = Padic::from_int(1, p, prec);
        }
        ExtElement { p, coeffs }
    }

    pub fn ramification(&self) -> usize {
        self.coeffs.len()
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn coeffs(&self) -> &[Padic] {
        &self.coeffs
    }

    fn check(&self, other: &ExtElement) -> Result<()> {
        if self.p != other.p {
            return Err(Error::PrimeMismatch(self.p.get(), other.p.get()));
        }
        if self.ramification() != other.ramification() {
            return Err(Error::DimensionMismatch(format!(
                "ramification {} vs {}",
                self.ramification(),
                other.ramification()
            )));
        }
        Ok(())
    }

    /// Valuation in `(1/e)Z`; fails if an approximate-zero coefficient could
    /// still decide it.
    pub fn valuation(&self) -> Result<Valuation> {
        let e = self.ramification() as i64;
        let mut best: Option<Val> = None;
        let mut fog: Option<Val> = None;
        for (i, c) in self.coeffs.iter().enumerate() {
            let shift = Val::new(i as i64, e);
            if let Some(v) = c.valuation() {
                let w = Val::from_integer(v) + shift;
                best = Some(best.map_or(w, |b| b.min(w)));
            } else if let Some(abs) = c.abs_precision() {
                let w = Val::from_integer(abs) + shift;
                fog = Some(fog.map_or(w, |f| f.min(w)));
            }
        }
        match (best, fog) {
            (Some(b), Some(f)) if f <= b => Err(Error::precision("valuation hidden below precision")),
            (Some(b), _) => Ok(Valuation::Finite(b)),
            (None, None) => Ok(Valuation::Infinite),
            (None, Some(_)) => Err(Error::precision("every coefficient is an approximate zero")),
        }
    }

    pub fn add(&self, other: &ExtElement) -> Result<ExtElement> {
        self.check(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(ExtElement { p: self.p, coeffs })
    }

    pub fn sub(&self, other: &ExtElement) -> Result<ExtElement> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> ExtElement {
        ExtElement { p: self.p, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn mul(&self, other: &ExtElement) -> Result<ExtElement> {
        self.check(other)?;
        let e = self.ramification();
        let p = self.p;
        let mut out = vec![Padic::exact_zero(p); e];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                let mut t = a * b;
                let mut k = i + j;
                if k >= e {
                    // pi^(e + r) = p * pi^r
                    t = t.shift(1);
                    k -= e;
                }
                out[k] = &out[k] + &t;
            }
        }
        Ok(ExtElement { p, coeffs: out })
    }

    /// Multiplication-by-self as an `e x e` matrix over Q_p (column `j` is `self * pi^j`).
    fn multiplication_matrix(&self) -> Vec<Vec<Padic>> {
        let e = self.ramification();
        let mut a = vec![vec![Padic::exact_zero(self.p); e]; e];
        for j in 0..e {
            for (i, c) in self.coeffs.iter().enumerate() {
                let k = i + j;
                a[k % e][j] = if k >= e { c.shift(1) } else { c.clone() };
            }
        }
        a
    }

    pub fn checked_div(&self, other: &ExtElement) -> Result<ExtElement> {
        self.check(other)?;
        if other.valuation()?.is_infinite() {
            return Err(Error::DivisionByZero);
        }
        // Solve other * z = self by elimination with valuation pivoting.
        let e = self.ramification();
        let mut a = other.multiplication_matrix();
        let mut b: Vec<Padic> = self.coeffs.clone();
        for col in 0..e {
            let piv = (col..e)
                .filter(|&r| a[r][col].valuation().is_some())
                .min_by_key(|&r| a[r][col].valuation().unwrap())
                .ok_or_else(|| Error::precision("singular multiplication matrix"))?;
            a.swap(col, piv);
            b.swap(col, piv);
            for r in 0..e {
                if r == col || a[r][col].is_exact_zero() {
                    continue;
                }
                let f = a[r][col].checked_div(&a[col][col])?;
                for c in col..e {
                    let t = &f * &a[col][c];
                    a[r][c] = &a[r][c] - &t;
                }
                let t = &f * &b[col];
                b[r] = &b[r] - &t;
            }
        }
        let coeffs = (0..e).map(|i| b[i].checked_div(&a[i][i])).collect::<Result<Vec<_>>>()?;
        Ok(ExtElement { p: self.p, coeffs })
    }
}

/// Checked extension arithmetic, mirroring [`super::padic_arithmetic`].
pub fn ext_arithmetic(
    x: &ExtElement,
    y: &ExtElement,
    op: super::ArithOp,
) -> Result<ExtElement> {
    use super::ArithOp;
    match op {
        ArithOp::Add => x.add(y),
        ArithOp::Sub => x.sub(y),
        ArithOp::Mul => x.mul(y),
        ArithOp::Div => x.checked_div(y),
    }
}

impl fmt::Display for ExtElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> =
            self.coeffs.iter().enumerate().map(|(i, c)| format!("({c})*pi^{i}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}
