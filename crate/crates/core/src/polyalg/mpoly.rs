//! Multivariate polynomials with truncated arithmetic.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::field::{Prime, Scalar};

/// Exponent vector of a monomial.
pub type Monomial = Vec<u32>;

/// Sparse polynomial in `nvars` variables. Exact zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MPoly {
    nvars: usize,
    terms: BTreeMap<Monomial, Scalar>,
}

pub fn total_degree(m: &[u32]) -> u32 {
    m.iter().sum()
}

/// All exponent vectors in `n` variables of total degree `k`, in lexicographic order.
pub fn monomials_of_degree(n: usize, k: u32) -> Vec<Monomial> {
    fn rec(n: usize, k: u32, prefix: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if prefix.len() + 1 == n {
            prefix.push(k);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=k).rev() {
            prefix.push(e);
            rec(n, k - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        if k == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(n, k, &mut Vec::with_capacity(n), &mut out);
    out
}

impl MPoly {
    pub fn zero(nvars: usize) -> Self {
        MPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Scalar) -> Self {
        MPoly::monomial(nvars, vec![0; nvars], c)
    }

    /// The variable `x_i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut m = vec![0; nvars];
        m[i] = 1;
        MPoly::monomial(nvars, m, Scalar::one())
    }

    pub fn monomial(nvars: usize, m: Monomial, c: Scalar) -> Self {
        assert_eq!(m.len(), nvars, "monomial has the wrong number of variables");
        let mut p = MPoly::zero(nvars);
        p.add_term(m, c);
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, Scalar)>) -> Result<Self> {
        let mut p = MPoly::zero(nvars);
        for (m, c) in terms {
            if m.len() != nvars {
                return Err(Error::DimensionMismatch(format!(
                    "monomial {m:?} in a polynomial of {nvars} variables"
                )));
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    /// `sum_j row_j x_j`.
    pub fn linear(row: &[Scalar]) -> Self {
        let n = row.len();
        let mut p = MPoly::zero(n);
        for (j, c) in row.iter().enumerate() {
            let mut m = vec![0; n];
            m[j] = 1;
            p.add_term(m, c.clone());
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_certainly_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(x) => {
                let s = &*x + &c;
                if s.is_certainly_zero() {
                    self.terms.remove(&m);
                } else {
                    *x = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Scalar> {
        &self.terms
    }

    pub fn coeff(&self, m: &[u32]) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; `None` for zero.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| total_degree(m)).max()
    }

    /// Least total degree of a term; `None` for zero.
    pub fn min_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| total_degree(m)).min()
    }

    pub fn is_exact(&self) -> bool {
        self.terms.values().all(Scalar::is_exact)
    }

    /// True when every coefficient is an exact zero or an approximate zero.
    pub fn vanishes(&self) -> bool {
        self.terms.values().all(|c| !c.is_certainly_nonzero())
    }

    pub fn add(&self, other: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &MPoly) -> MPoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> MPoly {
        MPoly { nvars: self.nvars, terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }

    pub fn scale(&self, c: &Scalar) -> MPoly {
        let mut out = MPoly::zero(self.nvars);
        for (m, x) in &self.terms {
            out.add_term(m.clone(), x * c);
        }
        out
    }

    /// Product, dropping terms of total degree above `max_deg`.
    pub fn mul(&self, other: &MPoly, max_deg: Option<u32>) -> MPoly {
        let mut out = MPoly::zero(self.nvars);
        for (ma, ca) in &self.terms {
            let da = total_degree(ma);
            for (mb, cb) in &other.terms {
                if max_deg.is_some_and(|d| da + total_degree(mb) > d) {
                    continue;
                }
                let m: Monomial = ma.iter().zip(mb).map(|(a, b)| a + b).collect();
                out.add_term(m, ca * cb);
            }
        }
        out
    }

    /// Terms of total degree exactly `k`.
    pub fn homogeneous(&self, k: u32) -> MPoly {
        self.filter_degree(|d| d == k)
    }

    /// Terms of total degree at most `k`.
    pub fn truncate(&self, k: u32) -> MPoly {
        self.filter_degree(|d| d <= k)
    }

    pub fn filter_degree(&self, keep: impl Fn(u32) -> bool) -> MPoly {
        MPoly {
            nvars: self.nvars,
            terms: self.terms.iter().filter(|(m, _)| keep(total_degree(m))).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    /// `d/dx_i`.
    pub fn derivative(&self, i: usize) -> MPoly {
        let mut out = MPoly::zero(self.nvars);
        for (m, c) in &self.terms {
            if m[i] == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2[i] -= 1;
            out.add_term(m2, c * &Scalar::from_int(m[i] as i64));
        }
        out
    }

    pub fn eval(&self, x: &[Scalar]) -> Scalar {
        assert_eq!(x.len(), self.nvars, "point has the wrong dimension");
        let mut powers: Vec<Vec<Scalar>> = x.iter().map(|xi| vec![Scalar::one(), xi.clone()]).collect();
        let mut acc = Scalar::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap() * &x[i];
                    powers[i].push(next);
                }
                t = &t * &powers[i][e as usize];
            }
            acc = &acc + &t;
        }
        acc
    }

    /// `self(subs_0, ..., subs_{n-1})`, dropping terms above `max_deg`.
    pub fn compose(&self, subs: &[MPoly], max_deg: Option<u32>) -> MPoly {
        assert_eq!(subs.len(), self.nvars, "one substitution per variable");
        let target = subs.first().map_or(0, MPoly::nvars);
        let mut powers: Vec<Vec<MPoly>> =
            subs.iter().map(|s| vec![MPoly::constant(target, Scalar::one()), s.clone()]).collect();
        let mut out = MPoly::zero(target);
        for (m, c) in &self.terms {
            let mut t = MPoly::constant(target, c.clone());
            for (i, &e) in m.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap().mul(&subs[i], max_deg);
                    powers[i].push(next);
                }
                t = t.mul(&powers[i][e as usize], max_deg);
                if t.is_zero() {
                    break;
                }
            }
            out = out.add(&t);
        }
        out
    }

    pub fn to_approx(&self, p: Prime, prec: u32) -> MPoly {
        let mut out = MPoly::zero(self.nvars);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.to_approx(p, prec));
        }
        out
    }
}
