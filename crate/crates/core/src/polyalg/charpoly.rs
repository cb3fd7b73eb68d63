//! Characteristic polynomials.
//!
//! Rational matrices go through fraction-free elimination: `det(tI - M)` is
//! evaluated at `t = 0..d` with Bareiss' algorithm on an integer scaling of
//! the matrix and the polynomial is recovered by interpolation. Matrices
//! with p-adic entries are reduced to Hessenberg form with valuation pivoting.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{Matrix, Polynomial};
use crate::error::{Error, Result};
use crate::field::{Context, Scalar};

/// `det(tI - M)`, monic of degree `d`.
pub fn charpoly(m: &Matrix, ctx: &Context) -> Result<Polynomial> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch("characteristic polynomial of a non-square matrix".into()));
    }
    if m.is_exact() {
        Ok(charpoly_rational(m))
    } else {
        charpoly_hessenberg(m, ctx)
    }
}

/// Fraction-free determinant of a square integer matrix.
pub fn bareiss_det(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = num / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

fn charpoly_rational(m: &Matrix) -> Polynomial {
    let d = m.nrows();
    let q: Vec<&BigRational> = m.entries().iter().map(|x| x.as_rational().unwrap()).collect();
    let den = q.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let dm: Vec<BigInt> = q.iter().map(|x| (*x * BigRational::from_integer(den.clone())).to_integer()).collect();
    // det(tI - M) = det(t*D*I - D*M) / D^d
    let scale = BigRational::from_integer(num_traits::pow(den.clone(), d));
    let mut xs = Vec::with_capacity(d + 1);
    let mut ys = Vec::with_capacity(d + 1);
    for t in 0..=d {
        let tb = BigInt::from(t) * &den;
        let rows = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| {
                        let diag = if i == j { tb.clone() } else { BigInt::zero() };
                        diag - &dm[i * d + j]
                    })
                    .collect()
            })
            .collect();
        xs.push(BigRational::from_integer(t.into()));
        ys.push(BigRational::from_integer(bareiss_det(rows)) / &scale);
    }
    Polynomial::from_rationals(&interpolate(&xs, &ys))
}

/// Coefficients (ascending) of the interpolating polynomial, via Newton's
/// divided differences.
pub fn interpolate(xs: &[BigRational], ys: &[BigRational]) -> Vec<BigRational> {
    let n = xs.len();
    let mut dd = ys.to_vec();
    for k in 1..n {
        for i in (k..n).rev() {
            dd[i] = (&dd[i] - &dd[i - 1]) / (&xs[i] - &xs[i - k]);
        }
    }
    let mut coeffs = vec![BigRational::zero(); n];
    for k in (0..n).rev() {
        // coeffs = coeffs * (t - x_k) + dd[k]
        let mut next = vec![BigRational::zero(); n];
        for i in 0..n {
            if i + 1 < n {
                next[i + 1] += &coeffs[i];
            }
            next[i] -= &coeffs[i] * &xs[k];
        }
        next[0] += &dd[k];
        coeffs = next;
    }
    coeffs
}

/// Hessenberg reduction by similarity, pivoting on the subdiagonal entry
/// of least valuation, followed by the usual determinant recurrence.
fn charpoly_hessenberg(m: &Matrix, ctx: &Context) -> Result<Polynomial> {
    let p = ctx.p;
    let n = m.nrows();
    let mut h = m.clone();
    for j in 0..n.saturating_sub(2) {
        let piv = (j + 1..n)
            .filter(|&r| h.get(r, j).is_certainly_nonzero())
            .min_by_key(|&r| h.get(r, j).valuation(p).unwrap());
        let Some(r) = piv else { continue };
        if r != j + 1 {
            // P A P with P the transposition (r, j+1)
            for c in 0..n {
                let a = h.get(r, c).clone();
                let b = h.get(j + 1, c).clone();
                h.set(r, c, b);
                h.set(j + 1, c, a);
            }
            for rr in 0..n {
                let a = h.get(rr, r).clone();
                let b = h.get(rr, j + 1).clone();
                h.set(rr, r, b);
                h.set(rr, j + 1, a);
            }
        }
        let pv = h.get(j + 1, j).clone();
        for i in j + 2..n {
            let f = h.get(i, j).checked_div(&pv)?;
            if f.is_certainly_zero() {
                continue;
            }
            // row_i -= f row_{j+1}; col_{j+1} += f col_i
            for c in 0..n {
                let x = h.get(i, c) - &(&f * h.get(j + 1, c));
                h.set(i, c, x);
            }
            h.set(i, j, Scalar::zero());
            for rr in 0..n {
                let x = h.get(rr, j + 1) + &(&f * h.get(rr, i));
                h.set(rr, j + 1, x);
            }
        }
    }
    // p_k = (t - h_kk) p_{k-1} - sum_{i<k} h_ik (prod_{m=i+1..k} h_{m,m-1}) p_{i-1}
    let mut polys: Vec<Polynomial> = vec![Polynomial::one()];
    for k in 0..n {
        let lin = Polynomial::new(vec![-h.get(k, k), Scalar::one()]);
        let mut pk = lin.mul(&polys[k]);
        let mut prod = Scalar::one();
        for i in (0..k).rev() {
            prod = &prod * h.get(i + 1, i);
            if prod.is_certainly_zero() {
                break;
            }
            let c = &prod * h.get(i, k);
            pk = pk.sub(&polys[i].scale(&c));
        }
        polys.push(pk);
    }
    let mut f = polys.pop().unwrap();
    if let Some(last) = f.degree() {
        let mut cs = f.coeffs().to_vec();
        cs[last] = Scalar::one();
        f = Polynomial::new(cs);
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Prime;

    fn ctx(p: u64) -> Context {
        Context::new(Prime::new(p).unwrap())
    }

    #[test]
    fn diagonal() {
        let m = Matrix::parse(&[&["2", "0", "0"], &["0", "1", "0"], &["0", "0", "1/2"]]).unwrap();
        let q = |s: &str| crate::field::parse_rational(s).unwrap();
        let expect = Polynomial::from_roots(&[q("2"), q("1"), q("1/2")]);
        assert_eq!(charpoly(&m, &ctx(2)).unwrap(), expect);
    }

    #[test]
    fn companion() {
        let m = Matrix::from_ints(&[&[0, 8], &[1, 2]]);
        assert_eq!(charpoly(&m, &ctx(2)).unwrap(), Polynomial::from_ints(&[-8, -2, 1]));
    }

    #[test]
    fn nilpotent() {
        let m = Matrix::from_ints(&[&[0, 1], &[0, 0]]);
        assert_eq!(charpoly(&m, &ctx(3)).unwrap(), Polynomial::from_ints(&[0, 0, 1]));
    }

    #[test]
    fn hessenberg_agrees_with_bareiss() {
        let c = ctx(3);
        let m = Matrix::parse(&[
            &["1", "2/3", "0", "5"],
            &["3", "-1", "7", "1/9"],
            &["0", "4", "2", "2"],
            &["6", "1", "-3", "0"],
        ])
        .unwrap();
        let exact = charpoly(&m, &c).unwrap();
        let approx = charpoly(&m.to_approx(c.p, 40), &c).unwrap();
        let diff = exact.sub(&approx);
        assert!(diff.coeffs().iter().all(|x| !x.is_certainly_nonzero() || x.valuation(c.p).unwrap() >= 30));
    }

    #[test]
    fn bareiss_small() {
        let a = vec![vec![BigInt::from(2), BigInt::from(3)], vec![BigInt::from(1), BigInt::from(4)]];
        assert_eq!(bareiss_det(a), BigInt::from(5));
        let z = vec![vec![BigInt::from(0), BigInt::from(1)], vec![BigInt::from(1), BigInt::from(0)]];
        assert_eq!(bareiss_det(z), BigInt::from(-1));
    }
}
