//! Dense matrices over Q or Q_p and valuation-pivoted elimination.

use std::fmt;

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::field::{parse_rational, Context, Prime, Scalar};

/// A dense row-major matrix. Vectors are plain `Vec<Scalar>`; bases of
/// subspaces are lists of such vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

/// Result of Gauss-Jordan elimination: the first `pivots.len()` rows of
/// `reduced` carry a one in the column `pivots[i]` and the pivot columns are
/// otherwise zero.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub reduced: Matrix,
    pub pivots: Vec<usize>,
    /// Rows of the original matrix in the order they became pivot rows.
    pub row_order: Vec<usize>,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Scalar::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Matrix::from_fn(n, n, |i, j| if i == j { Scalar::one() } else { Scalar::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_rationals(rows: &[Vec<BigRational>]) -> Result<Self> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().cloned().map(Scalar::Exact).collect()).collect())
    }

    pub fn from_ints(rows: &[&[i64]]) -> Self {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| Scalar::from_int(x)).collect()).collect())
            .expect("rectangular integer rows")
    }

    /// Row-major rational literals.
    pub fn parse(rows: &[&[&str]]) -> Result<Self> {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|s| parse_rational(s).map(Scalar::Exact)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Matrix::from_rows(rows)
    }

    /// The matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<Scalar>], nrows: usize) -> Self {
        Matrix::from_fn(nrows, columns.len(), |i, j| columns[j][i].clone())
    }

    pub fn diag(entries: &[Scalar]) -> Self {
        let n = entries.len();
        Matrix::from_fn(n, n, |i, j| if i == j { entries[i].clone() } else { Scalar::zero() })
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: Scalar) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> Vec<Scalar> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Scalar>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_certainly_zero)
    }

    pub fn is_exact(&self) -> bool {
        self.data.iter().all(Scalar::is_exact)
    }

    /// Product; panics on a dimension mismatch.
    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_certainly_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_certainly_zero() {
                        continue;
                    }
                    let idx = i * other.cols + j;
                    out.data[idx] = &out.data[idx] + &(a * b);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(self.cols, v.len(), "matrix-vector dimension mismatch");
        (0..self.rows)
            .map(|i| {
                (0..self.cols).fold(Scalar::zero(), |acc, j| {
                    let a = self.get(i, j);
                    if a.is_certainly_zero() || v[j].is_certainly_zero() {
                        acc
                    } else {
                        &acc + &(a * &v[j])
                    }
                })
            })
            .collect()
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "matrix sum dimension mismatch");
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        self.add(&other.scale(&Scalar::from_int(-1)))
    }

    pub fn scale(&self, c: &Scalar) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * c).collect() }
    }

    pub fn pow(&self, n: u32) -> Matrix {
        assert!(self.is_square());
        let mut acc = Matrix::identity(self.rows);
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Columns `[self | other]`.
    pub fn hstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows);
        Matrix::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                other.get(i, j - self.cols).clone()
            }
        })
    }

    pub fn select_columns(&self, cols: &[usize]) -> Matrix {
        Matrix::from_fn(self.rows, cols.len(), |i, j| self.get(i, cols[j]).clone())
    }

    pub fn select_rows(&self, rows: &[usize]) -> Matrix {
        Matrix::from_fn(rows.len(), self.cols, |i, j| self.get(rows[i], j).clone())
    }

    pub fn to_approx(&self, p: Prime, prec: u32) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x.to_approx(p, prec)).collect() }
    }

    /// Smallest valuation among the certainly nonzero entries, using the
    /// absolute precision of approximate zeros as a bound.
    pub fn min_valuation(&self, p: Prime) -> Option<i64> {
        self.data.iter().filter_map(|x| x.valuation_bound(p)).min()
    }

    /// Gauss-Jordan elimination with full pivoting on the entry of least
    /// valuation among the first `pivot_cols` columns.
    ///
    /// Only certainly nonzero entries qualify as pivots; an approximate zero
    /// is never divided by. A pivot carrying fewer than the configured floor
    /// of significant digits makes the rank uncertifiable.
    pub fn gauss_jordan(&self, ctx: &Context, pivot_cols: usize) -> Result<Echelon> {
        let p = ctx.p;
        let mut a = self.clone();
        let mut rows: Vec<usize> = (0..self.rows).collect();
        let mut pivots = Vec::new();
        let mut used = vec![false; pivot_cols];
        for r in 0..self.rows {
            let mut best: Option<(i64, u32, usize, usize)> = None;
            for i in r..self.rows {
                for (j, u) in used.iter().enumerate() {
                    if *u {
                        continue;
                    }
                    let x = a.get(i, j);
                    if !x.is_certainly_nonzero() {
                        continue;
                    }
                    let v = x.valuation(p).unwrap();
                    let key = (v, u32::MAX - x.rel_precision(), i, j);
                    if best.is_none_or(|b| key < b) {
                        best = Some(key);
                    }
                }
            }
            let Some((_, _, i, j)) = best else { break };
            let piv = a.get(i, j).clone();
            if piv.rel_precision() < ctx.floor() {
                return Err(Error::RankUncertified(format!(
                    "pivot {piv} has fewer than {} significant digits",
                    ctx.floor()
                )));
            }
            a.swap_rows(r, i);
            rows.swap(r, i);
            for c in 0..a.cols {
                let x = a.get(r, c).checked_div(&piv)?;
                a.set(r, c, x);
            }
            a.set(r, j, Scalar::one());
            for i2 in 0..a.rows {
                if i2 == r {
                    continue;
                }
                let f = a.get(i2, j).clone();
                if f.is_certainly_zero() {
                    continue;
                }
                for c in 0..a.cols {
                    let t = &f * a.get(r, c);
                    let x = a.get(i2, c) - &t;
                    a.set(i2, c, x);
                }
                a.set(i2, j, Scalar::zero());
            }
            used[j] = true;
            pivots.push(j);
        }
        let row_order = rows[..pivots.len()].to_vec();
        Ok(Echelon { reduced: a, pivots, row_order })
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    /// Basis of the right kernel. Each vector has a one in its free
    /// coordinate and is then rescaled by a power of `p` to be primitive.
    pub fn kernel_basis(&self, ctx: &Context) -> Result<Vec<Vec<Scalar>>> {
        let ech = self.gauss_jordan(ctx, self.cols)?;
        let free: Vec<usize> = (0..self.cols).filter(|c| !ech.pivots.contains(c)).collect();
        let mut out = Vec::with_capacity(free.len());
        for &f in &free {
            let mut v = vec![Scalar::zero(); self.cols];
            v[f] = Scalar::one();
            for (i, &pc) in ech.pivots.iter().enumerate() {
                v[pc] = -ech.reduced.get(i, f);
            }
            out.push(primitive(v, ctx.p));
        }
        Ok(out)
    }

    pub fn rank(&self, ctx: &Context) -> Result<usize> {
        Ok(self.gauss_jordan(ctx, self.cols)?.rank())
    }

    /// A basis of the column space, made of (primitive rescalings of)
    /// columns of the matrix itself.
    pub fn column_basis(&self, ctx: &Context) -> Result<Vec<Vec<Scalar>>> {
        let ech = self.gauss_jordan(ctx, self.cols)?;
        let mut piv = ech.pivots.clone();
        piv.sort_unstable();
        Ok(piv.into_iter().map(|j| primitive(self.column(j), ctx.p)).collect())
    }

    /// Inverse of a square matrix.
    pub fn inverse(&self, ctx: &Context) -> Result<Matrix> {
        self.solve(ctx, &Matrix::identity(self.rows))
    }

    /// Solves `self * X = B` for square invertible `self`.
    pub fn solve(&self, ctx: &Context, b: &Matrix) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("solve needs a square matrix".into()));
        }
        if b.rows != self.rows {
            return Err(Error::DimensionMismatch("right-hand side has the wrong height".into()));
        }
        let n = self.rows;
        let ech = self.hstack(b).gauss_jordan(ctx, n)?;
        if ech.rank() < n {
            let undecided = (ech.rank()..n)
                .any(|i| (0..n).any(|j| ech.reduced.get(i, j).is_approx_zero()));
            return Err(if undecided {
                Error::RankUncertified("remaining block is zero only to working precision".into())
            } else {
                Error::SingularMatrix
            });
        }
        let mut x = Matrix::zeros(n, b.cols);
        for (i, &pc) in ech.pivots.iter().enumerate() {
            for j in 0..b.cols {
                x.set(pc, j, ech.reduced.get(i, n + j).clone());
            }
        }
        Ok(x)
    }

    /// Determinant by elimination with valuation pivoting.
    pub fn det(&self, ctx: &Context) -> Result<Scalar> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("determinant of a non-square matrix".into()));
        }
        let p = ctx.p;
        let n = self.rows;
        let mut a = self.clone();
        let mut det = Scalar::one();
        for c in 0..n {
            let piv = (c..n)
                .filter(|&r| a.get(r, c).is_certainly_nonzero())
                .min_by_key(|&r| a.get(r, c).valuation(p).unwrap());
            let Some(r) = piv else {
                if (c..n).any(|r| a.get(r, c).is_approx_zero()) {
                    return Err(Error::precision("determinant column vanishes to working precision"));
                }
                return Ok(Scalar::zero());
            };
            if r != c {
                a.swap_rows(r, c);
                det = -det;
            }
            let pv = a.get(c, c).clone();
            det = &det * &pv;
            for r2 in c + 1..n {
                let f = a.get(r2, c).checked_div(&pv)?;
                if f.is_certainly_zero() {
                    continue;
                }
                for k in c..n {
                    let t = &f * a.get(c, k);
                    let x = a.get(r2, k) - &t;
                    a.set(r2, k, x);
                }
            }
        }
        Ok(det)
    }
}

/// Rescales a vector by a power of `p` so that its least valuation is zero.
pub fn primitive(v: Vec<Scalar>, p: Prime) -> Vec<Scalar> {
    let Some(m) = v.iter().filter(|x| x.is_certainly_nonzero()).filter_map(|x| x.valuation(p)).min() else {
        return v;
    };
    if m == 0 {
        return v;
    }
    let s = Scalar::Exact(p.rational_pow(-m));
    v.iter().map(|x| x * &s).collect()
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u64) -> Context {
        Context::new(Prime::new(p).unwrap())
    }

    #[test]
    fn kernel_of_rank_one() {
        let m = Matrix::from_ints(&[&[2, 8], &[1, 4]]);
        let k = m.kernel_basis(&ctx(2)).unwrap();
        assert_eq!(k, vec![vec![Scalar::from_int(-4), Scalar::one()]]);
    }

    #[test]
    fn kernel_extremes() {
        assert!(Matrix::identity(3).kernel_basis(&ctx(3)).unwrap().is_empty());
        let k = Matrix::zeros(3, 3).kernel_basis(&ctx(5)).unwrap();
        assert_eq!(k.len(), 3);
        for (i, v) in k.iter().enumerate() {
            for (j, x) in v.iter().enumerate() {
                assert_eq!(*x, if i == j { Scalar::one() } else { Scalar::zero() });
            }
        }
    }

    #[test]
    fn inverse_and_det() {
        let c = ctx(2);
        let m = Matrix::parse(&[&["0", "8"], &["1", "2"]]).unwrap();
        let inv = m.inverse(&c).unwrap();
        assert_eq!(m.mul(&inv), Matrix::identity(2));
        assert_eq!(m.det(&c).unwrap(), Scalar::from_int(-8));
        assert_eq!(Matrix::from_ints(&[&[1, 2], &[2, 4]]).inverse(&c), Err(Error::SingularMatrix));
    }

    #[test]
    fn approximate_kernel() {
        let c = ctx(2);
        let p = c.p;
        let m = Matrix::from_ints(&[&[2, 8], &[1, 4]]).to_approx(p, 20);
        let k = m.kernel_basis(&c).unwrap();
        assert_eq!(k.len(), 1);
        let r = m.mul_vec(&k[0]);
        assert!(r.iter().all(|x| !x.is_certainly_nonzero()));
        assert!((&k[0][0] + &Scalar::from_int(4)).is_approx_zero());
    }

    #[test]
    fn low_precision_pivot_is_rejected() {
        let c = ctx(3);
        let m = Matrix::from_ints(&[&[1, 0], &[0, 1]]).to_approx(c.p, 3);
        assert!(matches!(m.kernel_basis(&c), Err(Error::RankUncertified(_))));
    }

    #[test]
    fn column_space() {
        let m = Matrix::from_ints(&[&[0, 2], &[0, 4]]);
        let b = m.column_basis(&ctx(2)).unwrap();
        assert_eq!(b, vec![vec![Scalar::from_int(1), Scalar::from_int(2)]]);
    }
}
