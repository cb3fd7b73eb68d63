//! Linear theory: eigenvalue absolute values, the decomposition into the
//! spaces `E_rho`, splittings at a threshold `a`, adapted norms, operator
//! norms and witnesses of non-hyperbolicity.

mod norm;
mod witness;

pub use norm::{adapted_norm, adapted_norm_from, operator_norm, AdaptedNorm, NormBlock};
pub use witness::{nonhyperbolicity_witness, Witness, WitnessSummary, WITNESS_WINDOW};

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{compare_threshold, Context, Prime, Scalar, Threshold, Valuation};
use crate::polyalg::{charpoly, fitting_decomposition, newton_polygon, slope_factorization, Matrix, Polynomial};

/// One element of `R(alpha)`: `rho = p^(-v)` with its algebraic multiplicity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectralEntry {
    #[serde(rename = "v")]
    pub valuation: Valuation,
    #[serde(rename = "m")]
    pub multiplicity: usize,
}

/// The absolute values of the eigenvalues, ordered by increasing `rho`:
/// `rho = 0` first, then decreasing valuation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectralData {
    pub entries: Vec<SpectralEntry>,
}

impl SpectralData {
    pub fn dim(&self) -> usize {
        self.entries.iter().map(|e| e.multiplicity).sum()
    }

    pub fn valuations(&self) -> impl Iterator<Item = Valuation> + '_ {
        self.entries.iter().map(|e| e.valuation)
    }

    /// Whether `a` is one of the absolute values.
    pub fn contains(&self, a: &Threshold, p: Prime) -> bool {
        self.valuations().any(|v| compare_threshold(a, v, p) == Ordering::Equal)
    }

    pub fn has_zero(&self) -> bool {
        self.valuations().any(|v| v.is_infinite())
    }

    /// True when every `rho` satisfies the predicate on its valuation.
    pub fn all(&self, f: impl Fn(Valuation) -> bool) -> bool {
        self.valuations().all(f)
    }

    /// Smallest nonzero `rho`, as its valuation.
    pub fn smallest_nonzero(&self) -> Option<Valuation> {
        self.valuations().filter(|v| !v.is_infinite()).max()
    }
}

/// `R(alpha)` from the Newton polygon of the characteristic polynomial.
pub fn spectrum_abs(m: &Matrix, ctx: &Context) -> Result<SpectralData> {
    let f = charpoly(m, ctx)?;
    let np = newton_polygon(&f, ctx.p)?;
    let entries = np
        .root_valuations()
        .into_iter()
        .map(|(valuation, multiplicity)| SpectralEntry { valuation, multiplicity })
        .collect();
    Ok(SpectralData { entries })
}

/// `M` is `a`-hyperbolic iff `a` is not the absolute value of an eigenvalue.
pub fn is_hyperbolic(m: &Matrix, a: &Threshold, ctx: &Context) -> Result<bool> {
    Ok(!spectrum_abs(m, ctx)?.contains(a, ctx.p))
}

/// `E_rho` with the slope factor it is the kernel of.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EigenBlock {
    pub valuation: Valuation,
    pub multiplicity: usize,
    /// `f_v`, or `t^m` for the nilpotent part.
    pub factor: Polynomial,
    pub basis: Vec<Vec<Scalar>>,
}

/// `K^d` as the direct sum of the `E_rho`, with the block diagonal form of `M`.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub spectrum: SpectralData,
    pub blocks: Vec<EigenBlock>,
    /// Columns are the concatenated bases of the blocks.
    pub change: Matrix,
    pub change_inv: Matrix,
    /// `change_inv * M * change`, block diagonal.
    pub block_form: Matrix,
    pub prime: Prime,
}

impl SpectralDecomposition {
    /// Start offset of each block in the concatenated basis.
    pub fn offsets(&self) -> Vec<usize> {
        let mut off = 0;
        self.blocks
            .iter()
            .map(|b| {
                let o = off;
                off += b.multiplicity;
                o
            })
            .collect()
    }

    /// Restriction of `M` to block `i`, in that block's basis.
    pub fn restriction(&self, i: usize) -> Matrix {
        let o = self.offsets()[i];
        let k = self.blocks[i].multiplicity;
        let idx: Vec<usize> = (o..o + k).collect();
        self.block_form.select_rows(&idx).select_columns(&idx)
    }

    /// Least valuation of an entry outside the diagonal blocks; `+inf` when
    /// they vanish exactly.
    pub fn off_block_valuation(&self) -> Valuation {
        let offs = self.offsets();
        let owner = |i: usize| offs.iter().rposition(|&o| o <= i).unwrap();
        let n = self.block_form.nrows();
        let mut best = Valuation::Infinite;
        for i in 0..n {
            for j in 0..n {
                if owner(i) == owner(j) {
                    continue;
                }
                if let Some(v) = self.block_form.get(i, j).valuation_bound(self.prime) {
                    best = best.min(Valuation::int(v));
                }
            }
        }
        best
    }
}

/// Computes every `E_rho`.
///
/// For finite valuations `E_rho = ker f_v(M)` with `f_v` the slope factor;
/// `E_0` is the nilpotent part of the Fitting decomposition. Kernel
/// dimensions are checked against the Newton polygon multiplicities.
pub fn decompose(m: &Matrix, ctx: &Context) -> Result<SpectralDecomposition> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch("spectral decomposition of a non-square matrix".into()));
    }
    let d = m.nrows();
    let f = charpoly(m, ctx)?;
    let spectrum = {
        let np = newton_polygon(&f, ctx.p)?;
        SpectralData {
            entries: np
                .root_valuations()
                .into_iter()
                .map(|(valuation, multiplicity)| SpectralEntry { valuation, multiplicity })
                .collect(),
        }
    };
    let factors = slope_factorization(&f, ctx)?;
    let mut blocks = Vec::with_capacity(factors.len());
    for sf in factors {
        let basis = if sf.root_valuation.is_infinite() {
            fitting_decomposition(m, ctx)?.nilpotent
        } else {
            sf.factor.eval_matrix(m).kernel_basis(ctx)?
        };
        if basis.len() != sf.multiplicity {
            return Err(Error::RankUncertified(format!(
                "eigenspace for valuation {} has dimension {} instead of {}",
                sf.root_valuation,
                basis.len(),
                sf.multiplicity
            )));
        }
        blocks.push(EigenBlock {
            valuation: sf.root_valuation,
            multiplicity: sf.multiplicity,
            factor: sf.factor,
            basis,
        });
    }
    let cols: Vec<Vec<Scalar>> = blocks.iter().flat_map(|b| b.basis.iter().cloned()).collect();
    let change = Matrix::from_columns(&cols, d);
    let change_inv = change.inverse(ctx)?;
    let block_form = change_inv.mul(m).mul(&change);
    Ok(SpectralDecomposition { spectrum, blocks, change, change_inv, block_form, prime: ctx.p })
}

/// Basis of `E_rho` for `rho = p^(-v)`; empty when `v` is not in the spectrum.
pub fn eigenspace_sum(m: &Matrix, v: Valuation, ctx: &Context) -> Result<Vec<Vec<Scalar>>> {
    let dec = decompose(m, ctx)?;
    Ok(dec.blocks.into_iter().find(|b| b.valuation == v).map(|b| b.basis).unwrap_or_default())
}

/// Reduced row echelon basis of the span of `vectors`: pivots equal one and
/// the result depends only on the subspace (for exact data).
pub fn canonical_basis(vectors: &[Vec<Scalar>], d: usize, ctx: &Context) -> Result<Vec<Vec<Scalar>>> {
    let p = ctx.p;
    let mut rows: Vec<Vec<Scalar>> = vectors.to_vec();
    let mut r = 0;
    for col in 0..d {
        let pick = (r..rows.len())
            .filter(|&i| rows[i][col].is_certainly_nonzero())
            .min_by_key(|&i| (rows[i][col].valuation(p).unwrap(), i));
        let Some(i) = pick else { continue };
        rows.swap(r, i);
        let piv = rows[r][col].clone();
        for x in rows[r].iter_mut() {
            *x = x.checked_div(&piv)?;
        }
        rows[r][col] = Scalar::one();
        for i in 0..rows.len() {
            if i == r || rows[i][col].is_certainly_zero() {
                continue;
            }
            let f = rows[i][col].clone();
            let pivot_row = rows[r].clone();
            for (x, y) in rows[i].iter_mut().zip(&pivot_row) {
                *x = &*x - &(&f * y);
            }
            rows[i][col] = Scalar::zero();
        }
        r += 1;
    }
    if r != vectors.len() {
        return Err(Error::RankUncertified("spanning vectors are not independent at working precision".into()));
    }
    rows.truncate(r);
    Ok(rows)
}

/// Where a block sits relative to the threshold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Stable,
    Centre,
    Unstable,
}

impl Side {
    pub fn of(a: &Threshold, v: Valuation, p: Prime) -> Side {
        match compare_threshold(a, v, p) {
            Ordering::Greater => Side::Stable,
            Ordering::Equal => Side::Centre,
            Ordering::Less => Side::Unstable,
        }
    }
}

/// The invariant splitting at a threshold `a`.
#[derive(Clone, Debug)]
pub struct Splitting {
    pub threshold: Threshold,
    pub decomposition: SpectralDecomposition,
    pub sides: Vec<Side>,
    pub stable: Vec<Vec<Scalar>>,
    pub centre: Vec<Vec<Scalar>>,
    pub unstable: Vec<Vec<Scalar>>,
}

impl Splitting {
    /// `E_{a,cs} = E_{a,s} + E_{a,c}`.
    pub fn centre_stable(&self) -> Vec<Vec<Scalar>> {
        self.stable.iter().chain(&self.centre).cloned().collect()
    }

    /// `E_{a,cu} = E_{a,c} + E_{a,u}`.
    pub fn centre_unstable(&self) -> Vec<Vec<Scalar>> {
        self.centre.iter().chain(&self.unstable).cloned().collect()
    }

    pub fn is_hyperbolic(&self) -> bool {
        self.centre.is_empty()
    }

    /// Indices (into the decomposition's concatenated basis) on one side.
    pub fn indices(&self, side: Side) -> Vec<usize> {
        let offs = self.decomposition.offsets();
        let mut out = Vec::new();
        for (i, b) in self.decomposition.blocks.iter().enumerate() {
            if self.sides[i] == side {
                out.extend(offs[i]..offs[i] + b.multiplicity);
            }
        }
        out
    }
}

/// Aggregates the `E_rho` by comparing each `rho` with `a`; ties go to the centre.
pub fn splitting_at(m: &Matrix, a: &Threshold, ctx: &Context) -> Result<Splitting> {
    let dec = decompose(m, ctx)?;
    Ok(splitting_from(dec, a, ctx.p))
}

pub fn splitting_from(dec: SpectralDecomposition, a: &Threshold, p: Prime) -> Splitting {
    let mut stable = Vec::new();
    let mut centre = Vec::new();
    let mut unstable = Vec::new();
    let mut sides = Vec::with_capacity(dec.blocks.len());
    for b in &dec.blocks {
        let side = Side::of(a, b.valuation, p);
        sides.push(side);
        let target = match side {
            Side::Stable => &mut stable,
            Side::Centre => &mut centre,
            Side::Unstable => &mut unstable,
        };
        target.extend(b.basis.iter().cloned());
    }
    Splitting { threshold: a.clone(), decomposition: dec, sides, stable, centre, unstable }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u64) -> Context {
        Context::new(Prime::new(p).unwrap())
    }

    fn diag3() -> Matrix {
        Matrix::parse(&[&["2", "0", "0"], &["0", "1", "0"], &["0", "0", "1/2"]]).unwrap()
    }

    fn companion() -> Matrix {
        Matrix::from_ints(&[&[0, 8], &[1, 2]])
    }

    fn e(i: usize, d: usize) -> Vec<Scalar> {
        (0..d).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }).collect()
    }

    fn ints(xs: &[i64]) -> Vec<Scalar> {
        xs.iter().map(|&x| Scalar::from_int(x)).collect()
    }

    #[test]
    fn spectrum_examples() {
        let c = ctx(2);
        let s = spectrum_abs(&diag3(), &c).unwrap();
        let vals: Vec<Valuation> = s.valuations().collect();
        assert_eq!(vals, vec![Valuation::int(1), Valuation::int(0), Valuation::int(-1)]);
        assert!(s.entries.iter().all(|e| e.multiplicity == 1));
        let s = spectrum_abs(&companion(), &c).unwrap();
        let vals: Vec<Valuation> = s.valuations().collect();
        assert_eq!(vals, vec![Valuation::int(2), Valuation::int(1)]);
        let s = spectrum_abs(&Matrix::from_ints(&[&[0, 1], &[0, 0]]), &c).unwrap();
        assert_eq!(s.entries, vec![SpectralEntry { valuation: Valuation::Infinite, multiplicity: 2 }]);
    }

    #[test]
    fn hyperbolicity_examples() {
        let c = ctx(2);
        let t = |s: &str| s.parse::<Threshold>().unwrap();
        assert!(!is_hyperbolic(&diag3(), &t("1"), &c).unwrap());
        assert!(is_hyperbolic(&diag3(), &t("3/4"), &c).unwrap());
        assert!(is_hyperbolic(&companion(), &t("1"), &c).unwrap());
    }

    #[test]
    fn eigenspace_examples() {
        let c = ctx(2);
        assert_eq!(eigenspace_sum(&companion(), Valuation::int(1), &c).unwrap(), vec![ints(&[-4, 1])]);
        assert_eq!(eigenspace_sum(&companion(), Valuation::int(2), &c).unwrap(), vec![ints(&[2, 1])]);
        assert_eq!(eigenspace_sum(&diag3(), Valuation::int(0), &c).unwrap(), vec![e(1, 3)]);
        assert!(eigenspace_sum(&diag3(), Valuation::int(5), &c).unwrap().is_empty());
    }

    #[test]
    fn splitting_examples() {
        let c = ctx(2);
        let t = |s: &str| s.parse::<Threshold>().unwrap();
        let s = splitting_at(&diag3(), &t("1"), &c).unwrap();
        assert_eq!(s.stable, vec![e(0, 3)]);
        assert_eq!(s.centre, vec![e(1, 3)]);
        assert_eq!(s.unstable, vec![e(2, 3)]);
        assert_eq!(s.centre_stable(), vec![e(0, 3), e(1, 3)]);
        let s = splitting_at(&diag3(), &t("3/4"), &c).unwrap();
        assert_eq!(s.stable, vec![e(0, 3)]);
        assert!(s.centre.is_empty());
        assert_eq!(s.unstable.len(), 2);
        let s = splitting_at(&companion(), &t("1"), &c).unwrap();
        assert_eq!(s.stable.len(), 2);
        assert!(s.centre.is_empty() && s.unstable.is_empty());
    }

    #[test]
    fn canonical_bases() {
        let c = ctx(2);
        let b = canonical_basis(&[ints(&[2, 4, 2]), ints(&[1, 1, 0])], 3, &c).unwrap();
        assert_eq!(b, vec![ints(&[1, 0, -1]), ints(&[0, 1, 1])]);
        assert!(canonical_basis(&[ints(&[1, 2]), ints(&[2, 4])], 2, &c).is_err());
    }

    #[test]
    fn block_form_is_block_diagonal() {
        let c = ctx(3);
        let m = Matrix::parse(&[&["1", "3", "0"], &["1/3", "0", "9"], &["0", "1", "2"]]).unwrap();
        let dec = decompose(&m, &c).unwrap();
        assert_eq!(dec.blocks.iter().map(|b| b.multiplicity).sum::<usize>(), 3);
        assert!(dec.off_block_valuation() >= Valuation::int(c.precision() as i64));
    }
}
