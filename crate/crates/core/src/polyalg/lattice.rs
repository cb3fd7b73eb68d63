//! Full-rank Z_p-lattices in Q_p^d and lattices stable under a linear map.

use super::{charpoly, newton_polygon, Matrix};
use crate::error::{Error, Result};
use crate::field::{Context, Scalar, Val, Valuation};

/// A Z_p-lattice given by a basis in lower triangular Hermite form: the
/// `r`-th basis vector vanishes above row `r` and has `p^(k_r)` in row `r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    basis: Matrix,
    pivot_valuations: Vec<i64>,
}

impl Lattice {
    /// Z_p^d.
    pub fn standard(d: usize) -> Self {
        Lattice { basis: Matrix::identity(d), pivot_valuations: vec![0; d] }
    }

    /// Hermite-reduced basis of the Z_p-span of the generators.
    pub fn hermite(generators: &[Vec<Scalar>], d: usize, ctx: &Context) -> Result<Self> {
        let p = ctx.p;
        let mut gens: Vec<Vec<Scalar>> = generators.to_vec();
        let mut basis: Vec<Vec<Scalar>> = Vec::with_capacity(d);
        let mut pivots = Vec::with_capacity(d);
        for r in 0..d {
            let pick = gens
                .iter()
                .enumerate()
                .filter(|(_, g)| g[r].is_certainly_nonzero())
                .min_by_key(|(i, g)| (g[r].valuation(p).unwrap(), u32::MAX - g[r].rel_precision(), *i))
                .map(|(i, _)| i);
            let Some(i) = pick else {
                if gens.iter().any(|g| g[r].is_approx_zero()) {
                    return Err(Error::precision("lattice pivot vanished to working precision"));
                }
                return Err(Error::precondition("generators do not span a full-rank lattice"));
            };
            let mut b = gens.swap_remove(i);
            let k = b[r].valuation(p).unwrap();
            let u = b[r].unit_inverse(p)?;
            for x in b.iter_mut() {
                *x = &*x * &u;
            }
            b[r] = Scalar::Exact(p.rational_pow(k));
            for g in gens.iter_mut() {
                if g[r].is_certainly_zero() {
                    continue;
                }
                let f = g[r].checked_div(&b[r])?;
                for (gi, bi) in g.iter_mut().zip(&b) {
                    *gi = &*gi - &(&f * bi);
                }
                g[r] = Scalar::zero();
            }
            gens.retain(|g| !g.iter().all(Scalar::is_certainly_zero));
            for prev in basis.iter_mut() {
                let e: &Scalar = &prev[r];
                if !e.is_certainly_nonzero() || e.valuation(p).unwrap() < k {
                    continue;
                }
                let f = e.checked_div(&b[r])?;
                for (pi, bi) in prev.iter_mut().zip(&b) {
                    *pi = &*pi - &(&f * bi);
                }
                prev[r] = Scalar::zero();
            }
            basis.push(b);
            pivots.push(k);
        }
        Ok(Lattice { basis: Matrix::from_columns(&basis, d), pivot_valuations: pivots })
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// Basis vectors as columns.
    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn pivot_valuations(&self) -> &[i64] {
        &self.pivot_valuations
    }

    /// Coordinates of `x` in the lattice basis.
    pub fn coordinates(&self, x: &[Scalar], ctx: &Context) -> Result<Vec<Scalar>> {
        let b = Matrix::from_columns(&[x.to_vec()], x.len());
        Ok(self.basis.solve(ctx, &b)?.column(0))
    }

    /// Valuation of the gauge norm: the least valuation of the coordinates.
    pub fn gauge_valuation(&self, x: &[Scalar], ctx: &Context) -> Result<Valuation> {
        let c = self.coordinates(x, ctx)?;
        min_valuation(&c, ctx)
    }

    pub fn contains(&self, x: &[Scalar], ctx: &Context) -> Result<bool> {
        Ok(match self.gauge_valuation(x, ctx)? {
            Valuation::Infinite => true,
            Valuation::Finite(v) => v >= Val::from_integer(0),
        })
    }
}

/// Least valuation of a coordinate vector; an approximate zero that could
/// decide the minimum exhausts precision.
pub fn min_valuation(c: &[Scalar], ctx: &Context) -> Result<Valuation> {
    let p = ctx.p;
    let best = c.iter().filter(|x| x.is_certainly_nonzero()).filter_map(|x| x.valuation(p)).min();
    let fog = c.iter().filter(|x| x.is_approx_zero()).filter_map(|x| x.valuation_bound(p)).min();
    match (best, fog) {
        (Some(b), Some(f)) if f <= b => Err(Error::precision("norm hidden below working precision")),
        (Some(b), _) => Ok(Valuation::int(b)),
        (None, None) => Ok(Valuation::Infinite),
        (None, Some(_)) => Err(Error::precision("vector vanishes only to working precision")),
    }
}

/// A lattice `L` with `B L = L` for a matrix whose eigenvalues are all units.
///
/// The Z_p-span of `B^n e_i` for `n < d` is stable under `B` because the
/// characteristic polynomial is integral, and under `B^-1` because its
/// constant term is a unit.
pub fn invariant_unit_lattice(b: &Matrix, ctx: &Context) -> Result<Lattice> {
    let d = b.nrows();
    let f = charpoly(b, ctx)?;
    let np = newton_polygon(&f, ctx.p)?;
    let flat = np.zero_roots == 0 && np.segments.iter().all(|s| s.root_valuation == Val::from_integer(0));
    if !flat {
        return Err(Error::precondition("eigenvalues of the block are not all units"));
    }
    let mut gens = Vec::with_capacity(d * d);
    let mut power = Matrix::identity(d);
    for n in 0..d {
        gens.extend(power.columns());
        if n + 1 < d {
            power = b.mul(&power);
        }
    }
    Lattice::hermite(&gens, d, ctx)
}
