//! Adapted norms and operator norms.
//!
//! A norm here is a weighted max norm `||x|| = max_i p^(-q_i) |c_i|` where
//! `c = W^-1 x` are coordinates in an adapted basis `W`. On `E_rho` the basis
//! comes from a lattice with `||M x|| = rho ||x||`; on `E_0` it is a flag
//! basis rescaled by powers of `lambda = p^K` so that `M` has norm below `eps`.

use std::cmp::Ordering;

use num_integer::Integer;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::SpectralDecomposition;
use crate::error::{Error, Result};
use crate::field::{compare_threshold, Context, Magnitude, Prime, Scalar, Threshold, Val, Valuation};
use crate::polyalg::{invariant_unit_lattice, Lattice, Matrix};

/// The coordinates `start..start + len` of the adapted basis span `E_rho`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormBlock {
    pub valuation: Valuation,
    pub start: usize,
    pub len: usize,
}

#[derive(Clone, Debug)]
pub struct AdaptedNorm {
    basis: Matrix,
    inverse: Matrix,
    weights: Vec<Val>,
    blocks: Vec<NormBlock>,
    lambda_exponent: Option<i64>,
    epsilon: Option<Threshold>,
    prime: Prime,
}

impl AdaptedNorm {
    /// The standard max norm on `Q_p^d`.
    pub fn standard(d: usize, p: Prime) -> Self {
        AdaptedNorm {
            basis: Matrix::identity(d),
            inverse: Matrix::identity(d),
            weights: vec![Val::from_integer(0); d],
            blocks: Vec::new(),
            lambda_exponent: None,
            epsilon: None,
            prime: p,
        }
    }

    /// A weighted max norm in an arbitrary basis (columns of `basis`).
    pub fn from_basis(basis: Matrix, weights: Vec<Val>, ctx: &Context) -> Result<Self> {
        if weights.len() != basis.ncols() {
            return Err(Error::DimensionMismatch("one weight per basis vector".into()));
        }
        let inverse = basis.inverse(ctx)?;
        Ok(AdaptedNorm {
            basis,
            inverse,
            weights,
            blocks: Vec::new(),
            lambda_exponent: None,
            epsilon: None,
            prime: ctx.p,
        })
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    /// The adapted basis `W`, as columns.
    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn inverse(&self) -> &Matrix {
        &self.inverse
    }

    /// Weights `q_i`; the basis vector `w_i` has norm `p^(-q_i)`.
    pub fn weights(&self) -> &[Val] {
        &self.weights
    }

    pub fn blocks(&self) -> &[NormBlock] {
        &self.blocks
    }

    /// Basis indices of the blocks satisfying a predicate on the valuation.
    pub fn indices_where(&self, f: impl Fn(Valuation) -> bool) -> Vec<usize> {
        self.blocks
            .iter()
            .filter(|b| f(b.valuation))
            .flat_map(|b| b.start..b.start + b.len)
            .collect()
    }

    /// `K` with `lambda = p^K` for the nilpotent block.
    pub fn lambda_exponent(&self) -> Option<i64> {
        self.lambda_exponent
    }

    pub fn lambda(&self) -> Option<BigRational> {
        self.lambda_exponent.map(|k| self.prime.rational_pow(k))
    }

    pub fn epsilon(&self) -> Option<&Threshold> {
        self.epsilon.as_ref()
    }

    pub fn coordinates(&self, x: &[Scalar]) -> Vec<Scalar> {
        self.inverse.mul_vec(x)
    }

    /// `-log_p ||x||`.
    pub fn norm_valuation(&self, x: &[Scalar], ctx: &Context) -> Result<Valuation> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!("vector of length {} for a norm on dimension {}", x.len(), self.dim())));
        }
        let c = self.coordinates(x);
        weighted_min(c.iter().zip(&self.weights).map(|(c, q)| (c, *q)), ctx.p)
    }

    pub fn norm(&self, x: &[Scalar], ctx: &Context) -> Result<Magnitude> {
        Ok(Magnitude::from_valuation(self.norm_valuation(x, ctx)?))
    }

    /// `-log_p` of the operator norm of `M` restricted to the span of the
    /// chosen basis vectors, with this norm on both sides.
    pub fn restricted_operator_valuation(&self, m: &Matrix, cols: &[usize], ctx: &Context) -> Result<Valuation> {
        let a = self.inverse.mul(m).mul(&self.basis);
        let mut terms = Vec::new();
        for &j in cols {
            for i in 0..a.nrows() {
                terms.push((a.get(i, j).clone(), self.weights[i] - self.weights[j]));
            }
        }
        weighted_min(terms.iter().map(|(c, q)| (c, *q)), ctx.p)
    }
}

/// `min_i (q_i + v(c_i))`, refusing when an approximate zero could decide it.
fn weighted_min<'a>(terms: impl Iterator<Item = (&'a Scalar, Val)>, p: Prime) -> Result<Valuation> {
    let mut best: Option<Val> = None;
    let mut fog: Option<Val> = None;
    for (c, q) in terms {
        if c.is_certainly_nonzero() {
            let v = Val::from_integer(c.valuation(p).unwrap()) + q;
            best = Some(best.map_or(v, |b| b.min(v)));
        } else if let Some(b) = c.valuation_bound(p) {
            let v = Val::from_integer(b) + q;
            fog = Some(fog.map_or(v, |f| f.min(v)));
        }
    }
    match (best, fog) {
        (Some(b), Some(f)) if f <= b => Err(Error::precision("norm hidden below working precision")),
        (Some(b), _) => Ok(Valuation::Finite(b)),
        (None, None) => Ok(Valuation::Infinite),
        (None, Some(_)) => Err(Error::precision("vector vanishes only to working precision")),
    }
}

/// Operator norm of `M` from `(K^d, dom)` to `(K^d, cod)`:
/// `max_ij p^(-q^cod_i + q^dom_j) |A'_ij|` with `A' = W_cod^-1 M W_dom`.
pub fn operator_norm(m: &Matrix, dom: &AdaptedNorm, cod: &AdaptedNorm, ctx: &Context) -> Result<Magnitude> {
    if m.ncols() != dom.dim() || m.nrows() != cod.dim() {
        return Err(Error::DimensionMismatch("operator and norms disagree on dimensions".into()));
    }
    let a = cod.inverse.mul(m).mul(&dom.basis);
    let mut terms = Vec::with_capacity(a.nrows() * a.ncols());
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            terms.push((a.get(i, j).clone(), cod.weights[i] - dom.weights[j]));
        }
    }
    Ok(Magnitude::from_valuation(weighted_min(terms.iter().map(|(c, q)| (c, *q)), ctx.p)?))
}

/// Adapted norm for `M`; `eps` bounds the norm of `M` on `E_0` and defaults
/// to the smallest nonzero `rho` (rounded down to a power of `p`), or 1.
pub fn adapted_norm(m: &Matrix, ctx: &Context, eps: Option<&Threshold>) -> Result<AdaptedNorm> {
    let dec = super::decompose(m, ctx)?;
    adapted_norm_from(&dec, ctx, eps)
}

pub fn adapted_norm_from(dec: &SpectralDecomposition, ctx: &Context, eps: Option<&Threshold>) -> Result<AdaptedNorm> {
    let p = ctx.p;
    let d = dec.change.nrows();
    let epsilon = match eps {
        Some(e) => e.clone(),
        None => match dec.spectrum.smallest_nonzero() {
            Some(Valuation::Finite(v)) => Threshold::p_power(p, -v.ceil().to_integer()),
            _ => Threshold::one(),
        },
    };
    let offsets = dec.offsets();
    let mut columns: Vec<Vec<Scalar>> = Vec::with_capacity(d);
    let mut weights: Vec<Val> = Vec::with_capacity(d);
    let mut blocks = Vec::with_capacity(dec.blocks.len());
    let mut lambda_exponent = None;
    for (i, blk) in dec.blocks.iter().enumerate() {
        let k = blk.multiplicity;
        let idx: Vec<usize> = (offsets[i]..offsets[i] + k).collect();
        let e = dec.change.select_columns(&idx);
        let b = dec.restriction(i);
        let (local, w) = match blk.valuation {
            Valuation::Infinite => {
                let (cols, kexp) = nilpotent_block(&b, &epsilon, ctx)?;
                lambda_exponent = Some(kexp);
                (cols, vec![Val::from_integer(0); k])
            }
            Valuation::Finite(v) => slope_block(&b, v, ctx)?,
        };
        blocks.push(NormBlock { valuation: blk.valuation, start: columns.len(), len: k });
        columns.extend(local.iter().map(|c| e.mul_vec(c)));
        weights.extend(w);
    }
    let basis = Matrix::from_columns(&columns, d);
    let inverse = basis.inverse(ctx)?;
    Ok(AdaptedNorm { basis, inverse, weights, blocks, lambda_exponent, epsilon: Some(epsilon), prime: p })
}

/// Flag basis of a nilpotent `N` (so `N` is strictly upper triangular in it),
/// rescaled by `lambda^j`, `lambda = p^K`, with `K >= 1` minimal such that
/// `|lambda| < eps` and every rescaled entry is below `eps`.
fn nilpotent_block(n: &Matrix, eps: &Threshold, ctx: &Context) -> Result<(Vec<Vec<Scalar>>, i64)> {
    let p = ctx.p;
    let k = n.nrows();
    let mut flag: Vec<Vec<Scalar>> = Vec::with_capacity(k);
    let mut power = Matrix::identity(k);
    for _ in 0..k {
        power = power.mul(n);
        for v in power.kernel_basis(ctx)? {
            let mut trial = flag.clone();
            trial.push(v.clone());
            if Matrix::from_columns(&trial, k).rank(ctx)? == trial.len() {
                flag = trial;
            }
        }
        if flag.len() == k {
            break;
        }
    }
    if flag.len() != k {
        return Err(Error::RankUncertified("flag of kernels does not fill the nilpotent block".into()));
    }
    let f = Matrix::from_columns(&flag, k);
    let nn = f.inverse(ctx)?.mul(n).mul(&f);
    let mut upper: Vec<(i64, i64)> = Vec::new();
    for i in 0..k {
        for j in 0..k {
            let x = nn.get(i, j);
            if j <= i {
                if x.is_certainly_nonzero() {
                    return Err(Error::precision("nilpotent block is not triangular in its flag basis"));
                }
            } else if let Some(b) = x.valuation_bound(p) {
                upper.push((b, (j - i) as i64));
            }
        }
    }
    let below = |v: i64| compare_threshold(eps, Valuation::int(v), p) == Ordering::Greater;
    let kexp = (1..=1 << 16)
        .find(|&kk: &i64| below(kk) && upper.iter().all(|&(b, gap)| below(b + kk * gap)))
        .ok_or_else(|| Error::precondition("no rescaling brings the nilpotent block below eps"))?;
    let cols = flag
        .into_iter()
        .enumerate()
        .map(|(j, c)| {
            let s = Scalar::Exact(p.rational_pow(kexp * (j as i64 + 1)));
            c.iter().map(|x| x * &s).collect()
        })
        .collect();
    Ok((cols, kexp))
}

/// Basis and weights for a block whose eigenvalues all have valuation `v = r/s`.
///
/// With `a r = 1 + b s`, `Pi = p^-b B^a` has eigenvalues of valuation `1/s`
/// and `C = p^-r B^s` has unit eigenvalues, and `B = Pi^r C^-b`. The lattice
/// spanned by `Pi^i C^j e_l` is stable under `Pi`, `C` and `C^-1`, and
/// `Pi^s = p C^a`. Lifting a basis `u_1..u_k` of `L / Pi L`, the vectors
/// `Pi^j u_i` (`j < s`) form a basis in which `||x|| = max p^(-j/s) |c_ij|`.
fn slope_block(b: &Matrix, v: Val, ctx: &Context) -> Result<(Vec<Vec<Scalar>>, Vec<Val>)> {
    let p = ctx.p;
    let k = b.nrows();
    let r = *v.numer();
    let s = *v.denom();
    if s == 1 {
        let c = b.scale(&Scalar::Exact(p.rational_pow(-r)));
        let lat = invariant_unit_lattice(&c, ctx)?;
        return Ok((lat.basis().columns(), vec![Val::from_integer(0); k]));
    }
    let a = mod_inverse(r.rem_euclid(s), s);
    let bb = (a * r - 1) / s;
    let pi = b.pow(a as u32).scale(&Scalar::Exact(p.rational_pow(-bb)));
    let c = b.pow(s as u32).scale(&Scalar::Exact(p.rational_pow(-r)));
    let mut gens = Vec::with_capacity(k * k * k);
    let mut pi_pow = Matrix::identity(k);
    for _ in 0..k {
        let mut g = pi_pow.clone();
        for _ in 0..k {
            gens.extend(g.columns());
            g = c.mul(&g);
        }
        pi_pow = pi.mul(&pi_pow);
    }
    let lat = Lattice::hermite(&gens, k, ctx)?;
    let l = lat.basis().clone();
    let pl = l.inverse(ctx)?.mul(&pi).mul(&l);
    let image: Vec<Vec<u64>> = pl.columns().iter().map(|c| residues(c, p)).collect::<Result<_>>()?;
    let base_rank = rank_mod_p(&image, p.get());
    let mut chosen: Vec<usize> = Vec::new();
    let mut span = image.clone();
    for l_idx in 0..k {
        let mut e = vec![0u64; k];
        e[l_idx] = 1;
        span.push(e);
        if rank_mod_p(&span, p.get()) == base_rank + chosen.len() + 1 {
            chosen.push(l_idx);
        } else {
            span.pop();
        }
    }
    if chosen.len() * s as usize != k {
        return Err(Error::RankUncertified(format!(
            "L / Pi L has dimension {} for a block of size {k} and denominator {s}",
            chosen.len()
        )));
    }
    let mut cols = Vec::with_capacity(k);
    let mut weights = Vec::with_capacity(k);
    for &l_idx in &chosen {
        let mut u = l.column(l_idx);
        for j in 0..s {
            cols.push(u.clone());
            weights.push(Val::new(j, s));
            u = pi.mul_vec(&u);
        }
    }
    Ok((cols, weights))
}

fn residues(c: &[Scalar], p: Prime) -> Result<Vec<u64>> {
    c.iter().map(|x| x.residue(p)).collect()
}

fn mod_inverse(a: i64, m: i64) -> i64 {
    let g = a.extended_gcd(&m);
    debug_assert_eq!(g.gcd, 1);
    g.x.rem_euclid(m)
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn inv_mod(a: u64, p: u64) -> u64 {
    let (mut base, mut e, mut acc) = (a % p, p - 2, 1u64);
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        e >>= 1;
    }
    acc
}

/// Rank over `F_p` of a family of vectors.
fn rank_mod_p(vectors: &[Vec<u64>], p: u64) -> usize {
    let mut rows: Vec<Vec<u64>> = vectors.iter().map(|v| v.iter().map(|x| x % p).collect()).collect();
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(piv) = (rank..rows.len()).find(|&i| rows[i][col] != 0) else {
            continue;
        };
        rows.swap(rank, piv);
        let inv = inv_mod(rows[rank][col], p);
        for x in rows[rank].iter_mut() {
            *x = mul_mod(*x, inv, p);
        }
        for i in 0..rows.len() {
            if i != rank && rows[i][col] != 0 {
                let f = rows[i][col];
                for j in 0..ncols {
                    let sub = mul_mod(f, rows[rank][j], p);
                    rows[i][j] = (rows[i][j] + p - sub) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}
