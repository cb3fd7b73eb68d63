//! Random matrices and maps with a planted spectrum, and samplers for
//! points of adapted balls.
#![allow(dead_code)]

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use ultradyn::dynamics::PolyMap;
use ultradyn::field::{Context, Prime, Scalar, Threshold, Val, Valuation};
use ultradyn::polyalg::{monomials_of_degree, MPoly, Matrix};
use ultradyn::spectral::AdaptedNorm;

pub const PRIMES: [u64; 3] = [2, 3, 5];

pub fn ctx(p: u64) -> Context {
    Context::new(Prime::new(p).unwrap())
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn p_pow(p: u64, k: i64) -> BigRational {
    let base = BigRational::from_integer(BigInt::from(p));
    if k >= 0 {
        num_traits::pow(base, k as usize)
    } else {
        num_traits::pow(base.recip(), (-k) as usize)
    }
}

/// A p-adic unit: a ratio of small integers prime to `p`.
pub fn unit(rng: &mut ChaCha8Rng, p: u64) -> BigRational {
    let pick = |rng: &mut ChaCha8Rng| loop {
        let n: i64 = rng.gen_range(1..=3 * p as i64 + 2);
        if n % p as i64 != 0 {
            return n;
        }
    };
    let n = pick(rng);
    let d = if rng.gen_bool(0.3) { pick(rng) } else { 1 };
    let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
    rat(sign * n, d)
}

/// `p^k u` with a random unit `u`.
pub fn element(rng: &mut ChaCha8Rng, p: u64, k: i64) -> Scalar {
    Scalar::Exact(p_pow(p, k) * unit(rng, p))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Block {
    /// `[p^v u]`.
    Scalar(i64),
    /// Two by two Jordan block with eigenvalue `p^v u`.
    Jordan(i64),
    /// Companion matrix of `t^s - p^r u`, all roots of valuation `r/s`.
    Ramified(i64, i64),
    /// Nilpotent Jordan block of the given size.
    Nilpotent(usize),
}

impl Block {
    pub fn size(self) -> usize {
        match self {
            Block::Scalar(_) => 1,
            Block::Jordan(_) => 2,
            Block::Ramified(_, s) => s as usize,
            Block::Nilpotent(n) => n,
        }
    }

    pub fn valuation(self) -> Valuation {
        match self {
            Block::Scalar(v) | Block::Jordan(v) => Valuation::int(v),
            Block::Ramified(r, s) => Valuation::frac(r, s),
            Block::Nilpotent(_) => Valuation::Infinite,
        }
    }

    fn matrix(self, rng: &mut ChaCha8Rng, p: u64) -> Matrix {
        let n = self.size();
        let mut m = Matrix::zeros(n, n);
        match self {
            Block::Scalar(v) => m.set(0, 0, element(rng, p, v)),
            Block::Jordan(v) => {
                let l = element(rng, p, v);
                m.set(0, 0, l.clone());
                m.set(1, 1, l);
                m.set(0, 1, Scalar::one());
            }
            Block::Ramified(r, _) => {
                for i in 1..n {
                    m.set(i, i - 1, Scalar::one());
                }
                m.set(0, n - 1, element(rng, p, r));
            }
            Block::Nilpotent(_) => {
                for i in 1..n {
                    m.set(i - 1, i, Scalar::one());
                }
            }
        }
        m
    }
}

/// Which blocks a planted matrix may contain.
#[derive(Clone, Debug)]
pub struct Shape {
    pub max_dim: usize,
    pub valuations: Vec<i64>,
    pub jordan: bool,
    pub ramified: bool,
    pub nilpotent: bool,
}

impl Shape {
    pub fn full(max_dim: usize) -> Self {
        Shape { max_dim, valuations: vec![-2, -1, 0, 1, 2], jordan: true, ramified: true, nilpotent: true }
    }

    /// Invertible, no eigenvalue of absolute value one.
    pub fn hyperbolic(max_dim: usize) -> Self {
        Shape { max_dim, valuations: vec![-1, 1, 2], jordan: true, ramified: true, nilpotent: false }
    }
}

#[derive(Clone, Debug)]
pub struct Planted {
    pub p: u64,
    pub blocks: Vec<Block>,
    pub matrix: Matrix,
}

impl Planted {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `(valuation, multiplicity)` by increasing absolute value.
    pub fn spectrum(&self) -> Vec<(Valuation, usize)> {
        let mut agg: BTreeMap<Valuation, usize> = BTreeMap::new();
        for b in &self.blocks {
            *agg.entry(b.valuation()).or_default() += b.size();
        }
        agg.into_iter().rev().collect()
    }

    pub fn finite_valuations(&self) -> Vec<Val> {
        self.spectrum().iter().filter_map(|(v, _)| v.finite()).collect()
    }
}

fn pick_block(rng: &mut ChaCha8Rng, shape: &Shape, room: usize) -> Block {
    loop {
        let v = shape.valuations[rng.gen_range(0..shape.valuations.len())];
        let b = match rng.gen_range(0..10) {
            0..=4 => Block::Scalar(v),
            5 | 6 if shape.jordan => Block::Jordan(v),
            7 if shape.ramified => {
                let s = rng.gen_range(2..=3);
                let r = loop {
                    let r: i64 = rng.gen_range(-3..=4);
                    if r.rem_euclid(s) != 0 {
                        break r;
                    }
                };
                Block::Ramified(r, s)
            }
            8 if shape.nilpotent => Block::Nilpotent(rng.gen_range(1..=2)),
            _ => continue,
        };
        if b.size() <= room {
            return b;
        }
    }
}

/// `S D S^-1` with `S` a product of random shears and `p`-power scalings.
pub fn conjugator(rng: &mut ChaCha8Rng, p: u64, d: usize) -> (Matrix, Matrix) {
    let mut s = Matrix::identity(d);
    let mut s_inv = Matrix::identity(d);
    if d == 1 {
        return (s, s_inv);
    }
    let choices = [rat(1, 1), rat(-1, 1), rat(2, 1), rat(-2, 1), p_pow(p, 1), p_pow(p, -1)];
    for _ in 0..2 * d {
        let i = rng.gen_range(0..d);
        let j = (i + rng.gen_range(1..d)) % d;
        let c = Scalar::Exact(choices[rng.gen_range(0..choices.len())].clone());
        let mut e = Matrix::identity(d);
        e.set(i, j, c.clone());
        let mut e_inv = Matrix::identity(d);
        e_inv.set(i, j, -c);
        s = s.mul(&e);
        s_inv = e_inv.mul(&s_inv);
    }
    let k = rng.gen_range(0..d);
    let e: i64 = rng.gen_range(-1..=1);
    let mut dg = Matrix::identity(d);
    dg.set(k, k, Scalar::Exact(p_pow(p, e)));
    let mut dg_inv = Matrix::identity(d);
    dg_inv.set(k, k, Scalar::Exact(p_pow(p, -e)));
    (s.mul(&dg), dg_inv.mul(&s_inv))
}

pub fn block_diagonal(parts: &[Matrix]) -> Matrix {
    let d: usize = parts.iter().map(Matrix::nrows).sum();
    let mut m = Matrix::zeros(d, d);
    let mut off = 0;
    for b in parts {
        for i in 0..b.nrows() {
            for j in 0..b.ncols() {
                m.set(off + i, off + j, b.get(i, j).clone());
            }
        }
        off += b.nrows();
    }
    m
}

pub fn planted(rng: &mut ChaCha8Rng, p: u64, d: usize, shape: &Shape) -> Planted {
    let mut blocks = Vec::new();
    let mut room = d;
    while room > 0 {
        let b = pick_block(rng, shape, room);
        room -= b.size();
        blocks.push(b);
    }
    planted_from(rng, p, blocks)
}

pub fn planted_from(rng: &mut ChaCha8Rng, p: u64, blocks: Vec<Block>) -> Planted {
    let parts: Vec<Matrix> = blocks.iter().map(|b| b.matrix(rng, p)).collect();
    let dm = block_diagonal(&parts);
    let (s, s_inv) = conjugator(rng, p, dm.nrows());
    Planted { p, blocks, matrix: s.mul(&dm).mul(&s_inv) }
}

/// Random terms of degrees `2..=max_deg`, coefficients of valuation at least `min_val`.
pub fn nonlinear(rng: &mut ChaCha8Rng, p: u64, d: usize, max_deg: u32, min_val: i64) -> PolyMap {
    let comps = (0..d)
        .map(|_| {
            let mut f = MPoly::zero(d);
            for k in 2..=max_deg {
                for m in monomials_of_degree(d, k) {
                    if rng.gen_bool(0.35) {
                        let k = min_val + rng.gen_range(0..=2);
                        let c = element(rng, p, k);
                        f = f.add(&MPoly::monomial(d, m, c));
                    }
                }
            }
            f
        })
        .collect();
    PolyMap::new(comps).unwrap()
}

pub fn with_linear_part(a: &Matrix, g: &PolyMap) -> PolyMap {
    PolyMap::linear(a).add(g)
}

/// Random vector with entries of valuation in `lo..=hi`, some of them zero.
pub fn vector(rng: &mut ChaCha8Rng, p: u64, d: usize, lo: i64, hi: i64) -> Vec<Scalar> {
    loop {
        let x: Vec<Scalar> = (0..d)
            .map(|_| {
                if rng.gen_bool(0.2) {
                    Scalar::zero()
                } else {
                    let k = rng.gen_range(lo..=hi);
                    element(rng, p, k)
                }
            })
            .collect();
        if x.iter().any(|c| !c.is_certainly_zero()) {
            return x;
        }
    }
}

pub fn combination(rng: &mut ChaCha8Rng, p: u64, basis: &[Vec<Scalar>], d: usize) -> Vec<Scalar> {
    loop {
        let mut x = vec![Scalar::zero(); d];
        for b in basis {
            let c = if rng.gen_bool(0.25) {
                Scalar::zero()
            } else {
                let k = rng.gen_range(-2..=2);
                element(rng, p, k)
            };
            for (xi, bi) in x.iter_mut().zip(b) {
                *xi = &*xi + &(&c * bi);
            }
        }
        if basis.is_empty() || x.iter().any(|c| !c.is_certainly_zero()) {
            return x;
        }
    }
}

fn ceil_val(v: Val) -> i64 {
    v.ceil().to_integer()
}

/// A point of the adapted norm with `||x|| = p^-w`, `w` in `[k, k + 1)`.
pub fn shell_point(rng: &mut ChaCha8Rng, norm: &AdaptedNorm, k: i64) -> Vec<Scalar> {
    let p = norm_prime(norm);
    let d = norm.dim();
    let weights = norm.weights();
    let lead = rng.gen_range(0..d);
    let coords: Vec<Scalar> = (0..d)
        .map(|i| {
            let least = ceil_val(Val::from_integer(k) - weights[i]);
            if i == lead {
                element(rng, p, least)
            } else if rng.gen_bool(0.25) {
                Scalar::zero()
            } else {
                let extra = rng.gen_range(0..=2);
                element(rng, p, least + extra)
            }
        })
        .collect();
    norm.basis().mul_vec(&coords)
}

fn norm_prime(norm: &AdaptedNorm) -> u64 {
    norm.prime().get()
}

/// A rational strictly between `p^-hi` and `p^-lo`, for valuations `hi > lo`.
pub fn between(p: u64, hi: Val, lo: Val) -> BigRational {
    assert!(hi > lo);
    let mut a = p_pow(p, -hi.ceil().to_integer());
    let mut b = p_pow(p, -lo.floor().to_integer());
    loop {
        let mid = (&a + &b) / BigInt::from(2);
        let above_low = cmp_power(&mid, p, hi) == Ordering::Greater;
        let below_high = cmp_power(&mid, p, lo) == Ordering::Less;
        match (above_low, below_high) {
            (true, true) => return mid,
            (false, _) => a = mid,
            (_, false) => b = mid,
        }
    }
}

/// Compares a positive rational `q` with `p^-v`.
pub fn cmp_power(q: &BigRational, p: u64, v: Val) -> Ordering {
    let s = *v.denom() as usize;
    let r = *v.numer();
    let lhs = num_traits::pow(q.clone(), s);
    lhs.cmp(&p_pow(p, -r))
}

pub fn threshold(q: BigRational) -> Threshold {
    Threshold::new(q).unwrap()
}

/// Rationals sampled at every integral spectrum value and inside every gap.
pub fn thresholds_around(p: u64, vals: &[Val]) -> Vec<(BigRational, bool)> {
    let mut vs: Vec<Val> = vals.to_vec();
    vs.sort();
    vs.dedup();
    vs.reverse();
    let mut out = Vec::new();
    if vs.is_empty() {
        out.push((rat(1, 1), false));
        return out;
    }
    let top = vs[0];
    out.push((between(p, top + Val::from_integer(2), top), false));
    for w in vs.windows(2) {
        out.push((between(p, w[0], w[1]), false));
    }
    let bottom = *vs.last().unwrap();
    out.push((between(p, bottom, bottom - Val::from_integer(2)), false));
    for v in &vs {
        if v.is_integer() {
            out.push((p_pow(p, -v.to_integer()), true));
        }
    }
    out
}

pub fn in_span(basis: &[Vec<Scalar>], x: &[Scalar], ctx: &Context) -> bool {
    if x.iter().all(Scalar::is_certainly_zero) {
        return true;
    }
    if basis.is_empty() {
        return false;
    }
    let d = x.len();
    let m = Matrix::from_columns(basis, d);
    let mut cols = basis.to_vec();
    cols.push(x.to_vec());
    let ext = Matrix::from_columns(&cols, d);
    m.rank(ctx).unwrap() == ext.rank(ctx).unwrap()
}

pub fn is_nonzero(x: &[Scalar]) -> bool {
    x.iter().any(|c| !c.is_certainly_zero())
}

pub fn abs_cmp(a: &BigRational, b: &BigRational) -> Ordering {
    a.abs().cmp(&b.abs())
}

pub fn is_one(q: &BigRational) -> bool {
    q.is_one()
}

pub fn is_zero(q: &BigRational) -> bool {
    q.is_zero()
}
