//! Factorization of a polynomial by the valuation of its roots.
//!
//! At a break point `k` of the Newton polygon the normalized polynomial
//! `F = f / c_k` is dominated by `t^k` for the weighted valuation
//! `w(sum a_i t^i) = min v(a_i) + i*mu`, where `mu` lies strictly between
//! the two neighbouring root valuations. The truncations `G = sum_{i<=k}`
//! and `H = sum_{i>=k} / t^k` are then corrected by dividing the defect
//! `F - GH` by `G`: with `F - GH = QG + R` the update `G += R, H += Q`
//! leaves the defect `R(1 - H) - RQ`, which is smaller by a fixed weighted
//! gap. The iteration runs in capped p-adic arithmetic until the defect
//! vanishes to working precision.

use serde::{Deserialize, Serialize};

use super::{newton_polygon, NewtonPolygon, Polynomial};
use crate::error::{Error, Result};
use crate::field::{Context, Scalar, Val, Valuation};

/// A monic factor all of whose roots have the same valuation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlopeFactor {
    pub root_valuation: Valuation,
    pub multiplicity: usize,
    pub factor: Polynomial,
    /// The product of all factors agrees with the input modulo `p^N`.
    pub certified_precision: u32,
}

impl SlopeFactor {
    pub fn is_exact(&self) -> bool {
        self.factor.is_exact()
    }
}

/// Summary used in reports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlopeFactorSummary {
    pub root_valuation: Valuation,
    pub multiplicity: usize,
    pub exact: bool,
    pub coefficients: Vec<String>,
}

impl From<&SlopeFactor> for SlopeFactorSummary {
    fn from(f: &SlopeFactor) -> Self {
        SlopeFactorSummary {
            root_valuation: f.root_valuation,
            multiplicity: f.multiplicity,
            exact: f.is_exact(),
            coefficients: f.factor.to_strings(),
        }
    }
}

/// Splits a monic polynomial into pure-slope monic factors, ordered as the
/// Newton polygon from left to right: `t^z` first, then by decreasing root
/// valuation. Factors are returned exactly whenever rational reconstruction
/// yields a factor that divides `f` over Q.
pub fn slope_factorization(f: &Polynomial, ctx: &Context) -> Result<Vec<SlopeFactor>> {
    if !f.is_monic() {
        return Err(Error::precondition("slope factorization needs a monic polynomial"));
    }
    let p = ctx.p;
    let n_target = ctx.precision();
    let np = newton_polygon(f, p)?;
    let mut out = Vec::new();
    let z = np.zero_roots;
    if z > 0 {
        out.push(SlopeFactor {
            root_valuation: Valuation::Infinite,
            multiplicity: z,
            factor: Polynomial::monomial(Scalar::one(), z),
            certified_precision: n_target,
        });
    }
    let rest = f.shift_down(z);
    if np.segments.len() <= 1 {
        if let Some(s) = np.segments.first() {
            out.push(SlopeFactor {
                root_valuation: Valuation::Finite(s.root_valuation),
                multiplicity: s.length,
                factor: rest,
                certified_precision: n_target,
            });
        }
        return Ok(out);
    }

    let vals: Vec<i64> = np.vertices.iter().map(|v| v.1).collect();
    let spread = vals.iter().max().unwrap() - vals.iter().min().unwrap();
    let deg = rest.degree().unwrap() as i64;
    let work_prec = n_target as i64 + 2 * spread + 4 * deg + 32;
    let work_prec = u32::try_from(work_prec).map_err(|_| Error::precision("working precision overflow"))?;

    let mut current = if rest.is_exact() { rest.to_approx(p, work_prec) } else { rest.clone() };
    let mut approx_factors: Vec<(Val, usize, Polynomial)> = Vec::new();
    for (idx, seg) in np.segments.iter().enumerate() {
        if idx + 1 == np.segments.len() {
            approx_factors.push((seg.root_valuation, seg.length, current.clone()));
            break;
        }
        let next = np.segments[idx + 1].root_valuation;
        let (g, h) = split_once(&current, seg.length, seg.root_valuation, next, ctx)?;
        approx_factors.push((seg.root_valuation, seg.length, g));
        current = h;
    }

    for (v, m, g) in approx_factors {
        let factor = match reconstruct_factor(&g, &rest, v, m, ctx) {
            Some(exact) => exact,
            None => g,
        };
        out.push(SlopeFactor {
            root_valuation: Valuation::Finite(v),
            multiplicity: m,
            factor,
            certified_precision: n_target,
        });
    }

    let product = out.iter().fold(Polynomial::one(), |acc, sf| acc.mul(&sf.factor));
    let defect = f.sub(&product);
    for c in defect.coeffs() {
        match c.valuation_bound(p) {
            None => {}
            Some(v) if v >= n_target as i64 => {}
            Some(_) => {
                return Err(Error::precision(format!(
                    "product of slope factors differs from the input below p^{n_target}"
                )))
            }
        }
    }
    Ok(out)
}

/// One weighted Hensel split at the first break point `k`.
fn split_once(
    f: &Polynomial,
    k: usize,
    v_left: Val,
    v_right: Val,
    ctx: &Context,
) -> Result<(Polynomial, Polynomial)> {
    let p = ctx.p;
    let n = f.degree().unwrap();
    let ck = f.coeff(k);
    if !ck.is_certainly_nonzero() {
        return Err(Error::precision("hull vertex coefficient vanished to working precision"));
    }
    let fnorm = Polynomial::new(f.coeffs().iter().map(|c| c.checked_div(&ck)).collect::<Result<Vec<_>>>()?);
    let mut gc: Vec<Scalar> = fnorm.coeffs()[..=k].to_vec();
    gc[k] = Scalar::one();
    let mut g = Polynomial::new(gc);
    let mut hc: Vec<Scalar> = fnorm.coeffs()[k..].to_vec();
    hc[0] = Scalar::one();
    let mut h = Polynomial::new(hc);

    let mu = (v_left + v_right) / Val::from_integer(2);
    let weighted = |poly: &Polynomial| -> Option<Val> {
        poly.coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| c.is_certainly_nonzero())
            .filter_map(|(i, c)| c.valuation(p).map(|v| Val::from_integer(v) + mu * Val::from_integer(i as i64)))
            .min()
    };

    let max_iter = 64 * (ctx.precision() as usize + 64) * (n + 1);
    let mut last: Option<Val> = None;
    let mut stalls = 0;
    for _ in 0..max_iter {
        let e = fnorm.sub(&g.mul(&h));
        if e.coeffs().iter().all(|c| !c.is_certainly_nonzero()) {
            let h_out = h.scale(&ck);
            let h_out = h_out.monic()?;
            return Ok((g, h_out));
        }
        let w = weighted(&e);
        if w <= last {
            stalls += 1;
            if stalls > 4 * (n + 4) {
                return Err(Error::precision("Hensel iteration stopped making progress"));
            }
        } else {
            stalls = 0;
            last = w;
        }
        let (q, r) = div_rem_monic(&e, &g)?;
        g = g.add(&r);
        h = h.add(&q);
    }
    Err(Error::precision("Hensel iteration exceeded its budget"))
}

/// Division by a monic polynomial, valid for approximate coefficients.
pub(crate) fn div_rem_monic(a: &Polynomial, b: &Polynomial) -> Result<(Polynomial, Polynomial)> {
    let db = b.degree().ok_or(Error::DivisionByZero)?;
    if !b.is_monic() {
        return Err(Error::precondition("divisor must be monic"));
    }
    let mut r: Vec<Scalar> = a.coeffs().to_vec();
    if r.len() <= db {
        return Ok((Polynomial::zero(), a.clone()));
    }
    let mut q = vec![Scalar::zero(); r.len() - db];
    for k in (0..q.len()).rev() {
        let c = r[k + db].clone();
        if !c.is_certainly_zero() {
            for (i, bi) in b.coeffs().iter().enumerate() {
                r[k + i] = &r[k + i] - &(&c * bi);
            }
        }
        q[k] = c;
    }
    r.truncate(db);
    Ok((Polynomial::new(q), Polynomial::new(r)))
}

/// Attempts to recover an exact rational factor from a p-adic one.
fn reconstruct_factor(g: &Polynomial, f: &Polynomial, v: Val, m: usize, ctx: &Context) -> Option<Polynomial> {
    if g.is_exact() {
        return Some(g.clone());
    }
    if !f.is_exact() {
        return None;
    }
    let coeffs = g
        .coeffs()
        .iter()
        .map(|c| match c {
            Scalar::Exact(q) => Some(q.clone()),
            Scalar::Approx(x) if x.is_zero() => Some(num_rational::BigRational::from_integer(0.into())),
            Scalar::Approx(x) => x.reconstruct_rational(),
        })
        .collect::<Option<Vec<_>>>()?;
    let cand = Polynomial::from_rationals(&coeffs);
    if cand.degree() != Some(m) || !cand.is_monic() {
        return None;
    }
    let (_, r) = f.div_rem(&cand).ok()?;
    if !r.is_zero() {
        return None;
    }
    let np: NewtonPolygon = newton_polygon(&cand, ctx.p).ok()?;
    if np.zero_roots != 0 || np.segments.len() != 1 || np.segments[0].root_valuation != v {
        return None;
    }
    Some(cand)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Prime;

    fn ctx(p: u64, n: u32) -> Context {
        Context::with_precision(Prime::new(p).unwrap(), n)
    }

    #[test]
    fn two_rational_roots() {
        let f = Polynomial::from_ints(&[-8, -2, 1]);
        let fs = slope_factorization(&f, &ctx(2, 16)).unwrap();
        assert_eq!(fs.len(), 2);
        assert_eq!(fs[0].root_valuation, Valuation::int(2));
        assert_eq!(fs[0].factor, Polynomial::from_ints(&[-4, 1]));
        assert_eq!(fs[1].root_valuation, Valuation::int(1));
        assert_eq!(fs[1].factor, Polynomial::from_ints(&[2, 1]));
    }

    #[test]
    fn single_slope_is_untouched() {
        let f = Polynomial::from_ints(&[1, 0, 1]);
        let fs = slope_factorization(&f, &ctx(2, 16)).unwrap();
        assert_eq!(fs.len(), 1);
        assert_eq!(fs[0].factor, f);
        assert_eq!(fs[0].multiplicity, 2);
    }

    #[test]
    fn zero_roots_and_eisenstein() {
        let f = Polynomial::from_ints(&[0, -2, 0, 1]);
        let fs = slope_factorization(&f, &ctx(2, 16)).unwrap();
        assert_eq!(fs.len(), 2);
        assert_eq!(fs[0].root_valuation, Valuation::Infinite);
        assert_eq!(fs[0].factor, Polynomial::from_ints(&[0, 1]));
        assert_eq!(fs[1].root_valuation, Valuation::frac(1, 2));
        assert_eq!(fs[1].factor, Polynomial::from_ints(&[-2, 0, 1]));
    }

    #[test]
    fn irreducible_factors_stay_approximate() {
        // Over Q_2: t^2 - 2 has root valuation 1/2, t^2 + t + 1 valuation 0,
        // t - 8 valuation 3. The quadratics are irreducible over Q.
        let a = Polynomial::from_ints(&[-2, 0, 1]);
        let b = Polynomial::from_ints(&[1, 1, 1]);
        let c = Polynomial::from_ints(&[-8, 1]);
        let f = a.mul(&b).mul(&c);
        let fs = slope_factorization(&f, &ctx(2, 32)).unwrap();
        let vals: Vec<Valuation> = fs.iter().map(|s| s.root_valuation).collect();
        assert_eq!(vals, vec![Valuation::int(3), Valuation::frac(1, 2), Valuation::int(0)]);
        assert_eq!(fs[0].factor, c);
        assert_eq!(fs[1].factor, a);
        assert_eq!(fs[2].factor, b);
    }

    #[test]
    fn genuinely_p_adic_split() {
        // t^2 - t + 2 is irreducible over Q but splits over Q_2 into roots of
        // valuation 0 and 1.
        let f = Polynomial::from_ints(&[2, -1, 1]);
        let c = ctx(2, 40);
        let fs = slope_factorization(&f, &c).unwrap();
        assert_eq!(fs.len(), 2);
        assert!(!fs[0].is_exact());
        let prod = fs[0].factor.mul(&fs[1].factor);
        for x in f.sub(&prod).coeffs() {
            assert!(x.valuation_bound(c.p).is_none_or(|v| v >= 40));
        }
        // the valuation-1 root is a 2-adic root of f
        let r = fs[0].factor.coeff(0);
        assert_eq!(r.valuation(c.p), Some(1));
    }
}
