//! Lipschitz bounds for the nonlinear remainder and certified balls.
//!
//! All radii are `r = p^-k` and all norms are weighted max norms, so every
//! bound is a valuation and every inequality is decided exactly.

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::PolyMap;
use crate::error::{Error, Result};
use crate::field::{Context, Magnitude, Prime, Scalar, Val, Valuation};
use crate::polyalg::{total_degree, Matrix};
use crate::spectral::{operator_norm, AdaptedNorm};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BallMode {
    /// `||F(x)|| <= ||x||`, so `F(B_r)` lies in `B_r`.
    Invariant,
    /// `||F(x)|| = ||x||`.
    Isometric,
    /// `||F(x)|| <= c ||x||` with `c < 1`.
    Contracting,
}

/// A ball `B_r` in a given norm together with the bounds that certify the
/// mode's inequality on all of it.
#[derive(Clone, Debug)]
pub struct BallCertificate {
    pub mode: BallMode,
    /// `k` with `r = p^-k`.
    pub radius_exponent: i64,
    /// `-log_p ||F'(0)||`.
    pub operator_valuation: Valuation,
    /// `-log_p` of the remainder's Lipschitz bound on `B_r`.
    pub lipschitz_valuation: Valuation,
    /// `-log_p c` with `||F(x)|| <= c ||x||` on `B_r`.
    pub contraction_valuation: Valuation,
    pub norm: AdaptedNorm,
}

impl BallCertificate {
    pub fn radius(&self, p: Prime) -> BigRational {
        p.rational_pow(-self.radius_exponent)
    }

    pub fn contraction(&self) -> Magnitude {
        Magnitude::from_valuation(self.contraction_valuation)
    }

    pub fn contains(&self, x: &[Scalar], ctx: &Context) -> Result<bool> {
        Ok(self.norm.norm_valuation(x, ctx)? >= Valuation::int(self.radius_exponent))
    }

    pub fn summary(&self, p: Prime) -> BallSummary {
        BallSummary {
            mode: self.mode,
            radius: crate::field::format_rational(&self.radius(p)),
            radius_exponent: self.radius_exponent,
            operator_valuation: self.operator_valuation,
            lipschitz_valuation: self.lipschitz_valuation,
            contraction_valuation: self.contraction_valuation,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallSummary {
    pub mode: BallMode,
    pub radius: String,
    pub radius_exponent: i64,
    pub operator_valuation: Valuation,
    pub lipschitz_valuation: Valuation,
    pub contraction_valuation: Valuation,
}

/// Per-monomial data `(base, |m| - 1)`: the monomial contributes
/// `base + (|m| - 1) k` to the Lipschitz valuation on `B_{p^-k}`.
#[derive(Clone, Debug)]
pub(crate) struct LipschitzProfile {
    terms: Vec<(Val, i64)>,
}

impl LipschitzProfile {
    /// With weights `q`, `||x|| <= p^-k` bounds `v(z_l) >= k - q_l`, and
    /// `c z^m` in component `i` changes by at most
    /// `p^-(q_i + v(c) + (|m|-1)k - sum q_l m_l) ||x - y||`.
    pub(crate) fn new(f: &PolyMap, norm: &AdaptedNorm, ctx: &Context) -> Result<Self> {
        if !f.fixes_origin() {
            return Err(Error::precondition("the map must fix the origin"));
        }
        let g = f.conjugate(norm.basis(), norm.inverse());
        let q = norm.weights();
        let mut terms = Vec::new();
        for (i, comp) in g.components().iter().enumerate() {
            for (m, c) in comp.terms() {
                let deg = total_degree(m);
                if deg < 2 {
                    continue;
                }
                let Some(vc) = c.valuation_bound(ctx.p) else { continue };
                let weight: Val = m.iter().zip(q).map(|(&e, ql)| *ql * Val::from_integer(e as i64)).sum();
                terms.push((q[i] + Val::from_integer(vc) - weight, deg as i64 - 1));
            }
        }
        Ok(LipschitzProfile { terms })
    }

    pub(crate) fn at(&self, k: i64) -> Valuation {
        self.terms
            .iter()
            .map(|(b, e)| Valuation::Finite(*b + Val::from_integer(e * k)))
            .min()
            .unwrap_or(Valuation::Infinite)
    }

    /// Smallest `k` in `0..=max_k` whose bound passes `accept`.
    pub(crate) fn search(&self, max_k: i64, accept: impl Fn(Valuation) -> bool) -> Option<(i64, Valuation)> {
        (0..=max_k).map(|k| (k, self.at(k))).find(|(_, v)| accept(*v))
    }
}

/// Upper bound for `Lip(R|B_r)`, `R = F - F'(0)`, `r = p^-k`, as a valuation.
pub fn remainder_lipschitz(f: &PolyMap, k: i64, norm: &AdaptedNorm, ctx: &Context) -> Result<Valuation> {
    Ok(LipschitzProfile::new(f, norm, ctx)?.at(k))
}

/// Smallest `k` (largest radius `p^-k`) with `Lip(R|B_r) < 1 / ||F'(0)^-1||`.
pub fn linearization_radius(f: &PolyMap, norm: &AdaptedNorm, ctx: &Context) -> Result<i64> {
    let a = f.linear_part();
    let a_inv = inverse_jacobian(&a, ctx)?;
    let inv_norm = operator_norm(&a_inv, norm, norm, ctx)?.valuation();
    let Valuation::Finite(vi) = inv_norm else {
        return Err(Error::JacobianSingular);
    };
    let profile = LipschitzProfile::new(f, norm, ctx)?;
    let max_k = ctx.settings.max_radius_exponent;
    profile
        .search(max_k, |lip| lip > Valuation::Finite(-vi))
        .map(|(k, _)| k)
        .ok_or(Error::RadiusNotFound(max_k))
}

pub(crate) fn inverse_jacobian(a: &Matrix, ctx: &Context) -> Result<Matrix> {
    a.inverse(ctx).map_err(|e| match e {
        Error::SingularMatrix => Error::JacobianSingular,
        other => other,
    })
}

/// A ball on which the mode's inequality holds for every point.
///
/// Writing `F = A + R` with `||R(x)|| <= Lip ||x||` on `B_r`:
/// `Invariant` needs `||A|| <= 1` and `Lip <= 1`; `Isometric` needs `A` to be
/// an isometry and `Lip < 1`, so `||F(x)|| = ||Ax||` by the dominated-sum law;
/// `Contracting` needs `||A|| < 1` and `Lip < 1`, with `c = max(||A||, Lip)`.
pub fn invariant_ball(f: &PolyMap, mode: BallMode, norm: &AdaptedNorm, ctx: &Context) -> Result<BallCertificate> {
    let a = f.linear_part();
    let va = operator_norm(&a, norm, norm, ctx)?.valuation();
    let zero = Valuation::int(0);
    let strict: fn(Valuation) -> bool = |v| v > Valuation::int(0);
    let accept: fn(Valuation) -> bool = match mode {
        BallMode::Invariant => {
            if va < zero {
                return Err(Error::precondition("||F'(0)|| > 1 in the given norm"));
            }
            |v| v >= Valuation::int(0)
        }
        BallMode::Isometric => {
            let inv = inverse_jacobian(&a, ctx)?;
            let vinv = operator_norm(&inv, norm, norm, ctx)?.valuation();
            if va != zero || vinv != zero {
                return Err(Error::precondition("F'(0) is not an isometry of the given norm"));
            }
            strict
        }
        BallMode::Contracting => {
            if va <= zero {
                return Err(Error::precondition("||F'(0)|| is not below 1 in the given norm"));
            }
            strict
        }
    };
    let profile = LipschitzProfile::new(f, norm, ctx)?;
    let max_k = ctx.settings.max_radius_exponent;
    let (k, lip) = profile.search(max_k, accept).ok_or(Error::RadiusNotFound(max_k))?;
    let contraction = match mode {
        BallMode::Isometric => zero,
        _ => va.min(lip),
    };
    Ok(BallCertificate {
        mode,
        radius_exponent: k,
        operator_valuation: va,
        lipschitz_valuation: lip,
        contraction_valuation: contraction,
        norm: norm.clone(),
    })
}

/// A contracting ball whose rate `c = max(||A||, Lip)` satisfies `accept`.
pub(crate) fn contracting_ball_with(
    f: &PolyMap,
    norm: &AdaptedNorm,
    ctx: &Context,
    accept: impl Fn(Valuation) -> bool,
) -> Result<Option<BallCertificate>> {
    let a = f.linear_part();
    let va = operator_norm(&a, norm, norm, ctx)?.valuation();
    if !accept(va) {
        return Ok(None);
    }
    let profile = LipschitzProfile::new(f, norm, ctx)?;
    let found = profile.search(ctx.settings.max_radius_exponent, accept);
    Ok(found.map(|(k, lip)| BallCertificate {
        mode: BallMode::Contracting,
        radius_exponent: k,
        operator_valuation: va,
        lipschitz_valuation: lip,
        contraction_valuation: va.min(lip),
        norm: norm.clone(),
    }))
}
