//! Polynomial self-maps of `Q_p^d` near a fixed point: Taylor shifts,
//! jacobians, Lipschitz bounds for the nonlinear remainder, certified
//! invariant balls, the fixed-point classifier and stable-set membership.

mod ball;
mod classify;
mod membership;

pub use ball::{
    invariant_ball, linearization_radius, remainder_lipschitz, BallCertificate, BallMode, BallSummary,
};
pub use classify::{class_from_spectrum, classify_fixed_point, FixedPointClass, FixedPointReport};
pub use membership::{orbit, stable_membership, MembershipVerdict, StableSet, Verdict, DEFAULT_HORIZON};

use crate::error::{Error, Result};
use crate::field::{parse_rational, Prime, Scalar};
use crate::polyalg::{MPoly, Matrix, Monomial};

/// `F = (F_1, ..., F_d)` with each `F_i` a polynomial in `d` variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMap {
    components: Vec<MPoly>,
}

impl PolyMap {
    pub fn new(components: Vec<MPoly>) -> Result<Self> {
        let d = components.len();
        if let Some(c) = components.iter().find(|c| c.nvars() != d) {
            return Err(Error::DimensionMismatch(format!(
                "component in {} variables for a map of dimension {d}",
                c.nvars()
            )));
        }
        Ok(PolyMap { components })
    }

    /// Builds a map from `(exponents, rational literal)` pairs per component.
    pub fn parse(terms: &[&[(&[u32], &str)]]) -> Result<Self> {
        let d = terms.len();
        let comps = terms
            .iter()
            .map(|ts| {
                let parsed = ts
                    .iter()
                    .map(|(m, c)| Ok((m.to_vec(), Scalar::Exact(parse_rational(c)?))))
                    .collect::<Result<Vec<(Monomial, Scalar)>>>()?;
                MPoly::from_terms(d, parsed)
            })
            .collect::<Result<Vec<_>>>()?;
        PolyMap::new(comps)
    }

    /// The linear map `x -> M x`.
    pub fn linear(m: &Matrix) -> Self {
        PolyMap { components: (0..m.nrows()).map(|i| MPoly::linear(&m.row(i))).collect() }
    }

    pub fn identity(d: usize) -> Self {
        PolyMap::linear(&Matrix::identity(d))
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[MPoly] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &MPoly {
        &self.components[i]
    }

    pub fn is_exact(&self) -> bool {
        self.components.iter().all(MPoly::is_exact)
    }

    /// Largest total degree of a term (0 for the zero map).
    pub fn degree(&self) -> u32 {
        self.components.iter().filter_map(MPoly::degree).max().unwrap_or(0)
    }

    /// Every term has degree exactly one.
    pub fn is_linear(&self) -> bool {
        self.components.iter().all(|c| c.terms().keys().all(|m| m.iter().sum::<u32>() == 1))
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(MPoly::is_zero)
    }

    /// `F(0) = 0`.
    pub fn fixes_origin(&self) -> bool {
        self.components.iter().all(|c| c.homogeneous(0).vanishes())
    }

    pub fn eval(&self, x: &[Scalar]) -> Vec<Scalar> {
        self.components.iter().map(|c| c.eval(x)).collect()
    }

    pub fn jacobian_at(&self, x: &[Scalar]) -> Matrix {
        let d = self.dim();
        Matrix::from_fn(d, d, |i, j| self.components[i].derivative(j).eval(x))
    }

    /// `F'(0)`, read off the degree-one coefficients.
    pub fn linear_part(&self) -> Matrix {
        let d = self.dim();
        Matrix::from_fn(d, d, |i, j| {
            let mut m = vec![0; d];
            m[j] = 1;
            self.components[i].coeff(&m)
        })
    }

    /// Terms of degree at least two.
    pub fn nonlinear_part(&self) -> PolyMap {
        self.map_components(|c| c.filter_degree(|k| k >= 2))
    }

    pub fn homogeneous(&self, k: u32) -> PolyMap {
        self.map_components(|c| c.homogeneous(k))
    }

    pub fn truncate(&self, k: u32) -> PolyMap {
        self.map_components(|c| c.truncate(k))
    }

    pub fn add(&self, other: &PolyMap) -> PolyMap {
        PolyMap { components: self.components.iter().zip(&other.components).map(|(a, b)| a.add(b)).collect() }
    }

    pub fn sub(&self, other: &PolyMap) -> PolyMap {
        PolyMap { components: self.components.iter().zip(&other.components).map(|(a, b)| a.sub(b)).collect() }
    }

    /// `self o inner`, dropping terms above `max_deg`.
    pub fn compose(&self, inner: &PolyMap, max_deg: Option<u32>) -> PolyMap {
        self.map_components(|c| c.compose(&inner.components, max_deg))
    }

    /// `M o F`.
    pub fn left_multiply(&self, m: &Matrix) -> PolyMap {
        let d = self.dim();
        let comps = (0..m.nrows())
            .map(|i| {
                (0..m.ncols()).fold(MPoly::zero(d), |acc, j| acc.add(&self.components[j].scale(m.get(i, j))))
            })
            .collect();
        PolyMap { components: comps }
    }

    /// `T^-1 o F o T`: the map in the coordinates `z` with `x = T z`.
    pub fn conjugate(&self, t: &Matrix, t_inv: &Matrix) -> PolyMap {
        let lin: Vec<MPoly> = (0..t.nrows()).map(|i| MPoly::linear(&t.row(i))).collect();
        let inner = PolyMap { components: lin };
        self.compose(&inner, None).left_multiply(t_inv)
    }

    pub fn to_approx(&self, p: Prime, prec: u32) -> PolyMap {
        self.map_components(|c| c.to_approx(p, prec))
    }

    fn map_components(&self, f: impl Fn(&MPoly) -> MPoly) -> PolyMap {
        PolyMap { components: self.components.iter().map(f).collect() }
    }
}

/// `G(u) = F(p + u) - p`, so that `G(0) = 0` when `F(p) = p`.
pub fn shift_to_fixed_point(f: &PolyMap, point: &[Scalar]) -> Result<PolyMap> {
    let d = f.dim();
    if point.len() != d {
        return Err(Error::DimensionMismatch("fixed point has the wrong dimension".into()));
    }
    let image = f.eval(point);
    if image.iter().zip(point).any(|(y, x)| !(y - x).is_certainly_zero()) {
        return Err(Error::NotAFixedPoint);
    }
    let inner = PolyMap {
        components: (0..d).map(|i| MPoly::var(d, i).add(&MPoly::constant(d, point[i].clone()))).collect(),
    };
    let shifted = f.compose(&inner, None);
    let comps = shifted
        .components
        .iter()
        .zip(point)
        .map(|(c, x)| c.sub(&MPoly::constant(d, x.clone())))
        .collect();
    Ok(PolyMap { components: comps })
}

/// Exact matrix of partial derivatives at `point`.
pub fn jacobian(f: &PolyMap, point: &[Scalar]) -> Matrix {
    f.jacobian_at(point)
}
