//! Truncated power-series graphs of local invariant manifolds.
//!
//! In coordinates `z = (u, w)` adapted to a splitting `base + complement`,
//! the manifold is the graph `w = h(u)` with `h` of degree `2..=M`, solving
//! `h(F_b(u, h(u))) = F_c(u, h(u))` degree by degree. At degree `k` the
//! unknown enters through `X -> X o A_b - A_c X`, which is invertible when
//! the spectra of the blocks are separated.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dynamics::PolyMap;
use crate::error::{Error, Result};
use crate::field::{Context, Prime, Scalar, Threshold, Valuation};
use crate::polyalg::{monomials_of_degree, MPoly, Matrix, Monomial};
use crate::spectral::{canonical_basis, splitting_at};

/// Default truncation order.
pub const DEFAULT_ORDER: u32 = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphMode {
    /// Graph over `E_{a,s}`; needs `a` hyperbolic.
    Stable,
    /// Graph over `E_{a,cs}`.
    CentreStable,
    /// Graph over `E_{a,c}`; needs an invertible jacobian.
    Centre,
    /// Graph over `E_{a,u}`, from the stable graph of the formal inverse at
    /// `1/a`; needs `a` hyperbolic and `a >= 1`.
    Unstable,
}

impl std::str::FromStr for GraphMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "stable" => Ok(GraphMode::Stable),
            "centrestable" | "centerstable" => Ok(GraphMode::CentreStable),
            "centre" | "center" => Ok(GraphMode::Centre),
            "unstable" => Ok(GraphMode::Unstable),
            _ => Err(Error::Parse(format!("unknown graph mode {s:?}"))),
        }
    }
}

/// `G` with `G o F = id` modulo terms of degree `order + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InverseSeries {
    pub map: PolyMap,
    pub order: u32,
}

pub fn formal_inverse(f: &PolyMap, order: u32, ctx: &Context) -> Result<InverseSeries> {
    if !f.fixes_origin() {
        return Err(Error::precondition("the map must fix the origin"));
    }
    let a_inv = f.linear_part().inverse(ctx).map_err(|e| match e {
        Error::SingularMatrix => Error::JacobianSingular,
        other => other,
    })?;
    let lin_inv = PolyMap::linear(&a_inv);
    let mut g = lin_inv.clone();
    // running G o F through degree `order`
    let mut gf = lin_inv.compose(f, Some(order));
    for k in 2..=order {
        // (G o F)_k = G_k(A x) + E_k, so G_k(y) = -E_k(A^-1 y)
        let e = gf.homogeneous(k);
        if e.is_zero() {
            continue;
        }
        let gk = e.compose(&lin_inv, Some(k));
        gf = gf.sub(&gk.compose(f, Some(order)));
        g = g.sub(&gk);
    }
    Ok(InverseSeries { map: g, order })
}

/// `w = h(u)`, with `h` given by one polynomial per complement coordinate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphSeries {
    pub mode: GraphMode,
    pub threshold: Threshold,
    pub order: u32,
    pub base: Vec<Vec<Scalar>>,
    pub complement: Vec<Vec<Scalar>>,
    pub h: Vec<MPoly>,
}

impl GraphSeries {
    pub fn base_dim(&self) -> usize {
        self.base.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.base.len() + self.complement.len()
    }

    /// Columns `[base | complement]`.
    pub fn change_of_basis(&self) -> Matrix {
        let cols: Vec<Vec<Scalar>> = self.base.iter().chain(&self.complement).cloned().collect();
        Matrix::from_columns(&cols, self.ambient_dim())
    }

    /// Complement-valued coefficient of `u^m`.
    pub fn coefficient(&self, m: &[u32]) -> Vec<Scalar> {
        self.h.iter().map(|p| p.coeff(m)).collect()
    }

    /// Nonzero coefficients by multi-index.
    pub fn terms(&self) -> BTreeMap<Monomial, Vec<Scalar>> {
        let mut out = BTreeMap::new();
        for p in &self.h {
            for m in p.terms().keys() {
                out.entry(m.clone()).or_insert_with(|| self.coefficient(m));
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.h.iter().all(MPoly::is_zero)
    }

    pub fn eval(&self, u: &[Scalar]) -> Vec<Scalar> {
        self.h.iter().map(|p| p.eval(u)).collect()
    }

    /// The ambient point `B u + C h(u)`.
    pub fn point(&self, u: &[Scalar]) -> Vec<Scalar> {
        let mut z = u.to_vec();
        z.extend(self.eval(u));
        self.change_of_basis().mul_vec(&z)
    }

    pub fn summary(&self) -> GraphSummary {
        let strs = |v: &[Scalar]| v.iter().map(ToString::to_string).collect::<Vec<_>>();
        GraphSummary {
            mode: self.mode,
            a: self.threshold.to_string(),
            order: self.order,
            base_basis: self.base.iter().map(|v| strs(v)).collect(),
            complement_basis: self.complement.iter().map(|v| strs(v)).collect(),
            coefficients: self
                .terms()
                .into_iter()
                .map(|(m, v)| GraphTerm { multi_index: m, vector: strs(&v) })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphTerm {
    pub multi_index: Vec<u32>,
    pub vector: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphSummary {
    pub mode: GraphMode,
    pub a: String,
    pub order: u32,
    pub base_basis: Vec<Vec<String>>,
    pub complement_basis: Vec<Vec<String>>,
    pub coefficients: Vec<GraphTerm>,
}

/// The map in graph coordinates and the block sizes.
struct Frame {
    map: PolyMap,
    b: usize,
}

impl Frame {
    fn new(f: &PolyMap, base: &[Vec<Scalar>], complement: &[Vec<Scalar>], ctx: &Context) -> Result<Frame> {
        let d = f.dim();
        let cols: Vec<Vec<Scalar>> = base.iter().chain(complement).cloned().collect();
        if cols.len() != d {
            return Err(Error::DimensionMismatch("base and complement do not span the space".into()));
        }
        let t = Matrix::from_columns(&cols, d);
        let t_inv = t.inverse(ctx)?;
        Ok(Frame { map: f.conjugate(&t, &t_inv), b: base.len() })
    }

    fn d(&self) -> usize {
        self.map.dim()
    }

    /// `(u, h(u))` as polynomials in the base variables.
    fn graph_subs(&self, h: &[MPoly]) -> Vec<MPoly> {
        let mut subs: Vec<MPoly> = (0..self.b).map(|i| MPoly::var(self.b, i)).collect();
        subs.extend(h.iter().cloned());
        subs
    }

    /// `F_b(u, h(u))`.
    fn reduced(&self, h: &[MPoly], max_deg: Option<u32>) -> Vec<MPoly> {
        let subs = self.graph_subs(h);
        (0..self.b).map(|i| self.map.component(i).compose(&subs, max_deg)).collect()
    }

    /// `h(F_b(u, h(u))) - F_c(u, h(u))`.
    fn residual(&self, h: &[MPoly], max_deg: Option<u32>) -> Vec<MPoly> {
        let subs = self.graph_subs(h);
        let fb = self.reduced(h, max_deg);
        (self.b..self.d())
            .map(|j| {
                let lhs = h[j - self.b].compose(&fb, max_deg);
                let rhs = self.map.component(j).compose(&subs, max_deg);
                lhs.sub(&rhs)
            })
            .collect()
    }

    fn solve(&self, order: u32, ctx: &Context) -> Result<Vec<MPoly>> {
        let (b, d) = (self.b, self.d());
        let c = d - b;
        let mut h = vec![MPoly::zero(b); c];
        if b == 0 || c == 0 {
            return Ok(h);
        }
        let a = self.map.linear_part();
        let lin_b: Vec<MPoly> = (0..b).map(|i| MPoly::linear(&a.row(i)[..b])).collect();
        for k in 2..=order {
            let e: Vec<MPoly> = self.residual(&h, Some(k)).iter().map(|r| r.homogeneous(k)).collect();
            if e.iter().all(MPoly::is_zero) {
                continue;
            }
            let monos = monomials_of_degree(b, k);
            let n = monos.len();
            let index: BTreeMap<&Monomial, usize> = monos.iter().enumerate().map(|(i, m)| (m, i)).collect();
            let mut l = Matrix::zeros(c * n, c * n);
            for i in 0..c {
                for (mi, m) in monos.iter().enumerate() {
                    let col = i * n + mi;
                    // e_i u^m o A_b
                    let image = MPoly::monomial(b, m.clone(), Scalar::one()).compose(&lin_b, Some(k));
                    for (m2, x) in image.terms() {
                        let row = i * n + index[m2];
                        l.set(row, col, l.get(row, col) + x);
                    }
                    // - A_c e_i u^m
                    for i2 in 0..c {
                        let row = i2 * n + mi;
                        l.set(row, col, l.get(row, col) - a.get(b + i2, b + i));
                    }
                }
            }
            let rhs = Matrix::from_fn(c * n, 1, |r, _| -e[r / n].coeff(&monos[r % n]));
            let x = l.solve(ctx, &rhs).map_err(|err| match err {
                Error::SingularMatrix => Error::ResonanceDetected(k as usize),
                other => other,
            })?;
            for (i, hi) in h.iter_mut().enumerate() {
                for (mi, m) in monos.iter().enumerate() {
                    hi.add_term(m.clone(), x.get(i * n + mi, 0).clone());
                }
            }
        }
        Ok(h)
    }
}

/// Base and complement for a mode, and the map whose invariance equation is solved.
fn mode_setup(
    f: &PolyMap,
    a: &Threshold,
    mode: GraphMode,
    order: u32,
    checked: bool,
    ctx: &Context,
) -> Result<(Vec<Vec<Scalar>>, Vec<Vec<Scalar>>, PolyMap)> {
    if !f.fixes_origin() {
        return Err(Error::precondition("the map must fix the origin"));
    }
    let d = f.dim();
    let split = splitting_at(&f.linear_part(), a, ctx)?;
    let hyperbolic = |what: &str| {
        if split.is_hyperbolic() {
            Ok(())
        } else {
            Err(Error::precondition(format!("{what} graph needs a threshold off the spectrum, {a} is on it")))
        }
    };
    let canon = |v: Vec<Vec<Scalar>>| canonical_basis(&v, d, ctx);
    let (base, comp, map) = match mode {
        GraphMode::Stable => {
            hyperbolic("stable")?;
            (split.stable.clone(), split.unstable.clone(), f.clone())
        }
        GraphMode::CentreStable => (split.centre_stable(), split.unstable.clone(), f.clone()),
        GraphMode::Centre => {
            if split.decomposition.spectrum.has_zero() {
                return Err(Error::precondition("centre graph needs an invertible jacobian"));
            }
            let comp: Vec<Vec<Scalar>> = split.stable.iter().chain(&split.unstable).cloned().collect();
            (split.centre.clone(), comp, f.clone())
        }
        GraphMode::Unstable => {
            hyperbolic("unstable")?;
            if checked && a.value() < Threshold::one().value() {
                return Err(Error::precondition("unstable graph needs a >= 1"));
            }
            let g = formal_inverse(f, order, ctx)?;
            (split.unstable.clone(), split.stable.clone(), g.map)
        }
    };
    Ok((canon(base)?, canon(comp)?, map))
}

/// Truncated graph of the local invariant manifold of the given mode.
pub fn graph_series(f: &PolyMap, a: &Threshold, mode: GraphMode, order: u32, ctx: &Context) -> Result<GraphSeries> {
    build_graph(f, a, mode, order, true, ctx)
}

/// As [`graph_series`], without the `a >= 1` requirement of the unstable
/// mode. The result is only meaningful once its invariance is checked.
pub(crate) fn graph_series_unchecked(
    f: &PolyMap,
    a: &Threshold,
    mode: GraphMode,
    order: u32,
    ctx: &Context,
) -> Result<GraphSeries> {
    build_graph(f, a, mode, order, false, ctx)
}

fn build_graph(
    f: &PolyMap,
    a: &Threshold,
    mode: GraphMode,
    order: u32,
    checked: bool,
    ctx: &Context,
) -> Result<GraphSeries> {
    let (base, complement, map) = mode_setup(f, a, mode, order, checked, ctx)?;
    let frame = Frame::new(&map, &base, &complement, ctx)?;
    let h = frame.solve(order, ctx)?;
    Ok(GraphSeries { mode, threshold: a.clone(), order, base, complement, h })
}

/// `h(F_b(u, h(u))) - F_c(u, h(u))` through degree `order`, for the map the
/// mode solves (the formal inverse in `Unstable` mode).
pub fn residual(f: &PolyMap, graph: &GraphSeries, ctx: &Context) -> Result<Vec<MPoly>> {
    let map = match graph.mode {
        GraphMode::Unstable => formal_inverse(f, graph.order, ctx)?.map,
        _ => f.clone(),
    };
    let frame = Frame::new(&map, &graph.base, &graph.complement, ctx)?;
    Ok(frame.residual(&graph.h, Some(graph.order)))
}

/// Whether `F` maps the graph into itself exactly, with no truncation.
pub fn is_invariant_graph(f: &PolyMap, graph: &GraphSeries, ctx: &Context) -> Result<bool> {
    if !f.is_exact() || graph.h.iter().any(|p| !p.is_exact()) {
        return Ok(false);
    }
    let frame = Frame::new(f, &graph.base, &graph.complement, ctx)?;
    // low-degree terms settle most cases before the full composition
    if !frame.residual(&graph.h, Some(graph.order + 2)).iter().all(MPoly::is_zero) {
        return Ok(false);
    }
    Ok(frame.residual(&graph.h, None).iter().all(MPoly::is_zero))
}

/// `u -> F_b(u, h(u))`, the map induced on the base coordinates.
pub fn reduced_map(f: &PolyMap, graph: &GraphSeries, ctx: &Context) -> Result<PolyMap> {
    let frame = Frame::new(f, &graph.base, &graph.complement, ctx)?;
    PolyMap::new(frame.reduced(&graph.h, None))
}

/// Splits `x` into base and complement coordinates.
pub fn graph_coordinates(graph: &GraphSeries, x: &[Scalar], ctx: &Context) -> Result<(Vec<Scalar>, Vec<Scalar>)> {
    let t = graph.change_of_basis();
    let z = t.solve(ctx, &Matrix::from_columns(&[x.to_vec()], x.len()))?.column(0);
    let (u, w) = z.split_at(graph.base_dim());
    Ok((u.to_vec(), w.to_vec()))
}

/// Least valuation among the coefficients of a residual; `+inf` when it vanishes exactly.
pub fn residual_valuation(res: &[MPoly], p: Prime) -> Valuation {
    res.iter()
        .flat_map(|r| r.terms().values())
        .filter_map(|c| c.valuation_bound(p))
        .map(Valuation::int)
        .min()
        .unwrap_or(Valuation::Infinite)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Prime;

    fn ctx() -> Context {
        Context::new(Prime::new(2).unwrap())
    }

    fn benchmark() -> PolyMap {
        PolyMap::parse(&[&[(&[1, 0], "2")], &[(&[0, 1], "1/2"), (&[2, 0], "1")]]).unwrap()
    }

    fn q(s: &str) -> Scalar {
        Scalar::Exact(crate::field::parse_rational(s).unwrap())
    }

    #[test]
    fn inverse_examples() {
        let c = ctx();
        let f = PolyMap::parse(&[&[(&[1], "2"), (&[2], "1")]]).unwrap();
        let g = formal_inverse(&f, 3, &c).unwrap();
        assert_eq!(g.map, PolyMap::parse(&[&[(&[1], "1/2"), (&[2], "-1/8"), (&[3], "1/16")]]).unwrap());
        let lin = PolyMap::linear(&Matrix::from_ints(&[&[1, 2], &[0, 4]]));
        let g = formal_inverse(&lin, 4, &c).unwrap();
        assert_eq!(g.map, PolyMap::linear(&Matrix::parse(&[&["1", "-1/2"], &["0", "1/4"]]).unwrap()));
        let g = formal_inverse(&benchmark(), 2, &c).unwrap();
        assert_eq!(g.map, PolyMap::parse(&[&[(&[1, 0], "1/2")], &[(&[0, 1], "2"), (&[2, 0], "-1/2")]]).unwrap());
    }

    #[test]
    fn benchmark_stable_graph() {
        let c = ctx();
        let h = graph_series(&benchmark(), &Threshold::one(), GraphMode::Stable, 6, &c).unwrap();
        assert_eq!(h.base, vec![vec![Scalar::one(), Scalar::zero()]]);
        let terms = h.terms();
        assert_eq!(terms.len(), 1);
        assert_eq!(terms[&vec![2]], vec![q("2/7")]);
        assert!(residual(&benchmark(), &h, &c).unwrap().iter().all(MPoly::is_zero));
        assert!(is_invariant_graph(&benchmark(), &h, &c).unwrap());
    }

    #[test]
    fn benchmark_unstable_graph() {
        let c = ctx();
        let h = graph_series(&benchmark(), &Threshold::one(), GraphMode::Unstable, 4, &c).unwrap();
        assert_eq!(h.base, vec![vec![Scalar::zero(), Scalar::one()]]);
        assert!(h.is_zero());
        let g = formal_inverse(&benchmark(), 4, &c).unwrap().map;
        let hs = graph_series(&g, &Threshold::one(), GraphMode::Stable, 4, &c).unwrap();
        assert_eq!(hs.h, h.h);
    }

    #[test]
    fn residual_examples() {
        let c = ctx();
        let mut h = graph_series(&benchmark(), &Threshold::one(), GraphMode::Stable, 6, &c).unwrap();
        let saved = h.h.clone();
        h.h = vec![MPoly::zero(1)];
        let r = residual(&benchmark(), &h, &c).unwrap();
        assert_eq!(r[0], MPoly::monomial(1, vec![2], q("-1")));
        h.h = saved;
        h.h[0].add_term(vec![2], Scalar::one());
        let r = residual(&benchmark(), &h, &c).unwrap();
        assert_eq!(r[0].coeff(&[2]), q("7/2"));
    }

    #[test]
    fn linear_maps_have_flat_graphs() {
        let c = ctx();
        let lin = PolyMap::linear(&Matrix::parse(&[&["2", "1"], &["0", "1/2"]]).unwrap());
        for mode in [GraphMode::Stable, GraphMode::CentreStable, GraphMode::Unstable] {
            assert!(graph_series(&lin, &Threshold::one(), mode, 5, &c).unwrap().is_zero());
        }
    }

    #[test]
    fn centre_manifold() {
        // x -> x + y^2 (neutral), y -> 2y + x^2: h(x + h^2) = 2h + x^2 gives h_2 = -1
        let c = ctx();
        let f = PolyMap::parse(&[&[(&[1, 0], "1"), (&[0, 2], "1")], &[(&[0, 1], "2"), (&[2, 0], "1")]]).unwrap();
        let h = graph_series(&f, &Threshold::one(), GraphMode::Centre, 4, &c).unwrap();
        assert!(residual(&f, &h, &c).unwrap().iter().all(MPoly::is_zero));
        assert_eq!(h.coefficient(&[2]), vec![Scalar::from_int(-1)]);
    }

    #[test]
    fn preconditions() {
        let c = ctx();
        let f = benchmark();
        let half = Threshold::from_ratio(1, 2).unwrap();
        assert!(matches!(
            graph_series(&f, &half, GraphMode::Stable, 4, &c),
            Err(Error::PreconditionViolated(_))
        ));
        assert!(matches!(
            graph_series(&f, &Threshold::from_ratio(1, 4).unwrap(), GraphMode::Unstable, 4, &c),
            Err(Error::PreconditionViolated(_))
        ));
    }
}
