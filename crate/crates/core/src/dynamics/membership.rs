//! Orbits and membership in the `a`-stable set `{x : a^-n ||f^n(x)|| -> 0}`.
//!
//! Verdicts are certified only when a finite inequality chain proves the
//! limit. The rules, tried in order:
//!
//! - linear maps: membership is membership in `E_{a,s}`;
//! - the orbit hits the fixed point exactly;
//! - the whole spectrum lies below `a` and the orbit enters a ball where
//!   `||F(y)|| <= c ||y||` with `c < a`;
//! - the orbit lies on an exactly invariant stable graph (for `a <= 1`) or
//!   unstable graph, and the induced map on it is settled by the rules above;
//! - in dimension one, the orbit enters a region where the top-degree term
//!   dominates and norms grow super-exponentially.
//!
//! Otherwise the verdict is read off the observed decay rate of the tail.

use std::cell::OnceCell;
use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::ball::contracting_ball_with;
use super::PolyMap;
use crate::error::{Error, Result};
use crate::field::{compare_threshold, Context, Magnitude, Scalar, Threshold, Val, Valuation};
use crate::manifolds::{graph_coordinates, is_invariant_graph, reduced_map, GraphMode, GraphSeries, DEFAULT_ORDER};
use crate::polyalg::min_valuation;
use crate::spectral::{adapted_norm, adapted_norm_from, decompose, splitting_from, AdaptedNorm, Side};

/// Default number of iterates examined.
pub const DEFAULT_HORIZON: usize = 64;

/// Exact iteration switches to p-adic arithmetic beyond this many bits per coordinate.
const EXACT_BITS: u64 = 2048;

/// Orbits stop once a valuation leaves `[-CAP, CAP]`.
const VALUATION_CAP: i64 = 1 << 20;

/// Iterates tested for lying on an invariant graph.
const GRAPH_PROBES: usize = 8;

/// Shortest tail from which a decay rate is estimated.
const MIN_TAIL: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    CertifiedMember,
    CertifiedNonMember,
    HeuristicMember,
    HeuristicNonMember,
    Undecided,
}

impl Verdict {
    pub fn is_member(self) -> Option<bool> {
        match self {
            Verdict::CertifiedMember | Verdict::HeuristicMember => Some(true),
            Verdict::CertifiedNonMember | Verdict::HeuristicNonMember => Some(false),
            Verdict::Undecided => None,
        }
    }

    pub fn is_certified(self) -> bool {
        matches!(self, Verdict::CertifiedMember | Verdict::CertifiedNonMember)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MembershipVerdict {
    pub verdict: Verdict,
    /// `-log_p ||f^n(x)||` in the max norm, for the iterates computed.
    pub trace: Vec<Valuation>,
    pub justification: Vec<String>,
}

fn bits(x: &Scalar) -> u64 {
    match x {
        Scalar::Exact(q) => q.numer().bits() + q.denom().bits(),
        Scalar::Approx(_) => 0,
    }
}

/// One step, exact while coordinates stay small and p-adic afterwards.
fn step(f: &PolyMap, f_approx: &PolyMap, x: &[Scalar], ctx: &Context) -> Vec<Scalar> {
    if x.iter().all(Scalar::is_exact) && x.iter().map(bits).max().unwrap_or(0) <= EXACT_BITS {
        f.eval(x)
    } else {
        let xa: Vec<Scalar> = x.iter().map(|c| c.to_approx(ctx.p, ctx.precision())).collect();
        f_approx.eval(&xa)
    }
}

/// `x, f(x), ..., f^n(x)` with their max norms. Arithmetic is exact while
/// the coordinates stay small and continues p-adically at working precision.
pub fn orbit(f: &PolyMap, x: &[Scalar], n: usize, ctx: &Context) -> Result<Vec<(Vec<Scalar>, Magnitude)>> {
    if x.len() != f.dim() {
        return Err(Error::DimensionMismatch("point has the wrong dimension".into()));
    }
    let f_approx = f.to_approx(ctx.p, ctx.precision());
    let mut out = Vec::with_capacity(n + 1);
    let mut cur = x.to_vec();
    for i in 0..=n {
        let norm = Magnitude::from_valuation(min_valuation(&cur, ctx)?);
        let next = if i < n { Some(step(f, &f_approx, &cur, ctx)) } else { None };
        out.push((cur, norm));
        match next {
            Some(nx) => cur = nx,
            None => break,
        }
    }
    Ok(out)
}

enum Stop {
    Horizon,
    HitZero(usize),
    Collapsed(usize),
    Escaped(usize),
    LostPrecision(usize),
}

struct Trace {
    points: Vec<Vec<Scalar>>,
    vals: Vec<Valuation>,
    stop: Stop,
}

fn trace_orbit(f: &PolyMap, x: &[Scalar], horizon: usize, ctx: &Context) -> Trace {
    let f_approx = f.to_approx(ctx.p, ctx.precision());
    let mut points = Vec::new();
    let mut vals = Vec::new();
    let mut cur = x.to_vec();
    for n in 0..=horizon {
        let v = match min_valuation(&cur, ctx) {
            Ok(v) => v,
            Err(_) => return Trace { points, vals, stop: Stop::LostPrecision(n) },
        };
        let low_precision = cur.iter().any(|c| c.is_certainly_nonzero() && c.rel_precision() < ctx.floor());
        points.push(cur.clone());
        vals.push(v);
        match v {
            Valuation::Infinite => return Trace { points, vals, stop: Stop::HitZero(n) },
            Valuation::Finite(q) if q > Val::from_integer(VALUATION_CAP) => {
                return Trace { points, vals, stop: Stop::Collapsed(n) }
            }
            Valuation::Finite(q) if q < Val::from_integer(-VALUATION_CAP) => {
                return Trace { points, vals, stop: Stop::Escaped(n) }
            }
            _ => {}
        }
        if low_precision {
            return Trace { points, vals, stop: Stop::LostPrecision(n) };
        }
        if n < horizon {
            cur = step(f, &f_approx, &cur, ctx);
        }
    }
    Trace { points, vals, stop: Stop::Horizon }
}

fn verdict(v: Verdict, trace: &Trace, why: Vec<String>) -> MembershipVerdict {
    MembershipVerdict { verdict: v, trace: trace.vals.clone(), justification: why }
}

fn default_epsilon(a: &Threshold, smallest: Option<Valuation>, ctx: &Context) -> Threshold {
    let eps = match smallest {
        Some(Valuation::Finite(v)) => Threshold::p_power(ctx.p, -v.ceil().to_integer()),
        _ => Threshold::one(),
    };
    if a.value() < eps.value() {
        a.clone()
    } else {
        eps
    }
}

fn below(a: &Threshold, v: Valuation, ctx: &Context) -> bool {
    compare_threshold(a, v, ctx.p) == Ordering::Greater
}

/// Decides whether `x` lies in the `a`-stable set of the fixed point 0.
pub fn stable_membership(
    f: &PolyMap,
    a: &Threshold,
    x: &[Scalar],
    horizon: usize,
    ctx: &Context,
) -> Result<MembershipVerdict> {
    StableSet::new(f, a, ctx)?.check(x, horizon)
}

/// The `a`-stable set of 0 for a fixed map, with the spectral data and
/// invariant graphs shared across queries.
pub struct StableSet<'m> {
    f: &'m PolyMap,
    a: Threshold,
    ctx: Context,
    a_mat: crate::polyalg::Matrix,
    dec: crate::spectral::SpectralDecomposition,
    norm: AdaptedNorm,
    split: crate::spectral::Splitting,
    stable: OnceCell<Option<Graph>>,
    unstable: OnceCell<Option<Graph>>,
}

struct Graph {
    series: GraphSeries,
    invariant: OnceCell<bool>,
    reduced: OnceCell<PolyMap>,
}

impl Graph {
    fn build(f: &PolyMap, a: &Threshold, mode: GraphMode, ctx: &Context) -> Result<Option<Graph>> {
        let built = match mode {
            GraphMode::Unstable => crate::manifolds::graph_series_unchecked(f, a, mode, DEFAULT_ORDER, ctx),
            _ => crate::manifolds::graph_series(f, a, mode, DEFAULT_ORDER, ctx),
        };
        match built {
            Ok(series) => Ok(Some(Graph { series, invariant: OnceCell::new(), reduced: OnceCell::new() })),
            Err(Error::ResonanceDetected(_)) => Ok(None),
            Err(e) => Err(e),
        }
    }

    fn invariant(&self, f: &PolyMap, ctx: &Context) -> Result<bool> {
        if let Some(&b) = self.invariant.get() {
            return Ok(b);
        }
        let b = is_invariant_graph(f, &self.series, ctx)?;
        Ok(*self.invariant.get_or_init(|| b))
    }

    fn reduced(&self, f: &PolyMap, ctx: &Context) -> Result<&PolyMap> {
        if self.reduced.get().is_none() {
            let g = reduced_map(f, &self.series, ctx)?;
            let _ = self.reduced.set(g);
        }
        Ok(self.reduced.get().expect("set above"))
    }
}

fn cached<'c>(
    cell: &'c OnceCell<Option<Graph>>,
    f: &PolyMap,
    a: &Threshold,
    mode: GraphMode,
    ctx: &Context,
) -> Result<Option<&'c Graph>> {
    if cell.get().is_none() {
        let g = Graph::build(f, a, mode, ctx)?;
        let _ = cell.set(g);
    }
    Ok(cell.get().and_then(Option::as_ref))
}

impl<'m> StableSet<'m> {
    pub fn new(f: &'m PolyMap, a: &Threshold, ctx: &Context) -> Result<Self> {
        if !f.fixes_origin() {
            return Err(Error::precondition("the map must fix the origin"));
        }
        let a_mat = f.linear_part();
        let dec = decompose(&a_mat, ctx)?;
        let eps = default_epsilon(a, dec.spectrum.smallest_nonzero(), ctx);
        let norm = adapted_norm_from(&dec, ctx, Some(&eps))?;
        let split = splitting_from(dec.clone(), a, ctx.p);
        Ok(StableSet {
            f,
            a: a.clone(),
            ctx: *ctx,
            a_mat,
            dec,
            norm,
            split,
            stable: OnceCell::new(),
            unstable: OnceCell::new(),
        })
    }

    /// Verdict for `x` from at most `horizon` iterates.
    pub fn check(&self, x: &[Scalar], horizon: usize) -> Result<MembershipVerdict> {
        let (f, a, ctx, split) = (self.f, &self.a, &self.ctx, &self.split);
        if x.len() != f.dim() {
            return Err(Error::DimensionMismatch("point has the wrong dimension".into()));
        }
        let trace = trace_orbit(f, x, horizon, ctx);

        if f.is_linear() {
            return linear_rule(&self.a_mat, a, x, &self.norm, &self.dec.change_inv, split, &trace, ctx);
        }
        if let Stop::HitZero(n) = trace.stop {
            return Ok(verdict(
                Verdict::CertifiedMember,
                &trace,
                vec![format!("f^{n}(x) = 0 exactly, so the orbit stays at the fixed point")],
            ));
        }
        if split.centre.is_empty() && split.unstable.is_empty() {
            if let Some(v) = contracting_rule(f, a, &self.norm, &trace, ctx, "")? {
                return Ok(v);
            }
        }
        if split.is_hyperbolic() && !split.stable.is_empty() && !split.unstable.is_empty() {
            if a.value() <= Threshold::one().value() {
                if let Some(g) = cached(&self.stable, f, a, GraphMode::Stable, ctx)? {
                    if let Some(v) = stable_graph_rule(f, a, g, &trace, ctx)? {
                        return Ok(v);
                    }
                }
            }
            if let Some(g) = cached(&self.unstable, f, a, GraphMode::Unstable, ctx)? {
                if let Some(v) = unstable_graph_rule(f, a, g, &trace, ctx)? {
                    return Ok(v);
                }
            }
        }
        if f.dim() == 1 {
            if let Some(v) = escape_rule(f, &trace, ctx) {
                return Ok(v);
            }
        }
        heuristic(a, &trace, ctx)
    }
}

#[allow(clippy::too_many_arguments)]
fn linear_rule(
    a_mat: &crate::polyalg::Matrix,
    a: &Threshold,
    x: &[Scalar],
    norm: &AdaptedNorm,
    change_inv: &crate::polyalg::Matrix,
    split: &crate::spectral::Splitting,
    trace: &Trace,
    ctx: &Context,
) -> Result<MembershipVerdict> {
    let z = change_inv.mul_vec(x);
    let offsets = split.decomposition.offsets();
    let mut undecided = false;
    for (i, blk) in split.decomposition.blocks.iter().enumerate() {
        if split.sides[i] == Side::Stable {
            continue;
        }
        let coords = &z[offsets[i]..offsets[i] + blk.multiplicity];
        if coords.iter().any(Scalar::is_certainly_nonzero) {
            let rho = Magnitude::from_valuation(blk.valuation).display(ctx.p);
            return Ok(verdict(
                Verdict::CertifiedNonMember,
                trace,
                vec![
                    format!("x has a nonzero component x_rho in E_rho with rho = {rho} >= a = {a}"),
                    "the adapted norm is a max over the E_rho and scales E_rho exactly by rho".into(),
                    "so a^-n ||A^n x|| >= (rho / a)^n ||x_rho|| >= ||x_rho|| > 0 for all n".into(),
                ],
            ));
        }
        if coords.iter().any(|c| !c.is_certainly_zero()) {
            undecided = true;
        }
    }
    if undecided {
        return Ok(verdict(
            Verdict::Undecided,
            trace,
            vec!["the components of x outside E_(a,s) vanish only to working precision".into()],
        ));
    }
    let stable: Vec<usize> = norm.indices_where(|v| Side::of(a, v, ctx.p) == Side::Stable);
    let sigma = norm.restricted_operator_valuation(a_mat, &stable, ctx)?;
    debug_assert!(below(a, sigma, ctx));
    Ok(verdict(
        Verdict::CertifiedMember,
        trace,
        vec![
            format!("x lies in E_(a,s) for a = {a}"),
            format!(
                "in the adapted norm ||A restricted to E_(a,s)|| = {} < a",
                Magnitude::from_valuation(sigma).display(ctx.p)
            ),
            "so a^-n ||A^n x|| <= (||A|E_s|| / a)^n ||x|| -> 0".into(),
        ],
    ))
}

fn contracting_rule(
    f: &PolyMap,
    a: &Threshold,
    norm: &AdaptedNorm,
    trace: &Trace,
    ctx: &Context,
    context: &str,
) -> Result<Option<MembershipVerdict>> {
    let Some(ball) = contracting_ball_with(f, norm, ctx, |c| below(a, c, ctx))? else {
        return Ok(None);
    };
    for (n, pt) in trace.points.iter().enumerate() {
        let Ok(v) = norm.norm_valuation(pt, ctx) else { continue };
        if v >= Valuation::int(ball.radius_exponent) {
            let mut why = Vec::new();
            if !context.is_empty() {
                why.push(context.to_string());
            }
            why.extend([
                format!("f^{n}(x) lies in the ball of radius p^-{} (adapted norm)", ball.radius_exponent),
                format!(
                    "on that ball ||F(y)|| <= c ||y|| with c = max(||F'(0)||, Lip) = {} < a = {a}",
                    ball.contraction().display(ctx.p)
                ),
                format!("so a^-m ||f^m(x)|| <= (c / a)^(m - {n}) a^-{n} ||f^{n}(x)|| -> 0"),
            ]);
            return Ok(Some(verdict(Verdict::CertifiedMember, trace, why)));
        }
    }
    Ok(None)
}

fn on_graph(graph: &GraphSeries, pt: &[Scalar], ctx: &Context) -> Result<Option<Vec<Scalar>>> {
    if !pt.iter().all(Scalar::is_exact) {
        return Ok(None);
    }
    let (u, w) = graph_coordinates(graph, pt, ctx)?;
    let hu = graph.eval(&u);
    Ok(if w == hu { Some(u) } else { None })
}

fn stable_graph_rule(
    f: &PolyMap,
    a: &Threshold,
    graph: &Graph,
    trace: &Trace,
    ctx: &Context,
) -> Result<Option<MembershipVerdict>> {
    if !graph.invariant(f, ctx)? {
        return Ok(None);
    }
    for (n, pt) in trace.points.iter().enumerate().take(GRAPH_PROBES) {
        let Some(u) = on_graph(&graph.series, pt, ctx)? else { continue };
        let g = graph.reduced(f, ctx)?;
        let head = format!(
            "f^{n}(x) lies on the graph w = h(u) over E_(a,s), which F maps into itself exactly; \
             with a <= 1 the graph coordinate is dominated by u once u -> 0"
        );
        if g.is_linear() {
            return Ok(Some(verdict(
                Verdict::CertifiedMember,
                trace,
                vec![
                    head,
                    "F acts on the graph as the linear map u -> A_s u, whose spectrum lies below a".into(),
                    "so a^-m ||f^m(x)|| -> 0".into(),
                ],
            )));
        }
        let gnorm = adapted_norm(&g.linear_part(), ctx, Some(a))?;
        let sub = Trace { points: trace_orbit(g, &u, trace.points.len() - n, ctx).points, vals: Vec::new(), stop: Stop::Horizon };
        if let Some(mut v) = contracting_rule(g, a, &gnorm, &sub, ctx, &head)? {
            v.trace = trace.vals.clone();
            return Ok(Some(v));
        }
    }
    Ok(None)
}

fn unstable_graph_rule(
    f: &PolyMap,
    a: &Threshold,
    graph: &Graph,
    trace: &Trace,
    ctx: &Context,
) -> Result<Option<MembershipVerdict>> {
    if !graph.invariant(f, ctx)? || !graph.reduced(f, ctx)?.is_linear() {
        return Ok(None);
    }
    for (n, pt) in trace.points.iter().enumerate().take(GRAPH_PROBES) {
        let Some(y) = on_graph(&graph.series, pt, ctx)? else { continue };
        if !y.iter().any(Scalar::is_certainly_nonzero) {
            continue;
        }
        return Ok(Some(verdict(
            Verdict::CertifiedNonMember,
            trace,
            vec![
                format!("f^{n}(x) lies on the graph over E_(a,u), which F maps into itself exactly"),
                "F acts on it as the linear map y -> A_u y, and its E_(a,u) coordinate y is nonzero".into(),
                format!("every eigenvalue of A_u has absolute value > a = {a}, so a^-m ||A_u^m y|| -> infinity"),
                "and ||f^m(x)|| is bounded below by a constant times ||y_m||".into(),
            ],
        )));
    }
    Ok(None)
}

/// For `F(x) = sum c_j x^j` of degree `D >= 2`: on `v(x) < T` the top term
/// strictly dominates and `v(F(x)) = v(c_D) + D v(x) < v(x)`.
fn escape_rule(f: &PolyMap, trace: &Trace, ctx: &Context) -> Option<MembershipVerdict> {
    let p = ctx.p;
    let comp = f.component(0);
    let d = comp.degree()? as i64;
    if d < 2 {
        return None;
    }
    let top = comp.coeff(&[d as u32]);
    if !top.is_certainly_nonzero() {
        return None;
    }
    let vd = top.valuation(p)?;
    // strict upper bounds on v(x), as rationals
    let mut bound = Val::new(-vd, d - 1);
    for (m, c) in comp.terms() {
        let j = m[0] as i64;
        if j == d {
            continue;
        }
        let vj = c.valuation_bound(p)?;
        bound = bound.min(Val::new(vj - vd, d - j));
    }
    for (n, v) in trace.vals.iter().enumerate() {
        let Valuation::Finite(t) = v else { continue };
        if *t < bound {
            return Some(verdict(
                Verdict::CertifiedNonMember,
                trace,
                vec![
                    format!("v(f^{n}(x)) = {t} < {bound}, where the degree-{d} term strictly dominates"),
                    "there |F(y)| = |c_D| |y|^D > |y|, so the region is forward invariant".into(),
                    "and |f^(m+1)(x)| / |f^m(x)| increases without bound, so a^-m |f^m(x)| -> infinity".into(),
                ],
            ));
        }
    }
    None
}

fn heuristic(a: &Threshold, trace: &Trace, ctx: &Context) -> Result<MembershipVerdict> {
    match trace.stop {
        Stop::Collapsed(n) => {
            return Ok(verdict(
                Verdict::HeuristicMember,
                trace,
                vec![format!("||f^{n}(x)|| fell below p^-{VALUATION_CAP}; the orbit collapses faster than any geometric rate")],
            ))
        }
        Stop::Escaped(n) => {
            return Ok(verdict(
                Verdict::HeuristicNonMember,
                trace,
                vec![format!("||f^{n}(x)|| exceeded p^{VALUATION_CAP}; the orbit escapes")],
            ))
        }
        Stop::LostPrecision(n) if trace.vals.len() < MIN_TAIL => {
            return Err(Error::precision(format!("orbit lost its significant digits at step {n}")));
        }
        _ => {}
    }
    let vals: Vec<Val> = trace.vals.iter().filter_map(|v| v.finite()).collect();
    if vals.len() < MIN_TAIL {
        return Ok(verdict(Verdict::Undecided, trace, vec!["orbit too short to estimate a rate".into()]));
    }
    let len = vals.len();
    let w = len / 2;
    let rate = (vals[len - 1] - vals[len - 1 - w]) / Val::from_integer(w as i64);
    let shown = Magnitude::p_pow_neg(rate).display(ctx.p);
    let why = vec![format!(
        "over the last {w} iterates ||f^n(x)|| changes by a factor {shown} per step on average (a = {a})"
    )];
    Ok(match compare_threshold(a, Valuation::Finite(rate), ctx.p) {
        Ordering::Greater => verdict(Verdict::HeuristicMember, trace, why),
        Ordering::Less => verdict(Verdict::HeuristicNonMember, trace, why),
        Ordering::Equal => verdict(Verdict::Undecided, trace, why),
    })
}
