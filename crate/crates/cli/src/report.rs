//! Output schema. Valuations are rational strings with `"inf"` for zero;
//! scalars are rational strings.

use serde::{Deserialize, Serialize};
use ultradyn::dynamics::{BallSummary, FixedPointClass, Verdict};
use ultradyn::field::Valuation;
use ultradyn::manifolds::GraphSummary;
use ultradyn::spectral::{NormBlock, Side, SpectralEntry, WitnessSummary};

pub const REPORT_SCHEMA: &str = "ultradyn.report/1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub schema: String,
    pub prime: u64,
    pub precision: u32,
    pub result: Body,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Body {
    Spectrum(SpectrumOut),
    Split(Vec<SplitOut>),
    Hyperbolic(Vec<HyperbolicOut>),
    Norm(NormOut),
    Classify(ClassifyOut),
    Graph(GraphOut),
    Orbit(Vec<OrbitOut>),
    Member(Vec<MemberOut>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectrumOut {
    pub dim: usize,
    pub entries: Vec<SpectralEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockOut {
    pub v: Valuation,
    pub m: usize,
    pub side: Side,
    pub basis: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitOut {
    pub a: String,
    pub hyperbolic: bool,
    pub stable: Vec<Vec<String>>,
    pub centre: Vec<Vec<String>>,
    pub unstable: Vec<Vec<String>>,
    pub blocks: Vec<BlockOut>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HyperbolicOut {
    pub a: String,
    pub hyperbolic: bool,
    pub witness: Option<WitnessSummary>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormOut {
    /// Columns of the adapted basis.
    pub basis: Vec<Vec<String>>,
    pub weights: Vec<String>,
    pub blocks: Vec<NormBlock>,
    pub lambda_exponent: Option<i64>,
    pub epsilon: Option<String>,
    /// `-log_p` of the operator norm of the matrix in this norm.
    pub operator_valuation: Valuation,
    pub operator_norm: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifyOut {
    pub point: Vec<String>,
    pub jacobian: Vec<Vec<String>>,
    pub spectrum: Vec<SpectralEntry>,
    pub class: FixedPointClass,
    pub degenerate: bool,
    pub certificate: Option<BallSummary>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphOut {
    pub graph: GraphSummary,
    /// Least degree of a nonzero term of the truncated residual.
    pub residual_degree: Option<u32>,
    pub residual_valuation: Valuation,
    /// The graph is mapped into itself with no truncation.
    pub exactly_invariant: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IterateOut {
    pub n: usize,
    pub point: Vec<String>,
    pub norm_valuation: Valuation,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitOut {
    pub start: Vec<String>,
    pub iterates: Vec<IterateOut>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemberOut {
    pub a: String,
    pub point: Vec<String>,
    pub verdict: Verdict,
    pub trace: Vec<Valuation>,
    pub justification: Vec<String>,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports always serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Plain-text rendering for terminals.
    pub fn to_table(&self) -> String {
        let mut out = format!("p = {}, precision = {}\n", self.prime, self.precision);
        let mut line = |s: String| {
            out.push_str(&s);
            out.push('\n');
        };
        let vecs = |vs: &[Vec<String>]| vs.iter().map(|v| format!("({})", v.join(", "))).collect::<Vec<_>>().join(" ");
        match &self.result {
            Body::Spectrum(s) => {
                line(format!("{:>10}  {:>4}", "v", "mult"));
                for e in &s.entries {
                    line(format!("{:>10}  {:>4}", e.valuation.to_string(), e.multiplicity));
                }
            }
            Body::Split(rows) => {
                for r in rows {
                    line(format!("a = {}  hyperbolic = {}", r.a, r.hyperbolic));
                    line(format!("  E_s: {}", vecs(&r.stable)));
                    line(format!("  E_c: {}", vecs(&r.centre)));
                    line(format!("  E_u: {}", vecs(&r.unstable)));
                }
            }
            Body::Hyperbolic(rows) => {
                for r in rows {
                    match &r.witness {
                        Some(w) => line(format!(
                            "a = {}  hyperbolic = {}  witness = ({})",
                            r.a,
                            r.hyperbolic,
                            w.vector.join(", ")
                        )),
                        None => line(format!("a = {}  hyperbolic = {}", r.a, r.hyperbolic)),
                    }
                }
            }
            Body::Norm(n) => {
                line(format!("basis columns: {}", vecs(&n.basis)));
                line(format!("weights: {}", n.weights.join(" ")));
                if let Some(k) = n.lambda_exponent {
                    line(format!("nilpotent scaling p^{k}"));
                }
                line(format!("operator norm: {}", n.operator_norm));
            }
            Body::Classify(c) => {
                line(format!("point: ({})", c.point.join(", ")));
                line(format!("class: {:?}{}", c.class, if c.degenerate { " (degenerate)" } else { "" }));
                if let Some(b) = &c.certificate {
                    line(format!("ball: {:?} radius {} contraction valuation {}", b.mode, b.radius, b.contraction_valuation));
                }
                for note in &c.notes {
                    line(format!("note: {note}"));
                }
            }
            Body::Graph(g) => {
                line(format!("mode {:?}, a = {}, order {}", g.graph.mode, g.graph.a, g.graph.order));
                for t in &g.graph.coefficients {
                    let idx: Vec<String> = t.multi_index.iter().map(u32::to_string).collect();
                    line(format!("  ({}): ({})", idx.join(","), t.vector.join(", ")));
                }
                line(format!("exactly invariant: {}", g.exactly_invariant));
            }
            Body::Orbit(rows) => {
                for r in rows {
                    line(format!("start ({})", r.start.join(", ")));
                    for it in &r.iterates {
                        line(format!("{:>4}  v = {:>8}  ({})", it.n, it.norm_valuation.to_string(), it.point.join(", ")));
                    }
                }
            }
            Body::Member(rows) => {
                for r in rows {
                    line(format!("a = {}  ({})  {:?}", r.a, r.point.join(", "), r.verdict));
                    for j in &r.justification {
                        line(format!("    {j}"));
                    }
                }
            }
        }
        out
    }
}
