//! Batch front end for `ultradyn`: reads a problem file, runs one analysis
//! and writes a versioned report.
//!
//! Exit codes: 0 on success, 1 for unreadable or invalid input, 2 when the
//! library certifies that the request cannot be met (a violated
//! precondition, a resonance, a point that is not fixed), 3 when p-adic
//! precision runs out.

mod problem;
mod report;

pub use problem::{Overrides, Problem, ProblemFile, Term, PROBLEM_SCHEMA};
pub use report::*;

use ultradyn::dynamics::{classify_fixed_point, orbit, StableSet, DEFAULT_HORIZON};
use ultradyn::field::{Context, Scalar, Threshold};
use ultradyn::manifolds::{graph_series, is_invariant_graph, residual, residual_valuation, GraphMode, DEFAULT_ORDER};
use ultradyn::polyalg::Matrix;
use ultradyn::spectral::{
    adapted_norm, nonhyperbolicity_witness, operator_norm, splitting_at, spectrum_abs, Side,
};

/// Iterates shown by `orbit` unless a horizon is given.
pub const DEFAULT_ORBIT_LENGTH: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Spectrum,
    Split,
    Hyperbolic,
    Norm,
    Classify,
    Graph,
    Orbit,
    Member,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Table,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Schema(String),
    #[error(transparent)]
    Library(#[from] ultradyn::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Schema(_) => 1,
            CliError::Library(e) if e.is_precision_failure() => 3,
            CliError::Library(ultradyn::Error::Parse(_) | ultradyn::Error::DimensionMismatch(_)) => 1,
            CliError::Library(_) => 2,
        }
    }
}

fn strs(v: &[Scalar]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

fn rows(m: &Matrix) -> Vec<Vec<String>> {
    (0..m.nrows()).map(|i| strs(&m.row(i))).collect()
}

/// Runs one command and builds its report.
pub fn run(command: Command, file: &ProblemFile, over: &Overrides) -> Result<Report, CliError> {
    let pb = Problem::resolve(file, over)?;
    let ctx = pb.ctx;
    let result = match command {
        Command::Spectrum => {
            let s = spectrum_abs(&pb.linear()?, &ctx)?;
            Body::Spectrum(SpectrumOut { dim: s.dim(), entries: s.entries })
        }
        Command::Split => {
            let m = pb.linear()?;
            let out = pb.thresholds().iter().map(|a| split(&m, a, &ctx)).collect::<Result<_, _>>()?;
            Body::Split(out)
        }
        Command::Hyperbolic => {
            let m = pb.linear()?;
            let spec = spectrum_abs(&m, &ctx)?;
            let mut out = Vec::new();
            for a in pb.thresholds() {
                let hyperbolic = !spec.contains(&a, ctx.p);
                let witness =
                    if hyperbolic { None } else { Some(nonhyperbolicity_witness(&m, &a, &ctx)?.summary()) };
                out.push(HyperbolicOut { a: a.to_string(), hyperbolic, witness });
            }
            Body::Hyperbolic(out)
        }
        Command::Norm => {
            let m = pb.linear()?;
            let n = adapted_norm(&m, &ctx, None)?;
            let op = operator_norm(&m, &n, &n, &ctx)?;
            Body::Norm(NormOut {
                basis: n.basis().columns().iter().map(|c| strs(c)).collect(),
                weights: n.weights().iter().map(ToString::to_string).collect(),
                blocks: n.blocks().to_vec(),
                lambda_exponent: n.lambda_exponent(),
                epsilon: n.epsilon().map(ToString::to_string),
                operator_valuation: op.valuation(),
                operator_norm: op.display(ctx.p),
            })
        }
        Command::Classify => {
            let f = pb.raw_map()?;
            let r = classify_fixed_point(&f, &pb.point()?, &ctx)?;
            Body::Classify(ClassifyOut {
                point: strs(&r.point),
                jacobian: rows(&r.jacobian),
                spectrum: r.spectral.entries,
                class: r.class,
                degenerate: r.degenerate,
                certificate: r.certificate.map(|c| c.summary(ctx.p)),
                notes: r.notes,
            })
        }
        Command::Graph => {
            let f = pb.local_map()?;
            let a = pb.thresholds().remove(0);
            let mode = pb.mode.unwrap_or(GraphMode::Stable);
            let g = graph_series(&f, &a, mode, pb.order.unwrap_or(DEFAULT_ORDER), &ctx)?;
            let res = residual(&f, &g, &ctx)?;
            Body::Graph(GraphOut {
                residual_degree: res.iter().filter_map(|r| r.min_degree()).min(),
                residual_valuation: residual_valuation(&res, ctx.p),
                exactly_invariant: is_invariant_graph(&f, &g, &ctx)?,
                graph: g.summary(),
            })
        }
        Command::Orbit => {
            let f = pb.raw_map()?;
            let n = pb.horizon.unwrap_or(DEFAULT_ORBIT_LENGTH);
            let mut out = Vec::new();
            for x in pb.sample_points()? {
                let iterates = orbit(&f, x, n, &ctx)?
                    .into_iter()
                    .enumerate()
                    .map(|(i, (pt, m))| IterateOut { n: i, point: strs(&pt), norm_valuation: m.valuation() })
                    .collect();
                out.push(OrbitOut { start: strs(x), iterates });
            }
            Body::Orbit(out)
        }
        Command::Member => {
            let f = pb.local_map()?;
            let horizon = pb.horizon.unwrap_or(DEFAULT_HORIZON);
            let mut out = Vec::new();
            for a in pb.thresholds() {
                let set = StableSet::new(&f, &a, &ctx)?;
                for x in pb.sample_points()? {
                    let v = set.check(x, horizon)?;
                    out.push(MemberOut {
                        a: a.to_string(),
                        point: strs(x),
                        verdict: v.verdict,
                        trace: v.trace,
                        justification: v.justification,
                    });
                }
            }
            Body::Member(out)
        }
    };
    Ok(Report { schema: REPORT_SCHEMA.to_string(), prime: ctx.p.get(), precision: ctx.precision(), result })
}

fn split(m: &Matrix, a: &Threshold, ctx: &Context) -> Result<SplitOut, CliError> {
    let s = splitting_at(m, a, ctx)?;
    let blocks = s
        .decomposition
        .blocks
        .iter()
        .zip(&s.sides)
        .map(|(b, side): (_, &Side)| BlockOut {
            v: b.valuation,
            m: b.multiplicity,
            side: *side,
            basis: b.basis.iter().map(|v| strs(v)).collect(),
        })
        .collect();
    let vecs = |vs: &[Vec<Scalar>]| vs.iter().map(|v| strs(v)).collect::<Vec<_>>();
    Ok(SplitOut {
        a: a.to_string(),
        hyperbolic: s.is_hyperbolic(),
        stable: vecs(&s.stable),
        centre: vecs(&s.centre),
        unstable: vecs(&s.unstable),
        blocks,
    })
}

/// Renders a report in the requested format.
pub fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Json => report.to_json(),
        Format::Table => report.to_table(),
    }
}
