//! Problem files: the JSON input schema and its validation.

use serde::{Deserialize, Serialize};
use ultradyn::dynamics::{shift_to_fixed_point, PolyMap};
use ultradyn::field::{parse_rational, Context, Prime, Scalar, Threshold};
use ultradyn::manifolds::GraphMode;
use ultradyn::polyalg::{MPoly, Matrix};

use crate::CliError;

pub const PROBLEM_SCHEMA: &str = "ultradyn.problem/1";

/// One monomial `coeff * x^exponents` of a map component.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub exponents: Vec<u32>,
    pub coeff: String,
}

/// Input document. Every number except the prime, precision, order and
/// horizon is a rational string such as `"-3/4"`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prime: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<u32>,
    /// Row-major square matrix.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<String>>>,
    /// One list of terms per component.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<Vec<Vec<Term>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_point: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub a: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<Vec<String>>,
}

/// Command-line values that take precedence over the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub prime: Option<u64>,
    pub precision: Option<u32>,
    pub a: Vec<String>,
    pub order: Option<u32>,
    pub horizon: Option<usize>,
    pub mode: Option<String>,
}

impl ProblemFile {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let file: ProblemFile = serde_json::from_str(text).map_err(|e| CliError::Schema(e.to_string()))?;
        if let Some(s) = &file.schema {
            if s != PROBLEM_SCHEMA {
                return Err(CliError::Schema(format!("unsupported schema {s:?}, expected {PROBLEM_SCHEMA:?}")));
            }
        }
        Ok(file)
    }
}

/// A validated problem.
#[derive(Clone, Debug)]
pub struct Problem {
    pub ctx: Context,
    pub matrix: Option<Matrix>,
    pub map: Option<PolyMap>,
    pub fixed_point: Option<Vec<Scalar>>,
    pub thresholds: Vec<Threshold>,
    pub order: Option<u32>,
    pub horizon: Option<usize>,
    pub mode: Option<GraphMode>,
    pub points: Vec<Vec<Scalar>>,
}

fn schema(msg: impl Into<String>) -> CliError {
    CliError::Schema(msg.into())
}

fn rational(s: &str, what: &str) -> Result<Scalar, CliError> {
    parse_rational(s).map(Scalar::Exact).map_err(|e| schema(format!("{what}: {e}")))
}

fn vector(xs: &[String], what: &str) -> Result<Vec<Scalar>, CliError> {
    xs.iter().map(|x| rational(x, what)).collect()
}

impl Problem {
    pub fn resolve(file: &ProblemFile, over: &Overrides) -> Result<Self, CliError> {
        let p = over.prime.or(file.prime).ok_or_else(|| schema("missing prime"))?;
        let p = Prime::new(p).map_err(|e| schema(e.to_string()))?;
        let ctx = match over.precision.or(file.precision) {
            Some(0) => return Err(schema("precision must be positive")),
            Some(n) => Context::with_precision(p, n),
            None => Context::new(p),
        };
        let matrix = match &file.matrix {
            Some(rows) => {
                let rows = rows.iter().map(|r| vector(r, "matrix entry")).collect::<Result<Vec<_>, _>>()?;
                let m = Matrix::from_rows(rows).map_err(|e| schema(e.to_string()))?;
                if !m.is_square() {
                    return Err(schema("matrix must be square"));
                }
                Some(m)
            }
            None => None,
        };
        let map = match &file.map {
            Some(comps) => Some(parse_map(comps)?),
            None => None,
        };
        if matrix.is_some() && map.is_some() {
            return Err(schema("give either a matrix or a map, not both"));
        }
        let dim = matrix.as_ref().map(Matrix::nrows).or(map.as_ref().map(PolyMap::dim));
        let fixed_point = match &file.fixed_point {
            Some(x) => Some(vector(x, "fixed point")?),
            None => None,
        };
        let points = file.points.iter().map(|x| vector(x, "point")).collect::<Result<Vec<_>, _>>()?;
        if let Some(d) = dim {
            if fixed_point.as_ref().is_some_and(|x| x.len() != d) || points.iter().any(|x| x.len() != d) {
                return Err(schema(format!("points must have dimension {d}")));
            }
        }
        let a_src = if over.a.is_empty() { &file.a } else { &over.a };
        let thresholds = a_src
            .iter()
            .map(|s| s.parse::<Threshold>().map_err(|e| schema(format!("threshold {s:?}: {e}"))))
            .collect::<Result<Vec<_>, _>>()?;
        let mode = match over.mode.as_ref().or(file.mode.as_ref()) {
            Some(s) => Some(s.parse::<GraphMode>().map_err(|e| schema(e.to_string()))?),
            None => None,
        };
        Ok(Problem {
            ctx,
            matrix,
            map,
            fixed_point,
            thresholds,
            order: over.order.or(file.order),
            horizon: over.horizon.or(file.horizon),
            mode,
            points,
        })
    }

    /// The matrix, or the jacobian of the map at its fixed point (the origin by default).
    pub fn linear(&self) -> Result<Matrix, CliError> {
        if let Some(m) = &self.matrix {
            return Ok(m.clone());
        }
        Ok(self.local_map()?.linear_part())
    }

    /// The map as given, or the linear map of the matrix.
    pub fn raw_map(&self) -> Result<PolyMap, CliError> {
        match (&self.map, &self.matrix) {
            (Some(f), _) => Ok(f.clone()),
            (None, Some(m)) => Ok(PolyMap::linear(m)),
            (None, None) => Err(schema("missing matrix or map")),
        }
    }

    /// The map moved so that its fixed point sits at the origin.
    pub fn local_map(&self) -> Result<PolyMap, CliError> {
        let f = self.raw_map()?;
        match &self.fixed_point {
            Some(x) => Ok(shift_to_fixed_point(&f, x)?),
            None => Ok(f),
        }
    }

    pub fn point(&self) -> Result<Vec<Scalar>, CliError> {
        match &self.fixed_point {
            Some(x) => Ok(x.clone()),
            None => Ok(vec![Scalar::zero(); self.raw_map()?.dim()]),
        }
    }

    /// The thresholds, defaulting to `a = 1`.
    pub fn thresholds(&self) -> Vec<Threshold> {
        if self.thresholds.is_empty() {
            vec![Threshold::one()]
        } else {
            self.thresholds.clone()
        }
    }

    pub fn sample_points(&self) -> Result<&[Vec<Scalar>], CliError> {
        if self.points.is_empty() {
            return Err(schema("no sample points given"));
        }
        Ok(&self.points)
    }
}

fn parse_map(comps: &[Vec<Term>]) -> Result<PolyMap, CliError> {
    let d = comps.len();
    if d == 0 {
        return Err(schema("map has no components"));
    }
    let mut out = Vec::with_capacity(d);
    for (i, terms) in comps.iter().enumerate() {
        let mut poly = MPoly::zero(d);
        for t in terms {
            if t.exponents.len() != d {
                return Err(schema(format!("component {i}: exponent vector must have length {d}")));
            }
            let c = rational(&t.coeff, "coefficient")?;
            poly = poly.add(&MPoly::monomial(d, t.exponents.clone(), c));
        }
        out.push(poly);
    }
    PolyMap::new(out).map_err(|e| schema(e.to_string()))
}
