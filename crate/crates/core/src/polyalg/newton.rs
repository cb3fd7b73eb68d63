//! Newton polygons.

use serde::{Deserialize, Serialize};

use super::Polynomial;
use crate::error::{Error, Result};
use crate::field::{Prime, Val, Valuation};

/// One edge of the lower hull, recorded by the valuation of its roots.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    #[serde(with = "crate::field::val_str")]
    pub root_valuation: Val,
    pub length: usize,
}

impl Segment {
    /// Slope of the edge, the negated root valuation.
    pub fn slope(&self) -> Val {
        -self.root_valuation
    }
}

/// Lower convex hull of the points `(i, v(c_i))`.
///
/// Segments are listed left to right, so their slopes increase and their
/// root valuations decrease. The `zero_roots` lowest coefficients vanish and
/// account for roots of valuation `+inf`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewtonPolygon {
    pub vertices: Vec<(usize, i64)>,
    pub segments: Vec<Segment>,
    pub zero_roots: usize,
}

impl NewtonPolygon {
    /// Root valuations with multiplicities, `+inf` first, then decreasing.
    pub fn root_valuations(&self) -> Vec<(Valuation, usize)> {
        let mut out = Vec::new();
        if self.zero_roots > 0 {
            out.push((Valuation::Infinite, self.zero_roots));
        }
        out.extend(self.segments.iter().map(|s| (Valuation::Finite(s.root_valuation), s.length)));
        out
    }

    pub fn degree(&self) -> usize {
        self.zero_roots + self.segments.iter().map(|s| s.length).sum::<usize>()
    }

    /// Horizontal positions of the vertices where the slope changes.
    pub fn break_points(&self) -> Vec<usize> {
        let n = self.vertices.len();
        if n <= 2 {
            return Vec::new();
        }
        self.vertices[1..n - 1].iter().map(|v| v.0).collect()
    }
}

/// Newton polygon of a nonzero polynomial.
///
/// Approximate coefficients are accepted as long as none of the approximate
/// zeros could reach below the hull.
pub fn newton_polygon(f: &Polynomial, p: Prime) -> Result<NewtonPolygon> {
    if f.is_zero() {
        return Err(Error::precondition("Newton polygon of the zero polynomial"));
    }
    let z = f.low_zeros();
    let mut pts: Vec<(usize, i64)> = Vec::new();
    let mut fog: Vec<(usize, i64)> = Vec::new();
    for (i, c) in f.coeffs().iter().enumerate().skip(z) {
        if c.is_certainly_nonzero() {
            pts.push((i, c.valuation(p).unwrap()));
        } else if let Some(b) = c.valuation_bound(p) {
            fog.push((i, b));
        }
    }
    if fog.iter().any(|&(i, _)| i < pts[0].0) {
        return Err(Error::precision("lowest coefficient is zero only to working precision"));
    }
    let hull = lower_hull(&pts);
    let mut segments = Vec::new();
    for w in hull.windows(2) {
        let (i0, v0) = w[0];
        let (i1, v1) = w[1];
        let len = i1 - i0;
        segments.push(Segment { root_valuation: Val::new(v0 - v1, len as i64), length: len });
    }
    // An approximate zero strictly below the hull could change it.
    for &(i, b) in &fog {
        if let Some(w) = hull.windows(2).find(|w| w[0].0 <= i && i <= w[1].0) {
            let (i0, v0) = w[0];
            let (i1, v1) = w[1];
            // b <= interpolated height  <=>  b * (i1 - i0) <= v0 * (i1 - i) + v1 * (i - i0)
            let lhs = b as i128 * (i1 - i0) as i128;
            let rhs = v0 as i128 * (i1 - i) as i128 + v1 as i128 * (i - i0) as i128;
            if lhs <= rhs {
                return Err(Error::precision("an approximate zero coefficient could lie on the hull"));
            }
        }
    }
    Ok(NewtonPolygon { vertices: hull, segments, zero_roots: z })
}

fn lower_hull(pts: &[(usize, i64)]) -> Vec<(usize, i64)> {
    let mut hull: Vec<(usize, i64)> = Vec::new();
    for &q in pts {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            // drop b unless it lies strictly below the chord a-q
            let cross = (b.0 as i128 - a.0 as i128) * (q.1 as i128 - a.1 as i128)
                - (b.1 as i128 - a.1 as i128) * (q.0 as i128 - a.0 as i128);
            if cross <= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(q);
    }
    hull
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    #[test]
    fn two_slopes() {
        let np = newton_polygon(&Polynomial::from_ints(&[-8, -2, 1]), p(2)).unwrap();
        assert_eq!(
            np.root_valuations(),
            vec![(Valuation::int(2), 1), (Valuation::int(1), 1)]
        );
        assert_eq!(np.break_points(), vec![1]);
    }

    #[test]
    fn flat() {
        let np = newton_polygon(&Polynomial::from_ints(&[1, 0, 1]), p(2)).unwrap();
        assert_eq!(np.root_valuations(), vec![(Valuation::int(0), 2)]);
    }

    #[test]
    fn pure_power() {
        let np = newton_polygon(&Polynomial::from_ints(&[0, 0, 0, 1]), p(7)).unwrap();
        assert_eq!(np.root_valuations(), vec![(Valuation::Infinite, 3)]);
        assert!(np.segments.is_empty());
    }

    #[test]
    fn fractional_slope() {
        let np = newton_polygon(&Polynomial::from_ints(&[0, -2, 0, 1]), p(2)).unwrap();
        assert_eq!(
            np.root_valuations(),
            vec![(Valuation::Infinite, 1), (Valuation::frac(1, 2), 2)]
        );
        assert_eq!(np.vertices, vec![(1, 1), (3, 0)]);
    }

    #[test]
    fn collinear_points_are_not_vertices() {
        // (t - 2)^3 over Q_2: points (0,3), (1, v(12)=2), (2, v(6)=1), (3,0)
        let np = newton_polygon(&Polynomial::from_ints(&[-8, 12, -6, 1]), p(2)).unwrap();
        assert_eq!(np.vertices, vec![(0, 3), (3, 0)]);
        assert_eq!(np.segments[0].length, 3);
    }
}
