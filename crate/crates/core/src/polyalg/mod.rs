//! Polynomial and matrix algebra over Q and Q_p: characteristic
//! polynomials, Newton polygons, slope factorization, kernels, invariant
//! lattices and the Fitting decomposition.

mod charpoly;
mod fitting;
mod hensel;
mod lattice;
mod matrix;
mod mpoly;
mod newton;
mod poly;

pub use charpoly::{bareiss_det, charpoly, interpolate};
pub use fitting::{fitting_decomposition, FittingDecomposition};
pub use hensel::{slope_factorization, SlopeFactor, SlopeFactorSummary};
pub use lattice::{invariant_unit_lattice, min_valuation, Lattice};
pub use matrix::{primitive, Echelon, Matrix};
pub use mpoly::{monomials_of_degree, total_degree, MPoly, Monomial};
pub use newton::{newton_polygon, NewtonPolygon, Segment};
pub use poly::Polynomial;
