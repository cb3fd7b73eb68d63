//! The Fitting decomposition `K^d = ker(M^d) + im(M^d)`.

use super::Matrix;
use crate::error::{Error, Result};
use crate::field::{Context, Scalar};

/// Bases of the nilpotent part `ker(M^d)` and the invertible part `im(M^d)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FittingDecomposition {
    pub nilpotent: Vec<Vec<Scalar>>,
    pub invertible: Vec<Vec<Scalar>>,
}

pub fn fitting_decomposition(m: &Matrix, ctx: &Context) -> Result<FittingDecomposition> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch("Fitting decomposition of a non-square matrix".into()));
    }
    let md = m.pow(m.nrows() as u32);
    let nilpotent = md.kernel_basis(ctx)?;
    let invertible = md.column_basis(ctx)?;
    if nilpotent.len() + invertible.len() != m.nrows() {
        return Err(Error::RankUncertified("kernel and image dimensions do not add up".into()));
    }
    Ok(FittingDecomposition { nilpotent, invertible })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Prime;

    fn ctx() -> Context {
        Context::new(Prime::new(2).unwrap())
    }

    #[test]
    fn mixed() {
        let fd = fitting_decomposition(&Matrix::from_ints(&[&[0, 1], &[0, 2]]), &ctx()).unwrap();
        assert_eq!(fd.nilpotent, vec![vec![Scalar::one(), Scalar::zero()]]);
        assert_eq!(fd.invertible, vec![vec![Scalar::one(), Scalar::from_int(2)]]);
    }

    #[test]
    fn invertible() {
        let fd = fitting_decomposition(&Matrix::from_ints(&[&[1, 1], &[0, 3]]), &ctx()).unwrap();
        assert!(fd.nilpotent.is_empty());
        assert_eq!(fd.invertible.len(), 2);
    }

    #[test]
    fn nilpotent() {
        let fd = fitting_decomposition(&Matrix::from_ints(&[&[0, 1, 0], &[0, 0, 1], &[0, 0, 0]]), &ctx()).unwrap();
        assert_eq!(fd.nilpotent.len(), 3);
        assert!(fd.invertible.is_empty());
    }
}
