//! Certificates that `M` is not `a`-hyperbolic.

use serde::{Deserialize, Serialize};

use super::{adapted_norm_from, decompose, AdaptedNorm};
use crate::error::{Error, Result};
use crate::field::{Context, Scalar, Threshold, Val, Valuation};
use crate::polyalg::Matrix;

/// Number of iterates checked by a witness.
pub const WITNESS_WINDOW: usize = 20;

/// A vector `v` of `E_a` with `a^-n ||M^n v||` constant.
#[derive(Clone, Debug)]
pub struct Witness {
    pub threshold: Threshold,
    pub vector: Vec<Scalar>,
    pub norm: AdaptedNorm,
    /// `-log_p (a^-n ||M^n v||)` for `n = 0..=WITNESS_WINDOW`.
    pub values: Vec<Valuation>,
}

impl Witness {
    /// The sequence neither tends to 0 nor to infinity on the window.
    pub fn is_constant(&self) -> bool {
        self.values.windows(2).all(|w| w[0] == w[1])
    }

    pub fn summary(&self) -> WitnessSummary {
        WitnessSummary {
            threshold: self.threshold.to_string(),
            vector: self.vector.iter().map(ToString::to_string).collect(),
            values: self.values.clone(),
            constant: self.is_constant(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessSummary {
    pub threshold: String,
    pub vector: Vec<String>,
    pub values: Vec<Valuation>,
    pub constant: bool,
}

/// Picks the first adapted basis vector of `E_a`; fails when `a` is not an
/// eigenvalue absolute value.
pub fn nonhyperbolicity_witness(m: &Matrix, a: &Threshold, ctx: &Context) -> Result<Witness> {
    let p = ctx.p;
    let Some(va) = a.as_value_group(p) else {
        return Err(Error::precondition(format!("{a} is not a power of {p}, so M is {a}-hyperbolic")));
    };
    let va = Val::from_integer(va);
    let dec = decompose(m, ctx)?;
    let norm = adapted_norm_from(&dec, ctx, None)?;
    let Some(block) = norm.blocks().iter().find(|b| b.valuation == Valuation::Finite(va)) else {
        return Err(Error::precondition(format!("{a} is not an eigenvalue absolute value")));
    };
    let vector = norm.basis().column(block.start);
    let mut values = Vec::with_capacity(WITNESS_WINDOW + 1);
    let mut x = vector.clone();
    for n in 0..=WITNESS_WINDOW {
        let v = norm.norm_valuation(&x, ctx)?;
        values.push(v.add_val(-va * Val::from_integer(n as i64)));
        x = m.mul_vec(&x);
    }
    Ok(Witness { threshold: a.clone(), vector, norm, values })
}
