//! Fixed-point classification from the spectrum of the jacobian.

use serde::{Deserialize, Serialize};

use super::{invariant_ball, shift_to_fixed_point, BallCertificate, BallMode, PolyMap};
use crate::error::{Error, Result};
use crate::field::{Context, Scalar, Valuation};
use crate::polyalg::Matrix;
use crate::spectral::{adapted_norm, spectrum_abs, SpectralData};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FixedPointClass {
    /// `R` inside `]0, 1]`: arbitrarily small invariant neighbourhoods.
    NonExpanding,
    /// `R = {1}`: arbitrarily small neighbourhoods mapped onto themselves.
    StablyNeutral,
    /// `R` inside `]0, 1[`.
    UniformlyAttractive,
    HasExpansion,
}

impl FixedPointClass {
    /// The ball mode that corroborates the label, if any.
    pub fn ball_mode(self) -> Option<BallMode> {
        match self {
            FixedPointClass::NonExpanding => Some(BallMode::Invariant),
            FixedPointClass::StablyNeutral => Some(BallMode::Isometric),
            FixedPointClass::UniformlyAttractive => Some(BallMode::Contracting),
            FixedPointClass::HasExpansion => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct FixedPointReport {
    pub point: Vec<Scalar>,
    pub jacobian: Matrix,
    pub spectral: SpectralData,
    pub class: FixedPointClass,
    /// The jacobian is singular, so the main labels do not apply.
    pub degenerate: bool,
    pub notes: Vec<String>,
    pub certificate: Option<BallCertificate>,
}

/// The most specific label allowed by the spectrum; the flag reports a
/// singular jacobian.
pub fn class_from_spectrum(s: &SpectralData) -> (FixedPointClass, bool) {
    if s.has_zero() {
        return (FixedPointClass::HasExpansion, true);
    }
    let zero = Valuation::int(0);
    let class = if s.all(|v| v > zero) {
        FixedPointClass::UniformlyAttractive
    } else if s.all(|v| v == zero) {
        FixedPointClass::StablyNeutral
    } else if s.all(|v| v >= zero) {
        FixedPointClass::NonExpanding
    } else {
        FixedPointClass::HasExpansion
    };
    (class, false)
}

/// Labels the fixed point from the spectrum of `F'(p)` and attaches a ball
/// certificate in the adapted norm when the label admits one.
pub fn classify_fixed_point(f: &PolyMap, point: &[Scalar], ctx: &Context) -> Result<FixedPointReport> {
    let g = shift_to_fixed_point(f, point)?;
    let jacobian = g.linear_part();
    let spectral = spectrum_abs(&jacobian, ctx)?;
    let (class, degenerate) = class_from_spectrum(&spectral);
    let mut notes = Vec::new();
    if degenerate {
        notes.push("jacobian is singular; the fixed point is degenerate".to_string());
    }
    let mut certificate = None;
    if let Some(mode) = class.ball_mode() {
        let norm = adapted_norm(&jacobian, ctx, None)?;
        match invariant_ball(&g, mode, &norm, ctx) {
            Ok(c) => certificate = Some(c),
            Err(Error::RadiusNotFound(k)) => notes.push(format!("no certified ball with radius at least p^-{k}")),
            Err(e) => return Err(e),
        }
    }
    Ok(FixedPointReport { point: point.to_vec(), jacobian, spectral, class, degenerate, notes, certificate })
}
