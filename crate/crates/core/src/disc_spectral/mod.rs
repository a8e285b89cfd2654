//! Exact direct spectral problem for periodic discrete operators: the Floquet matrices
//! `M`, `M̂`, the spectral-curve polynomial and its boundary factorizations, the marked
//! points `P±`, `Q±`, ψ-ratios at curve points, adjoint reciprocity, and the action of
//! the Laplace and shift transformations on the spectral data.

mod curve;
mod matrix;
mod points;
mod psi;

use thiserror::Error;

use crate::coeffring::{format_rational, Exponent, Rational};
use crate::disc::DiscError;

pub use curve::{
    adjoint_reciprocity, adjoint_reciprocity_with, consistency_r_rhat, consistency_r_rhat_with, in_first_region,
    in_second_region, spectral_poly,
    spectral_poly_hat, CornerSigns, MonomialMatch, SpectralCurvePoly,
};
pub use matrix::{build_m, build_m_adjoint, build_mhat, FloquetMatrix, MatrixKind};
pub use points::{
    laplace_spectral_invariance, multiplicities, spectral_points, transform_spectral_action, FamilyAction,
    PointFamily, SpectralAction, SpectralInvarianceReport, SpectralPoints, Transform,
};
pub use psi::{curve_points_at, psi_on_domain, psi_ratios, PsiRatios, DEFAULT_CURVE_TOL};

/// First disagreement found by an exact comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct MismatchReport {
    pub what: String,
    pub exponent: Option<Exponent>,
    pub left: Option<Rational>,
    pub right: Option<Rational>,
}

impl MismatchReport {
    pub fn new(what: impl Into<String>) -> Self {
        MismatchReport { what: what.into(), exponent: None, left: None, right: None }
    }

    pub fn at(what: impl Into<String>, exponent: Exponent, left: Rational, right: Rational) -> Self {
        MismatchReport { what: what.into(), exponent: Some(exponent), left: Some(left), right: Some(right) }
    }
}

impl std::fmt::Display for MismatchReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.what)?;
        if let (Some(e), Some(l), Some(r)) = (&self.exponent, &self.left, &self.right) {
            write!(f, " at ν^{} μ^{}: {} vs {}", e.0, e.1, format_rational(l), format_rational(r))?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error(transparent)]
    Disc(#[from] DiscError),
    #[error("mismatch: {0}")]
    Mismatch(Box<MismatchReport>),
    #[error("point is off the spectral curve (relative residual {residual:e})")]
    OffCurve { residual: f64 },
    #[error("∂R/∂a vanishes at the point (relative size {size:e})")]
    SingularPoint { size: f64 },
    #[error("root finding failed: {0}")]
    RootFinding(String),
}

impl From<MismatchReport> for SpectralError {
    fn from(r: MismatchReport) -> Self {
        SpectralError::Mismatch(Box::new(r))
    }
}
