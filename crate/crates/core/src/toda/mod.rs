//! The three Toda systems attached to Laplace chains: the compatibility lattice for the
//! semi-discrete invariants `wᵏₙ`, the semi-discrete 2D Toda lattice for `gᵏₙ` with the
//! reconstruction of `g` from `w`, and the completely discretized lattice.

mod discrete;
mod semi;

use thiserror::Error;

use crate::coeffring::CoeffError;
use crate::disc::DiscError;

pub use discrete::{discrete_toda_step, DiscreteField};
pub use semi::{eqw_residual, reconstruct_g, toda_residual_2d1, GField, SemiDiscreteField};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TodaError {
    #[error(transparent)]
    Coeff(#[from] CoeffError),
    #[error(transparent)]
    Disc(#[from] DiscError),
    #[error("layer k = {k}, n = {n} is outside the stored window")]
    MissingLayer { k: i64, n: i64 },
    #[error("compatibility constant at k = {k}, n = {n} varies in y by {variation:e}")]
    IncompatibleField { k: usize, n: usize, variation: f64 },
    #[error("field is empty or has layers of unequal length")]
    Shape,
}
