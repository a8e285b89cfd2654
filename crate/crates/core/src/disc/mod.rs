//! Discrete hyperbolic operators on `ℤ²` with a period sub-lattice: lattice normal forms,
//! factorizations and gauge invariants, the Laplace/shift transformation group, the
//! integrability predicate and cyclic chains. All arithmetic is exact.

mod lattice;
mod operator;
mod transform;

use thiserror::Error;

pub use lattice::{normal_forms, NormalForms, PeriodMatrix};
pub use operator::{DiscreteOperator, NAMES, STENCIL};
pub use transform::{
    cyclic_chain_check, decompose12, decompose21, is_integrable, laplace12_pp, laplace21_pp,
    laplace_invariants_step_disc, laplace_variant, recompose12, recompose21, shift1, shift2, CyclicReport,
    DiscreteGaugeInvariants, Factorization, IntegrabilityReport, Order, RatioFamily, Violation,
};
pub(crate) use transform::ratio_family;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiscError {
    #[error("degenerate period lattice: {0}")]
    DegeneratePeriods(String),
    #[error("expected {expected} values on the fundamental domain, found {found}")]
    DomainSize { expected: usize, found: usize },
    #[error("coefficient {coef} vanishes at ({n}, {m})")]
    ZeroCoefficient { coef: char, n: i64, m: i64 },
    #[error("w vanishes at ({n}, {m})")]
    ZeroW { n: i64, m: i64 },
    #[error("degenerate invariants at ({n}, {m}): w ∈ {{0, −1}} or H = 0")]
    DegenerateW { n: i64, m: i64 },
    #[error("vanishing product: {0}")]
    ZeroProduct(String),
    #[error("multipliers must be nonzero")]
    ZeroMultiplier,
    #[error("{0}")]
    Invalid(String),
}
