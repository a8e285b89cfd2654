//! Semi-discrete hyperbolic Schrödinger operators
//! `(Lψ)_n = a_n ψ_n + b_n ψ_n′ + c_n ψ_{n+1} + d_n ψ_{n+1}′`, their gauge group,
//! the two factorized representations, Laplace transformations of both types, gauge
//! invariants and chains of invariants.

mod decompose;
mod gauge;
mod invariants;
mod laplace;

pub use decompose::{decompose_first, decompose_second, FirstDecomposition, SecondDecomposition};
pub use gauge::{canonical_form, gauge_apply, periodic_canonical_form, WindowGauge};
pub use invariants::{
    build_chain, inverse_invariants_step, laplace_invariants_step, telescoping_defect, GaugeInvariants,
};
pub use laplace::{laplace_first, laplace_second};

use num_complex::Complex64;
use thiserror::Error;

use crate::coeffring::{CoeffError, FitConfig, PeriodicFunction};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SemiDiscError {
    #[error(transparent)]
    Coeff(#[from] CoeffError),
    #[error("invalid operator: {0}")]
    Invalid(String),
    #[error("I(y) winds {winding} times around 0, not a multiple of N = {n}: no periodic N-th root")]
    BranchFailure { winding: i64, n: usize },
    #[error("chain step {k} failed: {source}")]
    Chain { k: usize, source: Box<SemiDiscError> },
}

/// Operator with `N`-periodic coefficient sequences of `T`-periodic functions.
#[derive(Clone, Debug, PartialEq)]
pub struct SemiDiscreteOperator {
    pub a: Vec<PeriodicFunction>,
    pub b: Vec<PeriodicFunction>,
    pub c: Vec<PeriodicFunction>,
    pub d: Vec<PeriodicFunction>,
}

/// Index `n` reduced modulo the length of `v`.
pub(crate) fn at<T>(v: &[T], n: i64) -> &T {
    &v[n.rem_euclid(v.len() as i64) as usize]
}

pub(crate) fn fit(
    period: f64,
    cfg: &FitConfig,
    f: impl Fn(f64) -> Complex64,
) -> Result<PeriodicFunction, SemiDiscError> {
    Ok(PeriodicFunction::fit_checked(period, cfg, f)?)
}

impl SemiDiscreteOperator {
    pub fn new(
        a: Vec<PeriodicFunction>,
        b: Vec<PeriodicFunction>,
        c: Vec<PeriodicFunction>,
        d: Vec<PeriodicFunction>,
    ) -> Result<Self, SemiDiscError> {
        let n = a.len();
        if n == 0 || b.len() != n || c.len() != n || d.len() != n {
            return Err(SemiDiscError::Invalid(format!(
                "coefficient lengths differ or are empty: {} {} {} {}",
                a.len(),
                b.len(),
                c.len(),
                d.len()
            )));
        }
        let t = a[0].period();
        let all = a.iter().chain(&b).chain(&c).chain(&d);
        if all.clone().any(|f| (f.period() - t).abs() > 1e-12 * t) {
            return Err(SemiDiscError::Invalid("coefficients have different periods".into()));
        }
        Ok(SemiDiscreteOperator { a, b, c, d })
    }

    /// Operator with constant coefficients, given per `n`.
    pub fn constant(
        period: f64,
        a: &[Complex64],
        b: &[Complex64],
        c: &[Complex64],
        d: &[Complex64],
    ) -> Result<Self, SemiDiscError> {
        let lift = |v: &[Complex64]| v.iter().map(|x| PeriodicFunction::constant(period, *x)).collect();
        Self::new(lift(a), lift(b), lift(c), lift(d))
    }

    /// Spatial period `N`.
    pub fn n(&self) -> usize {
        self.a.len()
    }

    /// Period `T` in `y`.
    pub fn period(&self) -> f64 {
        self.a[0].period()
    }

    /// Fails if some `b_n` or `d_n` nearly vanishes.
    pub fn check_nondegenerate(&self, cfg: &FitConfig) -> Result<(), SemiDiscError> {
        for f in self.b.iter().chain(&self.d) {
            f.check_nonvanishing(cfg)?;
        }
        Ok(())
    }

    /// `(Lψ)_n(y)` for `ψ` given by values and derivatives at `n` and `n+1`.
    pub fn apply_at(&self, n: i64, y: f64, psi: [Complex64; 2], dpsi: [Complex64; 2]) -> Complex64 {
        at(&self.a, n).eval(y) * psi[0]
            + at(&self.b, n).eval(y) * dpsi[0]
            + at(&self.c, n).eval(y) * psi[1]
            + at(&self.d, n).eval(y) * dpsi[1]
    }

    /// Maximum pointwise distance of all coefficients on an `grid`-point `y` grid.
    pub fn distance(&self, other: &Self, grid: usize) -> f64 {
        assert_eq!(self.n(), other.n(), "operators have different N");
        let pairs = [(&self.a, &other.a), (&self.b, &other.b), (&self.c, &other.c), (&self.d, &other.d)];
        pairs
            .iter()
            .flat_map(|(x, y)| x.iter().zip(y.iter()).map(|(f, g)| f.distance(g, grid)))
            .fold(0.0, f64::max)
    }

    /// Operator with every coefficient truncated to Fourier degree `m`.
    pub fn truncated(&self, m: usize) -> Self {
        let t = |v: &[PeriodicFunction]| v.iter().map(|f| f.truncated(m)).collect();
        SemiDiscreteOperator { a: t(&self.a), b: t(&self.b), c: t(&self.c), d: t(&self.d) }
    }
}
