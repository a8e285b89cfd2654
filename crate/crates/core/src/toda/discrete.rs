//! The completely discretized 2D Toda lattice on the invariants `w^{(k)}_{n,m}`:
//! `1 + w^{(k+2)}_{n+1,m} = (1 + w^{(k+1)}_{n+1,m})(1 + w^{(k+1)}_{n,m+1})/(1 + w^{(k)}_{n,m+1}) · W^{(k+1)}_{n,m}`
//! with `W_{n,m} = w_{n,m}w_{n+1,m+1}/(w_{n,m+1}w_{n+1,m})`.

use num_traits::{One, Zero};

use crate::coeffring::Rational;
use crate::disc::{DiscError, DiscreteGaugeInvariants, NormalForms};

use super::TodaError;

/// Layers of `w^{(k)}` on the first fundamental box (index `i + jδ̃`).
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteField {
    pub nf: NormalForms,
    pub layers: Vec<Vec<Rational>>,
}

impl DiscreteField {
    pub fn new(nf: NormalForms, layers: Vec<Vec<Rational>>) -> Result<Self, TodaError> {
        if layers.iter().any(|l| l.len() != nf.size()) {
            return Err(TodaError::Shape);
        }
        Ok(DiscreteField { nf, layers })
    }

    /// The `w` layers of a chain of invariants.
    pub fn from_chain(chain: &[DiscreteGaugeInvariants]) -> Result<Self, TodaError> {
        let nf = chain.first().ok_or(TodaError::Shape)?.nf;
        Self::new(nf, chain.iter().map(|inv| inv.w.clone()).collect())
    }

    pub fn w(&self, k: usize, n: i64, m: i64) -> &Rational {
        &self.layers[k][self.nf.index(n, m)]
    }
}

/// Solves for layer `k + 2` from layers `k` and `k + 1`.
pub fn discrete_toda_step(field: &DiscreteField, k: usize) -> Result<Vec<Rational>, TodaError> {
    if k + 1 >= field.layers.len() {
        return Err(TodaError::MissingLayer { k: k as i64 + 1, n: 0 });
    }
    let nf = field.nf;
    for layer in [k, k + 1] {
        for idx in 0..nf.size() {
            let (n, m) = nf.site(idx);
            let w = field.w(layer, n, m);
            if w.is_zero() || (w + Rational::one()).is_zero() {
                return Err(DiscError::DegenerateW { n, m }.into());
            }
        }
    }
    let one = Rational::one();
    let mut next = vec![Rational::zero(); nf.size()];
    for idx in 0..nf.size() {
        // the unknown sits at (n + 1, m)
        let (n, m) = {
            let (i, j) = nf.site(idx);
            (i - 1, j)
        };
        let w1 = |a: i64, b: i64| field.w(k + 1, a, b);
        let ratio = w1(n, m) * w1(n + 1, m + 1) / (w1(n, m + 1) * w1(n + 1, m));
        let value = (&one + w1(n + 1, m)) * (&one + w1(n, m + 1)) / (&one + field.w(k, n, m + 1)) * ratio;
        next[nf.index(n + 1, m)] = value - &one;
    }
    Ok(next)
}
