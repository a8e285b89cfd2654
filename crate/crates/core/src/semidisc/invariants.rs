//! Gauge invariants `(A_n, w_n)` with `I`, `Z`, the Laplace action on them and chains.

use num_complex::Complex64;

use crate::coeffring::{FitConfig, PeriodicFunction};

use super::{at, fit, FirstDecomposition, SemiDiscError, SemiDiscreteOperator};

/// Invariants of the operator normalized to `b ≡ Z`, `d ≡ 1`. `A` is determined up to a
/// common additive function of `y` (the residual gauge `g_n ≡ φ(y)`), `w` exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct GaugeInvariants {
    pub a: Vec<PeriodicFunction>,
    pub w: Vec<PeriodicFunction>,
    pub i: PeriodicFunction,
    pub z: PeriodicFunction,
}

impl GaugeInvariants {
    pub fn from_decomposition(dec: &FirstDecomposition, i: PeriodicFunction, z: PeriodicFunction) -> Self {
        GaugeInvariants { a: dec.a.clone(), w: dec.w.clone(), i, z }
    }

    /// Invariants with `I ≡ Z ≡ 1`.
    pub fn with_unit_z(a: Vec<PeriodicFunction>, w: Vec<PeriodicFunction>) -> Self {
        let t = a[0].period();
        let one = PeriodicFunction::real_constant(t, 1.0);
        GaugeInvariants { a, w, i: one.clone(), z: one }
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn period(&self) -> f64 {
        self.z.period()
    }

    /// Representative operator `a = Z(A + w)`, `b = Z`, `c = A − (log Z)′`, `d = 1`.
    pub fn to_operator(&self, cfg: &FitConfig) -> Result<SemiDiscreteOperator, SemiDiscError> {
        let t = self.period();
        let zlog = self.z.log_derivative(cfg)?;
        let one = PeriodicFunction::real_constant(t, 1.0);
        let mut l = SemiDiscreteOperator { a: vec![], b: vec![], c: vec![], d: vec![] };
        for n in 0..self.n() {
            l.a.push(self.z.mul(&self.a[n].add(&self.w[n])));
            l.b.push(self.z.clone());
            l.c.push(self.a[n].sub(&zlog));
            l.d.push(one.clone());
        }
        Ok(l)
    }

    /// Largest pointwise discrepancy of `w` and of `A` modulo a common shift
    /// (`A_n − A_0` is compared), over a `grid`-point `y` grid.
    pub fn distance_mod_shift(&self, other: &Self, grid: usize) -> f64 {
        assert_eq!(self.n(), other.n());
        let t = self.period();
        let mut worst: f64 = 0.0;
        for j in 0..grid {
            let y = t * j as f64 / grid as f64;
            let shift = self.a[0].eval(y) - other.a[0].eval(y);
            for n in 0..self.n() {
                worst = worst.max((self.a[n].eval(y) - other.a[n].eval(y) - shift).norm());
                worst = worst.max((self.w[n].eval(y) - other.w[n].eval(y)).norm());
            }
        }
        worst
    }

    /// Largest pointwise discrepancy of `A` and `w` without quotienting the shift.
    pub fn distance(&self, other: &Self, grid: usize) -> f64 {
        assert_eq!(self.n(), other.n());
        self.a
            .iter()
            .zip(&other.a)
            .chain(self.w.iter().zip(&other.w))
            .map(|(f, g)| f.distance(g, grid))
            .fold(0.0, f64::max)
    }
}

/// Laplace transformation of the first type on invariants:
/// `Ã_n = A_{n+1} + (log w_{n+1})′ + (log Z)′`,
/// `w̃_n = w_n + A_n + (log w_n)′ − A_{n+1} − (log w_{n+1})′ − (log Z)′`.
pub fn laplace_invariants_step(inv: &GaugeInvariants, cfg: &FitConfig) -> Result<GaugeInvariants, SemiDiscError> {
    let t = inv.period();
    for w in &inv.w {
        w.check_nonvanishing(cfg)?;
    }
    inv.z.check_nonvanishing(cfg)?;
    let lw = |n: i64, y: f64| {
        let w = at(&inv.w, n);
        w.eval_derivative(y) / w.eval(y)
    };
    let zl = |y: f64| inv.z.eval_derivative(y) / inv.z.eval(y);
    let a_new = |n: i64, y: f64| at(&inv.a, n + 1).eval(y) + lw(n + 1, y) + zl(y);
    let mut out = GaugeInvariants { a: vec![], w: vec![], i: inv.i.clone(), z: inv.z.clone() };
    for n in 0..inv.n() as i64 {
        out.a.push(fit(t, cfg, |y| a_new(n, y))?);
        out.w.push(fit(t, cfg, |y| {
            at(&inv.w, n).eval(y) + at(&inv.a, n).eval(y) + lw(n, y) - a_new(n, y)
        })?);
    }
    Ok(out)
}

/// Inverse of [`laplace_invariants_step`] (the second-type transformation):
/// `w_n = w̃_n + Ã_n − Ã_{n−1} + (log Z)′`, `A_n = Ã_{n−1} − (log Z)′ − (log w_n)′`.
pub fn inverse_invariants_step(inv: &GaugeInvariants, cfg: &FitConfig) -> Result<GaugeInvariants, SemiDiscError> {
    let t = inv.period();
    inv.z.check_nonvanishing(cfg)?;
    let zl = |y: f64| inv.z.eval_derivative(y) / inv.z.eval(y);
    let mut w = Vec::with_capacity(inv.n());
    for n in 0..inv.n() as i64 {
        w.push(fit(t, cfg, |y| {
            at(&inv.w, n).eval(y) + at(&inv.a, n).eval(y) - at(&inv.a, n - 1).eval(y) + zl(y)
        })?);
    }
    let mut a = Vec::with_capacity(inv.n());
    for n in 0..inv.n() as i64 {
        let wn = at(&w, n);
        wn.check_nonvanishing(cfg)?;
        a.push(fit(t, cfg, |y| {
            at(&inv.a, n - 1).eval(y) - zl(y) - wn.eval_derivative(y) / wn.eval(y)
        })?);
    }
    Ok(GaugeInvariants { a, w, i: inv.i.clone(), z: inv.z.clone() })
}

/// `K` successive invariant sets `inv₀, Λ(inv₀), …, Λ^{K−1}(inv₀)`.
pub fn build_chain(inv0: &GaugeInvariants, k: usize, cfg: &FitConfig) -> Result<Vec<GaugeInvariants>, SemiDiscError> {
    let mut chain = vec![inv0.clone()];
    for step in 1..k {
        let next = laplace_invariants_step(chain.last().expect("non-empty chain"), cfg)
            .map_err(|e| SemiDiscError::Chain { k: step, source: Box::new(e) })?;
        chain.push(next);
    }
    chain.truncate(k.max(1));
    Ok(chain)
}

/// Pointwise value of `Σ_n (w̃_n − w_n)` minus the expected `−N (log Z)′`.
pub fn telescoping_defect(before: &GaugeInvariants, after: &GaugeInvariants, y: f64) -> Complex64 {
    let sum: Complex64 = before.w.iter().zip(&after.w).map(|(w, wt)| wt.eval(y) - w.eval(y)).sum();
    sum + before.z.eval_derivative(y) / before.z.eval(y) * before.n() as f64
}
