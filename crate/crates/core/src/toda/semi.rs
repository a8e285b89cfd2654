//! Semi-discrete lattices: `w^{k+1}_n − w^k_n − (w^k_{n+1} − w^{k−1}_{n+1}) = (log w^k_n)′ − (log w^k_{n+1})′`
//! and `(g^k_n − g^k_{n+1})′ = e^{g^{k+1}_n − g^k_{n+1}} − e^{g^k_n − g^{k−1}_{n+1}}`.

use num_complex::Complex64;

use crate::coeffring::{FitConfig, PeriodicFunction, QuasiPeriodic};
use crate::semidisc::GaugeInvariants;

use super::TodaError;

/// `wᵏₙ` on a window `k ∈ [0, K)` of layers, periodic in `n` with period `N`.
#[derive(Clone, Debug, PartialEq)]
pub struct SemiDiscreteField {
    w: Vec<Vec<PeriodicFunction>>,
}

impl SemiDiscreteField {
    pub fn new(w: Vec<Vec<PeriodicFunction>>) -> Result<Self, TodaError> {
        let n = w.first().map(Vec::len).ok_or(TodaError::Shape)?;
        if n == 0 || w.iter().any(|layer| layer.len() != n) {
            return Err(TodaError::Shape);
        }
        Ok(SemiDiscreteField { w })
    }

    /// The `w` layers of a chain of invariants.
    pub fn from_chain(chain: &[GaugeInvariants]) -> Result<Self, TodaError> {
        Self::new(chain.iter().map(|inv| inv.w.clone()).collect())
    }

    pub fn layers(&self) -> usize {
        self.w.len()
    }

    pub fn n(&self) -> usize {
        self.w[0].len()
    }

    pub fn period(&self) -> f64 {
        self.w[0][0].period()
    }

    pub fn w(&self, k: i64, n: i64) -> Result<&PeriodicFunction, TodaError> {
        if k < 0 || k as usize >= self.layers() {
            return Err(TodaError::MissingLayer { k, n });
        }
        Ok(&self.w[k as usize][n.rem_euclid(self.n() as i64) as usize])
    }

    /// Checks that every `w` stays away from zero.
    pub fn check_nonvanishing(&self, cfg: &FitConfig) -> Result<(), TodaError> {
        for layer in &self.w {
            for w in layer {
                w.check_nonvanishing(cfg)?;
            }
        }
        Ok(())
    }
}

/// Residual of the compatibility lattice at `(k, n)`; needs layers `k − 1, k, k + 1`.
pub fn eqw_residual(field: &SemiDiscreteField, k: i64, n: i64, cfg: &FitConfig) -> Result<PeriodicFunction, TodaError> {
    let up = field.w(k + 1, n)?;
    let here = field.w(k, n)?;
    let right = field.w(k, n + 1)?;
    let down_right = field.w(k - 1, n + 1)?;
    let lhs = up.sub(here).sub(right).add(down_right);
    let rhs = here.log_derivative(cfg)?.sub(&right.log_derivative(cfg)?);
    Ok(lhs.sub(&rhs))
}

/// `gᵏₙ` with the constants `cᵏₙ` used to build it. Entries outside the reachable
/// index set are `None`.
#[derive(Clone, Debug, PartialEq)]
pub struct GField {
    pub g: Vec<Vec<Option<QuasiPeriodic>>>,
    pub c: Vec<Vec<Option<Complex64>>>,
}

impl GField {
    pub fn get(&self, k: i64, n: i64) -> Result<&QuasiPeriodic, TodaError> {
        let missing = TodaError::MissingLayer { k, n };
        if k < 0 || n < 0 {
            return Err(missing);
        }
        self.g.get(k as usize).and_then(|row| row.get(n as usize)).and_then(Option::as_ref).ok_or(missing)
    }
}

/// Builds `gᵏₙ` from a solution of the compatibility lattice:
/// `gᵏₙ − g^{k−1}_{n+1} = log wᵏₙ` and `gᵏₙ − gᵏ_{n+1} = ∫₀^y (w^{k+1}_n − wᵏₙ) + cᵏₙ`,
/// with `cᵏ₀ = rᵏ` and the remaining constants fixed by the compatibility relation
/// `c^{k−1}_{n+1} = cᵏₙ + ∫₀^y(w^{k+1}_n − wᵏ_{n+1} − wᵏₙ + w^{k−1}_{n+1}) + log(wᵏ_{n+1}/wᵏₙ)`,
/// whose right side must not depend on `y`. For `K` layers, `g` is produced for
/// `k ≤ K − 2`, `k + n ≤ K − 1`.
pub fn reconstruct_g(
    field: &SemiDiscreteField,
    g00: &QuasiPeriodic,
    r: &[Complex64],
    cfg: &FitConfig,
    tol: f64,
) -> Result<GField, TodaError> {
    let layers = field.layers();
    if layers < 2 {
        return Err(TodaError::Shape);
    }
    let kmax = layers - 2;
    let logs: Vec<Vec<QuasiPeriodic>> = (0..layers)
        .map(|k| (0..=layers).map(|n| field.w(k as i64, n as i64)?.log_continuous(cfg).map_err(TodaError::from)).collect())
        .collect::<Result<_, _>>()?;
    let w = |k: usize, n: usize| field.w(k as i64, n as i64).expect("index in window");
    // compatibility expression X^k_n, constant in y for a solution
    let compat = |k: usize, n: usize| -> Result<Complex64, TodaError> {
        let integrand = w(k + 1, n).sub(w(k, n + 1)).sub(w(k, n)).add(w(k - 1, n + 1));
        let x = integrand.antiderivative().add(&logs[k][n + 1]).sub(&logs[k][n]);
        let variation = x.variation(cfg.nodes());
        if variation > tol * (1.0 + x.periodic.sup_norm(cfg.nodes())) {
            return Err(TodaError::IncompatibleField { k, n, variation });
        }
        Ok(x.eval(0.0))
    };
    let mut c: Vec<Vec<Option<Complex64>>> = vec![vec![None; layers]; layers];
    for (k, row) in c.iter_mut().enumerate().take(kmax + 1) {
        row[0] = Some(r.get(k).copied().unwrap_or_default());
    }
    for s in 1..=kmax {
        // c^k_n with k + n = s, n ≥ 1, from c^{k+1}_{n−1}
        for n in 1..=s {
            let k = s - n;
            let prev = c[k + 1][n - 1].expect("filled on the previous diagonal");
            c[k][n] = Some(prev + compat(k + 1, n - 1)?);
        }
    }
    let mut g: Vec<Vec<Option<QuasiPeriodic>>> = vec![vec![None; layers]; layers];
    g[0][0] = Some(g00.clone());
    for k in 1..=kmax {
        let prev = g[k - 1][0].clone().expect("column filled upwards");
        let step = w(k, 0).sub(w(k - 1, 0)).antiderivative();
        let ck = c[k - 1][0].expect("column constants");
        g[k][0] = Some(prev.sub(&step).add_constant(-ck).add(&logs[k][0]));
    }
    for k in 0..=kmax {
        for n in 0..layers - 1 - k {
            let prev = g[k][n].clone().expect("row filled rightwards");
            let step = w(k + 1, n).sub(w(k, n)).antiderivative();
            let ck = c[k][n].expect("row constants");
            g[k][n + 1] = Some(prev.sub(&step).add_constant(-ck));
        }
    }
    Ok(GField { g, c })
}

/// Residual `(gᵏₙ − gᵏ_{n+1})′ − e^{g^{k+1}_n − gᵏ_{n+1}} + e^{gᵏₙ − g^{k−1}_{n+1}}`, sampled on
/// `cfg.nodes()` points and interpolated.
pub fn toda_residual_2d1(g: &GField, k: i64, n: i64, cfg: &FitConfig) -> Result<PeriodicFunction, TodaError> {
    let (here, right) = (g.get(k, n)?, g.get(k, n + 1)?);
    let (up, down_right) = (g.get(k + 1, n)?, g.get(k - 1, n + 1)?);
    let period = here.period();
    let nodes = cfg.nodes() | 1;
    let samples: Vec<Complex64> = (0..nodes)
        .map(|j| {
            let y = period * j as f64 / nodes as f64;
            let lhs = here.eval_derivative(y) - right.eval_derivative(y);
            lhs - (up.eval(y) - right.eval(y)).exp() + (here.eval(y) - down_right.eval(y)).exp()
        })
        .collect();
    Ok(PeriodicFunction::interpolate(period, &samples)?)
}
