//! Gauge transformations `ψ_n ↦ g_n ψ_n`, `L ↦ h L g` and the canonical gauge
//! representatives.

use num_complex::Complex64;

use crate::coeffring::{FitConfig, PeriodicFunction, QuasiPeriodic};

use super::invariants::GaugeInvariants;
use super::{at, decompose_first, fit, SemiDiscError, SemiDiscreteOperator};

/// `ā = h(ag + bg′)`, `b̄ = hbg`, `c̄ = h(cg_{n+1} + dg′_{n+1})`, `d̄ = hdg_{n+1}` with
/// `N`-periodic `g`, `h`. Products are exact (degrees add).
pub fn gauge_apply(
    l: &SemiDiscreteOperator,
    g: &[PeriodicFunction],
    h: &[PeriodicFunction],
    cfg: &FitConfig,
) -> Result<SemiDiscreteOperator, SemiDiscError> {
    let n = l.n();
    if g.len() != n || h.len() != n {
        return Err(SemiDiscError::Invalid(format!("gauge length must equal N = {n}")));
    }
    for f in g.iter().chain(h) {
        f.check_nonvanishing(cfg)?;
    }
    let mut out = SemiDiscreteOperator { a: vec![], b: vec![], c: vec![], d: vec![] };
    for i in 0..n {
        let (g0, g1, hi) = (&g[i], at(g, i as i64 + 1), &h[i]);
        out.a.push(hi.mul(&l.a[i].mul(g0).add(&l.b[i].mul(&g0.derivative()))));
        out.b.push(hi.mul(&l.b[i].mul(g0)));
        out.c.push(hi.mul(&l.c[i].mul(g1).add(&l.d[i].mul(&g1.derivative()))));
        out.d.push(hi.mul(&l.d[i].mul(g1)));
    }
    Ok(out)
}

/// Gauge on the window `n = 0..=N` (`g` has `N+1` entries, `h` has `N`): the
/// normalizing gauge need not be `N`-periodic.
#[derive(Clone, Debug, PartialEq)]
pub struct WindowGauge {
    pub g: Vec<PeriodicFunction>,
    pub h: Vec<PeriodicFunction>,
}

/// Gauge-equivalent operator with `b ≡ d ≡ 1` on the window `n = 0..N−1`, using
/// `g_0 = 1`, `g_{n+1} = g_n b_n/d_n`, `h_n = 1/(b_n g_n)`. The result is `N`-periodic
/// only when `Π b/Π d` is constant; otherwise `c̄_{N−1}` carries the shift of `g_N`.
pub fn canonical_form(
    l: &SemiDiscreteOperator,
    cfg: &FitConfig,
) -> Result<(SemiDiscreteOperator, WindowGauge), SemiDiscError> {
    l.check_nondegenerate(cfg)?;
    normalize(l, cfg, None)
}

/// Gauge-equivalent operator with `b ≡ Z`, `d ≡ 1` using `N`-periodic gauges, where
/// `Z^N = I = Π b/Π d` is the geometric mean of the `b_k/d_k` taken along continuous
/// logarithms that are principal at `y = 0`.
pub fn periodic_canonical_form(
    l: &SemiDiscreteOperator,
    cfg: &FitConfig,
) -> Result<(SemiDiscreteOperator, GaugeInvariants), SemiDiscError> {
    l.check_nondegenerate(cfg)?;
    let t = l.period();
    let n = l.n();
    let ratio = |y: f64| -> Complex64 {
        (0..n).map(|k| l.b[k].eval(y) / l.d[k].eval(y)).product()
    };
    let i_fun = fit(t, cfg, ratio)?;
    // Z = geometric mean of the b_k/d_k along continuous logarithms principal at y = 0
    let mut log_i = QuasiPeriodic::constant(t, Complex64::new(0.0, 0.0));
    for k in 0..n {
        let r = fit(t, cfg, |y| l.b[k].eval(y) / l.d[k].eval(y))?;
        log_i = log_i.add(&r.log_continuous(cfg)?);
    }
    let winding = (log_i.drift.im * t / (2.0 * std::f64::consts::PI)).round() as i64;
    if winding.rem_euclid(n as i64) != 0 {
        return Err(SemiDiscError::BranchFailure { winding, n });
    }
    let z = fit(t, cfg, |y| (log_i.eval(y) / n as f64).exp())?;
    let (canon, _) = normalize(l, cfg, Some(&z))?;
    let inv = GaugeInvariants::from_decomposition(&decompose_first(&canon, cfg)?, i_fun, z);
    Ok((canon, inv))
}

/// Normalizes to `b ≡ z`, `d ≡ 1` (`z ≡ 1` when `None`).
fn normalize(
    l: &SemiDiscreteOperator,
    cfg: &FitConfig,
    z: Option<&PeriodicFunction>,
) -> Result<(SemiDiscreteOperator, WindowGauge), SemiDiscError> {
    let t = l.period();
    let n = l.n();
    let zval = |y: f64| z.map_or(Complex64::new(1.0, 0.0), |z| z.eval(y));
    let zlog = |y: f64| z.map_or(Complex64::new(0.0, 0.0), |z| z.eval_derivative(y) / z.eval(y));
    // (log g_n)′ = Σ_{k<n} (b_k′/b_k − d_k′/d_k) − n (log z)′, for n = 0..=N
    let log_g_prime = |k: usize, y: f64| -> Complex64 {
        (0..k)
            .map(|j| {
                l.b[j].eval_derivative(y) / l.b[j].eval(y) - l.d[j].eval_derivative(y) / l.d[j].eval(y)
            })
            .sum::<Complex64>()
            - zlog(y) * k as f64
    };
    let g_val = |k: usize, y: f64| -> Complex64 {
        (0..k).map(|j| l.b[j].eval(y) / (l.d[j].eval(y) * zval(y))).product()
    };
    let mut gauge = WindowGauge { g: vec![], h: vec![] };
    for k in 0..=n {
        gauge.g.push(fit(t, cfg, |y| g_val(k, y))?);
    }
    let mut out = SemiDiscreteOperator { a: vec![], b: vec![], c: vec![], d: vec![] };
    for k in 0..n {
        let (a, b, c, d) = (&l.a[k], &l.b[k], &l.c[k], &l.d[k]);
        gauge.h.push(fit(t, cfg, |y| zval(y) / (b.eval(y) * g_val(k, y)))?);
        out.a.push(fit(t, cfg, |y| zval(y) * (a.eval(y) / b.eval(y) + log_g_prime(k, y)))?);
        out.b.push(z.cloned().unwrap_or_else(|| PeriodicFunction::real_constant(t, 1.0)));
        out.c.push(fit(t, cfg, |y| c.eval(y) / d.eval(y) + log_g_prime(k + 1, y))?);
        out.d.push(PeriodicFunction::real_constant(t, 1.0));
    }
    Ok((out, gauge))
}
