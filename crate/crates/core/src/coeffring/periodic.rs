//! Smooth periodic functions of `y` held as truncated Fourier series.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::CoeffError;

/// Truncation and tolerance settings for nonlinear operations on periodic functions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitConfig {
    /// Degree `M` of re-fitted results (collocation on `2M+1` nodes).
    pub max_degree: usize,
    /// Values closer to zero than this make reciprocals and logarithms fail.
    pub vanish_tol: f64,
    /// Maximum relative residual of a fit on the refined check grid.
    pub fit_tol: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig { max_degree: 8, vanish_tol: 1e-9, fit_tol: 1e-9 }
    }
}

impl FitConfig {
    pub fn with_degree(max_degree: usize) -> Self {
        FitConfig { max_degree, ..Default::default() }
    }

    /// Number of collocation nodes.
    pub fn nodes(&self) -> usize {
        2 * self.max_degree + 1
    }
}

/// `f(y) = Σ_{k=-M}^{M} c_k e^{2πiky/T}`.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicFunction {
    period: f64,
    coeffs: Vec<Complex64>,
}

fn check_period(period: f64) -> Result<(), CoeffError> {
    if period.is_finite() && period > 0.0 {
        Ok(())
    } else {
        Err(CoeffError::InvalidPeriod(period))
    }
}

impl PeriodicFunction {
    /// Coefficients are ordered `c_{-M}, …, c_M`; the length must be odd.
    pub fn new(period: f64, coeffs: Vec<Complex64>) -> Result<Self, CoeffError> {
        check_period(period)?;
        if coeffs.len().is_multiple_of(2) {
            return Err(CoeffError::EvenCoefficientCount(coeffs.len()));
        }
        Ok(PeriodicFunction { period, coeffs })
    }

    /// Panics if `period` is not positive and finite.
    pub fn constant(period: f64, value: Complex64) -> Self {
        check_period(period).expect("invalid period");
        PeriodicFunction { period, coeffs: vec![value] }
    }

    pub fn real_constant(period: f64, value: f64) -> Self {
        Self::constant(period, Complex64::new(value, 0.0))
    }

    pub fn zero(period: f64) -> Self {
        Self::real_constant(period, 0.0)
    }

    /// Builds a function from `(k, c_k)` pairs; unspecified modes are zero.
    pub fn from_modes(period: f64, modes: &[(i64, Complex64)]) -> Self {
        check_period(period).expect("invalid period");
        let m = modes.iter().map(|(k, _)| k.unsigned_abs() as usize).max().unwrap_or(0);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * m + 1];
        for &(k, c) in modes {
            coeffs[(k + m as i64) as usize] += c;
        }
        PeriodicFunction { period, coeffs }
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() / 2
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `c_k`, zero outside the stored range.
    pub fn coeff(&self, k: i64) -> Complex64 {
        let m = self.degree() as i64;
        if k.abs() > m {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(k + m) as usize]
        }
    }

    fn omega(&self) -> f64 {
        2.0 * PI / self.period
    }

    fn weighted_sum(&self, y: f64, weight: impl Fn(i64) -> Complex64) -> Complex64 {
        let m = self.degree();
        let z = Complex64::from_polar(1.0, self.omega() * y);
        let zc = z.conj();
        let mut pos = Complex64::new(0.0, 0.0);
        let mut neg = Complex64::new(0.0, 0.0);
        for k in (1..=m).rev() {
            let ki = k as i64;
            pos = (pos + self.coeffs[m + k] * weight(ki)) * z;
            neg = (neg + self.coeffs[m - k] * weight(-ki)) * zc;
        }
        pos + neg + self.coeffs[m] * weight(0)
    }

    pub fn eval(&self, y: f64) -> Complex64 {
        self.weighted_sum(y, |_| Complex64::new(1.0, 0.0))
    }

    /// `f'(y)` without materializing the derivative.
    pub fn eval_derivative(&self, y: f64) -> Complex64 {
        let w = self.omega();
        self.weighted_sum(y, |k| Complex64::new(0.0, w * k as f64))
    }

    pub fn derivative(&self) -> Self {
        let m = self.degree() as i64;
        let w = self.omega();
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(idx, c)| c * Complex64::new(0.0, w * (idx as i64 - m) as f64))
            .collect();
        PeriodicFunction { period: self.period, coeffs }
    }

    /// `∫_0^y f`, which carries the linear drift `c_0·y`.
    pub fn antiderivative(&self) -> QuasiPeriodic {
        let m = self.degree() as i64;
        let w = self.omega();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); self.coeffs.len()];
        let mut offset = Complex64::new(0.0, 0.0);
        for k in -m..=m {
            if k == 0 {
                continue;
            }
            let c = self.coeff(k) / Complex64::new(0.0, w * k as f64);
            coeffs[(k + m) as usize] = c;
            offset += c;
        }
        coeffs[m as usize] = -offset;
        QuasiPeriodic {
            drift: self.coeff(0),
            periodic: PeriodicFunction { period: self.period, coeffs },
        }
    }

    /// Mean value `c_0`.
    pub fn mean(&self) -> Complex64 {
        self.coeff(0)
    }

    /// `∫_0^T f = T·c_0`.
    pub fn mean_integral(&self) -> Complex64 {
        self.coeff(0) * self.period
    }

    fn assert_same_period(&self, other: &Self) {
        let scale = self.period.abs().max(other.period.abs());
        assert!(
            (self.period - other.period).abs() <= 1e-12 * scale,
            "period mismatch: {} vs {}",
            self.period,
            other.period
        );
    }

    /// Exact product; the degree is the sum of the degrees.
    pub fn mul(&self, other: &Self) -> Self {
        self.assert_same_period(other);
        let (m1, m2) = (self.degree(), other.degree());
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * (m1 + m2) + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        PeriodicFunction { period: self.period, coeffs }
    }

    fn combine(&self, other: &Self, sign: f64) -> Self {
        self.assert_same_period(other);
        let m = self.degree().max(other.degree()) as i64;
        let coeffs = (-m..=m).map(|k| self.coeff(k) + other.coeff(k) * sign).collect();
        PeriodicFunction { period: self.period, coeffs }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, 1.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, -1.0)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        PeriodicFunction { period: self.period, coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    pub fn neg(&self) -> Self {
        self.scale(Complex64::new(-1.0, 0.0))
    }

    pub fn add_constant(&self, s: Complex64) -> Self {
        let mut out = self.clone();
        let m = out.degree();
        out.coeffs[m] += s;
        out
    }

    /// Drops modes with `|k| > m`.
    pub fn truncated(&self, m: usize) -> Self {
        if m >= self.degree() {
            return self.clone();
        }
        let coeffs = (-(m as i64)..=m as i64).map(|k| self.coeff(k)).collect();
        PeriodicFunction { period: self.period, coeffs }
    }

    /// Values at `y_j = jT/n`, `j = 0..n`.
    pub fn grid_values(&self, n: usize) -> Vec<Complex64> {
        (0..n).map(|j| self.eval(self.period * j as f64 / n as f64)).collect()
    }

    /// `max_j |f(y_j)|` over an `n`-point uniform grid.
    pub fn sup_norm(&self, n: usize) -> f64 {
        self.grid_values(n).iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `max_j |f(y_j) − g(y_j)|` over an `n`-point uniform grid.
    pub fn distance(&self, other: &Self, n: usize) -> f64 {
        self.assert_same_period(other);
        (0..n)
            .map(|j| {
                let y = self.period * j as f64 / n as f64;
                (self.eval(y) - other.eval(y)).norm()
            })
            .fold(0.0, f64::max)
    }

    /// True when `c_{-k} = conj(c_k)` to `tol`, i.e. the function is real-valued.
    pub fn is_real(&self, tol: f64) -> bool {
        let m = self.degree() as i64;
        (0..=m).all(|k| (self.coeff(-k) - self.coeff(k).conj()).norm() <= tol)
    }

    /// Trigonometric interpolation of `n` (odd) equispaced samples.
    pub fn interpolate(period: f64, samples: &[Complex64]) -> Result<Self, CoeffError> {
        check_period(period)?;
        let n = samples.len();
        if n.is_multiple_of(2) {
            return Err(CoeffError::EvenCoefficientCount(n));
        }
        let mut buf = samples.to_vec();
        FftPlanner::<f64>::new().plan_fft_forward(n).process(&mut buf);
        let m = n / 2;
        let scale = 1.0 / n as f64;
        let coeffs = (0..n)
            .map(|idx| {
                let k = idx as i64 - m as i64;
                buf[k.rem_euclid(n as i64) as usize] * scale
            })
            .collect();
        Ok(PeriodicFunction { period, coeffs })
    }

    /// Collocation fit of `f` at degree `cfg.max_degree`, validated on a twice-finer grid.
    pub fn fit_checked(
        period: f64,
        cfg: &FitConfig,
        f: impl Fn(f64) -> Complex64,
    ) -> Result<Self, CoeffError> {
        let n = cfg.nodes();
        let fine: Vec<Complex64> = (0..2 * n).map(|j| f(period * j as f64 / (2 * n) as f64)).collect();
        Self::fit_fine_samples(period, cfg, &fine, 1)
    }

    /// Fits from the samples at every `2·stride`-th point of `fine` and checks the fit at
    /// every `stride`-th point. `fine.len()` must equal `2·stride·(2M+1)`.
    fn fit_fine_samples(
        period: f64,
        cfg: &FitConfig,
        fine: &[Complex64],
        stride: usize,
    ) -> Result<Self, CoeffError> {
        let n = cfg.nodes();
        debug_assert_eq!(fine.len(), 2 * stride * n);
        if let Some(v) = fine.iter().find(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(CoeffError::FitDivergence { residual: v.norm() });
        }
        let nodes: Vec<Complex64> = fine.iter().step_by(2 * stride).copied().collect();
        let g = Self::interpolate(period, &nodes)?;
        let scale = fine.iter().map(|v| v.norm()).fold(1.0, f64::max);
        let mut residual: f64 = 0.0;
        for (j, v) in fine.iter().enumerate().step_by(stride) {
            let y = period * j as f64 / fine.len() as f64;
            residual = residual.max((g.eval(y) - v).norm() / scale);
        }
        if residual > cfg.fit_tol {
            return Err(CoeffError::FitDivergence { residual });
        }
        Ok(g)
    }

    /// Fails with `NearVanishing` if `|f|` drops to `cfg.vanish_tol` on the check grid
    /// of `2·(2M+1)` points.
    pub fn check_nonvanishing(&self, cfg: &FitConfig) -> Result<(), CoeffError> {
        let n = 2 * cfg.nodes().max(2 * self.degree() + 1);
        for j in 0..n {
            let y = self.period * j as f64 / n as f64;
            let v = self.eval(y);
            if v.norm() <= cfg.vanish_tol {
                return Err(CoeffError::NearVanishing { y, value: v.norm() });
            }
        }
        Ok(())
    }

    /// `1/f` re-fitted at degree `cfg.max_degree`.
    pub fn reciprocal(&self, cfg: &FitConfig) -> Result<Self, CoeffError> {
        self.check_nonvanishing(cfg)?;
        Self::fit_checked(self.period, cfg, |y| self.eval(y).inv())
    }

    /// `f'/f` re-fitted at degree `cfg.max_degree`.
    pub fn log_derivative(&self, cfg: &FitConfig) -> Result<Self, CoeffError> {
        self.check_nonvanishing(cfg)?;
        Self::fit_checked(self.period, cfg, |y| self.eval_derivative(y) / self.eval(y))
    }

    /// `f/g` re-fitted at degree `cfg.max_degree`.
    pub fn div(&self, other: &Self, cfg: &FitConfig) -> Result<Self, CoeffError> {
        self.assert_same_period(other);
        other.check_nonvanishing(cfg)?;
        Self::fit_checked(self.period, cfg, |y| self.eval(y) / other.eval(y))
    }

    /// Continuous logarithm, principal at `y = 0`. A winding number `m` of `f` around
    /// the origin appears as the drift `2πim/T`.
    pub fn log_continuous(&self, cfg: &FitConfig) -> Result<QuasiPeriodic, CoeffError> {
        const STRIDE: usize = 4;
        let n = cfg.nodes();
        let dense_len = 2 * STRIDE * n;
        let dense: Vec<Complex64> = (0..dense_len)
            .map(|j| self.eval(self.period * j as f64 / dense_len as f64))
            .collect();
        for (j, v) in dense.iter().enumerate() {
            if v.norm() <= cfg.vanish_tol {
                let y = self.period * j as f64 / dense_len as f64;
                return Err(CoeffError::NearVanishing { y, value: v.norm() });
            }
        }
        let mut phase = Vec::with_capacity(dense_len);
        let mut theta = dense[0].arg();
        phase.push(theta);
        for j in 1..=dense_len {
            let step = (dense[j % dense_len] / dense[j - 1]).arg();
            if step.abs() > 1.0 {
                return Err(CoeffError::BranchTracking { y: self.period * j as f64 / dense_len as f64 });
            }
            theta += step;
            if j < dense_len {
                phase.push(theta);
            }
        }
        let winding = ((theta - phase[0]) / (2.0 * PI)).round();
        let drift = Complex64::new(0.0, 2.0 * PI * winding / self.period);
        let fine: Vec<Complex64> = dense
            .iter()
            .zip(&phase)
            .enumerate()
            .map(|(j, (v, th))| {
                let y = self.period * j as f64 / dense_len as f64;
                Complex64::new(v.norm().ln(), *th) - drift * y
            })
            .collect();
        let periodic = Self::fit_fine_samples(self.period, cfg, &fine, STRIDE)?;
        Ok(QuasiPeriodic { drift, periodic })
    }
}

/// `q(y) = s·y + p(y)` with `p` periodic: antiderivatives and continuous logarithms.
#[derive(Clone, Debug, PartialEq)]
pub struct QuasiPeriodic {
    pub drift: Complex64,
    pub periodic: PeriodicFunction,
}

impl QuasiPeriodic {
    pub fn from_periodic(p: PeriodicFunction) -> Self {
        QuasiPeriodic { drift: Complex64::new(0.0, 0.0), periodic: p }
    }

    pub fn constant(period: f64, value: Complex64) -> Self {
        Self::from_periodic(PeriodicFunction::constant(period, value))
    }

    pub fn period(&self) -> f64 {
        self.periodic.period()
    }

    pub fn eval(&self, y: f64) -> Complex64 {
        self.drift * y + self.periodic.eval(y)
    }

    pub fn derivative(&self) -> PeriodicFunction {
        self.periodic.derivative().add_constant(self.drift)
    }

    pub fn eval_derivative(&self, y: f64) -> Complex64 {
        self.drift + self.periodic.eval_derivative(y)
    }

    pub fn add(&self, other: &Self) -> Self {
        QuasiPeriodic { drift: self.drift + other.drift, periodic: self.periodic.add(&other.periodic) }
    }

    pub fn sub(&self, other: &Self) -> Self {
        QuasiPeriodic { drift: self.drift - other.drift, periodic: self.periodic.sub(&other.periodic) }
    }

    pub fn add_constant(&self, c: Complex64) -> Self {
        QuasiPeriodic { drift: self.drift, periodic: self.periodic.add_constant(c) }
    }

    /// True when the drift vanishes, i.e. the function is genuinely periodic.
    pub fn is_periodic(&self, tol: f64) -> bool {
        self.drift.norm() <= tol
    }

    /// `max_j |q(y_j) − q(0)|` over an `n`-point grid of one period.
    pub fn variation(&self, n: usize) -> f64 {
        let q0 = self.eval(0.0);
        (0..=n)
            .map(|j| (self.eval(self.period() * j as f64 / n as f64) - q0).norm())
            .fold(0.0, f64::max)
    }
}
