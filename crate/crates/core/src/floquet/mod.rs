//! Direct spectral problem for periodic semi-discrete operators normalized to
//! `b ≡ −1`, `d ≡ 1`: `(Lψ)_n = a_nψ_n − ψ_n′ + c_nψ_{n+1} + ψ_{n+1}′`.
//!
//! Floquet solutions with `ψ_{n+N} = ρψ_n` satisfy `BΨ′ + CΨ = 0`, i.e.
//! `Ψ′ = A(y, ρ)Ψ` with `A = −B⁻¹C`; the multipliers `μ` are the eigenvalues of the
//! monodromy `Φ(T, 0, ρ)`.

mod branch;
mod integrator;
mod qpoint;

pub use branch::{branch_point_scan, BranchPoint, Region};
pub use integrator::{dopri5, Integration};
pub use qpoint::{bounded_limit_prediction, q_asymptotics, QAsymptotics, QSample};

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::coeffring::PeriodicFunction;
use crate::linalg::{CMat, EigenError};
use crate::semidisc::SemiDiscreteOperator;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FloquetError {
    #[error("ρ = {rho} lies within the pole guard of ρ = 1")]
    PoleAtOne { rho: Complex64 },
    #[error("integrator step size underflow at y = {y} (h = {step:e})")]
    IntegratorFailure { y: f64, step: f64 },
    #[error(transparent)]
    Eigen(#[from] EigenError),
    #[error("operator is not normalized to b ≡ −1, d ≡ 1: {0}")]
    NotNormalized(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

/// Periodic operator in the `b ≡ −1`, `d ≡ 1` normalization.
#[derive(Clone, Debug, PartialEq)]
pub struct FloquetSystem {
    pub a: Vec<PeriodicFunction>,
    pub c: Vec<PeriodicFunction>,
    /// Radius of the excluded disk around `ρ = 1`.
    pub pole_guard: f64,
}

/// Monodromy `Φ(T, 0, ρ)` with its multipliers.
#[derive(Clone, Debug)]
pub struct MonodromyResult {
    /// `None` encodes `ρ = ∞`.
    pub rho: Option<Complex64>,
    pub phi: CMat,
    pub eigenvalues: Vec<Complex64>,
    pub err_estimate: f64,
}

/// The two routes to a special fiber.
#[derive(Clone, Debug)]
pub struct FiberReport {
    pub closed_form: Vec<Complex64>,
    pub monodromy: Vec<Complex64>,
    /// Largest relative mismatch after optimal matching.
    pub discrepancy: f64,
}

impl FloquetSystem {
    pub const DEFAULT_POLE_GUARD: f64 = 1e-3;
    pub const DEFAULT_TOL: f64 = 1e-10;

    pub fn new(a: Vec<PeriodicFunction>, c: Vec<PeriodicFunction>) -> Result<Self, FloquetError> {
        if a.is_empty() || a.len() != c.len() {
            return Err(FloquetError::Invalid("a and c must have the same positive length".into()));
        }
        let t = a[0].period();
        if a.iter().chain(&c).any(|f| (f.period() - t).abs() > 1e-12 * t) {
            return Err(FloquetError::Invalid("coefficients have different periods".into()));
        }
        Ok(FloquetSystem { a, c, pole_guard: Self::DEFAULT_POLE_GUARD })
    }

    /// Constant-coefficient system.
    pub fn constant(period: f64, a: &[Complex64], c: &[Complex64]) -> Result<Self, FloquetError> {
        let lift = |v: &[Complex64]| v.iter().map(|x| PeriodicFunction::constant(period, *x)).collect();
        Self::new(lift(a), lift(c))
    }

    /// Accepts an operator whose `b` and `d` are `−1` and `1` to within `tol`.
    pub fn from_operator(l: &SemiDiscreteOperator, tol: f64) -> Result<Self, FloquetError> {
        let t = l.period();
        let minus_one = PeriodicFunction::real_constant(t, -1.0);
        let one = PeriodicFunction::real_constant(t, 1.0);
        let grid = 64;
        for n in 0..l.n() {
            let db = l.b[n].distance(&minus_one, grid);
            let dd = l.d[n].distance(&one, grid);
            if db > tol || dd > tol {
                return Err(FloquetError::NotNormalized(format!("n = {n}: |b+1| = {db:e}, |d−1| = {dd:e}")));
            }
        }
        Self::new(l.a.clone(), l.c.clone())
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn period(&self) -> f64 {
        self.a[0].period()
    }

    pub fn is_constant(&self) -> bool {
        self.a.iter().chain(&self.c).all(|f| f.coeffs().iter().enumerate().all(|(i, c)| i == f.degree() || *c == ZERO))
    }

    fn check_rho(&self, rho: Complex64) -> Result<(), FloquetError> {
        // the boundary itself is admissible, up to rounding in forming ρ − 1
        if (rho - ONE).norm() < self.pole_guard * (1.0 - 1e-9) {
            Err(FloquetError::PoleAtOne { rho })
        } else {
            Ok(())
        }
    }

    /// `B(ρ)`: `−1` on the diagonal, `1` on the superdiagonal, `ρ` added at `(N−1, 0)`.
    pub fn b_matrix(&self, rho: Complex64) -> CMat {
        let n = self.n();
        let mut b = CMat::zeros(n, n);
        for i in 0..n {
            b[(i, i)] -= ONE;
            if i + 1 < n {
                b[(i, i + 1)] += ONE;
            }
        }
        b[(n - 1, 0)] += rho;
        b
    }

    /// Closed form `B⁻¹(ρ) = U/(ρ − 1)` with `U_ij = 1` for `j ≥ i` and `ρ` otherwise.
    pub fn b_inverse(&self, rho: Complex64) -> CMat {
        let n = self.n();
        let s = ONE / (rho - ONE);
        CMat::from_fn(n, n, |i, j| if j >= i { s } else { rho * s })
    }

    /// `C(y, ρ)`: `a` on the diagonal, `c` on the superdiagonal, `ρc_{N−1}` added at
    /// `(N−1, 0)`.
    pub fn c_matrix(&self, y: f64, rho: Complex64) -> CMat {
        let n = self.n();
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] += self.a[i].eval(y);
            let ci = self.c[i].eval(y);
            if i + 1 < n {
                m[(i, i + 1)] += ci;
            } else {
                m[(n - 1, 0)] += rho * ci;
            }
        }
        m
    }

    /// `A(y, ρ) = −B⁻¹(ρ)C(y, ρ)`.
    pub fn a_matrix(&self, y: f64, rho: Complex64) -> CMat {
        self.b_inverse(rho).mul(&self.c_matrix(y, rho)).scale(-ONE)
    }

    /// `A` written in `t = 1/ρ`:
    /// `A(t) = −(L_s C₀ + c_{N−1} U_u E + t U_u C₀)/(1 − t)` with `C₀ = C(y, 0)`,
    /// `L_s` the strict lower ones, `U_u` the upper ones and `E = e_{N−1}e_0ᵀ`.
    pub fn a_matrix_inverse_rho(&self, y: f64, t: Complex64) -> CMat {
        let n = self.n();
        let c0 = self.c_matrix(y, ZERO);
        let ls = CMat::from_fn(n, n, |i, j| if j < i { ONE } else { ZERO });
        let uu = CMat::from_fn(n, n, |i, j| if j >= i { ONE } else { ZERO });
        let mut e = CMat::zeros(n, n);
        e[(n - 1, 0)] = self.c[n - 1].eval(y);
        let num = ls.mul(&c0).add(&uu.mul(&e)).add(&uu.mul(&c0).scale(t));
        num.scale(-ONE / (ONE - t))
    }

    /// Adjoint system matrix `A⁺ = (B⁻¹)ᵀCᵀ`.
    pub fn adjoint_matrix(&self, y: f64, rho: Complex64) -> CMat {
        self.b_inverse(rho).transpose().mul(&self.c_matrix(y, rho).transpose())
    }

    fn integrate(&self, a: impl Fn(f64) -> CMat, tol: f64, periods: usize) -> Result<Integration, FloquetError> {
        let n = self.n();
        dopri5(|y, x| a(y).mul(x), 0.0, self.period() * periods as f64, CMat::identity(n), tol)
    }

    fn result(rho: Option<Complex64>, run: Integration) -> Result<MonodromyResult, FloquetError> {
        let eigenvalues = run.value.eigenvalues()?;
        Ok(MonodromyResult { rho, phi: run.value, eigenvalues, err_estimate: run.err_estimate })
    }

    /// `Φ(T, 0, ρ)` by adaptive integration from the identity.
    pub fn monodromy(&self, rho: Complex64, tol: f64) -> Result<MonodromyResult, FloquetError> {
        self.check_rho(rho)?;
        let binv = self.b_inverse(rho);
        let run = self.integrate(|y| binv.mul(&self.c_matrix(y, rho)).scale(-ONE), tol, 1)?;
        Self::result(Some(rho), run)
    }

    /// `Φ(kT, 0, ρ)`, integrated over `k` periods directly.
    pub fn monodromy_periods(&self, rho: Complex64, tol: f64, periods: usize) -> Result<CMat, FloquetError> {
        self.check_rho(rho)?;
        let binv = self.b_inverse(rho);
        Ok(self.integrate(|y| binv.mul(&self.c_matrix(y, rho)).scale(-ONE), tol, periods)?.value)
    }

    /// Monodromy of the adjoint system `Ψ⁺′ = A⁺Ψ⁺`.
    pub fn adjoint_monodromy(&self, rho: Complex64, tol: f64) -> Result<MonodromyResult, FloquetError> {
        self.check_rho(rho)?;
        let binv_t = self.b_inverse(rho).transpose();
        let run = self.integrate(|y| binv_t.mul(&self.c_matrix(y, rho).transpose()), tol, 1)?;
        Self::result(Some(rho), run)
    }

    /// `log tr Φ(T, 0, ρ)` (or of the adjoint monodromy), integrated over chunks with
    /// renormalization so that exponentially large monodromies stay representable.
    pub(crate) fn log_trace_monodromy(&self, rho: Complex64, tol: f64, adjoint: bool) -> Result<Complex64, FloquetError> {
        self.check_rho(rho)?;
        let binv = self.b_inverse(rho);
        let binv_t = binv.transpose();
        let a = |y: f64| {
            if adjoint {
                binv_t.mul(&self.c_matrix(y, rho).transpose())
            } else {
                binv.mul(&self.c_matrix(y, rho)).scale(-ONE)
            }
        };
        let t = self.period();
        // growth per chunk at most about e^32
        let rate = (0..16).map(|j| a(t * j as f64 / 16.0).inf_norm()).fold(0.0, f64::max);
        let chunks = ((rate * t / 32.0).ceil() as usize).max(1);
        let mut p = CMat::identity(self.n());
        let mut log_scale = 0.0;
        for k in 0..chunks {
            let (y0, y1) = (t * k as f64 / chunks as f64, t * (k + 1) as f64 / chunks as f64);
            p = dopri5(|y, x| a(y).mul(x), y0, y1, p, tol)?.value;
            let m = p.max_abs();
            if !(m.is_finite() && m > 0.0) {
                return Err(FloquetError::Eigen(EigenError::NonFinite));
            }
            log_scale += m.ln();
            p = p.scale(Complex64::new(1.0 / m, 0.0));
        }
        Ok(p.trace().ln() + log_scale)
    }

    /// Monodromy at `ρ = ∞`, from `A(y, t)` at `t = 0`.
    pub fn monodromy_at_infinity(&self, tol: f64) -> Result<MonodromyResult, FloquetError> {
        let run = self.integrate(|y| self.a_matrix_inverse_rho(y, ZERO), tol, 1)?;
        Self::result(None, run)
    }

    /// `exp(A(ρ)T)` for constant coefficients.
    pub fn constant_monodromy(&self, rho: Complex64) -> Result<MonodromyResult, FloquetError> {
        if !self.is_constant() {
            return Err(FloquetError::Invalid("coefficients depend on y".into()));
        }
        self.check_rho(rho)?;
        let phi = self.a_matrix(0.0, rho).scale(Complex64::new(self.period(), 0.0)).exp();
        let eigenvalues = phi.eigenvalues()?;
        Ok(MonodromyResult { rho: Some(rho), phi, eigenvalues, err_estimate: 0.0 })
    }

    /// Multipliers at each `ρ` of the grid; failures are reported per point.
    pub fn spectral_sample(&self, rho_grid: &[Complex64], tol: f64) -> Vec<Result<MonodromyResult, FloquetError>> {
        rho_grid.par_iter().map(|&rho| self.monodromy(rho, tol)).collect()
    }

    /// `P⁺` fiber: `μ_i = e^{∫₀ᵀ a_{i−1}}` against the monodromy at `ρ = 0`.
    pub fn fiber_at_zero(&self, tol: f64) -> Result<FiberReport, FloquetError> {
        let closed_form: Vec<Complex64> = self.a.iter().map(|a| a.mean_integral().exp()).collect();
        let monodromy = self.monodromy(ZERO, tol)?.eigenvalues;
        let discrepancy = multiset_distance(&closed_form, &monodromy, true);
        Ok(FiberReport { closed_form, monodromy, discrepancy })
    }

    /// `P⁻` fiber: `μ_i = e^{−∫₀ᵀ c_{N−i}}` against the monodromy of `A(y, t = 0)`.
    pub fn fiber_at_infinity(&self, tol: f64) -> Result<FiberReport, FloquetError> {
        let n = self.n();
        let closed_form: Vec<Complex64> = (1..=n).map(|i| (-self.c[n - i].mean_integral()).exp()).collect();
        let monodromy = self.monodromy_at_infinity(tol)?.eigenvalues;
        let discrepancy = multiset_distance(&closed_form, &monodromy, true);
        Ok(FiberReport { closed_form, monodromy, discrepancy })
    }

    /// `‖B⁻¹(Φ⁺)ᵀBΦ − I‖_max` and the reciprocity defect of the multipliers.
    pub fn adjoint_check(&self, rho: Complex64, tol: f64) -> Result<AdjointReport, FloquetError> {
        let phi = self.monodromy(rho, tol)?;
        let phi_adj = self.adjoint_monodromy(rho, tol)?;
        let b = self.b_matrix(rho);
        let q = self.b_inverse(rho).mul(&phi_adj.phi.transpose()).mul(&b).mul(&phi.phi);
        let residual = q.sub(&CMat::identity(self.n())).max_abs();
        let recip: Vec<Complex64> = phi_adj.eigenvalues.iter().map(|m| ONE / m).collect();
        let reciprocity = multiset_distance(&phi.eigenvalues, &recip, true);
        Ok(AdjointReport { residual, reciprocity })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct AdjointReport {
    pub residual: f64,
    pub reciprocity: f64,
}

/// Distance between two equal-size multisets of complex numbers under the best
/// matching (exhaustive for sizes ≤ 7, greedy otherwise). With `relative`, each pair is
/// measured by `|x − y|/max(1, |x|)`.
pub fn multiset_distance(xs: &[Complex64], ys: &[Complex64], relative: bool) -> f64 {
    assert_eq!(xs.len(), ys.len(), "multisets of different sizes");
    let cost = |x: Complex64, y: Complex64| {
        let d = (x - y).norm();
        if relative {
            d / x.norm().max(1.0)
        } else {
            d
        }
    };
    let n = xs.len();
    if n <= 7 {
        let mut perm: Vec<usize> = (0..n).collect();
        let mut best = f64::INFINITY;
        permute(&mut perm, 0, &mut |p| {
            let worst = (0..n).map(|i| cost(xs[i], ys[p[i]])).fold(0.0, f64::max);
            best = best.min(worst);
        });
        best
    } else {
        let mut used = vec![false; n];
        let mut worst: f64 = 0.0;
        for &x in xs {
            let (j, d) = (0..n)
                .filter(|&j| !used[j])
                .map(|j| (j, cost(x, ys[j])))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("unused element");
            used[j] = true;
            worst = worst.max(d);
        }
        worst
    }
}

fn permute(p: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == p.len() {
        visit(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, visit);
        p.swap(k, i);
    }
}
