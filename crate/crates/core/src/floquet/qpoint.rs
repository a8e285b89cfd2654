//! Behaviour of the multipliers near `ρ = 1`, where `A(y, ρ)` has a pole.

use num_complex::Complex64;

use crate::linalg::poly_roots;

use super::{FloquetError, FloquetSystem};

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Multipliers at `ρ = 1 + t`.
#[derive(Clone, Debug)]
pub struct QSample {
    pub t: f64,
    /// The exponentially large (or small) multiplier; infinite or zero once it leaves the
    /// floating-point range, while `log_mu3` stays accurate.
    pub mu3: Complex64,
    /// Continuous branch of `log μ₃` used in the fit.
    pub log_mu3: Complex64,
    /// The remaining `N − 1` multipliers.
    pub bounded: Vec<Complex64>,
}

#[derive(Clone, Debug)]
pub struct QAsymptotics {
    /// `K = −Σ_n (a_n(0) + c_n(0))`.
    pub k: Complex64,
    /// Fitted `M` in `log μ₃ ≈ M/t + c₀ + c₁t + c₂t²`.
    pub m_rate: Complex64,
    /// `−∫₀ᵀ Σ_n (a_n + c_n)`.
    pub m_expected: Complex64,
    pub samples: Vec<QSample>,
    /// Smallest `t` for which the monodromy could be computed.
    pub smallest_t: Option<f64>,
    /// Values of `t` that failed, with the error.
    pub failures: Vec<(f64, FloquetError)>,
}

impl QAsymptotics {
    pub fn relative_rate_error(&self) -> f64 {
        (self.m_rate - self.m_expected).norm() / self.m_expected.norm().max(f64::MIN_POSITIVE)
    }
}

/// Samples `ρ = 1 + t` for each `t` (decreasing, in `(0, 0.5)`), splits off the
/// exponentially large or small multiplier `μ₃` and fits its logarithm in powers of `t`.
///
/// The large multiplier is read from whichever of `Φ` or the adjoint monodromy `Φ⁺`
/// (whose multipliers are the reciprocals) has it as the dominant eigenvalue; the
/// bounded multipliers come from the other matrix, where they are well conditioned.
pub fn q_asymptotics(sys: &FloquetSystem, t_list: &[f64], tol: f64) -> Result<QAsymptotics, FloquetError> {
    if t_list.is_empty() || t_list.iter().any(|t| !(*t > 0.0 && *t < 0.5)) {
        return Err(FloquetError::Invalid("t values must lie in (0, 0.5)".into()));
    }
    if t_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(FloquetError::Invalid("t values must be strictly decreasing".into()));
    }
    let mut samples: Vec<QSample> = Vec::new();
    let mut failures = Vec::new();
    for &t in t_list {
        match sample(sys, t, tol) {
            Ok((principal, bounded)) => {
                let mu3 = principal.exp();
                let log_mu3 = match samples.last() {
                    None => principal,
                    Some(prev) => {
                        // choose the branch keeping t·log μ₃ continuous
                        let target = prev.log_mu3.im * prev.t / t;
                        let k = ((target - principal.im) / std::f64::consts::TAU).round();
                        Complex64::new(principal.re, principal.im + k * std::f64::consts::TAU)
                    }
                };
                samples.push(QSample { t, mu3, log_mu3, bounded });
            }
            Err(e) => failures.push((t, e)),
        }
    }
    let smallest_t = samples.last().map(|s| s.t);
    let m_rate = fit_rate(&samples);
    let k = -(0..sys.n()).map(|i| sys.a[i].eval(0.0) + sys.c[i].eval(0.0)).sum::<Complex64>();
    let m_expected = -(0..sys.n()).map(|i| sys.a[i].mean_integral() + sys.c[i].mean_integral()).sum::<Complex64>();
    Ok(QAsymptotics { k, m_rate, m_expected, samples, smallest_t, failures })
}

/// `(log μ₃, bounded multipliers)` at `ρ = 1 + t`.
///
/// When `μ₃` (or `1/μ₃`) overflows, its monodromy cannot be formed; `μ₃` is then the only
/// exponentially large multiplier, so `log μ₃ = log tr Φ` to working precision, which is
/// accumulated with renormalization.
fn sample(sys: &FloquetSystem, t: f64, tol: f64) -> Result<(Complex64, Vec<Complex64>), FloquetError> {
    let rho = Complex64::new(1.0 + t, 0.0);
    let by_modulus = |v: &[Complex64]| {
        let mut v = v.to_vec();
        v.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
        v
    };
    match (sys.monodromy(rho, tol), sys.adjoint_monodromy(rho, tol)) {
        (Ok(phi), Ok(adj)) => {
            let ev = by_modulus(&phi.eigenvalues);
            let ev_adj = by_modulus(&adj.eigenvalues);
            if ev[0].norm() >= ev_adj[0].norm() {
                let bounded = ev_adj[..ev_adj.len() - 1].iter().map(|m| ONE / m).collect();
                Ok((ev[0].ln(), bounded))
            } else {
                Ok((-ev_adj[0].ln(), ev[..ev.len() - 1].to_vec()))
            }
        }
        (Err(_), Ok(adj)) => {
            let ev_adj = by_modulus(&adj.eigenvalues);
            let bounded = ev_adj[..ev_adj.len() - 1].iter().map(|m| ONE / m).collect();
            Ok((sys.log_trace_monodromy(rho, tol, false)?, bounded))
        }
        (Ok(phi), Err(_)) => {
            let ev = by_modulus(&phi.eigenvalues);
            Ok((-sys.log_trace_monodromy(rho, tol, true)?, ev[..ev.len() - 1].to_vec()))
        }
        (Err(e), Err(_)) => Err(e),
    }
}

/// Least-squares fit of `log μ₃ = M/t + c₀ + c₁t (+ c₂t²)` by modified Gram–Schmidt on
/// column-scaled real design matrices; returns `M`.
fn fit_rate(samples: &[QSample]) -> Complex64 {
    let m = samples.len();
    if m == 0 {
        return Complex64::new(f64::NAN, f64::NAN);
    }
    let powers: &[i32] = match m {
        1 => &[-1],
        2 => &[-1, 0],
        3 | 4 => &[-1, 0, 1],
        _ => &[-1, 0, 1, 2],
    };
    let cols: Vec<Vec<f64>> = powers.iter().map(|&p| samples.iter().map(|s| s.t.powi(p)).collect()).collect();
    let re: Vec<f64> = samples.iter().map(|s| s.log_mu3.re).collect();
    let im: Vec<f64> = samples.iter().map(|s| s.log_mu3.im).collect();
    Complex64::new(least_squares(&cols, &re)[0], least_squares(&cols, &im)[0])
}

/// Solves `min ‖Σ_j x_j cols_j − rhs‖` by modified Gram–Schmidt.
pub(crate) fn least_squares(cols: &[Vec<f64>], rhs: &[f64]) -> Vec<f64> {
    let k = cols.len();
    let norms: Vec<f64> = cols.iter().map(|c| c.iter().map(|x| x * x).sum::<f64>().sqrt().max(f64::MIN_POSITIVE)).collect();
    let mut q: Vec<Vec<f64>> = cols.iter().zip(&norms).map(|(c, s)| c.iter().map(|x| x / s).collect()).collect();
    let mut r = vec![vec![0.0; k]; k];
    for j in 0..k {
        for i in 0..j {
            let dot: f64 = q[i].iter().zip(&q[j]).map(|(a, b)| a * b).sum();
            r[i][j] = dot;
            let qi = q[i].clone();
            for (x, y) in q[j].iter_mut().zip(&qi) {
                *x -= dot * y;
            }
        }
        let nrm = q[j].iter().map(|x| x * x).sum::<f64>().sqrt();
        r[j][j] = nrm;
        if nrm > 0.0 {
            for x in q[j].iter_mut() {
                *x /= nrm;
            }
        }
    }
    let qtb: Vec<f64> = q.iter().map(|qi| qi.iter().zip(rhs).map(|(a, b)| a * b).sum()).collect();
    let mut x = vec![0.0; k];
    for i in (0..k).rev() {
        let s: f64 = (i + 1..k).map(|j| r[i][j] * x[j]).sum();
        x[i] = if r[i][i] != 0.0 { (qtb[i] - s) / r[i][i] } else { 0.0 };
    }
    x.iter().zip(&norms).map(|(v, s)| v / s).collect()
}

/// For constant coefficients, the limits of the `N − 1` bounded multipliers as `ρ → 1`:
/// `e^{Tλ}` for the roots `λ` of `det(λB(1) + C(1))`, whose degree drops to `N − 1`.
pub fn bounded_limit_prediction(sys: &FloquetSystem) -> Result<Vec<Complex64>, FloquetError> {
    if !sys.is_constant() {
        return Err(FloquetError::Invalid("prediction needs constant coefficients".into()));
    }
    let n = sys.n();
    let b = sys.b_matrix(ONE);
    let c = sys.c_matrix(0.0, ONE);
    // coefficients of p(λ) = det(λB + C) by sampling on the unit circle (degree ≤ N)
    let m = n + 1;
    let values: Vec<Complex64> = (0..m)
        .map(|j| {
            let z = Complex64::from_polar(1.0, std::f64::consts::TAU * j as f64 / m as f64);
            b.scale(z).add(&c).det()
        })
        .collect();
    let mut coeffs: Vec<Complex64> = (0..m)
        .map(|k| {
            (0..m)
                .map(|j| values[j] * Complex64::from_polar(1.0, -std::f64::consts::TAU * (j * k) as f64 / m as f64))
                .sum::<Complex64>()
                / m as f64
        })
        .collect();
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    while coeffs.last().is_some_and(|c| c.norm() <= 1e-12 * scale) {
        coeffs.pop();
    }
    let t = sys.period();
    Ok(poly_roots(&coeffs)?.into_iter().map(|l| (l * t).exp()).collect())
}
