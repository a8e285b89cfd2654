//! ψ-ratios at points of the spectral curve from the partial derivatives of `R` with
//! respect to the coefficients.

use num_complex::Complex64;

use crate::coeffring::{poly_det, to_f64, BivariatePolynomial, Rational};
use crate::disc::{DiscreteOperator, STENCIL};
use crate::linalg::poly_roots;

use super::matrix::{build_m, FloquetMatrix};
use super::SpectralError;

/// Relative residual below which `(ν₁, μ₁)` counts as a curve point.
pub const DEFAULT_CURVE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PsiRatios {
    /// `ψ_{n+1,m}/ψ_{n,m}`.
    pub n_ratio: Complex64,
    /// `ψ_{n,m+1}/ψ_{n,m}`.
    pub m_ratio: Complex64,
}

/// `∂R/∂coef_k(n, m)`: `R` is linear in the row of site `(n, m)`, so the derivative is the
/// determinant with that row replaced by the monomial that multiplies `coef_k(n, m)`.
fn partial(m: &FloquetMatrix, k: usize, n: i64, mm: i64) -> BivariatePolynomial {
    let (row, _, _) = m.locate(n, mm);
    let (p, q) = STENCIL[k];
    let (col, a, b) = m.locate(n + p, mm + q);
    let mut entries = m.entries.clone();
    entries[row] = vec![BivariatePolynomial::zero(); m.size()];
    entries[row][col] = BivariatePolynomial::monomial(Rational::from_integer(1.into()), a, b);
    poly_det(&entries)
}

fn relative(p: &BivariatePolynomial, nu: Complex64, mu: Complex64) -> (Complex64, f64) {
    let v = p.eval_complex(nu, mu);
    let scale = p.eval_abs(nu, mu);
    (v, if scale > 0.0 { v.norm() / scale } else { 0.0 })
}

fn check_on_curve(m: &FloquetMatrix, nu: Complex64, mu: Complex64, tol: f64) -> Result<(), SpectralError> {
    let (_, residual) = relative(&m.det(), nu, mu);
    if residual > tol {
        return Err(SpectralError::OffCurve { residual });
    }
    Ok(())
}

fn ratios_at(m: &FloquetMatrix, n: i64, mm: i64, nu: Complex64, mu: Complex64, tol: f64) -> Result<PsiRatios, SpectralError> {
    let (da, size) = relative(&partial(m, 0, n, mm), nu, mu);
    if size <= tol {
        return Err(SpectralError::SingularPoint { size });
    }
    let db = partial(m, 1, n, mm).eval_complex(nu, mu);
    let dc = partial(m, 2, n, mm).eval_complex(nu, mu);
    Ok(PsiRatios { n_ratio: db / da, m_ratio: dc / da })
}

/// `ψ_{n+1,m}/ψ_{n,m} = ∂R/∂b_{n,m} / ∂R/∂a_{n,m}` and `ψ_{n,m+1}/ψ_{n,m} = ∂R/∂c_{n,m} / ∂R/∂a_{n,m}`
/// at the curve point `(ν₁, μ₁)`.
pub fn psi_ratios(
    l: &DiscreteOperator,
    site: (i64, i64),
    nu: Complex64,
    mu: Complex64,
    tol: f64,
) -> Result<PsiRatios, SpectralError> {
    let m = build_m(l);
    check_on_curve(&m, nu, mu, tol)?;
    ratios_at(&m, site.0, site.1, nu, mu, tol)
}

/// The Bloch solution on the first box, normalized by `ψ_{0,0} = 1`, assembled from
/// ψ-ratios along column 0 and then along each row. Indexed by `i + jδ̃`.
pub fn psi_on_domain(l: &DiscreteOperator, nu: Complex64, mu: Complex64, tol: f64) -> Result<Vec<Complex64>, SpectralError> {
    let m = build_m(l);
    check_on_curve(&m, nu, mu, tol)?;
    let nf = l.normal_forms();
    let mut psi = vec![Complex64::new(0.0, 0.0); nf.size()];
    psi[0] = Complex64::new(1.0, 0.0);
    for j in 0..nf.delta {
        let base = (j * nf.delta_t) as usize;
        if j > 0 {
            psi[base] = psi[base - nf.delta_t as usize] * ratios_at(&m, 0, j - 1, nu, mu, tol)?.m_ratio;
        }
        for i in 1..nf.delta_t {
            let k = base + i as usize;
            psi[k] = psi[k - 1] * ratios_at(&m, i - 1, j, nu, mu, tol)?.n_ratio;
        }
    }
    Ok(psi)
}

/// Nonzero roots `μ₁` of `R(ν₁, ·)` at rational `ν₁`.
pub fn curve_points_at(l: &DiscreteOperator, nu: &Rational) -> Result<Vec<Complex64>, SpectralError> {
    let r = build_m(l).det();
    let coeffs = r.specialize_nu(nu);
    let Some(&deg) = coeffs.keys().next_back() else { return Ok(Vec::new()) };
    let low = *coeffs.keys().next().expect("nonempty");
    let dense: Vec<Complex64> =
        (low..=deg).map(|j| Complex64::new(coeffs.get(&j).map(to_f64).unwrap_or(0.0), 0.0)).collect();
    poly_roots(&dense).map_err(|e| SpectralError::RootFinding(e.to_string()))
}
