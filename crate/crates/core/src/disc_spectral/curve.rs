//! The spectral-curve polynomial `R = det M`, its support and boundary factorizations,
//! and the two exact consistency checks (second box, adjoint).

use num_traits::Zero;

use crate::coeffring::{sign_pow, BivariatePolynomial, Exponent, Rational};
use crate::disc::{DiscreteOperator, NormalForms};

use super::matrix::{build_m, build_m_adjoint, build_mhat, FloquetMatrix};
use super::{MismatchReport, SpectralError};

/// Signs `s` with `slice = s · product` for the four boundary factorizations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CornerSigns {
    /// `μ₁⁰` slice of `R` against `Π_j (B_{.,j}ν₁ − (−1)^{δ̃}A_{.,j})`.
    pub bottom: i8,
    /// `μ₁^{δ̃}` slice of `R` against `ν₁^ζ Π_j (D_{.,j}ν₁ − (−1)^{δ̃}C_{.,j})`.
    pub top: i8,
    /// `ν₂⁰` slice of `R̂` against `Π_i (C_{i,.}μ₂ − (−1)^{ε̃}A_{i,.})`.
    pub hat_bottom: i8,
    /// `ν₂^{ε̃}` slice of `R̂` against `μ₂^ξ Π_i (D_{i,.}μ₂ − (−1)^{ε̃}B_{i,.})`.
    pub hat_top: i8,
}

impl CornerSigns {
    /// Predicted signs. The bottom ones come from the block-triangular structure at
    /// `μ₁ = 0` (resp. `ν₂ = 0`), a product of `δ` (resp. `ε`) cyclic blocks.
    pub fn predicted(nf: &NormalForms) -> Self {
        let parity = |e: i64| if e.rem_euclid(2) == 0 { 1 } else { -1 };
        CornerSigns {
            bottom: parity(nf.delta * (nf.delta_t - 1)),
            top: parity(nf.delta * (nf.delta_t - 1) + (nf.delta - 1) * nf.delta_t + nf.zeta * (nf.delta_t - 1)),
            hat_bottom: parity(nf.eps * (nf.eps_t - 1)),
            hat_top: parity(nf.eps * (nf.eps_t - 1) + (nf.eps - 1) * nf.eps_t + nf.xi * (nf.eps_t - 1)),
        }
    }
}

/// `self = ν^p μ^q · scalar · other`.
#[derive(Clone, Debug, PartialEq)]
pub struct MonomialMatch {
    pub p: i64,
    pub q: i64,
    pub scalar: Rational,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralCurvePoly {
    pub nf: NormalForms,
    /// `R(ν₁, μ₁) = det M`, unnormalized.
    pub r: BivariatePolynomial,
    /// `R̂(ν₂, μ₂) = det M̂`, unnormalized.
    pub r_hat: BivariatePolynomial,
    pub support: Vec<Exponent>,
    pub genus: i64,
    pub corner_signs: CornerSigns,
}

impl SpectralCurvePoly {
    /// `R` scaled so that its lexicographically smallest coefficient is 1.
    pub fn normalized(&self) -> BivariatePolynomial {
        self.r.normalized()
    }
}

/// Support region for `R(ν₁, μ₁)`: the box `[0, δ+ζ] × [0, δ̃]` cut by the images of the
/// second box under the multiplier relations.
pub fn in_first_region(nf: &NormalForms, (i, j): Exponent) -> bool {
    let u = i * nf.det_t - nf.zeta_t * j;
    let v = nf.xi_t * i + nf.kappa * j;
    (0..=nf.delta + nf.zeta).contains(&i)
        && (0..=nf.delta_t).contains(&j)
        && (0..=nf.eps_t).contains(&u)
        && (0..=nf.eps + nf.xi).contains(&v)
}

/// Region for `R̂(ν₂, μ₂)`: the box `[0, ε̃] × [0, ε+ξ]` cut by the images of the first box.
pub fn in_second_region(nf: &NormalForms, (i, j): Exponent) -> bool {
    let u = nf.kappa * i + nf.zeta_t * j;
    let v = -nf.xi_t * i + nf.det_t * j;
    (0..=nf.eps_t).contains(&i)
        && (0..=nf.eps + nf.xi).contains(&j)
        && (0..=nf.delta + nf.zeta).contains(&u)
        && (0..=nf.delta_t).contains(&v)
}

/// `Π_k (den_k·x − (−1)^{parity}·num_k)` in the variable selected by `var`, times `var^shift`.
fn corner_product(nums: &[Rational], dens: &[Rational], parity: i64, var: Exponent, shift: i64) -> BivariatePolynomial {
    let s = sign_pow(parity);
    let mut acc = BivariatePolynomial::monomial(Rational::from_integer(1.into()), var.0 * shift, var.1 * shift);
    for (num, den) in nums.iter().zip(dens) {
        let factor = &BivariatePolynomial::monomial(den.clone(), var.0, var.1) - &BivariatePolynomial::constant(&s * num);
        acc = &acc * &factor;
    }
    acc
}

fn match_sign(slice: &BivariatePolynomial, expected: &BivariatePolynomial, what: &str) -> Result<i8, SpectralError> {
    if slice == expected {
        return Ok(1);
    }
    if *slice == -expected {
        return Ok(-1);
    }
    let (e, l, r) = slice.first_difference(expected).expect("polynomials differ");
    Err(MismatchReport::at(format!("{what} factorization"), e, l, r).into())
}

fn first_slice(r: &BivariatePolynomial, j: i64) -> BivariatePolynomial {
    r.mu_slice(j)
}

fn second_slice(r: &BivariatePolynomial, i: i64) -> BivariatePolynomial {
    r.nu_slice(i)
}

/// Checks the four boundary factorizations; returns the sign of each.
fn corner_signs(l: &DiscreteOperator, r: &BivariatePolynomial, r_hat: &BivariatePolynomial) -> Result<CornerSigns, SpectralError> {
    let nf = l.normal_forms();
    let rows = |k: usize| (0..nf.delta).map(|j| l.row_product(k, j)).collect::<Vec<_>>();
    let cols = |k: usize| (0..nf.eps).map(|i| l.column_product(k, i)).collect::<Vec<_>>();
    let (ra, rb, rc, rd) = (rows(0), rows(1), rows(2), rows(3));
    let (ca, cb, cc, cd) = (cols(0), cols(1), cols(2), cols(3));
    let bottom = match_sign(&first_slice(r, 0), &corner_product(&ra, &rb, nf.delta_t, (1, 0), 0), "μ₁⁰ slice")?;
    let top = match_sign(
        &first_slice(r, nf.delta_t),
        &corner_product(&rc, &rd, nf.delta_t, (1, 0), nf.zeta),
        "top μ₁ slice",
    )?;
    let hat_bottom = match_sign(&second_slice(r_hat, 0), &corner_product(&ca, &cc, nf.eps_t, (0, 1), 0), "ν₂⁰ slice")?;
    let hat_top = match_sign(
        &second_slice(r_hat, nf.eps_t),
        &corner_product(&cb, &cd, nf.eps_t, (0, 1), nf.xi),
        "top ν₂ slice",
    )?;
    Ok(CornerSigns { bottom, top, hat_bottom, hat_top })
}

/// `R = det M` and `R̂ = det M̂` with exact support and boundary checks.
pub fn spectral_poly(l: &DiscreteOperator) -> Result<SpectralCurvePoly, SpectralError> {
    let nf = *l.normal_forms();
    let r = build_m(l).det();
    let r_hat = build_mhat(l).det();
    for (poly, name, inside) in [
        (&r, "R", in_first_region as fn(&NormalForms, Exponent) -> bool),
        (&r_hat, "R̂", in_second_region),
    ] {
        if let Some((&e, c)) = poly.terms().find(|(&e, _)| !inside(&nf, e)) {
            return Err(MismatchReport::at(format!("{name} support outside its region"), e, c.clone(), Rational::zero()).into());
        }
    }
    let corner_signs = corner_signs(l, &r, &r_hat)?;
    let support = r.terms().map(|(e, _)| *e).collect();
    Ok(SpectralCurvePoly { nf, r, r_hat, support, genus: nf.genus(), corner_signs })
}

/// `R̂(ν₂, μ₂) = det M̂` alone.
pub fn spectral_poly_hat(l: &DiscreteOperator) -> BivariatePolynomial {
    build_mhat(l).det()
}

fn monomial_match(a: &BivariatePolynomial, b: &BivariatePolynomial, what: &str) -> Result<MonomialMatch, SpectralError> {
    match a.match_up_to_monomial(b) {
        Some((p, q, scalar)) => Ok(MonomialMatch { p, q, scalar }),
        None => {
            let (ca, cb) = (a.canonical_up_to_monomial(), b.canonical_up_to_monomial());
            let report = match ca.first_difference(&cb) {
                Some((e, x, y)) => MismatchReport::at(what, e, x, y),
                None => MismatchReport::new(what),
            };
            Err(report.into())
        }
    }
}

/// `R(ν₁, μ₁)` against `R̂` with `ν₂ = ν₁^κ μ₁^{−ξ̃}`, `μ₂ = ν₁^{ζ̃} μ₁^{Δ̃}` substituted.
pub fn consistency_r_rhat(l: &DiscreteOperator) -> Result<MonomialMatch, SpectralError> {
    consistency_r_rhat_with(&build_m(l), &build_mhat(l))
}

pub fn consistency_r_rhat_with(m: &FloquetMatrix, mhat: &FloquetMatrix) -> Result<MonomialMatch, SpectralError> {
    let e = m.nf.second_in_first();
    let substituted = mhat.det().substitute_monomials((e[0][0], e[0][1]), (e[1][0], e[1][1]));
    monomial_match(&m.det(), &substituted, "R versus substituted R̂")
}

/// `R⁺ = det M⁺` against `R(1/ν, 1/μ)`.
pub fn adjoint_reciprocity(l: &DiscreteOperator) -> Result<MonomialMatch, SpectralError> {
    adjoint_reciprocity_with(l, &build_m_adjoint(l))
}

pub fn adjoint_reciprocity_with(l: &DiscreteOperator, m_adjoint: &FloquetMatrix) -> Result<MonomialMatch, SpectralError> {
    let r = build_m(l).det();
    monomial_match(&m_adjoint.det(), &r.invert_variables(), "adjoint curve versus R(1/ν, 1/μ)")
}
