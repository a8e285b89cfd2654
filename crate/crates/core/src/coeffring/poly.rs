//! Sparse exact-rational polynomials in two variables `(ν, μ)` and their determinants.
//!
//! Exponents are signed so that Laurent monomials (as produced by multiplier
//! substitutions) can be represented; determinants clear them row by row.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{One, Zero};

use super::rational::{format_rational, pow, to_f64, Rational};

/// Exponent pair `(i, j)` of `ν^i μ^j`.
pub type Exponent = (i64, i64);

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct BivariatePolynomial {
    terms: BTreeMap<Exponent, Rational>,
}

impl BivariatePolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(c, 0, 0)
    }

    /// `c·ν^i μ^j`.
    pub fn monomial(c: Rational, i: i64, j: i64) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((i, j), c);
        }
        BivariatePolynomial { terms }
    }

    pub fn nu() -> Self {
        Self::monomial(Rational::one(), 1, 0)
    }

    pub fn mu() -> Self {
        Self::monomial(Rational::one(), 0, 1)
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Exponent, Rational)>) -> Self {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, e: Exponent, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in lexicographic order of `(i, j)`.
    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, i: i64, j: i64) -> Rational {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_polynomial(&self) -> bool {
        self.terms.keys().all(|&(i, j)| i >= 0 && j >= 0)
    }

    /// Componentwise minimum exponents over the support.
    pub fn min_exponents(&self) -> Option<Exponent> {
        let i = self.terms.keys().map(|e| e.0).min()?;
        let j = self.terms.keys().map(|e| e.1).min()?;
        Some((i, j))
    }

    /// Componentwise maximum exponents over the support.
    pub fn max_exponents(&self) -> Option<Exponent> {
        let i = self.terms.keys().map(|e| e.0).max()?;
        let j = self.terms.keys().map(|e| e.1).max()?;
        Some((i, j))
    }

    pub fn degree_nu(&self) -> Option<i64> {
        self.max_exponents().map(|e| e.0)
    }

    pub fn degree_mu(&self) -> Option<i64> {
        self.max_exponents().map(|e| e.1)
    }

    pub fn scale(&self, s: &Rational) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        BivariatePolynomial { terms: self.terms.iter().map(|(e, c)| (*e, c * s)).collect() }
    }

    /// Multiplication by `ν^di μ^dj`.
    pub fn shift(&self, di: i64, dj: i64) -> Self {
        BivariatePolynomial { terms: self.terms.iter().map(|(e, c)| ((e.0 + di, e.1 + dj), c.clone())).collect() }
    }

    /// Substitutes `ν ↦ ν^{a.0} μ^{a.1}` and `μ ↦ ν^{b.0} μ^{b.1}`.
    pub fn substitute_monomials(&self, a: Exponent, b: Exponent) -> Self {
        Self::from_terms(
            self.terms.iter().map(|(&(i, j), c)| ((i * a.0 + j * b.0, i * a.1 + j * b.1), c.clone())),
        )
    }

    /// `P(1/ν, 1/μ)`.
    pub fn invert_variables(&self) -> Self {
        self.substitute_monomials((-1, 0), (0, -1))
    }

    /// Coefficient of `μ^j`, as a polynomial in `ν` alone.
    pub fn mu_slice(&self, j: i64) -> Self {
        Self::from_terms(self.terms.iter().filter(|(e, _)| e.1 == j).map(|(e, c)| ((e.0, 0), c.clone())))
    }

    /// Coefficient of `ν^i`, as a polynomial in `μ` alone.
    pub fn nu_slice(&self, i: i64) -> Self {
        Self::from_terms(self.terms.iter().filter(|(e, _)| e.0 == i).map(|(e, c)| ((0, e.1), c.clone())))
    }

    /// Exact value at rational `(ν, μ)`; both must be nonzero if negative exponents occur.
    pub fn eval_rational(&self, nu: &Rational, mu: &Rational) -> Rational {
        self.terms.iter().fold(Rational::zero(), |acc, (&(i, j), c)| acc + c * pow(nu, i) * pow(mu, j))
    }

    /// Univariate polynomial in `μ` after fixing `ν`, as a map `exponent → coefficient`.
    pub fn specialize_nu(&self, nu: &Rational) -> BTreeMap<i64, Rational> {
        let mut out: BTreeMap<i64, Rational> = BTreeMap::new();
        for (&(i, j), c) in &self.terms {
            *out.entry(j).or_insert_with(Rational::zero) += c * pow(nu, i);
        }
        out.retain(|_, c| !c.is_zero());
        out
    }

    pub fn eval_complex(&self, nu: Complex64, mu: Complex64) -> Complex64 {
        self.terms
            .iter()
            .map(|(&(i, j), c)| nu.powi(i as i32) * mu.powi(j as i32) * to_f64(c))
            .sum()
    }

    /// `Σ |c_ij| |ν|^i |μ|^j`, the natural scale for residuals of [`Self::eval_complex`].
    pub fn eval_abs(&self, nu: Complex64, mu: Complex64) -> f64 {
        self.terms
            .iter()
            .map(|(&(i, j), c)| nu.norm().powi(i as i32) * mu.norm().powi(j as i32) * to_f64(c).abs())
            .sum()
    }

    /// Exact quotient when `divisor` divides `self` in the Laurent ring `Q[ν^±1, μ^±1]`.
    pub fn exact_div(&self, divisor: &Self) -> Option<Self> {
        let (&lead_e, lead_c) = divisor.terms.iter().next_back()?;
        let Some(lo) = self.min_exponents() else {
            return Some(Self::zero());
        };
        let dlo = divisor.min_exponents()?;
        // minimum exponents add under multiplication, which bounds the quotient's support
        let floor = (lo.0 - dlo.0, lo.1 - dlo.1);
        let mut rem = self.clone();
        let mut quot = Self::zero();
        while let Some((&e, c)) = rem.terms.iter().next_back() {
            let m = (e.0 - lead_e.0, e.1 - lead_e.1);
            if m.0 < floor.0 || m.1 < floor.1 {
                return None;
            }
            let t = c / lead_c;
            let step = divisor.shift(m.0, m.1).scale(&t);
            quot.add_term(m, t);
            rem = &rem - &step;
        }
        Some(quot)
    }

    /// Scales so that the lexicographically smallest term has coefficient 1.
    pub fn normalized(&self) -> Self {
        match self.terms.values().next() {
            Some(c) => self.scale(&c.recip()),
            None => Self::zero(),
        }
    }

    /// Canonical representative of `{ν^p μ^q s·P}`: minimum exponents moved to zero,
    /// then [`Self::normalized`].
    pub fn canonical_up_to_monomial(&self) -> Self {
        match self.min_exponents() {
            Some((i, j)) => self.shift(-i, -j).normalized(),
            None => Self::zero(),
        }
    }

    /// Finds `(p, q, s)` with `self = ν^p μ^q · s · other`.
    pub fn match_up_to_monomial(&self, other: &Self) -> Option<(i64, i64, Rational)> {
        if self.is_zero() || other.is_zero() {
            return None;
        }
        if self.canonical_up_to_monomial() != other.canonical_up_to_monomial() {
            return None;
        }
        let (a, b) = (self.min_exponents()?, other.min_exponents()?);
        let (p, q) = (a.0 - b.0, a.1 - b.1);
        let (ea, ca) = self.terms.iter().next()?;
        let cb = other.coeff(ea.0 - p, ea.1 - q);
        Some((p, q, ca / cb))
    }

    /// First exponent (lexicographic) where `self` and `other` differ.
    pub fn first_difference(&self, other: &Self) -> Option<(Exponent, Rational, Rational)> {
        let keys: std::collections::BTreeSet<Exponent> =
            self.terms.keys().chain(other.terms.keys()).copied().collect();
        keys.into_iter().find_map(|e| {
            let (x, y) = (self.coeff(e.0, e.1), other.coeff(e.0, e.1));
            (x != y).then_some((e, x, y))
        })
    }
}

impl Add for &BivariatePolynomial {
    type Output = BivariatePolynomial;
    fn add(self, rhs: &BivariatePolynomial) -> BivariatePolynomial {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl Sub for &BivariatePolynomial {
    type Output = BivariatePolynomial;
    fn sub(self, rhs: &BivariatePolynomial) -> BivariatePolynomial {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, -c.clone());
        }
        out
    }
}

impl Mul for &BivariatePolynomial {
    type Output = BivariatePolynomial;
    fn mul(self, rhs: &BivariatePolynomial) -> BivariatePolynomial {
        let mut out = BivariatePolynomial::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                out.add_term((ea.0 + eb.0, ea.1 + eb.1), ca * cb);
            }
        }
        out
    }
}

impl Neg for &BivariatePolynomial {
    type Output = BivariatePolynomial;
    fn neg(self) -> BivariatePolynomial {
        self.scale(&-Rational::one())
    }
}

impl fmt::Display for BivariatePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(&(i, j), c)| {
                let mut s = format_rational(c);
                if i != 0 {
                    s += &format!("*nu^{i}");
                }
                if j != 0 {
                    s += &format!("*mu^{j}");
                }
                s
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Square matrix of polynomials, row-major.
pub type PolyMatrix = Vec<Vec<BivariatePolynomial>>;

/// Exact determinant. Laurent rows are first cleared by monomial factors; block
/// triangular structure is split off; small blocks use cofactor expansion and larger
/// ones fraction-free (Bareiss) elimination.
pub fn poly_det(m: &[Vec<BivariatePolynomial>]) -> BivariatePolynomial {
    let n = m.len();
    assert!(m.iter().all(|row| row.len() == n), "poly_det: matrix is not square");
    let mut cleared: PolyMatrix = Vec::with_capacity(n);
    let (mut di, mut dj) = (0i64, 0i64);
    for row in m {
        let (mut mi, mut mj) = (0i64, 0i64);
        for e in row.iter().filter_map(|p| p.min_exponents()) {
            mi = mi.min(e.0);
            mj = mj.min(e.1);
        }
        di += mi;
        dj += mj;
        cleared.push(row.iter().map(|p| p.shift(-mi, -mj)).collect());
    }
    det_polynomial(cleared).shift(di, dj)
}

fn det_polynomial(m: PolyMatrix) -> BivariatePolynomial {
    let n = m.len();
    if n == 0 {
        return BivariatePolynomial::one();
    }
    for k in 1..n {
        let lower_zero = (k..n).all(|r| (0..k).all(|c| m[r][c].is_zero()));
        let upper_zero = (0..k).all(|r| (k..n).all(|c| m[r][c].is_zero()));
        if lower_zero || upper_zero {
            let top: PolyMatrix = (0..k).map(|r| m[r][..k].to_vec()).collect();
            let bottom: PolyMatrix = (k..n).map(|r| m[r][k..].to_vec()).collect();
            return &det_polynomial(top) * &det_polynomial(bottom);
        }
    }
    if n <= 4 {
        cofactor_det(&m)
    } else {
        bareiss_det(m)
    }
}

fn cofactor_det(m: &[Vec<BivariatePolynomial>]) -> BivariatePolynomial {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = BivariatePolynomial::zero();
    for c in 0..n {
        if m[0][c].is_zero() {
            continue;
        }
        let minor: PolyMatrix =
            m[1..].iter().map(|row| row.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, p)| p.clone()).collect()).collect();
        let term = &m[0][c] * &cofactor_det(&minor);
        acc = if c % 2 == 0 { &acc + &term } else { &acc - &term };
    }
    acc
}

fn bareiss_det(mut a: PolyMatrix) -> BivariatePolynomial {
    let n = a.len();
    let mut negate = false;
    let mut prev = BivariatePolynomial::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    negate = !negate;
                }
                None => return BivariatePolynomial::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&a[k][k] * &a[i][j]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = num.exact_div(&prev).expect("Bareiss division must be exact");
            }
            a[i][k] = BivariatePolynomial::zero();
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    if negate {
        -&det
    } else {
        det
    }
}
