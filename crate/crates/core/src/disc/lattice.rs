//! Period sub-lattices of `ℤ²` and their two triangular normal forms.

use num_integer::Integer;
use num_traits::Zero;

use crate::coeffring::{pow, Rational};

use super::DiscError;

/// Period lattice spanned by the rows `(P, R)` and `(S, T)`: coefficients satisfy
/// `a_{n+P,m+R} = a_{n+S,m+T} = a_{n,m}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PeriodMatrix {
    pub p: i64,
    pub r: i64,
    pub s: i64,
    pub t: i64,
}

impl PeriodMatrix {
    pub fn new(p: i64, r: i64, s: i64, t: i64) -> Result<Self, DiscError> {
        let m = PeriodMatrix { p, r, s, t };
        if m.det() <= 0 {
            return Err(DiscError::DegeneratePeriods(format!("det {} must be positive", m.det())));
        }
        Ok(m)
    }

    pub fn diag(p: i64, t: i64) -> Result<Self, DiscError> {
        Self::new(p, 0, 0, t)
    }

    /// `Δ = PT − RS`.
    pub fn det(&self) -> i64 {
        self.p * self.t - self.r * self.s
    }

    pub fn contains(&self, n: i64, m: i64) -> bool {
        // (n, m) = x(P, R) + y(S, T) with x, y integers
        let d = self.det();
        let x = n * self.t - m * self.s;
        let y = m * self.p - n * self.r;
        x % d == 0 && y % d == 0
    }

    /// The lattice image under `(n, m) ↦ (s₁n, s₂m)`, re-oriented to positive determinant.
    pub fn reflected(&self, s1: i64, s2: i64) -> PeriodMatrix {
        let (p, r, s, t) = (s1 * self.p, s2 * self.r, s1 * self.s, s2 * self.t);
        if p * t - r * s > 0 {
            PeriodMatrix { p, r, s, t }
        } else {
            PeriodMatrix { p, r, s: -s, t: -t }
        }
    }

    pub fn normal_forms(&self) -> Result<NormalForms, DiscError> {
        normal_forms(self)
    }
}

/// The canonical bases `𝔗₁ = ((δ̃, 0), (−ζ, δ))` and `𝔗₂ = ((ε, −ξ), (0, ε̃))` of a
/// period lattice, and the integer matrix `G = 𝔗₁𝔗₂⁻¹ = ((Δ̃, ξ̃), (−ζ̃, κ))` relating
/// the two pairs of multipliers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct NormalForms {
    /// `Δ`.
    pub det: i64,
    pub delta: i64,
    pub delta_t: i64,
    pub zeta: i64,
    pub eps: i64,
    pub eps_t: i64,
    pub xi: i64,
    /// `Δ̃ = Δ/(δε)`.
    pub det_t: i64,
    /// `ξ̃ = ξ/δ`.
    pub xi_t: i64,
    /// `ζ̃ = ζ/ε`.
    pub zeta_t: i64,
    /// `κ` with `1 − ξ̃ζ̃ = κΔ̃`.
    pub kappa: i64,
}

/// Computes both normal forms; the lattice must not be degenerate (`δ < Δ`, `ε < Δ`).
pub fn normal_forms(t: &PeriodMatrix) -> Result<NormalForms, DiscError> {
    let det = t.det();
    if det <= 0 {
        return Err(DiscError::DegeneratePeriods(format!("det {det} must be positive")));
    }
    // 𝔗₁: the smallest positive second coordinate is δ = gcd(R, T)
    let (delta, x, y) = signed_gcd(t.r, t.t);
    let delta_t = det / delta;
    let first = x * t.p + y * t.s;
    let zeta = (-first).rem_euclid(delta_t);
    // 𝔗₂: the smallest positive first coordinate is ε = gcd(P, S)
    let (eps, x, y) = signed_gcd(t.p, t.s);
    let eps_t = det / eps;
    let second = x * t.r + y * t.t;
    let xi = (-second).rem_euclid(eps_t);
    if delta >= det || eps >= det {
        return Err(DiscError::DegeneratePeriods(format!("δ = {delta}, ε = {eps}, Δ = {det}")));
    }
    let det_t = det / (delta * eps);
    if xi % delta != 0 || zeta % eps != 0 || det % (delta * eps) != 0 {
        return Err(DiscError::DegeneratePeriods("normal forms are not related by an integer matrix".into()));
    }
    let (xi_t, zeta_t) = (xi / delta, zeta / eps);
    let num = 1 - xi_t * zeta_t;
    if num % det_t != 0 {
        return Err(DiscError::DegeneratePeriods("κ is not an integer".into()));
    }
    let nf = NormalForms { det, delta, delta_t, zeta, eps, eps_t, xi, det_t, xi_t, zeta_t, kappa: num / det_t };
    for (n, m) in [(t.p, t.r), (t.s, t.t)] {
        if !nf.in_first_lattice(n, m) || !nf.in_second_lattice(n, m) {
            return Err(DiscError::DegeneratePeriods("normal form does not span the period lattice".into()));
        }
    }
    Ok(nf)
}

impl NormalForms {
    fn in_first_lattice(&self, n: i64, m: i64) -> bool {
        m % self.delta == 0 && (n + (m / self.delta) * self.zeta) % self.delta_t == 0
    }

    fn in_second_lattice(&self, n: i64, m: i64) -> bool {
        n % self.eps == 0 && (m + (n / self.eps) * self.xi) % self.eps_t == 0
    }

    /// Genus `Δ − δ − ε + 1` of the spectral curve.
    pub fn genus(&self) -> i64 {
        self.det - self.delta - self.eps + 1
    }

    /// Number of sites in a fundamental domain.
    pub fn size(&self) -> usize {
        self.det as usize
    }

    /// Reduces `(n, m)` to the `δ̃ × δ` box: returns `(i, j, α, β)` with
    /// `(n, m) = (i, j) + α(δ̃, 0) + β(−ζ, δ)`.
    pub fn reduce_first(&self, n: i64, m: i64) -> (i64, i64, i64, i64) {
        let beta = m.div_euclid(self.delta);
        let j = m.rem_euclid(self.delta);
        let n2 = n + beta * self.zeta;
        (n2.rem_euclid(self.delta_t), j, n2.div_euclid(self.delta_t), beta)
    }

    /// Reduces `(n, m)` to the `ε × ε̃` box: returns `(i, j, α, β)` with
    /// `(n, m) = (i, j) + α(ε, −ξ) + β(0, ε̃)`.
    pub fn reduce_second(&self, n: i64, m: i64) -> (i64, i64, i64, i64) {
        let alpha = n.div_euclid(self.eps);
        let i = n.rem_euclid(self.eps);
        let m2 = m + alpha * self.xi;
        (i, m2.rem_euclid(self.eps_t), alpha, m2.div_euclid(self.eps_t))
    }

    /// Storage index of a site in the first box: `i + jδ̃`.
    pub fn index(&self, n: i64, m: i64) -> usize {
        let (i, j, _, _) = self.reduce_first(n, m);
        (i + j * self.delta_t) as usize
    }

    /// Site of a storage index.
    pub fn site(&self, index: usize) -> (i64, i64) {
        let k = index as i64;
        (k % self.delta_t, k / self.delta_t)
    }

    /// Integer exponents `((Δ̃, ξ̃), (−ζ̃, κ))`: `ν₁ = ν₂^{Δ̃}μ₂^{ξ̃}`, `μ₁ = ν₂^{−ζ̃}μ₂^{κ}`.
    pub fn first_in_second(&self) -> [[i64; 2]; 2] {
        [[self.det_t, self.xi_t], [-self.zeta_t, self.kappa]]
    }

    /// Inverse exponents: `ν₂ = ν₁^{κ}μ₁^{−ξ̃}`, `μ₂ = ν₁^{ζ̃}μ₁^{Δ̃}`.
    pub fn second_in_first(&self) -> [[i64; 2]; 2] {
        [[self.kappa, -self.xi_t], [self.zeta_t, self.det_t]]
    }

    /// `(ν₁, μ₁) ↦ (ν₂, μ₂)`.
    pub fn to_second(&self, nu1: &Rational, mu1: &Rational) -> Result<(Rational, Rational), DiscError> {
        convert(self.second_in_first(), nu1, mu1)
    }

    /// `(ν₂, μ₂) ↦ (ν₁, μ₁)`.
    pub fn to_first(&self, nu2: &Rational, mu2: &Rational) -> Result<(Rational, Rational), DiscError> {
        convert(self.first_in_second(), nu2, mu2)
    }
}

/// `(g, x, y)` with `g = gcd(a, b) > 0` and `xa + yb = g`.
fn signed_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let e = a.extended_gcd(&b);
    if e.gcd < 0 {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

fn convert(e: [[i64; 2]; 2], x: &Rational, y: &Rational) -> Result<(Rational, Rational), DiscError> {
    if x.is_zero() || y.is_zero() {
        return Err(DiscError::ZeroMultiplier);
    }
    Ok((pow(x, e[0][0]) * pow(y, e[0][1]), pow(x, e[1][0]) * pow(y, e[1][1])))
}
