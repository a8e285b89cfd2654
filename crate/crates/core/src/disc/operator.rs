//! Doubly periodic discrete operators `a + bT₁ + cT₂ + dT₁T₂` with exact coefficients.

use num_traits::{One, Zero};

use crate::coeffring::Rational;

use super::lattice::{NormalForms, PeriodMatrix};
use super::DiscError;

/// Offsets of the four coefficients: `a ↦ (0,0)`, `b ↦ T₁`, `c ↦ T₂`, `d ↦ T₁T₂`.
pub const STENCIL: [(i64, i64); 4] = [(0, 0), (1, 0), (0, 1), (1, 1)];
pub const NAMES: [char; 4] = ['a', 'b', 'c', 'd'];

/// `(Lψ)_{n,m} = a_{n,m}ψ_{n,m} + b_{n,m}ψ_{n+1,m} + c_{n,m}ψ_{n,m+1} + d_{n,m}ψ_{n+1,m+1}`,
/// with coefficients periodic under the lattice and stored on the `δ̃ × δ` box.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscreteOperator {
    periods: PeriodMatrix,
    nf: NormalForms,
    coeffs: [Vec<Rational>; 4],
}

impl DiscreteOperator {
    /// Coefficients listed over the box sites `(i, j)`, `0 ≤ i < δ̃`, `0 ≤ j < δ`, at index `i + jδ̃`.
    pub fn from_domain_arrays(
        periods: PeriodMatrix,
        a: Vec<Rational>,
        b: Vec<Rational>,
        c: Vec<Rational>,
        d: Vec<Rational>,
    ) -> Result<Self, DiscError> {
        let nf = periods.normal_forms()?;
        for v in [&a, &b, &c, &d] {
            if v.len() != nf.size() {
                return Err(DiscError::DomainSize { expected: nf.size(), found: v.len() });
            }
        }
        Ok(DiscreteOperator { periods, nf, coeffs: [a, b, c, d] })
    }

    /// Builds the operator from its values `[a, b, c, d]` at every box site.
    pub fn from_fn(
        periods: PeriodMatrix,
        mut f: impl FnMut(i64, i64) -> [Rational; 4],
    ) -> Result<Self, DiscError> {
        let nf = periods.normal_forms()?;
        let mut coeffs: [Vec<Rational>; 4] = Default::default();
        for k in 0..nf.size() {
            let (n, m) = nf.site(k);
            for (slot, v) in coeffs.iter_mut().zip(f(n, m)) {
                slot.push(v);
            }
        }
        Ok(DiscreteOperator { periods, nf, coeffs })
    }

    /// Operator with `a = x_n y_m`, `b = x′_n y_m`, `c = x_n z_m`, `d = κ x′_n z_m`, where
    /// `x, x′` have period `ε` in `n` and `y, z` period `δ` in `m`; every row and column
    /// ratio of such an operator is constant.
    pub fn separable(periods: PeriodMatrix, draw: &mut dyn FnMut() -> Rational) -> Result<Self, DiscError> {
        let nf = periods.normal_forms()?;
        let x: Vec<Rational> = (0..nf.eps).map(|_| draw()).collect();
        let xp: Vec<Rational> = (0..nf.eps).map(|_| draw()).collect();
        let y: Vec<Rational> = (0..nf.delta).map(|_| draw()).collect();
        let z: Vec<Rational> = (0..nf.delta).map(|_| draw()).collect();
        let k = draw();
        Self::from_fn(periods, |n, m| {
            let (i, j) = (n.rem_euclid(nf.eps) as usize, m.rem_euclid(nf.delta) as usize);
            [&x[i] * &y[j], &xp[i] * &y[j], &x[i] * &z[j], &k * &xp[i] * &z[j]]
        })
    }

    pub fn periods(&self) -> &PeriodMatrix {
        &self.periods
    }

    pub fn normal_forms(&self) -> &NormalForms {
        &self.nf
    }

    /// Coefficient number `k` (`0..4` for `a, b, c, d`) at an arbitrary site.
    pub fn coef(&self, k: usize, n: i64, m: i64) -> &Rational {
        &self.coeffs[k][self.nf.index(n, m)]
    }

    pub fn a(&self, n: i64, m: i64) -> &Rational {
        self.coef(0, n, m)
    }

    pub fn b(&self, n: i64, m: i64) -> &Rational {
        self.coef(1, n, m)
    }

    pub fn c(&self, n: i64, m: i64) -> &Rational {
        self.coef(2, n, m)
    }

    pub fn d(&self, n: i64, m: i64) -> &Rational {
        self.coef(3, n, m)
    }

    /// Coefficient arrays on the box, in storage order.
    pub fn arrays(&self) -> &[Vec<Rational>; 4] {
        &self.coeffs
    }

    /// `(Lψ)_{n,m}` for a function given on all of `ℤ²`.
    pub fn apply_at(&self, psi: impl Fn(i64, i64) -> Rational, n: i64, m: i64) -> Rational {
        STENCIL.iter().enumerate().map(|(k, (dn, dm))| self.coef(k, n, m) * psi(n + dn, m + dm)).sum()
    }

    /// All coefficients nonzero and both factorized forms admit a Laplace step
    /// (`w ∉ {0, −1}` for the `T₁T₂` and the `T₂T₁` orderings).
    pub fn is_generic(&self) -> bool {
        if self.coeffs.iter().flatten().any(|c| c.is_zero()) {
            return false;
        }
        let ok = |w: &[Rational]| w.iter().all(|w| !w.is_zero() && *w != -Rational::one());
        match (super::decompose12(self), super::decompose21(self)) {
            (Ok(d12), Ok(d21)) => ok(&d12.w) && ok(&d21.w),
            _ => false,
        }
    }

    /// Gauge transformation `L ↦ f L g` with periodic `f, g` given on the box.
    pub fn gauge(&self, f: &[Rational], g: &[Rational]) -> Result<Self, DiscError> {
        let size = self.nf.size();
        if f.len() != size || g.len() != size {
            return Err(DiscError::DomainSize { expected: size, found: f.len().min(g.len()) });
        }
        if let Some(k) = f.iter().chain(g).position(|x| x.is_zero()) {
            let (n, m) = self.nf.site(k % size);
            return Err(DiscError::ZeroCoefficient { coef: 'g', n, m });
        }
        let nf = self.nf;
        Self::from_fn(self.periods, |n, m| {
            let fv = &f[nf.index(n, m)];
            std::array::from_fn(|k| {
                let (dn, dm) = STENCIL[k];
                fv * self.coef(k, n, m) * &g[nf.index(n + dn, m + dm)]
            })
        })
    }

    /// `(n, m) ↦ (n − dn, m − dm)` re-indexing of the coefficients: `shift(1, 0)` is `S₁`.
    pub fn shift(&self, dn: i64, dm: i64) -> Self {
        Self::from_fn(self.periods, |n, m| std::array::from_fn(|k| self.coef(k, n - dn, m - dm).clone()))
            .expect("same lattice")
    }

    /// The conjugation that turns the shift pair `(T₁^{s₁}, T₂^{s₂})` into `(T₁, T₂)`:
    /// `L` is written as `X·T₁^{[s₁<0]}T₂^{[s₂<0]}` with `X` in the signed shifts and `X` is
    /// conjugated by the reflection `(n, m) ↦ (s₁n, s₂m)`. The map is an involution.
    pub fn conjugate(&self, s1: i64, s2: i64) -> Self {
        assert!(s1.abs() == 1 && s2.abs() == 1, "signs must be ±1");
        let periods = self.periods.reflected(s1, s2);
        Self::from_fn(periods, |n, m| {
            std::array::from_fn(|k| {
                let (p, q) = STENCIL[k];
                let p2 = if s1 < 0 { 1 - p } else { p };
                let q2 = if s2 < 0 { 1 - q } else { q };
                let k2 = STENCIL.iter().position(|&e| e == (p2, q2)).expect("stencil entry");
                self.coef(k2, s1 * n, s2 * m).clone()
            })
        })
        .expect("reflected lattice")
    }
}

impl DiscreteOperator {
    /// `Π_{i=0}^{δ̃−1} coef_k(i, j)`: the product along the `n`-period at height `j`.
    pub fn row_product(&self, k: usize, j: i64) -> Rational {
        (0..self.nf.delta_t).map(|i| self.coef(k, i, j).clone()).product()
    }

    /// `Π_{j=0}^{ε̃−1} coef_k(i, j)`: the product along the `m`-period at column `i`.
    pub fn column_product(&self, k: usize, i: i64) -> Rational {
        (0..self.nf.eps_t).map(|j| self.coef(k, i, j).clone()).product()
    }
}
