//! Factorized forms, gauge invariants `(w, H)` and the Laplace/shift transformation group.

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::coeffring::Rational;

use super::lattice::NormalForms;
use super::operator::DiscreteOperator;
use super::DiscError;

/// `L = f((1 + uT₁)(1 + vT₂) + w)` (or, for the `21` ordering, `f((1 + vT₂)(1 + uT₁) + w)`),
/// arrays on the box in storage order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub nf: NormalForms,
    pub f: Vec<Rational>,
    pub u: Vec<Rational>,
    pub v: Vec<Rational>,
    pub w: Vec<Rational>,
}

impl Factorization {
    fn at<'a>(&self, arr: &'a [Rational], n: i64, m: i64) -> &'a Rational {
        &arr[self.nf.index(n, m)]
    }

    pub fn f_at(&self, n: i64, m: i64) -> &Rational {
        self.at(&self.f, n, m)
    }

    pub fn u_at(&self, n: i64, m: i64) -> &Rational {
        self.at(&self.u, n, m)
    }

    pub fn v_at(&self, n: i64, m: i64) -> &Rational {
        self.at(&self.v, n, m)
    }

    pub fn w_at(&self, n: i64, m: i64) -> &Rational {
        self.at(&self.w, n, m)
    }
}

fn require_nonzero(l: &DiscreteOperator, ks: &[usize]) -> Result<(), DiscError> {
    let nf = l.normal_forms();
    for k in 0..nf.size() {
        let (n, m) = nf.site(k);
        for &c in ks {
            if l.coef(c, n, m).is_zero() {
                return Err(DiscError::ZeroCoefficient { coef: super::operator::NAMES[c], n, m });
            }
        }
    }
    Ok(())
}

fn build(l: &DiscreteOperator, f: impl Fn(i64, i64) -> Rational) -> Factorization {
    let nf = *l.normal_forms();
    let f: Vec<Rational> = (0..nf.size()).map(|k| {
        let (n, m) = nf.site(k);
        f(n, m)
    }).collect();
    let mut u = Vec::with_capacity(f.len());
    let mut v = Vec::with_capacity(f.len());
    let mut w = Vec::with_capacity(f.len());
    for (k, fk) in f.iter().enumerate() {
        let (n, m) = nf.site(k);
        u.push(l.b(n, m) / fk);
        v.push(l.c(n, m) / fk);
        w.push(l.a(n, m) / fk - Rational::one());
    }
    Factorization { nf, f, u, v, w }
}

/// `T₁`-then-`T₂` form: `f_{n,m} = b_{n−1,m}c_{n,m}/d_{n−1,m}`, `u = b/f`, `v = c/f`, `w = a/f − 1`.
pub fn decompose12(l: &DiscreteOperator) -> Result<Factorization, DiscError> {
    require_nonzero(l, &[1, 2, 3])?;
    Ok(build(l, |n, m| l.b(n - 1, m) * l.c(n, m) / l.d(n - 1, m)))
}

/// `T₂`-then-`T₁` form: `f′_{n,m} = c_{n,m−1}b_{n,m}/d_{n,m−1}`, `u′ = b/f′`, `v′ = c/f′`, `w′ = a/f′ − 1`.
pub fn decompose21(l: &DiscreteOperator) -> Result<Factorization, DiscError> {
    require_nonzero(l, &[1, 2, 3])?;
    Ok(build(l, |n, m| l.c(n, m - 1) * l.b(n, m) / l.d(n, m - 1)))
}

/// Coefficients of `f((1 + uT₁)(1 + vT₂) + w)`.
pub fn recompose12(fz: &Factorization, periods: super::PeriodMatrix) -> Result<DiscreteOperator, DiscError> {
    DiscreteOperator::from_fn(periods, |n, m| {
        let f = fz.f_at(n, m);
        let u = fz.u_at(n, m);
        [
            f * (Rational::one() + fz.w_at(n, m)),
            f * u,
            f * fz.v_at(n, m),
            f * u * fz.v_at(n + 1, m),
        ]
    })
}

/// Coefficients of `f((1 + vT₂)(1 + uT₁) + w)`.
pub fn recompose21(fz: &Factorization, periods: super::PeriodMatrix) -> Result<DiscreteOperator, DiscError> {
    DiscreteOperator::from_fn(periods, |n, m| {
        let f = fz.f_at(n, m);
        let v = fz.v_at(n, m);
        [
            f * (Rational::one() + fz.w_at(n, m)),
            f * fz.u_at(n, m),
            f * v,
            f * v * fz.u_at(n, m + 1),
        ]
    })
}

/// Complete gauge invariants: `w` and `H = v_{n,m}u_{n,m+1}/(u_{n,m}v_{n+1,m})` of the
/// `T₁T₂` factorization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscreteGaugeInvariants {
    pub nf: NormalForms,
    pub w: Vec<Rational>,
    pub h: Vec<Rational>,
}

impl DiscreteGaugeInvariants {
    pub fn of(l: &DiscreteOperator) -> Result<Self, DiscError> {
        let fz = decompose12(l)?;
        let nf = fz.nf;
        let h = (0..nf.size())
            .map(|k| {
                let (n, m) = nf.site(k);
                fz.v_at(n, m) * fz.u_at(n, m + 1) / (fz.u_at(n, m) * fz.v_at(n + 1, m))
            })
            .collect();
        Ok(DiscreteGaugeInvariants { nf, w: fz.w, h })
    }

    pub fn w_at(&self, n: i64, m: i64) -> &Rational {
        &self.w[self.nf.index(n, m)]
    }

    pub fn h_at(&self, n: i64, m: i64) -> &Rational {
        &self.h[self.nf.index(n, m)]
    }

    fn check(&self) -> Result<(), DiscError> {
        for k in 0..self.nf.size() {
            let (n, m) = self.nf.site(k);
            let w = &self.w[k];
            if w.is_zero() || *w == -Rational::one() || self.h[k].is_zero() {
                return Err(DiscError::DegenerateW { n, m });
            }
        }
        Ok(())
    }
}

fn check_w(fz: &Factorization) -> Result<(), DiscError> {
    for (k, w) in fz.w.iter().enumerate() {
        let (n, m) = fz.nf.site(k);
        if w.is_zero() {
            return Err(DiscError::ZeroW { n, m });
        }
        if *w == -Rational::one() {
            return Err(DiscError::DegenerateW { n, m });
        }
    }
    Ok(())
}

/// `Λ₁₂⁺⁺`: `L ↦ w(1 + vT₂)w⁻¹(1 + uT₁) + w` in the representative with `f̃ ≡ 1`,
/// i.e. `ã = 1 + w`, `b̃ = u`, `c̃ = wv/w_{n,m+1}`, `d̃ = wv u_{n,m+1}/w_{n,m+1}`.
pub fn laplace12_pp(l: &DiscreteOperator) -> Result<DiscreteOperator, DiscError> {
    let fz = decompose12(l)?;
    check_w(&fz)?;
    DiscreteOperator::from_fn(*l.periods(), |n, m| {
        let w = fz.w_at(n, m);
        let p = w * fz.v_at(n, m) / fz.w_at(n, m + 1);
        [Rational::one() + w, fz.u_at(n, m).clone(), p.clone(), p * fz.u_at(n, m + 1)]
    })
}

/// `Λ₂₁⁺⁺`: `L ↦ w′(1 + u′T₁)w′⁻¹(1 + v′T₂) + w′` from the `T₂T₁` factorization.
pub fn laplace21_pp(l: &DiscreteOperator) -> Result<DiscreteOperator, DiscError> {
    let fz = decompose21(l)?;
    check_w(&fz)?;
    DiscreteOperator::from_fn(*l.periods(), |n, m| {
        let w = fz.w_at(n, m);
        let q = w * fz.u_at(n, m) / fz.w_at(n + 1, m);
        [Rational::one() + w, q.clone(), fz.v_at(n, m).clone(), q * fz.v_at(n + 1, m)]
    })
}

/// One `Λ₁₂⁺⁺` step on the invariants:
/// `1 + w̃_{n+1,m} = (1 + w_{n+1,m}) · w_{n,m}w_{n+1,m+1}/(w_{n,m+1}w_{n+1,m}) · H_{n,m}` and
/// `H̃_{n,m} = (1 + w̃_{n,m+1})/(1 + w_{n,m+1})`.
pub fn laplace_invariants_step_disc(inv: &DiscreteGaugeInvariants) -> Result<DiscreteGaugeInvariants, DiscError> {
    inv.check()?;
    let nf = inv.nf;
    let one = Rational::one();
    let w_new: Vec<Rational> = (0..nf.size())
        .map(|k| {
            let (n, m) = nf.site(k);
            // the update is stated at (n+1, m); evaluate it at (n−1, m) + (1, 0)
            let (p, q) = (n - 1, m);
            let ratio = inv.w_at(p, q) * inv.w_at(p + 1, q + 1) / (inv.w_at(p, q + 1) * inv.w_at(p + 1, q));
            (&one + inv.w_at(p + 1, q)) * ratio * inv.h_at(p, q) - &one
        })
        .collect();
    let tmp = DiscreteGaugeInvariants { nf, w: w_new, h: inv.h.clone() };
    let h_new = (0..nf.size())
        .map(|k| {
            let (n, m) = nf.site(k);
            (&one + tmp.w_at(n, m + 1)) / (&one + inv.w_at(n, m + 1))
        })
        .collect();
    Ok(DiscreteGaugeInvariants { nf, w: tmp.w, h: h_new })
}

/// Which factorization order a Laplace transformation uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Order {
    /// `Λ₁₂`: shift in `n` first, then in `m`.
    First,
    /// `Λ₂₁`: shift in `m` first, then in `n`.
    Second,
}

/// `Λ₁₂^{s₁s₂}` (or `Λ₂₁^{s₂s₁}` for [`Order::Second`]) built on the shift pair
/// `(T₁^{s₁}, T₂^{s₂})`: the `++` transformation conjugated by the reflection that turns
/// the pair into `(T₁, T₂)`.
pub fn laplace_variant(l: &DiscreteOperator, s1: i64, s2: i64, order: Order) -> Result<DiscreteOperator, DiscError> {
    let step = |x: &DiscreteOperator| match order {
        Order::First => laplace12_pp(x),
        Order::Second => laplace21_pp(x),
    };
    if s1 == 1 && s2 == 1 {
        return step(l);
    }
    Ok(step(&l.conjugate(s1, s2))?.conjugate(s1, s2))
}

/// `S₁`: `a_{n,m} ↦ a_{n−1,m}` (likewise `b, c, d`).
pub fn shift1(l: &DiscreteOperator) -> DiscreteOperator {
    l.shift(1, 0)
}

/// `S₂`: `a_{n,m} ↦ a_{n,m−1}`.
pub fn shift2(l: &DiscreteOperator) -> DiscreteOperator {
    l.shift(0, 1)
}

/// The four ratio families whose constancy characterizes integrable operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RatioFamily {
    /// `A_{.,j}/B_{.,j}` over rows `j`.
    RowAB,
    /// `C_{.,j}/D_{.,j}` over rows `j`.
    RowCD,
    /// `A_{i,.}/C_{i,.}` over columns `i`.
    ColumnAC,
    /// `B_{i,.}/D_{i,.}` over columns `i`.
    ColumnBD,
}

/// A ratio differing from the family's value at index 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub family: RatioFamily,
    pub index: i64,
    pub value: Rational,
    pub reference: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegrabilityReport {
    pub integrable: bool,
    pub violations: Vec<Violation>,
}

/// Row ratios `num_{.,j}/den_{.,j}` for `j = 0..δ` (`row = true`) or column ratios for `i = 0..ε`.
pub(crate) fn ratio_family(
    l: &DiscreteOperator,
    num: usize,
    den: usize,
    row: bool,
) -> Result<Vec<Rational>, DiscError> {
    let nf = l.normal_forms();
    let count = if row { nf.delta } else { nf.eps };
    (0..count)
        .map(|k| {
            let (p, q) = if row {
                (l.row_product(num, k), l.row_product(den, k))
            } else {
                (l.column_product(num, k), l.column_product(den, k))
            };
            if q.is_zero() {
                let kind = if row { "row" } else { "column" };
                Err(DiscError::ZeroProduct(format!("{kind} {k} product of {}", super::operator::NAMES[den])))
            } else {
                Ok(p / q)
            }
        })
        .collect()
}

/// Exact integrability predicate: all four ratio families constant.
pub fn is_integrable(l: &DiscreteOperator) -> Result<IntegrabilityReport, DiscError> {
    let families = [
        (RatioFamily::RowAB, 0, 1, true),
        (RatioFamily::RowCD, 2, 3, true),
        (RatioFamily::ColumnAC, 0, 2, false),
        (RatioFamily::ColumnBD, 1, 3, false),
    ];
    let mut violations = Vec::new();
    for (family, num, den, row) in families {
        let values = ratio_family(l, num, den, row)?;
        for (index, value) in values.iter().enumerate().skip(1) {
            if *value != values[0] {
                violations.push(Violation { family, index: index as i64, value: value.clone(), reference: values[0].clone() });
            }
        }
    }
    Ok(IntegrabilityReport { integrable: violations.is_empty(), violations })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicReport {
    /// `(Λ₁₂⁺⁺)^α(L)` and `S₁^β S₂^γ(L)` have equal invariants.
    pub cyclic: bool,
    /// `(β,δ) = (γ,ε) = (α+γ,ε) = (α−β,δ) = 1`.
    pub gcd_conditions: bool,
    pub integrable: bool,
}

impl CyclicReport {
    /// The implication "cyclic with the gcd conditions ⇒ integrable".
    pub fn consistent(&self) -> bool {
        !(self.cyclic && self.gcd_conditions) || self.integrable
    }
}

/// Compares `(Λ₁₂⁺⁺)^α(L)` with `S₁^β S₂^γ(L)` on gauge invariants.
pub fn cyclic_chain_check(l: &DiscreteOperator, alpha: u32, beta: i64, gamma: i64) -> Result<CyclicReport, DiscError> {
    if alpha == 0 {
        return Err(DiscError::Invalid("α must be at least 1".into()));
    }
    let mut x = l.clone();
    for _ in 0..alpha {
        x = laplace12_pp(&x)?;
    }
    let target = l.shift(beta, gamma);
    let cyclic = DiscreteGaugeInvariants::of(&x)? == DiscreteGaugeInvariants::of(&target)?;
    let nf = l.normal_forms();
    let a = alpha as i64;
    let gcd_conditions = beta.gcd(&nf.delta) == 1
        && gamma.gcd(&nf.eps) == 1
        && (a + gamma).gcd(&nf.eps) == 1
        && (a - beta).gcd(&nf.delta) == 1;
    Ok(CyclicReport { cyclic, gcd_conditions, integrable: is_integrable(l)?.integrable })
}
