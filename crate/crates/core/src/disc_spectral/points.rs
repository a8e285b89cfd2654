//! Marked points `P±_j` (at `μ₁ ∈ {0, ∞}`) and `Q±_i` (at `ν₂ ∈ {0, ∞}`), and how the
//! Laplace transformation and the shifts permute them.

use num_traits::Zero;

use crate::coeffring::{sign_pow, Rational};
use crate::disc::{laplace12_pp, ratio_family, shift1, shift2, DiscreteOperator};

use super::curve::{spectral_poly, MonomialMatch, SpectralCurvePoly};
use super::{MismatchReport, SpectralError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PointFamily {
    PPlus,
    PMinus,
    QPlus,
    QMinus,
}

impl PointFamily {
    pub const ALL: [PointFamily; 4] = [PointFamily::PPlus, PointFamily::PMinus, PointFamily::QPlus, PointFamily::QMinus];

    pub fn name(self) -> &'static str {
        match self {
            PointFamily::PPlus => "P+",
            PointFamily::PMinus => "P-",
            PointFamily::QPlus => "Q+",
            PointFamily::QMinus => "Q-",
        }
    }
}

/// `ν₁`-coordinates of `P±_j` (`j < δ`) and `μ₂`-coordinates of `Q±_i` (`i < ε`).
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralPoints {
    pub p_plus: Vec<Rational>,
    pub p_minus: Vec<Rational>,
    pub q_plus: Vec<Rational>,
    pub q_minus: Vec<Rational>,
}

impl SpectralPoints {
    pub fn family(&self, f: PointFamily) -> &[Rational] {
        match f {
            PointFamily::PPlus => &self.p_plus,
            PointFamily::PMinus => &self.p_minus,
            PointFamily::QPlus => &self.q_plus,
            PointFamily::QMinus => &self.q_minus,
        }
    }

    /// Each point must be a root of its boundary slice of the curve.
    pub fn check_against(&self, curve: &SpectralCurvePoly) -> Result<(), SpectralError> {
        let nf = &curve.nf;
        let one = Rational::from_integer(1.into());
        let slices = [
            (PointFamily::PPlus, curve.r.mu_slice(0), true),
            (PointFamily::PMinus, curve.r.mu_slice(nf.delta_t), true),
            (PointFamily::QPlus, curve.r_hat.nu_slice(0), false),
            (PointFamily::QMinus, curve.r_hat.nu_slice(nf.eps_t), false),
        ];
        for (family, slice, in_nu) in slices {
            for (k, x) in self.family(family).iter().enumerate() {
                let value = if in_nu { slice.eval_rational(x, &one) } else { slice.eval_rational(&one, x) };
                if !value.is_zero() {
                    return Err(MismatchReport::new(format!("{}_{k} is not a root of its boundary slice", family.name())).into());
                }
            }
        }
        Ok(())
    }
}

/// Groups equal values: `(value, multiplicity)` in order of first occurrence.
pub fn multiplicities(values: &[Rational]) -> Vec<(Rational, usize)> {
    let mut out: Vec<(Rational, usize)> = Vec::new();
    for v in values {
        match out.iter_mut().find(|(x, _)| x == v) {
            Some(entry) => entry.1 += 1,
            None => out.push((v.clone(), 1)),
        }
    }
    out
}

/// Exact marked points from the row products (`P`) and column products (`Q`).
pub fn spectral_points(l: &DiscreteOperator) -> Result<SpectralPoints, SpectralError> {
    let nf = l.normal_forms();
    let (sp, sq) = (sign_pow(nf.delta_t), sign_pow(nf.eps_t));
    let scaled = |v: Vec<Rational>, s: &Rational| v.into_iter().map(|x| x * s).collect::<Vec<_>>();
    Ok(SpectralPoints {
        p_plus: scaled(ratio_family(l, 0, 1, true)?, &sp),
        p_minus: scaled(ratio_family(l, 2, 3, true)?, &sp),
        q_plus: scaled(ratio_family(l, 0, 2, false)?, &sq),
        q_minus: scaled(ratio_family(l, 1, 3, false)?, &sq),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Transform {
    /// `Λ₁₂⁺⁺`.
    Laplace,
    S1,
    S2,
}

impl Transform {
    pub fn name(self) -> &'static str {
        match self {
            Transform::Laplace => "Λ12++",
            Transform::S1 => "S1",
            Transform::S2 => "S2",
        }
    }

    pub fn apply(self, l: &DiscreteOperator) -> Result<DiscreteOperator, SpectralError> {
        Ok(match self {
            Transform::Laplace => laplace12_pp(l)?,
            Transform::S1 => shift1(l),
            Transform::S2 => shift2(l),
        })
    }

    /// Expected index shift `s` with `new_k = old_{k+s}` for each family.
    pub fn expected_shift(self, family: PointFamily) -> i64 {
        use PointFamily::*;
        match (self, family) {
            (Transform::Laplace, PMinus) => 1,
            (Transform::Laplace, QMinus) => -1,
            (Transform::Laplace, _) => 0,
            (Transform::S1, QPlus | QMinus) => -1,
            (Transform::S1, _) => 0,
            (Transform::S2, PPlus | PMinus) => -1,
            (Transform::S2, _) => 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FamilyAction {
    pub family: PointFamily,
    pub expected_shift: i64,
    /// All `s ∈ [0, len)` with `new_k = old_{k+s}` for every `k`.
    pub fitting_shifts: Vec<i64>,
}

impl FamilyAction {
    pub fn holds(&self, len: usize) -> bool {
        self.fitting_shifts.contains(&self.expected_shift.rem_euclid(len as i64))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralAction {
    pub transform: Transform,
    /// `R(image) = ν^p μ^q · scalar · R(L)`.
    pub curve: MonomialMatch,
    pub families: Vec<FamilyAction>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralInvarianceReport {
    pub actions: Vec<SpectralAction>,
}

fn fitting_shifts(old: &[Rational], new: &[Rational]) -> Vec<i64> {
    let n = old.len();
    (0..n).filter(|&s| (0..n).all(|k| new[k] == old[(k + s) % n])).map(|s| s as i64).collect()
}

/// Compares curve and marked points of `L` and of its image under `t`.
pub fn transform_spectral_action(l: &DiscreteOperator, t: Transform) -> Result<SpectralAction, SpectralError> {
    let image = t.apply(l)?;
    let (before, after) = (spectral_poly(l)?, spectral_poly(&image)?);
    let curve = match after.r.match_up_to_monomial(&before.r) {
        Some((p, q, scalar)) => MonomialMatch { p, q, scalar },
        None => {
            let (x, y) = (after.r.canonical_up_to_monomial(), before.r.canonical_up_to_monomial());
            let report = match x.first_difference(&y) {
                Some((e, a, b)) => MismatchReport::at(format!("curve changed under {}", t.name()), e, a, b),
                None => MismatchReport::new(format!("curve changed under {}", t.name())),
            };
            return Err(report.into());
        }
    };
    let (old, new) = (spectral_points(l)?, spectral_points(&image)?);
    let families = PointFamily::ALL
        .iter()
        .map(|&f| FamilyAction {
            family: f,
            expected_shift: t.expected_shift(f),
            fitting_shifts: fitting_shifts(old.family(f), new.family(f)),
        })
        .collect();
    Ok(SpectralAction { transform: t, curve, families })
}

/// Runs `Λ₁₂⁺⁺`, `S₁` and `S₂` and checks each row of the permutation table.
pub fn laplace_spectral_invariance(l: &DiscreteOperator) -> Result<SpectralInvarianceReport, SpectralError> {
    let points = spectral_points(l)?;
    let mut actions = Vec::new();
    for t in [Transform::Laplace, Transform::S1, Transform::S2] {
        let action = transform_spectral_action(l, t)?;
        for fa in &action.families {
            let len = points.family(fa.family).len();
            if !fa.holds(len) {
                return Err(MismatchReport::new(format!(
                    "{}({}_k) = {}_(k{:+}) fails; fitting shifts {:?}",
                    t.name(),
                    fa.family.name(),
                    fa.family.name(),
                    fa.expected_shift,
                    fa.fitting_shifts
                ))
                .into());
            }
        }
        actions.push(action);
    }
    Ok(SpectralInvarianceReport { actions })
}
