//! Seeded random instance generators shared by the `verify` command and the test suites.

use num_complex::Complex64;
use rand::Rng;

use crate::coeffring::{int, rat, PeriodicFunction, Rational};
use crate::disc::{DiscreteOperator, PeriodMatrix};
use crate::semidisc::{GaugeInvariants, SemiDiscreteOperator};

fn unit_complex<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// `base + Σ_{0<|k|≤degree} c_k e^{2πiky/T}` with `Σ|c_k| ≤ amp·|base|`, so the function
/// stays within `amp·|base|` of `base` (nonvanishing, zero winding, when `amp < 1`).
pub fn random_periodic<R: Rng>(rng: &mut R, period: f64, degree: usize, base: Complex64, amp: f64) -> PeriodicFunction {
    let mut modes: Vec<(i64, Complex64)> = vec![(0, base)];
    let count = 2 * degree;
    if count > 0 {
        let raw: Vec<Complex64> = (0..count).map(|_| unit_complex(rng)).collect();
        let total: f64 = raw.iter().map(|c| c.norm()).sum();
        let budget = amp * base.norm() * rng.gen_range(0.5..1.0);
        let scale = if total > 0.0 { budget / total } else { 0.0 };
        for (idx, c) in raw.into_iter().enumerate() {
            let k = (idx / 2 + 1) as i64 * if idx % 2 == 0 { 1 } else { -1 };
            modes.push((k, c * scale));
        }
    }
    PeriodicFunction::from_modes(period, &modes)
}

/// Base value with modulus in `[lo, hi]` and random phase.
fn random_base<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> Complex64 {
    Complex64::from_polar(rng.gen_range(lo..hi), rng.gen_range(0.0..std::f64::consts::TAU))
}

/// `random_periodic` around a random base of modulus in `[lo, hi]`.
pub fn random_near<R: Rng>(rng: &mut R, period: f64, degree: usize, lo: f64, hi: f64, amp: f64) -> PeriodicFunction {
    let base = random_base(rng, lo, hi);
    random_periodic(rng, period, degree, base, amp)
}

/// Random smooth operator with `b`, `d` close to nonzero constants and generic `a`, `c`
/// chosen so that `w = a/b − c/d + (log(d/b))′` stays away from zero.
pub fn random_semidiscrete<R: Rng>(rng: &mut R, n: usize, period: f64, degree: usize, amp: f64) -> SemiDiscreteOperator {
    let mut l = SemiDiscreteOperator { a: vec![], b: vec![], c: vec![], d: vec![] };
    for _ in 0..n {
        let b = random_near(rng, period, degree, 0.8, 1.5, amp);
        let d = random_near(rng, period, degree, 0.8, 1.5, amp);
        let c = random_near(rng, period, degree, 0.5, 1.5, amp);
        // a/b ≈ c/d + offset with |offset| dominating the y-dependent terms of w
        let bound = 4.0 * amp * (1.0 + std::f64::consts::TAU * degree as f64 / period) / (1.0 - amp).max(0.1);
        let offset = random_base(rng, 1.5 + bound, 2.5 + bound);
        let a_base = b.mean() * (c.mean() / d.mean() + offset);
        let a = random_periodic(rng, period, degree, a_base, amp * 0.5);
        l.a.push(a);
        l.b.push(b);
        l.c.push(c);
        l.d.push(d);
    }
    l
}

/// Random invariants with `I ≡ Z ≡ 1` and `w` bounded away from zero.
pub fn random_invariants<R: Rng>(rng: &mut R, n: usize, period: f64, degree: usize, amp: f64) -> GaugeInvariants {
    let a = (0..n).map(|_| random_near(rng, period, degree, 0.3, 1.0, amp)).collect();
    let w = (0..n).map(|_| random_near(rng, period, degree, 1.0, 2.0, amp)).collect();
    GaugeInvariants::with_unit_z(a, w)
}

/// Random nonvanishing gauge factors close to nonzero constants.
pub fn random_gauge<R: Rng>(rng: &mut R, n: usize, period: f64, degree: usize, amp: f64) -> Vec<PeriodicFunction> {
    (0..n).map(|_| random_near(rng, period, degree, 0.7, 1.3, amp)).collect()
}

/// Nonzero rational `±p/q` with `1 ≤ p ≤ 9`, `1 ≤ q ≤ 5`.
pub fn random_nonzero_rational<R: Rng>(rng: &mut R) -> Rational {
    let p: i64 = rng.gen_range(1..=9);
    let q: i64 = rng.gen_range(1..=5);
    let s = if rng.gen_bool(0.5) { 1 } else { -1 };
    rat(s * p, q)
}

/// Random discrete operator with nonzero coefficients; `w = a/f − 1` avoids `{0, −1}`.
pub fn random_discrete<R: Rng>(rng: &mut R, periods: PeriodMatrix) -> DiscreteOperator {
    loop {
        let size = periods.det() as usize;
        let mut draw = || (0..size).map(|_| random_nonzero_rational(rng)).collect::<Vec<_>>();
        let (a, b, c, d) = (draw(), draw(), draw(), draw());
        let l = DiscreteOperator::from_domain_arrays(periods, a, b, c, d).expect("valid periods");
        if l.is_generic() {
            return l;
        }
    }
}

/// Operator with `a = x_i y_j`, `b = x′_i y_j`, `c = x_i z_j`, `d = k x′_i z_j` in the
/// box coordinates `(i, j)` of the rows/columns used by the integrability predicate.
pub fn integrable_discrete<R: Rng>(rng: &mut R, periods: PeriodMatrix) -> DiscreteOperator {
    loop {
        let l = DiscreteOperator::separable(
            periods,
            &mut || random_nonzero_rational(rng),
        )
        .expect("valid periods");
        if l.is_generic() {
            return l;
        }
    }
}

/// The constant operator with all coefficients one except `a = value`.
pub fn constant_discrete(periods: PeriodMatrix, value: i64) -> DiscreteOperator {
    let size = periods.det() as usize;
    let ones = vec![int(1); size];
    DiscreteOperator::from_domain_arrays(periods, vec![int(value); size], ones.clone(), ones.clone(), ones)
        .expect("valid periods")
}

/// Random periodic gauge factor on the fundamental domain (nonzero entries).
pub fn random_gauge_array<R: Rng>(rng: &mut R, size: usize) -> Vec<Rational> {
    (0..size).map(|_| random_nonzero_rational(rng)).collect()
}
