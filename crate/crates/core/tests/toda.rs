mod common;

use std::f64::consts::TAU;

use common::*;
use laplace_toda::coeffring::{FitConfig, PeriodicFunction, QuasiPeriodic, Rational};
use laplace_toda::disc::{laplace12_pp, DiscError, DiscreteGaugeInvariants};
use laplace_toda::gen::{integrable_discrete, random_discrete, random_invariants, random_near};
use laplace_toda::semidisc::{build_chain, GaugeInvariants};
use laplace_toda::toda::*;
use num_traits::One;

const K: usize = 6;

/// Each chain step differentiates, which amplifies the rounding noise in the top modes;
/// degree 32 resolves six-layer chains of mild data without amplifying that noise.
fn chain_cfg() -> FitConfig {
    FitConfig::with_degree(32)
}

fn chain_field(seed: u64, n: usize) -> SemiDiscreteField {
    let cfg = chain_cfg();
    let inv0 = random_invariants(&mut rng(seed), n, TAU, 1, 0.02);
    SemiDiscreteField::from_chain(&build_chain(&inv0, K, &cfg).unwrap()).unwrap()
}

fn max_norm(f: &PeriodicFunction) -> f64 {
    f.sup_norm(GRID)
}

fn zero_g() -> QuasiPeriodic {
    QuasiPeriodic::from_periodic(PeriodicFunction::zero(TAU))
}

#[test]
fn constant_field_solves_compatibility_lattice() {
    let cfg = FitConfig::default();
    let field = SemiDiscreteField::new(vec![vec![konst(TAU, 1.5); 3]; 4]).unwrap();
    for k in 1..3 {
        for n in 0..3 {
            assert!(max_norm(&eqw_residual(&field, k, n, &cfg).unwrap()) < 1e-13);
        }
    }
}

#[test]
fn chains_solve_compatibility_lattice() {
    let cfg = chain_cfg();
    for (seed, n) in [(1, 2), (2, 3)] {
        let field = chain_field(seed, n);
        for k in 1..K as i64 - 1 {
            for m in 0..n as i64 {
                let res = max_norm(&eqw_residual(&field, k, m, &cfg).unwrap());
                assert!(res < 1e-7, "seed {seed} k {k} n {m}: {res:e}");
            }
        }
    }
}

#[test]
fn random_field_violates_compatibility_lattice() {
    let cfg = fine_cfg();
    let mut r = rng(3);
    let w = (0..3).map(|_| (0..2).map(|_| random_near(&mut r, TAU, 2, 1.0, 2.0, 0.2)).collect()).collect();
    let field = SemiDiscreteField::new(w).unwrap();
    assert!(max_norm(&eqw_residual(&field, 1, 0, &cfg).unwrap()) > 1e-3);
}

#[test]
fn missing_layers_are_reported() {
    let cfg = FitConfig::default();
    let field = SemiDiscreteField::new(vec![vec![konst(TAU, 1.5); 2]; 2]).unwrap();
    assert!(matches!(eqw_residual(&field, 1, 0, &cfg), Err(TodaError::MissingLayer { k: 2, .. })));
    assert!(matches!(SemiDiscreteField::new(vec![]), Err(TodaError::Shape)));
}

#[test]
fn constant_field_reconstructs_closed_form() {
    let cfg = FitConfig::default();
    let w = 1.5f64;
    let field = SemiDiscreteField::new(vec![vec![konst(TAU, w); 2]; 5]).unwrap();
    let g = reconstruct_g(&field, &zero_g(), &[], &cfg, 1e-9).unwrap();
    for k in 0..=3 {
        for n in 0..5 - k {
            let gk = g.get(k as i64, n as i64).unwrap();
            assert_close(gk.eval(0.7), c(k as f64 * w.ln(), 0.0), 1e-12, "g");
            assert!(gk.drift.norm() < 1e-13);
        }
    }
    assert!(g.get(4, 0).is_err());
}

#[test]
fn reconstructed_g_satisfies_defining_relations() {
    let cfg = chain_cfg();
    let field = chain_field(4, 3);
    let r = [c(0.3, 0.0), c(-0.2, 0.1), c(0.0, 0.0), c(0.5, 0.0)];
    let g00 = QuasiPeriodic::from_periodic(konst(TAU, 0.25));
    let g = reconstruct_g(&field, &g00, &r, &cfg, 1e-7).unwrap();
    for y in [0.0, 1.1, 4.0] {
        for k in 1..=K - 2 {
            for n in 0..K - 1 - k {
                let (k, n) = (k as i64, n as i64);
                let lhs = g.get(k, n).unwrap().eval(y) - g.get(k - 1, n + 1).unwrap().eval(y);
                let w = field.w(k, n).unwrap().eval(y);
                assert_close(lhs.exp(), w, 1e-7, "exp(g - g) = w");
            }
        }
        for k in 0..=K - 2 {
            for n in 0..K - 1 - k {
                let (k, n) = (k as i64, n as i64);
                let d = g.get(k, n).unwrap().eval_derivative(y) - g.get(k, n + 1).unwrap().eval_derivative(y);
                let rhs = field.w(k + 1, n).unwrap().eval(y) - field.w(k, n).unwrap().eval(y);
                assert_close(d, rhs, 1e-7, "(g - g)' = w - w");
            }
        }
    }
    for (k, rk) in r.iter().enumerate() {
        assert_eq!(g.c[k][0], Some(*rk));
    }
}

#[test]
fn chain_g_solves_toda_lattice() {
    let cfg = chain_cfg();
    for (seed, n) in [(5, 2), (6, 3)] {
        let field = chain_field(seed, n);
        let g = reconstruct_g(&field, &zero_g(), &[], &cfg, 1e-7).unwrap();
        for k in 1..=K as i64 - 3 {
            for m in 0..K as i64 - 2 - k {
                let res = max_norm(&toda_residual_2d1(&g, k, m, &cfg).unwrap());
                assert!(res < 1e-6, "seed {seed} k {k} n {m}: {res:e}");
            }
        }
    }
}

#[test]
fn perturbed_g_violates_toda_lattice() {
    let cfg = chain_cfg();
    let field = chain_field(7, 2);
    let mut g = reconstruct_g(&field, &zero_g(), &[], &cfg, 1e-7).unwrap();
    let bumped = g.get(1, 1).unwrap().add_constant(c(0.1, 0.0));
    g.g[1][1] = Some(bumped);
    assert!(max_norm(&toda_residual_2d1(&g, 1, 1, &cfg).unwrap()) > 1e-3);
}

#[test]
fn incompatible_field_is_rejected() {
    let cfg = fine_cfg();
    let mut r = rng(8);
    let w = (0..4).map(|_| (0..2).map(|_| random_near(&mut r, TAU, 2, 1.0, 2.0, 0.2)).collect()).collect();
    let field = SemiDiscreteField::new(w).unwrap();
    assert!(matches!(reconstruct_g(&field, &zero_g(), &[], &cfg, 1e-7), Err(TodaError::IncompatibleField { .. })));
}

#[test]
fn constant_invariants_give_constant_toda_chain() {
    let cfg = FitConfig::default();
    let inv = GaugeInvariants::with_unit_z(vec![konst(TAU, 0.5); 2], vec![konst(TAU, 2.0); 2]);
    let field = SemiDiscreteField::from_chain(&build_chain(&inv, 4, &cfg).unwrap()).unwrap();
    let g = reconstruct_g(&field, &zero_g(), &[], &cfg, 1e-9).unwrap();
    assert!(max_norm(&toda_residual_2d1(&g, 1, 0, &cfg).unwrap()) < 1e-12);
}

fn discrete_chain(l: laplace_toda::disc::DiscreteOperator, len: usize) -> Vec<DiscreteGaugeInvariants> {
    let mut ops = vec![l];
    for _ in 1..len {
        let next = laplace12_pp(ops.last().unwrap()).unwrap();
        ops.push(next);
    }
    ops.iter().map(|l| DiscreteGaugeInvariants::of(l).unwrap()).collect()
}

#[test]
fn discrete_toda_fixes_unit_field() {
    for nf in test_lattices().into_iter().map(|p| p.normal_forms().unwrap()) {
        let field = DiscreteField::new(nf, vec![vec![Rational::one(); nf.size()]; 2]).unwrap();
        assert_eq!(discrete_toda_step(&field, 0).unwrap(), vec![Rational::one(); nf.size()]);
    }
}

#[test]
fn discrete_toda_reproduces_laplace_chain() {
    for (seed, periods) in test_lattices().into_iter().enumerate() {
        let l = random_discrete(&mut rng(20 + seed as u64), periods);
        let chain = discrete_chain(l, 4);
        let field = DiscreteField::from_chain(&chain).unwrap();
        for k in 0..2 {
            assert_eq!(discrete_toda_step(&field, k).unwrap(), field.layers[k + 2], "lattice {seed}, k {k}");
        }
    }
}

#[test]
fn discrete_toda_holds_on_integrable_operators() {
    let periods = test_lattices()[1];
    let l = integrable_discrete(&mut rng(30), periods);
    let field = DiscreteField::from_chain(&discrete_chain(l, 3)).unwrap();
    assert_eq!(discrete_toda_step(&field, 0).unwrap(), field.layers[2]);
}

#[test]
fn degenerate_layers_are_rejected() {
    let nf = test_lattices()[0].normal_forms().unwrap();
    let mut layers = vec![vec![Rational::one(); nf.size()]; 2];
    layers[1][1] = -Rational::one();
    let field = DiscreteField::new(nf, layers).unwrap();
    assert!(matches!(discrete_toda_step(&field, 0), Err(TodaError::Disc(DiscError::DegenerateW { .. }))));
    assert!(matches!(discrete_toda_step(&field, 1), Err(TodaError::MissingLayer { .. })));
}

/// The lattice as printed: `(1+w⁽ᵏ⁺²⁾_{n+1,m})/(1+w⁽ᵏ⁺¹⁾_{n+1,m}) · (1+w⁽ᵏ⁺¹⁾_{n,m+1})/(1+w⁽ᵏ⁾_{n,m+1}) = 1/W⁽ᵏ⁾_{n,m}`.
#[test]
fn printed_discrete_lattice_disagrees_with_laplace_chain() {
    let periods = test_lattices()[2];
    let l = random_discrete(&mut rng(40), periods);
    let field = DiscreteField::from_chain(&discrete_chain(l, 3)).unwrap();
    let one = Rational::one();
    let failures = (0..field.nf.size())
        .filter(|&idx| {
            let (n, m) = field.nf.site(idx);
            let w = |k: usize, a: i64, b: i64| field.w(k, a, b).clone();
            let lhs = (&one + w(2, n + 1, m)) / (&one + w(1, n + 1, m)) * (&one + w(1, n, m + 1))
                / (&one + w(0, n, m + 1));
            let rhs = w(0, n + 1, m) * w(0, n, m + 1) / (w(0, n, m) * w(0, n + 1, m + 1));
            lhs != rhs
        })
        .count();
    assert!(failures > 0);
}

#[test]
fn toda_field_shape_is_checked() {
    let nf = test_lattices()[0].normal_forms().unwrap();
    assert!(matches!(DiscreteField::new(nf, vec![vec![]]), Err(TodaError::Shape)));
}
