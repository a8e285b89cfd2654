mod common;

use common::*;
use laplace_toda::coeffring::{FitConfig, PeriodicFunction};
use laplace_toda::gen::{random_gauge, random_invariants, random_semidiscrete};
use laplace_toda::semidisc::*;
use num_complex::Complex64;

const T: f64 = 1.0;

fn constant_op(a: &[f64], b: &[f64], c: &[f64], d: &[f64]) -> SemiDiscreteOperator {
    let lift = |v: &[f64]| v.iter().map(|x| Complex64::new(*x, 0.0)).collect::<Vec<_>>();
    SemiDiscreteOperator::constant(T, &lift(a), &lift(b), &lift(c), &lift(d)).unwrap()
}

fn assert_const(f: &PeriodicFunction, v: f64, what: &str) {
    let dist = f.distance(&konst(f.period(), v), GRID);
    assert!(dist < 1e-12, "{what}: distance {dist:e} from {v}");
}

fn canonical_invariants(l: &SemiDiscreteOperator, cfg: &FitConfig) -> GaugeInvariants {
    let (canon, _) = canonical_form(l, cfg).unwrap();
    let dec = decompose_first(&canon, cfg).unwrap();
    GaugeInvariants::with_unit_z(dec.a, dec.w)
}

#[test]
fn first_decomposition_of_constant_operator() {
    let l = constant_op(&[2.0], &[1.0], &[3.0], &[1.0]);
    let dec = decompose_first(&l, &FitConfig::default()).unwrap();
    assert_const(&dec.f[0], 1.0, "f");
    assert_const(&dec.v[0], 1.0, "v");
    assert_const(&dec.a[0], 3.0, "A");
    assert_const(&dec.w[0], -1.0, "w");
}

#[test]
fn equal_a_and_c_give_zero_w() {
    let mut r = rng(3);
    let mut l = random_semidiscrete(&mut r, 3, T, 2, 0.15);
    for n in 0..3 {
        l.b[n] = konst(T, 1.0);
        l.d[n] = konst(T, 1.0);
        l.a[n] = l.c[n].clone();
    }
    let dec = decompose_first(&l, &fine_cfg()).unwrap();
    for w in &dec.w {
        assert!(w.sup_norm(GRID) < 1e-12);
    }
}

#[test]
fn first_decomposition_recomposes_random_operators() {
    let cfg = fine_cfg();
    let mut r = rng(11);
    for trial in 0..10 {
        let n = 1 + trial % 4;
        let l = random_semidiscrete(&mut r, n, T, 3, 0.15);
        let dec = decompose_first(&l, &cfg).unwrap();
        let err = dec.recompose().distance(&l, GRID);
        assert!(err < 1e-9, "trial {trial}: recomposition error {err:e}");
    }
}

#[test]
fn second_decomposition_of_constant_operator() {
    let l = constant_op(&[2.0], &[1.0], &[3.0], &[1.0]);
    let dec = decompose_second(&l, &FitConfig::default()).unwrap();
    assert_const(&dec.f[0], 1.0, "f̂");
    assert_const(&dec.v[0], 1.0, "v̂");
    assert_const(&dec.a[0], 3.0, "Â");
    assert_const(&dec.w[0], -1.0, "ŵ");
}

#[test]
fn second_decomposition_shows_the_index_shift() {
    let l = constant_op(&[2.0, 5.0], &[1.0, 1.0], &[3.0, 7.0], &[2.0, 1.0]);
    let dec = decompose_second(&l, &FitConfig::default()).unwrap();
    assert_const(&dec.a[1], 1.5, "Â_1 = c_0/d_0");
    assert_const(&dec.a[0], 7.0, "Â_0 = c_1/d_1");
}

#[test]
fn second_decomposition_recomposes_random_operators() {
    let cfg = fine_cfg();
    let mut r = rng(12);
    for trial in 0..10 {
        let l = random_semidiscrete(&mut r, 1 + trial % 4, T, 3, 0.15);
        let err = decompose_second(&l, &cfg).unwrap().recompose().distance(&l, GRID);
        assert!(err < 1e-9, "trial {trial}: recomposition error {err:e}");
    }
}

#[test]
fn degenerate_d_is_rejected() {
    let mut l = constant_op(&[2.0], &[1.0], &[3.0], &[1.0]);
    // d(y) = cos(2πy/T) vanishes at y = T/4 (a grid node)
    l.d[0] = PeriodicFunction::from_modes(T, &[(1, c(0.5, 0.0)), (-1, c(0.5, 0.0))]);
    assert!(matches!(decompose_second(&l, &FitConfig::default()), Err(SemiDiscError::Coeff(_))));
    assert!(matches!(decompose_first(&l, &FitConfig::default()), Err(SemiDiscError::Coeff(_))));
}

#[test]
fn identity_gauge_is_trivial() {
    let mut r = rng(4);
    let l = random_semidiscrete(&mut r, 2, T, 2, 0.15);
    let one = vec![konst(T, 1.0); 2];
    let out = gauge_apply(&l, &one, &one, &FitConfig::default()).unwrap();
    assert!(out.distance(&l, GRID) < 1e-14);
}

#[test]
fn gauge_by_inverse_b_normalizes_b() {
    let l = constant_op(&[2.0, 1.0], &[4.0, -2.0], &[3.0, 1.0], &[1.0, 5.0]);
    let g = vec![konst(T, 1.0); 2];
    let h = vec![konst(T, 0.25), konst(T, -0.5)];
    let out = gauge_apply(&l, &g, &h, &FitConfig::default()).unwrap();
    for b in &out.b {
        assert_const(b, 1.0, "b̄");
    }
}

#[test]
fn gauges_compose_by_products() {
    let cfg = fine_cfg();
    let mut r = rng(5);
    let l = random_semidiscrete(&mut r, 3, T, 2, 0.1);
    let (g1, h1) = (random_gauge(&mut r, 3, T, 1, 0.2), random_gauge(&mut r, 3, T, 1, 0.2));
    let (g2, h2) = (random_gauge(&mut r, 3, T, 1, 0.2), random_gauge(&mut r, 3, T, 1, 0.2));
    let twice = gauge_apply(&gauge_apply(&l, &g1, &h1, &cfg).unwrap(), &g2, &h2, &cfg).unwrap();
    let g: Vec<_> = g1.iter().zip(&g2).map(|(a, b)| a.mul(b)).collect();
    let h: Vec<_> = h1.iter().zip(&h2).map(|(a, b)| a.mul(b)).collect();
    let once = gauge_apply(&l, &g, &h, &cfg).unwrap();
    assert!(twice.distance(&once, GRID) < 1e-12);
}

#[test]
fn canonical_form_normalizes_and_is_idempotent() {
    let cfg = fine_cfg();
    let mut r = rng(6);
    let l = random_semidiscrete(&mut r, 3, T, 2, 0.15);
    let (canon, gauge) = canonical_form(&l, &cfg).unwrap();
    assert_eq!(gauge.g.len(), 4);
    for n in 0..3 {
        assert_const(&canon.b[n], 1.0, "b̄");
        assert_const(&canon.d[n], 1.0, "d̄");
    }
    let (again, gauge2) = canonical_form(&canon, &cfg).unwrap();
    assert!(again.distance(&canon, GRID) < 1e-9);
    for g in &gauge2.g {
        assert_const(g, 1.0, "second gauge");
    }
}

#[test]
fn canonical_form_of_scaled_constant_operator() {
    let cfg = FitConfig::default();
    let l = constant_op(&[2.0], &[2.0], &[6.0], &[2.0]);
    let (canon, _) = canonical_form(&l, &cfg).unwrap();
    assert_const(&canon.b[0], 1.0, "b");
    assert_const(&canon.d[0], 1.0, "d");
    let dec = decompose_first(&canon, &cfg).unwrap();
    assert_const(&dec.a[0], 3.0, "A");
    assert_const(&dec.w[0], -2.0, "w");
    assert!(dec.recompose().distance(&canon, GRID) < 1e-12);
}

#[test]
fn canonical_form_applies_its_gauge() {
    let cfg = fine_cfg();
    let mut r = rng(7);
    let l = random_semidiscrete(&mut r, 2, T, 2, 0.15);
    let (canon, gauge) = canonical_form(&l, &cfg).unwrap();
    // check b̄_n = h_n b_n g_n and d̄_n = h_n d_n g_{n+1} on the window
    for n in 0..2 {
        for j in 0..GRID {
            let y = T * j as f64 / GRID as f64;
            let hb = gauge.h[n].eval(y) * l.b[n].eval(y) * gauge.g[n].eval(y);
            let hd = gauge.h[n].eval(y) * l.d[n].eval(y) * gauge.g[n + 1].eval(y);
            assert_close(hb, canon.b[n].eval(y), 1e-9, "b̄");
            assert_close(hd, canon.d[n].eval(y), 1e-9, "d̄");
        }
    }
}

#[test]
fn gauge_equivalent_operators_share_canonical_invariants() {
    let cfg = fine_cfg();
    let mut r = rng(8);
    for trial in 0..6 {
        let n = 1 + trial % 3;
        let l = random_semidiscrete(&mut r, n, T, 2, 0.1);
        let g = random_gauge(&mut r, n, T, 2, 0.1);
        let h = random_gauge(&mut r, n, T, 2, 0.1);
        let lg = gauge_apply(&l, &g, &h, &cfg).unwrap();
        let d = canonical_invariants(&l, &cfg).distance_mod_shift(&canonical_invariants(&lg, &cfg), GRID);
        assert!(d < 1e-8, "trial {trial}: invariants differ by {d:e}");
    }
}

#[test]
fn periodic_canonical_form_of_normalized_operator() {
    let cfg = FitConfig::default();
    let l = constant_op(&[0.5, 2.0], &[-1.0, -1.0], &[1.0, 3.0], &[1.0, 1.0]);
    let (canon, inv) = periodic_canonical_form(&l, &cfg).unwrap();
    assert_const(&inv.i, 1.0, "I");
    assert_const(&inv.z, -1.0, "Z");
    assert!(canon.distance(&l, GRID) < 1e-12);
}

#[test]
fn periodic_canonical_form_preserves_i_and_normalizes() {
    let cfg = fine_cfg();
    let mut r = rng(9);
    for trial in 0..4 {
        let n = 1 + trial % 4;
        let l = random_semidiscrete(&mut r, n, T, 2, 0.1);
        let (canon, inv) = periodic_canonical_form(&l, &cfg).unwrap();
        for k in 0..n {
            assert!(canon.b[k].distance(&inv.z, GRID) < 1e-9);
            assert_const(&canon.d[k], 1.0, "d");
        }
        for j in 0..GRID {
            let y = T * j as f64 / GRID as f64;
            let direct: Complex64 = (0..n).map(|k| l.b[k].eval(y) / l.d[k].eval(y)).product();
            assert_close(inv.i.eval(y), direct, 1e-8, "I");
            assert_close(inv.z.eval(y).powi(n as i32), direct, 1e-8, "Z^N");
        }
        // the same invariants arise from the operator rebuilt from them
        let rebuilt = inv.to_operator(&cfg).unwrap();
        let (_, inv2) = periodic_canonical_form(&rebuilt, &cfg).unwrap();
        assert!(inv.distance_mod_shift(&inv2, GRID) < 1e-8);
        // and from a periodic gauge of the operator
        let g = random_gauge(&mut r, n, T, 1, 0.1);
        let h = random_gauge(&mut r, n, T, 1, 0.1);
        let (_, inv3) = periodic_canonical_form(&gauge_apply(&l, &g, &h, &cfg).unwrap(), &cfg).unwrap();
        assert!(inv.distance_mod_shift(&inv3, GRID) < 1e-8);
    }
}

#[test]
fn winding_i_has_no_periodic_root() {
    let cfg = FitConfig::default();
    let mut l = constant_op(&[1.0, 1.0], &[1.0, 1.0], &[0.5, 0.5], &[1.0, 1.0]);
    l.b[0] = PeriodicFunction::from_modes(T, &[(1, c(1.0, 0.0))]);
    assert!(matches!(periodic_canonical_form(&l, &cfg), Err(SemiDiscError::BranchFailure { winding: 1, n: 2 })));
}

#[test]
fn laplace_first_fixes_constant_invariants() {
    let cfg = FitConfig::default();
    let l = constant_op(&[2.0], &[1.0], &[3.0], &[1.0]);
    let lt = laplace_first(&l, &cfg).unwrap();
    let dec = decompose_first(&lt, &cfg).unwrap();
    assert_const(&dec.a[0], 3.0, "Ã");
    assert_const(&dec.w[0], -1.0, "w̃");
}

#[test]
fn laplace_first_on_canonical_operator() {
    let cfg = fine_cfg();
    let mut r = rng(10);
    let mut l = random_semidiscrete(&mut r, 3, T, 2, 0.15);
    for n in 0..3 {
        l.b[n] = konst(T, 1.0);
        l.d[n] = konst(T, 1.0);
    }
    let lt = laplace_first(&l, &cfg).unwrap();
    for n in 0..3 {
        let n1 = (n + 1) % 3;
        assert!(lt.a[n].distance(&l.a[n], GRID) < 1e-9, "ã = a");
        for j in 0..GRID {
            let y = T * j as f64 / GRID as f64;
            let dt = (l.a[n].eval(y) - l.c[n].eval(y)) / (l.a[n1].eval(y) - l.c[n1].eval(y));
            assert_close(lt.d[n].eval(y), dt, 1e-9, "d̃");
            assert_close(lt.c[n].eval(y), dt * l.c[n1].eval(y), 1e-9, "c̃");
        }
    }
}

#[test]
fn laplace_second_inverts_laplace_first() {
    let cfg = fine_cfg();
    let mut r = rng(13);
    for trial in 0..6 {
        let n = 1 + trial % 4;
        let l = random_semidiscrete(&mut r, n, T, 2, 0.1);
        let back = laplace_second(&laplace_first(&l, &cfg).unwrap(), &cfg).unwrap();
        let d = canonical_invariants(&l, &cfg).distance_mod_shift(&canonical_invariants(&back, &cfg), GRID);
        assert!(d < 1e-8, "trial {trial}: {d:e}");
        let fwd = laplace_first(&laplace_second(&l, &cfg).unwrap(), &cfg).unwrap();
        let d2 = canonical_invariants(&l, &cfg).distance_mod_shift(&canonical_invariants(&fwd, &cfg), GRID);
        assert!(d2 < 1e-8, "trial {trial}: {d2:e}");
    }
}

#[test]
fn invariant_step_fixes_constants() {
    let cfg = FitConfig::default();
    let inv = GaugeInvariants::with_unit_z(vec![konst(T, 0.7)], vec![konst(T, 1.3)]);
    let next = laplace_invariants_step(&inv, &cfg).unwrap();
    assert!(next.distance(&inv, GRID) < 1e-14);
}

#[test]
fn invariant_step_matches_operator_route() {
    let cfg = fine_cfg();
    let mut r = rng(14);
    for trial in 0..4 {
        let n = 1 + trial % 4;
        let l = random_semidiscrete(&mut r, n, T, 2, 0.1);
        let (_, inv) = periodic_canonical_form(&l, &cfg).unwrap();
        let stepped = laplace_invariants_step(&inv, &cfg).unwrap();
        let (_, via_op) = periodic_canonical_form(&laplace_first(&l, &cfg).unwrap(), &cfg).unwrap();
        let d = stepped.distance_mod_shift(&via_op, GRID);
        assert!(d < 1e-8, "trial {trial}: {d:e}");
        assert!(via_op.i.distance(&inv.i, GRID) < 1e-8, "I preserved");
        for j in 0..GRID {
            let y = T * j as f64 / GRID as f64;
            assert!(telescoping_defect(&inv, &stepped, y).norm() < 1e-8);
        }
    }
}

#[test]
fn chains_are_reversible() {
    let cfg = fine_cfg();
    let mut r = rng(15);
    let inv0 = random_invariants(&mut r, 3, std::f64::consts::TAU, 2, 0.1);
    let chain = build_chain(&inv0, 4, &cfg).unwrap();
    assert_eq!(chain.len(), 4);
    let mut back = chain[3].clone();
    for _ in 0..3 {
        back = inverse_invariants_step(&back, &cfg).unwrap();
    }
    assert!(back.distance(&inv0, GRID) < 1e-7);
}

#[test]
fn constant_chain_is_constant() {
    let cfg = FitConfig::default();
    let inv = GaugeInvariants::with_unit_z(vec![konst(T, 0.5); 2], vec![konst(T, 2.0); 2]);
    for layer in build_chain(&inv, 5, &cfg).unwrap() {
        assert!(layer.distance(&inv, GRID) < 1e-13);
    }
}
