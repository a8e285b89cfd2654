mod common;

use common::*;
use laplace_toda::coeffring::{int, pow, rat, Rational};
use laplace_toda::disc::*;
use laplace_toda::gen::{constant_discrete, integrable_discrete, random_discrete, random_gauge_array, random_nonzero_rational};
use num_traits::{One, Zero};

fn inv(l: &DiscreteOperator) -> DiscreteGaugeInvariants {
    DiscreteGaugeInvariants::of(l).unwrap()
}

#[test]
fn normal_forms_of_diag_2_2() {
    let nf = PeriodMatrix::diag(2, 2).unwrap().normal_forms().unwrap();
    assert_eq!((nf.delta, nf.delta_t, nf.zeta), (2, 2, 0));
    assert_eq!((nf.eps, nf.eps_t, nf.xi), (2, 2, 0));
    assert_eq!((nf.det, nf.det_t, nf.kappa), (4, 1, 1));
    assert_eq!(nf.genus(), 1);
}

#[test]
fn normal_forms_of_twisted_lattice() {
    let nf = PeriodMatrix::new(2, 0, 1, 2).unwrap().normal_forms().unwrap();
    // (−1, 2) = (1, 2) − (2, 0) lies in the lattice, so ζ = 1
    assert_eq!((nf.delta, nf.delta_t, nf.zeta), (2, 2, 1));
    assert_eq!((nf.eps, nf.eps_t, nf.xi), (1, 4, 2));
    assert_eq!((nf.det_t, nf.xi_t, nf.zeta_t, nf.kappa), (2, 1, 1, 0));
    assert_eq!(1 - nf.xi_t * nf.zeta_t, nf.kappa * nf.det_t);
}

#[test]
fn degenerate_lattice_is_rejected() {
    let t = PeriodMatrix::diag(1, 5).unwrap();
    assert!(matches!(t.normal_forms(), Err(DiscError::DegeneratePeriods(_))));
    assert!(PeriodMatrix::new(1, 2, 2, 4).is_err());
}

#[test]
fn normal_forms_generate_the_lattice_brute_force() {
    let mut r = rng(1);
    use rand::Rng;
    let mut tested = 0;
    while tested < 200 {
        let t = PeriodMatrix { p: r.gen_range(-6..=6), r: r.gen_range(-6..=6), s: r.gen_range(-6..=6), t: r.gen_range(-6..=6) };
        if t.det() <= 0 {
            continue;
        }
        let Ok(nf) = t.normal_forms() else { continue };
        tested += 1;
        // both bases lie in the lattice and have determinant Δ
        assert!(t.contains(nf.delta_t, 0) && t.contains(-nf.zeta, nf.delta));
        assert!(t.contains(nf.eps, -nf.xi) && t.contains(0, nf.eps_t));
        assert_eq!(nf.delta_t * nf.delta, t.det());
        assert_eq!(nf.eps * nf.eps_t, t.det());
        assert!(0 <= nf.zeta && nf.zeta < nf.delta_t && 0 <= nf.xi && nf.xi < nf.eps_t);
        assert_eq!(1 - nf.xi_t * nf.zeta_t, nf.kappa * nf.det_t);
        // the smallest positive second coordinate of a lattice vector is δ
        for m in 1..nf.delta {
            assert!((-40..40).all(|n| !t.contains(n, m)));
        }
        // the reduction to each box is a lattice translation
        for (n, m) in [(7, -3), (-5, 11), (0, 0), (13, 13)] {
            let (i, j, a, b) = nf.reduce_first(n, m);
            assert_eq!((n - i, m - j), (a * nf.delta_t - b * nf.zeta, b * nf.delta));
            assert!(t.contains(n - i, m - j) && (0..nf.delta_t).contains(&i) && (0..nf.delta).contains(&j));
            let (i, j, a, b) = nf.reduce_second(n, m);
            assert_eq!((n - i, m - j), (a * nf.eps, -a * nf.xi + b * nf.eps_t));
            assert!(t.contains(n - i, m - j) && (0..nf.eps).contains(&i) && (0..nf.eps_t).contains(&j));
        }
    }
}

/// Multiplier of the translation `(n, m)` given the multipliers `(x, y)` of the basis rows
/// `e₁, e₂`, found by solving `(n, m) = p e₁ + q e₂` with Cramer's rule.
fn translation_multiplier(e1: (i64, i64), e2: (i64, i64), x: &Rational, y: &Rational, v: (i64, i64)) -> Rational {
    let det = e1.0 * e2.1 - e1.1 * e2.0;
    let p = (v.0 * e2.1 - v.1 * e2.0) / det;
    let q = (e1.0 * v.1 - e1.1 * v.0) / det;
    assert_eq!((p * e1.0 + q * e2.0, p * e1.1 + q * e2.1), v);
    pow(x, p) * pow(y, q)
}

#[test]
fn multiplier_conversion_matches_lattice_coordinates() {
    let mut r = rng(2);
    for t in test_lattices().into_iter().chain([PeriodMatrix::new(3, 1, 1, 2).unwrap(), PeriodMatrix::new(4, 2, 2, 3).unwrap()]) {
        let Ok(nf) = t.normal_forms() else { continue };
        for _ in 0..5 {
            let (nu2, mu2) = (random_nonzero_rational(&mut r), random_nonzero_rational(&mut r));
            let (nu1, mu1) = nf.to_first(&nu2, &mu2).unwrap();
            let e1 = (nf.eps, -nf.xi);
            let e2 = (0, nf.eps_t);
            assert_eq!(nu1, translation_multiplier(e1, e2, &nu2, &mu2, (nf.delta_t, 0)));
            assert_eq!(mu1, translation_multiplier(e1, e2, &nu2, &mu2, (-nf.zeta, nf.delta)));
            assert_eq!(nf.to_second(&nu1, &mu1).unwrap(), (nu2, mu2));
        }
        assert_eq!(nf.to_first(&int(1), &int(1)).unwrap(), (int(1), int(1)));
    }
    let nf = PeriodMatrix::diag(2, 2).unwrap().normal_forms().unwrap();
    assert_eq!(nf.to_first(&rat(3, 2), &rat(-5, 7)).unwrap(), (rat(3, 2), rat(-5, 7)));
    assert_eq!(nf.to_second(&int(0), &int(1)), Err(DiscError::ZeroMultiplier));
}

#[test]
fn coefficient_access_is_lattice_periodic() {
    let mut r = rng(3);
    for t in test_lattices() {
        let l = random_discrete(&mut r, t);
        for (n, m) in [(0, 0), (1, 1), (-3, 5), (4, -2)] {
            for k in 0..4 {
                assert_eq!(l.coef(k, n, m), l.coef(k, n + t.p, m + t.r));
                assert_eq!(l.coef(k, n, m), l.coef(k, n - t.s, m - t.t));
            }
        }
    }
}

#[test]
fn constant_decomposition_recomposes() {
    let t = PeriodMatrix::diag(2, 2).unwrap();
    let l = constant_discrete(t, 2);
    let d = decompose12(&l).unwrap();
    assert!(d.f.iter().all(|f| f.is_one()));
    assert_eq!(d.u, d.v);
    assert!(d.w.iter().all(|w| w.is_one()));
    assert_eq!(recompose12(&d, t).unwrap(), l);
    let d21 = decompose21(&l).unwrap();
    assert_eq!(recompose21(&d21, t).unwrap(), l);
}

#[test]
fn w_vanishes_when_a_equals_f() {
    let t = PeriodMatrix::diag(2, 2).unwrap();
    let l = constant_discrete(t, 1);
    assert!(decompose12(&l).unwrap().w.iter().all(|w| w.is_zero()));
    assert!(!l.is_generic());
    assert!(matches!(laplace12_pp(&l), Err(DiscError::ZeroW { .. })));
    let l0 = constant_discrete(t, 0);
    assert!(matches!(laplace12_pp(&l0), Err(DiscError::DegenerateW { .. })));
}

#[test]
fn random_decompositions_recompose_exactly() {
    let mut r = rng(4);
    for t in test_lattices() {
        for _ in 0..10 {
            let l = random_discrete(&mut r, t);
            let d = decompose12(&l).unwrap();
            assert_eq!(recompose12(&d, t).unwrap(), l);
            let nf = l.normal_forms();
            for k in 0..nf.size() {
                let (n, m) = nf.site(k);
                assert_eq!(d.v_at(n + 1, m), &(l.d(n, m) / l.b(n, m)));
            }
            assert_eq!(recompose21(&decompose21(&l).unwrap(), t).unwrap(), l);
        }
    }
}

#[test]
fn zero_coefficient_is_reported() {
    let t = PeriodMatrix::diag(2, 2).unwrap();
    let ones = vec![int(1); 4];
    let mut d = ones.clone();
    d[3] = int(0);
    let l = DiscreteOperator::from_domain_arrays(t, vec![int(2); 4], ones.clone(), ones, d).unwrap();
    assert_eq!(decompose12(&l).unwrap_err(), DiscError::ZeroCoefficient { coef: 'd', n: 1, m: 1 });
}

#[test]
fn invariants_are_gauge_invariant() {
    let mut r = rng(5);
    let lattices = test_lattices();
    for k in 0..100 {
        let t = lattices[k % 3];
        let l = random_discrete(&mut r, t);
        let size = t.det() as usize;
        let g = l.gauge(&random_gauge_array(&mut r, size), &random_gauge_array(&mut r, size)).unwrap();
        assert_ne!(g, l);
        assert_eq!(inv(&g), inv(&l));
    }
}

#[test]
fn laplace_types_are_mutually_inverse() {
    let mut r = rng(6);
    let lattices = test_lattices();
    let mut done = 0;
    while done < 50 {
        let l = random_discrete(&mut r, lattices[done % 3]);
        let Ok(x) = laplace12_pp(&l) else { continue };
        let Ok(back) = laplace21_pp(&x) else { continue };
        assert_eq!(inv(&back), inv(&l));
        if let Ok(y) = laplace21_pp(&l) {
            if let Ok(back) = laplace12_pp(&y) {
                assert_eq!(inv(&back), inv(&l));
            }
        }
        done += 1;
    }
}

#[test]
fn constant_operator_is_a_fixed_point() {
    let t = PeriodMatrix::diag(2, 2).unwrap();
    let l = DiscreteOperator::from_fn(t, |_, _| [int(3), rat(1, 2), int(-2), int(5)]).unwrap();
    let before = inv(&l);
    assert!(before.h.iter().all(|h| h.is_one()));
    let after = inv(&laplace12_pp(&l).unwrap());
    assert_eq!(after, before);
    assert_eq!(laplace_invariants_step_disc(&before).unwrap(), before);
}

#[test]
fn invariant_step_agrees_with_operator_route() {
    let mut r = rng(7);
    let lattices = test_lattices();
    let mut done = 0;
    while done < 30 {
        let l = random_discrete(&mut r, lattices[done % 3]);
        let Ok(x) = laplace12_pp(&l) else { continue };
        assert_eq!(laplace_invariants_step_disc(&inv(&l)).unwrap(), inv(&x));
        done += 1;
    }
}

#[test]
fn degenerate_invariants_are_rejected() {
    let t = PeriodMatrix::diag(2, 2).unwrap();
    let nf = t.normal_forms().unwrap();
    let i = DiscreteGaugeInvariants { nf, w: vec![int(2); 4], h: vec![int(0); 4] };
    assert!(matches!(laplace_invariants_step_disc(&i), Err(DiscError::DegenerateW { .. })));
    let i = DiscreteGaugeInvariants { nf, w: vec![int(-1); 4], h: vec![int(1); 4] };
    assert!(matches!(laplace_invariants_step_disc(&i), Err(DiscError::DegenerateW { .. })));
    let i = DiscreteGaugeInvariants { nf, w: vec![rat(2, 3); 4], h: vec![int(1); 4] };
    assert_eq!(laplace_invariants_step_disc(&i).unwrap(), i);
}

#[test]
fn shifts_act_by_reindexing() {
    let mut r = rng(8);
    let t = PeriodMatrix::diag(2, 2).unwrap();
    let konst = DiscreteOperator::from_fn(t, |_, _| [int(3), int(2), int(-1), int(7)]).unwrap();
    assert_eq!(shift1(&konst), konst);
    assert_eq!(shift2(&konst), konst);
    for t in test_lattices() {
        let l = random_discrete(&mut r, t);
        let nf = *l.normal_forms();
        let mut x = l.clone();
        for _ in 0..nf.delta_t {
            x = shift1(&x);
        }
        assert_eq!(x, l);
        let s = shift1(&l);
        assert_eq!(s.a(1, 0), l.a(0, 0));
        let s = shift2(&l);
        assert_eq!(s.c(0, 1), l.c(0, 0));
    }
}

#[test]
fn shifts_commute_with_laplace() {
    let mut r = rng(9);
    let lattices = test_lattices();
    let mut done = 0;
    while done < 20 {
        let l = random_discrete(&mut r, lattices[done % 3]);
        let Ok(x) = laplace12_pp(&l) else { continue };
        assert_eq!(inv(&shift1(&x)), inv(&laplace12_pp(&shift1(&l)).unwrap()));
        assert_eq!(inv(&shift2(&x)), inv(&laplace12_pp(&shift2(&l)).unwrap()));
        done += 1;
    }
}

#[test]
fn conjugation_is_an_involution() {
    let mut r = rng(10);
    for t in test_lattices() {
        let l = random_discrete(&mut r, t);
        for (s1, s2) in [(1, 1), (-1, 1), (1, -1), (-1, -1)] {
            let back = l.conjugate(s1, s2).conjugate(s1, s2);
            assert_eq!(back.normal_forms(), l.normal_forms());
            assert_eq!(back.arrays(), l.arrays());
        }
    }
}

#[test]
fn signed_laplace_pairs_are_inverse() {
    let mut r = rng(11);
    let lattices = test_lattices();
    for (s1, s2) in [(1, 1), (-1, 1), (1, -1), (-1, -1)] {
        let mut done = 0;
        while done < 10 {
            let l = random_discrete(&mut r, lattices[done % 3]);
            let Ok(x) = laplace_variant(&l, s1, s2, Order::First) else { continue };
            let Ok(back) = laplace_variant(&x, s1, s2, Order::Second) else { continue };
            assert_eq!(inv(&back), inv(&l), "signs ({s1}, {s2})");
            done += 1;
        }
    }
}

#[test]
fn plus_plus_variant_delegates() {
    let mut r = rng(12);
    let l = random_discrete(&mut r, PeriodMatrix::diag(2, 2).unwrap());
    assert_eq!(laplace_variant(&l, 1, 1, Order::First).unwrap(), laplace12_pp(&l).unwrap());
    assert_eq!(laplace_variant(&l, 1, 1, Order::Second).unwrap(), laplace21_pp(&l).unwrap());
}

#[test]
fn group_relations_between_signed_transformations() {
    let mut r = rng(13);
    let lattices = test_lattices();
    let mut done = 0;
    while done < 20 {
        let l = random_discrete(&mut r, lattices[done % 3]);
        let (Ok(pp), Ok(mp), Ok(pm), Ok(mm)) = (
            laplace12_pp(&l),
            laplace_variant(&l, -1, 1, Order::First),
            laplace_variant(&l, 1, -1, Order::First),
            laplace_variant(&l, -1, -1, Order::First),
        ) else {
            continue;
        };
        assert_eq!(inv(&pp), inv(&shift1(&mp)), "Λ⁺⁺ = S₁Λ⁻⁺");
        assert_eq!(inv(&pp), inv(&pm.shift(0, -1)), "Λ⁺⁺ = S₂⁻¹Λ⁺⁻");
        assert_eq!(inv(&pp), inv(&mm.shift(1, -1)), "Λ⁺⁺ = S₁S₂⁻¹Λ⁻⁻");
        if l.normal_forms().zeta != 0 {
            assert_ne!(inv(&pp), inv(&shift2(&pm)));
        }
        done += 1;
    }
}

#[test]
fn integrability_of_simple_operators() {
    let t = PeriodMatrix::diag(2, 2).unwrap();
    let ones = DiscreteOperator::from_fn(t, |_, _| [int(1), int(1), int(1), int(1)]).unwrap();
    assert!(is_integrable(&ones).unwrap().integrable);
    // perturbing b at (1, 0) breaks A/B along row 0 and B/D along column 1
    let mut b = vec![int(1); 4];
    b[1] = int(2);
    let pert = DiscreteOperator::from_domain_arrays(t, vec![int(1); 4], b, vec![int(1); 4], vec![int(1); 4]).unwrap();
    let rep = is_integrable(&pert).unwrap();
    assert!(!rep.integrable);
    assert!(rep.violations.iter().any(|v| v.family == RatioFamily::RowAB && v.index == 1));
    assert!(rep.violations.iter().any(|v| v.family == RatioFamily::ColumnBD && v.index == 1));
    assert!(rep.violations.iter().all(|v| matches!(v.family, RatioFamily::RowAB | RatioFamily::ColumnBD)));
}

#[test]
fn separable_operators_are_integrable_in_every_gauge() {
    let mut r = rng(14);
    for t in test_lattices() {
        for _ in 0..5 {
            let l = integrable_discrete(&mut r, t);
            assert!(is_integrable(&l).unwrap().integrable);
            let size = t.det() as usize;
            let g = l.gauge(&random_gauge_array(&mut r, size), &random_gauge_array(&mut r, size)).unwrap();
            assert!(is_integrable(&g).unwrap().integrable);
        }
    }
}

#[test]
fn random_operators_are_not_integrable() {
    let mut r = rng(15);
    for t in test_lattices() {
        for _ in 0..10 {
            assert!(!is_integrable(&random_discrete(&mut r, t)).unwrap().integrable);
        }
    }
}

#[test]
fn zero_product_is_reported() {
    let t = PeriodMatrix::diag(2, 2).unwrap();
    let l = DiscreteOperator::from_fn(t, |n, _| [int(1), int(n), int(1), int(1)]).unwrap();
    assert!(matches!(is_integrable(&l), Err(DiscError::ZeroProduct(_))));
}

#[test]
fn constant_operator_is_cyclic() {
    let t = PeriodMatrix::diag(2, 2).unwrap();
    let l = DiscreteOperator::from_fn(t, |_, _| [int(3), int(1), int(2), int(-1)]).unwrap();
    let rep = cyclic_chain_check(&l, 1, 0, 0).unwrap();
    assert!(rep.cyclic && rep.integrable && !rep.gcd_conditions && rep.consistent());
}

#[test]
fn random_operators_have_no_short_cycles() {
    let mut r = rng(16);
    let lattices = test_lattices();
    for k in 0..6 {
        let l = random_discrete(&mut r, lattices[k % 3]);
        for alpha in 1..=2 {
            for beta in -2..=2 {
                for gamma in -2..=2 {
                    match cyclic_chain_check(&l, alpha, beta, gamma) {
                        Ok(rep) => assert!(!rep.cyclic, "α={alpha}, β={beta}, γ={gamma}"),
                        Err(DiscError::ZeroW { .. } | DiscError::DegenerateW { .. }) => {}
                        Err(e) => panic!("{e}"),
                    }
                }
            }
        }
    }
}

#[test]
fn detected_cycles_of_integrable_operators_are_consistent() {
    let mut r = rng(17);
    for t in test_lattices() {
        let l = integrable_discrete(&mut r, t);
        for alpha in 1..=2 {
            for beta in -1..=1 {
                for gamma in -1..=1 {
                    if let Ok(rep) = cyclic_chain_check(&l, alpha, beta, gamma) {
                        assert!(rep.integrable && rep.consistent());
                    }
                }
            }
        }
    }
    assert!(cyclic_chain_check(&constant_discrete(PeriodMatrix::diag(2, 2).unwrap(), 3), 0, 0, 0).is_err());
}

#[test]
fn laplace_output_is_normalized() {
    let mut r = rng(18);
    let l = random_discrete(&mut r, PeriodMatrix::diag(3, 2).unwrap());
    let x = laplace12_pp(&l).unwrap();
    let d = decompose12(&x).unwrap();
    // ã = 1 + w with b̃ = u: the representative is the one with f = 1 in the old factorization
    let old = decompose12(&l).unwrap();
    for k in 0..6 {
        let (n, m) = l.normal_forms().site(k);
        assert_eq!(x.a(n, m), &(Rational::one() + old.w_at(n, m)));
        assert_eq!(x.b(n, m), old.u_at(n, m));
    }
    assert_eq!(d.nf, *l.normal_forms());
}

#[test]
fn printed_invariant_update_disagrees_with_operator_route() {
    let mut r = rng(19);
    let l = random_discrete(&mut r, PeriodMatrix::diag(3, 2).unwrap());
    let before = inv(&l);
    let after = inv(&laplace12_pp(&l).unwrap());
    let one = Rational::one();
    let (n, m) = (0, 0);
    let ratio = before.w_at(n, m) * before.w_at(n + 1, m + 1) / (before.w_at(n + 1, m) * before.w_at(n, m + 1));
    let printed = (&one + before.w_at(n, m + 1)) * &ratio / before.h_at(n, m);
    assert_ne!(&one + after.w_at(n + 1, m), printed);
    let derived = (&one + before.w_at(n + 1, m)) * &ratio * before.h_at(n, m);
    assert_eq!(&one + after.w_at(n + 1, m), derived);
}
