mod common;

use common::*;
use laplace_toda::coeffring::{int, rat, to_f64, BivariatePolynomial, Rational};
use laplace_toda::disc::*;
use laplace_toda::disc_spectral::*;
use laplace_toda::gen::{integrable_discrete, random_discrete, random_gauge_array};
use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::One;

/// Lattices for the wider sweeps, including twisted ones in both normal forms.
fn more_lattices() -> Vec<PeriodMatrix> {
    let mut v = test_lattices();
    for (p, r, s, t) in [(2, 0, 0, 3), (3, 0, 1, 2), (2, 1, 0, 3), (4, 0, 2, 2), (2, 0, 0, 4), (3, 1, 0, 2), (2, 2, 0, 3)] {
        let t = PeriodMatrix::new(p, r, s, t).unwrap();
        if t.normal_forms().is_ok() {
            v.push(t);
        }
    }
    v
}

/// Leibniz expansion over all permutations.
fn leibniz_det(m: &[Vec<BivariatePolynomial>]) -> BivariatePolynomial {
    fn rec(m: &[Vec<BivariatePolynomial>], row: usize, used: &mut Vec<bool>, sign: bool, acc: BivariatePolynomial, out: &mut BivariatePolynomial) {
        let n = m.len();
        if row == n {
            *out = if sign { &*out - &acc } else { &*out + &acc };
            return;
        }
        for c in 0..n {
            if used[c] || m[row][c].is_zero() {
                continue;
            }
            // parity: number of used columns greater than c
            let inversions = (c + 1..n).filter(|&k| used[k]).count();
            used[c] = true;
            rec(m, row + 1, used, sign ^ (inversions % 2 == 1), &acc * &m[row][c], out);
            used[c] = false;
        }
    }
    let mut out = BivariatePolynomial::zero();
    rec(m, 0, &mut vec![false; m.len()], false, BivariatePolynomial::one(), &mut out);
    out
}

fn ones(t: PeriodMatrix) -> DiscreteOperator {
    DiscreteOperator::from_fn(t, |_, _| [int(1), int(1), int(1), int(1)]).unwrap()
}

#[test]
fn m_has_one_slot_per_coefficient() {
    let mut r = rng(1);
    let l = random_discrete(&mut r, PeriodMatrix::diag(2, 2).unwrap());
    let m = build_m(&l);
    assert_eq!(m.size(), 4);
    for row in &m.entries {
        assert_eq!(row.iter().filter(|p| !p.is_zero()).count(), 4);
        assert!(row.iter().all(|p| p.num_terms() <= 1));
    }
    let mhat = build_mhat(&l);
    assert_eq!(mhat.size(), 4);
}

#[test]
fn all_ones_matrix_has_unit_monomials() {
    for t in test_lattices() {
        let m = build_m(&ones(t));
        for row in &m.entries {
            for p in row {
                assert!(p.terms().all(|(e, c)| c.is_one() && e.0 >= 0 && e.1 >= 0 && e.0 <= 1 && e.1 <= 1) || p.num_terms() > 1);
            }
        }
        // total weight per row is the four coefficients
        for row in &m.entries {
            let total: Rational = row.iter().flat_map(|p| p.terms().map(|(_, c)| c.clone())).sum();
            assert_eq!(total, int(4));
        }
    }
}

#[test]
fn rows_encode_the_bloch_equation() {
    // M(ν, μ)·ψ|box = (Lψ)|box for an explicit Bloch function with rational multipliers
    let mut r = rng(2);
    for t in more_lattices() {
        let l = random_discrete(&mut r, t);
        let nf = *l.normal_forms();
        let (nu, mu) = (rat(3, 2), rat(-5, 7));
        let m = build_m(&l);
        let values: Vec<Rational> = (0..nf.size()).map(|k| int(k as i64 + 1) * rat(1, 3) + int(2)).collect();
        let psi = |n: i64, mm: i64| {
            let (i, j, a, b) = nf.reduce_first(n, mm);
            laplace_toda::coeffring::pow(&nu, a) * laplace_toda::coeffring::pow(&mu, b) * &values[(i + j * nf.delta_t) as usize]
        };
        for row in 0..nf.size() {
            let (n, mm) = m.site(row);
            let lhs: Rational = (0..nf.size()).map(|c| m.entries[row][c].eval_rational(&nu, &mu) * &values[c]).sum();
            assert_eq!(lhs, l.apply_at(psi, n, mm));
        }
    }
}

#[test]
fn determinant_matches_leibniz_expansion() {
    let mut r = rng(3);
    for t in more_lattices() {
        for _ in 0..3 {
            let l = random_discrete(&mut r, t);
            let m = build_m(&l);
            assert_eq!(m.det(), leibniz_det(&m.entries), "{t:?}");
            let mh = build_mhat(&l);
            assert_eq!(mh.det(), leibniz_det(&mh.entries), "{t:?}");
        }
    }
}

#[test]
fn genus_of_test_lattices() {
    let g = |t: PeriodMatrix| spectral_poly(&random_discrete(&mut rng(4), t)).unwrap().genus;
    assert_eq!(g(PeriodMatrix::diag(2, 2).unwrap()), 1);
    assert_eq!(g(PeriodMatrix::new(2, 0, 1, 2).unwrap()), 2);
    assert_eq!(g(PeriodMatrix::diag(3, 2).unwrap()), 2);
}

#[test]
fn bottom_slice_on_diag_2_2() {
    let mut r = rng(5);
    let l = random_discrete(&mut r, PeriodMatrix::diag(2, 2).unwrap());
    let c = spectral_poly(&l).unwrap();
    let f = |j: i64| {
        &BivariatePolynomial::monomial(l.row_product(1, j), 1, 0) - &BivariatePolynomial::constant(l.row_product(0, j))
    };
    assert_eq!(c.r.mu_slice(0), &f(0) * &f(1));
}

#[test]
fn support_degrees_and_corners_on_random_operators() {
    let mut r = rng(6);
    for t in more_lattices() {
        let nf = t.normal_forms().unwrap();
        for _ in 0..4 {
            let l = random_discrete(&mut r, t);
            let c = spectral_poly(&l).unwrap_or_else(|e| panic!("{t:?}: {e}"));
            assert!(c.r.is_polynomial() && c.r_hat.is_polynomial());
            assert!(c.r.degree_nu().unwrap() <= nf.delta + nf.zeta);
            assert_eq!(c.r.degree_mu().unwrap(), nf.delta_t);
            assert!(c.support.iter().all(|&e| in_first_region(&nf, e)));
            assert!(c.r_hat.terms().all(|(&e, _)| in_second_region(&nf, e)));
            assert_eq!(c.corner_signs, CornerSigns::predicted(&nf), "{t:?}");
        }
    }
}

#[test]
fn bottom_sign_is_negative_when_predicted() {
    let t = PeriodMatrix::diag(2, 3).unwrap();
    let nf = t.normal_forms().unwrap();
    assert_eq!((nf.delta, nf.delta_t), (3, 2));
    let c = spectral_poly(&random_discrete(&mut rng(7), t)).unwrap();
    assert_eq!(c.corner_signs.bottom, -1);
}

#[test]
fn curve_is_gauge_invariant_up_to_scalar() {
    let mut r = rng(8);
    for t in more_lattices() {
        let l = random_discrete(&mut r, t);
        let size = t.det() as usize;
        let g = l.gauge(&random_gauge_array(&mut r, size), &random_gauge_array(&mut r, size)).unwrap();
        let (a, b) = (spectral_poly(&l).unwrap().r, spectral_poly(&g).unwrap().r);
        assert_eq!(a.normalized(), b.normalized());
        let (p, q, _) = b.match_up_to_monomial(&a).unwrap();
        assert_eq!((p, q), (0, 0));
    }
}

#[test]
fn both_boxes_give_the_same_curve() {
    let mut r = rng(9);
    for t in more_lattices() {
        for _ in 0..3 {
            let l = random_discrete(&mut r, t);
            let found = consistency_r_rhat(&l).unwrap_or_else(|e| panic!("{t:?}: {e}"));
            assert!(found.scalar == int(1) || found.scalar == int(-1), "{t:?}: {found:?}");
        }
    }
    let found = consistency_r_rhat(&ones(PeriodMatrix::diag(2, 2).unwrap())).unwrap();
    assert_eq!((found.p, found.q, found.scalar), (0, 0, int(1)));
}

#[test]
fn corrupted_matrix_is_reported() {
    let l = random_discrete(&mut rng(10), PeriodMatrix::diag(2, 2).unwrap());
    let mut m = build_m(&l);
    m.entries[0][0] = &m.entries[0][0] + &BivariatePolynomial::constant(int(1));
    match consistency_r_rhat_with(&m, &build_mhat(&l)) {
        Err(SpectralError::Mismatch(rep)) => assert!(rep.exponent.is_some()),
        other => panic!("expected a mismatch, got {other:?}"),
    }
}

#[test]
fn adjoint_matrix_is_the_reflected_transpose() {
    let mut r = rng(11);
    for t in more_lattices() {
        let l = random_discrete(&mut r, t);
        assert_eq!(build_m_adjoint(&l), build_m(&l).transpose().invert_variables());
    }
}

#[test]
fn adjoint_curve_is_reciprocal() {
    let mut r = rng(12);
    for t in more_lattices() {
        let l = random_discrete(&mut r, t);
        let found = adjoint_reciprocity(&l).unwrap();
        assert_eq!((found.p, found.q, found.scalar), (0, 0, int(1)));
    }
    let found = adjoint_reciprocity(&ones(PeriodMatrix::diag(2, 2).unwrap())).unwrap();
    assert_eq!(found.scalar, int(1));
    let l = random_discrete(&mut r, PeriodMatrix::diag(2, 2).unwrap());
    let mut bad = build_m_adjoint(&l);
    bad.entries[1][1] = &bad.entries[1][1] + &BivariatePolynomial::constant(int(3));
    assert!(matches!(adjoint_reciprocity_with(&l, &bad), Err(SpectralError::Mismatch(_))));
}

#[test]
fn marked_points_of_all_ones_operator() {
    let l = ones(PeriodMatrix::diag(2, 2).unwrap());
    let p = spectral_points(&l).unwrap();
    assert_eq!(p.p_plus, vec![int(1), int(1)]);
    assert_eq!(multiplicities(&p.p_plus), vec![(int(1), 2)]);
    p.check_against(&spectral_poly(&l).unwrap()).unwrap();
}

#[test]
fn marked_points_are_roots_of_the_boundary_slices() {
    let mut r = rng(13);
    for t in more_lattices() {
        let l = random_discrete(&mut r, t);
        let p = spectral_points(&l).unwrap();
        let nf = t.normal_forms().unwrap();
        assert_eq!((p.p_plus.len(), p.q_minus.len()), (nf.delta as usize, nf.eps as usize));
        p.check_against(&spectral_poly(&l).unwrap()).unwrap();
    }
}

#[test]
fn integrable_operators_have_coinciding_points() {
    let mut r = rng(14);
    for t in more_lattices() {
        let l = integrable_discrete(&mut r, t);
        let p = spectral_points(&l).unwrap();
        for f in PointFamily::ALL {
            assert_eq!(multiplicities(p.family(f)).len(), 1, "{t:?} {}", f.name());
        }
    }
}

#[test]
fn zero_product_is_reported_by_points() {
    let t = PeriodMatrix::diag(2, 2).unwrap();
    let l = DiscreteOperator::from_fn(t, |n, _| [int(1), int(1), int(1), int(n)]).unwrap();
    assert!(matches!(spectral_points(&l), Err(SpectralError::Disc(DiscError::ZeroProduct(_)))));
}

/// Null vector of `M(ν, μ)` from the smallest singular value.
fn null_vector(m: &FloquetMatrix, nu: Complex64, mu: Complex64) -> Vec<Complex64> {
    let n = m.size();
    let a = DMatrix::from_fn(n, n, |i, j| m.entries[i][j].eval_complex(nu, mu));
    let svd = a.svd(false, true);
    let k = (0..n).min_by(|&x, &y| svd.singular_values[x].partial_cmp(&svd.singular_values[y]).unwrap()).unwrap();
    let v_t = svd.v_t.unwrap();
    (0..n).map(|j| v_t[(k, j)].conj()).collect()
}

#[test]
fn psi_ratios_match_the_null_vector() {
    let mut r = rng(15);
    for t in more_lattices() {
        let l = random_discrete(&mut r, t);
        let nf = *l.normal_forms();
        let nu = rat(2, 3);
        let m = build_m(&l);
        for mu in curve_points_at(&l, &nu).unwrap() {
            let nuc = Complex64::new(to_f64(&nu), 0.0);
            let x = null_vector(&m, nuc, mu);
            for k in 0..nf.size() {
                let (n, mm) = nf.site(k);
                let ratios = psi_ratios(&l, (n, mm), nuc, mu, 1e-8).unwrap();
                let psi = |a: i64, b: i64| {
                    let (col, al, be) = m.locate(a, b);
                    nuc.powi(al as i32) * mu.powi(be as i32) * x[col]
                };
                let scale = 1.0 + ratios.n_ratio.norm();
                assert!((ratios.n_ratio - psi(n + 1, mm) / psi(n, mm)).norm() < 1e-9 * scale, "{t:?}");
                let scale = 1.0 + ratios.m_ratio.norm();
                assert!((ratios.m_ratio - psi(n, mm + 1) / psi(n, mm)).norm() < 1e-9 * scale, "{t:?}");
            }
        }
    }
}

#[test]
fn reconstructed_psi_solves_the_equation() {
    let mut r = rng(16);
    for t in more_lattices() {
        let l = random_discrete(&mut r, t);
        let nu = rat(-3, 4);
        let nuc = Complex64::new(to_f64(&nu), 0.0);
        let m = build_m(&l);
        for mu in curve_points_at(&l, &nu).unwrap() {
            let psi = psi_on_domain(&l, nuc, mu, 1e-8).unwrap();
            let scale: f64 = psi.iter().map(|z| z.norm()).fold(0.0, f64::max);
            for row in 0..m.size() {
                let res: Complex64 = (0..m.size()).map(|c| m.entries[row][c].eval_complex(nuc, mu) * psi[c]).sum();
                assert!(res.norm() < 1e-9 * scale.max(1.0), "{t:?}: residual {res}");
            }
        }
    }
}

#[test]
fn off_curve_point_is_rejected() {
    let l = random_discrete(&mut rng(17), PeriodMatrix::diag(2, 2).unwrap());
    let err = psi_ratios(&l, (0, 0), Complex64::new(0.3, 0.1), Complex64::new(1.7, -0.2), DEFAULT_CURVE_TOL).unwrap_err();
    assert!(matches!(err, SpectralError::OffCurve { .. }));
}

#[test]
fn curve_points_count_is_the_mu_degree() {
    let l = random_discrete(&mut rng(18), PeriodMatrix::diag(3, 2).unwrap());
    assert_eq!(curve_points_at(&l, &rat(5, 3)).unwrap().len(), 3);
}

#[test]
fn transformations_permute_points_as_tabulated() {
    let mut r = rng(19);
    let lattices = more_lattices();
    let mut done = 0;
    while done < 20 {
        let t = lattices[done % lattices.len()];
        let l = random_discrete(&mut r, t);
        if laplace12_pp(&l).is_err() {
            continue;
        }
        let rep = laplace_spectral_invariance(&l).unwrap_or_else(|e| panic!("{t:?}: {e}"));
        assert_eq!(rep.actions.len(), 3);
        for a in &rep.actions {
            assert_eq!((a.curve.p, a.curve.q), (0, 0), "{t:?} {}", a.transform.name());
        }
        done += 1;
    }
}

#[test]
fn laplace_shifts_p_minus_on_diag_2_2() {
    let l = random_discrete(&mut rng(20), PeriodMatrix::diag(2, 2).unwrap());
    let a = transform_spectral_action(&l, Transform::Laplace).unwrap();
    let pm = a.families.iter().find(|f| f.family == PointFamily::PMinus).unwrap();
    assert_eq!(pm.fitting_shifts, vec![1]);
    let pp = a.families.iter().find(|f| f.family == PointFamily::PPlus).unwrap();
    assert_eq!(pp.fitting_shifts, vec![0]);
}

#[test]
fn second_shift_moves_only_p_points() {
    let l = random_discrete(&mut rng(21), PeriodMatrix::diag(2, 3).unwrap());
    let a = transform_spectral_action(&l, Transform::S2).unwrap();
    for f in &a.families {
        match f.family {
            PointFamily::PPlus | PointFamily::PMinus => assert_eq!(f.fitting_shifts, vec![2], "{:?}", f.family),
            _ => assert_eq!(f.fitting_shifts, vec![0]),
        }
    }
}

#[test]
fn integrable_points_are_literally_invariant() {
    let mut r = rng(22);
    let l = integrable_discrete(&mut r, PeriodMatrix::diag(3, 2).unwrap());
    let before = spectral_points(&l).unwrap();
    for t in [Transform::Laplace, Transform::S1, Transform::S2] {
        let after = spectral_points(&t.apply(&l).unwrap()).unwrap();
        assert_eq!(after, before, "{}", t.name());
    }
}
