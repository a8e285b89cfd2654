//! Randomized verification suites, one per constructive identity.

use std::f64::consts::TAU;

use clap::ValueEnum;
use num_complex::Complex64;
use num_traits::{One, Signed};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::coeffring::{to_f64, PeriodicFunction, QuasiPeriodic, Rational};
use crate::disc::{
    is_integrable, laplace12_pp, laplace_variant, shift1, DiscreteGaugeInvariants, DiscreteOperator, Order,
    PeriodMatrix,
};
use crate::disc_spectral::{
    adjoint_reciprocity, build_m, consistency_r_rhat, curve_points_at, laplace_spectral_invariance, multiplicities,
    psi_on_domain, spectral_points, spectral_poly, PointFamily,
};
use crate::floquet::FloquetSystem;
use crate::gen::{integrable_discrete, random_discrete, random_invariants, random_near, random_semidiscrete};
use crate::semidisc::{
    build_chain, canonical_form, decompose_first, decompose_second, laplace_first, laplace_second, GaugeInvariants,
    SemiDiscreteOperator,
};
use crate::toda::{discrete_toda_step, eqw_residual, reconstruct_g, toda_residual_2d1, DiscreteField, SemiDiscreteField};

use super::commands::Summary;
use super::{CliError, RunConfig, VerifyArgs};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    /// Decompositions of semi-discrete operators recompose them.
    #[value(alias = "lemma1")]
    Decompose,
    /// Laplace transformations of the first and second type are mutually inverse.
    #[value(alias = "lemma4")]
    Inverse,
    /// Chains of invariants satisfy the compatibility lattice for `w`.
    Compatibility,
    /// `g` reconstructed from a chain satisfies the semi-discrete 2D Toda lattice.
    #[value(alias = "theorem1")]
    Toda,
    /// Monodromy eigenvalues at `ρ = 0` and `ρ = ∞` match their closed forms.
    Fibers,
    /// Adjoint monodromy identity and multiplier reciprocity.
    Adjoint,
    /// Signed discrete transformations agree with `Λ⁺⁺` up to shifts.
    #[value(alias = "lemma10")]
    Shifts,
    /// Exact structure of the discrete spectral curve.
    #[value(alias = "lemma13")]
    Curve,
    /// Curve invariance and permutation of marked points.
    #[value(alias = "theorem8")]
    Invariance,
    /// Layers of discrete Laplace chains satisfy the completely discretized lattice.
    DiscreteToda,
    /// Floquet solutions rebuilt from the curve solve `Lψ = 0`.
    Psi,
    /// Integrable operators have coincident marked points, random ones do not.
    Integrable,
    All,
}

/// One verified property.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), passed, detail: detail.into() }
    }

    /// Maximum of `values` against a threshold.
    fn max_below(name: impl Into<String>, values: impl IntoIterator<Item = f64>, limit: f64) -> Self {
        let max = values.into_iter().fold(0.0, f64::max);
        Check::new(name, max < limit, format!("max {max:e} < {limit:e}"))
    }

    fn count(name: impl Into<String>, failures: usize, total: usize) -> Self {
        Check::new(name, failures == 0, format!("{} of {total} cases hold", total - failures))
    }

    fn error(name: impl Into<String>, e: impl std::fmt::Display) -> Self {
        Check::new(name, false, e.to_string())
    }
}

const SUITES: [Suite; 12] = [
    Suite::Decompose,
    Suite::Inverse,
    Suite::Compatibility,
    Suite::Toda,
    Suite::Fibers,
    Suite::Adjoint,
    Suite::Shifts,
    Suite::Curve,
    Suite::Invariance,
    Suite::DiscreteToda,
    Suite::Psi,
    Suite::Integrable,
];

const LATTICES: [(i64, i64, i64, i64); 3] = [(2, 0, 0, 2), (2, 0, 1, 2), (3, 0, 0, 2)];

fn lattice(k: usize) -> PeriodMatrix {
    let (p, r, s, t) = LATTICES[k % LATTICES.len()];
    PeriodMatrix::new(p, r, s, t).expect("valid lattice")
}

fn suite_rng(seed: u64, suite: Suite) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(suite as u64);
    rng
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<Summary, CliError> {
    let cfg = args.common.run_config()?;
    let name = args.suite.as_deref().or(args.suite_flag.as_deref()).unwrap_or("all");
    let suite = Suite::from_str(name, true).map_err(|_| {
        let names: Vec<String> =
            Suite::value_variants().iter().filter_map(|s| s.to_possible_value()).map(|v| v.get_name().to_string()).collect();
        CliError::Usage(format!("unknown suite {name:?}; available: {}", names.join(", ")))
    })?;
    let suites: Vec<Suite> = if suite == Suite::All { SUITES.to_vec() } else { vec![suite] };
    let mut summary = Summary::default();
    for s in suites {
        let label = s.to_possible_value().expect("named").get_name().to_string();
        for check in run_suite(s, args.seed, args.count.max(1), &cfg) {
            summary.check(format!("{label} / {}", check.name), check.passed, check.detail);
        }
    }
    summary.line(format!("seed {}, {} failed check(s)", args.seed, summary.failures.len()));
    Ok(summary)
}

/// Runs one suite with `count` random cases per check.
pub fn run_suite(suite: Suite, seed: u64, count: usize, cfg: &RunConfig) -> Vec<Check> {
    let mut rng = suite_rng(seed, suite);
    let fit = cfg.fit();
    let grid = cfg.grid;
    match suite {
        Suite::All => SUITES.iter().flat_map(|&s| run_suite(s, seed, count, cfg)).collect(),
        Suite::Decompose => {
            let mut first = Vec::new();
            let mut second = Vec::new();
            for k in 0..count {
                let l = random_semidiscrete(&mut rng, 1 + k % 4, 1.0, 3, 0.15);
                match (decompose_first(&l, &fit), decompose_second(&l, &fit)) {
                    (Ok(d1), Ok(d2)) => {
                        first.push(d1.recompose().distance(&l, grid));
                        second.push(d2.recompose().distance(&l, grid));
                    }
                    (Err(e), _) | (_, Err(e)) => return vec![Check::error("decomposition", e)],
                }
            }
            vec![
                Check::max_below("first decomposition round trip", first, 1e-9),
                Check::max_below("second decomposition round trip", second, 1e-9),
            ]
        }
        Suite::Inverse => {
            let canonical = |l: &SemiDiscreteOperator| -> Result<GaugeInvariants, CliError> {
                let (canon, _) = canonical_form(l, &fit)?;
                let dec = decompose_first(&canon, &fit)?;
                Ok(GaugeInvariants::with_unit_z(dec.a, dec.w))
            };
            let mut forward = Vec::new();
            let mut backward = Vec::new();
            for k in 0..count {
                let l = random_semidiscrete(&mut rng, 1 + k % 3, 1.0, 2, 0.1);
                let run = || -> Result<(f64, f64), CliError> {
                    let inv = canonical(&l)?;
                    let fb = laplace_second(&laplace_first(&l, &fit)?, &fit)?;
                    let bf = laplace_first(&laplace_second(&l, &fit)?, &fit)?;
                    Ok((canonical(&fb)?.distance_mod_shift(&inv, grid), canonical(&bf)?.distance_mod_shift(&inv, grid)))
                };
                match run() {
                    Ok((a, b)) => {
                        forward.push(a);
                        backward.push(b);
                    }
                    Err(e) => return vec![Check::error("inverse", e)],
                }
            }
            vec![
                Check::max_below("second ∘ first is gauge-trivial", forward, 1e-8),
                Check::max_below("first ∘ second is gauge-trivial", backward, 1e-8),
            ]
        }
        Suite::Compatibility => {
            let mut residuals = Vec::new();
            for k in 0..count {
                let n = 1 + k % 3;
                let inv0 = random_invariants(&mut rng, n, TAU, 1, 0.02);
                let field = build_chain(&inv0, 4, &fit)
                    .map_err(CliError::from)
                    .and_then(|chain| Ok(SemiDiscreteField::from_chain(&chain)?));
                let field = match field {
                    Ok(f) => f,
                    Err(e) => return vec![Check::error("chain", e)],
                };
                for kk in 1..3 {
                    for m in 0..n as i64 {
                        match eqw_residual(&field, kk, m, &fit) {
                            Ok(r) => residuals.push(r.sup_norm(grid)),
                            Err(e) => return vec![Check::error("residual", e)],
                        }
                    }
                }
            }
            vec![Check::max_below("chain layers solve the compatibility lattice", residuals, 1e-7)]
        }
        Suite::Toda => {
            const K: usize = 6;
            let mut residuals = Vec::new();
            for k in 0..count {
                let inv0 = random_invariants(&mut rng, 2 + k % 2, TAU, 1, 0.02);
                let run = || -> Result<Vec<f64>, CliError> {
                    let field = SemiDiscreteField::from_chain(&build_chain(&inv0, K, &fit)?)?;
                    let g00 = QuasiPeriodic::from_periodic(PeriodicFunction::zero(TAU));
                    let g = reconstruct_g(&field, &g00, &[], &fit, 1e-7)?;
                    let mut out = Vec::new();
                    for kk in 1..=K as i64 - 3 {
                        for n in 0..K as i64 - 1 - kk {
                            out.push(toda_residual_2d1(&g, kk, n, &fit)?.sup_norm(grid));
                        }
                    }
                    Ok(out)
                };
                match run() {
                    Ok(r) => residuals.extend(r),
                    Err(e) => return vec![Check::error("reconstruction", e)],
                }
            }
            vec![Check::max_below("reconstructed g solves the 2D Toda lattice", residuals, 1e-6)]
        }
        Suite::Fibers => {
            let mut zero = Vec::new();
            let mut inf = Vec::new();
            for k in 0..count {
                let sys = random_floquet(&mut rng, 1 + k % 4);
                match (sys.fiber_at_zero(cfg.ode_tol), sys.fiber_at_infinity(cfg.ode_tol)) {
                    (Ok(a), Ok(b)) => {
                        zero.push(a.discrepancy);
                        inf.push(b.discrepancy);
                    }
                    (Err(e), _) | (_, Err(e)) => return vec![Check::error("fibers", e)],
                }
            }
            vec![
                Check::max_below("fiber at ρ = 0 (relative)", zero, 1e-8),
                Check::max_below("fiber at ρ = ∞ (relative)", inf, 1e-8),
            ]
        }
        Suite::Adjoint => {
            let mut residual = Vec::new();
            let mut reciprocity = Vec::new();
            for k in 0..count {
                let sys = random_floquet(&mut rng, 1 + k % 4);
                let rho = Complex64::new(2.0 + k as f64 * 0.37, -0.5 + 0.2 * k as f64);
                match sys.adjoint_check(rho, cfg.ode_tol) {
                    Ok(r) => {
                        residual.push(r.residual);
                        reciprocity.push(r.reciprocity);
                    }
                    Err(e) => return vec![Check::error("adjoint", e)],
                }
            }
            vec![
                Check::max_below("B⁻¹(Φ⁺)ᵀBΦ = I", residual, 1e-7),
                Check::max_below("multiplier reciprocity", reciprocity, 1e-8),
            ]
        }
        Suite::Shifts => {
            let inv = |l: &DiscreteOperator| DiscreteGaugeInvariants::of(l).ok();
            let mut failures = [0usize; 3];
            let mut done = 0;
            let mut attempts = 0;
            while done < count && attempts < 20 * count {
                attempts += 1;
                let l = random_discrete(&mut rng, lattice(done));
                let (Ok(pp), Ok(mp), Ok(pm), Ok(mm)) = (
                    laplace12_pp(&l),
                    laplace_variant(&l, -1, 1, Order::First),
                    laplace_variant(&l, 1, -1, Order::First),
                    laplace_variant(&l, -1, -1, Order::First),
                ) else {
                    continue;
                };
                let base = inv(&pp);
                failures[0] += usize::from(base != inv(&shift1(&mp)));
                failures[1] += usize::from(base != inv(&pm.shift(0, -1)));
                failures[2] += usize::from(base != inv(&mm.shift(1, -1)));
                done += 1;
            }
            vec![
                Check::count("Λ⁺⁺ = S₁Λ⁻⁺", failures[0], done),
                Check::count("Λ⁺⁺ = S₂⁻¹Λ⁺⁻", failures[1], done),
                Check::count("Λ⁺⁺ = S₁S₂⁻¹Λ⁻⁻", failures[2], done),
            ]
        }
        Suite::Curve => {
            let mut checks = Vec::new();
            let mut failures = [0usize; 3];
            for k in 0..count {
                let l = random_discrete(&mut rng, lattice(k));
                failures[0] += usize::from(spectral_poly(&l).is_err());
                failures[1] += usize::from(!matches!(consistency_r_rhat(&l), Ok(m) if m.scalar.abs().is_one()));
                failures[2] += usize::from(!matches!(adjoint_reciprocity(&l), Ok(m) if (m.p, m.q) == (0, 0)));
            }
            checks.push(Check::count("support, genus and boundary factorizations", failures[0], count));
            checks.push(Check::count("R and R̂ agree under the multiplier relations", failures[1], count));
            checks.push(Check::count("adjoint curve is R(1/ν, 1/μ)", failures[2], count));
            checks
        }
        Suite::Invariance => {
            let mut failures = 0;
            let mut details = Vec::new();
            for k in 0..count {
                let l = random_discrete(&mut rng, lattice(k));
                if let Err(e) = laplace_spectral_invariance(&l) {
                    failures += 1;
                    details.push(e.to_string());
                }
            }
            let mut c = Check::count("curve invariant, points permuted as tabulated", failures, count);
            if let Some(d) = details.first() {
                c.detail = format!("{}; first failure: {d}", c.detail);
            }
            vec![c]
        }
        Suite::DiscreteToda => {
            let mut failures = 0;
            let mut done = 0;
            let mut attempts = 0;
            while done < count && attempts < 20 * count {
                attempts += 1;
                let l = random_discrete(&mut rng, lattice(done));
                let chain = (|| {
                    let l1 = laplace12_pp(&l).ok()?;
                    let l2 = laplace12_pp(&l1).ok()?;
                    [&l, &l1, &l2].iter().map(|x| DiscreteGaugeInvariants::of(x).ok()).collect::<Option<Vec<_>>>()
                })();
                let Some(chain) = chain else { continue };
                let field = DiscreteField::from_chain(&chain).expect("consistent layers");
                failures += usize::from(discrete_toda_step(&field, 0).ok().as_ref() != Some(&field.layers[2]));
                done += 1;
            }
            vec![Check::count("third layer of Laplace chains", failures, done)]
        }
        Suite::Psi => {
            let mut residuals = Vec::new();
            for k in 0..count {
                let l = random_discrete(&mut rng, lattice(k));
                let nu = Rational::new((-3 - k as i64).into(), 4.into());
                let nuc = Complex64::new(to_f64(&nu), 0.0);
                let m = build_m(&l);
                let points = match curve_points_at(&l, &nu) {
                    Ok(p) => p,
                    Err(e) => return vec![Check::error("curve points", e)],
                };
                for mu in points.into_iter().take(3) {
                    let psi = match psi_on_domain(&l, nuc, mu, cfg.curve_tol.max(1e-8)) {
                        Ok(p) => p,
                        Err(e) => return vec![Check::error("ψ", e)],
                    };
                    let scale = psi.iter().map(|z| z.norm()).fold(1.0, f64::max);
                    for row in 0..m.size() {
                        let res: Complex64 =
                            (0..m.size()).map(|c| m.entries[row][c].eval_complex(nuc, mu) * psi[c]).sum();
                        residuals.push(res.norm() / scale);
                    }
                }
            }
            vec![Check::max_below("Lψ = 0 on the fundamental domain (relative)", residuals, 1e-9)]
        }
        Suite::Integrable => {
            let mut integrable_failures = 0;
            let mut generic_failures = 0;
            for k in 0..count {
                let l = integrable_discrete(&mut rng, lattice(k));
                let collapsed = spectral_points(&l)
                    .map(|p| PointFamily::ALL.iter().all(|&f| multiplicities(p.family(f)).len() == 1))
                    .unwrap_or(false);
                let predicate = is_integrable(&l).map(|r| r.integrable).unwrap_or(false);
                integrable_failures += usize::from(!(collapsed && predicate));
                let l = random_discrete(&mut rng, lattice(k));
                let split = spectral_points(&l)
                    .map(|p| PointFamily::ALL.iter().any(|&f| multiplicities(p.family(f)).len() > 1))
                    .unwrap_or(false);
                generic_failures += usize::from(!split);
            }
            vec![
                Check::count("integrable operators have coincident families", integrable_failures, count),
                Check::count("random operators have a split family", generic_failures, count),
            ]
        }
    }
}

fn random_floquet(rng: &mut ChaCha8Rng, n: usize) -> FloquetSystem {
    let a = (0..n).map(|_| random_near(rng, 1.0, 2, 0.2, 1.0, 0.3)).collect();
    let c = (0..n).map(|_| random_near(rng, 1.0, 2, 0.2, 1.0, 0.3)).collect();
    FloquetSystem::new(a, c).expect("consistent coefficients")
}

