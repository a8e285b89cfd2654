//! The `spectral`, `laplace` and `toda` drivers.

use std::fmt::Display;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use num_traits::Signed;
use serde::Serialize;

use crate::coeffring::{format_rational, to_f64, BivariatePolynomial, FitConfig, PeriodicFunction, QuasiPeriodic};
use crate::disc::{laplace_variant, DiscreteGaugeInvariants, DiscreteOperator, Order};
use crate::disc_spectral::{
    adjoint_reciprocity, consistency_r_rhat, laplace_spectral_invariance, spectral_points, spectral_poly,
    MonomialMatch, SpectralInvarianceReport,
};
use crate::floquet::{FiberReport, FloquetSystem};
use crate::semidisc::{laplace_first, laplace_second, periodic_canonical_form, GaugeInvariants, SemiDiscreteOperator};
use crate::toda::{discrete_toda_step, eqw_residual, reconstruct_g, toda_residual_2d1, SemiDiscreteField, TodaError};

use super::files::{
    complex_pair, fourier, rational_strings, read_json, write_json, DiscreteFile, Field, FieldFile, Fourier,
    OperatorFile, RunConfig, SemiDiscreteFile,
};
use super::{CliError, LaplaceArgs, SpectralArgs, TodaArgs, TransformType};

/// What a command did: report lines, written files and failed checks.
#[derive(Clone, Debug, Default)]
pub struct Summary {
    pub lines: Vec<String>,
    pub files: Vec<PathBuf>,
    pub failures: Vec<String>,
}

impl Summary {
    pub fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    /// Records a check; failures also become report lines.
    pub fn check(&mut self, name: impl Display, passed: bool, detail: impl Display) {
        let status = if passed { "PASS" } else { "FAIL" };
        self.lines.push(format!("{name}: {status} ({detail})"));
        if !passed {
            self.failures.push(format!("{name} ({detail})"));
        }
    }

    /// Writes the report to stdout; a closed pipe is not an error.
    pub fn print(&self) {
        let mut out = std::io::stdout().lock();
        let lines = self.lines.iter().cloned().chain(self.files.iter().map(|f| format!("wrote {}", f.display())));
        for l in lines {
            if writeln!(out, "{l}").is_err() {
                return;
            }
        }
    }

    fn json<T: Serialize>(&mut self, dir: &Path, name: &str, value: &T) -> Result<(), CliError> {
        let path = dir.join(name);
        write_json(&path, value)?;
        self.files.push(path);
        Ok(())
    }

    fn csv(&mut self, dir: &Path, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
        let path = dir.join(name);
        let io = |e: csv::Error| CliError::Io { path: path.clone(), source: std::io::Error::other(e) };
        let mut w = csv::Writer::from_path(&path).map_err(io)?;
        w.write_record(header).map_err(io)?;
        for row in rows {
            w.write_record(row).map_err(io)?;
        }
        w.flush().map_err(|source| CliError::Io { path: path.clone(), source })?;
        self.files.push(path);
        Ok(())
    }
}

fn output_dir(dir: &Path) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.into(), source })?;
    Ok(dir.to_path_buf())
}

/// Prefixes the message of `e` with the chain step at which it occurred.
fn at_step(step: usize, e: impl Into<CliError>) -> CliError {
    let ctx = |m: String| format!("step {step}: {m}");
    match e.into() {
        CliError::Usage(m) => CliError::Usage(ctx(m)),
        CliError::Invalid(m) => CliError::Invalid(ctx(m)),
        CliError::Degenerate(m) => CliError::Degenerate(ctx(m)),
        CliError::CheckFailed(m) => CliError::CheckFailed(ctx(m)),
        other => other,
    }
}

fn sci(x: f64) -> String {
    format!("{x:e}")
}

// ---------------------------------------------------------------- spectral

#[derive(Serialize)]
struct MatchJson {
    nu_power: i64,
    mu_power: i64,
    scalar: String,
}

impl From<&MonomialMatch> for MatchJson {
    fn from(m: &MonomialMatch) -> Self {
        MatchJson { nu_power: m.p, mu_power: m.q, scalar: format_rational(&m.scalar) }
    }
}

#[derive(Serialize)]
struct PointsJson {
    p_plus: Vec<String>,
    p_minus: Vec<String>,
    q_plus: Vec<String>,
    q_minus: Vec<String>,
}

#[derive(Serialize)]
struct DiscreteSpectralJson {
    genus: i64,
    /// `(i, j, coefficient)` of `ν₁^i μ₁^j` in `R = det M`.
    r: Vec<(i64, i64, String)>,
    /// Same for `R̂ = det M̂` in `(ν₂, μ₂)`.
    r_hat: Vec<(i64, i64, String)>,
    corner_signs: [i8; 4],
    points: PointsJson,
    /// `R̂` after substitution against `R`.
    second_box: MatchJson,
    /// `R⁺(ν, μ)` against `R(1/ν, 1/μ)`.
    adjoint: MatchJson,
}

fn sparse(p: &BivariatePolynomial) -> Vec<(i64, i64, String)> {
    p.terms().map(|(&(i, j), c)| (i, j, format_rational(c))).collect()
}

#[derive(Serialize)]
struct FiberJson {
    closed_form: Vec<[f64; 2]>,
    monodromy: Vec<[f64; 2]>,
    discrepancy: f64,
}

impl From<&FiberReport> for FiberJson {
    fn from(f: &FiberReport) -> Self {
        FiberJson {
            closed_form: f.closed_form.iter().map(|&z| complex_pair(z)).collect(),
            monodromy: f.monodromy.iter().map(|&z| complex_pair(z)).collect(),
            discrepancy: f.discrepancy,
        }
    }
}

#[derive(Serialize)]
struct FibersJson {
    zero: FiberJson,
    infinity: FiberJson,
}

pub fn cmd_spectral(args: &SpectralArgs) -> Result<Summary, CliError> {
    let cfg = args.common.run_config()?;
    let dir = output_dir(&args.common.output_dir)?;
    match read_json::<OperatorFile>(&args.input)? {
        OperatorFile::Discrete(f) => spectral_discrete(&f.to_operator()?, &dir),
        OperatorFile::SemiDiscrete(f) => spectral_semi(&f.to_operator()?, &cfg, &dir),
    }
}

fn spectral_discrete(l: &DiscreteOperator, dir: &Path) -> Result<Summary, CliError> {
    let mut s = Summary::default();
    let curve = spectral_poly(l)?;
    let points = spectral_points(l)?;
    points.check_against(&curve)?;
    let second_box = consistency_r_rhat(l)?;
    let adjoint = adjoint_reciprocity(l)?;
    let cs = curve.corner_signs;
    let report = DiscreteSpectralJson {
        genus: curve.genus,
        r: sparse(&curve.r),
        r_hat: sparse(&curve.r_hat),
        corner_signs: [cs.bottom, cs.top, cs.hat_bottom, cs.hat_top],
        points: PointsJson {
            p_plus: rational_strings(&points.p_plus),
            p_minus: rational_strings(&points.p_minus),
            q_plus: rational_strings(&points.q_plus),
            q_minus: rational_strings(&points.q_minus),
        },
        second_box: (&second_box).into(),
        adjoint: (&adjoint).into(),
    };
    s.line(format!("genus {}", curve.genus));
    s.line(format!("R has {} terms", curve.r.num_terms()));
    s.line(format!(
        "marked points: {} P±, {} Q±",
        points.p_plus.len(),
        points.q_plus.len()
    ));
    s.json(dir, "spectral.json", &report)?;
    Ok(s)
}

fn spectral_semi(l: &SemiDiscreteOperator, cfg: &RunConfig, dir: &Path) -> Result<Summary, CliError> {
    let mut s = Summary::default();
    let mut sys = FloquetSystem::from_operator(l, cfg.tol)?;
    sys.pole_guard = cfg.pole_guard;
    let one = Complex64::new(1.0, 0.0);
    let grid: Vec<Complex64> =
        cfg.rho_grid.points().into_iter().filter(|&rho| (rho - one).norm() >= cfg.pole_guard).collect();
    let samples = sys.spectral_sample(&grid, cfg.ode_tol);
    let mut rows = Vec::new();
    let mut failed = 0;
    for (rho, sample) in grid.iter().zip(&samples) {
        match sample {
            Ok(m) => {
                for mu in &m.eigenvalues {
                    rows.push(vec![rho.re, rho.im, mu.re, mu.im].into_iter().map(|x| x.to_string()).collect());
                }
            }
            Err(_) => failed += 1,
        }
    }
    if failed == grid.len() {
        return Err(CliError::Degenerate("floquet: no ρ sample could be integrated".into()));
    }
    s.line(format!("{} ρ samples, {} failed", grid.len(), failed));
    s.csv(dir, "curve.csv", &["rho_re", "rho_im", "mu_re", "mu_im"], &rows)?;
    let zero = sys.fiber_at_zero(cfg.ode_tol)?;
    let infinity = sys.fiber_at_infinity(cfg.ode_tol)?;
    s.check("fiber at ρ = 0", zero.discrepancy <= cfg.tol, format!("relative mismatch {:e}", zero.discrepancy));
    s.check("fiber at ρ = ∞", infinity.discrepancy <= cfg.tol, format!("relative mismatch {:e}", infinity.discrepancy));
    s.json(dir, "fibers.json", &FibersJson { zero: (&zero).into(), infinity: (&infinity).into() })?;
    Ok(s)
}

// ---------------------------------------------------------------- laplace

#[derive(Serialize)]
struct SemiInvariantsJson {
    step: usize,
    a: Vec<Fourier>,
    w: Vec<Fourier>,
    i: Fourier,
    z: Fourier,
}

#[derive(Serialize)]
struct DiscreteInvariantsJson {
    step: usize,
    w: Vec<String>,
    h: Vec<String>,
}

#[derive(Serialize)]
struct FamilyJson {
    family: &'static str,
    expected_shift: i64,
    fitting_shifts: Vec<i64>,
    holds: bool,
}

#[derive(Serialize)]
struct ActionJson {
    transform: &'static str,
    curve: MatchJson,
    families: Vec<FamilyJson>,
}

fn invariance_json(report: &SpectralInvarianceReport, l: &DiscreteOperator) -> Result<Vec<ActionJson>, CliError> {
    let points = spectral_points(l)?;
    Ok(report
        .actions
        .iter()
        .map(|a| ActionJson {
            transform: a.transform.name(),
            curve: (&a.curve).into(),
            families: a
                .families
                .iter()
                .map(|f| FamilyJson {
                    family: f.family.name(),
                    expected_shift: f.expected_shift,
                    fitting_shifts: f.fitting_shifts.clone(),
                    holds: f.holds(points.family(f.family).len()),
                })
                .collect(),
        })
        .collect())
}

pub fn cmd_laplace(args: &LaplaceArgs) -> Result<Summary, CliError> {
    let cfg = args.common.run_config()?;
    let dir = output_dir(&args.common.output_dir)?;
    let input = read_json::<OperatorFile>(&args.input)?;
    let mut s = Summary::default();
    if args.count == 0 {
        s.line(super::to_json(&input).trim_end().to_string());
    }
    match input {
        OperatorFile::SemiDiscrete(f) => laplace_semi(&f, args, &cfg, &dir, &mut s)?,
        OperatorFile::Discrete(f) => laplace_discrete(&f, args, &cfg, &dir, &mut s)?,
    }
    Ok(s)
}

fn semi_step(kind: TransformType, l: &SemiDiscreteOperator, fit: &FitConfig) -> Result<SemiDiscreteOperator, CliError> {
    Ok(match kind {
        TransformType::First => laplace_first(l, fit)?,
        TransformType::Second => laplace_second(l, fit)?,
    })
}

fn semi_invariants(l: &SemiDiscreteOperator, fit: &FitConfig) -> Result<GaugeInvariants, CliError> {
    Ok(periodic_canonical_form(l, fit)?.1)
}

fn laplace_semi(
    f: &SemiDiscreteFile,
    args: &LaplaceArgs,
    cfg: &RunConfig,
    dir: &Path,
    s: &mut Summary,
) -> Result<(), CliError> {
    let fit = cfg.fit();
    let mut ops = vec![f.to_operator()?];
    for step in 1..=args.count {
        let next = semi_step(args.kind, ops.last().expect("nonempty"), &fit).map_err(|e| at_step(step, e))?;
        ops.push(next);
    }
    let invariants = ops
        .iter()
        .enumerate()
        .map(|(step, l)| semi_invariants(l, &fit).map_err(|e| at_step(step, e)))
        .collect::<Result<Vec<_>, _>>()?;
    for (step, l) in ops.iter().enumerate() {
        s.json(dir, &format!("operator_{step}.json"), &OperatorFile::SemiDiscrete(SemiDiscreteFile::from_operator(l, f.metadata.clone())))?;
    }
    let trace: Vec<SemiInvariantsJson> = invariants
        .iter()
        .enumerate()
        .map(|(step, inv)| SemiInvariantsJson {
            step,
            a: inv.a.iter().map(fourier).collect(),
            w: inv.w.iter().map(fourier).collect(),
            i: fourier(&inv.i),
            z: fourier(&inv.z),
        })
        .collect();
    s.json(dir, "invariants.json", &trace)?;
    let layers: Vec<Vec<PeriodicFunction>> = invariants.iter().map(|inv| inv.w.clone()).collect();
    s.json(dir, "field.json", &FieldFile::semi_discrete(ops[0].period(), &layers))?;
    s.line(format!("applied {} Laplace transformation(s) of the {:?} type", args.count, args.kind).to_lowercase());
    if args.then_inverse {
        let inverse = match args.kind {
            TransformType::First => TransformType::Second,
            TransformType::Second => TransformType::First,
        };
        let mut back = ops.last().expect("nonempty").clone();
        for step in 1..=args.count {
            back = semi_step(inverse, &back, &fit).map_err(|e| at_step(args.count + step, e))?;
        }
        let d = semi_invariants(&back, &fit)?.distance_mod_shift(&invariants[0], cfg.grid);
        s.line(format!("gauge-equivalent: {}", d <= cfg.tol));
        s.check("round trip", d <= cfg.tol, format!("invariant distance {d:e}"));
    }
    Ok(())
}

/// Parses `pp12`, `mp21`, …: signs of the shifts in `n` and `m` and the order.
pub(crate) fn parse_variant(v: &str) -> Result<(i64, i64, Order), CliError> {
    let bad = || CliError::Usage(format!("variant must be one of {{pp,pm,mp,mm}}{{12,21}}, got {v:?}"));
    let sign = |c: u8| match c {
        b'p' => Ok(1),
        b'm' => Ok(-1),
        _ => Err(bad()),
    };
    let b = v.as_bytes();
    if b.len() != 4 {
        return Err(bad());
    }
    let (first, second) = (sign(b[0])?, sign(b[1])?);
    // the superscript lists the signs in the order of the shifts
    match &v[2..] {
        "12" => Ok((first, second, Order::First)),
        "21" => Ok((second, first, Order::Second)),
        _ => Err(bad()),
    }
}

fn laplace_discrete(
    f: &DiscreteFile,
    args: &LaplaceArgs,
    _cfg: &RunConfig,
    dir: &Path,
    s: &mut Summary,
) -> Result<(), CliError> {
    let (s1, s2, order) = parse_variant(&args.variant)?;
    let l0 = f.to_operator()?;
    let mut ops = vec![l0.clone()];
    for step in 1..=args.count {
        let next = laplace_variant(ops.last().expect("nonempty"), s1, s2, order).map_err(|e| at_step(step, e))?;
        ops.push(next);
    }
    for (step, l) in ops.iter().enumerate() {
        s.json(dir, &format!("operator_{step}.json"), &OperatorFile::Discrete(DiscreteFile::from_operator(l, f.metadata.clone())))?;
    }
    let invariants = ops
        .iter()
        .enumerate()
        .map(|(step, l)| DiscreteGaugeInvariants::of(l).map_err(|e| at_step(step, e)))
        .collect::<Result<Vec<_>, _>>()?;
    let trace: Vec<DiscreteInvariantsJson> = invariants
        .iter()
        .enumerate()
        .map(|(step, inv)| DiscreteInvariantsJson { step, w: rational_strings(&inv.w), h: rational_strings(&inv.h) })
        .collect();
    s.json(dir, "invariants.json", &trace)?;
    let layers: Vec<_> = invariants.iter().map(|inv| inv.w.clone()).collect();
    s.json(dir, "field.json", &FieldFile::discrete(l0.periods(), &layers))?;
    s.line(format!("applied {} transformation(s) {}", args.count, args.variant));
    match laplace_spectral_invariance(&l0) {
        Ok(report) => {
            s.json(dir, "spectral_invariance.json", &invariance_json(&report, &l0)?)?;
            s.check("spectral invariance", true, "curve preserved, points permuted as tabulated");
        }
        Err(e) => match CliError::from(e) {
            CliError::CheckFailed(m) => s.check("spectral invariance", false, m),
            other => return Err(other),
        },
    }
    if args.then_inverse {
        let inverse = match order {
            Order::First => Order::Second,
            Order::Second => Order::First,
        };
        let mut back = ops.last().expect("nonempty").clone();
        for step in 1..=args.count {
            back = laplace_variant(&back, s1, s2, inverse).map_err(|e| at_step(args.count + step, e))?;
        }
        let same = DiscreteGaugeInvariants::of(&back)? == invariants[0];
        s.line(format!("gauge-equivalent: {same}"));
        s.check("round trip", same, "exact comparison of (w, H)");
    }
    Ok(())
}

// ---------------------------------------------------------------- toda

pub fn cmd_toda(args: &TodaArgs) -> Result<Summary, CliError> {
    let cfg = args.common.run_config()?;
    let dir = output_dir(&args.common.output_dir)?;
    let file = read_json::<FieldFile>(&args.input)?;
    let mut s = Summary::default();
    match (file.to_field()?, &file) {
        (Field::Discrete(mut field), FieldFile::Discrete { periods, .. }) => {
            if field.layers.len() < 2 {
                return Err(CliError::Invalid("a discrete field needs at least two layers".into()));
            }
            let mut rows = Vec::new();
            let mut nonzero_total = 0;
            for k in 0..field.layers.len() - 2 {
                let predicted = discrete_toda_step(&field, k)?;
                let residual: Vec<_> = predicted.iter().zip(&field.layers[k + 2]).map(|(p, w)| w - p).collect();
                let nonzero = residual.iter().filter(|r| !num_traits::Zero::is_zero(*r)).count();
                let max = residual.iter().map(|r| to_f64(&r.abs())).fold(0.0, f64::max);
                nonzero_total += nonzero;
                rows.push(vec![k.to_string(), residual.len().to_string(), nonzero.to_string(), sci(max)]);
            }
            let given = field.layers.len();
            for _ in 0..args.steps {
                let k = field.layers.len() - 2;
                let next = discrete_toda_step(&field, k).map_err(|e| at_step(field.layers.len() + 1 - given, e))?;
                field.layers.push(next);
            }
            s.csv(&dir, "residuals.csv", &["k", "sites", "nonzero", "max_abs"], &rows)?;
            let periods = crate::disc::PeriodMatrix::new(periods[0][0], periods[0][1], periods[1][0], periods[1][1])?;
            s.json(&dir, "layers.json", &FieldFile::discrete(&periods, &field.layers))?;
            s.line(format!("{} input layers, {} computed", given, args.steps));
            s.check("discrete Toda lattice on input layers", nonzero_total == 0, format!("{nonzero_total} nonzero site residuals"));
        }
        (Field::SemiDiscrete(field), _) => toda_semi(&field, &cfg, &dir, &mut s)?,
        _ => unreachable!("field kind follows the file kind"),
    }
    Ok(s)
}

fn toda_semi(field: &SemiDiscreteField, cfg: &RunConfig, dir: &Path, s: &mut Summary) -> Result<(), CliError> {
    let fit = cfg.fit();
    let layers = field.layers();
    if layers < 3 {
        return Err(CliError::Invalid("a semi-discrete field needs at least three layers".into()));
    }
    field.check_nonvanishing(&fit)?;
    let mut rows = Vec::new();
    let mut max_eqw: f64 = 0.0;
    for k in 1..layers - 1 {
        for n in 0..field.n() {
            let r = eqw_residual(field, k as i64, n as i64, &fit)?.sup_norm(cfg.grid);
            max_eqw = max_eqw.max(r);
            rows.push(vec![k.to_string(), n.to_string(), sci(r)]);
        }
    }
    s.csv(dir, "eqw_residuals.csv", &["k", "n", "sup_residual"], &rows)?;
    s.check("compatibility lattice for w", max_eqw <= cfg.tol, format!("max residual {max_eqw:e}"));
    let g00 = QuasiPeriodic::from_periodic(PeriodicFunction::zero(field.period()));
    match reconstruct_g(field, &g00, &[], &fit, cfg.tol) {
        Ok(g) => {
            let mut rows = Vec::new();
            let mut max_toda: f64 = 0.0;
            for k in 1..layers.saturating_sub(2) {
                for n in 0..layers - 1 - k {
                    let r = toda_residual_2d1(&g, k as i64, n as i64, &fit)?.sup_norm(cfg.grid);
                    max_toda = max_toda.max(r);
                    rows.push(vec![k.to_string(), n.to_string(), sci(r)]);
                }
            }
            s.csv(dir, "toda_residuals.csv", &["k", "n", "sup_residual"], &rows)?;
            s.check("2D Toda lattice for g", max_toda <= cfg.tol, format!("max residual {max_toda:e}"));
        }
        Err(e @ TodaError::IncompatibleField { .. }) => s.check("reconstruction of g", false, e),
        Err(e) => return Err(e.into()),
    }
    Ok(())
}
