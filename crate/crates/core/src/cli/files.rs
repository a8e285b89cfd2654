//! JSON file formats: operators, `w`-fields and run configurations. Rationals are
//! written as `"p/q"` strings and complex Fourier coefficients as `[re, im]` pairs,
//! ordered `c_{-M}, …, c_M`.

use std::path::Path;

use num_complex::Complex64;
use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::coeffring::{format_rational, parse_rational, FitConfig, PeriodicFunction, Rational};
use crate::disc::{DiscreteOperator, PeriodMatrix};
use crate::floquet::FloquetSystem;
use crate::semidisc::SemiDiscreteOperator;
use crate::toda::{DiscreteField, SemiDiscreteField};

use super::CliError;

pub type Fourier = Vec<[f64; 2]>;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SemiDiscreteFile {
    pub period: f64,
    pub a: Vec<Fourier>,
    pub b: Vec<Fourier>,
    pub c: Vec<Fourier>,
    pub d: Vec<Fourier>,
    #[serde(default)]
    pub metadata: Metadata,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscreteFile {
    /// Rows `(P, R)` and `(S, T)` of the period lattice.
    pub periods: [[i64; 2]; 2],
    /// Values on the box sites `(i, j)`, `0 ≤ i < δ̃`, `0 ≤ j < δ`, at index `i + jδ̃`.
    pub a: Vec<String>,
    pub b: Vec<String>,
    pub c: Vec<String>,
    pub d: Vec<String>,
    #[serde(default)]
    pub metadata: Metadata,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum OperatorFile {
    SemiDiscrete(SemiDiscreteFile),
    Discrete(DiscreteFile),
}

/// Layers `w^k` of a Toda field, `layers[k][n]` (semi-discrete) or `layers[k][i + jδ̃]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FieldFile {
    SemiDiscrete { period: f64, layers: Vec<Vec<Fourier>> },
    Discrete { periods: [[i64; 2]; 2], layers: Vec<Vec<String>> },
}

/// Tolerances, grids and sizes shared by all commands.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Pass threshold for residual checks.
    pub tol: f64,
    pub fit_tol: f64,
    pub vanish_tol: f64,
    pub curve_tol: f64,
    pub pole_guard: f64,
    /// Fourier degree of re-fitted functions.
    pub max_degree: usize,
    /// Sample count for sup-norms.
    pub grid: usize,
    /// Number of layers in generated chains.
    pub chain_length: usize,
    /// Integration tolerance for monodromies.
    pub ode_tol: f64,
    pub rho_grid: RhoGrid,
}

/// Rectangular `steps × steps` grid of `ρ` values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RhoGrid {
    pub re: [f64; 2],
    pub im: [f64; 2],
    pub steps: usize,
}

impl Default for RhoGrid {
    fn default() -> Self {
        RhoGrid { re: [-2.0, 2.0], im: [-2.0, 2.0], steps: 9 }
    }
}

impl RhoGrid {
    pub fn points(&self) -> Vec<Complex64> {
        let at = |(lo, hi): (f64, f64), k: usize| {
            if self.steps <= 1 {
                lo
            } else {
                lo + (hi - lo) * k as f64 / (self.steps - 1) as f64
            }
        };
        (0..self.steps)
            .flat_map(|i| (0..self.steps).map(move |j| (i, j)))
            .map(|(i, j)| Complex64::new(at((self.re[0], self.re[1]), i), at((self.im[0], self.im[1]), j)))
            .collect()
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        let fit = FitConfig::default();
        RunConfig {
            tol: 1e-7,
            fit_tol: fit.fit_tol,
            vanish_tol: fit.vanish_tol,
            curve_tol: crate::disc_spectral::DEFAULT_CURVE_TOL,
            pole_guard: FloquetSystem::DEFAULT_POLE_GUARD,
            max_degree: 32,
            grid: 64,
            chain_length: 6,
            ode_tol: FloquetSystem::DEFAULT_TOL,
            rho_grid: RhoGrid::default(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        let tolerances = [
            ("tol", self.tol),
            ("fit_tol", self.fit_tol),
            ("vanish_tol", self.vanish_tol),
            ("curve_tol", self.curve_tol),
            ("pole_guard", self.pole_guard),
            ("ode_tol", self.ode_tol),
        ];
        for (name, v) in tolerances {
            if !(v.is_finite() && v > 0.0) {
                return Err(CliError::Usage(format!("{name} must be positive, got {v}")));
            }
        }
        if self.max_degree == 0 || self.grid == 0 || self.rho_grid.steps == 0 {
            return Err(CliError::Usage("max_degree, grid and rho_grid.steps must be positive".into()));
        }
        if self.chain_length < 2 {
            return Err(CliError::Usage("chain_length must be at least 2".into()));
        }
        Ok(())
    }

    pub fn fit(&self) -> FitConfig {
        FitConfig { max_degree: self.max_degree, vanish_tol: self.vanish_tol, fit_tol: self.fit_tol }
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse { path: path.into(), message: e.to_string() })
}

/// Pretty JSON with a trailing newline; the output of `parse ∘ serialize` is byte-identical.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io { path: path.into(), source })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    write_text(path, &to_json(value))
}

pub fn complex_pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

pub fn fourier(f: &PeriodicFunction) -> Fourier {
    f.coeffs().iter().map(|&z| complex_pair(z)).collect()
}

fn periodic(period: f64, coeffs: &Fourier, what: &str) -> Result<PeriodicFunction, CliError> {
    let coeffs = coeffs.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
    PeriodicFunction::new(period, coeffs).map_err(|e| CliError::Invalid(format!("{what}: {e}")))
}

fn rationals(values: &[String], what: &str) -> Result<Vec<Rational>, CliError> {
    values
        .iter()
        .enumerate()
        .map(|(k, s)| parse_rational(s).map_err(|e| CliError::Invalid(format!("{what}[{k}]: {e}"))))
        .collect()
}

pub fn rational_strings(values: &[Rational]) -> Vec<String> {
    values.iter().map(format_rational).collect()
}

fn period_matrix(p: &[[i64; 2]; 2]) -> Result<PeriodMatrix, CliError> {
    PeriodMatrix::new(p[0][0], p[0][1], p[1][0], p[1][1]).map_err(|e| CliError::Invalid(format!("periods: {e}")))
}

fn period_rows(p: &PeriodMatrix) -> [[i64; 2]; 2] {
    [[p.p, p.r], [p.s, p.t]]
}

impl SemiDiscreteFile {
    pub fn from_operator(l: &SemiDiscreteOperator, metadata: Metadata) -> Self {
        let list = |v: &[PeriodicFunction]| v.iter().map(fourier).collect();
        SemiDiscreteFile { period: l.period(), a: list(&l.a), b: list(&l.b), c: list(&l.c), d: list(&l.d), metadata }
    }

    pub fn to_operator(&self) -> Result<SemiDiscreteOperator, CliError> {
        let list = |v: &[Fourier], name: char| -> Result<Vec<PeriodicFunction>, CliError> {
            v.iter().enumerate().map(|(n, f)| periodic(self.period, f, &format!("{name}[{n}]"))).collect()
        };
        SemiDiscreteOperator::new(list(&self.a, 'a')?, list(&self.b, 'b')?, list(&self.c, 'c')?, list(&self.d, 'd')?)
            .map_err(|e| CliError::Invalid(e.to_string()))
    }
}

impl DiscreteFile {
    pub fn from_operator(l: &DiscreteOperator, metadata: Metadata) -> Self {
        let [a, b, c, d] = l.arrays().clone().map(|v| rational_strings(&v));
        DiscreteFile { periods: period_rows(l.periods()), a, b, c, d, metadata }
    }

    pub fn to_operator(&self) -> Result<DiscreteOperator, CliError> {
        let periods = period_matrix(&self.periods)?;
        DiscreteOperator::from_domain_arrays(
            periods,
            rationals(&self.a, "a")?,
            rationals(&self.b, "b")?,
            rationals(&self.c, "c")?,
            rationals(&self.d, "d")?,
        )
        .map_err(|e| CliError::Invalid(e.to_string()))
    }
}

/// A parsed field, ready for the Toda drivers.
pub enum Field {
    SemiDiscrete(SemiDiscreteField),
    Discrete(DiscreteField),
}

impl FieldFile {
    pub fn to_field(&self) -> Result<Field, CliError> {
        match self {
            FieldFile::SemiDiscrete { period, layers } => {
                let w = layers
                    .iter()
                    .enumerate()
                    .map(|(k, layer)| {
                        layer.iter().enumerate().map(|(n, f)| periodic(*period, f, &format!("w[{k}][{n}]"))).collect()
                    })
                    .collect::<Result<Vec<Vec<_>>, _>>()?;
                let field = SemiDiscreteField::new(w).map_err(|e| CliError::Invalid(e.to_string()))?;
                Ok(Field::SemiDiscrete(field))
            }
            FieldFile::Discrete { periods, layers } => {
                let nf = period_matrix(periods)?.normal_forms().map_err(|e| CliError::Invalid(e.to_string()))?;
                let layers = layers
                    .iter()
                    .enumerate()
                    .map(|(k, layer)| rationals(layer, &format!("w[{k}]")))
                    .collect::<Result<_, _>>()?;
                let field = DiscreteField::new(nf, layers).map_err(|e| CliError::Invalid(e.to_string()))?;
                Ok(Field::Discrete(field))
            }
        }
    }

    pub fn semi_discrete(period: f64, layers: &[Vec<PeriodicFunction>]) -> Self {
        FieldFile::SemiDiscrete { period, layers: layers.iter().map(|l| l.iter().map(fourier).collect()).collect() }
    }

    pub fn discrete(periods: &PeriodMatrix, layers: &[Vec<Rational>]) -> Self {
        FieldFile::Discrete { periods: period_rows(periods), layers: layers.iter().map(|l| rational_strings(l)).collect() }
    }
}
