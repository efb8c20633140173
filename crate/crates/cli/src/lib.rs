//! Report types and suite runners behind the `orex` binary.
//!
//! Every subcommand produces one [`AnalysisReport`]; sections that a
//! subcommand does not run stay `None`. The report lists each contract it
//! checked, and the process exit status is derived from that list.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use ore_core::derivation::{certify, formal_stability_constant, random_series, StabilityCertificate, StabilityConfig};
use ore_core::expr::parse_polynomial;
use ore_core::operators::jordan::{jordan_pair, trace_lower_bound, MatrixRep};
use ore_core::operators::volterra::{commutator_residual_tv, relative_variation, volterra_norms, VolterraNorm};
use ore_core::ore::MainRelationReport;
use ore_core::{intertwining_residual, mu, verify_main_relation, Error, Execution, FunctionModel, FunctionSpec, ZeroDatum};

pub const OUT_DIR_ENV: &str = "ORE_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "orex-out";

pub const MAIN_RELATION_TOL: f64 = 1e-12;
pub const INTERTWINING_TOL: f64 = 1e-10;
pub const INTERTWINING_TRIALS: usize = 100;
pub const INTERTWINING_DEGREE: usize = 10;
pub const JORDAN_TOL: f64 = 1e-10;
pub const STABILITY_RADII: [f64; 4] = [0.5, 1.0, 2.0, 4.0];
pub const STABILITY_SLACK: f64 = 1e-9;
pub const FORMAL_ORDER: usize = 16;
pub const VOLTERRA_BAND: (f64, f64) = (0.40, 0.60);
pub const VOLTERRA_BAND_FROM: usize = 20;
pub const VOLTERRA_FLAT_FROM: usize = 25;
pub const VOLTERRA_FLATNESS: f64 = 0.05;
pub const VOLTERRA_RESIDUAL_GRIDS: [usize; 3] = [200, 400, 800];

const TRIVIAL_DIAGNOSTIC: &str = "h has no zeros: the universal algebra is trivial and admits no nontrivial realization";

/// Echo of the settings a report was produced with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Config {
    pub order: usize,
    pub x_degree: usize,
    pub seed: u64,
    pub trials: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub grid: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub nmax: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lambda: Option<Complex64>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            order: 64,
            x_degree: 4,
            seed: 0,
            trials: 200,
            tol: None,
            grid: None,
            nmax: None,
            dim: None,
            lambda: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub limit: f64,
}

impl Check {
    /// Passes when `value <= limit`.
    pub fn at_most(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Check {
            name: name.into(),
            passed: value <= limit,
            value,
            limit,
        }
    }

    pub fn flag(name: impl Into<String>, passed: bool) -> Self {
        Check {
            name: name.into(),
            passed,
            value: if passed { 1.0 } else { 0.0 },
            limit: 1.0,
        }
    }
}

/// Formal-family bound of `δ₀` at a zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormalBound {
    pub zero: ZeroDatum,
    pub m: usize,
    pub constant: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilitySection {
    pub certificates: Vec<StabilityCertificate>,
    pub formal: Vec<FormalBound>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntertwiningSummary {
    pub trials: usize,
    pub degree: usize,
    /// Residual relative to `max |μ(f)| · max |μ(h)|`.
    pub max_relative_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolterraSection {
    pub grid: usize,
    pub nmax: usize,
    pub rows: Vec<VolterraNorm>,
    /// `(grid, ‖TV − VT − V²‖)`
    pub commutator_residuals: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JordanEntry {
    pub lambda: Complex64,
    pub dim: usize,
    /// `|h(λ)|`; a pair exists only when it vanishes.
    pub h_at_lambda: f64,
    pub feasible: bool,
    pub residual: f64,
    pub trace_obstruction: bool,
    pub trace_lower_bound: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub representation: Option<MatrixRep>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: Config,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub function: Option<FunctionSpec>,
    pub zeros: Vec<ZeroDatum>,
    pub trivial: bool,
    pub diagnostics: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub stability: Option<StabilitySection>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub main_relation: Option<MainRelationReport>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub intertwining: Option<IntertwiningSummary>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub volterra: Option<VolterraSection>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub jordan: Option<Vec<JordanEntry>>,
    pub checks: Vec<Check>,
}

impl AnalysisReport {
    pub fn new(command: &str, config: Config) -> Self {
        AnalysisReport {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            config,
            function: None,
            zeros: Vec::new(),
            trivial: false,
            diagnostics: Vec::new(),
            stability: None,
            main_relation: None,
            intertwining: None,
            volterra: None,
            jordan: None,
            checks: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        Ok(text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Resolves `h` and its zeros. An undecidable zero order is recorded as a
    /// warning and a failed check instead of aborting the run.
    pub fn load_function(&mut self, spec: FunctionSpec) -> Result<FunctionModel> {
        let model = spec.model()?;
        match spec.zeros(&model) {
            Ok(zeros) => self.zeros = zeros,
            Err(e @ Error::OrderUndecidable { .. }) => {
                self.diagnostics.push(format!("warning: {e}"));
                self.checks.push(Check::flag("zero orders decidable", false));
            }
            Err(e) => return Err(e.into()),
        }
        self.trivial = self.zeros.is_empty() && self.checks.is_empty();
        if self.trivial {
            self.diagnostics.push(TRIVIAL_DIAGNOSTIC.to_string());
        }
        self.function = Some(spec);
        Ok(model)
    }
}

/// Reads a spec from `--h` (an expression, or inline JSON) or `--spec` (a JSON file).
pub fn resolve_spec(h: Option<&str>, spec: Option<&Path>) -> Result<FunctionSpec> {
    match (h, spec) {
        (Some(text), None) if text.trim_start().starts_with('{') => Ok(FunctionSpec::from_json(text)?),
        (Some(text), None) => FunctionSpec::from_expression(text).with_context(|| format!("parsing --h {text:?}")),
        (None, Some(path)) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            FunctionSpec::from_json(&text).with_context(|| format!("parsing {}", path.display()))
        }
        _ => bail!("exactly one of --h or --spec is required"),
    }
}

/// Parses a complex constant such as `0`, `-1.5` or `3.14159i`.
pub fn parse_complex(text: &str) -> Result<Complex64> {
    let coeffs = parse_polynomial(text)?;
    if coeffs.len() != 1 {
        bail!("{text:?} is not a constant");
    }
    Ok(coeffs[0])
}

/// Power-family certificates at zeros of order `k >= 2` (for `s = 1/(k−1)`
/// and `s = 1`) and formal-family bounds at every zero.
pub fn run_stability(report: &mut AnalysisReport, h: &FunctionModel, exec: Execution) -> Result<()> {
    let cfg = StabilityConfig {
        degree: report.config.order,
        trials: report.config.trials,
        seed: report.config.seed,
        exec,
        ..StabilityConfig::default()
    };
    let mut section = StabilitySection {
        certificates: Vec::new(),
        formal: Vec::new(),
    };
    for zero in &report.zeros {
        section.formal.push(FormalBound {
            zero: *zero,
            m: FORMAL_ORDER,
            constant: formal_stability_constant(h, zero, FORMAL_ORDER)?,
        });
        if zero.order < 2 {
            continue;
        }
        let critical = 1.0 / (zero.order - 1) as f64;
        let mut exponents = vec![critical];
        if critical < 1.0 {
            exponents.push(1.0);
        }
        for s in exponents {
            for r in STABILITY_RADII {
                section.certificates.push(certify(h, zero, r, s, &cfg)?);
            }
        }
    }
    let worst = section
        .certificates
        .iter()
        .map(|c| c.c_empirical / c.c_analytic)
        .fold(0.0, f64::max);
    if !section.certificates.is_empty() {
        report.checks.push(Check::at_most(
            "stability: C_empirical / C_analytic",
            worst,
            1.0 + STABILITY_SLACK,
        ));
    }
    report.stability = Some(section);
    Ok(())
}

/// `[x, y·xᵈ] = μ(h)·xᵈ` in the truncated algebra, and `μ∘δ₀ = δ∘μ` on
/// seeded random polynomials.
pub fn run_ore_check(report: &mut AnalysisReport, h: &FunctionModel) -> Result<()> {
    if report.zeros.is_empty() {
        return Ok(());
    }
    let order = report.config.order;
    let main = verify_main_relation(h, &report.zeros, order, report.config.x_degree)?;
    let tol = report.config.tol.unwrap_or(MAIN_RELATION_TOL);
    report
        .checks
        .push(Check::at_most("main relation: max deviation", main.deviation, tol));
    report.main_relation = Some(main);

    // Taylor data at zeros far from the origin is large, so residuals are
    // measured relative to max |μ(f)| · max |μ(h)|
    let h_scale = mu(h, &report.zeros, order)?.max_abs().max(1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(report.config.seed);
    let mut worst: f64 = 0.0;
    for _ in 0..INTERTWINING_TRIALS {
        let f = random_series(&mut rng, Complex64::new(0.0, 0.0), INTERTWINING_DEGREE);
        let model = FunctionModel::polynomial(f.into_coeffs());
        let scale = (mu(&model, &report.zeros, order)?.max_abs() * h_scale).max(1.0);
        worst = worst.max(intertwining_residual(h, &report.zeros, &model, order)? / scale);
    }
    report
        .checks
        .push(Check::at_most("intertwining: max relative residual", worst, INTERTWINING_TOL));
    report.intertwining = Some(IntertwiningSummary {
        trials: INTERTWINING_TRIALS,
        degree: INTERTWINING_DEGREE,
        max_relative_residual: worst,
    });
    Ok(())
}

/// `n!‖Vⁿ‖` for `n = 1..nmax` and the `[T, V] = V²` residual on refining grids.
pub fn run_volterra(report: &mut AnalysisReport, grid: usize, nmax: usize, exec: Execution) -> Result<()> {
    let rows = volterra_norms(grid, nmax, exec)?;
    let tail = |from: usize| -> Vec<f64> {
        rows.iter()
            .filter(|r| r.n >= from)
            .map(|r| r.n_factorial_scaled)
            .collect()
    };
    let band = tail(VOLTERRA_BAND_FROM);
    if !band.is_empty() {
        let outside = band
            .iter()
            .map(|v| (VOLTERRA_BAND.0 - v).max(v - VOLTERRA_BAND.1).max(0.0))
            .fold(0.0, f64::max);
        report.checks.push(Check::at_most(
            format!("volterra: n!|V^n| outside [{}, {}] for n >= {VOLTERRA_BAND_FROM}", VOLTERRA_BAND.0, VOLTERRA_BAND.1),
            outside,
            0.0,
        ));
    }
    let flat = tail(VOLTERRA_FLAT_FROM);
    if flat.len() >= 2 {
        report.checks.push(Check::at_most(
            format!("volterra: relative variation for n >= {VOLTERRA_FLAT_FROM}"),
            relative_variation(&flat),
            VOLTERRA_FLATNESS,
        ));
    }
    let residuals = VOLTERRA_RESIDUAL_GRIDS
        .iter()
        .map(|&g| Ok((g, commutator_residual_tv(g)?)))
        .collect::<Result<Vec<_>>>()?;
    report.checks.push(Check::flag(
        "volterra: [T,V] - V^2 residual decreases under refinement",
        residuals.windows(2).all(|w| w[1].1 < w[0].1),
    ));
    report.volterra = Some(VolterraSection {
        grid,
        nmax,
        rows,
        commutator_residuals: residuals,
    });
    Ok(())
}

/// Jordan-block pairs at `lambda` (or at every zero). Where `h(λ) = 0` a pair
/// must exist; elsewhere the trace obstruction must be reported.
pub fn run_jordan(report: &mut AnalysisReport, h: &FunctionModel, lambda: Option<Complex64>, dim: usize) -> Result<()> {
    let points: Vec<Complex64> = match lambda {
        Some(l) => vec![l],
        None if report.zeros.is_empty() => vec![Complex64::new(0.0, 0.0)],
        None => report.zeros.iter().map(|z| z.lambda).collect(),
    };
    let tol = report.config.tol.unwrap_or(JORDAN_TOL);
    let mut entries = Vec::new();
    for lambda in points {
        let h_at = h.eval(lambda)?.norm();
        let is_zero = h_at <= ore_core::function::ZERO_TOL;
        let bound = trace_lower_bound(h, lambda, dim)?;
        let entry = match jordan_pair(h, lambda, dim) {
            Ok(rep) => JordanEntry {
                lambda,
                dim,
                h_at_lambda: h_at,
                feasible: true,
                residual: rep.residual,
                trace_obstruction: false,
                trace_lower_bound: bound,
                representation: Some(rep),
            },
            Err(Error::Infeasible {
                residual,
                trace_obstruction,
                ..
            }) => JordanEntry {
                lambda,
                dim,
                h_at_lambda: h_at,
                feasible: false,
                residual,
                trace_obstruction,
                trace_lower_bound: bound,
                representation: None,
            },
            Err(e) => return Err(e.into()),
        };
        let label = format!("jordan: lambda = {lambda}, dim = {dim}");
        if is_zero {
            report
                .checks
                .push(Check::at_most(format!("{label}: residual"), entry.residual, tol));
        } else {
            report.checks.push(Check::flag(
                format!("{label}: trace obstruction reported"),
                !entry.feasible && entry.trace_obstruction,
            ));
        }
        entries.push(entry);
    }
    report.jordan = Some(entries);
    Ok(())
}

/// Writes `volterra.csv` with columns `n, norm, n_factorial_scaled`.
pub fn write_volterra_csv(path: &Path, rows: &[VolterraNorm]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}

/// Writes `<dir>/<name>.json` (and the Volterra table, if any). Returns the paths written.
pub fn write_outputs(dir: &Path, name: &str, report: &AnalysisReport) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let json = dir.join(format!("{name}.json"));
    fs::write(&json, report.to_json()?).with_context(|| format!("writing {}", json.display()))?;
    let mut written = vec![json];
    if let Some(v) = &report.volterra {
        let csv = dir.join("volterra.csv");
        write_volterra_csv(&csv, &v.rows)?;
        written.push(csv);
    }
    Ok(written)
}
