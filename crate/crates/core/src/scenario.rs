//! Scenario configuration and the runners behind `simulate`, `verify`, `sweep`
//! and `sample`.

use std::io::Write;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{analytic_oscillator_report, analytic_scenario_report, validity_radicand, AnalyticReport};
use crate::error::{Error, Result};
use crate::estimators::{check_uncertainty_relations, parameter_set, UncertaintyReport};
use crate::grid::{Grid, Quadrature, UnitSystem};
use crate::indicators::{entropy_deltas, entropy_pair, epsilon, error_indicators};
use crate::report::MeasurementReport;
use crate::sampling::{empirical_parameters, sample_positions, EmpiricalParameters, SampleSet, RNG_NAME};
use crate::state::{
    gaussian_packet, oscillator_ground_state, oscillator_width, reading_of, GaussianPacketParams,
    Reading, DEFAULT_MAX_PHASE_STEP,
};
use crate::transform::{check_normalization, gaussian_kernel, measure, DeviceParams, KernelKind, NormalizationReport};

pub const MIN_GRID_POINTS: usize = 64;
pub const MAX_GRID_POINTS: usize = 65536;
pub const DEFAULT_GRID_POINTS: usize = 4096;
pub const DEFAULT_HALF_WIDTH_FACTOR: f64 = 8.0;

/// The J²/ρ-aware widening of the auto-sized grid is capped at this multiple
/// of the plain density width.
const MAX_WIDENING: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OscillatorParams {
    pub omega: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridOverride {
    pub half_width_factor: Option<f64>,
    pub n: Option<usize>,
    #[serde(default)]
    pub quadrature: Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingConfig {
    pub count: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Numerics {
    /// Largest phase step per cell accepted when rebuilding Ψ from a reading.
    pub max_phase_step: f64,
}

impl Default for Numerics {
    fn default() -> Self {
        Self {
            max_phase_step: DEFAULT_MAX_PHASE_STEP,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Relative tolerance for nonzero closed-form targets.
    pub relative: f64,
    /// Absolute tolerance for targets that vanish.
    pub absolute: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            relative: 1e-4,
            absolute: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub report: Option<PathBuf>,
    pub fields_csv: Option<PathBuf>,
    pub samples_csv: Option<PathBuf>,
    pub sweep_csv: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub units: UnitSystem,
    #[serde(default)]
    pub packet: Option<GaussianPacketParams>,
    #[serde(default)]
    pub oscillator: Option<OscillatorParams>,
    #[serde(default)]
    pub device: DeviceParams,
    #[serde(default)]
    pub grid: GridOverride,
    #[serde(default)]
    pub sampling: Option<SamplingConfig>,
    #[serde(default)]
    pub numerics: Numerics,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: OutputConfig,
}

/// The state being measured.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Source {
    Packet(GaussianPacketParams),
    Oscillator { omega: f64 },
}

impl ScenarioConfig {
    pub fn packet(params: GaussianPacketParams, device: DeviceParams) -> Self {
        Self::with_source(Some(params), None, device)
    }

    pub fn oscillator(omega: f64, sigma: f64) -> Self {
        Self::with_source(
            None,
            Some(OscillatorParams { omega }),
            DeviceParams { sigma, lambda: 0.0 },
        )
    }

    fn with_source(
        packet: Option<GaussianPacketParams>,
        oscillator: Option<OscillatorParams>,
        device: DeviceParams,
    ) -> Self {
        Self {
            name: None,
            units: UnitSystem::default(),
            packet,
            oscillator,
            device,
            grid: GridOverride::default(),
            sampling: None,
            numerics: Numerics::default(),
            tolerances: Tolerances::default(),
            output: OutputConfig::default(),
        }
    }

    /// Parses and validates a JSON document.
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        self.units.validate()?;
        self.device.validate()?;
        match (&self.packet, &self.oscillator) {
            (Some(p), None) => p.validate()?,
            (None, Some(o)) => {
                oscillator_width(o.omega, self.units)?;
            }
            (Some(_), Some(_)) => {
                return Err(Error::param("source", "give exactly one of `packet` and `oscillator`, not both"))
            }
            (None, None) => return Err(Error::param("source", "one of `packet` or `oscillator` is required")),
        }
        if let Some(n) = self.grid.n {
            if !(MIN_GRID_POINTS..=MAX_GRID_POINTS).contains(&n) {
                return Err(Error::param(
                    "grid.n",
                    format!("must be within [{MIN_GRID_POINTS}, {MAX_GRID_POINTS}], got {n}"),
                ));
            }
        }
        if let Some(f) = self.grid.half_width_factor {
            if !(f.is_finite() && f > 0.0) {
                return Err(Error::param("grid.half_width_factor", format!("must be positive, got {f}")));
            }
        }
        if let Some(s) = &self.sampling {
            if s.count < 1 {
                return Err(Error::param("sampling.count", "must be at least 1"));
            }
        }
        if !(self.numerics.max_phase_step.is_finite() && self.numerics.max_phase_step > 0.0) {
            return Err(Error::param("numerics.max_phase_step", "must be positive"));
        }
        let t = &self.tolerances;
        if !(t.relative > 0.0 && t.absolute > 0.0) {
            return Err(Error::param("tolerances", "must be positive"));
        }
        Ok(())
    }

    pub fn source(&self) -> Result<Source> {
        match (self.packet, self.oscillator) {
            (Some(p), None) => Ok(Source::Packet(p)),
            (None, Some(o)) => Ok(Source::Oscillator { omega: o.omega }),
            _ => Err(Error::param("source", "exactly one of `packet` or `oscillator` is required")),
        }
    }

    pub fn display_name(&self) -> &str {
        self.name.as_deref().unwrap_or("scenario")
    }

    /// Grid centred on the packet with half-width `f·max(√(α² + max(σ,λ)²), s_q)`,
    /// where s_q is the width of the recorded J²/ρ integrand (capped).
    pub fn resolve_grid(&self) -> Result<Grid> {
        let (center, alpha, k) = match self.source()? {
            Source::Packet(p) => (p.x0, p.alpha, p.k),
            Source::Oscillator { omega } => (0.0, oscillator_width(omega, self.units)?, 0.0),
        };
        let DeviceParams { sigma, lambda } = self.device;
        let a2 = alpha * alpha;
        let base = (a2 + sigma.max(lambda).powi(2)).sqrt();
        let mut scale = base;
        let denom = a2 + 2.0 * sigma * sigma - lambda * lambda;
        if k != 0.0 && denom > 0.0 {
            let sq = ((a2 + lambda * lambda) * (a2 + sigma * sigma) / denom).sqrt();
            scale = scale.max(sq.min(MAX_WIDENING * base));
        }
        let factor = self.grid.half_width_factor.unwrap_or(DEFAULT_HALF_WIDTH_FACTOR);
        let n = self.grid.n.unwrap_or(DEFAULT_GRID_POINTS);
        Ok(Grid::centered(center, factor * scale, n)?.with_quadrature(self.grid.quadrature))
    }

    /// Closed-form counterpart of this scenario.
    pub fn analytic(&self) -> Result<AnalyticReport> {
        match self.source()? {
            Source::Packet(p) => analytic_scenario_report(p, self.device, self.units),
            Source::Oscillator { omega } => analytic_oscillator_report(omega, self.device.sigma, self.units),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UncertaintyPair {
    pub intrinsic: UncertaintyReport,
    pub recorded: UncertaintyReport,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelChecks {
    pub density: NormalizationReport,
    pub current: NormalizationReport,
}

/// Everything produced by one pass of the numerical pipeline.
#[derive(Debug, Clone)]
pub struct ScenarioRun {
    pub grid: Grid,
    pub intrinsic: Reading,
    pub recorded: Reading,
    pub report: MeasurementReport,
    pub uncertainty: UncertaintyPair,
    pub kernels: KernelChecks,
}

/// State → intrinsic reading → kernels → recorded reading → parameters and indicators.
pub fn run_scenario(config: &ScenarioConfig) -> Result<ScenarioRun> {
    config.validate()?;
    let units = config.units;
    let grid = config.resolve_grid()?;
    let (psi, omega) = match config.source()? {
        Source::Packet(p) => (gaussian_packet(p, grid, units)?, None),
        Source::Oscillator { omega } => (oscillator_ground_state(omega, grid, units)?, Some(omega)),
    };
    let intrinsic = reading_of(&psi, units)?;
    let g = gaussian_kernel(grid, config.device.sigma, KernelKind::Density)?;
    let l = gaussian_kernel(grid, config.device.lambda, KernelKind::Current)?;
    let recorded = measure(&intrinsic, &g, &l)?;
    let params = |r: &Reading| -> Result<_> {
        let mut p = parameter_set(r, units, None)?;
        if let Some(w) = omega {
            let op = crate::estimators::OperatorSpec::oscillator(w, units)?;
            let psi = crate::state::reconstruct_wavefunction_with_limit(r, units, config.numerics.max_phase_step)?;
            let (m, v) = crate::estimators::operator_mean_and_variance(&psi, &op, units)?;
            p.mean_h = Some(m);
            p.var_h = Some(v);
        }
        Ok(p)
    };
    let p_i = params(&intrinsic)?;
    let p_r = params(&recorded)?;
    let (d_h, d_tau) = entropy_deltas(&intrinsic, &recorded)?;
    let indicators = error_indicators(&p_i, &p_r)?.with_entropy(d_h, d_tau);
    let report = MeasurementReport {
        intrinsic: p_i,
        recorded: p_r,
        indicators,
        entropy_intrinsic: entropy_pair(&intrinsic),
        entropy_recorded: entropy_pair(&recorded),
        epsilon: epsilon(&indicators, units.hbar),
    };
    Ok(ScenarioRun {
        grid,
        uncertainty: UncertaintyPair {
            intrinsic: check_uncertainty_relations(&p_i, units),
            recorded: check_uncertainty_relations(&p_r, units),
        },
        kernels: KernelChecks {
            density: check_normalization(&g),
            current: check_normalization(&l),
        },
        intrinsic,
        recorded,
        report,
    })
}

/// JSON document written by `simulate`.
#[derive(Debug, Clone, Serialize)]
pub struct SimulationOutput<'a> {
    pub config: &'a ScenarioConfig,
    pub grid: Grid,
    #[serde(flatten)]
    pub report: MeasurementReport,
    pub uncertainty: UncertaintyPair,
    pub kernels: KernelChecks,
}

impl ScenarioRun {
    pub fn output<'a>(&self, config: &'a ScenarioConfig) -> SimulationOutput<'a> {
        SimulationOutput {
            config,
            grid: self.grid,
            report: self.report,
            uncertainty: self.uncertainty,
            kernels: self.kernels,
        }
    }

    /// CSV `x, rho_I, J_I, rho_R, J_R`.
    pub fn write_fields_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "x [length]",
            "rho_I [1/length]",
            "J_I [1/time]",
            "rho_R [1/length]",
            "J_R [1/time]",
        ])?;
        let cols = [
            self.intrinsic.rho().values(),
            self.intrinsic.current().values(),
            self.recorded.rho().values(),
            self.recorded.current().values(),
        ];
        for i in 0..self.grid.len() {
            let mut rec = vec![self.grid.point(i).to_string()];
            rec.extend(cols.iter().map(|c| c[i].to_string()));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyRow {
    pub field: String,
    pub numeric: f64,
    pub analytic: f64,
    pub abs_error: f64,
    /// `None` for vanishing targets, which are judged on the absolute error.
    pub rel_error: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyOutcome {
    pub rows: Vec<VerifyRow>,
    pub passed: bool,
    pub max_rel_error: f64,
    pub max_abs_error_on_zero_targets: f64,
}

impl VerifyOutcome {
    pub fn failing(&self) -> impl Iterator<Item = &VerifyRow> {
        self.rows.iter().filter(|r| !r.pass)
    }
}

/// Targets at or below this magnitude count as zero.
const ZERO_TARGET: f64 = 1e-12;

/// Compares two reports field by field.
pub fn compare_reports(
    numeric: &MeasurementReport,
    analytic: &MeasurementReport,
    tol: Tolerances,
) -> VerifyOutcome {
    let num: std::collections::HashMap<String, f64> = numeric.fields().into_iter().collect();
    let rows: Vec<VerifyRow> = analytic
        .fields()
        .into_iter()
        .map(|(field, a)| {
            let v = num.get(&field).copied().unwrap_or(f64::NAN);
            let abs_error = (v - a).abs();
            let (rel_error, tolerance, pass) = if a.abs() <= ZERO_TARGET {
                (None, tol.absolute, abs_error <= tol.absolute)
            } else {
                let rel = abs_error / a.abs();
                (Some(rel), tol.relative, rel <= tol.relative)
            };
            VerifyRow {
                field,
                numeric: v,
                analytic: a,
                abs_error,
                rel_error,
                tolerance,
                pass,
            }
        })
        .collect();
    let max_rel_error = rows.iter().filter_map(|r| r.rel_error).fold(0.0, f64::max);
    let max_abs_error_on_zero_targets = rows
        .iter()
        .filter(|r| r.rel_error.is_none())
        .map(|r| r.abs_error)
        .fold(0.0, f64::max);
    VerifyOutcome {
        passed: rows.iter().all(|r| r.pass),
        rows,
        max_rel_error,
        max_abs_error_on_zero_targets,
    }
}

/// Numerical pipeline against the closed forms.
pub fn verify(config: &ScenarioConfig) -> Result<VerifyOutcome> {
    let analytic = config.analytic()?;
    let run = run_scenario(config)?;
    Ok(compare_reports(&run.report, &analytic.report, config.tolerances))
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub index: usize,
    pub sigma: f64,
    pub lambda: f64,
    pub valid: bool,
    /// Name of the failed check for invalid points.
    pub flag: Option<String>,
    pub report: Option<MeasurementReport>,
    pub epsilon_analytic: Option<f64>,
    pub uncertainty: Option<UncertaintyPair>,
    pub sample_seed: Option<u64>,
    pub sample: Option<EmpiricalParameters>,
}

/// Runs every (σ, λ) pair, row-major in σ. Points that fail a check become
/// flagged rows; the sweep itself only fails on bad input.
pub fn sweep(config: &ScenarioConfig, sigmas: &[f64], lambdas: &[f64]) -> Result<Vec<SweepRow>> {
    config.validate()?;
    if sigmas.is_empty() || lambdas.is_empty() {
        return Err(Error::param("sweep", "sigma and lambda lists must be nonempty"));
    }
    let points: Vec<(usize, f64, f64)> = sigmas
        .iter()
        .flat_map(|s| lambdas.iter().map(move |l| (*s, *l)))
        .enumerate()
        .map(|(i, (s, l))| (i, s, l))
        .collect();
    for &(_, s, l) in &points {
        DeviceParams::new(s, l)?;
    }
    Ok(points
        .into_par_iter()
        .map(|(index, sigma, lambda)| sweep_point(config, index, sigma, lambda))
        .collect())
}

fn sweep_point(base: &ScenarioConfig, index: usize, sigma: f64, lambda: f64) -> SweepRow {
    let mut config = base.clone();
    config.device = DeviceParams { sigma, lambda };
    let sample_seed = base.sampling.map(|s| s.seed.wrapping_add(index as u64));
    let mut row = SweepRow {
        index,
        sigma,
        lambda,
        valid: false,
        flag: None,
        report: None,
        epsilon_analytic: None,
        uncertainty: None,
        sample_seed,
        sample: None,
    };
    if let Ok(Source::Packet(p)) = config.source() {
        let radicand = validity_radicand(p.alpha, config.device);
        if radicand <= 0.0 {
            row.flag = Some(Error::Validity { radicand }.check_name().to_string());
            return row;
        }
    }
    let result = run_scenario(&config).and_then(|run| {
        let sample = match (base.sampling, sample_seed) {
            (Some(s), Some(seed)) => {
                let set = sample_positions(&run.recorded, s.count, seed)?;
                empirical_parameters(&set).ok()
            }
            _ => None,
        };
        Ok((run, sample))
    });
    match result {
        Ok((run, sample)) => {
            row.valid = true;
            row.report = Some(run.report);
            row.uncertainty = Some(run.uncertainty);
            row.epsilon_analytic = config.analytic().ok().map(|a| a.report.epsilon);
            row.sample = sample;
        }
        Err(e) => row.flag = Some(e.check_name().to_string()),
    }
    row
}

pub const SWEEP_HEADER: [&str; 28] = [
    "index",
    "sigma [length]",
    "lambda [length]",
    "valid",
    "flag",
    "d_mean_x [length]",
    "d_mean_p [momentum]",
    "d_corr [action]",
    "d_std_x [length]",
    "d_std_p [momentum]",
    "d_mean_H [energy]",
    "d_std_H [energy]",
    "H_I [1]",
    "H_R [1]",
    "tau_I [length/time]",
    "tau_R [length/time]",
    "dH [1]",
    "d_tau [length/time]",
    "epsilon [1]",
    "epsilon_analytic [1]",
    "upper_margin_I [action]",
    "lower_margin_I [action]",
    "upper_margin_R [action]",
    "lower_margin_R [action]",
    "sample_seed",
    "sample_count",
    "sample_mean [length]",
    "sample_std [length]",
];

fn opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_HEADER)?;
    for row in rows {
        let rep = row.report.as_ref();
        let ind = rep.map(|r| r.indicators);
        let unc = row.uncertainty.as_ref();
        let record = vec![
            row.index.to_string(),
            row.sigma.to_string(),
            row.lambda.to_string(),
            row.valid.to_string(),
            row.flag.clone().unwrap_or_default(),
            opt(ind.map(|i| i.d_mean_x)),
            opt(ind.map(|i| i.d_mean_p)),
            opt(ind.map(|i| i.d_corr)),
            opt(ind.map(|i| i.d_std_x)),
            opt(ind.map(|i| i.d_std_p)),
            opt(ind.and_then(|i| i.d_mean_h)),
            opt(ind.and_then(|i| i.d_std_h)),
            opt(rep.map(|r| r.entropy_intrinsic.h)),
            opt(rep.map(|r| r.entropy_recorded.h)),
            opt(rep.map(|r| r.entropy_intrinsic.tau)),
            opt(rep.map(|r| r.entropy_recorded.tau)),
            opt(ind.and_then(|i| i.d_h)),
            opt(ind.and_then(|i| i.d_tau)),
            opt(rep.map(|r| r.epsilon)),
            opt(row.epsilon_analytic),
            opt(unc.map(|u| u.intrinsic.upper_margin)),
            opt(unc.map(|u| u.intrinsic.lower_margin)),
            opt(unc.map(|u| u.recorded.upper_margin)),
            opt(unc.map(|u| u.recorded.lower_margin)),
            row.sample_seed.map(|s| s.to_string()).unwrap_or_default(),
            row.sample.map(|s| s.count.to_string()).unwrap_or_default(),
            opt(row.sample.map(|s| s.mean)),
            opt(row.sample.map(|s| s.std)),
        ];
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

/// Result of `sample`: the draws and their statistics next to the recorded
/// parameters they estimate.
#[derive(Debug, Clone)]
pub struct SampleRun {
    pub samples: SampleSet,
    pub empirical: EmpiricalParameters,
    pub recorded_mean_x: f64,
    pub recorded_std_x: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SampleSummary<'a> {
    pub config: &'a ScenarioConfig,
    pub rng: &'static str,
    pub seed: u64,
    pub source_label: crate::state::Label,
    pub empirical: EmpiricalParameters,
    pub recorded_mean_x: f64,
    pub recorded_std_x: f64,
}

impl SampleRun {
    pub fn summary<'a>(&self, config: &'a ScenarioConfig) -> SampleSummary<'a> {
        SampleSummary {
            config,
            rng: RNG_NAME,
            seed: self.samples.seed,
            source_label: self.samples.source_label,
            empirical: self.empirical,
            recorded_mean_x: self.recorded_mean_x,
            recorded_std_x: self.recorded_std_x,
        }
    }
}

pub fn sample(config: &ScenarioConfig) -> Result<SampleRun> {
    let s = config
        .sampling
        .ok_or_else(|| Error::param("sampling", "the `sample` command needs a `sampling` section"))?;
    let run = run_scenario(config)?;
    let samples = sample_positions(&run.recorded, s.count, s.seed)?;
    let empirical = empirical_parameters(&samples)?;
    Ok(SampleRun {
        samples,
        empirical,
        recorded_mean_x: run.report.recorded.mean_x,
        recorded_std_x: run.report.recorded.std_x(),
    })
}
