//! Seeded experiment batches and their machine-readable reports.
//!
//! Trial `i` of a run draws all of its randomness from
//! `SeededGenerator::new(seed, i)`, so a report depends only on the config
//! and the platform. Trials run in parallel; records are kept in trial order.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error as ThisError;

use crate::dilation::{
    compress_generalized, foguel_power, lift_foguel, poly_apply, unitarity_defect, verify_poly_bound, Polynomial,
    DISK_SAMPLES,
};
use crate::error::Error;
use crate::kernel::{hermitian_eigenvalues, identity, max_abs, operator_norm, symmetrize, Tolerance};
use crate::models::{
    assemble_upper, build_foguel, complex_gaussian, embed_corner, haar_unitary, random_contraction, random_symbol,
    truncated_shift, FoguelOperator, SeededGenerator,
};
use crate::scalar::CMatrix;
use crate::schur::{foguel_positivity, neumann_eval, neumann_tail_bound, norm_by_bisection, schur_correction};
use crate::spectral::{
    foguel_inverse, foguel_norm_closed, gram_minus_identity_inverse, inverse_branches, resolvent_blocks,
    verify_spectral_mapping,
};

type M = CMatrix<f64>;

/// Upper limit on `--dim` and on every shift dimension.
pub const DIM_CEILING: usize = 512;
/// Bisection bracket width used by `verify-schur`.
pub const BISECTION_WIDTH: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    VerifySpectrum,
    VerifyNorm,
    VerifyResolvent,
    VerifyInverses,
    VerifyDilation,
    VerifyPolynomial,
    VerifyPower,
    VerifySchur,
    ShiftConvergence,
}

impl Experiment {
    pub const ALL: [Experiment; 9] = [
        Experiment::VerifySpectrum,
        Experiment::VerifyNorm,
        Experiment::VerifyResolvent,
        Experiment::VerifyInverses,
        Experiment::VerifyDilation,
        Experiment::VerifyPolynomial,
        Experiment::VerifyPower,
        Experiment::VerifySchur,
        Experiment::ShiftConvergence,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::VerifySpectrum => "verify-spectrum",
            Experiment::VerifyNorm => "verify-norm",
            Experiment::VerifyResolvent => "verify-resolvent",
            Experiment::VerifyInverses => "verify-inverses",
            Experiment::VerifyDilation => "verify-dilation",
            Experiment::VerifyPolynomial => "verify-polynomial",
            Experiment::VerifyPower => "verify-power",
            Experiment::VerifySchur => "verify-schur",
            Experiment::ShiftConvergence => "shift-convergence",
        }
    }

    /// Threshold on the headline deviation when `--tol` is not given.
    pub fn default_tol(self) -> f64 {
        match self {
            Experiment::VerifySpectrum | Experiment::VerifyNorm | Experiment::VerifyResolvent => 1e-8,
            Experiment::VerifyInverses => 1e-10,
            Experiment::VerifyDilation | Experiment::VerifyPolynomial | Experiment::VerifyPower => 1e-9,
            Experiment::VerifySchur => 1e-6,
            Experiment::ShiftConvergence => 1e-10,
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| ConfigError::new("experiment", format!("unknown experiment `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    #[default]
    JsonLines,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json-lines" => Ok(OutputFormat::JsonLines),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(ConfigError::new("format", format!("unknown format `{other}`"))),
        }
    }
}

/// Invalid configuration, naming the offending field.
#[derive(Debug, Clone, PartialEq, ThisError)]
#[error("invalid `{field}`: {message}")]
pub struct ConfigError {
    pub field: &'static str,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: &'static str, message: impl Into<String>) -> Self {
        Self {
            field,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, ThisError)]
pub enum RunError {
    #[error(transparent)]
    Usage(#[from] ConfigError),
    #[error("trial {trial}: {source}")]
    Internal { trial: u64, source: Error },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub dim: usize,
    pub trials: u64,
    pub seed: u64,
    /// Threshold on the headline deviation; `None` selects the experiment default.
    pub tol: Option<f64>,
    pub format: OutputFormat,
    /// Highest power checked by `verify-power`.
    pub power_max: usize,
    /// Highest polynomial degree drawn by `verify-polynomial`.
    pub poly_degree: usize,
    /// Neumann truncation order used by `verify-schur`.
    pub neumann_order: usize,
    /// Shift dimensions for `shift-convergence`.
    pub shift_dims: Vec<usize>,
    /// Replace random inputs by `V = A = I`, `T = I`.
    pub unit_fixture: bool,
    /// Append the wall time to the aggregate record (breaks byte determinism).
    pub timings: bool,
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        Self {
            experiment,
            dim: 4,
            trials: 10,
            seed: 0,
            tol: None,
            format: OutputFormat::JsonLines,
            power_max: 10,
            poly_degree: 8,
            neumann_order: 40,
            shift_dims: vec![16, 64, 256],
            unit_fixture: false,
            timings: false,
        }
    }

    pub fn tolerance(&self) -> f64 {
        self.tol.unwrap_or_else(|| self.experiment.default_tol())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.dim == 0 || self.dim > DIM_CEILING {
            return Err(ConfigError::new(
                "dim",
                format!("must be in 1..={DIM_CEILING}, got {}", self.dim),
            ));
        }
        if self.trials == 0 {
            return Err(ConfigError::new("trials", "must be at least 1"));
        }
        if let Some(tol) = self.tol {
            Tolerance::absolute(tol).map_err(|e| ConfigError::new("tol", e.to_string()))?;
            if tol == 0.0 {
                return Err(ConfigError::new("tol", "must be positive"));
            }
        }
        if self.power_max == 0 {
            return Err(ConfigError::new("power-max", "must be at least 1"));
        }
        if self.experiment == Experiment::ShiftConvergence {
            if self.shift_dims.is_empty() {
                return Err(ConfigError::new("shift-dims", "must list at least one dimension"));
            }
            if let Some(&bad) = self.shift_dims.iter().find(|&&n| n < self.dim || n > DIM_CEILING) {
                return Err(ConfigError::new(
                    "shift-dims",
                    format!("{bad} must lie in {}..={DIM_CEILING}", self.dim),
                ));
            }
        }
        Ok(())
    }
}

/// One trial's outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub dim: usize,
    /// Headline deviation, normalized as documented per experiment.
    pub deviation: f64,
    /// Margin of the norm bound under test, when the experiment has one.
    pub slack: Option<f64>,
    pub pass: bool,
    /// Failure reason or informational note.
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub trials: u64,
    pub pass_count: u64,
    pub max_deviation: f64,
    pub min_slack: Option<f64>,
    pub pass: bool,
    pub wall_time_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub records: Vec<TrialRecord>,
    pub aggregate: Aggregate,
}

/// Accumulates named checks within a trial.
struct Checks {
    trial: u64,
    dim: usize,
    deviation: f64,
    slack: Option<f64>,
    failures: Vec<String>,
    note: Option<String>,
}

impl Checks {
    fn new(trial: u64, dim: usize) -> Self {
        Self {
            trial,
            dim,
            deviation: 0.0,
            slack: None,
            failures: Vec::new(),
            note: None,
        }
    }

    /// Headline deviation; fails when above `limit`.
    fn deviation(&mut self, value: f64, limit: f64) {
        self.deviation = self.deviation.max(value);
        self.at_most("deviation", value, limit);
    }

    fn slack(&mut self, value: f64, floor: f64) {
        self.slack = Some(self.slack.map_or(value, |s| s.min(value)));
        if !(value >= floor) {
            self.failures.push(format!("slack {value:e} below {floor:e}"));
        }
    }

    fn at_most(&mut self, name: &str, value: f64, limit: f64) {
        if !(value <= limit) {
            self.failures.push(format!("{name} {value:e} exceeds {limit:e}"));
        }
    }

    fn holds(&mut self, name: &str, ok: bool) {
        if !ok {
            self.failures.push(format!("{name} violated"));
        }
    }

    fn finish(self) -> TrialRecord {
        let pass = self.failures.is_empty();
        TrialRecord {
            trial: self.trial,
            dim: self.dim,
            deviation: self.deviation,
            slack: self.slack,
            pass,
            reason: if pass {
                self.note
            } else {
                Some(self.failures.join("; "))
            },
        }
    }
}

fn failed_record(trial: u64, dim: usize, err: &Error) -> TrialRecord {
    TrialRecord {
        trial,
        dim,
        deviation: f64::INFINITY,
        slack: None,
        pass: false,
        reason: Some(format!("{}: {err}", err.code())),
    }
}

struct Inputs {
    isometry: M,
    contraction: M,
    symbol: M,
}

fn draw_inputs(cfg: &ExperimentConfig, gen: &SeededGenerator) -> crate::Result<Inputs> {
    let n = cfg.dim;
    if cfg.unit_fixture {
        return Ok(Inputs {
            isometry: identity(n),
            contraction: identity(n),
            symbol: identity(n),
        });
    }
    Ok(Inputs {
        isometry: haar_unitary::<f64>(n, &gen.fork(0))?,
        contraction: random_contraction(n, &gen.fork(1))?,
        symbol: random_symbol(n, &gen.fork(2))?,
    })
}

fn unitary_foguel(inputs: &Inputs) -> crate::Result<FoguelOperator<f64>> {
    build_foguel(inputs.isometry.clone(), inputs.symbol.clone(), true)
}

fn run_trial(cfg: &ExperimentConfig, trial: u64) -> crate::Result<TrialRecord> {
    let gen = SeededGenerator::new(cfg.seed, trial);
    let inputs = draw_inputs(cfg, &gen)?;
    let tol = cfg.tolerance();
    let mut checks = Checks::new(trial, cfg.dim);
    match cfg.experiment {
        Experiment::VerifyNorm => {
            let f = unitary_foguel(&inputs)?;
            let tn = f.symbol_norm()?;
            let phi = foguel_norm_closed(tn)?;
            let norm = f.norm()?;
            checks.deviation((norm - phi).abs() / (1.0 + tn), tol);
        }
        Experiment::VerifySpectrum => {
            let f = unitary_foguel(&inputs)?;
            let tn = f.symbol_norm()?;
            let report = verify_spectral_mapping(&f, Tolerance::absolute(tol * (1.0 + tn * tn))?)?;
            checks.deviation(report.max_deviation / (1.0 + tn * tn), tol);
            checks.at_most("branch product error", report.max_pair_product_error, 1e-12);
            checks.holds("gram spectrum nonnegative", report.gram_spectrum[0] >= -1e-10);
        }
        Experiment::VerifyResolvent => {
            let f = unitary_foguel(&inputs)?;
            let lambda = sample_resolvent_lambda(&f, &gen)?;
            let blocks = resolvent_blocks(&f, lambda)?;
            checks.deviation(blocks.residual, tol);
            checks.at_most("link residual", blocks.link_residual(&f)?, 1e-9);
            let s = blocks.assembled();
            checks.at_most("S hermitian", max_abs(&(&s - s.adjoint())), 1e-10);
        }
        Experiment::VerifyInverses => {
            let f = unitary_foguel(&inputs)?;
            let tn = f.symbol_norm()?;
            let inv = foguel_inverse(&f)?;
            checks.deviation(inv.residual / (1.0 + tn), tol);
            checks.at_most("gram inverse residual", inv.gram_residual / (1.0 + tn).powi(2), 1e-9);
            let shifted = gram_minus_identity_inverse(&f)?;
            let cond2 = shifted.symbol_condition.powi(2);
            checks.at_most("gram - I inverse residual", shifted.residual / cond2, 1e-9);
        }
        Experiment::VerifyDilation => {
            let (a, t) = (&inputs.contraction, &inputs.symbol);
            let lift = lift_foguel(a, t)?;
            checks.deviation(unitarity_defect(&lift.va)?, tol);
            let phi = foguel_norm_closed(operator_norm(t)?)?;
            let norm_w = lift.w.norm()?;
            checks.at_most("|‖W‖ - phi(‖T‖)|", (norm_w - phi).abs(), 1e-8);
            let comp = compress_generalized(a, t)?;
            checks.holds("‖R‖ <= ‖W‖", comp.norm_r <= comp.norm_w + 1e-10);
            checks.slack(comp.slack(), -1e-8);
        }
        Experiment::VerifyPower => {
            let f = unitary_foguel(&inputs)?;
            let (v, t) = (f.v(), f.t());
            let tn = f.symbol_norm()?;
            let r = f.assembled();
            let r_norm = f.norm()?;
            let mut direct = r.clone();
            for n in 1..=cfg.power_max {
                if n > 1 {
                    direct = &direct * r;
                }
                // The isometry slot V plays the role of the contraction A.
                let block = foguel_power(v, t, n)?;
                let dev = max_abs(&(&block - &direct)) / (1.0 + r_norm).powi(n as i32);
                checks.deviation(dev, tol);
                let bound = foguel_norm_closed(n as f64 * tn)?;
                checks.slack(bound - operator_norm(&direct)?, -1e-8);
            }
        }
        Experiment::VerifyPolynomial => {
            let (a, t) = (&inputs.contraction, &inputs.symbol);
            let p = if cfg.unit_fixture {
                Polynomial::monomial(2)
            } else {
                sample_polynomial(cfg.poly_degree, &gen.fork(3))
            };
            let block = poly_apply(&p, a, t)?;
            let r = assemble_upper(&a.adjoint(), t, a);
            let direct = p.eval_matrix(&r);
            let r_norm = operator_norm(&r)?;
            let scale = p
                .coeffs()
                .iter()
                .enumerate()
                .fold(1.0, |acc, (j, c)| acc + c.norm() * (1.0 + r_norm).powi(j as i32));
            checks.deviation(max_abs(&(block - direct)) / scale, tol);
            let rep = verify_poly_bound(&p, a, t)?;
            checks.slack(rep.slack, -1e-8);
            checks.holds(
                "off-diagonal triangle inequality",
                rep.offdiag_norm <= rep.offdiag_chain + 1e-9 * (1.0 + rep.offdiag_chain),
            );
            checks.holds(
                "off-diagonal derivative bound",
                rep.offdiag_chain <= rep.offdiag_bound + 1e-9,
            );
            checks.note = Some(format!("degree {}", p.degree().map_or(-1, |d| d as i64)));
        }
        Experiment::VerifySchur => {
            let f = unitary_foguel(&inputs)?;
            let tn = f.symbol_norm()?;
            let phi = foguel_norm_closed(tn)?;
            let svd_norm = f.assembled().singular_values().max();
            let bis = norm_by_bisection(&f, Tolerance::absolute(BISECTION_WIDTH)?)?;
            checks.deviation((bis.norm - svd_norm).abs().max((bis.norm - phi).abs()), tol);
            checks.at_most("bisection iterations", bis.iterations as f64, 60.0);
            let m = 1.0 + 1e-3 + gen.fork(4).rng().random_range(0.0..2.0 * phi);
            // Disagreement outside the singular band surfaces as an internal error.
            foguel_positivity(&f, m)?;
            let tt = symmetrize(&f.symbol_gram());
            let closed = &tt / nalgebra::Complex::new(m * m - 1.0, 0.0);
            let correction = schur_correction(f.v(), f.t(), m)?;
            checks.at_most(
                "closed-form correction",
                operator_norm(&(&correction - &closed))?,
                1e-10 * tn * tn,
            );
            let series = neumann_eval(f.v(), f.t(), m, cfg.neumann_order)?;
            let trunc = operator_norm(&(series - &closed))?;
            checks.at_most(
                "neumann truncation",
                trunc,
                neumann_tail_bound(tn, m, cfg.neumann_order) + 1e-10 * tn * tn,
            );
        }
        Experiment::ShiftConvergence => unreachable!("handled by run_shift_convergence"),
    }
    Ok(checks.finish())
}

/// Draws `lambda` by sampling `mu` away from `spec(TT*)` and mapping it
/// through a random branch of the inverse map.
fn sample_resolvent_lambda(f: &FoguelOperator<f64>, gen: &SeededGenerator) -> crate::Result<f64> {
    let spectrum = hermitian_eigenvalues(&symmetrize(&f.symbol_gram()))?;
    let top = *spectrum.last().expect("non-empty");
    let gap = 1e-3 * (1.0 + top);
    let mut rng = gen.fork(5).rng();
    let mut mu = top + 0.5;
    for _ in 0..64 {
        let candidate = rng.random_range(0.0..1.25 * top + 1.0);
        let dist = spectrum
            .iter()
            .map(|s| (s - candidate).abs())
            .fold(f64::INFINITY, f64::min);
        if dist >= gap && candidate >= 1e-3 {
            mu = candidate;
            break;
        }
    }
    let (lo, hi) = inverse_branches(mu)?;
    Ok(if rng.random_bool(0.5) { hi } else { lo })
}

fn sample_polynomial(max_degree: usize, gen: &SeededGenerator) -> Polynomial<f64> {
    let mut rng = gen.rng();
    let degree = rng.random_range(0..=max_degree);
    let coeffs = complex_gaussian::<f64>(degree + 1, 1, &mut rng);
    let p = Polynomial::new(coeffs.iter().copied().collect());
    let p = p.normalized(1.0);
    debug_assert!(p.sup_norm_on_disk(DISK_SAMPLES) <= 1.0 + 1e-12);
    p
}

fn run_shift_convergence(cfg: &ExperimentConfig) -> crate::Result<Vec<TrialRecord>> {
    let t = if cfg.unit_fixture {
        identity(cfg.dim)
    } else {
        random_symbol::<f64>(cfg.dim, &SeededGenerator::new(cfg.seed, 0))?
    };
    let phi = foguel_norm_closed(operator_norm(&t)?)?;
    let norms: Vec<f64> = cfg
        .shift_dims
        .par_iter()
        .map(|&n| build_foguel(truncated_shift(n), embed_corner(&t, n)?, false)?.norm())
        .collect::<crate::Result<_>>()?;
    let mut records = Vec::with_capacity(norms.len());
    for (k, (&n, &norm)) in cfg.shift_dims.iter().zip(&norms).enumerate() {
        let mut checks = Checks::new(k as u64, n);
        checks.deviation((norm - phi).max(0.0), cfg.tolerance());
        checks.slack(phi - norm, -cfg.tolerance());
        if k > 0 {
            let (prev_n, prev) = (cfg.shift_dims[k - 1], norms[k - 1]);
            if prev_n <= n {
                checks.holds("monotone in N", norm >= prev - 1e-12);
            }
        }
        checks.note = Some(format!("norm {norm:.15e}, gap to closed form {:.3e}", phi - norm));
        records.push(checks.finish());
    }
    Ok(records)
}

/// Runs every trial of `cfg`. Expected numerical failures become failed
/// trials; internal-consistency errors abort the run.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport, RunError> {
    cfg.validate()?;
    let start = Instant::now();
    let records = if cfg.experiment == Experiment::ShiftConvergence {
        run_shift_convergence(cfg).map_err(|source| RunError::Internal { trial: 0, source })?
    } else {
        let outcomes: Vec<(u64, crate::Result<TrialRecord>)> = (0..cfg.trials)
            .into_par_iter()
            .map(|i| (i, run_trial(cfg, i)))
            .collect();
        let mut records = Vec::with_capacity(outcomes.len());
        for (trial, outcome) in outcomes {
            match outcome {
                Ok(r) => records.push(r),
                Err(source) if source.is_internal() => return Err(RunError::Internal { trial, source }),
                Err(e) => records.push(failed_record(trial, cfg.dim, &e)),
            }
        }
        records
    };
    let pass_count = records.iter().filter(|r| r.pass).count() as u64;
    let aggregate = Aggregate {
        trials: records.len() as u64,
        pass_count,
        max_deviation: records.iter().map(|r| r.deviation).fold(0.0, f64::max),
        min_slack: records.iter().filter_map(|r| r.slack).reduce(f64::min),
        pass: pass_count == records.len() as u64,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    };
    Ok(ExperimentReport {
        config: cfg.clone(),
        records,
        aggregate,
    })
}

#[derive(Serialize)]
struct JsonTrial<'a> {
    experiment: &'a str,
    seed: u64,
    trial: u64,
    dim: usize,
    deviation: f64,
    slack: Option<f64>,
    pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    reason: Option<&'a str>,
}

#[derive(Serialize)]
struct JsonAggregate<'a> {
    experiment: &'a str,
    seed: u64,
    aggregate: bool,
    trials: u64,
    pass_count: u64,
    max_deviation: f64,
    min_slack: Option<f64>,
    pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    wall_time_ms: Option<f64>,
}

#[derive(Serialize)]
struct CsvRow<'a> {
    experiment: &'a str,
    seed: u64,
    trial: u64,
    dim: usize,
    deviation: f64,
    slack: Option<f64>,
    pass: bool,
    reason: &'a str,
}

/// Writes the report as json-lines (one object per trial plus an aggregate
/// object) or csv (header plus one row per trial).
pub fn emit_report<W: Write>(report: &ExperimentReport, format: OutputFormat, out: W) -> std::io::Result<()> {
    let experiment = report.config.experiment.name();
    let seed = report.config.seed;
    match format {
        OutputFormat::JsonLines => {
            let mut out = out;
            for r in &report.records {
                let line = JsonTrial {
                    experiment,
                    seed,
                    trial: r.trial,
                    dim: r.dim,
                    deviation: r.deviation,
                    slack: r.slack,
                    pass: r.pass,
                    reason: r.reason.as_deref(),
                };
                serde_json::to_writer(&mut out, &line)?;
                out.write_all(b"\n")?;
            }
            let agg = &report.aggregate;
            let line = JsonAggregate {
                experiment,
                seed,
                aggregate: true,
                trials: agg.trials,
                pass_count: agg.pass_count,
                max_deviation: agg.max_deviation,
                min_slack: agg.min_slack,
                pass: agg.pass,
                wall_time_ms: report.config.timings.then_some(agg.wall_time_ms),
            };
            serde_json::to_writer(&mut out, &line)?;
            out.write_all(b"\n")?;
            out.flush()
        }
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for r in &report.records {
                w.serialize(CsvRow {
                    experiment,
                    seed,
                    trial: r.trial,
                    dim: r.dim,
                    deviation: r.deviation,
                    slack: r.slack,
                    pass: r.pass,
                    reason: r.reason.as_deref().unwrap_or(""),
                })?;
            }
            w.flush()
        }
    }
}

/// Report rendered into memory.
pub fn render_report(report: &ExperimentReport, format: OutputFormat) -> Vec<u8> {
    let mut buf = Vec::new();
    emit_report(report, format, &mut buf).expect("writing to memory cannot fail");
    buf
}
