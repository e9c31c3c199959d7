//! Parameter sweeps that turn the solver into checks: α-uniform existence
//! time, the zero-alpha limit rate, Bona–Smith splitting bounds and the
//! lemma verifiers.
//!
//! Parameter points run on the rayon pool; results are merged in grid
//! order, so reports do not depend on scheduling.

mod bona_smith;
mod lemmas;
mod uniform;
mod zero_alpha;

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::initial::InitialData;
use crate::integrate::{self, DiagnosticsRow, Model, Run, RunOptions, SimParams, ALPHA_MAX};
use crate::io::report::{fmt_float, write_report_csv, Table};
use crate::io::snapshot::write_snapshot;
use crate::spectral::{TorusGrid, VelocityField};

pub use bona_smith::{exp_bona_smith, SplittingRecord};
pub use lemmas::exp_lemma_suite;
pub use uniform::exp_uniform_time;
pub use zero_alpha::exp_zero_alpha;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Simulate,
    UniformTime,
    ZeroAlpha,
    BonaSmith,
    LemmaSuite,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Simulate => "simulate",
            ExperimentKind::UniformTime => "uniform_time",
            ExperimentKind::ZeroAlpha => "zero_alpha",
            ExperimentKind::BonaSmith => "bona_smith",
            ExperimentKind::LemmaSuite => "lemma_suite",
        }
    }
}

/// Pass/fail thresholds. Every field can be overridden from a config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Largest admissible max/min ratio of finite doubling times.
    pub doubling_factor: f64,
    /// Relative slack allowed when checking monotone decrease of `E(α)`.
    pub monotone_slack: f64,
    pub slope_min: f64,
    pub slope_max: f64,
    /// Splitting ratios must stay within this factor of their median.
    pub median_factor: f64,
    /// Largest admissible max/min of a lemma ratio across α.
    pub alpha_stability: f64,
    /// Largest admissible ratio of lemma maxima between two resolutions.
    pub resolution_stability: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            doubling_factor: 2.0,
            monotone_slack: 0.05,
            slope_min: 1.7,
            slope_max: 2.3,
            median_factor: 4.0,
            alpha_stability: 3.0,
            resolution_stability: 2.0,
        }
    }
}

/// Settings of the lemma suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LemmaOptions {
    /// Seeded `(u, v)` pairs per α and resolution; at least 30.
    pub trials: usize,
    /// Mode radius of the random pairs.
    pub k_max: usize,
    /// Regularity of the low-regularity commutator branch (`s < 1 + d/2`).
    pub s_low: f64,
    /// Trials for the Bernstein, interpolation and product verifiers.
    pub verifier_trials: usize,
}

impl Default for LemmaOptions {
    fn default() -> Self {
        Self { trials: 30, k_max: 4, s_low: 1.2, verifier_trials: 100 }
    }
}

/// Settings of the Bona–Smith experiment beyond `n_grid`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BonaSmithOptions {
    /// Cutoff index at which `δ_n` is swept in α.
    pub delta_n: i32,
    pub delta_alpha_grid: Vec<f64>,
}

impl Default for BonaSmithOptions {
    fn default() -> Self {
        Self { delta_n: 3, delta_alpha_grid: vec![0.0125, 0.025, 0.05] }
    }
}

/// Everything an experiment needs.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub grid: TorusGrid,
    /// Template; `alpha` is used by `simulate` and `bona_smith`.
    pub params: SimParams,
    pub alpha_grid: Vec<f64>,
    pub n_grid: Vec<i32>,
    pub seed: u64,
    pub initial_data: InitialData,
    pub tolerances: Tolerances,
    pub lemma: LemmaOptions,
    pub bona_smith: BonaSmithOptions,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        self.params.validate(self.grid.dim())?;
        let in_range = |a: &f64| a.is_finite() && (0.0..=ALPHA_MAX).contains(a);
        if let Some(a) = self.alpha_grid.iter().find(|a| !in_range(a)) {
            return Err(Error::param(format!("alpha_grid entry {a} outside [0, {ALPHA_MAX}]")));
        }
        let needs_grid =
            matches!(self.kind, ExperimentKind::UniformTime | ExperimentKind::ZeroAlpha | ExperimentKind::LemmaSuite);
        if needs_grid && self.alpha_grid.is_empty() {
            return Err(Error::param("alpha_grid must not be empty"));
        }
        match self.kind {
            ExperimentKind::ZeroAlpha => {
                if !self.alpha_grid.contains(&0.0) {
                    return Err(Error::param("zero_alpha requires 0 in alpha_grid"));
                }
            }
            ExperimentKind::BonaSmith => {
                if self.params.alpha <= 0.0 {
                    return Err(Error::param("bona_smith requires a fixed alpha > 0"));
                }
                if self.n_grid.is_empty() || self.n_grid.iter().any(|&n| n < 0) {
                    return Err(Error::param("n_grid must be a nonempty list of indices >= 0"));
                }
                if self.bona_smith.delta_n < 0 {
                    return Err(Error::param("delta_n must be >= 0"));
                }
                if let Some(a) = self.bona_smith.delta_alpha_grid.iter().find(|a| !in_range(a) || **a == 0.0) {
                    return Err(Error::param(format!("delta_alpha_grid entry {a} outside (0, {ALPHA_MAX}]")));
                }
            }
            ExperimentKind::LemmaSuite => {
                if self.lemma.trials < 30 {
                    return Err(Error::param(format!("lemma trials must be >= 30, got {}", self.lemma.trials)));
                }
                if self.lemma.verifier_trials == 0 {
                    return Err(Error::param("verifier_trials must be >= 1"));
                }
                let d = self.grid.dim() as f64;
                if !(self.lemma.s_low > 0.0 && self.lemma.s_low < 1.0 + d / 2.0) {
                    return Err(Error::param(format!("s_low must lie in (0, 1 + d/2), got {}", self.lemma.s_low)));
                }
            }
            _ => {}
        }
        Ok(())
    }

    pub fn initial_field(&self) -> Result<VelocityField> {
        self.initial_data.clone().with_seed(self.seed).generate(&self.grid, self.params.s)
    }
}

/// One judged assertion of an experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub value: f64,
    pub bound: f64,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, pass: bool, value: f64, bound: f64, detail: impl Into<String>) -> Self {
        Self { name: name.into(), pass, value, bound, detail: detail.into() }
    }
}

/// Output of an experiment: the main table, the judged checks, the raw
/// per-run diagnostics and any auxiliary tables.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub table: Table,
    pub checks: Vec<Check>,
    pub runs: Vec<(String, Vec<DiagnosticsRow>)>,
    pub extra_tables: Vec<(String, Table)>,
    pub snapshots: Vec<(String, VelocityField, f64, f64)>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn checks_table(&self) -> Table {
        let mut t = Table::new(["check", "pass", "value", "bound", "detail"]);
        for c in &self.checks {
            t.rows.push(vec![
                c.name.clone(),
                u8::from(c.pass).to_string(),
                fmt_float(c.value),
                fmt_float(c.bound),
                c.detail.clone(),
            ]);
        }
        t
    }

    /// Writes `report.csv`, `checks.csv`, `runs/<name>.csv`, auxiliary tables
    /// and snapshots under `dir`; returns the written paths relative to `dir`.
    pub fn write(&self, dir: &Path) -> Result<Vec<String>> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut written = Vec::new();
        write_report_csv(&self.table, &dir.join("report.csv"))?;
        written.push("report.csv".to_string());
        write_report_csv(&self.checks_table(), &dir.join("checks.csv"))?;
        written.push("checks.csv".to_string());
        for (name, t) in &self.extra_tables {
            let file = format!("{name}.csv");
            write_report_csv(t, &dir.join(&file))?;
            written.push(file);
        }
        if !self.runs.is_empty() {
            let runs = dir.join("runs");
            fs::create_dir_all(&runs).map_err(|e| Error::io(&runs, e))?;
            for (name, rows) in &self.runs {
                let file = format!("runs/{name}.csv");
                write_report_csv(&Table::diagnostics(rows), &dir.join(&file))?;
                written.push(file);
            }
        }
        for (name, u, t, alpha) in &self.snapshots {
            let file = format!("{name}.epf");
            write_snapshot(u, *t, *alpha, &dir.join(&file))?;
            written.push(file);
        }
        Ok(written)
    }
}

/// Dispatches on `spec.kind`.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Report> {
    spec.validate()?;
    match spec.kind {
        ExperimentKind::Simulate => exp_simulate(spec),
        ExperimentKind::UniformTime => exp_uniform_time(spec),
        ExperimentKind::ZeroAlpha => exp_zero_alpha(spec),
        ExperimentKind::BonaSmith => exp_bona_smith(spec),
        ExperimentKind::LemmaSuite => exp_lemma_suite(spec),
    }
}

/// A single integration at `params.alpha` with its final snapshot.
pub fn exp_simulate(spec: &ExperimentSpec) -> Result<Report> {
    spec.validate()?;
    let u0 = spec.initial_field()?;
    let alpha = spec.params.alpha;
    let run = integrate::integrate(&u0, &spec.params, &Model::ep_alpha(alpha), RunOptions::default())?;
    let table = Table::diagnostics(&run.trajectory);
    Ok(Report {
        table,
        snapshots: vec![
            ("initial".into(), u0, 0.0, alpha),
            ("final".into(), run.final_state.u.clone(), run.final_state.t, alpha),
        ],
        ..Report::default()
    })
}

pub(crate) fn run_alpha(u0: &VelocityField, params: &SimParams, alpha: f64, keep: bool) -> Result<Run> {
    integrate::integrate(u0, params, &Model::ep_alpha(alpha), RunOptions { keep_snapshots: keep })
}

pub(crate) fn run_name(prefix: &str, x: f64) -> String {
    format!("{prefix}_{x}")
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        None
    } else {
        Some(sxy / sxx)
    }
}

/// `max/min` of a nonempty set of positive values; `NaN` otherwise.
pub(crate) fn spread(values: impl IntoIterator<Item = f64>) -> f64 {
    let (lo, hi) = values
        .into_iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
    if lo > 0.0 && hi.is_finite() {
        hi / lo
    } else {
        f64::NAN
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(f64, f64)> = [0.1, 0.2, 0.4].iter().map(|&a| (a, 3.0 * a * a)).collect();
        assert!((loglog_slope(&pts).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(loglog_slope(&pts[..1]), None);
        assert_eq!(spread([2.0, 1.0, 4.0]), 4.0);
        assert!(spread([0.0, 1.0]).is_nan());
    }
}
