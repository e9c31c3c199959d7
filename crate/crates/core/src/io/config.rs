//! JSON run configuration.
//!
//! ```json
//! {
//!   "experiment": "zero_alpha",
//!   "grid": { "d": 2, "n": 64, "length": 6.283185307179586 },
//!   "params": { "alpha_grid": [0, 0.4, 0.2], "s": 2.5, "t_end": 0.3 },
//!   "initial_data": { "family": "bandlimited", "k_max": 2, "seed": 7 },
//!   "out_dir": "out"
//! }
//! ```
//!
//! Unknown keys are rejected at every level. Absent optional keys take the
//! defaults of [`SimParams::defaults_for`] and the experiment, and the fully
//! resolved document is what [`Config::resolved`] returns.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::{BonaSmithOptions, ExperimentKind, ExperimentSpec, LemmaOptions, Tolerances};
use crate::initial::InitialData;
use crate::integrate::SimParams;
use crate::spectral::TorusGrid;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub d: usize,
    pub n: usize,
    #[serde(default = "default_length")]
    pub length: f64,
}

fn default_length() -> f64 {
    std::f64::consts::TAU
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cfl: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blowup_factor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_every: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment: Option<ExperimentKind>,
    pub grid: GridConfig,
    #[serde(default)]
    pub params: ParamsConfig,
    pub initial_data: InitialData,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_grid: Option<Vec<i32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub lemma: LemmaOptions,
    #[serde(default)]
    pub bona_smith: BonaSmithOptions,
}

pub const DEFAULT_OUT_DIR: &str = "out";

/// Default α grid of each experiment.
pub fn default_alpha_grid(kind: ExperimentKind) -> Vec<f64> {
    match kind {
        ExperimentKind::Simulate | ExperimentKind::BonaSmith => Vec::new(),
        ExperimentKind::UniformTime => vec![0.0, 0.05, 0.1, 0.25, 0.5, 1.0],
        ExperimentKind::ZeroAlpha => vec![0.0, 0.4, 0.2, 0.1, 0.05, 0.025],
        ExperimentKind::LemmaSuite => vec![0.0, 1e-3, 1e-2, 1e-1, 1.0],
    }
}

fn default_alpha(kind: ExperimentKind) -> f64 {
    if kind == ExperimentKind::BonaSmith {
        0.1
    } else {
        0.0
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Experiment kind, checking it against the one requested.
    pub fn kind_for(&self, requested: ExperimentKind) -> Result<ExperimentKind> {
        match self.experiment {
            Some(k) if k != requested => Err(Error::Config(format!(
                "config is for experiment {:?}, but {:?} was requested",
                k.name(),
                requested.name()
            ))),
            _ => Ok(requested),
        }
    }

    /// Copy with every default filled in.
    pub fn resolved(&self, kind: ExperimentKind) -> Self {
        let d = SimParams::defaults_for(self.grid.d);
        let p = &self.params;
        let mut out = self.clone();
        out.experiment = Some(kind);
        out.params = ParamsConfig {
            alpha: Some(p.alpha.unwrap_or(default_alpha(kind))),
            alpha_grid: Some(p.alpha_grid.clone().unwrap_or_else(|| default_alpha_grid(kind))),
            s: Some(p.s.unwrap_or(d.s)),
            t_end: Some(p.t_end.unwrap_or(d.t_end)),
            cfl: Some(p.cfl.unwrap_or(d.cfl)),
            dt_max: Some(p.dt_max.unwrap_or(d.dt_max)),
            blowup_factor: Some(p.blowup_factor.unwrap_or(d.blowup_factor)),
            sample_every: Some(p.sample_every.unwrap_or(d.sample_every)),
        };
        out.n_grid = Some(self.n_grid.clone().unwrap_or_else(|| vec![2, 3, 4, 5]));
        out.out_dir = Some(self.out_dir.clone().unwrap_or_else(|| DEFAULT_OUT_DIR.into()));
        out
    }

    /// Builds and validates the experiment description; any violated
    /// constraint is reported as a config error.
    pub fn to_spec(&self, kind: ExperimentKind, seed: Option<u64>) -> Result<ExperimentSpec> {
        let kind = self.kind_for(kind)?;
        let r = self.resolved(kind);
        let p = &r.params;
        let grid = TorusGrid::new(r.grid.d, r.grid.n, r.grid.length).map_err(|e| Error::Config(e.to_string()))?;
        let seed = seed.or(self.initial_data.seed()).unwrap_or(0);
        let spec = ExperimentSpec {
            kind,
            grid,
            params: SimParams {
                alpha: p.alpha.unwrap_or_default(),
                s: p.s.unwrap_or_default(),
                t_end: p.t_end.unwrap_or_default(),
                cfl: p.cfl.unwrap_or_default(),
                dt_max: p.dt_max.unwrap_or_default(),
                blowup_factor: p.blowup_factor.unwrap_or_default(),
                sample_every: p.sample_every.unwrap_or_default(),
            },
            alpha_grid: p.alpha_grid.clone().unwrap_or_default(),
            n_grid: r.n_grid.clone().unwrap_or_default(),
            seed,
            initial_data: self.initial_data.clone().with_seed(seed),
            tolerances: r.tolerances.clone(),
            lemma: r.lemma.clone(),
            bona_smith: r.bona_smith.clone(),
        };
        spec.validate().map_err(|e| match e {
            Error::InvalidParameter(m) | Error::InvalidGrid(m) => Error::Config(m),
            other => other,
        })?;
        Ok(spec)
    }
}
