use rayon::prelude::*;

use super::{run_alpha, run_name, spread, Check, ExperimentKind, ExperimentSpec, Report};
use crate::error::{Error, Result};
use crate::integrate::{doubling_time, DiagnosticsRow};
use crate::io::report::{fmt_float, fmt_opt, Table};

struct Point {
    alpha: f64,
    trajectory: Vec<DiagnosticsRow>,
    survived_until: f64,
    blew_up: bool,
}

/// Integrates one `u₀` under every α of the grid and compares doubling
/// times of `‖u‖_{Hˢ}`.
pub fn exp_uniform_time(spec: &ExperimentSpec) -> Result<Report> {
    if spec.kind != ExperimentKind::UniformTime {
        return Err(Error::param("exp_uniform_time needs kind uniform_time"));
    }
    spec.validate()?;
    let u0 = spec.initial_field()?;
    let points: Vec<Result<Point>> = spec
        .alpha_grid
        .par_iter()
        .map(|&alpha| match run_alpha(&u0, &spec.params, alpha, false) {
            Ok(run) => Ok(Point { alpha, survived_until: run.final_state.t, trajectory: run.trajectory, blew_up: false }),
            Err(Error::BlowUp(b)) => {
                Ok(Point { alpha, survived_until: b.t, trajectory: b.trajectory, blew_up: true })
            }
            Err(e) => Err(e),
        })
        .collect();
    let points = points.into_iter().collect::<Result<Vec<_>>>()?;

    let mut table = Table::new(["alpha", "doubling_time", "sup_hs_norm", "survived_until", "blew_up"]);
    let mut report = Report::default();
    let mut early = Vec::new();
    let mut doubling = Vec::new();
    for p in &points {
        let t2 = doubling_time(&p.trajectory);
        let sup = p.trajectory.iter().map(|r| r.hs_norm).fold(0.0, f64::max);
        table.push(vec![
            fmt_float(p.alpha),
            fmt_opt(t2),
            fmt_float(sup),
            fmt_float(p.survived_until),
            u8::from(p.blew_up).to_string(),
        ])?;
        if p.blew_up && p.trajectory.len() <= 1 {
            early.push(p.alpha);
        }
        doubling.push(t2);
        report.runs.push((run_name("alpha", p.alpha), p.trajectory.clone()));
    }
    report.table = table;

    if !early.is_empty() {
        report.checks.push(Check::new(
            "no_early_blowup",
            false,
            early.len() as f64,
            0.0,
            format!("blow-up before the first sample at alpha {early:?}; refine the grid or lower dt_max"),
        ));
    }

    // [0, t_common] is the interval on which every run stays within twice its
    // initial norm; each run must be alive throughout it.
    let t_common = points
        .iter()
        .zip(&doubling)
        .map(|(p, t2)| t2.unwrap_or(p.survived_until))
        .fold(f64::INFINITY, f64::min);
    let shortest = points.iter().map(|p| p.survived_until).fold(f64::INFINITY, f64::min);
    report.checks.push(Check::new(
        "common_interval",
        t_common > 0.0 && shortest >= t_common,
        shortest,
        t_common,
        "every run survives the common interval ending at the earliest doubling time",
    ));

    let finite: Vec<f64> = doubling.iter().flatten().copied().collect();
    let uniform_existence = finite.is_empty() || finite.len() == doubling.len();
    report.checks.push(Check::new(
        "doubling_existence_uniform",
        uniform_existence,
        finite.len() as f64,
        doubling.len() as f64,
        "doubling times exist for all alpha or for none",
    ));

    let factor = spec.tolerances.doubling_factor;
    let ratio = if finite.is_empty() { 1.0 } else { spread(finite.iter().copied()) };
    report.checks.push(Check::new(
        "doubling_time_spread",
        ratio < factor,
        ratio,
        factor,
        "max/min of finite doubling times across alpha",
    ));
    Ok(report)
}
