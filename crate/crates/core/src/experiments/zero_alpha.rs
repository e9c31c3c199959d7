use rayon::prelude::*;

use super::{loglog_slope, run_alpha, run_name, Check, ExperimentKind, ExperimentSpec, Report};
use crate::error::{Error, Result};
use crate::initial::InitialData;
use crate::integrate::Run;
use crate::io::report::Table;
use crate::spectral;

/// `E(α) = max_k ‖u^α(t_k) − u^0(t_k)‖_{Hˢ}` over the shared sample times,
/// judged for monotone decay as α ↓ 0 and for an α² rate on the smallest
/// decade of the grid.
pub fn exp_zero_alpha(spec: &ExperimentSpec) -> Result<Report> {
    if spec.kind != ExperimentKind::ZeroAlpha {
        return Err(Error::param("exp_zero_alpha needs kind zero_alpha"));
    }
    spec.validate()?;
    let u0 = spec.initial_field()?;
    let s = spec.params.s;

    let reference = run_alpha(&u0, &spec.params, 0.0, true)?;
    let alphas: Vec<f64> = spec.alpha_grid.iter().copied().filter(|&a| a > 0.0).collect();
    let runs: Vec<Result<Run>> = alphas.par_iter().map(|&a| run_alpha(&u0, &spec.params, a, true)).collect();

    let mut report = Report::default();
    report.runs.push((run_name("alpha", 0.0), reference.trajectory.clone()));
    let mut errors = Vec::new();
    for (&alpha, run) in alphas.iter().zip(runs) {
        let run = run?;
        if run.snapshots.len() != reference.snapshots.len()
            || run.snapshots.iter().zip(&reference.snapshots).any(|(a, b)| a.t != b.t)
        {
            return Err(Error::param(format!("alpha {alpha}: sample times differ from the alpha = 0 run")));
        }
        let e = run
            .snapshots
            .iter()
            .zip(&reference.snapshots)
            .map(|(a, b)| a.u.sub(&b.u).map(|d| spectral::sobolev_norm(&d, s)))
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        errors.push((alpha, e));
        report.runs.push((run_name("alpha", alpha), run.trajectory));
    }

    let mut table = Table::new(["alpha", "e_hs"]);
    for &(a, e) in &errors {
        table.push_floats(&[a, e])?;
    }
    report.table = table;
    report.notes.push(
        "E(alpha) for band-limited data: the cutoff tail vanishes, so the expected rate is alpha^2".into(),
    );

    let mut desc = errors.clone();
    desc.sort_by(|a, b| b.0.total_cmp(&a.0));
    let slack = spec.tolerances.monotone_slack;
    let worst = desc
        .windows(2)
        .map(|w| if w[0].1 > 0.0 { w[1].1 / w[0].1 } else if w[1].1 > 0.0 { f64::INFINITY } else { 0.0 })
        .fold(0.0, f64::max);
    report.checks.push(Check::new(
        "monotone",
        worst <= 1.0 + slack,
        worst,
        1.0 + slack,
        "largest E(smaller alpha)/E(larger alpha) over adjacent grid points",
    ));

    let all_zero = errors.iter().all(|&(_, e)| e == 0.0);
    let (lo, hi) = (spec.tolerances.slope_min, spec.tolerances.slope_max);
    let a_min = alphas.iter().copied().fold(f64::INFINITY, f64::min);
    let decade: Vec<(f64, f64)> =
        errors.iter().copied().filter(|&(a, _)| a <= 10.0 * a_min * (1.0 + 1e-12)).collect();
    if let InitialData::AlgebraicTail { .. } = spec.initial_data {
        // the rate then depends on the tail exponent; no band applies
        let slope = loglog_slope(&decade).unwrap_or(f64::NAN);
        report.notes.push(format!("algebraic-tail data: slope {slope:.4} on the smallest decade, not judged"));
    } else if all_zero {
        report.checks.push(Check::new("slope", true, f64::NAN, hi, "E vanishes identically"));
    } else {
        let slope = loglog_slope(&decade).unwrap_or(f64::NAN);
        report.checks.push(Check::new(
            "slope",
            slope >= lo && slope <= hi,
            slope,
            hi,
            format!("log-log slope of E over alpha in [{a_min}, {}], band [{lo}, {hi}]", 10.0 * a_min),
        ));
    }
    Ok(report)
}
