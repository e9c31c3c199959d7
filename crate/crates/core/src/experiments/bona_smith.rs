use rayon::prelude::*;

use super::{loglog_slope, run_alpha, Check, ExperimentKind, ExperimentSpec, Report};
use crate::error::{Error, Result};
use crate::io::report::{fmt_float, Table};
use crate::littlewood_paley::{build_lp_family, high_part, low_cutoff, median};
use crate::spectral::{self, VelocityField};

/// Splitting errors at time `T` for one cutoff index `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplittingRecord {
    pub n: i32,
    /// `‖ω_n^α(T)‖_{Hˢ}`, `ω_n^α = S^α(u₀) − S^α(S_n u₀)`.
    pub omega_alpha_hs: f64,
    /// `‖ω_n^α(T)‖_{H^{s−1}}`.
    pub omega_alpha_hs1: f64,
    /// `‖δ_n(T)‖_{Hˢ}`, `δ_n = S^α(S_n u₀) − S^0(S_n u₀)`.
    pub delta_hs: f64,
    /// `‖(Id − S_n)u₀‖_{Hˢ}`.
    pub tail: f64,
}

impl SplittingRecord {
    pub const COLUMNS: [&'static str; 5] = ["n", "omega_alpha_hs", "omega_alpha_hs1", "delta_hs", "tail"];
}

fn final_field(u0: &VelocityField, spec: &ExperimentSpec, alpha: f64) -> Result<VelocityField> {
    Ok(run_alpha(u0, &spec.params, alpha, false)?.final_state.u)
}

fn median_band(values: &[f64], factor: f64) -> (bool, f64) {
    let mut v = values.to_vec();
    let med = median(&mut v);
    let worst = values.iter().map(|&x| (x / med).max(med / x)).fold(0.0, f64::max);
    (med > 0.0 && worst <= factor, worst)
}

/// Splits `S^α(u₀)` against solutions launched from `S_n u₀` and checks
/// the tail, `2^{−n}` gain and α² bounds.
pub fn exp_bona_smith(spec: &ExperimentSpec) -> Result<Report> {
    if spec.kind != ExperimentKind::BonaSmith {
        return Err(Error::param("exp_bona_smith needs kind bona_smith"));
    }
    spec.validate()?;
    let fam = build_lp_family();
    let s = spec.params.s;
    let alpha = spec.params.alpha;
    let u0 = spec.initial_field()?;
    let norm0 = spectral::sobolev_norm(&u0, s);
    let u_alpha = final_field(&u0, spec, alpha)?;

    let mut report = Report::default();
    let mut skipped = Vec::new();
    let mut live = Vec::new();
    for &n in &spec.n_grid {
        let tail = spectral::sobolev_norm(&high_part(&u0, n, &fam)?, s);
        if tail <= 1e-14 * norm0 {
            skipped.push(n);
        } else {
            live.push((n, tail));
        }
    }

    let records: Vec<Result<SplittingRecord>> = live
        .par_iter()
        .map(|&(n, tail)| {
            let un0 = low_cutoff(&u0, n, &fam)?;
            let un = final_field(&un0, spec, alpha)?;
            let vn = final_field(&un0, spec, 0.0)?;
            let omega = u_alpha.sub(&un)?;
            let delta = un.sub(&vn)?;
            Ok(SplittingRecord {
                n,
                omega_alpha_hs: spectral::sobolev_norm(&omega, s),
                omega_alpha_hs1: spectral::sobolev_norm(&omega, s - 1.0),
                delta_hs: spectral::sobolev_norm(&delta, s),
                tail,
            })
        })
        .collect();
    let records = records.into_iter().collect::<Result<Vec<_>>>()?;

    let mut table = Table::new(SplittingRecord::COLUMNS);
    for r in &records {
        table.push(vec![
            r.n.to_string(),
            fmt_float(r.omega_alpha_hs),
            fmt_float(r.omega_alpha_hs1),
            fmt_float(r.delta_hs),
            fmt_float(r.tail),
        ])?;
    }
    report.table = table;
    if !skipped.is_empty() {
        report.notes.push(format!("n = {skipped:?} skipped: S_n u0 = u0 on this grid, so omega vanishes"));
    }

    let factor = spec.tolerances.median_factor;
    let ratio_a: Vec<f64> = records.iter().map(|r| r.omega_alpha_hs / r.tail).collect();
    let ratio_b: Vec<f64> =
        records.iter().map(|r| r.omega_alpha_hs1 / ((-(r.n as f64)).exp2() * r.tail)).collect();
    let mut ratios = Table::new(["n", "omega_hs_over_tail", "omega_hs1_over_gain_tail"]);
    for (r, (a, b)) in records.iter().zip(ratio_a.iter().zip(&ratio_b)) {
        ratios.push(vec![r.n.to_string(), fmt_float(*a), fmt_float(*b)])?;
    }
    report.extra_tables.push(("ratios".into(), ratios));

    let (pass_a, worst_a) = median_band(&ratio_a, factor);
    report.checks.push(Check::new(
        "omega_hs_over_tail",
        pass_a,
        worst_a,
        factor,
        "largest deviation from the median of |omega|_Hs / tail(n)",
    ));
    let (pass_b, worst_b) = median_band(&ratio_b, factor);
    report.checks.push(Check::new(
        "omega_hs1_gain",
        pass_b,
        worst_b,
        factor,
        "largest deviation from the median of |omega|_Hs-1 / (2^-n tail(n))",
    ));

    // δ_n against α at fixed n
    let dn = spec.bona_smith.delta_n;
    let un0 = low_cutoff(&u0, dn, &fam)?;
    let vn = final_field(&un0, spec, 0.0)?;
    let deltas: Vec<Result<(f64, f64)>> = spec
        .bona_smith
        .delta_alpha_grid
        .par_iter()
        .map(|&a| {
            let un = final_field(&un0, spec, a)?;
            Ok((a, spectral::sobolev_norm(&un.sub(&vn)?, s)))
        })
        .collect();
    let deltas = deltas.into_iter().collect::<Result<Vec<_>>>()?;
    let mut dt = Table::new(["alpha", "delta_hs"]);
    for &(a, d) in &deltas {
        dt.push_floats(&[a, d])?;
    }
    report.extra_tables.push(("delta_alpha".into(), dt));
    let slope = loglog_slope(&deltas).unwrap_or(f64::NAN);
    let (lo, hi) = (spec.tolerances.slope_min, spec.tolerances.slope_max);
    report.checks.push(Check::new(
        "delta_alpha_slope",
        slope >= lo && slope <= hi,
        slope,
        hi,
        format!("log-log slope of |delta_n|_Hs against alpha at n = {dn}, band [{lo}, {hi}]"),
    ));
    Ok(report)
}
