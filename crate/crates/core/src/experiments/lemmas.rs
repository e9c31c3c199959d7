use rayon::prelude::*;

use super::{spread, Check, ExperimentKind, ExperimentSpec, Report};
use crate::dynamics::{commutator_pairing, convexity_pairing};
use crate::error::{Error, Result};
use crate::initial::bandlimited;
use crate::io::report::{fmt_float, Table};
use crate::littlewood_paley::{
    besov_sobolev_equivalence, verify_bernstein, verify_interpolation, verify_product, VerifierReport,
};
use crate::spectral::{self, TorusGrid, VelocityField};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Lemma {
    /// `‖[Λˢ_α, v·∇]u‖ ≤ C(‖∇v‖_∞‖u‖_{Hˢ} + ‖∇v‖_{H^{s−1}}‖∇u‖_∞)`.
    Commutator,
    /// `‖[Λˢ_α, v·∇]u‖ ≤ C‖∇v‖_{L^∞∩H^{d/2}}‖u‖_{Hˢ}` for `s < 1 + d/2`.
    CommutatorLow,
    /// `|⟨Λˢ_α N(u,u), Λˢu⟩| ≤ C‖∇u‖_∞‖u‖²_{Hˢ}`.
    Convexity,
    /// The two-field form with independent `(v, u)`; reported, not judged.
    ConvexityMixed,
}

impl Lemma {
    const ALL: [Lemma; 4] = [Lemma::Commutator, Lemma::CommutatorLow, Lemma::Convexity, Lemma::ConvexityMixed];

    fn name(self) -> &'static str {
        match self {
            Lemma::Commutator => "commutator",
            Lemma::CommutatorLow => "commutator_low",
            Lemma::Convexity => "convexity",
            Lemma::ConvexityMixed => "convexity_mixed",
        }
    }

    fn judged(self) -> bool {
        self != Lemma::ConvexityMixed
    }
}

/// `‖∇v‖_{H^σ}`.
fn grad_norm(v: &VelocityField, sigma: f64) -> f64 {
    spectral::weighted_energy(v.grid(), &v.raw_spectra(), |k2| k2 * (1.0 + k2).powf(sigma)).sqrt()
}

fn evaluate(lemma: Lemma, v: &VelocityField, u: &VelocityField, s: f64, s_low: f64, alpha: f64) -> Result<(f64, f64)> {
    let d = u.dim() as f64;
    Ok(match lemma {
        Lemma::Commutator => {
            let lhs = commutator_pairing(v, u, s, alpha)?;
            let rhs = spectral::linf_grad(v) * spectral::sobolev_norm(u, s)
                + grad_norm(v, s - 1.0) * spectral::linf_grad(u);
            (lhs, rhs)
        }
        Lemma::CommutatorLow => {
            let lhs = commutator_pairing(v, u, s_low, alpha)?;
            let rhs = (spectral::linf_grad(v) + grad_norm(v, d / 2.0)) * spectral::sobolev_norm(u, s_low);
            (lhs, rhs)
        }
        Lemma::Convexity => {
            let lhs = convexity_pairing(u, u, s, alpha)?.abs();
            let hs = spectral::sobolev_norm(u, s);
            (lhs, spectral::linf_grad(u) * hs * hs)
        }
        Lemma::ConvexityMixed => {
            let lhs = convexity_pairing(v, u, s, alpha)?.abs();
            let hs = spectral::sobolev_norm(u, s);
            let gv = spectral::linf_grad(v) + grad_norm(v, d / 2.0) + grad_norm(v, s - 1.0);
            (lhs, (gv * hs + grad_norm(v, s) * spectral::linf_norm(u)) * hs)
        }
    })
}

struct Sample {
    lemma: Lemma,
    n: usize,
    alpha: f64,
    trial: usize,
    lhs: f64,
    rhs: f64,
}

/// `max` that keeps a `NaN` from either side.
fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

fn pair_seed(seed: u64, trial: usize, which: u64) -> u64 {
    seed.wrapping_mul(0x2545_f491_4f6c_dd1d).wrapping_add(2 * trial as u64 + which)
}

fn verifier_table(r: &VerifierReport) -> Table {
    let mut t = Table::new(["n", "trial", "lhs", "rhs", "ratio"]);
    for (n, rows) in &r.rows {
        for row in rows {
            t.rows.push(vec![
                n.to_string(),
                row.trial.to_string(),
                fmt_float(row.lhs),
                fmt_float(row.rhs),
                fmt_float(row.ratio),
            ]);
        }
    }
    t
}

/// Commutator and convexity ratios over α and two resolutions, plus the
/// Bernstein, interpolation and product verifiers.
pub fn exp_lemma_suite(spec: &ExperimentSpec) -> Result<Report> {
    if spec.kind != ExperimentKind::LemmaSuite {
        return Err(Error::param("exp_lemma_suite needs kind lemma_suite"));
    }
    spec.validate()?;
    let opts = &spec.lemma;
    let s = spec.params.s;
    let resolutions = [spec.grid.n(), 2 * spec.grid.n()];

    let mut samples = Vec::new();
    for &n in &resolutions {
        let grid = TorusGrid::new(spec.grid.dim(), n, spec.grid.length())?;
        let pairs: Vec<Result<Vec<Sample>>> = (0..opts.trials)
            .into_par_iter()
            .map(|trial| {
                let u = bandlimited(&grid, opts.k_max, pair_seed(spec.seed, trial, 0))?;
                let v = bandlimited(&grid, opts.k_max, pair_seed(spec.seed, trial, 1))?;
                let mut out = Vec::new();
                for lemma in Lemma::ALL {
                    for &alpha in &spec.alpha_grid {
                        let (lhs, rhs) = evaluate(lemma, &v, &u, s, opts.s_low, alpha)?;
                        out.push(Sample { lemma, n, alpha, trial, lhs, rhs });
                    }
                }
                Ok(out)
            })
            .collect();
        for p in pairs {
            samples.extend(p?);
        }
    }

    let mut rows = Table::new(["lemma", "n", "alpha", "trial", "lhs", "rhs", "ratio"]);
    for x in &samples {
        rows.push(vec![
            x.lemma.name().into(),
            x.n.to_string(),
            fmt_float(x.alpha),
            x.trial.to_string(),
            fmt_float(x.lhs),
            fmt_float(x.rhs),
            fmt_float(x.lhs / x.rhs),
        ])?;
    }

    let max_ratio = |lemma: Lemma, n: usize, alpha: f64| {
        samples
            .iter()
            .filter(|x| x.lemma == lemma && x.n == n && x.alpha == alpha)
            .map(|x| x.lhs / x.rhs)
            .fold(0.0, f64::max)
    };

    let mut report = Report::default();
    let mut summary = Table::new(["lemma", "n", "alpha", "max_ratio"]);
    let tol = &spec.tolerances;
    for lemma in Lemma::ALL {
        let mut alpha_spread = 0.0f64;
        let mut res_spread = 0.0f64;
        for &n in &resolutions {
            let maxima: Vec<f64> = spec.alpha_grid.iter().map(|&a| max_ratio(lemma, n, a)).collect();
            for (&a, &m) in spec.alpha_grid.iter().zip(&maxima) {
                summary.push(vec![lemma.name().into(), n.to_string(), fmt_float(a), fmt_float(m)])?;
            }
            alpha_spread = nan_max(alpha_spread, spread(maxima.iter().copied()));
        }
        for &a in &spec.alpha_grid {
            let r = spread(resolutions.iter().map(|&n| max_ratio(lemma, n, a)));
            res_spread = nan_max(res_spread, r);
        }
        if !lemma.judged() {
            report.notes.push(format!(
                "{}: derived two-field case, alpha spread {alpha_spread:.3}, resolution spread {res_spread:.3}",
                lemma.name()
            ));
            continue;
        }
        report.checks.push(Check::new(
            format!("{}_alpha_stable", lemma.name()),
            alpha_spread < tol.alpha_stability,
            alpha_spread,
            tol.alpha_stability,
            "max/min across alpha of the per-alpha max ratio",
        ));
        report.checks.push(Check::new(
            format!("{}_resolution_stable", lemma.name()),
            res_spread < tol.resolution_stability,
            res_spread,
            tol.resolution_stability,
            format!("ratio of max ratios between n = {} and n = {}", resolutions[0], resolutions[1]),
        ));
    }
    report.table = summary;
    report.extra_tables.push(("lemma_rows".into(), rows));

    let verifiers = [
        verify_bernstein(opts.verifier_trials, spec.seed)?,
        verify_interpolation(opts.verifier_trials, spec.seed)?,
        verify_product(opts.verifier_trials, spec.seed)?,
    ];
    for v in &verifiers {
        report.checks.push(Check::new(
            format!("{}_budget", v.name),
            v.pass(),
            v.max_ratio(),
            v.budget.1,
            format!("ratios in [{:.6}, {:.6}], median {:.6}", v.min_ratio(), v.max_ratio(), v.median_ratio()),
        ));
        report.extra_tables.push((format!("verify_{}", v.name), verifier_table(v)));
    }

    let (lo, hi) = besov_sobolev_equivalence(&spec.grid, s, opts.trials, spec.seed)?;
    report.notes.push(format!("B^s_22 / H^s equivalence at s = {s}: ratio in [{lo:.6}, {hi:.6}]"));
    Ok(report)
}
