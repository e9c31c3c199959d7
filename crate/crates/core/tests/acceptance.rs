//! Acceptance criteria 1 to 8. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use eplab::dynamics::{bilinear_m, bilinear_n, energy_kinetic, energy_l2, rhs_ep0, rhs_ep_alpha, Dealias, EpState};
use eplab::experiments::{run_experiment, ExperimentKind, ExperimentSpec, Report};
use eplab::initial::{bandlimited, normalize_hs};
use eplab::integrate::{integrate, Model, RunOptions, SimParams};
use eplab::io::config::Config;
use eplab::io::report::{read_report_csv, write_report_csv, Table};
use eplab::io::snapshot;
use eplab::spectral::{
    apply_multiplier, dealias_field, divergence, gradient, helmholtz_inverse, jacobian, lambda_s, ScalarField,
    TorusGrid, VelocityField,
};

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self { pass, detail: detail.into() }
    }
}

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn spec_from(name: &str, kind: ExperimentKind, edit: impl FnOnce(&mut Config)) -> ExperimentSpec {
    let text = fs::read_to_string(root().join("configs").join(name)).expect("config file");
    let mut cfg = Config::parse(&text).expect("config parses");
    edit(&mut cfg);
    cfg.to_spec(kind, None).expect("valid config")
}

fn max_abs(u: &VelocityField) -> f64 {
    u.components().iter().flatten().fold(0.0, |m, x| m.max(x.abs()))
}

fn rel_max(a: &VelocityField, b: &VelocityField) -> f64 {
    max_abs(&a.sub(b).unwrap()) / max_abs(b).max(f64::MIN_POSITIVE)
}

fn rel_l2(a: &VelocityField, b: &VelocityField) -> f64 {
    energy_l2(&a.sub(b).unwrap()).sqrt() / energy_l2(b).sqrt().max(f64::MIN_POSITIVE)
}

fn summarize(r: &Report) -> String {
    r.checks
        .iter()
        .map(|c| format!("{}{}={:.4}", if c.pass { "" } else { "!" }, c.name, c.value))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Random trigonometric field with its exact gradient.
struct TrigField {
    modes: Vec<([f64; 2], usize, f64, f64)>,
}

impl TrigField {
    fn random(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let modes = (0..8)
            .map(|_| {
                let k = [rng.gen_range(-12..=12) as f64, rng.gen_range(-12..=12) as f64];
                (k, rng.gen_range(0..2), rng.gen_range(-1.0..1.0), rng.gen_range(0.0..std::f64::consts::TAU))
            })
            .collect();
        Self { modes }
    }

    fn sample(&self, grid: TorusGrid) -> (VelocityField, [VelocityField; 2]) {
        let value = VelocityField::from_fn(grid, |x, out| {
            out.fill(0.0);
            for &(k, c, a, ph) in &self.modes {
                out[c] += a * (k[0] * x[0] + k[1] * x[1] + ph).cos();
            }
        });
        let d = |axis: usize| {
            VelocityField::from_fn(grid, |x, out| {
                out.fill(0.0);
                for &(k, c, a, ph) in &self.modes {
                    out[c] -= a * k[axis] * (k[0] * x[0] + k[1] * x[1] + ph).sin();
                }
            })
        };
        (value, [d(0), d(1)])
    }
}

fn criterion_spectral_algebra() -> Outcome {
    let grid = TorusGrid::standard(2, 64).unwrap();
    let (mut comp, mut inv, mut pars, mut der) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for seed in 0..100u64 {
        let (u, grad) = TrigField::random(seed).sample(grid);
        let m1 = |k: &[f64]| (1.0 + k[0] * k[0] + k[1] * k[1]).powf(0.7);
        let m2 = |k: &[f64]| 1.0 / (1.0 + 0.3 * k[0] * k[0] + 2.0 * k[1] * k[1]);
        let twice = apply_multiplier(&apply_multiplier(&u, m1).unwrap(), m2).unwrap();
        let once = apply_multiplier(&u, |k| m1(k) * m2(k)).unwrap();
        comp = comp.max(rel_max(&twice, &once));

        let s = 0.5 + 3.0 * (seed as f64) / 100.0;
        inv = inv.max(rel_max(&lambda_s(&lambda_s(&u, s), -s), &u));

        let physical: f64 = u.components().iter().flatten().map(|x| x * x).sum::<f64>() * grid.cell_volume();
        pars = pars.max((physical - energy_l2(&u)).abs() / physical);

        let jac = jacobian(&u);
        for (axis, exact) in grad.iter().enumerate() {
            let spectral = VelocityField::new(grid, (0..2).map(|i| jac.entry(i, axis).to_vec()).collect()).unwrap();
            der = der.max(rel_max(&spectral, exact));
        }
    }
    let worst = comp.max(inv).max(pars).max(der);
    Outcome::new(
        worst < 1e-12,
        format!("composition {comp:.2e}, inverse {inv:.2e}, parseval {pars:.2e}, derivative {der:.2e}"),
    )
}

/// `−P div(u⊗u) − ½P∇|u|²` with `P` the two-thirds projection.
fn conservation_form(u: &VelocityField) -> VelocityField {
    let grid = *u.grid();
    let d = u.dim();
    let rows: Vec<Vec<f64>> = (0..d)
        .map(|i| {
            let flux: Vec<Vec<f64>> = (0..d)
                .map(|j| u.component(i).iter().zip(u.component(j)).map(|(a, b)| a * b).collect())
                .collect();
            let flux = dealias_field(&VelocityField::new(grid, flux).unwrap());
            divergence(&flux).into_samples()
        })
        .collect();
    let half_sq: Vec<f64> =
        (0..grid.len()).map(|p| 0.5 * (0..d).map(|i| u.component(i)[p].powi(2)).sum::<f64>()).collect();
    let pressure = dealias_field(&gradient(&ScalarField::new(grid, half_sq).unwrap()));
    VelocityField::new(grid, rows).unwrap().add(&pressure).unwrap().scale(-1.0)
}

/// `−P(u u_x) − ∂_x(1−α²∂²)⁻¹P(u² + ½α²u_x²)`.
fn camassa_holm(u: &VelocityField, alpha: f64) -> VelocityField {
    let grid = *u.grid();
    let ux = jacobian(u).entry(0, 0).to_vec();
    let v = u.component(0);
    let adv: Vec<f64> = v.iter().zip(&ux).map(|(a, b)| a * b).collect();
    let adv = dealias_field(&VelocityField::new(grid, vec![adv]).unwrap());
    let q: Vec<f64> = v.iter().zip(&ux).map(|(a, b)| a * a + 0.5 * alpha * alpha * b * b).collect();
    let flux = dealias_field(&gradient(&ScalarField::new(grid, q).unwrap()));
    adv.add(&helmholtz_inverse(&flux, alpha).unwrap()).unwrap().scale(-1.0)
}

fn criterion_model_identities() -> Outcome {
    let mut symmetric = true;
    for (d, n) in [(2, 64), (3, 16)] {
        let g = TorusGrid::standard(d, n).unwrap();
        for seed in 0..10 {
            let u = bandlimited(&g, 4, 2 * seed).unwrap();
            let v = bandlimited(&g, 4, 2 * seed + 1).unwrap();
            symmetric &= bilinear_m(&u, &v).unwrap() == bilinear_m(&v, &u).unwrap();
            symmetric &= bilinear_n(&u, &v).unwrap() == bilinear_n(&v, &u).unwrap();
        }
    }

    let mut cons = 0.0f64;
    for (d, n, k) in [(2, 64, 8), (3, 24, 4)] {
        let g = TorusGrid::standard(d, n).unwrap();
        for seed in 0..5 {
            let u = bandlimited(&g, k, 100 + seed).unwrap();
            cons = cons.max(rel_l2(&conservation_form(&u), &rhs_ep0(&u)));
        }
    }

    let mut ch = 0.0f64;
    let g1 = TorusGrid::standard(1, 128).unwrap();
    for seed in 0..5 {
        let u = bandlimited(&g1, 20, 200 + seed).unwrap();
        for alpha in [0.0, 0.25, 1.0] {
            let ep = rhs_ep_alpha(&EpState::new(u.clone(), 0.0, alpha).unwrap(), Dealias::TwoThirds).unwrap();
            ch = ch.max(rel_l2(&ep, &camassa_holm(&u, alpha)));
        }
    }
    Outcome::new(
        symmetric && cons < 1e-11 && ch < 1e-10,
        format!("symmetry exact {symmetric}, conservation form {cons:.2e}, 1-d reduction {ch:.2e}"),
    )
}

fn criterion_conservation() -> Outcome {
    let grid = TorusGrid::standard(2, 64).unwrap();
    let mut params = SimParams::defaults_for(2);
    params.t_end = 0.5;
    params.sample_every = 5;
    let mut worst = 0.0f64;
    let mut parts = Vec::new();
    for (seed, alpha) in [(1u64, 0.0), (2, 0.25), (3, 1.0)] {
        let u0 = normalize_hs(&bandlimited(&grid, 4, seed).unwrap(), params.s, 1.0).unwrap();
        let model = if alpha == 0.0 { Model::Ep0 } else { Model::ep_alpha(alpha) };
        let run = integrate(&u0, &params, &model, RunOptions { keep_snapshots: true }).unwrap();
        let energy = |u: &VelocityField| if alpha == 0.0 { energy_l2(u) } else { energy_kinetic(u, alpha) };
        let e0 = energy(&u0);
        let drift = run.snapshots.iter().map(|st| (energy(&st.u) - e0).abs() / e0).fold(0.0, f64::max);
        worst = worst.max(drift);
        parts.push(format!("alpha {alpha}: {drift:.2e}"));
    }
    Outcome::new(worst < 1e-8, format!("relative drift {}", parts.join(", ")))
}

fn criterion_uniform_time() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for n in [64, 128] {
        let spec = spec_from("uniform_time.json", ExperimentKind::UniformTime, |c| c.grid.n = n);
        let r = run_experiment(&spec).unwrap();
        pass &= r.pass();
        parts.push(format!("n={n}: {}", summarize(&r)));
    }
    Outcome::new(pass, parts.join("; "))
}

fn criterion_zero_alpha() -> Outcome {
    let spec = spec_from("zero_alpha.json", ExperimentKind::ZeroAlpha, |_| {});
    let r = run_experiment(&spec).unwrap();
    let oracle_spec = spec_from("zero_alpha.json", ExperimentKind::ZeroAlpha, |c| {
        c.grid.n *= 2;
        c.params.dt_max = Some(c.params.dt_max.unwrap_or(1e-2) / 2.0);
        c.params.sample_every = Some(2 * c.params.sample_every.unwrap_or(10));
    });
    let oracle = run_experiment(&oracle_spec).unwrap();
    let e = r.table.float_column("e_hs").unwrap();
    let eo = oracle.table.float_column("e_hs").unwrap();
    let agree = e
        .iter()
        .zip(&eo)
        .map(|(a, b)| (a.unwrap() - b.unwrap()).abs() / b.unwrap())
        .fold(0.0, f64::max);
    Outcome::new(
        r.pass() && oracle.pass() && agree < 1e-2,
        format!("{}; oracle n=128 dt/2: {}, max relative E difference {agree:.2e}", summarize(&r), summarize(&oracle)),
    )
}

fn criterion_bona_smith() -> Outcome {
    let r = run_experiment(&spec_from("bona_smith.json", ExperimentKind::BonaSmith, |_| {})).unwrap();
    Outcome::new(r.pass(), summarize(&r))
}

fn criterion_lemma_suite() -> Outcome {
    let r = run_experiment(&spec_from("lemma_suite.json", ExperimentKind::LemmaSuite, |_| {})).unwrap();
    Outcome::new(r.pass(), summarize(&r))
}

fn run_cli(args: &[&str]) -> i32 {
    let argv: Vec<String> = std::iter::once("eplab").chain(args.iter().copied()).map(String::from).collect();
    eplab::cli::cli_main(argv)
}

fn files_under(dir: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).unwrap() {
        let p = entry.unwrap().path();
        if p.is_dir() {
            out.extend(files_under(&p));
        } else {
            out.push(p);
        }
    }
    out.sort();
    out
}

fn criterion_operational() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let mut notes = Vec::new();

    let mut codes = Vec::new();
    for s in [1.0, 2.0] {
        let cfg = tmp.path().join(format!("bad_s{s}.json"));
        let text = fs::read_to_string(root().join("configs/simulate.json")).unwrap();
        let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
        v["params"]["s"] = serde_json::json!(s);
        fs::write(&cfg, v.to_string()).unwrap();
        let out = tmp.path().join("bad_out");
        codes.push(run_cli(&["simulate", "--quiet", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]));
    }
    let validation = codes.iter().all(|&c| c == 3);
    notes.push(format!("exit codes for s in {{1, 2}}: {codes:?}"));

    let golden = fs::read(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/golden_d2_n8.epf")).unwrap();
    let g = TorusGrid::standard(2, 8).unwrap();
    let c0: Vec<f64> = (0..64).map(|p| p as f64 / 64.0 - 0.5).collect();
    let c1: Vec<f64> = (0..64).map(|p| ((7 * p) % 64) as f64 / 8.0 - 3.0).collect();
    let u = VelocityField::new(g, vec![c0, c1]).unwrap();
    let decoded = snapshot::decode(&golden).unwrap();
    let golden_ok = snapshot::encode(&u, 0.5, 0.25) == golden
        && decoded.field == u
        && decoded.header.time == 0.5
        && decoded.header.alpha == 0.25;
    notes.push(format!("golden snapshot {}", if golden_ok { "byte-exact" } else { "differs" }));

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut table = Table::new(["a", "b"]);
    let mut values = vec![
        [1.0 / 3.0, -0.0],
        [f64::MIN_POSITIVE / 7.0, f64::MAX],
        [std::f64::consts::PI, -1e-300],
    ];
    values.extend((0..200).map(|_| [rng.gen::<f64>() * 1e6 - 5e5, f64::from_bits(rng.gen_range(0..0x7fe0_0000_0000_0000))]));
    for v in &values {
        table.push_floats(v).unwrap();
    }
    let csv_path = tmp.path().join("roundtrip.csv");
    write_report_csv(&table, &csv_path).unwrap();
    let back = read_report_csv(&csv_path).unwrap();
    let a = back.float_column("a").unwrap();
    let b = back.float_column("b").unwrap();
    let csv_ok = values
        .iter()
        .zip(a.iter().zip(&b))
        .all(|(v, (x, y))| x.map(f64::to_bits) == Some(v[0].to_bits()) && y.map(f64::to_bits) == Some(v[1].to_bits()));
    notes.push(format!("csv round-trip of {} rows {}", values.len(), if csv_ok { "bit-exact" } else { "lossy" }));

    let cfg = root().join("configs/simulate.json");
    let outs = [tmp.path().join("run_a"), tmp.path().join("run_b")];
    let rerun_codes: Vec<i32> = outs
        .iter()
        .map(|o| run_cli(&["simulate", "--quiet", "--config", cfg.to_str().unwrap(), "--out", o.to_str().unwrap()]))
        .collect();
    let fa = files_under(&outs[0]);
    let fb = files_under(&outs[1]);
    let mut compared = 0;
    let mut identical = fa.len() == fb.len() && !fa.is_empty();
    for (x, y) in fa.iter().zip(&fb) {
        if x.file_name().is_some_and(|n| n == "manifest.json") {
            continue;
        }
        identical &= x.strip_prefix(&outs[0]).ok() == y.strip_prefix(&outs[1]).ok();
        identical &= fs::read(x).unwrap() == fs::read(y).unwrap();
        compared += 1;
    }
    let rerun_ok = rerun_codes == [0, 0] && identical;
    notes.push(format!("rerun: {compared} output files {}", if identical { "identical" } else { "differ" }));

    Outcome::new(validation && golden_ok && csv_ok && rerun_ok, notes.join(", "))
}

fn main() {
    let criteria: [(&str, Duration, fn() -> Outcome); 8] = [
        ("spectral algebra", Duration::from_secs(10), criterion_spectral_algebra),
        ("model identities", Duration::from_secs(30), criterion_model_identities),
        ("conservation", Duration::from_secs(120), criterion_conservation),
        ("uniform existence time", Duration::from_secs(600), criterion_uniform_time),
        ("zero-alpha rate", Duration::from_secs(600), criterion_zero_alpha),
        ("bona-smith bounds", Duration::from_secs(600), criterion_bona_smith),
        ("lemma suite", Duration::from_secs(300), criterion_lemma_suite),
        ("operational shell", Duration::from_secs(10), criterion_operational),
    ];
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let pass = outcome.pass && elapsed < budget;
        if !pass {
            failed += 1;
        }
        println!(
            "{} {} {name}: {} [{:.1} s of {} s]",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            outcome.detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("acceptance: {} of 8 criteria passed", 8 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
