//! Littlewood–Paley cutoffs, dyadic blocks, low-frequency truncation and
//! `B^s_{2,r}` norms.

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{self, TorusGrid, VelocityField};

const INNER: f64 = 3.0 / 4.0;
const OUTER: f64 = 4.0 / 3.0;

/// `g(t) = e^{−1/t}` for `t > 0`, else 0.
fn bump_edge(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// The radial cutoff pair `χ`, `φ(r) = χ(r/2) − χ(r)`.
///
/// `χ ≡ 1` on `[0, 3/4]`, `χ ≡ 0` on `[4/3, ∞)` and in between follows the
/// smooth step `g(1−t)/(g(t)+g(1−t))` with `t` the rescaled radius.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LpFamily;

pub fn build_lp_family() -> LpFamily {
    LpFamily
}

impl LpFamily {
    pub fn chi(&self, r: f64) -> f64 {
        if r <= INNER {
            return 1.0;
        }
        if r >= OUTER {
            return 0.0;
        }
        let t = (r - INNER) / (OUTER - INNER);
        let a = bump_edge(1.0 - t);
        let b = bump_edge(t);
        a / (a + b)
    }

    pub fn phi(&self, r: f64) -> f64 {
        self.chi(0.5 * r) - self.chi(r)
    }

    /// Radial profile of `Δ_j`; zero for `j < −1`.
    pub fn block_profile(&self, j: i32, r: f64) -> f64 {
        match j {
            j if j < -1 => 0.0,
            -1 => self.chi(r),
            j => self.phi(r * (-(j as f64)).exp2()),
        }
    }

    /// Radial profile of `S_n`, `χ(2^{−n} r)`.
    pub fn cutoff_profile(&self, n: i32, r: f64) -> f64 {
        self.chi(r * (-(n as f64)).exp2())
    }

    /// Largest dyadic index whose block can be nonzero on `grid`:
    /// `⌈log₂(R·4/3)⌉` with `R` the largest wavenumber magnitude on the grid.
    pub fn j_max(&self, grid: &TorusGrid) -> i32 {
        let nyquist = grid.fundamental() * (grid.n() / 2) as f64 * (grid.dim() as f64).sqrt();
        (nyquist * OUTER).log2().ceil() as i32
    }
}

fn apply_radial(u: &VelocityField, profile: impl Fn(f64) -> f64) -> VelocityField {
    let grid = *u.grid();
    let mut spectra = u.raw_spectra();
    spectral::scale_by_k2(&grid, &mut spectra, |k2| profile(k2.sqrt()));
    VelocityField::from_raw_spectra(grid, &spectra)
}

/// `Δ_j u`; the zero field for `j < −1`.
pub fn dyadic_block(u: &VelocityField, j: i32, fam: &LpFamily) -> VelocityField {
    if j < -1 {
        return VelocityField::zeros(*u.grid());
    }
    apply_radial(u, |r| fam.block_profile(j, r))
}

/// `S_n u`, applied as the single multiplier `χ(2^{−n}|ξ|)`.
pub fn low_cutoff(u: &VelocityField, n: i32, fam: &LpFamily) -> Result<VelocityField> {
    if n < 0 {
        return Err(Error::param(format!("cutoff index must be >= 0, got {n}")));
    }
    Ok(apply_radial(u, |r| fam.cutoff_profile(n, r)))
}

/// `(Id − S_n) u`.
pub fn high_part(u: &VelocityField, n: i32, fam: &LpFamily) -> Result<VelocityField> {
    if n < 0 {
        return Err(Error::param(format!("cutoff index must be >= 0, got {n}")));
    }
    Ok(apply_radial(u, |r| 1.0 - fam.cutoff_profile(n, r)))
}

/// `‖Δ_j u‖_{L²}` for `j = −1..=j_max`, computed directly from the spectrum.
pub fn block_norms(u: &VelocityField, fam: &LpFamily) -> Vec<f64> {
    block_norms_spectra(u.grid(), &u.raw_spectra(), fam)
}

pub(crate) fn block_norms_spectra(
    grid: &TorusGrid,
    spectra: &[Vec<Complex64>],
    fam: &LpFamily,
) -> Vec<f64> {
    (-1..=fam.j_max(grid))
        .map(|j| {
            spectral::weighted_energy(grid, spectra, |k2| fam.block_profile(j, k2.sqrt()).powi(2))
                .sqrt()
        })
        .collect()
}

/// Summability index of a Besov norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BesovIndex {
    Finite(f64),
    Infinity,
}

impl BesovIndex {
    pub fn new(r: f64) -> Result<Self> {
        if r == f64::INFINITY {
            Ok(BesovIndex::Infinity)
        } else if r.is_finite() && r >= 1.0 {
            Ok(BesovIndex::Finite(r))
        } else {
            Err(Error::param(format!("Besov summability index must be >= 1, got {r}")))
        }
    }
}

/// `‖u‖_{B^s_{2,r}} = ‖(2^{js}‖Δ_j u‖_{L²})_{j ≥ −1}‖_{ℓ^r}`.
pub fn besov_norm(u: &VelocityField, s: f64, r: f64, fam: &LpFamily) -> Result<f64> {
    let index = BesovIndex::new(r)?;
    Ok(besov_from_blocks(&block_norms(u, fam), s, index))
}

pub(crate) fn besov_from_blocks(blocks: &[f64], s: f64, r: BesovIndex) -> f64 {
    let weighted = blocks.iter().enumerate().map(|(i, b)| (s * (i as f64 - 1.0)).exp2() * b);
    match r {
        BesovIndex::Infinity => weighted.fold(0.0, f64::max),
        BesovIndex::Finite(r) => weighted.map(|x| x.powf(r)).sum::<f64>().powf(1.0 / r),
    }
}

/// Grid sizes every verifier runs on.
pub const VERIFIER_RESOLUTIONS: [usize; 3] = [32, 64, 128];

/// One inequality evaluation; `ratio = lhs / rhs` with constants stripped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifierRow {
    pub trial: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

impl VerifierRow {
    pub const COLUMNS: [&'static str; 4] = ["trial", "lhs", "rhs", "ratio"];

    fn new(trial: usize, lhs: f64, rhs: f64) -> Self {
        Self { trial, lhs, rhs, ratio: lhs / rhs }
    }
}

/// Result of one verifier over all grid sizes.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifierReport {
    pub name: &'static str,
    /// Rows per grid size, in the order of [`VERIFIER_RESOLUTIONS`].
    pub rows: Vec<(usize, Vec<VerifierRow>)>,
    /// Admissible ratio interval.
    pub budget: (f64, f64),
}

impl VerifierReport {
    fn ratios(&self) -> impl Iterator<Item = f64> + '_ {
        self.rows.iter().flat_map(|(_, r)| r.iter().map(|x| x.ratio))
    }

    pub fn max_ratio(&self) -> f64 {
        self.ratios().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_ratio(&self) -> f64 {
        self.ratios().fold(f64::INFINITY, f64::min)
    }

    pub fn median_ratio(&self) -> f64 {
        let mut v: Vec<f64> = self.ratios().collect();
        median(&mut v)
    }

    pub fn pass(&self) -> bool {
        let (lo, hi) = self.budget;
        self.ratios().count() > 0 && self.ratios().all(|r| r.is_finite() && r >= lo && r <= hi)
    }
}

pub(crate) fn median(v: &mut [f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

fn trial_seed(seed: u64, trial: usize) -> u64 {
    seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(trial as u64)
}

fn run_verifier(
    name: &'static str,
    trials: usize,
    budget: (f64, f64),
    per_trial: impl Fn(&TorusGrid, usize) -> Result<Vec<VerifierRow>>,
) -> Result<VerifierReport> {
    if trials == 0 {
        return Err(Error::param("trials must be at least 1"));
    }
    let mut rows = Vec::new();
    for n in VERIFIER_RESOLUTIONS {
        let grid = TorusGrid::standard(2, n)?;
        let mut r = Vec::new();
        for t in 0..trials {
            r.extend(per_trial(&grid, t)?);
        }
        rows.push((n, r));
    }
    Ok(VerifierReport { name, rows, budget })
}

const VERIFIER_K_MAX: usize = 10;

/// Bernstein on single dyadic blocks: `‖∇Δ_j u‖ / (2^j·(2π/L)·‖Δ_j u‖)` must
/// lie in `[3/4, 8/3]` for `j ≥ 0`.
pub fn verify_bernstein(trials: usize, seed: u64) -> Result<VerifierReport> {
    let fam = build_lp_family();
    run_verifier("bernstein", trials, (INNER, 2.0 * OUTER), |grid, t| {
        let u = crate::initial::bandlimited(grid, VERIFIER_K_MAX, trial_seed(seed, t))?;
        let mut rows = Vec::new();
        for j in 0..=fam.j_max(grid) {
            let b = dyadic_block(&u, j, &fam);
            let l2 = spectral::sobolev_norm(&b, 0.0);
            if l2 <= 1e-12 * spectral::sobolev_norm(&u, 0.0) {
                continue;
            }
            let grad = spectral::weighted_energy(grid, &b.raw_spectra(), |k2| k2).sqrt();
            rows.push(VerifierRow::new(t, grad, (j as f64).exp2() * grid.fundamental() * l2));
        }
        Ok(rows)
    })
}

/// Interpolation at `θ = 1/2`, `s₁ = 0`, `s₂ = 2`, in two forms per trial:
/// `‖u‖_{H¹} ≤ ‖u‖_{L²}^{1/2}‖u‖_{H²}^{1/2}` (row `2t`), and
/// `‖u‖_{B¹_{2,1}} ≤ K‖u‖_{B⁰_{2,∞}}^{1/2}‖u‖_{B²_{2,∞}}^{1/2}` (row `2t+1`)
/// with `K = 1/(1−2^{−θ(s₂−s₁)}) + 1/(1−2^{−(1−θ)(s₂−s₁)}) = 4` folded into
/// the right side. Both ratios are at most 1.
pub fn verify_interpolation(trials: usize, seed: u64) -> Result<VerifierReport> {
    let fam = build_lp_family();
    let (s1, s2, theta) = (0.0, 2.0, 0.5);
    let s = theta * s1 + (1.0 - theta) * s2;
    let geometric = |a: f64| 1.0 / (1.0 - (-a).exp2());
    let k = geometric(theta * (s2 - s1)) + geometric((1.0 - theta) * (s2 - s1));
    run_verifier("interpolation", trials, (0.0, 1.0 + 1e-12), |grid, t| {
        let u = crate::initial::bandlimited(grid, VERIFIER_K_MAX, trial_seed(seed, t))?;
        let hs = |x: f64| spectral::sobolev_norm(&u, x);
        let sobolev = VerifierRow::new(2 * t, hs(s), hs(s1).powf(theta) * hs(s2).powf(1.0 - theta));
        let blocks = block_norms(&u, &fam);
        let lhs = besov_from_blocks(&blocks, s, BesovIndex::Finite(1.0));
        let a = besov_from_blocks(&blocks, s1, BesovIndex::Infinity);
        let b = besov_from_blocks(&blocks, s2, BesovIndex::Infinity);
        let besov = VerifierRow::new(2 * t + 1, lhs, k * a.powf(theta) * b.powf(1.0 - theta));
        Ok(vec![sobolev, besov])
    })
}

/// Upper budget of the product verifier at `s = 2.5`.
pub const PRODUCT_BUDGET: f64 = 4.0;
const PRODUCT_S: f64 = 2.5;
const PRODUCT_K_MAX: usize = 6;

/// Algebra property of `Hˢ ∩ L^∞`: `‖f²‖_{Hˢ} / (2‖f‖_{Hˢ}‖f‖_{L^∞})` for
/// the first component `f` of a band-limited field. With `k_max = 6` the
/// square is alias-free on every grid size.
pub fn verify_product(trials: usize, seed: u64) -> Result<VerifierReport> {
    run_verifier("product", trials, (0.0, PRODUCT_BUDGET), |grid, t| {
        let u = crate::initial::bandlimited(grid, PRODUCT_K_MAX, trial_seed(seed, t))?;
        let f = crate::spectral::ScalarField::from_raw(*grid, u.component(0).to_vec());
        let sq = crate::spectral::ScalarField::from_raw(*grid, f.samples().iter().map(|x| x * x).collect());
        let linf = f.samples().iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let lhs = spectral::sobolev_norm_scalar(&sq, PRODUCT_S);
        let rhs = 2.0 * spectral::sobolev_norm_scalar(&f, PRODUCT_S) * linf;
        Ok(vec![VerifierRow::new(t, lhs, rhs)])
    })
}

/// Measured equivalence constants `(min, max)` of `‖u‖_{B^s_{2,2}} / ‖u‖_{Hˢ}`
/// over seeded band-limited fields on `grid`.
pub fn besov_sobolev_equivalence(grid: &TorusGrid, s: f64, trials: usize, seed: u64) -> Result<(f64, f64)> {
    let fam = build_lp_family();
    let k_max = grid.dealias_cutoff() as usize;
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for t in 0..trials {
        let u = crate::initial::bandlimited(grid, k_max, trial_seed(seed, t))?;
        let r = besov_norm(&u, s, 2.0, &fam)? / spectral::sobolev_norm(&u, s);
        lo = lo.min(r);
        hi = hi.max(r);
    }
    Ok((lo, hi))
}
