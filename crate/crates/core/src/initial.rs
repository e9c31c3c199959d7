//! Seeded initial-data families.
//!
//! Every random coefficient is drawn from its own ChaCha stream keyed by the
//! mode index, so a given `(seed, mode)` pair produces the same coefficient on
//! every grid resolution. Band-limited data therefore describe the same
//! function at `n = 64` and `n = 128`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{self, TorusGrid, VelocityField};

/// Named initial-data family plus its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialData {
    /// Modes `0 < |j| ≤ k_max` with complex Gaussian coefficients.
    Bandlimited {
        k_max: usize,
        #[serde(default)]
        seed: u64,
        #[serde(default = "default_norm")]
        norm_hs: f64,
    },
    /// `|û(k)| = (1+|k|)^{−tail_exponent}` with random phases over the whole
    /// dealiased band.
    AlgebraicTail {
        tail_exponent: f64,
        #[serde(default)]
        seed: u64,
        #[serde(default = "default_norm")]
        norm_hs: f64,
    },
    /// `u = (A sin x₂, 0, …)`; `A sin x` in one dimension.
    Shear { amplitude: f64 },
}

fn default_norm() -> f64 {
    1.0
}

impl InitialData {
    pub fn seed(&self) -> Option<u64> {
        match self {
            InitialData::Bandlimited { seed, .. } | InitialData::AlgebraicTail { seed, .. } => {
                Some(*seed)
            }
            InitialData::Shear { .. } => None,
        }
    }

    pub fn with_seed(mut self, new_seed: u64) -> Self {
        match &mut self {
            InitialData::Bandlimited { seed, .. } | InitialData::AlgebraicTail { seed, .. } => {
                *seed = new_seed
            }
            InitialData::Shear { .. } => {}
        }
        self
    }

    /// Samples the family on `grid`, normalizing random families so that
    /// `‖u₀‖_{Hˢ} = norm_hs`.
    pub fn generate(&self, grid: &TorusGrid, s: f64) -> Result<VelocityField> {
        match *self {
            InitialData::Bandlimited { k_max, seed, norm_hs } => {
                let u = bandlimited(grid, k_max, seed)?;
                normalize_hs(&u, s, norm_hs)
            }
            InitialData::AlgebraicTail { tail_exponent, seed, norm_hs } => {
                let u = algebraic_tail(grid, tail_exponent, seed)?;
                normalize_hs(&u, s, norm_hs)
            }
            InitialData::Shear { amplitude } => Ok(shear(grid, amplitude)),
        }
    }
}

fn stream_key(index: &[i64], component: usize) -> u64 {
    let mut key = component as u64;
    for &j in index {
        key = (key << 16) | ((j + (1 << 15)) as u64 & 0xffff);
    }
    key
}

fn mode_rng(seed: u64, index: &[i64], component: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_key(index, component));
    rng
}

/// Builds a real field from per-mode coefficients `coeff(j, component)`,
/// interpreted as amplitudes of `e^{ik·x}`; taking the real part of the
/// inverse transform Hermitian-symmetrizes them.
fn from_mode_coefficients(
    grid: &TorusGrid,
    in_band: impl Fn(&[i64]) -> bool,
    coeff: impl Fn(&[i64], usize) -> Complex64,
) -> VelocityField {
    let d = grid.dim();
    let scale = grid.len() as f64;
    let mut spectra = vec![vec![Complex64::default(); grid.len()]; d];
    let mut index = vec![0i64; d];
    for p in 0..grid.len() {
        for (a, j) in index.iter_mut().enumerate() {
            *j = grid.wave_index((p / grid.stride(a)) % grid.n());
        }
        if !in_band(&index) {
            continue;
        }
        for (i, c) in spectra.iter_mut().enumerate() {
            c[p] = coeff(&index, i) * scale;
        }
    }
    // Re(IFFT) of an arbitrary spectrum equals the IFFT of its Hermitian part.
    let sym: Vec<Vec<Complex64>> = spectra.iter().map(|c| hermitian_part(grid, c)).collect();
    VelocityField::from_raw(*grid, spectral::inverse_components(grid, &sym))
}

fn hermitian_part(grid: &TorusGrid, data: &[Complex64]) -> Vec<Complex64> {
    let d = grid.dim();
    let mut index = vec![0i64; d];
    (0..data.len())
        .map(|p| {
            for (a, j) in index.iter_mut().enumerate() {
                *j = grid.wave_index((p / grid.stride(a)) % grid.n());
            }
            let q: usize = index
                .iter()
                .enumerate()
                .map(|(a, &j)| grid.storage_index(-j) * grid.stride(a))
                .sum();
            0.5 * (data[p] + data[q].conj())
        })
        .collect()
}

/// Random field with modes `0 < |j| ≤ k_max` (integer mode radius).
pub fn bandlimited(grid: &TorusGrid, k_max: usize, seed: u64) -> Result<VelocityField> {
    let cut = grid.dealias_cutoff() as usize;
    if k_max == 0 || k_max > cut {
        return Err(Error::param(format!(
            "k_max must lie in [1, {cut}] for n = {}, got {k_max}",
            grid.n()
        )));
    }
    let r2 = (k_max * k_max) as i64;
    Ok(from_mode_coefficients(
        grid,
        |j| {
            let m2: i64 = j.iter().map(|x| x * x).sum();
            m2 > 0 && m2 <= r2
        },
        |j, i| {
            let mut rng = mode_rng(seed, j, i);
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re, im)
        },
    ))
}

/// Random-phase field with `|û(k)| = (1+|k|)^{−exponent}` on the whole
/// dealiased band, zero mean.
pub fn algebraic_tail(grid: &TorusGrid, exponent: f64, seed: u64) -> Result<VelocityField> {
    if !exponent.is_finite() {
        return Err(Error::param("tail exponent must be finite"));
    }
    let cut = grid.dealias_cutoff();
    let kf = grid.fundamental();
    Ok(from_mode_coefficients(
        grid,
        |j| j.iter().any(|&x| x != 0) && j.iter().all(|x| x.abs() <= cut),
        |j, i| {
            let k = kf * (j.iter().map(|x| (x * x) as f64).sum::<f64>()).sqrt();
            let phase: f64 = mode_rng(seed, j, i).gen_range(0.0..std::f64::consts::TAU);
            Complex64::from_polar((1.0 + k).powf(-exponent), phase)
        },
    ))
}

/// Deterministic shear `(A sin x₂, 0, …)`; `A sin x` when `d = 1`.
pub fn shear(grid: &TorusGrid, amplitude: f64) -> VelocityField {
    let kf = grid.fundamental();
    let axis = if grid.dim() >= 2 { 1 } else { 0 };
    VelocityField::from_fn(*grid, |x, out| out[0] = amplitude * (kf * x[axis]).sin())
}

/// Rescales `u` so that `‖u‖_{Hˢ} = target`; a zero target gives the zero field.
pub fn normalize_hs(u: &VelocityField, s: f64, target: f64) -> Result<VelocityField> {
    if !(target.is_finite() && target >= 0.0) {
        return Err(Error::param(format!("norm_hs must be finite and >= 0, got {target}")));
    }
    if target == 0.0 {
        return Ok(VelocityField::zeros(*u.grid()));
    }
    let norm = spectral::sobolev_norm(u, s);
    if norm == 0.0 {
        return Err(Error::param("cannot normalize a zero field"));
    }
    Ok(u.scale(target / norm))
}
