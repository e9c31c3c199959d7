use rustfft::num_complex::Complex64;

use super::fft;
use super::grid::TorusGrid;
use crate::error::{Error, Result};

fn check_samples(grid: &TorusGrid, component: usize, samples: &[f64]) -> Result<()> {
    if samples.len() != grid.len() {
        return Err(Error::SizeMismatch { expected: grid.len(), got: samples.len() });
    }
    if let Some(index) = samples.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFiniteSample { component, index });
    }
    Ok(())
}

/// A real scalar field sampled on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: TorusGrid,
    samples: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: TorusGrid, samples: Vec<f64>) -> Result<Self> {
        check_samples(&grid, 0, &samples)?;
        Ok(Self { grid, samples })
    }

    pub(crate) fn from_raw(grid: TorusGrid, samples: Vec<f64>) -> Self {
        debug_assert_eq!(samples.len(), grid.len());
        Self { grid, samples }
    }

    pub fn zeros(grid: TorusGrid) -> Self {
        Self { grid, samples: vec![0.0; grid.len()] }
    }

    /// Samples `f` at every grid point.
    pub fn from_fn(grid: TorusGrid, f: impl Fn(&[f64]) -> f64) -> Self {
        let samples = (0..grid.len()).map(|p| f(&grid.point(p))).collect();
        Self { grid, samples }
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn spectrum(&self) -> SpectralField {
        SpectralField { grid: self.grid, coeffs: fft::forward_real(&self.grid, &self.samples) }
    }
}

/// A `d`-component real vector field; the state variable `u`.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityField {
    grid: TorusGrid,
    components: Vec<Vec<f64>>,
}

impl VelocityField {
    /// Builds a field from `d` component arrays, rejecting wrong sizes and
    /// non-finite samples.
    pub fn new(grid: TorusGrid, components: Vec<Vec<f64>>) -> Result<Self> {
        if components.len() != grid.dim() {
            return Err(Error::SizeMismatch { expected: grid.dim(), got: components.len() });
        }
        for (i, c) in components.iter().enumerate() {
            check_samples(&grid, i, c)?;
        }
        Ok(Self { grid, components })
    }

    pub(crate) fn from_raw(grid: TorusGrid, components: Vec<Vec<f64>>) -> Self {
        debug_assert_eq!(components.len(), grid.dim());
        Self { grid, components }
    }

    pub fn zeros(grid: TorusGrid) -> Self {
        Self { grid, components: vec![vec![0.0; grid.len()]; grid.dim()] }
    }

    /// Samples a vector-valued function; `f` writes `d` values per point.
    pub fn from_fn(grid: TorusGrid, f: impl Fn(&[f64], &mut [f64])) -> Self {
        let d = grid.dim();
        let mut components = vec![vec![0.0; grid.len()]; d];
        let mut value = vec![0.0; d];
        for p in 0..grid.len() {
            value.iter_mut().for_each(|v| *v = 0.0);
            f(&grid.point(p), &mut value);
            for i in 0..d {
                components[i][p] = value[i];
            }
        }
        Self { grid, components }
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn component(&self, i: usize) -> &[f64] {
        &self.components[i]
    }

    pub fn components(&self) -> &[Vec<f64>] {
        &self.components
    }

    pub fn into_components(self) -> Vec<Vec<f64>> {
        self.components
    }

    pub fn is_finite(&self) -> bool {
        self.components.iter().flatten().all(|x| x.is_finite())
    }

    pub(crate) fn check_same_grid(&self, other: &VelocityField) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    /// `a·self + b·other`.
    pub fn lincomb(&self, a: f64, other: &VelocityField, b: f64) -> Result<VelocityField> {
        self.check_same_grid(other)?;
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(x, y)| x.iter().zip(y).map(|(p, q)| a * p + b * q).collect())
            .collect();
        Ok(Self { grid: self.grid, components })
    }

    pub fn sub(&self, other: &VelocityField) -> Result<VelocityField> {
        self.lincomb(1.0, other, -1.0)
    }

    pub fn add(&self, other: &VelocityField) -> Result<VelocityField> {
        self.lincomb(1.0, other, 1.0)
    }

    pub fn scale(&self, a: f64) -> VelocityField {
        let components =
            self.components.iter().map(|c| c.iter().map(|x| a * x).collect()).collect();
        Self { grid: self.grid, components }
    }

    pub(crate) fn axpy_in_place(&mut self, a: f64, other: &VelocityField) {
        for (x, y) in self.components.iter_mut().zip(&other.components) {
            for (p, q) in x.iter_mut().zip(y) {
                *p += a * q;
            }
        }
    }

    /// Fourier coefficients of every component.
    pub fn spectra(&self) -> Vec<SpectralField> {
        forward_components(&self.grid, &self.components)
            .into_iter()
            .map(|coeffs| SpectralField { grid: self.grid, coeffs })
            .collect()
    }

    pub(crate) fn raw_spectra(&self) -> Vec<Vec<Complex64>> {
        forward_components(&self.grid, &self.components)
    }

    pub(crate) fn from_raw_spectra(grid: TorusGrid, spectra: &[Vec<Complex64>]) -> Self {
        Self { grid, components: inverse_components(&grid, spectra) }
    }
}

pub(crate) fn forward_components(grid: &TorusGrid, comps: &[Vec<f64>]) -> Vec<Vec<Complex64>> {
    let mut out = Vec::with_capacity(comps.len());
    let mut it = comps.chunks(2);
    for pair in &mut it {
        if pair.len() == 2 {
            let (a, b) = fft::forward_real_pair(grid, &pair[0], &pair[1]);
            out.push(a);
            out.push(b);
        } else {
            out.push(fft::forward_real(grid, &pair[0]));
        }
    }
    out
}

pub(crate) fn inverse_components(grid: &TorusGrid, spectra: &[Vec<Complex64>]) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(spectra.len());
    for pair in spectra.chunks(2) {
        if pair.len() == 2 {
            let (a, b) = fft::inverse_real_pair(grid, &pair[0], &pair[1]);
            out.push(a);
            out.push(b);
        } else {
            out.push(fft::inverse_real(grid, &pair[0]));
        }
    }
    out
}

/// Complex Fourier coefficients of one real component.
///
/// Normalization: the forward transform is the plain sum
/// `ĉ(j) = Σ_x f(x)·e^{−i k·x}`; the inverse divides by `n^d`. With this
/// convention `∫|f|² dx ≈ (L/n)^d Σ|f|² = L^d/n^{2d} Σ|ĉ|²`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: TorusGrid,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn new(grid: TorusGrid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::SizeMismatch { expected: grid.len(), got: coeffs.len() });
        }
        Ok(Self { grid, coeffs })
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub(crate) fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Coefficient at signed mode indices `j` (one per axis).
    pub fn coefficient(&self, j: &[i64]) -> Complex64 {
        let p: usize = j
            .iter()
            .enumerate()
            .map(|(a, &ja)| self.grid.storage_index(ja) * self.grid.stride(a))
            .sum();
        self.coeffs[p]
    }

    /// Largest `|ĉ(−k) − conj ĉ(k)|` relative to the largest coefficient.
    pub fn hermitian_defect(&self) -> f64 {
        let modes = self.grid.modes();
        let d = self.grid.dim();
        let scale = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        let worst = (0..self.coeffs.len())
            .map(|p| {
                let q = fft::mirror(&self.grid, &modes.index[d * p..d * p + d]);
                (self.coeffs[q] - self.coeffs[p].conj()).norm()
            })
            .fold(0.0, f64::max);
        worst / scale
    }

    /// Inverse transform to physical samples (real part).
    pub fn inverse(&self) -> ScalarField {
        ScalarField::from_raw(self.grid, fft::inverse_real(&self.grid, &self.coeffs))
    }
}

/// A `d×d` matrix of real sample arrays; entry `(i, j)` is at `i·d + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixField {
    grid: TorusGrid,
    entries: Vec<Vec<f64>>,
}

impl MatrixField {
    pub(crate) fn from_raw(grid: TorusGrid, entries: Vec<Vec<f64>>) -> Self {
        debug_assert_eq!(entries.len(), grid.dim() * grid.dim());
        Self { grid, entries }
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn entry(&self, i: usize, j: usize) -> &[f64] {
        &self.entries[i * self.grid.dim() + j]
    }

    pub fn entries(&self) -> &[Vec<f64>] {
        &self.entries
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().flatten().all(|x| x.is_finite())
    }
}
