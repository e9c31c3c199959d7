use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};

/// The periodic box `[0, L)^d` sampled with `n` points per axis.
///
/// Samples are stored row-major with the last axis fastest. Mode `j` on an
/// axis carries the physical wavenumber `(2π/L)·j` with `j ∈ [−n/2, n/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusGrid {
    dim: usize,
    n: usize,
    length: f64,
}

impl TorusGrid {
    pub fn new(dim: usize, n: usize, length: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidGrid("dimension must be at least 1".into()));
        }
        if n < 8 || n % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "points per axis must be even and >= 8, got {n}"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "box length must be positive and finite, got {length}"
            )));
        }
        if n.checked_pow(dim as u32).is_none() {
            return Err(Error::InvalidGrid("grid too large".into()));
        }
        Ok(Self { dim, n, length })
    }

    /// Grid on the standard `[0, 2π)^d` box.
    pub fn standard(dim: usize, n: usize) -> Result<Self> {
        Self::new(dim, n, 2.0 * PI)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Total number of samples, `n^d`.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    /// Quadrature weight `(L/n)^d`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Wavenumber of mode index 1, `2π/L`.
    pub fn fundamental(&self) -> f64 {
        2.0 * PI / self.length
    }

    /// Signed mode index in `[−n/2, n/2)` for storage index `i`.
    pub fn wave_index(&self, i: usize) -> i64 {
        let half = self.n / 2;
        if i < half {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    /// Storage index for signed mode `j` (taken modulo `n`).
    pub fn storage_index(&self, j: i64) -> usize {
        j.rem_euclid(self.n as i64) as usize
    }

    /// Largest retained `|j|` per axis under the 2/3 rule.
    pub fn dealias_cutoff(&self) -> i64 {
        (self.n / 3) as i64
    }

    /// Stride of `axis` in the flat sample layout.
    pub fn stride(&self, axis: usize) -> usize {
        self.n.pow((self.dim - 1 - axis) as u32)
    }

    /// Physical coordinate of sample `i` along one axis.
    pub fn coordinate(&self, i: usize) -> f64 {
        i as f64 * self.spacing()
    }

    /// Physical coordinates of the sample at flat index `p`.
    pub fn point(&self, p: usize) -> Vec<f64> {
        (0..self.dim)
            .map(|a| self.coordinate((p / self.stride(a)) % self.n))
            .collect()
    }

    pub(crate) fn modes(&self) -> Arc<ModeTable> {
        static CACHE: OnceLock<Mutex<HashMap<(usize, usize, u64), Arc<ModeTable>>>> =
            OnceLock::new();
        let key = (self.dim, self.n, self.length.to_bits());
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
        guard
            .entry(key)
            .or_insert_with(|| Arc::new(ModeTable::build(self)))
            .clone()
    }
}

/// Per-mode lookup tables shared by every field on a grid.
#[derive(Debug)]
pub(crate) struct ModeTable {
    /// Signed mode indices, `dim` entries per flat mode.
    pub index: Vec<i64>,
    /// Physical wavevector, `dim` entries per flat mode.
    pub wavevector: Vec<f64>,
    /// `|k|²` per flat mode.
    pub k2: Vec<f64>,
    /// Whether the mode survives 2/3-rule truncation.
    pub retained: Vec<bool>,
}

impl ModeTable {
    fn build(grid: &TorusGrid) -> Self {
        let d = grid.dim;
        let len = grid.len();
        let cut = grid.dealias_cutoff();
        let kf = grid.fundamental();
        let mut index = Vec::with_capacity(len * d);
        let mut wavevector = Vec::with_capacity(len * d);
        let mut k2 = Vec::with_capacity(len);
        let mut retained = Vec::with_capacity(len);
        for p in 0..len {
            let mut sum = 0.0;
            let mut keep = true;
            for a in 0..d {
                let j = grid.wave_index((p / grid.stride(a)) % grid.n);
                let k = kf * j as f64;
                index.push(j);
                wavevector.push(k);
                sum += k * k;
                keep &= j.abs() <= cut;
            }
            k2.push(sum);
            retained.push(keep);
        }
        Self { index, wavevector, k2, retained }
    }
}
