//! Multi-dimensional complex FFTs over the flat row-major sample layout.
//!
//! Forward transforms are unnormalized; inverse transforms divide by `n^d`.

use std::sync::{Arc, Mutex, OnceLock};

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::grid::TorusGrid;

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    static PLANNER: OnceLock<Mutex<FftPlanner<f64>>> = OnceLock::new();
    let planner = PLANNER.get_or_init(|| Mutex::new(FftPlanner::new()));
    let mut guard = planner.lock().unwrap_or_else(|e| e.into_inner());
    if inverse {
        guard.plan_fft_inverse(n)
    } else {
        guard.plan_fft_forward(n)
    }
}

fn transform(grid: &TorusGrid, data: &mut [Complex64], inverse: bool) {
    let n = grid.n();
    debug_assert_eq!(data.len(), grid.len());
    let fft = plan(n, inverse);
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    let mut lines: Vec<Complex64> = Vec::new();
    for axis in 0..grid.dim() {
        let stride = grid.stride(axis);
        if stride == 1 {
            fft.process_with_scratch(data, &mut scratch);
            continue;
        }
        // Each block is an n x stride matrix; transpose so the transformed
        // axis is contiguous, run all lines at once, transpose back.
        let block = n * stride;
        lines.resize(block, Complex64::default());
        for chunk in data.chunks_exact_mut(block) {
            for i in 0..n {
                for r in 0..stride {
                    lines[r * n + i] = chunk[i * stride + r];
                }
            }
            fft.process_with_scratch(&mut lines, &mut scratch);
            for i in 0..n {
                for r in 0..stride {
                    chunk[i * stride + r] = lines[r * n + i];
                }
            }
        }
    }
    if inverse {
        let scale = 1.0 / grid.len() as f64;
        for c in data.iter_mut() {
            *c *= scale;
        }
    }
}

pub(crate) fn forward_real(grid: &TorusGrid, samples: &[f64]) -> Vec<Complex64> {
    let mut data: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    transform(grid, &mut data, false);
    data
}

/// Inverse transform keeping the real part.
pub(crate) fn inverse_real(grid: &TorusGrid, coeffs: &[Complex64]) -> Vec<f64> {
    let mut data = coeffs.to_vec();
    transform(grid, &mut data, true);
    data.into_iter().map(|c| c.re).collect()
}

/// Inverse-transform two real fields packed as `a + i·b` in one pass.
pub(crate) fn inverse_real_pair(
    grid: &TorusGrid,
    a: &[Complex64],
    b: &[Complex64],
) -> (Vec<f64>, Vec<f64>) {
    let i = Complex64::new(0.0, 1.0);
    let mut data: Vec<Complex64> = a.iter().zip(b).map(|(x, y)| x + i * y).collect();
    transform(grid, &mut data, true);
    data.into_iter().map(|c| (c.re, c.im)).unzip()
}

/// Forward-transform two real fields in one complex pass and separate them
/// using Hermitian symmetry.
pub(crate) fn forward_real_pair(
    grid: &TorusGrid,
    a: &[f64],
    b: &[f64],
) -> (Vec<Complex64>, Vec<Complex64>) {
    let mut data: Vec<Complex64> =
        a.iter().zip(b).map(|(&x, &y)| Complex64::new(x, y)).collect();
    transform(grid, &mut data, false);
    let modes = grid.modes();
    let d = grid.dim();
    let mut fa = vec![Complex64::default(); data.len()];
    let mut fb = vec![Complex64::default(); data.len()];
    for p in 0..data.len() {
        let q = mirror(grid, &modes.index[d * p..d * p + d]);
        let z = data[p];
        let zc = data[q].conj();
        fa[p] = 0.5 * (z + zc);
        fb[p] = Complex64::new(0.0, -0.5) * (z - zc);
    }
    (fa, fb)
}

/// Flat index of the mode `−j`.
pub(crate) fn mirror(grid: &TorusGrid, index: &[i64]) -> usize {
    index
        .iter()
        .enumerate()
        .map(|(a, &j)| grid.storage_index(-j) * grid.stride(a))
        .sum()
}
