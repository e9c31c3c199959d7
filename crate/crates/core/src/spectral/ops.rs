//! Fourier multipliers, spectral derivatives, norms and dealiasing.

use rustfft::num_complex::Complex64;

use super::field::{inverse_components, MatrixField, ScalarField, SpectralField, VelocityField};
use super::fft;
use super::grid::TorusGrid;
use crate::error::{Error, Result};

/// Forward transform of one real component.
pub fn transform_forward(grid: &TorusGrid, samples: &[f64]) -> Result<SpectralField> {
    if samples.len() != grid.len() {
        return Err(Error::SizeMismatch { expected: grid.len(), got: samples.len() });
    }
    SpectralField::new(*grid, fft::forward_real(grid, samples))
}

/// Scales every mode of every component by `symbol(k)`, `k` the physical
/// wavevector. Fails if the symbol is not finite on a mode that carries
/// energy.
pub fn apply_multiplier(
    f: &VelocityField,
    symbol: impl Fn(&[f64]) -> f64,
) -> Result<VelocityField> {
    let grid = *f.grid();
    let d = grid.dim();
    let modes = grid.modes();
    let mut spectra = f.raw_spectra();
    let floor = empty_mode_floor(&spectra);
    for p in 0..grid.len() {
        let k = &modes.wavevector[d * p..d * p + d];
        let m = symbol(k);
        if !m.is_finite() {
            if spectra.iter().any(|c| c[p].norm() > floor) {
                return Err(Error::NonFiniteSymbol(k.to_vec()));
            }
            for c in spectra.iter_mut() {
                c[p] = Complex64::default();
            }
            continue;
        }
        for c in spectra.iter_mut() {
            c[p] *= m;
        }
    }
    Ok(VelocityField::from_raw_spectra(grid, &spectra))
}

/// Coefficients below this are transform round-off, not energy.
fn empty_mode_floor(spectra: &[Vec<Complex64>]) -> f64 {
    let peak = spectra.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
    1e-13 * peak
}

/// Scalar version of [`apply_multiplier`].
pub fn apply_multiplier_scalar(
    f: &ScalarField,
    symbol: impl Fn(&[f64]) -> f64,
) -> Result<ScalarField> {
    let grid = *f.grid();
    let d = grid.dim();
    let modes = grid.modes();
    let mut c = fft::forward_real(&grid, f.samples());
    let floor = empty_mode_floor(std::slice::from_ref(&c));
    for p in 0..grid.len() {
        let k = &modes.wavevector[d * p..d * p + d];
        let m = symbol(k);
        if !m.is_finite() {
            if c[p].norm() > floor {
                return Err(Error::NonFiniteSymbol(k.to_vec()));
            }
            c[p] = Complex64::default();
        } else {
            c[p] *= m;
        }
    }
    Ok(ScalarField::from_raw(grid, fft::inverse_real(&grid, &c)))
}

/// Multiplies coefficient arrays in place by `symbol(|k|²)`.
pub(crate) fn scale_by_k2(grid: &TorusGrid, spectra: &mut [Vec<Complex64>], symbol: impl Fn(f64) -> f64) {
    let modes = grid.modes();
    for (p, &k2) in modes.k2.iter().enumerate() {
        let m = symbol(k2);
        for c in spectra.iter_mut() {
            c[p] *= m;
        }
    }
}

fn radial(f: &VelocityField, symbol: impl Fn(f64) -> f64) -> VelocityField {
    let grid = *f.grid();
    let mut spectra = f.raw_spectra();
    scale_by_k2(&grid, &mut spectra, symbol);
    VelocityField::from_raw_spectra(grid, &spectra)
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(Error::param(format!("alpha must be finite and >= 0, got {alpha}")));
    }
    Ok(())
}

/// Bessel potential `Λˢ = (1−Δ)^{s/2}`.
pub fn lambda_s(f: &VelocityField, s: f64) -> VelocityField {
    radial(f, |k2| (1.0 + k2).powf(0.5 * s))
}

/// Helmholtz inverse `(1−α²Δ)^{−1}`; the identity at `α = 0`.
pub fn helmholtz_inverse(f: &VelocityField, alpha: f64) -> Result<VelocityField> {
    check_alpha(alpha)?;
    let a2 = alpha * alpha;
    Ok(radial(f, |k2| 1.0 / (1.0 + a2 * k2)))
}

/// `Λˢ_α = (1−Δ)^{s/2}(1−α²Δ)^{−1}`.
pub fn lambda_s_alpha(f: &VelocityField, s: f64, alpha: f64) -> Result<VelocityField> {
    check_alpha(alpha)?;
    let a2 = alpha * alpha;
    Ok(radial(f, |k2| (1.0 + k2).powf(0.5 * s) / (1.0 + a2 * k2)))
}

/// Symbol of `∂_axis` at flat mode `p`; zero on the Nyquist plane.
#[inline]
pub(crate) fn derivative_symbol_in(
    modes: &super::grid::ModeTable,
    grid: &TorusGrid,
    p: usize,
    axis: usize,
) -> Complex64 {
    let d = grid.dim();
    if modes.index[d * p + axis] == -((grid.n() / 2) as i64) {
        Complex64::default()
    } else {
        Complex64::new(0.0, modes.wavevector[d * p + axis])
    }
}

/// `∂_axis` applied to a coefficient array.
pub(crate) fn differentiate(grid: &TorusGrid, coeffs: &[Complex64], axis: usize) -> Vec<Complex64> {
    let modes = grid.modes();
    coeffs
        .iter()
        .enumerate()
        .map(|(p, c)| c * derivative_symbol_in(&modes, grid, p, axis))
        .collect()
}

/// Spectral Jacobian with entry `(i, j) = ∂_j u^i`.
pub fn jacobian(u: &VelocityField) -> MatrixField {
    let grid = *u.grid();
    let spectra = u.raw_spectra();
    MatrixField::from_raw(grid, jacobian_from_spectra(&grid, &spectra))
}

pub(crate) fn jacobian_from_spectra(grid: &TorusGrid, spectra: &[Vec<Complex64>]) -> Vec<Vec<f64>> {
    let d = grid.dim();
    let mut derivs = Vec::with_capacity(d * d);
    for c in spectra {
        for j in 0..d {
            derivs.push(differentiate(grid, c, j));
        }
    }
    inverse_components(grid, &derivs)
}

pub fn divergence(u: &VelocityField) -> ScalarField {
    let grid = *u.grid();
    let modes = grid.modes();
    let spectra = u.raw_spectra();
    let mut out = vec![Complex64::default(); grid.len()];
    for (i, c) in spectra.iter().enumerate() {
        for (p, o) in out.iter_mut().enumerate() {
            *o += c[p] * derivative_symbol_in(&modes, &grid, p, i);
        }
    }
    ScalarField::from_raw(grid, fft::inverse_real(&grid, &out))
}

pub fn gradient(p: &ScalarField) -> VelocityField {
    let grid = *p.grid();
    let c = fft::forward_real(&grid, p.samples());
    let derivs: Vec<Vec<Complex64>> = (0..grid.dim()).map(|a| differentiate(&grid, &c, a)).collect();
    VelocityField::from_raw_spectra(grid, &derivs)
}

/// `Σ_i Σ_k w(|k|²)|ĉ_i(k)|² · L^d/n^{2d}`.
pub(crate) fn weighted_energy(
    grid: &TorusGrid,
    spectra: &[Vec<Complex64>],
    weight: impl Fn(f64) -> f64,
) -> f64 {
    let modes = grid.modes();
    let norm = grid.length().powi(grid.dim() as i32) / (grid.len() as f64).powi(2);
    let mut total = 0.0;
    for c in spectra {
        for (p, z) in c.iter().enumerate() {
            total += weight(modes.k2[p]) * z.norm_sqr();
        }
    }
    total * norm
}

/// `‖u‖_{Hˢ} = (Σ_k (1+|k|²)^s |û(k)|²)^{1/2}` with the grid quadrature
/// weight; at `s = 0` this is the trapezoidal `L²` norm.
pub fn sobolev_norm(u: &VelocityField, s: f64) -> f64 {
    sobolev_norm_spectra(u.grid(), &u.raw_spectra(), s)
}

pub(crate) fn sobolev_norm_spectra(grid: &TorusGrid, spectra: &[Vec<Complex64>], s: f64) -> f64 {
    if s == 0.0 {
        return weighted_energy(grid, spectra, |_| 1.0).sqrt();
    }
    weighted_energy(grid, spectra, |k2| (1.0 + k2).powf(s)).sqrt()
}

pub fn sobolev_norm_scalar(f: &ScalarField, s: f64) -> f64 {
    sobolev_norm_spectra(f.grid(), &[fft::forward_real(f.grid(), f.samples())], s)
}

/// Grid `L²` inner product `(L/n)^d Σ u·v`.
pub fn l2_inner(u: &VelocityField, v: &VelocityField) -> Result<f64> {
    u.check_same_grid(v)?;
    let sum: f64 = u
        .components()
        .iter()
        .zip(v.components())
        .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>())
        .sum();
    Ok(sum * u.grid().cell_volume())
}

/// Maximum over grid points of the Euclidean magnitude `|u(x)|`.
pub fn linf_norm(u: &VelocityField) -> f64 {
    let grid = u.grid();
    (0..grid.len())
        .map(|p| u.components().iter().map(|c| c[p] * c[p]).sum::<f64>().sqrt())
        .fold(0.0, f64::max)
}

/// `‖∇u‖_{L^∞}`: maximum over points of the Frobenius norm of the Jacobian.
pub fn linf_grad(u: &VelocityField) -> f64 {
    let jac = jacobian(u);
    matrix_linf(&jac)
}

pub(crate) fn matrix_linf(m: &MatrixField) -> f64 {
    let len = m.grid().len();
    (0..len)
        .map(|p| m.entries().iter().map(|e| e[p] * e[p]).sum::<f64>().sqrt())
        .fold(0.0, f64::max)
}

/// Zeroes every mode with some `|j_axis| > n/3`.
pub fn dealias(f: &SpectralField) -> SpectralField {
    let mut out = f.clone();
    dealias_in_place(f.grid(), out.coeffs_mut());
    out
}

pub(crate) fn dealias_in_place(grid: &TorusGrid, coeffs: &mut [Complex64]) {
    let modes = grid.modes();
    for (c, &keep) in coeffs.iter_mut().zip(&modes.retained) {
        if !keep {
            *c = Complex64::default();
        }
    }
}

/// Projects a field onto the dealiased band.
pub fn dealias_field(u: &VelocityField) -> VelocityField {
    let grid = *u.grid();
    let mut spectra = u.raw_spectra();
    for c in spectra.iter_mut() {
        dealias_in_place(&grid, c);
    }
    VelocityField::from_raw_spectra(grid, &spectra)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn line(n: usize) -> TorusGrid {
        TorusGrid::standard(1, n).unwrap()
    }

    fn field1(g: TorusGrid, f: impl Fn(f64) -> f64) -> VelocityField {
        VelocityField::from_fn(g, |x, out| out[0] = f(x[0]))
    }

    fn max_diff(a: &VelocityField, b: &VelocityField) -> f64 {
        a.components()
            .iter()
            .flatten()
            .zip(b.components().iter().flatten())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn constant_has_single_zero_mode() {
        let g = line(16);
        let s = transform_forward(&g, &vec![2.5; 16]).unwrap();
        assert!((s.coefficient(&[0]) - Complex64::new(40.0, 0.0)).norm() < 1e-12);
        for j in 1..8 {
            assert!(s.coefficient(&[j]).norm() < 1e-12);
        }
    }

    #[test]
    fn cosine_has_two_conjugate_modes() {
        let g = line(16);
        let f = ScalarField::from_fn(g, |x| (3.0 * x[0]).cos());
        let s = f.spectrum();
        let c3 = s.coefficient(&[3]);
        let cm3 = s.coefficient(&[-3]);
        assert!((c3 - Complex64::new(8.0, 0.0)).norm() < 1e-12);
        assert!((cm3 - c3.conj()).norm() < 1e-12);
        for j in -8i64..8 {
            if j.abs() != 3 {
                assert!(s.coefficient(&[j]).norm() < 1e-12, "mode {j}");
            }
        }
        assert!(s.hermitian_defect() < 1e-12);
    }

    #[test]
    fn size_mismatch_is_rejected() {
        assert!(matches!(
            transform_forward(&line(16), &[0.0; 8]),
            Err(Error::SizeMismatch { expected: 16, got: 8 })
        ));
    }

    #[test]
    fn multiplier_examples() {
        let g = line(32);
        let c2 = field1(g, |x| (2.0 * x).cos());
        let c3 = field1(g, |x| (3.0 * x).cos());
        let id = apply_multiplier(&c2, |_| 1.0).unwrap();
        assert!(max_diff(&id, &c2) < 1e-13);
        let lap = apply_multiplier(&c2, |k| k.iter().map(|x| x * x).sum()).unwrap();
        assert!(max_diff(&lap, &c2.scale(4.0)) < 1e-12);
        let m = apply_multiplier(&c3, |k| 1.0 + k[0] * k[0]).unwrap();
        assert!(max_diff(&m, &c3.scale(10.0)) < 1e-12);
    }

    #[test]
    fn nan_symbol_on_active_mode_fails() {
        let g = line(16);
        let c = field1(g, |x| x.cos());
        let err = apply_multiplier(&c, |k| if k[0].abs() == 1.0 { f64::NAN } else { 1.0 });
        assert!(matches!(err, Err(Error::NonFiniteSymbol(_))));
        // non-finite on an empty mode is tolerated
        assert!(apply_multiplier(&c, |k| if k[0] == 0.0 { f64::INFINITY } else { 1.0 }).is_ok());
    }

    #[test]
    fn bessel_and_helmholtz_examples() {
        let g = line(32);
        let c2 = field1(g, |x| (2.0 * x).cos());
        let c3 = field1(g, |x| (3.0 * x).cos());
        assert!(max_diff(&lambda_s(&c3, 0.0), &c3) < 1e-13);
        assert!(max_diff(&lambda_s(&c3, 2.0), &c3.scale(10.0)) < 1e-12);
        assert!(max_diff(&helmholtz_inverse(&c2, 0.0).unwrap(), &c2) < 1e-13);
        assert!(max_diff(&helmholtz_inverse(&c2, 0.5).unwrap(), &c2.scale(0.5)) < 1e-13);
        assert!(max_diff(&lambda_s_alpha(&c3, 2.0, 1.0).unwrap(), &c3) < 1e-12);
        assert!(max_diff(&lambda_s_alpha(&c3, 2.0, 0.0).unwrap(), &lambda_s(&c3, 2.0)) < 1e-12);
        assert!(helmholtz_inverse(&c2, -0.1).is_err());
    }

    #[test]
    fn sobolev_norm_examples() {
        let g = line(16);
        let s = field1(g, |x| x.sin());
        assert!((sobolev_norm(&s, 0.0) - PI.sqrt()).abs() < 1e-12);
        assert!((sobolev_norm(&s, 2.0) - 2.0 * PI.sqrt()).abs() < 1e-12);
        assert_eq!(sobolev_norm(&VelocityField::zeros(g), 1.5), 0.0);
        assert!((linf_norm(&s) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn shear_jacobian() {
        let g = TorusGrid::standard(2, 16).unwrap();
        let u = VelocityField::from_fn(g, |x, out| out[0] = x[1].sin());
        let jac = jacobian(&u);
        for p in 0..g.len() {
            let y = g.point(p)[1];
            assert!(jac.entry(0, 0)[p].abs() < 1e-12);
            assert!((jac.entry(0, 1)[p] - y.cos()).abs() < 1e-12);
            assert!(jac.entry(1, 0)[p].abs() < 1e-12);
            assert!(jac.entry(1, 1)[p].abs() < 1e-12);
        }
        assert!(divergence(&u).samples().iter().all(|x| x.abs() < 1e-12));
        let c = VelocityField::from_fn(g, |_, out| out.copy_from_slice(&[1.0, -2.0]));
        assert!(jacobian(&c).entries().iter().flatten().all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn dealias_examples() {
        let g = line(32);
        let u = field1(g, |x| (8.0 * x).sin() + (11.0 * x).cos());
        let spec = transform_forward(&g, u.component(0)).unwrap();
        let once = dealias(&spec);
        assert_eq!(dealias(&once), once);
        assert!(once.coefficient(&[11]).norm() == 0.0);
        // |j| = 8 < n/3 survives untouched
        let banded = field1(g, |x| (8.0 * x).sin());
        let bs = transform_forward(&g, banded.component(0)).unwrap();
        let kept = dealias(&bs);
        let diff = bs.coeffs().iter().zip(kept.coeffs()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(diff < 1e-12);
        assert!((kept.coefficient(&[8]).im + 16.0).abs() < 1e-12);
    }
}
