//! The Euler–Poincaré bilinear forms, right-hand sides and diagnostics.
//!
//! Jacobian convention: `∇u = (∂_j u^i)`, entry `(i, j)` of a [`MatrixField`].
//! Matrix divergence acts on rows, `(div M)^i = Σ_j ∂_j M_{ij}`.

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::spectral::{
    self, check_alpha, dealias_in_place, derivative_symbol_in, forward_components,
    jacobian_from_spectra, MatrixField, TorusGrid, VelocityField,
};

/// Whether quadratic products are truncated by the 2/3 rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Dealias {
    #[default]
    TwoThirds,
    Off,
}

/// `(u, t, α)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EpState {
    pub u: VelocityField,
    pub t: f64,
    pub alpha: f64,
}

impl EpState {
    pub fn new(u: VelocityField, t: f64, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Self { u, t, alpha })
    }
}

/// `A(a, b) = a b + a bᵀ − aᵀ b − a tr(b)` for `d×d` matrices stored row-major.
fn half_m(d: usize, a: &[f64], b: &[f64], out: &mut [f64]) {
    let tr_b: f64 = (0..d).map(|k| b[k * d + k]).sum();
    for i in 0..d {
        for j in 0..d {
            let mut acc = 0.0;
            for k in 0..d {
                acc += a[i * d + k] * b[k * d + j] + a[i * d + k] * b[j * d + k]
                    - a[k * d + i] * b[k * d + j];
            }
            out[i * d + j] = acc - a[i * d + j] * tr_b;
        }
    }
}

/// Pointwise `M(u, v)` from the two Jacobians at one point.
fn m_kernel(d: usize, a: &[f64], b: &[f64], ab: &mut [f64], ba: &mut [f64], out: &mut [f64]) {
    half_m(d, a, b, ab);
    half_m(d, b, a, ba);
    let contraction: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    for i in 0..d {
        for j in 0..d {
            let diag = if i == j { contraction } else { 0.0 };
            out[i * d + j] = 0.5 * (ab[i * d + j] + ba[i * d + j] + diag);
        }
    }
}

/// `u div v + ∇vᵀ u` at one point.
fn half_n(d: usize, u: &[f64], b: &[f64], out: &mut [f64]) {
    let tr_b: f64 = (0..d).map(|k| b[k * d + k]).sum();
    for i in 0..d {
        let mut acc = u[i] * tr_b;
        for j in 0..d {
            acc += b[j * d + i] * u[j];
        }
        out[i] = acc;
    }
}

fn n_kernel(d: usize, u: &[f64], a: &[f64], v: &[f64], b: &[f64], tmp: &mut [f64], out: &mut [f64]) {
    half_n(d, u, b, tmp);
    half_n(d, v, a, out);
    for i in 0..d {
        out[i] = 0.5 * (tmp[i] + out[i]);
    }
}

fn gather(arrays: &[Vec<f64>], p: usize, out: &mut [f64]) {
    for (o, a) in out.iter_mut().zip(arrays) {
        *o = a[p];
    }
}

fn pointwise_m(d: usize, len: usize, ja: &[Vec<f64>], jb: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out = vec![vec![0.0; len]; d * d];
    let (mut a, mut b) = (vec![0.0; d * d], vec![0.0; d * d]);
    let (mut ab, mut ba, mut m) = (vec![0.0; d * d], vec![0.0; d * d], vec![0.0; d * d]);
    for p in 0..len {
        gather(ja, p, &mut a);
        gather(jb, p, &mut b);
        m_kernel(d, &a, &b, &mut ab, &mut ba, &mut m);
        for (o, x) in out.iter_mut().zip(&m) {
            o[p] = *x;
        }
    }
    out
}

fn pointwise_n(
    d: usize,
    len: usize,
    u: &[Vec<f64>],
    ja: &[Vec<f64>],
    v: &[Vec<f64>],
    jb: &[Vec<f64>],
) -> Vec<Vec<f64>> {
    let mut out = vec![vec![0.0; len]; d];
    let (mut up, mut vp) = (vec![0.0; d], vec![0.0; d]);
    let (mut a, mut b) = (vec![0.0; d * d], vec![0.0; d * d]);
    let (mut tmp, mut n) = (vec![0.0; d], vec![0.0; d]);
    for p in 0..len {
        gather(u, p, &mut up);
        gather(v, p, &mut vp);
        gather(ja, p, &mut a);
        gather(jb, p, &mut b);
        n_kernel(d, &up, &a, &vp, &b, &mut tmp, &mut n);
        for (o, x) in out.iter_mut().zip(&n) {
            o[p] = *x;
        }
    }
    out
}

/// `(v·∇) w` pointwise, `jw` the Jacobian of `w`.
fn pointwise_advection(d: usize, len: usize, v: &[Vec<f64>], jw: &[Vec<f64>]) -> Vec<Vec<f64>> {
    (0..d)
        .map(|i| {
            (0..len)
                .map(|p| (0..d).map(|j| v[j][p] * jw[i * d + j][p]).sum())
                .collect()
        })
        .collect()
}

fn project(grid: &TorusGrid, arrays: Vec<Vec<f64>>, policy: Dealias) -> Vec<Vec<f64>> {
    if policy == Dealias::Off {
        return arrays;
    }
    let mut spectra = forward_components(grid, &arrays);
    for c in spectra.iter_mut() {
        dealias_in_place(grid, c);
    }
    spectral::inverse_components(grid, &spectra)
}

/// The symmetric bilinear matrix form
/// `M(u,v) = ½(∇u∇v + ∇u∇vᵀ − ∇uᵀ∇v − ∇u div v + (∇u:∇v)I + (u ↔ v))`,
/// dealiased.
pub fn bilinear_m(u: &VelocityField, v: &VelocityField) -> Result<MatrixField> {
    u.check_same_grid(v)?;
    let grid = *u.grid();
    let ja = jacobian_from_spectra(&grid, &u.raw_spectra());
    let jb = jacobian_from_spectra(&grid, &v.raw_spectra());
    let m = pointwise_m(grid.dim(), grid.len(), &ja, &jb);
    Ok(MatrixField::from_raw(grid, project(&grid, m, Dealias::TwoThirds)))
}

/// The symmetric bilinear vector form
/// `N(u,v) = ½(u div v + ∇vᵀu + v div u + ∇uᵀv)`, dealiased.
pub fn bilinear_n(u: &VelocityField, v: &VelocityField) -> Result<VelocityField> {
    u.check_same_grid(v)?;
    let grid = *u.grid();
    let ja = jacobian_from_spectra(&grid, &u.raw_spectra());
    let jb = jacobian_from_spectra(&grid, &v.raw_spectra());
    let n = pointwise_n(grid.dim(), grid.len(), u.components(), &ja, v.components(), &jb);
    Ok(VelocityField::from_raw(grid, project(&grid, n, Dealias::TwoThirds)))
}

/// Row-wise spectral divergence of a matrix field.
pub fn matrix_divergence(m: &MatrixField) -> VelocityField {
    let grid = *m.grid();
    let spectra = forward_components(&grid, m.entries());
    let out = row_divergence(&grid, &spectra);
    VelocityField::from_raw_spectra(grid, &out)
}

fn row_divergence(grid: &TorusGrid, spectra: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    let d = grid.dim();
    let modes = grid.modes();
    (0..d)
        .map(|i| {
            (0..grid.len())
                .map(|p| {
                    (0..d)
                        .map(|j| spectra[i * d + j][p] * derivative_symbol_in(&modes, grid, p, j))
                        .sum()
                })
                .collect()
        })
        .collect()
}

/// Spectral coefficients of the EP_α right-hand side
/// `−u·∇u − (1−α²Δ)^{−1}(α² div M(u,u) + N(u,u))`.
fn rhs_spectra(u: &VelocityField, alpha: f64, policy: Dealias) -> Vec<Vec<Complex64>> {
    let grid = *u.grid();
    let d = grid.dim();
    let len = grid.len();
    let jac = jacobian_from_spectra(&grid, &u.raw_spectra());
    let adv = pointwise_advection(d, len, u.components(), &jac);
    let n = pointwise_n(d, len, u.components(), &jac, u.components(), &jac);

    let mut adv_hat = forward_components(&grid, &adv);
    let mut n_hat = forward_components(&grid, &n);
    let m_div = if alpha > 0.0 {
        let m = pointwise_m(d, len, &jac, &jac);
        let mut m_hat = forward_components(&grid, &m);
        if policy == Dealias::TwoThirds {
            m_hat.iter_mut().for_each(|c| dealias_in_place(&grid, c));
        }
        Some(row_divergence(&grid, &m_hat))
    } else {
        None
    };
    if policy == Dealias::TwoThirds {
        adv_hat.iter_mut().for_each(|c| dealias_in_place(&grid, c));
        n_hat.iter_mut().for_each(|c| dealias_in_place(&grid, c));
    }

    let modes = grid.modes();
    let a2 = alpha * alpha;
    for i in 0..d {
        for p in 0..len {
            let nonlocal = match &m_div {
                Some(div) => (a2 * div[i][p] + n_hat[i][p]) / (1.0 + a2 * modes.k2[p]),
                None => n_hat[i][p],
            };
            adv_hat[i][p] = -adv_hat[i][p] - nonlocal;
        }
    }
    adv_hat
}

/// EP_α right-hand side. At `α = 0` this is exactly [`rhs_ep0`].
pub fn rhs_ep_alpha(state: &EpState, policy: Dealias) -> Result<VelocityField> {
    check_alpha(state.alpha)?;
    let grid = *state.u.grid();
    Ok(VelocityField::from_raw_spectra(grid, &rhs_spectra(&state.u, state.alpha, policy)))
}

/// EP₀ right-hand side `−u·∇u − N(u,u)`, dealiased.
pub fn rhs_ep0(u: &VelocityField) -> VelocityField {
    let grid = *u.grid();
    VelocityField::from_raw_spectra(grid, &rhs_spectra(u, 0.0, Dealias::TwoThirds))
}

/// Momentum `m = (1−α²Δ)u`.
pub fn momentum(u: &VelocityField, alpha: f64) -> Result<VelocityField> {
    check_alpha(alpha)?;
    let a2 = alpha * alpha;
    let grid = *u.grid();
    let mut spectra = u.raw_spectra();
    spectral::scale_by_k2(&grid, &mut spectra, |k2| 1.0 + a2 * k2);
    Ok(VelocityField::from_raw_spectra(grid, &spectra))
}

/// `‖u‖²_{L²}`.
pub fn energy_l2(u: &VelocityField) -> f64 {
    spectral::weighted_energy(u.grid(), &u.raw_spectra(), |_| 1.0)
}

/// `‖u‖²_{L²} + α²‖∇u‖²_{L²}`.
pub fn energy_kinetic(u: &VelocityField, alpha: f64) -> f64 {
    let a2 = alpha * alpha;
    spectral::weighted_energy(u.grid(), &u.raw_spectra(), |k2| 1.0 + a2 * k2)
}

/// `‖Λˢ_α(v·∇u) − v·∇(Λˢ_α u)‖_{L²}` with dealiased products.
pub fn commutator_pairing(v: &VelocityField, u: &VelocityField, s: f64, alpha: f64) -> Result<f64> {
    u.check_same_grid(v)?;
    check_alpha(alpha)?;
    let grid = *u.grid();
    let d = grid.dim();
    let len = grid.len();
    let a2 = alpha * alpha;
    let symbol = |k2: f64| (1.0 + k2).powf(0.5 * s) / (1.0 + a2 * k2);

    let u_hat = u.raw_spectra();
    let adv = pointwise_advection(d, len, v.components(), &jacobian_from_spectra(&grid, &u_hat));
    let mut first = forward_components(&grid, &adv);
    first.iter_mut().for_each(|c| dealias_in_place(&grid, c));
    spectral::scale_by_k2(&grid, &mut first, symbol);

    let mut lu_hat = u_hat;
    spectral::scale_by_k2(&grid, &mut lu_hat, symbol);
    let adv2 = pointwise_advection(d, len, v.components(), &jacobian_from_spectra(&grid, &lu_hat));
    let mut second = forward_components(&grid, &adv2);
    second.iter_mut().for_each(|c| dealias_in_place(&grid, c));

    for (a, b) in first.iter_mut().zip(&second) {
        for (x, y) in a.iter_mut().zip(b) {
            *x -= y;
        }
    }
    Ok(spectral::weighted_energy(&grid, &first, |_| 1.0).sqrt())
}

/// `⟨Λˢ_α N(v,u), Λˢ u⟩_{L²}`.
pub fn convexity_pairing(v: &VelocityField, u: &VelocityField, s: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let n = bilinear_n(v, u)?;
    let grid = *u.grid();
    let modes = grid.modes();
    let a2 = alpha * alpha;
    let n_hat = n.raw_spectra();
    let u_hat = u.raw_spectra();
    let norm = grid.length().powi(grid.dim() as i32) / (grid.len() as f64).powi(2);
    let mut total = 0.0;
    for (a, b) in n_hat.iter().zip(&u_hat) {
        for p in 0..grid.len() {
            let k2 = modes.k2[p];
            let w = (1.0 + k2).powf(s) / (1.0 + a2 * k2);
            total += w * (a[p] * b[p].conj()).re;
        }
    }
    Ok(total * norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::initial;
    use crate::spectral::{divergence, gradient, helmholtz_inverse, ScalarField};

    fn max_abs(a: &[Vec<f64>]) -> f64 {
        a.iter().flatten().fold(0.0, |m, x| m.max(x.abs()))
    }

    fn rel_l2(a: &VelocityField, b: &VelocityField) -> f64 {
        let diff = a.sub(b).unwrap();
        energy_l2(&diff).sqrt() / energy_l2(b).sqrt().max(1e-300)
    }

    fn grid2(n: usize) -> TorusGrid {
        TorusGrid::standard(2, n).unwrap()
    }

    #[test]
    fn forms_are_exactly_symmetric() {
        let g = grid2(32);
        let u = initial::bandlimited(&g, 6, 1).unwrap();
        let v = initial::bandlimited(&g, 6, 2).unwrap();
        assert_eq!(bilinear_m(&u, &v).unwrap(), bilinear_m(&v, &u).unwrap());
        assert_eq!(bilinear_n(&u, &v).unwrap(), bilinear_n(&v, &u).unwrap());
    }

    #[test]
    fn forms_are_bilinear() {
        let g = grid2(32);
        let u = initial::bandlimited(&g, 5, 3).unwrap();
        let w = initial::bandlimited(&g, 5, 4).unwrap();
        let v = initial::bandlimited(&g, 5, 5).unwrap();
        let (a, b) = (0.7, -1.3);
        let comb = u.lincomb(a, &w, b).unwrap();
        let lhs = bilinear_n(&comb, &v).unwrap();
        let rhs = bilinear_n(&u, &v).unwrap().lincomb(a, &bilinear_n(&w, &v).unwrap(), b).unwrap();
        assert!(rel_l2(&lhs, &rhs) < 1e-12);
        let lm = bilinear_m(&comb, &v).unwrap();
        let mu = bilinear_m(&u, &v).unwrap();
        let mw = bilinear_m(&w, &v).unwrap();
        let scale = max_abs(lm.entries());
        for e in 0..4 {
            for p in 0..g.len() {
                let r = a * mu.entries()[e][p] + b * mw.entries()[e][p];
                assert!((lm.entries()[e][p] - r).abs() < 1e-12 * scale);
            }
        }
    }

    #[test]
    fn one_dimensional_reductions() {
        let g = TorusGrid::standard(1, 64).unwrap();
        let u = initial::bandlimited(&g, 10, 11).unwrap();
        let ux = crate::spectral::jacobian(&u).entries()[0].clone();
        let m = bilinear_m(&u, &u).unwrap();
        let half_sq = VelocityField::from_raw(g, vec![ux.iter().map(|x| 0.5 * x * x).collect()]);
        let expect = crate::spectral::dealias_field(&half_sq);
        for p in 0..g.len() {
            assert!((m.entries()[0][p] - expect.component(0)[p]).abs() < 1e-12);
        }
        let n = bilinear_n(&u, &u).unwrap();
        let sq = ScalarField::from_raw(g, u.component(0).iter().map(|x| x * x).collect());
        let dsq = gradient(&sq);
        assert!(rel_l2(&n, &crate::spectral::dealias_field(&dsq)) < 1e-12);
    }

    #[test]
    fn constants_give_zero() {
        let g = grid2(16);
        let c = VelocityField::from_fn(g, |_, out| out.copy_from_slice(&[0.3, -1.1]));
        assert!(max_abs(bilinear_m(&c, &c).unwrap().entries()) < 1e-14);
        assert!(max_abs(bilinear_n(&c, &c).unwrap().components()) < 1e-14);
        let st = EpState::new(c.clone(), 0.0, 0.5).unwrap();
        assert!(max_abs(rhs_ep_alpha(&st, Dealias::TwoThirds).unwrap().components()) < 1e-14);
        assert!(max_abs(rhs_ep0(&VelocityField::zeros(g)).components()) == 0.0);
    }

    #[test]
    fn alpha_zero_matches_ep0_bitwise() {
        let g = grid2(32);
        let u = initial::bandlimited(&g, 8, 21).unwrap();
        let st = EpState::new(u.clone(), 0.0, 0.0).unwrap();
        assert_eq!(rhs_ep_alpha(&st, Dealias::TwoThirds).unwrap(), rhs_ep0(&u));
    }

    #[test]
    fn shear_rhs_by_hand() {
        let g = grid2(32);
        let u = initial::shear(&g, 1.0);
        let rhs = rhs_ep0(&u);
        for p in 0..g.len() {
            let y = g.point(p)[1];
            assert!(rhs.component(0)[p].abs() < 1e-13);
            assert!((rhs.component(1)[p] + y.sin() * y.cos()).abs() < 1e-13);
        }
    }

    #[test]
    fn divergence_of_gradient_is_laplacian() {
        let g = grid2(32);
        let u = initial::bandlimited(&g, 9, 2).unwrap();
        let p = ScalarField::from_raw(g, u.component(0).to_vec());
        let lap = divergence(&gradient(&p));
        let expect = crate::spectral::apply_multiplier_scalar(&p, |k| -(k[0] * k[0] + k[1] * k[1])).unwrap();
        let scale = expect.samples().iter().fold(0.0f64, |m, x| m.max(x.abs()));
        for (a, b) in lap.samples().iter().zip(expect.samples()) {
            assert!((a - b).abs() < 1e-12 * scale);
        }
    }

    #[test]
    fn momentum_inverts_helmholtz() {
        let g = grid2(32);
        let u = initial::bandlimited(&g, 8, 5).unwrap();
        let back = helmholtz_inverse(&momentum(&u, 0.7).unwrap(), 0.7).unwrap();
        assert!(rel_l2(&back, &u) < 1e-12);
        assert!(rel_l2(&momentum(&u, 0.0).unwrap(), &u) < 1e-14);
        let g1 = TorusGrid::standard(1, 16).unwrap();
        let c2 = VelocityField::from_fn(g1, |x, o| o[0] = (2.0 * x[0]).cos());
        assert!(rel_l2(&momentum(&c2, 0.5).unwrap(), &c2.scale(2.0)) < 1e-13);
    }

    #[test]
    fn energies() {
        let g = grid2(32);
        let u = initial::bandlimited(&g, 6, 8).unwrap();
        assert_eq!(energy_l2(&VelocityField::zeros(g)), 0.0);
        assert!((energy_kinetic(&u, 0.0) - energy_l2(&u)).abs() < 1e-14 * energy_l2(&u));
        let grad = crate::spectral::jacobian(&u);
        let grad_sq: f64 =
            grad.entries().iter().flatten().map(|x| x * x).sum::<f64>() * g.cell_volume();
        let expect = energy_l2(&u) + 0.09 * grad_sq;
        assert!((energy_kinetic(&u, 0.3) - expect).abs() < 1e-12 * expect);
    }

    #[test]
    fn pairings_vanish_on_trivial_inputs() {
        let g = grid2(32);
        let u = initial::normalize_hs(&initial::bandlimited(&g, 8, 6).unwrap(), 3.5, 1.0).unwrap();
        let c = VelocityField::from_fn(g, |_, out| out.copy_from_slice(&[0.4, 0.9]));
        for alpha in [0.0, 0.1, 1.0] {
            assert!(commutator_pairing(&c, &u, 2.5, alpha).unwrap() < 1e-11);
        }
        let z = VelocityField::zeros(g);
        assert_eq!(commutator_pairing(&z, &z, 2.5, 0.3).unwrap(), 0.0);
        assert_eq!(convexity_pairing(&z, &z, 2.5, 0.3).unwrap(), 0.0);
    }
}
