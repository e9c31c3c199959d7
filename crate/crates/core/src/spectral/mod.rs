//! Discrete Fourier analysis on the periodic box.

mod fft;
mod field;
mod grid;
mod ops;

pub use field::{MatrixField, ScalarField, SpectralField, VelocityField};
pub use grid::TorusGrid;
pub use ops::{
    apply_multiplier, apply_multiplier_scalar, dealias, dealias_field, divergence, gradient,
    helmholtz_inverse, jacobian, l2_inner, lambda_s, lambda_s_alpha, linf_grad, linf_norm,
    sobolev_norm, sobolev_norm_scalar, transform_forward,
};

pub(crate) use field::{forward_components, inverse_components};
pub(crate) use ops::{
    check_alpha, dealias_in_place, derivative_symbol_in, jacobian_from_spectra, scale_by_k2,
    weighted_energy,
};
