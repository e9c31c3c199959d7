//! Pseudospectral simulator for the Euler–Poincaré equations EP_α on the
//! periodic box, together with the verification experiments for the
//! zero-alpha limit.

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod initial;
pub mod integrate;
pub mod io;
pub mod littlewood_paley;
pub mod spectral;

pub use error::{Error, Result};
