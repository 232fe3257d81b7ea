//! Pseudo-spectral solver for the dissipative surface quasi-geostrophic
//! equation `∂_t θ + u·∇θ + Λ^α θ = 0`, `u = R^⊥θ`, on the periodic torus,
//! together with numerical diagnostics for its regularity theory: the
//! α-harmonic extension, weighted level-set measures, oscillation decay on
//! parabolic cylinders and the explicit constants of the De Giorgi scheme.
//!
//! The crate is `no_std` and only needs `alloc`; file formats, the command
//! line and parallel sweeps live in the companion `sqg-cli` crate.

#![no_std]

extern crate alloc;

pub mod constants;
pub mod degiorgi;
pub mod error;
pub mod extension;
pub mod fft;
pub mod grid;
pub mod init;
pub mod quadrature;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
pub use grid::{GridSpec, RealField, SpectralField};
