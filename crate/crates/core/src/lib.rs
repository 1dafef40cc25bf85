//! Spectral toolkit for fractional Hardy operators on the cylinder `R x S^{n-1}`.
//!
//! After the Emden–Fowler change of variables `r = e^{-t}`, the conformal
//! fractional Laplacian restricted to a spherical-harmonic mode becomes a
//! Fourier multiplier `Theta_m(xi)` in `t`. Everything in this crate is built
//! on that explicit symbol:
//!
//! * [`specfun`]: complex log-Gamma, digamma and real `2F1`.
//! * [`symbol`]: problem parameters, the Hardy constant, `Theta_m` and its
//!   shifted variant, the singular kernel `K_0`, stability classification.
//! * [`indicial`]: poles of `1/(Theta_m - kappa)` with argument-principle
//!   certification and residues.
//! * [`greens`]: exponential-series Green's function, convolution and
//!   ODE-system solvers, asymptotic moments.
//! * [`profiles`]: bubble, Riesz kernel, Frobenius-type asymptotic fits.
//! * [`nonlinear`]: spectral Newton solver for `P w - kappa w = w^p`.
//! * [`identities`]: Wronskian and series Pohozaev checks.

pub mod error;
pub mod greens;
pub mod grid;
pub mod identities;
pub mod indicial;
pub mod nonlinear;
pub mod profiles;
mod quad;
pub mod specfun;
pub mod spectral;
pub mod symbol;

pub use error::{Error, Result};
pub use grid::GridFunction;
pub use num_complex::Complex64;
pub use symbol::{CylinderParams, ModeIndex};
