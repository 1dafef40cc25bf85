//! Complex special functions: log-Gamma, Gamma, digamma on the complex plane
//! and the Gauss hypergeometric function for real argument in `[0, 1)`.

mod gamma;
mod hyp2f1;

pub use gamma::{
    cot_pi, digamma, gamma, gamma_real, log_gamma, log_sin_pi, psi_over_gamma, rgamma_real,
    EULER_GAMMA,
};
pub use hyp2f1::{hyp2f1, hyp2f1_taylor_coefficients};

use num_complex::Complex64;

/// Distance below which an argument is treated as sitting on a Gamma pole.
pub const POLE_TOLERANCE: f64 = 1e-14;

/// Returns the non-positive integer `k` if `z` lies within `tol` of it.
pub fn near_nonpositive_integer(z: Complex64, tol: f64) -> Option<i64> {
    let k = z.re.round();
    if k <= 0.0 && (z - Complex64::new(k, 0.0)).norm() < tol {
        Some(k as i64)
    } else {
        None
    }
}
