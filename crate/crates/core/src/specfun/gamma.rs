use std::f64::consts::PI;

use num_complex::Complex64;

use super::{near_nonpositive_integer, POLE_TOLERANCE};
use crate::error::{Error, Result};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const LN_PI: f64 = 1.144_729_885_849_400_2;
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// |z| threshold above which the asymptotic series is used directly.
const ASYMPTOTIC_RADIUS: f64 = 12.0;

/// B_{2k}, k = 1..9.
const BERNOULLI: [f64; 9] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
];

fn pole_error(z: Complex64) -> Error {
    Error::Pole { re: z.re, im: z.im }
}

/// Principal branch of `log Gamma(z)`, with the branch cut on the negative
/// real axis and the imaginary part continuous elsewhere.
pub fn log_gamma(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain(format!("non-finite argument {z}")));
    }
    if near_nonpositive_integer(z, POLE_TOLERANCE).is_some() {
        return Err(pole_error(z));
    }
    Ok(log_gamma_unchecked(z))
}

fn log_gamma_unchecked(z: Complex64) -> Complex64 {
    if z.im < 0.0 {
        return log_gamma_upper(z.conj()).conj();
    }
    log_gamma_upper(z)
}

// Im z >= 0.
fn log_gamma_upper(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        let branch = 2.0 * PI * (0.5 * z.re + 0.25).floor();
        return Complex64::new(LN_PI, branch) - log_sin_pi(z) - log_gamma_unchecked(1.0 - z);
    }
    let mut w = z;
    // Recurrence shift: the modulus through one product (one rounding in the
    // log), the argument as a sum so it stays on the principal sheet.
    let mut product = Complex64::new(1.0, 0.0);
    let mut arg = 0.0;
    while w.norm() < ASYMPTOTIC_RADIUS {
        product *= w;
        arg += w.arg();
        w += 1.0;
    }
    stirling(w) - Complex64::new(product.norm().ln(), arg)
}

fn stirling(w: Complex64) -> Complex64 {
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut term = inv;
    let mut series = Complex64::new(0.0, 0.0);
    for (k, b) in BERNOULLI.iter().enumerate() {
        let k = (k + 1) as f64;
        series += term * (b / (2.0 * k * (2.0 * k - 1.0)));
        term *= inv2;
    }
    (w - 0.5) * w.ln() - w + HALF_LN_2PI + series
}

/// `Gamma(z) = exp(log_gamma(z))`.
pub fn gamma(z: Complex64) -> Result<Complex64> {
    log_gamma(z).map(|l| l.exp())
}

/// Gamma on the real line, including negative non-integer arguments.
pub fn gamma_real(x: f64) -> Result<f64> {
    Ok(gamma(Complex64::new(x, 0.0))?.re)
}

/// `1/Gamma(x)`, which is entire; exactly zero at the poles of Gamma.
pub fn rgamma_real(x: f64) -> f64 {
    let z = Complex64::new(x, 0.0);
    if near_nonpositive_integer(z, POLE_TOLERANCE).is_some() {
        return 0.0;
    }
    (-log_gamma_unchecked(z)).exp().re
}

/// Principal `log sin(pi z)`, stable for large `|Im z|`.
pub fn log_sin_pi(z: Complex64) -> Complex64 {
    if z.im < 0.0 {
        return log_sin_pi(z.conj()).conj();
    }
    let xr = z.re - 2.0 * (0.5 * z.re).round();
    if z.im <= 20.0 {
        return sin_pi_reduced(Complex64::new(xr, z.im)).ln();
    }
    // sin(pi z) = (i/2) e^{-i pi z} (1 - e^{2 i pi z})
    let q = Complex64::from_polar((-2.0 * PI * z.im).exp(), 2.0 * PI * xr);
    let re = PI * z.im - std::f64::consts::LN_2 + (1.0 - q).ln().re;
    let im = wrap_angle(0.5 * PI - PI * xr + (1.0 - q).ln().im);
    Complex64::new(re, im)
}

fn wrap_angle(a: f64) -> f64 {
    let mut a = a % (2.0 * PI);
    if a <= -PI {
        a += 2.0 * PI;
    } else if a > PI {
        a -= 2.0 * PI;
    }
    a
}

// Re z already reduced to [-1, 1].
fn sin_pi_reduced(z: Complex64) -> Complex64 {
    let (s, c) = (PI * z.re).sin_cos();
    let y = PI * z.im;
    Complex64::new(s * y.cosh(), c * y.sinh())
}

fn cos_pi_reduced(z: Complex64) -> Complex64 {
    let (s, c) = (PI * z.re).sin_cos();
    let y = PI * z.im;
    Complex64::new(c * y.cosh(), -s * y.sinh())
}

/// `cot(pi z)`, accurate near the real axis and for large `|Im z|`.
pub fn cot_pi(z: Complex64) -> Complex64 {
    let xr = z.re - z.re.round();
    let zr = Complex64::new(xr, z.im);
    if z.im.abs() < 1.0 {
        return cos_pi_reduced(zr) / sin_pi_reduced(zr);
    }
    let i = Complex64::i();
    if z.im > 0.0 {
        let q = (2.0 * PI * i * zr).exp();
        i * (q + 1.0) / (q - 1.0)
    } else {
        let q = (-2.0 * PI * i * zr).exp();
        i * (1.0 + q) / (1.0 - q)
    }
}

/// Digamma `psi(z) = d/dz log Gamma(z)`.
pub fn digamma(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain(format!("non-finite argument {z}")));
    }
    if near_nonpositive_integer(z, POLE_TOLERANCE).is_some() {
        return Err(pole_error(z));
    }
    Ok(digamma_unchecked(z))
}

fn digamma_unchecked(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        return digamma_unchecked(1.0 - z) - PI * cot_pi(z);
    }
    let mut w = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while w.norm() < ASYMPTOTIC_RADIUS {
        shift += w.inv();
        w += 1.0;
    }
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut term = inv2;
    let mut series = Complex64::new(0.0, 0.0);
    for (k, b) in BERNOULLI.iter().enumerate() {
        let k = (k + 1) as f64;
        series += term * (b / (2.0 * k));
        term *= inv2;
    }
    w.ln() - 0.5 * inv - series - shift
}

/// `psi(x) / Gamma(x) = -d/dx (1/Gamma(x))`, finite at the poles of Gamma.
///
/// Returned as `(log_scale, factor)` with value `exp(log_scale) * factor`, so
/// callers can combine it with other large Gamma values without overflow.
pub fn psi_over_gamma(x: Complex64) -> (Complex64, Complex64) {
    let near_pole = x.re < 0.5 && x.im.abs() < 20.0;
    if !near_pole {
        return (-log_gamma_unchecked(x), digamma_unchecked(x));
    }
    // 1/Gamma(x) = Gamma(1-x) sin(pi x)/pi, psi(x) = psi(1-x) - pi cot(pi x)
    let one_minus = 1.0 - x;
    let xr = Complex64::new(x.re - 2.0 * (0.5 * x.re).round(), x.im);
    let bracket = digamma_unchecked(one_minus) * sin_pi_reduced(xr) - PI * cos_pi_reduced(xr);
    (log_gamma_unchecked(one_minus) - LN_PI, bracket)
}
