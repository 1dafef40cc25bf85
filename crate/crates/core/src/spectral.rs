//! Fourier multipliers on a uniform window via FFT (periodized).

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

/// Angular frequencies `xi_k = 2 pi k / (N step)` in FFT order.
pub fn frequencies(len: usize, step: f64) -> Vec<f64> {
    let scale = 2.0 * PI / (len as f64 * step);
    (0..len)
        .map(|k| {
            let k = if k <= len / 2 { k as f64 } else { k as f64 - len as f64 };
            k * scale
        })
        .collect()
}

/// Forward DFT (no normalization).
pub fn fft(values: &[Complex64]) -> Vec<Complex64> {
    let mut buf = values.to_vec();
    FftPlanner::new().plan_fft_forward(buf.len()).process(&mut buf);
    buf
}

/// Inverse DFT, normalized so that `ifft(fft(v)) = v`.
pub fn ifft(values: &[Complex64]) -> Vec<Complex64> {
    let mut buf = values.to_vec();
    let n = buf.len() as f64;
    FftPlanner::new().plan_fft_inverse(buf.len()).process(&mut buf);
    buf.iter_mut().for_each(|v| *v /= n);
    buf
}

/// Applies the multiplier `m(xi)` to periodic samples.
pub fn apply_multiplier(values: &[Complex64], step: f64, m: impl Fn(f64) -> Complex64) -> Vec<Complex64> {
    let xi = frequencies(values.len(), step);
    let mut spec = fft(values);
    for (s, &x) in spec.iter_mut().zip(&xi) {
        *s *= m(x);
    }
    ifft(&spec)
}

/// Real multiplier, precomputed per frequency.
pub fn apply_real_multiplier(values: &[f64], weights: &[f64]) -> Vec<f64> {
    let buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let mut spec = fft(&buf);
    for (s, &w) in spec.iter_mut().zip(weights) {
        *s *= w;
    }
    ifft(&spec).iter().map(|z| z.re).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn second_derivative_of_gaussian() {
        let step = 0.05;
        let ts: Vec<f64> = (0..801).map(|i| -20.0 + i as f64 * step).collect();
        let v: Vec<Complex64> = ts.iter().map(|&t| Complex64::new((-t * t).exp(), 0.0)).collect();
        let d2 = apply_multiplier(&v, step, |x| Complex64::new(-x * x, 0.0));
        for (t, d) in ts.iter().zip(&d2) {
            let want = (4.0 * t * t - 2.0) * (-t * t).exp();
            assert!((d.re - want).abs() < 1e-10);
        }
    }

    #[test]
    fn frequency_layout() {
        let f = frequencies(5, 1.0);
        let s = 2.0 * PI / 5.0;
        assert_eq!(f, vec![0.0, s, 2.0 * s, -2.0 * s, -s]);
    }
}
