//! Explicit radial profiles and exponent extraction from sampled tails.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::indicial::IndicialRoot;
use crate::specfun::{hyp2f1, hyp2f1_taylor_coefficients, log_gamma};
use crate::spectral::apply_multiplier;
use crate::symbol::{constant_a, hardy_constant, CylinderParams, ModeSymbol};

/// Default acceptance bound on the normalized RMS misfit of a tail fit.
pub const DEFAULT_FIT_THRESHOLD: f64 = 0.05;

fn lgamma(x: f64) -> f64 {
    log_gamma(Complex64::new(x, 0.0)).expect("positive argument").re
}

/// `C = (Lambda Gamma(n/2 - gamma) / Gamma(n/2 + gamma))^{-(n - 2 gamma)/(4 gamma)}`.
pub fn bubble_constant(params: &CylinderParams) -> f64 {
    let (n, g) = (params.nf(), params.gamma);
    let log_base = hardy_constant(params).ln() + lgamma(n / 2.0 - g) - lgamma(n / 2.0 + g);
    (-(n - 2.0 * g) / (4.0 * g) * log_base).exp()
}

/// `w_inf(t) = C cosh(t)^{-(n - 2 gamma)/2}`.
pub fn bubble(params: &CylinderParams, t: f64) -> f64 {
    let decay = (params.nf() - 2.0 * params.gamma) / 2.0;
    // log cosh without overflow
    let a = t.abs();
    let log_cosh = a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2;
    bubble_constant(params) * (-decay * log_cosh).exp()
}

pub fn bubble_grid(params: &CylinderParams, t_min: f64, t_max: f64, step: f64) -> Result<GridFunction> {
    GridFunction::from_fn(t_min, t_max, step, |t| bubble(params, t))
}

/// Relative sup-norm of `Theta_0(D) w - Lambda w^p` for `w` on a window, with
/// `p = (n + 2 gamma)/(n - 2 gamma)` and the symbol applied by FFT.
pub fn profile_residual(params: &CylinderParams, w: &GridFunction, coefficient: f64) -> Result<f64> {
    w.check_decay(1e-10)?;
    let symbol = ModeSymbol::radial(params);
    let p = params.critical_exponent();
    let applied = apply_multiplier(w.samples(), w.step(), |xi| Complex64::new(symbol.real_value(xi), 0.0));
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for (a, v) in applied.iter().zip(w.samples()) {
        let rhs = coefficient * v.re.abs().powf(p - 1.0) * v.re;
        worst = worst.max((a.re - rhs).abs());
        scale = scale.max(rhs.abs());
    }
    if scale == 0.0 {
        return Ok(worst);
    }
    Ok(worst / scale)
}

/// Residual of the bubble equation `P w = Lambda w^p` on `[t_min, t_max]`.
pub fn bubble_residual(params: &CylinderParams, t_min: f64, t_max: f64, step: f64) -> Result<f64> {
    let w = bubble_grid(params, t_min, t_max, step)?;
    profile_residual(params, &w, hardy_constant(params))
}

/// The constant singular solution `w = A^{1/(p-1)}` of the shifted equation.
pub fn singular_profile(params: &CylinderParams) -> Result<f64> {
    let p = params.require_p()?;
    Ok(constant_a(params)?.powf(1.0 / (p - 1.0)))
}

/// `vartheta(z) = 2F1(n/2 - gamma, 1 - gamma; n/2; z^2)`, normalized to 1 at `z = 0`.
pub fn riesz_kernel_theta(params: &CylinderParams, z: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&z) {
        return Err(Error::Domain(format!("z = {z} outside [0, 1)")));
    }
    let (n, g) = (params.nf(), params.gamma);
    hyp2f1(n / 2.0 - g, 1.0 - g, n / 2.0, z * z)
}

/// Taylor coefficients of `vartheta` in powers of `z^2`.
pub fn riesz_taylor_coefficients(params: &CylinderParams, count: usize) -> Vec<f64> {
    let (n, g) = (params.nf(), params.gamma);
    hyp2f1_taylor_coefficients(n / 2.0 - g, 1.0 - g, n / 2.0, count)
}

/// Closed form of the `kappa = 0` radial Green's function,
/// `c_0 e^{-sigma_0 |t|} vartheta(e^{-|t|})` with `sigma_0 = (n - 2 gamma)/2`.
pub fn riesz_greens(params: &CylinderParams, c0: f64, t: f64) -> Result<f64> {
    let sigma0 = (params.nf() - 2.0 * params.gamma) / 2.0;
    Ok(c0 * (-sigma0 * t.abs()).exp() * riesz_kernel_theta(params, (-t.abs()).exp())?)
}

/// A fitted tail `e^{-sigma t}(a cos(tau t) + b sin(tau t))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticFit {
    pub sigma: f64,
    pub tau: f64,
    pub amplitude_cos: f64,
    pub amplitude_sin: f64,
    /// Normalized RMS misfit on the window.
    pub residual: f64,
    pub window: (f64, f64),
    /// Index of the chosen candidate root, if candidates were given.
    pub candidate: Option<usize>,
}

impl AsymptoticFit {
    pub fn eval(&self, t: f64) -> f64 {
        (-self.sigma * t).exp() * (self.amplitude_cos * (self.tau * t).cos() + self.amplitude_sin * (self.tau * t).sin())
    }
}

struct Window {
    t: Vec<f64>,
    y: Vec<f64>,
    lo: f64,
    hi: f64,
}

impl Window {
    /// Linear least squares for fixed `(sigma, tau)`; returns amplitudes and residual.
    fn project(&self, sigma: f64, tau: f64) -> (f64, f64, f64) {
        // basis normalized at the left end of the window
        let basis = |t: f64| {
            let e = (-sigma * (t - self.lo)).exp();
            (e * (tau * t).cos(), e * (tau * t).sin())
        };
        let (mut s11, mut s12, mut s22, mut r1, mut r2, mut yy) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        for (&t, &y) in self.t.iter().zip(&self.y) {
            let (b1, b2) = basis(t);
            s11 += b1 * b1;
            s12 += b1 * b2;
            s22 += b2 * b2;
            r1 += b1 * y;
            r2 += b2 * y;
            yy += y * y;
        }
        let det = s11 * s22 - s12 * s12;
        let (a, b) = if tau == 0.0 || det.abs() <= 1e-14 * s11 * s22 {
            (r1 / s11, 0.0)
        } else {
            ((r1 * s22 - r2 * s12) / det, (r2 * s11 - r1 * s12) / det)
        };
        let mut err = 0.0;
        for (&t, &y) in self.t.iter().zip(&self.y) {
            let (b1, b2) = basis(t);
            err += (y - a * b1 - b * b2).powi(2);
        }
        let shift = (sigma * self.lo).exp();
        (a * shift, b * shift, (err / yy).sqrt())
    }

    fn fit(&self, sigma: f64, tau: f64, candidate: Option<usize>) -> AsymptoticFit {
        let (a, b, residual) = self.project(sigma, tau);
        AsymptoticFit {
            sigma,
            tau,
            amplitude_cos: a,
            amplitude_sin: b,
            residual,
            window: (self.lo, self.hi),
            candidate,
        }
    }
}

/// Fits the tail of `w` on `window`, either against the given candidate roots
/// or, with no candidates, by estimating `sigma` and `tau` directly.
pub fn frobenius_fit(w: &GridFunction, window: (f64, f64), candidates: &[IndicialRoot]) -> Result<AsymptoticFit> {
    frobenius_fit_with(w, window, candidates, DEFAULT_FIT_THRESHOLD)
}

pub fn frobenius_fit_with(
    w: &GridFunction,
    window: (f64, f64),
    candidates: &[IndicialRoot],
    threshold: f64,
) -> Result<AsymptoticFit> {
    let (lo, hi) = window;
    if !(lo < hi) || lo < w.t_min() - 1e-12 || hi > w.t_max() + 1e-12 {
        return Err(Error::Window(format!(
            "fit window [{lo}, {hi}] not inside [{}, {}]",
            w.t_min(),
            w.t_max()
        )));
    }
    let (mut t, mut y) = (Vec::new(), Vec::new());
    for i in 0..w.len() {
        let ti = w.t(i);
        if ti >= lo - 1e-12 && ti <= hi + 1e-12 {
            t.push(ti);
            y.push(w.samples()[i].re);
        }
    }
    if t.len() < 4 {
        return Err(Error::Window("fewer than four samples in the fit window".into()));
    }
    if y.iter().all(|&v| v == 0.0) {
        return Err(Error::NoFit { residual: f64::INFINITY });
    }
    let win = Window { t, y, lo, hi };
    let best = if candidates.is_empty() {
        free_fit(&win)
    } else {
        candidates
            .iter()
            .enumerate()
            .map(|(k, r)| win.fit(r.sigma, r.tau, Some(k)))
            .min_by(|a, b| a.residual.total_cmp(&b.residual))
            .expect("non-empty candidates")
    };
    if !(best.residual <= threshold) {
        return Err(Error::NoFit { residual: best.residual });
    }
    Ok(best)
}

fn free_fit(win: &Window) -> AsymptoticFit {
    let crossings: Vec<f64> = win
        .t
        .windows(2)
        .zip(win.y.windows(2))
        .filter(|(_, y)| y[0] * y[1] < 0.0)
        .map(|(t, y)| t[0] - y[0] * (t[1] - t[0]) / (y[1] - y[0]))
        .collect();
    if crossings.is_empty() {
        let pts: Vec<(f64, f64)> = win
            .t
            .iter()
            .zip(&win.y)
            .filter(|(_, y)| **y != 0.0)
            .map(|(&t, &y)| (t, y.abs().ln()))
            .collect();
        let sigma0 = -linear_fit(&pts).0;
        let sigma = golden_section(|s| win.project(s, 0.0).2, sigma0 - 0.2 * sigma0.abs() - 1e-3, sigma0 + 0.2 * sigma0.abs() + 1e-3);
        return win.fit(sigma, 0.0, None);
    }
    let tau0 = if crossings.len() >= 2 {
        std::f64::consts::PI * (crossings.len() - 1) as f64 / (crossings[crossings.len() - 1] - crossings[0])
    } else {
        std::f64::consts::PI / (win.hi - win.lo)
    };
    // envelope from the largest |y| between consecutive crossings
    let mut edges = vec![win.lo];
    edges.extend(&crossings);
    edges.push(win.hi);
    let peaks: Vec<(f64, f64)> = edges
        .windows(2)
        .filter_map(|e| {
            win.t
                .iter()
                .zip(&win.y)
                .filter(|(t, _)| **t >= e[0] && **t <= e[1])
                .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
                .filter(|(_, y)| **y != 0.0)
                .map(|(&t, &y)| (t, y.abs().ln()))
        })
        .collect();
    let sigma0 = if peaks.len() >= 2 { -linear_fit(&peaks).0 } else { 0.0 };
    let objective = |x: &[f64]| win.project(x[0], x[1].abs()).2;
    let best = nelder_mead(&objective, &[sigma0, tau0], &[0.1 * sigma0.abs().max(0.1), 0.05 * tau0], 1e-13, 2000);
    win.fit(best[0], best[1].abs(), None)
}

/// Least-squares line `y = slope x + intercept`; returns `(slope, intercept)`.
pub fn linear_fit(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() < 1e-12 * (1.0 + a.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

fn nelder_mead(f: &dyn Fn(&[f64]) -> f64, x0: &[f64], scale: &[f64], tol: f64, max_iter: usize) -> Vec<f64> {
    let n = x0.len();
    let mut simplex: Vec<Vec<f64>> = vec![x0.to_vec()];
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += scale[i];
        simplex.push(x);
    }
    let mut values: Vec<f64> = simplex.iter().map(|x| f(x)).collect();
    for _ in 0..max_iter {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();
        if (values[n] - values[0]).abs() <= tol * (values[0].abs() + tol) {
            let spread = simplex.iter().map(|x| (0..n).map(|k| (x[k] - simplex[0][k]).abs()).fold(0.0, f64::max)).fold(0.0, f64::max);
            if spread < 1e-10 {
                break;
            }
        }
        let centroid: Vec<f64> = (0..n).map(|k| simplex[..n].iter().map(|x| x[k]).sum::<f64>() / n as f64).collect();
        let along = |c: f64| -> Vec<f64> { (0..n).map(|k| centroid[k] + c * (simplex[n][k] - centroid[k])).collect() };
        let xr = along(-1.0);
        let fr = f(&xr);
        if fr < values[0] {
            let xe = along(-2.0);
            let fe = f(&xe);
            if fe < fr {
                simplex[n] = xe;
                values[n] = fe;
            } else {
                simplex[n] = xr;
                values[n] = fr;
            }
        } else if fr < values[n - 1] {
            simplex[n] = xr;
            values[n] = fr;
        } else {
            let xc = if fr < values[n] { along(-0.5) } else { along(0.5) };
            let fc = f(&xc);
            if fc < values[n].min(fr) {
                simplex[n] = xc;
                values[n] = fc;
            } else {
                for i in 1..=n {
                    simplex[i] = (0..n).map(|k| simplex[0][k] + 0.5 * (simplex[i][k] - simplex[0][k])).collect();
                    values[i] = f(&simplex[i]);
                }
            }
        }
    }
    let best = (0..=n).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap();
    simplex[best].clone()
}
