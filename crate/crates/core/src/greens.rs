//! Green's function of `P_m - kappa` on the line as an exponential series, and
//! the particular solution `w = G * h`.
//!
//! With `G(t) = (2 pi)^{-1} \int e^{i xi t} / (Theta_m(xi) - kappa) d xi`, closing
//! the contour picks up the roots `z_j = tau_j + i sigma_j`:
//!
//! ```text
//! G(t) = sum_j Re(C_j e^{-lambda_j |t|})  [+ c_0 sin(tau_0 t) 1_{t<0}]
//! ```
//!
//! where `lambda_j = sigma_j + i tau_j`, `C_j = i / Theta'(z_j)` for roots on the
//! imaginary axis and `C_j = -2i conj(1/Theta'(z_j))` for a pair `+-tau_j + i sigma_j`.
//! Writing `C_j = c_j + i c'_j` gives the cosine/sine form. Above the threshold
//! the real roots `+-tau_0` are passed above, leaving the one-sided oscillation.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridFunction, DEFAULT_DECAY_THRESHOLD};
use crate::indicial::{IndicialRoot, RootFinder, RootSearch};
use crate::quad::gauss_legendre;
use crate::symbol::{CylinderParams, ModeIndex, ModeSymbol};

/// Default number of decaying terms beyond the first.
pub const DEFAULT_TRUNCATION: usize = 12;
/// Smallest `|t|` at which the stored tail bound is quoted.
pub const TAIL_REFERENCE_T: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// `kappa` below `Theta_m(0)`: every root decays.
    Stable,
    /// `kappa` above `Theta_m(0)`: a real pair `+-tau_0` gives a one-sided oscillation.
    Unstable,
}

/// One decaying term `Re(C e^{-lambda |t|})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GreensTerm {
    pub root: IndicialRoot,
    pub coefficient: Complex64,
}

impl GreensTerm {
    pub fn c(&self) -> f64 {
        self.coefficient.re
    }

    pub fn c_prime(&self) -> f64 {
        self.coefficient.im
    }

    pub fn lambda(&self) -> Complex64 {
        self.root.lambda()
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.coefficient * (-self.lambda() * t.abs()).exp()).re
    }
}

/// The non-decaying term `c_0 sin(tau_0 t)` on `t < 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillatoryTerm {
    pub tau: f64,
    pub c0: f64,
    pub root: IndicialRoot,
}

impl OscillatoryTerm {
    pub fn eval(&self, t: f64) -> f64 {
        if t < 0.0 {
            self.c0 * (self.tau * t).sin()
        } else {
            0.0
        }
    }
}

/// Truncated exponential series for the Green's function of one mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreensSeries {
    pub params: CylinderParams,
    pub mode: ModeIndex,
    pub regime: Regime,
    pub oscillatory: Option<OscillatoryTerm>,
    pub terms: Vec<GreensTerm>,
    /// Index of the last kept decaying root.
    pub truncation: usize,
    /// `|C|` and `sigma` of the first dropped root.
    pub tail_coefficient: f64,
    pub tail_sigma: f64,
    /// Conservative spacing of the dropped rates.
    pub tail_spacing: f64,
    /// `tail_estimate(TAIL_REFERENCE_T)`, which bounds the estimate for `|t| >= 0.1`.
    pub tail_bound: f64,
}

fn coefficient(root: &IndicialRoot) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    if root.tau == 0.0 {
        // purely real by symmetry; drop the rounding residue
        Complex64::new((i * root.residue).re, 0.0)
    } else {
        -2.0 * i * root.residue.conj()
    }
}

/// Series with `J + 1` terms (the oscillatory one counts as a term above threshold).
pub fn build_greens(params: &CylinderParams, mode: ModeIndex, truncation: usize) -> Result<GreensSeries> {
    let symbol = ModeSymbol::new(params, mode);
    let finder = RootFinder::new(params, mode, RootSearch::default())?;
    let height = 2.0 * symbol.a + 2.0 * truncation as f64 + 20.0;
    let roots = finder.first(truncation + 2, height)?;
    from_roots(params, mode, &roots, truncation)
}

/// Series from precomputed roots (at least `truncation + 2` of them).
pub fn from_roots(
    params: &CylinderParams,
    mode: ModeIndex,
    roots: &[IndicialRoot],
    truncation: usize,
) -> Result<GreensSeries> {
    if roots.len() < truncation + 2 {
        return Err(Error::InvalidParams(format!(
            "{} roots given, {} needed for truncation {truncation}",
            roots.len(),
            truncation + 2
        )));
    }
    let regime = if roots[0].sigma == 0.0 { Regime::Unstable } else { Regime::Stable };
    let (oscillatory, decaying) = match regime {
        Regime::Stable => (None, &roots[..=truncation]),
        Regime::Unstable => {
            let r = roots[0];
            let c0 = 2.0 * r.residue.re;
            (Some(OscillatoryTerm { tau: r.tau, c0, root: r }), &roots[1..=truncation])
        }
    };
    if decaying.iter().any(|r| r.sigma == 0.0) {
        return Err(Error::InvalidParams("more than one real root pair".into()));
    }
    let terms: Vec<GreensTerm> =
        decaying.iter().map(|r| GreensTerm { root: *r, coefficient: coefficient(r) }).collect();
    let dropped = roots[truncation + 1];
    let last = roots[truncation];
    let spacing = 0.9 * (dropped.sigma - last.sigma).clamp(0.5, 2.0);
    let mut series = GreensSeries {
        params: *params,
        mode,
        regime,
        oscillatory,
        terms,
        truncation,
        tail_coefficient: coefficient(&dropped).norm(),
        tail_sigma: dropped.sigma,
        tail_spacing: spacing,
        tail_bound: 0.0,
    };
    series.tail_bound = series.tail_estimate(TAIL_REFERENCE_T);
    Ok(series)
}

/// Grows `J` until the tail estimate at `t_min` is below `rel_tol * |G(t_min)|`.
pub fn build_greens_to_tolerance(
    params: &CylinderParams,
    mode: ModeIndex,
    t_min: f64,
    rel_tol: f64,
) -> Result<GreensSeries> {
    if !(t_min > 0.0 && rel_tol > 0.0) {
        return Err(Error::InvalidParams("t_min and rel_tol must be positive".into()));
    }
    let symbol = ModeSymbol::new(params, mode);
    let finder = RootFinder::new(params, mode, RootSearch::default())?;
    let mut truncation = DEFAULT_TRUNCATION;
    loop {
        let count = 2 * truncation + 2;
        let roots = finder.first(count, 2.0 * symbol.a + 2.0 * count as f64 + 20.0)?;
        for j in truncation..count - 1 {
            let series = from_roots(params, mode, &roots, j)?;
            let scale = series.eval(t_min).abs().max(series.eval(-t_min).abs());
            if series.tail_estimate(t_min) <= rel_tol * scale {
                return Ok(series);
            }
        }
        truncation = count - 2;
        if truncation > 2000 {
            return Err(Error::Convergence(format!("tail above {rel_tol} at t = {t_min} with 2000 terms")));
        }
    }
}

impl GreensSeries {
    /// Truncated series at `t` (finite at `t = 0`).
    pub fn eval(&self, t: f64) -> f64 {
        let decaying: f64 = self.terms.iter().map(|term| term.eval(t)).sum();
        decaying + self.oscillatory.map(|o| o.eval(t)).unwrap_or(0.0)
    }

    /// Estimate of the dropped terms at `t`: first dropped `|C|` times a geometric tail.
    pub fn tail_estimate(&self, t: f64) -> f64 {
        let a = t.abs();
        self.tail_coefficient * (-self.tail_sigma * a).exp() / (1.0 - (-self.tail_spacing * a).exp())
    }

    /// `sigma_0` of the leading decaying term.
    pub fn leading_rate(&self) -> f64 {
        self.terms[0].root.sigma
    }

    /// Fourier transform of the decaying part: `sum_j 2 Re[C_j lambda_j / (lambda_j^2 + xi^2)]`.
    pub fn transform(&self, xi: f64) -> f64 {
        self.terms
            .iter()
            .map(|term| {
                let l = term.lambda();
                2.0 * (term.coefficient * l / (l * l + xi * xi)).re
            })
            .sum()
    }

    /// `(c_j, c'_j)` pairs in order, starting with `c_0` of the oscillatory term if present.
    pub fn coefficient_table(&self) -> Vec<(IndicialRoot, f64, f64)> {
        let mut out = Vec::new();
        if let Some(o) = self.oscillatory {
            out.push((o.root, o.c0, 0.0));
        }
        out.extend(self.terms.iter().map(|t| (t.root, t.c(), t.c_prime())));
        out
    }

    /// Samples on a grid, with `G_J(0)` at the origin.
    pub fn sample(&self, t_min: f64, t_max: f64, step: f64) -> Result<GridFunction> {
        GridFunction::from_fn(t_min, t_max, step, |t| self.eval(t))
    }
}

/// Direct inverse Fourier integral of `1/(Theta_m - kappa)` at `t != 0` (stable regime).
///
/// The line of integration is moved to `Im xi = sign(t) sigma_0 / 2`, and past
/// `|Re xi| = X` it turns vertically so the exponential factor decays.
pub fn greens_quadrature_oracle(params: &CylinderParams, mode: ModeIndex, t: f64) -> Result<f64> {
    if t == 0.0 || !t.is_finite() {
        return Err(Error::Domain(format!("oracle needs finite t != 0, got {t}")));
    }
    let symbol = ModeSymbol::new(params, mode);
    let kappa = params.kappa;
    if kappa >= symbol.real_value(0.0) {
        return Err(Error::InvalidParams("the quadrature oracle covers the stable regime only".into()));
    }
    let sigma0 = first_axis_root(&symbol, kappa)?;
    let s = 0.5 * sigma0 * t.signum();
    let inv = |z: Complex64| -> Complex64 {
        match symbol.value(z) {
            Ok(v) => (v - kappa).inv(),
            // a pole of Theta is a zero of the integrand
            Err(_) => Complex64::new(0.0, 0.0),
        }
    };
    let x_max = 50.0;
    let integrand = |x: f64| -> Complex64 {
        let e = Complex64::new(0.0, x * t).exp();
        e * inv(Complex64::new(x, s)) + e.conj() * inv(Complex64::new(-x, s))
    };
    let width = 0.25f64.min(0.5 * s.abs());
    let coarse = panel_integral(&integrand, 0.0, x_max, width);
    let mut fine = panel_integral(&integrand, 0.0, x_max, 0.5 * width);
    let mut w = 0.5 * width;
    let mut tries = 0;
    while (fine - coarse).norm() > 1e-11 * fine.norm().max(1e-300) && tries < 4 {
        let finer = panel_integral(&integrand, 0.0, x_max, 0.5 * w);
        if (finer - fine).norm() <= 1e-11 * finer.norm() {
            fine = finer;
            break;
        }
        fine = finer;
        w *= 0.5;
        tries += 1;
    }
    if tries == 4 {
        return Err(Error::Quadrature(format!("finite part did not settle at t = {t}")));
    }
    // Vertical tails: e^{ixt} decays along x = X + i d y, e^{-ixt} along X - i d y.
    let d = t.signum();
    let a = t.abs();
    let i = Complex64::new(0.0, 1.0);
    let tail_integrand = |y: f64| -> Complex64 {
        let up = Complex64::new(x_max, d * y);
        let down = Complex64::new(x_max, -d * y);
        let f1 = (i * up * t).exp() * inv(up + Complex64::new(0.0, s));
        let f2 = (-i * down * t).exp() * inv(-down + Complex64::new(0.0, s));
        i * d * f1 - i * d * f2
    };
    let y_max = 60.0 / a;
    let tail = graded_integral(&tail_integrand, y_max, (0.25f64).min(0.5 / a));
    let total = fine + tail;
    Ok((-(s.abs()) * a).exp() / (2.0 * PI) * total.re)
}

fn first_axis_root(symbol: &ModeSymbol, kappa: f64) -> Result<f64> {
    let g = |s: f64| symbol.value(Complex64::new(0.0, s)).map(|v| v.re - kappa).unwrap_or(f64::NAN);
    let top = 2.0 * symbol.a;
    let samples = 400;
    let mut prev = (0.0, g(0.0));
    for k in 1..samples {
        let s = top * k as f64 / samples as f64;
        let gs = g(s);
        if gs <= 0.0 {
            let (mut lo, mut hi) = (prev.0, s);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if g(mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Ok(0.5 * (lo + hi));
        }
        prev = (s, gs);
    }
    // Close to the pole the sampled values may all stay positive.
    Ok(top * (1.0 - 0.5 / samples as f64))
}

fn panel_integral(f: &dyn Fn(f64) -> Complex64, a: f64, b: f64, width: f64) -> Complex64 {
    let (x, w) = gauss_legendre(16);
    let panels = ((b - a) / width).ceil().max(1.0) as usize;
    let h = (b - a) / panels as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        for (xi, wi) in x.iter().zip(&w) {
            sum += f(mid + 0.5 * h * xi) * (wi * 0.5 * h);
        }
    }
    sum
}

/// `int_0^y_max` with panels growing from `first` by 15% each up to `8 first`.
fn graded_integral(f: &dyn Fn(f64) -> Complex64, y_max: f64, first: f64) -> Complex64 {
    let (x, w) = gauss_legendre(16);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut a = 0.0;
    let mut h = first;
    while a < y_max {
        let b = (a + h).min(y_max);
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        for (xi, wi) in x.iter().zip(&w) {
            sum += f(mid + half * xi) * (wi * half);
        }
        a = b;
        h = (h * 1.15).min(8.0 * first);
    }
    sum
}

pub(crate) fn trapezoid_weights(len: usize) -> Vec<f64> {
    let mut w = vec![1.0; len];
    if len > 1 {
        w[0] = 0.5;
        w[len - 1] = 0.5;
    }
    w
}

fn check_window(h: &GridFunction) -> Result<()> {
    h.check_decay(DEFAULT_DECAY_THRESHOLD)
}

/// `w_p = G_J * h` by direct trapezoidal summation against the sampled series.
pub fn solve_convolution(greens: &GreensSeries, h: &GridFunction) -> Result<GridFunction> {
    check_window(h)?;
    let n = h.len();
    let step = h.step();
    let lags: Vec<f64> = (0..2 * n - 1).map(|l| greens.eval((l as f64 - (n - 1) as f64) * step)).collect();
    let wt = trapezoid_weights(n);
    let weighted: Vec<Complex64> = h.samples().iter().zip(&wt).map(|(v, w)| v * *w).collect();
    let out: Vec<Complex64> = (0..n)
        .map(|i| {
            // lag index of t_i - t_k is i - k + n - 1
            let row = &lags[i..i + n];
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, v) in weighted.iter().enumerate() {
                acc += v * row[n - 1 - k];
            }
            acc * step
        })
        .collect();
    h.with_samples(out)
}

/// One component `w_j = e^{-lambda_j |.|} * h` with its derivative.
#[derive(Debug, Clone)]
pub struct ModeComponent {
    pub lambda: Complex64,
    pub coefficient: Complex64,
    pub values: Vec<Complex64>,
    pub derivative: Vec<Complex64>,
}

/// The one-sided oscillatory component `sum_{t_k > t} sin(tau_0 (t - t_k)) h_k step`.
#[derive(Debug, Clone)]
pub struct OscillatoryComponent {
    pub tau: f64,
    pub c0: f64,
    pub values: Vec<f64>,
    pub derivative: Vec<f64>,
}

/// Exponential recurrences for each term, real input `h`.
pub fn mode_components(
    greens: &GreensSeries,
    h: &[f64],
    step: f64,
) -> (Vec<ModeComponent>, Option<OscillatoryComponent>) {
    let n = h.len();
    let wt = trapezoid_weights(n);
    let wh: Vec<f64> = h.iter().zip(&wt).map(|(a, b)| a * b).collect();
    let comps = greens
        .terms
        .iter()
        .map(|term| {
            let lambda = term.lambda();
            let decay = (-lambda * step).exp();
            let mut fwd = vec![Complex64::new(0.0, 0.0); n];
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..n {
                acc = acc * decay + wh[i];
                fwd[i] = acc;
            }
            let mut bwd = vec![Complex64::new(0.0, 0.0); n];
            let mut acc = Complex64::new(0.0, 0.0);
            for i in (0..n.saturating_sub(1)).rev() {
                acc = (acc + wh[i + 1]) * decay;
                bwd[i] = acc;
            }
            let values = (0..n).map(|i| (fwd[i] + bwd[i]) * step).collect();
            let derivative = (0..n).map(|i| -lambda * step * (fwd[i] - wh[i] - bwd[i])).collect();
            ModeComponent { lambda, coefficient: term.coefficient, values, derivative }
        })
        .collect();
    let osc = greens.oscillatory.map(|o| {
        let rot = Complex64::new(0.0, -o.tau * step).exp();
        let mut acc = Complex64::new(0.0, 0.0);
        let mut values = vec![0.0; n];
        let mut derivative = vec![0.0; n];
        for i in (0..n.saturating_sub(1)).rev() {
            acc = (acc + wh[i + 1]) * rot;
            // acc = sum_{k>i} e^{-i tau (t_k - t_i)} w_k h_k
            values[i] = acc.im * step;
            // the kernel derivative jumps to tau at s = t: half-weight endpoint
            derivative[i] = o.tau * (acc.re + 0.5 * h[i]) * step;
        }
        OscillatoryComponent { tau: o.tau, c0: o.c0, values, derivative }
    });
    (comps, osc)
}

fn combine(comps: &[ModeComponent], osc: &Option<OscillatoryComponent>, n: usize) -> Vec<f64> {
    let mut w = vec![0.0; n];
    for c in comps {
        for (wi, v) in w.iter_mut().zip(&c.values) {
            *wi += (c.coefficient * v).re;
        }
    }
    if let Some(o) = osc {
        for (wi, v) in w.iter_mut().zip(&o.values) {
            *wi += o.c0 * v;
        }
    }
    w
}

/// `w_p = Re sum_j C_j w_j` through the per-term recurrences.
pub fn solve_ode_system(greens: &GreensSeries, h: &GridFunction) -> Result<GridFunction> {
    check_window(h)?;
    let n = h.len();
    let re: Vec<f64> = h.samples().iter().map(|z| z.re).collect();
    let (c, o) = mode_components(greens, &re, h.step());
    let wr = combine(&c, &o, n);
    let wi = if h.samples().iter().any(|z| z.im != 0.0) {
        let im: Vec<f64> = h.samples().iter().map(|z| z.im).collect();
        let (c, o) = mode_components(greens, &im, h.step());
        combine(&c, &o, n)
    } else {
        vec![0.0; n]
    };
    h.with_samples(wr.iter().zip(&wi).map(|(&a, &b)| Complex64::new(a, b)).collect())
}

/// Moments `C^1 + i C^2 = int e^{lambda_j t} h(t) dt` governing `w_p` as `t -> +inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticMoment {
    pub root: IndicialRoot,
    pub c1: f64,
    pub c2: f64,
}

/// Moments for roots `0..=J`, after checking that `h` decays faster than `e^{-sigma_J t}`.
pub fn asymptotic_coefficients(
    roots: &[IndicialRoot],
    h: &GridFunction,
    truncation: usize,
) -> Result<Vec<AsymptoticMoment>> {
    if roots.len() <= truncation {
        return Err(Error::InvalidParams(format!("{} roots for truncation {truncation}", roots.len())));
    }
    let used = &roots[..=truncation];
    if h.max_abs() > 0.0 {
        let sigma_j = used[truncation].sigma;
        let slope = tail_decay_rate(h);
        if slope <= sigma_j {
            return Err(Error::DecayHypothesis { measured: slope, required: sigma_j });
        }
    }
    let wt = trapezoid_weights(h.len());
    Ok(used
        .iter()
        .map(|r| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, v) in h.samples().iter().enumerate() {
                let t = h.t(k);
                acc += Complex64::new(r.sigma * t, r.tau * t).exp() * v.re * wt[k];
            }
            acc *= h.step();
            AsymptoticMoment { root: *r, c1: acc.re, c2: acc.im }
        })
        .collect())
}

/// Decay rate of `|h|` over the last quarter of the window by log-linear regression
/// (`+inf` if the tail has underflowed).
pub fn tail_decay_rate(h: &GridFunction) -> f64 {
    let n = h.len();
    let start = n - n / 4;
    let pts: Vec<(f64, f64)> = (start..n)
        .filter_map(|i| {
            let a = h.samples()[i].norm();
            (a > 0.0).then(|| (h.t(i), a.ln()))
        })
        .collect();
    if pts.len() < 2 {
        return f64::INFINITY;
    }
    -crate::profiles::linear_fit(&pts).0
}

/// Leading behavior `sum_j Re[(c_j + i c'_j) e^{-lambda_j t} (C^1_j + i C^2_j)]` for large `t`.
pub fn predicted_tail(greens: &GreensSeries, moments: &[AsymptoticMoment], t: f64) -> f64 {
    greens
        .terms
        .iter()
        .zip(moments.iter().filter(|m| m.root.sigma > 0.0))
        .map(|(term, m)| (term.coefficient * (-term.lambda() * t).exp() * Complex64::new(m.c1, m.c2)).re)
        .sum()
}

/// Predicted decay of `f_1 * f_2` for `f_1 = O(e^{-a|t|})` and `f_2 = O(e^{-a_+ t})`, `O(e^{a_- t})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayPrediction {
    pub rate_plus: f64,
    pub rate_minus: f64,
    /// Equal rates: the bound picks up a factor `|t|`.
    pub log_plus: bool,
    pub log_minus: bool,
}

pub fn convolution_decay(a: f64, a_plus: f64, a_minus: f64) -> Result<DecayPrediction> {
    if !(a > 0.0) || a + a_plus <= 0.0 || a + a_minus <= 0.0 {
        return Err(Error::Domain(format!("need a > 0 and a + a_+- > 0, got ({a}, {a_plus}, {a_minus})")));
    }
    let close = |x: f64, y: f64| (x - y).abs() <= 1e-12 * x.abs().max(y.abs()).max(1.0);
    Ok(DecayPrediction {
        rate_plus: a.min(a_plus),
        rate_minus: a.min(a_minus),
        log_plus: close(a, a_plus),
        log_minus: close(a, a_minus),
    })
}
