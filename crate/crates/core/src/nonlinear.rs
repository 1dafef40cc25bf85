//! Newton solver for `P w - kappa w = |w|^{p-1} w` (critical `p`) on a window,
//! with `P` applied as the Fourier multiplier `Theta_0`.
//!
//! Each Newton correction solves `(L - p |w|^{p-1}) d = -F(w)`, `L = Theta_0 - kappa`,
//! by GMRES preconditioned on the right with `L^{-1}`.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::spectral::frequencies;
use crate::symbol::{hardy_constant, CylinderParams, ModeSymbol};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    pub max_iterations: usize,
    pub max_halvings: usize,
    /// Extra halvings allowed to restore positivity.
    pub negativity_retries: usize,
    pub gmres_restart: usize,
    pub gmres_tolerance: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            max_iterations: 50,
            max_halvings: 6,
            negativity_retries: 2,
            gmres_restart: 60,
            gmres_tolerance: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub solution: GridFunction,
    /// Sup-norm of `F(w)` at the returned iterate.
    pub residual_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    /// The zero function was given and returned unchanged.
    pub trivial: bool,
    pub residual_history: Vec<f64>,
}

/// The discretized operator `L = Theta_0(D) - kappa` on a periodized window.
pub struct ProfileOperator {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    symbol: Vec<f64>,
    p: f64,
}

impl ProfileOperator {
    pub fn new(params: &CylinderParams, len: usize, step: f64) -> Self {
        let mut planner = FftPlanner::new();
        let radial = ModeSymbol::radial(params);
        let symbol = frequencies(len, step).iter().map(|&xi| radial.real_value(xi) - params.kappa).collect();
        ProfileOperator {
            forward: planner.plan_fft_forward(len),
            inverse: planner.plan_fft_inverse(len),
            symbol,
            p: params.critical_exponent(),
        }
    }

    fn multiply(&self, v: &[f64], invert: bool) -> Vec<f64> {
        let n = v.len();
        let mut buf: Vec<Complex64> = v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.forward.process(&mut buf);
        for (b, &m) in buf.iter_mut().zip(&self.symbol) {
            *b *= if invert { 1.0 / m } else { m } / n as f64;
        }
        self.inverse.process(&mut buf);
        buf.iter().map(|z| z.re).collect()
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.multiply(v, false)
    }

    pub fn solve(&self, v: &[f64]) -> Vec<f64> {
        self.multiply(v, true)
    }

    /// `F(w) = L w - |w|^{p-1} w`.
    pub fn residual(&self, w: &[f64]) -> Vec<f64> {
        self.apply(w).iter().zip(w).map(|(lw, &x)| lw - x.abs().powf(self.p - 1.0) * x).collect()
    }
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Restarted GMRES for `A x = b`, zero initial guess.
fn gmres(a: &dyn Fn(&[f64]) -> Vec<f64>, b: &[f64], restart: usize, tol: f64, max_restarts: usize) -> (Vec<f64>, f64) {
    let n = b.len();
    let dot = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>();
    let bnorm = dot(b, b).sqrt();
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return (x, 0.0);
    }
    let mut rel = 1.0;
    for _ in 0..max_restarts {
        let ax = a(&x);
        let r: Vec<f64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let beta = dot(&r, &r).sqrt();
        rel = beta / bnorm;
        if rel <= tol {
            break;
        }
        let mut v: Vec<Vec<f64>> = vec![r.iter().map(|x| x / beta).collect()];
        let mut h = vec![vec![0.0; restart]; restart + 1];
        let (mut cs, mut sn) = (vec![0.0; restart], vec![0.0; restart]);
        let mut g = vec![0.0; restart + 1];
        g[0] = beta;
        let mut k_used = 0;
        for k in 0..restart {
            let mut wv = a(&v[k]);
            for i in 0..=k {
                h[i][k] = dot(&wv, &v[i]);
                for (w, vi) in wv.iter_mut().zip(&v[i]) {
                    *w -= h[i][k] * vi;
                }
            }
            h[k + 1][k] = dot(&wv, &wv).sqrt();
            for i in 0..k {
                let t = cs[i] * h[i][k] + sn[i] * h[i + 1][k];
                h[i + 1][k] = -sn[i] * h[i][k] + cs[i] * h[i + 1][k];
                h[i][k] = t;
            }
            let denom = (h[k][k] * h[k][k] + h[k + 1][k] * h[k + 1][k]).sqrt();
            cs[k] = h[k][k] / denom;
            sn[k] = h[k + 1][k] / denom;
            h[k][k] = denom;
            h[k + 1][k] = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] *= cs[k];
            k_used = k + 1;
            rel = g[k + 1].abs() / bnorm;
            let breakdown = denom == 0.0 || wv.iter().all(|&x| x == 0.0);
            if rel <= tol || breakdown {
                break;
            }
            let hn = dot(&wv, &wv).sqrt();
            v.push(wv.iter().map(|x| x / hn).collect());
        }
        let mut y = vec![0.0; k_used];
        for i in (0..k_used).rev() {
            let s: f64 = (i + 1..k_used).map(|j| h[i][j] * y[j]).sum();
            y[i] = (g[i] - s) / h[i][i];
        }
        for (j, yj) in y.iter().enumerate() {
            for (xi, vj) in x.iter_mut().zip(&v[j]) {
                *xi += yj * vj;
            }
        }
        if rel <= tol {
            break;
        }
    }
    (x, rel)
}

/// Newton iteration from `initial_guess` until `sup |F(w)| <= tolerance`.
pub fn solve_profile(params: &CylinderParams, initial_guess: &GridFunction, tolerance: f64) -> Result<SolveReport> {
    solve_profile_with(params, initial_guess, tolerance, &NewtonOptions::default())
}

pub fn solve_profile_with(
    params: &CylinderParams,
    initial_guess: &GridFunction,
    tolerance: f64,
    options: &NewtonOptions,
) -> Result<SolveReport> {
    params.validate()?;
    if !(tolerance > 0.0) {
        return Err(Error::InvalidParams("tolerance must be positive".into()));
    }
    let lambda = hardy_constant(params);
    if !(params.kappa >= 0.0 && params.kappa < lambda) {
        return Err(Error::InvalidParams(format!(
            "kappa = {} outside the stable range [0, {lambda})",
            params.kappa
        )));
    }
    let mut w = initial_guess.real();
    if w.iter().all(|&x| x == 0.0) {
        return Ok(SolveReport {
            solution: initial_guess.with_real(&w)?,
            residual_norm: 0.0,
            iterations: 0,
            converged: true,
            trivial: true,
            residual_history: vec![0.0],
        });
    }
    initial_guess.check_decay(1e-10)?;
    check_sign(&w, 0.0)?;
    let op = ProfileOperator::new(params, w.len(), initial_guess.step());
    let p = op.p;
    // Translations make the linearization nearly singular on odd functions.
    // An even guess keeps the iteration in the even subspace, where it is not.
    let even = is_even(initial_guess);
    if even {
        symmetrize(&mut w);
    }
    let mut f = op.residual(&w);
    let mut norm = sup(&f);
    let mut history = vec![norm];
    let mut iterations = 0;
    while norm > tolerance {
        if iterations >= options.max_iterations {
            return Err(Error::Divergence { iterations, residual: norm });
        }
        iterations += 1;
        let weight: Vec<f64> = w.iter().map(|x| p * x.abs().powf(p - 1.0)).collect();
        let a = |y: &[f64]| -> Vec<f64> {
            let v = op.solve(y);
            y.iter().zip(&v).zip(&weight).map(|((yi, vi), wi)| yi - wi * vi).collect()
        };
        let rhs: Vec<f64> = f.iter().map(|x| -x).collect();
        let (y, _) = gmres(&a, &rhs, options.gmres_restart, options.gmres_tolerance, 20);
        let mut delta = op.solve(&y);
        if even {
            symmetrize(&mut delta);
        }
        let mut alpha = 1.0;
        let mut halvings = 0;
        let mut sign_retries = 0;
        loop {
            let trial: Vec<f64> = w.iter().zip(&delta).map(|(a, d)| a + alpha * d).collect();
            let scale = sup(&trial);
            let negative = trial.iter().any(|&x| x < -(1e-12 * scale).max(tolerance));
            if negative {
                if sign_retries < options.negativity_retries {
                    sign_retries += 1;
                    alpha *= 0.5;
                    continue;
                }
                check_sign(&trial, tolerance)?;
            }
            let ft = op.residual(&trial);
            let nt = sup(&ft);
            if nt < norm || halvings >= options.max_halvings {
                w = trial;
                f = ft;
                norm = nt;
                break;
            }
            halvings += 1;
            alpha *= 0.5;
        }
        history.push(norm);
    }
    Ok(SolveReport {
        solution: initial_guess.with_real(&w)?,
        residual_norm: norm,
        iterations,
        converged: true,
        trivial: false,
        residual_history: history,
    })
}

fn is_even(g: &GridFunction) -> bool {
    let v = g.real();
    let n = v.len();
    let centred = (g.t_min() + g.t_max()).abs() < 1e-9 * g.step();
    centred && (0..n / 2).all(|i| (v[i] - v[n - 1 - i]).abs() <= 1e-12 * g.max_abs())
}

fn symmetrize(v: &mut [f64]) {
    let n = v.len();
    for i in 0..n / 2 {
        let m = 0.5 * (v[i] + v[n - 1 - i]);
        v[i] = m;
        v[n - 1 - i] = m;
    }
}

fn check_sign(w: &[f64], tolerance: f64) -> Result<()> {
    let scale = sup(w);
    let min = w.iter().cloned().fold(f64::INFINITY, f64::min);
    if min < -(1e-12 * scale).max(tolerance) {
        return Err(Error::Negativity { min_value: min });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::bubble_grid;

    fn scaled_bubble(params: &CylinderParams, factor: f64, step: f64) -> GridFunction {
        let c = hardy_constant(params).powf((params.nf() - 2.0 * params.gamma) / (4.0 * params.gamma));
        let b = bubble_grid(params, -30.0, 30.0, step).unwrap();
        b.with_real(&b.real().iter().map(|v| factor * c * v).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn recovers_scaled_bubble() {
        let p = CylinderParams::new(3, 0.5, None, 0.0).unwrap();
        let exact = scaled_bubble(&p, 1.0, 1.0 / 32.0);
        let report = solve_profile(&p, &scaled_bubble(&p, 1.1, 1.0 / 32.0), 1e-10).unwrap();
        assert!(report.converged && report.iterations <= 15);
        let err = report
            .solution
            .real()
            .iter()
            .zip(exact.real())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(err < 1e-6 * exact.max_abs(), "{err}");
        // parity
        let s = report.solution.real();
        let n = s.len();
        for i in 0..n / 2 {
            assert!((s[i] - s[n - 1 - i]).abs() < 1e-10);
        }
    }

    #[test]
    fn trivial_and_invalid_inputs() {
        let p = CylinderParams::new(3, 0.5, None, 0.0).unwrap();
        let zero = scaled_bubble(&p, 0.0, 0.25);
        let r = solve_profile(&p, &zero, 1e-8).unwrap();
        assert!(r.trivial && r.converged);
        let neg = scaled_bubble(&p, -1.0, 0.25);
        assert!(matches!(solve_profile(&p, &neg, 1e-8), Err(Error::Negativity { .. })));
        let above = p.with_kappa(1.0);
        assert!(matches!(solve_profile(&above, &scaled_bubble(&p, 1.0, 0.25), 1e-8), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn gmres_solves_small_system() {
        let m = [[4.0, 1.0, 0.0], [1.0, 3.0, 1.0], [0.0, 1.0, 2.0]];
        let a = |x: &[f64]| (0..3).map(|i| (0..3).map(|j| m[i][j] * x[j]).sum()).collect::<Vec<f64>>();
        let (x, rel) = gmres(&a, &[1.0, 2.0, 3.0], 2, 1e-14, 50);
        let r = a(&x);
        assert!(rel < 1e-13 && (r[0] - 1.0).abs() < 1e-12 && (r[2] - 3.0).abs() < 1e-12);
    }
}
