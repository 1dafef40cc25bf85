//! Wronskian and Pohozaev quantities assembled from the per-root components
//! `w_j = e^{-lambda_j |.|} * h` of a Green's series.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::greens::{
    build_greens, mode_components, tail_decay_rate, trapezoid_weights, GreensSeries, ModeComponent,
    OscillatoryComponent,
};
use crate::grid::GridFunction;
use crate::nonlinear::ProfileOperator;
use crate::spectral::{fft, frequencies};
use crate::symbol::{CylinderParams, ModeIndex, ModeSymbol};

/// Components of one function `w = Re sum_j C_j w_j + c_0 f`.
#[derive(Debug, Clone)]
pub struct ComponentSet {
    pub decaying: Vec<ModeComponent>,
    pub oscillatory: Option<OscillatoryComponent>,
}

impl ComponentSet {
    /// Components of `G_J * h` for real `h`.
    pub fn from_source(greens: &GreensSeries, h: &GridFunction) -> Self {
        let (decaying, oscillatory) = mode_components(greens, &h.real(), h.step());
        ComponentSet { decaying, oscillatory }
    }

    pub fn len(&self) -> usize {
        self.decaying.first().map(|c| c.values.len()).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `Re sum_j C_j w_j + c_0 f`.
    pub fn reassemble(&self) -> Vec<f64> {
        let mut w = vec![0.0; self.len()];
        for c in &self.decaying {
            for (wi, v) in w.iter_mut().zip(&c.values) {
                *wi += (c.coefficient * v).re;
            }
        }
        if let Some(o) = &self.oscillatory {
            for (wi, v) in w.iter_mut().zip(&o.values) {
                *wi += o.c0 * v;
            }
        }
        w
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        let mut out = self.clone();
        for c in &mut out.decaying {
            c.values.iter_mut().chain(c.derivative.iter_mut()).for_each(|v| *v *= alpha);
        }
        if let Some(o) = &mut out.oscillatory {
            o.values.iter_mut().chain(o.derivative.iter_mut()).for_each(|v| *v *= alpha);
        }
        out
    }

    /// Adds `e^{-lambda_0 t} * amplitude` (a homogeneous solution of the first
    /// decaying component's ODE) to that component.
    pub fn add_exponential(&mut self, times: &[f64], rate: f64, amplitude: f64) {
        let c = &mut self.decaying[0];
        for (i, &t) in times.iter().enumerate() {
            let e = amplitude * (-rate * t).exp();
            c.values[i] += e;
            c.derivative[i] -= rate * e;
        }
    }

    fn compatible(&self, other: &ComponentSet) -> Result<()> {
        let same = self.len() == other.len()
            && self.decaying.len() == other.decaying.len()
            && self.decaying.iter().zip(&other.decaying).all(|(a, b)| a.lambda == b.lambda)
            && self.oscillatory.is_some() == other.oscillatory.is_some();
        if same {
            Ok(())
        } else {
            Err(Error::GridMismatch("component sets come from different series or grids".into()))
        }
    }
}

/// `W = Re sum_j (C_j/lambda_j)(w_j w~_j' - w_j' w~_j) + (2 c_0/tau_0)(f f~' - f' f~)`.
pub fn wronskian_of_components(a: &ComponentSet, b: &ComponentSet) -> Result<Vec<f64>> {
    a.compatible(b)?;
    let n = a.len();
    let mut out = vec![0.0; n];
    for (ca, cb) in a.decaying.iter().zip(&b.decaying) {
        let weight = ca.coefficient / ca.lambda;
        for i in 0..n {
            let pair = ca.values[i] * cb.derivative[i] - ca.derivative[i] * cb.values[i];
            out[i] += (weight * pair).re;
        }
    }
    if let (Some(oa), Some(ob)) = (&a.oscillatory, &b.oscillatory) {
        let weight = 2.0 * oa.c0 / oa.tau;
        for i in 0..n {
            out[i] += weight * (oa.values[i] * ob.derivative[i] - oa.derivative[i] * ob.values[i]);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WronskianTrace {
    pub wronskian: GridFunction,
    /// Centered-difference derivative (one-sided at the ends).
    pub derivative: GridFunction,
    /// `W' + 2(h~ w - h w~)`.
    pub identity_residual: GridFunction,
    /// Sup of `2(|h~ w| + |h w~|)` over interior points.
    pub source_scale: f64,
}

impl WronskianTrace {
    /// Sup of the identity residual over interior points, relative to `source_scale`
    /// (or to the sup of `W'` when both sources vanish).
    pub fn relative_residual(&self) -> f64 {
        let r = self.identity_residual.real();
        let n = r.len();
        let worst = r[1..n - 1].iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let scale = if self.source_scale > 0.0 { self.source_scale } else { self.derivative.max_abs() };
        if scale == 0.0 {
            0.0
        } else {
            worst / scale
        }
    }

    /// `(max W - min W) / max |W|`.
    pub fn relative_variation(&self) -> f64 {
        let w = self.wronskian.real();
        let (lo, hi) = w.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
        let scale = w.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if scale == 0.0 {
            0.0
        } else {
            (hi - lo) / scale
        }
    }
}

fn centered_difference(v: &[f64], step: f64) -> Vec<f64> {
    let n = v.len();
    (0..n)
        .map(|i| match i {
            _ if n < 2 => 0.0,
            0 => (v[1] - v[0]) / step,
            _ if i == n - 1 => (v[n - 1] - v[n - 2]) / step,
            _ => (v[i + 1] - v[i - 1]) / (2.0 * step),
        })
        .collect()
}

/// Trace from explicit component sets and the sources and functions they represent.
pub fn wronskian_trace(
    a: &ComponentSet,
    b: &ComponentSet,
    w: &GridFunction,
    w_tilde: &GridFunction,
    h: &GridFunction,
    h_tilde: &GridFunction,
) -> Result<WronskianTrace> {
    for g in [w_tilde, h, h_tilde] {
        w.require_same_grid(g)?;
    }
    if a.len() != w.len() {
        return Err(Error::GridMismatch(format!("{} component samples for a grid of {}", a.len(), w.len())));
    }
    let values = wronskian_of_components(a, b)?;
    let derivative = centered_difference(&values, w.step());
    let (wr, wt, hr, ht) = (w.real(), w_tilde.real(), h.real(), h_tilde.real());
    let n = values.len();
    let residual: Vec<f64> = (0..n).map(|i| derivative[i] + 2.0 * (ht[i] * wr[i] - hr[i] * wt[i])).collect();
    let source_scale =
        (1..n.saturating_sub(1)).fold(0.0f64, |m, i| m.max(2.0 * ((ht[i] * wr[i]).abs() + (hr[i] * wt[i]).abs())));
    Ok(WronskianTrace {
        wronskian: w.with_real(&values)?,
        derivative: w.with_real(&derivative)?,
        identity_residual: w.with_real(&residual)?,
        source_scale,
    })
}

/// Wronskian of `w = G_J * h` and `w~ = G_J * h~`.
pub fn wronskian(
    greens: &GreensSeries,
    w: &GridFunction,
    w_tilde: &GridFunction,
    h: &GridFunction,
    h_tilde: &GridFunction,
) -> Result<WronskianTrace> {
    h.require_same_grid(h_tilde)?;
    let a = ComponentSet::from_source(greens, h);
    let b = ComponentSet::from_source(greens, h_tilde);
    wronskian_trace(&a, &b, w, w_tilde, h, h_tilde)
}

/// Two solutions of `w = e^{-+sigma_0 t}/C_0 + G_J * (V w)` for a shared potential.
#[derive(Debug, Clone)]
pub struct SharedPotentialPair {
    pub first: ComponentSet,
    pub second: ComponentSet,
    pub w: GridFunction,
    pub w_tilde: GridFunction,
    pub h: GridFunction,
    pub h_tilde: GridFunction,
    /// `2 (1 + C_0 int e^{sigma_0 s} h(s) ds) / C_0`, the value of the Wronskian
    /// read off from the `t -> +inf` end.
    pub expected: f64,
}

impl SharedPotentialPair {
    pub fn trace(&self) -> Result<WronskianTrace> {
        wronskian_trace(&self.first, &self.second, &self.w, &self.w_tilde, &self.h, &self.h_tilde)
    }
}

/// Solves both fixed points by iteration; needs `sup |V| * int |G_J| < 1`.
pub fn shared_potential_pair(greens: &GreensSeries, potential: &GridFunction) -> Result<SharedPotentialPair> {
    if greens.oscillatory.is_some() {
        return Err(Error::InvalidParams("shared-potential pairs need the stable regime".into()));
    }
    let leading = greens.terms[0];
    let (sigma, c0) = (leading.root.sigma, leading.coefficient.re);
    let v = potential.real();
    let times = potential.times();
    let solve = |sign: f64| -> Result<(ComponentSet, Vec<f64>, Vec<f64>)> {
        let seed: Vec<f64> = times.iter().map(|&t| (-sign * sigma * t).exp()).collect();
        let mut w = seed.clone();
        for _ in 0..500 {
            let h: Vec<f64> = v.iter().zip(&w).map(|(a, b)| a * b).collect();
            let (decaying, oscillatory) = mode_components(greens, &h, potential.step());
            let mut set = ComponentSet { decaying, oscillatory };
            set.add_exponential(&times, sign * sigma, 1.0 / c0);
            let next = set.reassemble();
            let change = next.iter().zip(&w).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            let scale = next.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            w = next;
            if change <= 1e-15 * scale {
                let h = v.iter().zip(&w).map(|(a, b)| a * b).collect();
                return Ok((set, w, h));
            }
        }
        Err(Error::Convergence("shared-potential fixed point did not settle in 500 sweeps".into()))
    };
    let (first, w, h) = solve(1.0)?;
    let (second, wt, ht) = solve(-1.0)?;
    let trap = trapezoid_weights(h.len());
    let moment: f64 =
        times.iter().zip(&h).zip(&trap).map(|((t, hi), q)| (sigma * t).exp() * hi * q).sum::<f64>() * potential.step();
    Ok(SharedPotentialPair {
        first,
        second,
        w: potential.with_real(&w)?,
        w_tilde: potential.with_real(&wt)?,
        h: potential.with_real(&h)?,
        h_tilde: potential.with_real(&ht)?,
        expected: 2.0 * (1.0 + c0 * moment) / c0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PohozaevReport {
    /// `Re sum (C_j/lambda_j) int (w_j')^2`, including the remainder beyond `J`.
    pub grad_sum: f64,
    /// `Re sum C_j lambda_j int w_j^2`, including the remainder beyond `J`.
    pub mass_sum: f64,
    /// `int w^{2n/(n - 2 gamma)}`.
    pub rhs_integral: f64,
    pub relative_spread: f64,
    pub truncation: usize,
    /// The sums over the `J + 1` explicit roots only.
    pub truncated_grad: f64,
    pub truncated_mass: f64,
    pub truncated_spread: f64,
    /// Measured decay rate of `w`, against `sigma_J`.
    pub tail_slope: f64,
    pub sigma_truncation: f64,
}

/// Max pairwise relative deviation.
pub fn relative_spread(values: &[f64]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, a) in values.iter().enumerate() {
        for b in &values[i + 1..] {
            let scale = a.abs().max(b.abs());
            if scale > 0.0 {
                worst = worst.max((a - b).abs() / scale);
            }
        }
    }
    worst
}

/// Residual bound accepted for the input profile.
pub const POHOZAEV_RESIDUAL_LIMIT: f64 = 1e-6;

/// Three-way Pohozaev comparison for a decaying even solution of `P w - kappa w = w^p`.
///
/// The first `J + 1` roots contribute through their real-space components; the
/// rest of the series is summed in Fourier space from the full symbol.
pub fn pohozaev_check(params: &CylinderParams, solution: &GridFunction, truncation: usize) -> Result<PohozaevReport> {
    params.validate()?;
    let nf = params.nf();
    let gamma = params.gamma;
    let greens = build_greens(params, ModeIndex::RADIAL, truncation)?;
    if greens.oscillatory.is_some() {
        return Err(Error::InvalidParams("Pohozaev check needs kappa below the threshold".into()));
    }
    let sigma_truncation = greens.terms.last().map(|t| t.root.sigma).unwrap_or(f64::NAN);
    let w = solution.real();
    if w.iter().all(|&x| x == 0.0) {
        return Ok(PohozaevReport {
            grad_sum: 0.0,
            mass_sum: 0.0,
            rhs_integral: 0.0,
            relative_spread: 0.0,
            truncation,
            truncated_grad: 0.0,
            truncated_mass: 0.0,
            truncated_spread: 0.0,
            tail_slope: f64::INFINITY,
            sigma_truncation,
        });
    }
    solution.check_decay(1e-10)?;
    let p = params.critical_exponent();
    let op = ProfileOperator::new(params, w.len(), solution.step());
    let residual = op.residual(&w).iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let scale = w.iter().fold(0.0f64, |m, x| m.max(x.abs().powf(p)));
    if residual > POHOZAEV_RESIDUAL_LIMIT * scale.max(1.0) {
        return Err(Error::InvalidParams(format!(
            "profile residual {residual:.3e} above {POHOZAEV_RESIDUAL_LIMIT:e}"
        )));
    }
    let step = solution.step();
    let n = w.len();
    let trap = trapezoid_weights(n);
    let h: Vec<f64> = w.iter().map(|x| x.abs().powf(p - 1.0) * x).collect();
    let rhs_integral: f64 = w.iter().zip(&trap).map(|(x, t)| x.abs().powf(p + 1.0) * t).sum::<f64>() * step;

    let (components, _) = mode_components(&greens, &h, step);
    let mut truncated_grad = 0.0;
    let mut truncated_mass = 0.0;
    for c in &components {
        let dd: Complex64 = c.derivative.iter().zip(&trap).map(|(d, t)| d * d * *t).sum::<Complex64>() * step;
        let vv: Complex64 = c.values.iter().zip(&trap).map(|(v, t)| v * v * *t).sum::<Complex64>() * step;
        truncated_grad += (c.coefficient / c.lambda * dd).re;
        truncated_mass += (c.coefficient * c.lambda * vv).re;
    }

    let (rem_grad, rem_mass) = fourier_remainder(params, &greens, &h, step)?;
    let grad_sum = truncated_grad + rem_grad;
    let mass_sum = truncated_mass + rem_mass;
    let normalize = |g: f64, m: f64| [g / (2.0 * gamma), m / (2.0 * (nf - gamma)), rhs_integral / nf];
    Ok(PohozaevReport {
        grad_sum,
        mass_sum,
        rhs_integral,
        relative_spread: relative_spread(&normalize(grad_sum, mass_sum)),
        truncation,
        truncated_grad,
        truncated_mass,
        truncated_spread: relative_spread(&normalize(truncated_grad, truncated_mass)),
        tail_slope: tail_decay_rate(solution),
        sigma_truncation,
    })
}

/// `(1/2 pi) int W(xi) |h^(xi)|^2` for the gradient and mass weights minus their
/// explicit partial fractions.
fn fourier_remainder(params: &CylinderParams, greens: &GreensSeries, h: &[f64], step: f64) -> Result<(f64, f64)> {
    let n = h.len();
    let symbol = ModeSymbol::radial(params);
    let spectrum = fft(&h.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>());
    let mut grad = 0.0;
    let mut mass = 0.0;
    for (xi, hk) in frequencies(n, step).into_iter().zip(&spectrum) {
        let jet = symbol.jet(Complex64::new(xi, 0.0))?;
        let d = jet.value.re - params.kappa;
        let slope = xi * jet.derivative.re / (d * d);
        let mut wg = slope;
        let mut wm = 2.0 / d - slope;
        for term in &greens.terms {
            let l = term.lambda();
            let q = l * l + xi * xi;
            let base = 4.0 * term.coefficient * l / (q * q);
            wg -= (base * xi * xi).re;
            wm -= (base * l * l).re;
        }
        let power = hk.norm_sqr();
        grad += wg * power;
        mass += wm * power;
    }
    let norm = step / n as f64;
    Ok((grad * norm, mass * norm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nonlinear::solve_profile;
    use crate::profiles::bubble_grid;
    use crate::symbol::hardy_constant;

    fn gaussian_sum(t_min: f64, t_max: f64, step: f64, bumps: &[(f64, f64, f64)]) -> GridFunction {
        GridFunction::from_fn(t_min, t_max, step, |t| bumps.iter().map(|(a, c, s)| a * (-((t - c) / s).powi(2)).exp()).sum())
            .unwrap()
    }

    #[test]
    fn wronskian_vanishes_on_the_diagonal() {
        let p = CylinderParams::new(3, 0.5, None, 0.0).unwrap();
        let g = build_greens(&p, ModeIndex::RADIAL, 6).unwrap();
        let h = gaussian_sum(-10.0, 10.0, 1.0 / 32.0, &[(1.0, 0.3, 1.0)]);
        let w = crate::greens::solve_ode_system(&g, &h).unwrap();
        let trace = wronskian(&g, &w, &w, &h, &h).unwrap();
        assert!(trace.wronskian.max_abs() < 1e-14);
    }

    #[test]
    fn derivative_identity_is_second_order() {
        let p = CylinderParams::new(3, 0.5, None, 0.3).unwrap();
        let g = build_greens(&p, ModeIndex::RADIAL, 8).unwrap();
        let residual = |step: f64| {
            let h = gaussian_sum(-12.0, 12.0, step, &[(1.0, -0.5, 0.8), (0.4, 1.5, 0.6)]);
            let ht = gaussian_sum(-12.0, 12.0, step, &[(0.7, 0.8, 1.1)]);
            let w = crate::greens::solve_ode_system(&g, &h).unwrap();
            let wt = crate::greens::solve_ode_system(&g, &ht).unwrap();
            wronskian(&g, &w, &wt, &h, &ht).unwrap().relative_residual()
        };
        let (coarse, fine) = (residual(1.0 / 16.0), residual(1.0 / 32.0));
        assert!(coarse < 1e-2, "{coarse}");
        let ratio = coarse / fine;
        assert!((3.0..5.0).contains(&ratio), "{ratio}");
    }

    #[test]
    fn unstable_series_includes_oscillation() {
        let p = CylinderParams::new(3, 0.5, None, 1.2).unwrap();
        let g = build_greens(&p, ModeIndex::RADIAL, 6).unwrap();
        assert!(g.oscillatory.is_some());
        let residual = |step: f64| {
            let h = gaussian_sum(-12.0, 12.0, step, &[(1.0, 0.0, 0.9)]);
            let ht = gaussian_sum(-12.0, 12.0, step, &[(1.0, 1.0, 0.7)]);
            let w = crate::greens::solve_ode_system(&g, &h).unwrap();
            let wt = crate::greens::solve_ode_system(&g, &ht).unwrap();
            wronskian(&g, &w, &wt, &h, &ht).unwrap().relative_residual()
        };
        let ratio = residual(1.0 / 16.0) / residual(1.0 / 32.0);
        assert!((3.0..5.0).contains(&ratio), "{ratio}");
    }

    #[test]
    fn shared_potential_is_constant() {
        let p = CylinderParams::new(3, 0.5, None, 0.0).unwrap();
        let g = build_greens(&p, ModeIndex::RADIAL, 12).unwrap();
        let v = gaussian_sum(-12.0, 12.0, 1.0 / 64.0, &[(0.2, 0.0, 1.0)]);
        let pair = shared_potential_pair(&g, &v).unwrap();
        let trace = pair.trace().unwrap();
        assert!(trace.relative_variation() < 1e-5, "{}", trace.relative_variation());
        let mid = trace.wronskian.real()[v.len() / 2];
        assert!((mid - pair.expected).abs() < 1e-5 * pair.expected.abs(), "{mid} vs {}", pair.expected);
    }

    #[test]
    fn pohozaev_on_the_bubble() {
        let p = CylinderParams::new(3, 0.5, None, 0.0).unwrap();
        let c = hardy_constant(&p).powf((p.nf() - 2.0 * p.gamma) / (4.0 * p.gamma));
        let b = bubble_grid(&p, -30.0, 30.0, 1.0 / 64.0).unwrap();
        let w = b.with_real(&b.real().iter().map(|x| c * x).collect::<Vec<_>>()).unwrap();
        let solved = solve_profile(&p, &w, 1e-10).unwrap().solution;
        let report = pohozaev_check(&p, &solved, 12).unwrap();
        assert!(report.relative_spread < 1e-3, "{report:?}");
        let zero = pohozaev_check(&p, &w.with_real(&vec![0.0; w.len()]).unwrap(), 12).unwrap();
        assert_eq!(zero.relative_spread, 0.0);
        assert_eq!(zero.rhs_integral, 0.0);
    }

    #[test]
    fn spread_helper() {
        assert_eq!(relative_spread(&[1.0, 1.0, 1.0]), 0.0);
        assert!((relative_spread(&[1.0, 0.9, 1.0]) - 0.1).abs() < 1e-15);
    }
}
