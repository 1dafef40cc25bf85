//! Poles of `1/(Theta_m(z) - kappa)`: the indicial roots `tau + i sigma`.
//!
//! Roots on the imaginary axis come from sign changes of the real function
//! `Theta_m(i sigma) - kappa` between consecutive poles; roots on the real
//! axis (above the threshold) from `Theta_m(xi) = kappa`. Every horizontal
//! strip is then certified with an argument-principle winding count, and any
//! roots off both axes are isolated by box subdivision and complex Newton.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symbol::{CylinderParams, ModeIndex, ModeSymbol};

/// `|kappa - Theta_m(0)|` below which the first root sits at the origin.
pub const THRESHOLD_TOLERANCE: f64 = 1e-9;
/// Largest accepted `|Theta_m(z) - kappa|` at a returned root.
pub const ROOT_RESIDUAL_TOLERANCE: f64 = 1e-8;
/// Residues are refused below this `|Theta'|`.
pub const DEGENERATE_DERIVATIVE: f64 = 1e-10;

/// One pole `z = tau + i sigma` of `1/(Theta_m - kappa)` with `sigma, tau >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndicialRoot {
    pub sigma: f64,
    pub tau: f64,
    /// Residue of `1/(Theta_m - kappa)` at `tau + i sigma`, i.e. `1/Theta_m'`.
    pub residue: Complex64,
    pub index: usize,
}

impl IndicialRoot {
    pub fn z(&self) -> Complex64 {
        Complex64::new(self.tau, self.sigma)
    }

    /// Complex decay rate `sigma + i tau`.
    pub fn lambda(&self) -> Complex64 {
        Complex64::new(self.sigma, self.tau)
    }

    pub fn is_real_frequency(&self) -> bool {
        self.sigma == 0.0
    }
}

/// Tuning of the root search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootSearch {
    /// Half-width of the search rectangles; `None` means `4 (l + 10)`.
    pub tau_max: Option<f64>,
    pub strip_height: f64,
    pub newton_tolerance: f64,
    pub newton_max_iterations: usize,
    /// Largest phase increment accepted between samples of a contour.
    pub max_phase_step: f64,
    /// Off-axis roots are searched for with `tau >= axis_gap`.
    pub axis_gap: f64,
}

impl Default for RootSearch {
    fn default() -> Self {
        RootSearch {
            tau_max: None,
            strip_height: 2.0,
            newton_tolerance: 1e-12,
            newton_max_iterations: 50,
            max_phase_step: 0.3,
            axis_gap: 1e-2,
        }
    }
}

/// The first `count` roots with `sigma <= search_height`, default search settings.
pub fn find_roots(
    params: &CylinderParams,
    mode: ModeIndex,
    count: usize,
    search_height: f64,
) -> Result<Vec<IndicialRoot>> {
    RootFinder::new(params, mode, RootSearch::default())?.first(count, search_height)
}

/// `1/Theta_m'(z)` at a root, with the simple-root check.
pub fn residue_at(params: &CylinderParams, mode: ModeIndex, root: &IndicialRoot) -> Result<Complex64> {
    residue(&ModeSymbol::new(params, mode), root.z())
}

fn residue(symbol: &ModeSymbol, z: Complex64) -> Result<Complex64> {
    let d = symbol.jet(z)?.derivative;
    if d.norm() < DEGENERATE_DERIVATIVE {
        return Err(Error::DegenerateRoot { re: z.re, im: z.im, derivative_abs: d.norm() });
    }
    Ok(d.inv())
}

/// Root finder bound to one parameter set and mode.
pub struct RootFinder {
    symbol: ModeSymbol,
    kappa: f64,
    settings: RootSearch,
    x_max: f64,
    real_roots: Vec<f64>,
}

impl RootFinder {
    pub fn new(params: &CylinderParams, mode: ModeIndex, settings: RootSearch) -> Result<Self> {
        params.validate()?;
        let symbol = ModeSymbol::new(params, mode);
        let kappa = params.kappa;
        let threshold = symbol.real_value(0.0);
        if (kappa - threshold).abs() <= THRESHOLD_TOLERANCE {
            return Err(Error::Threshold { kappa, threshold });
        }
        let mut finder = RootFinder {
            symbol,
            kappa,
            settings,
            x_max: settings.tau_max.unwrap_or(4.0 * (f64::from(mode.degree) + 10.0)),
            real_roots: Vec::new(),
        };
        finder.real_roots = finder.scan_real_axis()?;
        // Contours stay within the nominal width; real roots beyond it are
        // certified by the one-dimensional scan alone.
        while finder.real_roots.iter().any(|&r| (r - finder.x_max).abs() < 0.5) {
            finder.x_max += 1.0;
        }
        Ok(finder)
    }

    pub fn symbol(&self) -> &ModeSymbol {
        &self.symbol
    }

    fn f(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.symbol.value(z)? - self.kappa)
    }

    fn axis_g(&self, sigma: f64) -> f64 {
        match self.symbol.value(Complex64::new(0.0, sigma)) {
            Ok(v) => v.re - self.kappa,
            Err(_) => f64::NAN,
        }
    }

    fn pole_height(&self, k: usize) -> f64 {
        2.0 * self.symbol.a + 2.0 * k as f64
    }

    fn zero_height(&self, k: usize) -> f64 {
        2.0 * self.symbol.b + 2.0 * k as f64
    }

    /// Positive real roots of `Theta_m(xi) = kappa`.
    fn scan_real_axis(&self) -> Result<Vec<f64>> {
        let g = |x: f64| self.symbol.real_value(x) - self.kappa;
        let mut roots = Vec::new();
        let mut x0 = 0.0;
        let mut g0 = g(x0);
        let mut x: f64 = 0.05;
        while x <= self.x_max.max(1.0) {
            let g1 = g(x);
            if g0 * g1 < 0.0 {
                roots.push(bisect(&g, x0, x, g0)?);
            }
            x0 = x;
            g0 = g1;
            x += 0.05 * (1.0 + x / 50.0);
        }
        // The symbol grows like |xi|^{2 gamma}; a root beyond the scan is bracketed geometrically.
        while g0 < 0.0 {
            if x0 > 1e15 {
                return Err(Error::NoRoot(format!("Theta stays below kappa = {} up to 1e15", self.kappa)));
            }
            let x1 = 2.0 * x0;
            let g1 = g(x1);
            if g1 > 0.0 {
                roots.push(bisect(&g, x0, x1, g0)?);
            }
            x0 = x1;
            g0 = g1;
        }
        Ok(roots)
    }

    /// Imaginary-axis roots with `lo < sigma < hi`.
    fn scan_axis(&self, lo: f64, hi: f64) -> Result<Vec<f64>> {
        let mut cuts = vec![0.0];
        let mut k = 0;
        while self.pole_height(k) < hi {
            cuts.push(self.pole_height(k));
            k += 1;
        }
        cuts.push(self.pole_height(k));
        let mut roots = Vec::new();
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b <= lo || a >= hi {
                continue;
            }
            // Chebyshev-like clustering resolves roots hugging a pole.
            let m = 400;
            let pts: Vec<f64> = (1..m)
                .map(|i| a + (b - a) * 0.5 * (1.0 - (PI * i as f64 / m as f64).cos()))
                .collect();
            let mut prev = if a == 0.0 { Some((0.0, self.axis_g(0.0))) } else { None };
            for &s in &pts {
                let gs = self.axis_g(s);
                if let Some((sp, gp)) = prev {
                    if gs == 0.0 {
                        roots.push(s);
                    } else if gp * gs < 0.0 {
                        roots.push(bisect(&|x| self.axis_g(x), sp, s, gp)?);
                    }
                }
                prev = Some((s, gs));
            }
        }
        roots.retain(|&s| s > lo && s < hi);
        roots.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        Ok(roots)
    }

    /// Total argument change of `f` along the segment `a -> b`.
    ///
    /// Each accepted step is checked against its two halves so that a phase
    /// wrap of nearly `2 pi` cannot pass as a small increment.
    fn arg_change(&self, a: Complex64, b: Complex64) -> Result<f64> {
        let max_step = self.settings.max_phase_step;
        let len = (b - a).norm();
        // Step cap grows with |z|: the symbol's phase varies on the scale |z| far out.
        let h_cap = |t: f64| ((0.5 + 0.05 * (a + (b - a) * t).norm()) / len).min(1.0);
        let eval = |t: f64| -> Result<Complex64> {
            let z = a + (b - a) * t;
            match self.f(z) {
                Ok(v) if v.norm() > 1e-300 && v.re.is_finite() && v.im.is_finite() => Ok(v),
                _ => Err(Error::Quadrature(format!("contour meets a zero or pole near {z}"))),
            }
        };
        let mut t: f64 = 0.0;
        let mut h: f64 = h_cap(0.0) / 4.0;
        let mut fa = eval(0.0)?;
        let mut total = 0.0;
        while t < 1.0 {
            h = h.min(1.0 - t).min(h_cap(t));
            let fm = eval(t + 0.5 * h)?;
            let fz = eval(t + h)?;
            let d = (fz / fa).arg();
            let d1 = (fm / fa).arg();
            let d2 = (fz / fm).arg();
            if d1.abs() > max_step || d2.abs() > max_step || (d1 + d2 - d).abs() > 0.1 {
                h *= 0.5;
                if h * len < 1e-13 {
                    return Err(Error::Quadrature(format!("phase not resolved near {}", a + (b - a) * t)));
                }
                continue;
            }
            total += d;
            t += h;
            fa = fz;
            if d.abs() < max_step / 3.0 {
                h *= 1.5;
            }
        }
        Ok(total)
    }

    /// Winding number of `f` around the positively oriented box.
    fn winding(&self, x0: f64, x1: f64, y0: f64, y1: f64) -> Result<i64> {
        let c = [
            Complex64::new(x0, y0),
            Complex64::new(x1, y0),
            Complex64::new(x1, y1),
            Complex64::new(x0, y1),
        ];
        let mut total = 0.0;
        for i in 0..4 {
            total += self.arg_change(c[i], c[(i + 1) % 4])?;
        }
        let w = total / (2.0 * PI);
        if (w - w.round()).abs() > 0.1 {
            return Err(Error::Quadrature(format!("winding {w} is not near an integer")));
        }
        Ok(w.round() as i64)
    }

    /// A horizontal level near `y` that keeps clear of axis poles, zeros and roots.
    fn clear_level(&self, y: f64, axis_roots: &[f64]) -> f64 {
        let mut y: f64 = y;
        for _ in 0..200 {
            let near = |v: f64| (v - y).abs() < 0.05;
            let k = ((y - 2.0 * self.symbol.a) / 2.0).round().max(0.0) as usize;
            let kz = ((y - 2.0 * self.symbol.b) / 2.0).round().max(0.0) as usize;
            if near(self.pole_height(k)) || near(self.zero_height(kz)) || axis_roots.iter().any(|&r| near(r)) {
                y += 0.0371;
            } else {
                return y;
            }
        }
        y
    }

    fn newton(&self, z0: Complex64) -> Option<Complex64> {
        let mut z = z0;
        for _ in 0..self.settings.newton_max_iterations {
            let jet = self.symbol.jet(z).ok()?;
            if jet.derivative.norm() == 0.0 {
                return None;
            }
            let dz = (jet.value - self.kappa) / jet.derivative;
            z -= dz;
            if !(z.re.is_finite() && z.im.is_finite()) {
                return None;
            }
            if dz.norm() <= self.settings.newton_tolerance * z.norm().max(1.0) {
                return Some(z);
            }
        }
        None
    }

    /// Locates all zeros inside a pole-free box, expecting `expected` of them.
    fn isolate(&self, bx: [f64; 4], expected: i64, out: &mut Vec<Complex64>, depth: usize) -> Result<()> {
        if expected <= 0 {
            return Ok(());
        }
        let [x0, x1, y0, y1] = bx;
        let (w, h) = (x1 - x0, y1 - y0);
        if expected == 1 && w.max(h) < 1.0 {
            let centre = Complex64::new(0.5 * (x0 + x1), 0.5 * (y0 + y1));
            if let Some(z) = self.newton(centre) {
                let inside = z.re >= x0 - 1e-9 && z.re <= x1 + 1e-9 && z.im >= y0 - 1e-9 && z.im <= y1 + 1e-9;
                if inside {
                    out.push(z);
                    return Ok(());
                }
            }
        }
        if depth > 60 {
            return Err(Error::Certification { lo: y0, hi: y1, expected, found: 0 });
        }
        for frac in [0.5, 0.45, 0.55, 0.4, 0.6, 0.37, 0.63] {
            let (a, b) = if w >= h {
                let xm = x0 + frac * w;
                ([x0, xm, y0, y1], [xm, x1, y0, y1])
            } else {
                let ym = y0 + frac * h;
                ([x0, x1, y0, ym], [x0, x1, ym, y1])
            };
            let (na, nb) = match (self.winding(a[0], a[1], a[2], a[3]), self.winding(b[0], b[1], b[2], b[3])) {
                (Ok(na), Ok(nb)) => (na, nb),
                _ => continue,
            };
            if na + nb != expected {
                continue;
            }
            self.isolate(a, na, out, depth + 1)?;
            self.isolate(b, nb, out, depth + 1)?;
            return Ok(());
        }
        Err(Error::Quadrature(format!("could not split the box {bx:?}")))
    }

    /// Roots with `y0 < sigma <= y1` (all of them certified), in the right half.
    fn strip(&self, y0: f64, y1: f64, first: bool) -> Result<Vec<Complex64>> {
        let x = self.x_max;
        let lo = if first { 0.0 } else { y0 };
        let axis = self.scan_axis(lo, y1)?;
        let poles = (0..).map(|k| self.pole_height(k)).take_while(|&p| p < y1).filter(|&p| p > y0).count() as i64;
        let zeros = self.winding(-x, x, y0, y1)? + poles;
        // Real roots and roots below the axis only occur in the first strip, which
        // is symmetric about the real axis.
        let inner_real = self.real_roots.iter().filter(|&&r| r < x).count() as i64;
        let on_axis = if first { 2 * inner_real } else { axis.len() as i64 };
        let off = zeros - on_axis;
        if off < 0 || off % 2 != 0 {
            return Err(Error::Certification { lo: y0, hi: y1, expected: zeros, found: on_axis });
        }
        let mut found: Vec<Complex64> = Vec::new();
        let half = off / 2;
        if half > 0 {
            let gap = self.settings.axis_gap;
            // In the first strip the right box also holds the real roots.
            let expected = half + if first { inner_real } else { 0 };
            let right = self.winding(gap, x, y0, y1)?;
            if right != expected {
                return Err(Error::Certification { lo: y0, hi: y1, expected, found: right });
            }
            self.isolate([gap, x, y0, y1], expected, &mut found, 0)?;
            if found.len() as i64 != expected {
                return Err(Error::Certification { lo: y0, hi: y1, expected, found: found.len() as i64 });
            }
        }
        // Real roots were already located by the axis scan.
        let mut roots: Vec<Complex64> = found.into_iter().filter(|z| z.im > 1e-10).collect();
        if first {
            roots.extend(self.real_roots.iter().map(|&t| Complex64::new(t, 0.0)));
        }
        roots.extend(axis.iter().map(|&s| Complex64::new(0.0, s)));
        Ok(roots)
    }

    /// The first `count` roots ordered by `(sigma, tau)`.
    pub fn first(&self, count: usize, search_height: f64) -> Result<Vec<IndicialRoot>> {
        if count == 0 {
            return Err(Error::InvalidParams("count must be at least 1".into()));
        }
        let mut zs: Vec<Complex64> = Vec::new();
        let mut axis_seen: Vec<f64> = Vec::new();
        // First strip: symmetric about the real axis, below every axis feature.
        let first_axis = self.scan_axis(0.0, self.pole_height(0) + 0.5)?;
        let mut lowest = self.zero_height(0).min(self.pole_height(0));
        if let Some(&r) = first_axis.first() {
            lowest = lowest.min(r);
        }
        let b = 0.5 * lowest;
        zs.extend(self.strip(-b, b, true)?);
        let mut y0 = b;
        while zs.len() < count {
            if y0 >= search_height {
                let found = self.finish(zs, usize::MAX)?;
                return Err(Error::Incomplete { found, requested: count, height: search_height });
            }
            axis_seen.extend(self.scan_axis(y0, y0 + 2.0 * self.settings.strip_height)?);
            let mut y1 = self.clear_level(y0 + self.settings.strip_height, &axis_seen);
            let mut attempt = 0;
            let more = loop {
                match self.strip(y0, y1, false) {
                    Ok(r) => break r,
                    Err(Error::Quadrature(_)) if attempt < 8 => {
                        attempt += 1;
                        y1 = self.clear_level(y1 + 0.0531, &axis_seen);
                    }
                    Err(e) => return Err(e),
                }
            };
            zs.extend(more);
            y0 = y1;
        }
        self.finish(zs, count)
    }

    fn finish(&self, mut zs: Vec<Complex64>, count: usize) -> Result<Vec<IndicialRoot>> {
        zs.sort_by(|a, b| a.im.total_cmp(&b.im).then(a.re.total_cmp(&b.re)));
        zs.truncate(count);
        zs.iter()
            .enumerate()
            .map(|(index, &z)| {
                let residual = self.f(z)?.norm();
                if residual > ROOT_RESIDUAL_TOLERANCE * self.kappa.abs().max(1.0) {
                    return Err(Error::Convergence(format!("root {z} has residual {residual:.3e}")));
                }
                Ok(IndicialRoot { sigma: z.im, tau: z.re, residue: residue(&self.symbol, z)?, index })
            })
            .collect()
    }
}

fn bisect(g: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64, mut ga: f64) -> Result<f64> {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let gm = g(m);
        if gm.is_nan() {
            return Err(Error::Convergence(format!("non-finite value at {m}")));
        }
        if gm == 0.0 {
            return Ok(m);
        }
        if (gm < 0.0) == (ga < 0.0) {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Outcome of the continuation in `kappa` for the second root reaching the real axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaPrime {
    /// The crossing value of `kappa`, or `+inf` when no crossing exists up to `searched_to`.
    pub value: f64,
    /// Largest `kappa` examined.
    pub searched_to: f64,
    /// Smallest `sigma_1` seen along the path.
    pub min_sigma1: f64,
}

/// Continues the radial roots in `kappa > Lambda` until the second root reaches
/// `sigma <= 1e-6`. Stops where the real root would leave the search width.
pub fn find_lambda_prime(params: &CylinderParams) -> Result<LambdaPrime> {
    let lambda = crate::symbol::hardy_constant(params);
    let symbol = ModeSymbol::radial(params);
    let search = RootSearch::default();
    let x_max = 4.0 * 10.0;
    let kappa_cap = symbol.real_value(0.5 * x_max);
    let height = 2.0 * symbol.a + 4.0;
    let sigma1 = |kappa: f64| -> Result<f64> {
        let p = params.with_kappa(kappa);
        let roots = RootFinder::new(&p, ModeIndex::RADIAL, search)
            .and_then(|f| f.first(2, height))
            .map_err(|e| Error::Continuation(format!("lost the roots at kappa = {kappa}: {e}")))?;
        if roots[0].sigma != 0.0 {
            return Err(Error::Continuation(format!("no real root at kappa = {kappa}")));
        }
        Ok(roots[1].sigma)
    };
    let mut min_sigma1 = f64::INFINITY;
    let mut prev = lambda;
    let mut delta = 1e-3 * lambda.max(1e-3);
    let mut kappa = lambda + delta;
    while kappa <= kappa_cap {
        let s = sigma1(kappa)?;
        min_sigma1 = min_sigma1.min(s);
        if s <= 1e-6 {
            let (mut lo, mut hi) = (prev, kappa);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if sigma1(mid)? <= 1e-6 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Ok(LambdaPrime { value: hi, searched_to: hi, min_sigma1: sigma1(hi)? });
        }
        prev = kappa;
        delta *= 1.5;
        kappa = (lambda + delta).min(if kappa < kappa_cap { kappa_cap } else { f64::INFINITY });
        if prev == kappa_cap {
            break;
        }
    }
    Ok(LambdaPrime { value: f64::INFINITY, searched_to: prev, min_sigma1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::hardy_constant;

    fn params(n: u32, gamma: f64, kappa: f64) -> CylinderParams {
        CylinderParams::new(n, gamma, None, kappa).unwrap()
    }

    #[test]
    fn riesz_roots() {
        for (n, g) in [(3, 0.5), (4, 0.3), (5, 0.8), (2, 0.25)] {
            let roots = find_roots(&params(n, g, 0.0), ModeIndex::RADIAL, 5, 40.0).unwrap();
            for (j, r) in roots.iter().enumerate() {
                let want = (f64::from(n) - 2.0 * g) / 2.0 + 2.0 * j as f64;
                assert!((r.sigma - want).abs() < 1e-10, "n={n} g={g} j={j}: {}", r.sigma);
                assert_eq!(r.tau, 0.0);
                assert_eq!(r.index, j);
            }
        }
    }

    #[test]
    fn residues_on_axis_are_imaginary() {
        let roots = find_roots(&params(3, 0.5, 0.3), ModeIndex::RADIAL, 4, 20.0).unwrap();
        for r in &roots {
            assert!(r.residue.re.abs() < 1e-12 * r.residue.norm());
        }
        // sigma cot(pi sigma / 2) = 0.3 has f'(sigma) = cot - (pi sigma/2) csc^2
        let s = roots[0].sigma;
        let fprime = 1.0 / (PI * s / 2.0).tan() - (PI * s / 2.0) / (PI * s / 2.0).sin().powi(2);
        // Theta'(i sigma) = -i f'(sigma)
        assert!((roots[0].residue - Complex64::new(0.0, 1.0 / fprime)).norm() < 1e-10);
    }

    #[test]
    fn stable_first_root() {
        let p = params(3, 0.5, 0.4);
        let roots = find_roots(&p, ModeIndex::RADIAL, 3, 20.0).unwrap();
        assert!(roots[0].sigma > 0.0 && roots[0].sigma < 1.0 && roots[0].tau == 0.0);
        let s = roots[0].sigma;
        assert!((s / (PI * s / 2.0).tan() - 0.4).abs() < 1e-12);
    }

    #[test]
    fn unstable_real_root() {
        let lambda = hardy_constant(&params(3, 0.5, 0.0));
        let p = params(3, 0.5, lambda + 0.2);
        let roots = find_roots(&p, ModeIndex::RADIAL, 3, 20.0).unwrap();
        assert_eq!(roots[0].sigma, 0.0);
        let t = roots[0].tau;
        assert!((t / (PI * t / 2.0).tanh() - (lambda + 0.2)).abs() < 1e-12);
        assert!(roots[1].sigma > 2.0);
    }

    #[test]
    fn threshold_and_incomplete() {
        let lambda = hardy_constant(&params(3, 0.5, 0.0));
        assert!(matches!(
            find_roots(&params(3, 0.5, lambda), ModeIndex::RADIAL, 1, 10.0),
            Err(Error::Threshold { .. })
        ));
        match find_roots(&params(3, 0.5, 0.0), ModeIndex::RADIAL, 10, 6.0) {
            Err(Error::Incomplete { found, requested, .. }) => {
                assert_eq!(requested, 10);
                assert!(found.len() >= 3 && found.len() < 10);
            }
            other => panic!("expected an incomplete search, got {other:?}"),
        }
    }

    #[test]
    fn higher_modes() {
        let p = params(3, 0.5, 0.0);
        let roots = find_roots(&p, ModeIndex::new(2), 3, 20.0).unwrap();
        let (_, b) = crate::symbol::mode_constants(&p, ModeIndex::new(2));
        for (j, r) in roots.iter().enumerate() {
            assert!((r.sigma - (2.0 * b + 2.0 * j as f64)).abs() < 1e-10);
        }
    }

    #[test]
    fn box_isolation_finds_planted_roots() {
        // Zeros of sigma cot(pi sigma / 2) at i, 3i inside a pole-free box that
        // is split several times before each root is alone.
        let f = RootFinder::new(&params(3, 0.5, 0.0), ModeIndex::RADIAL, RootSearch::default()).unwrap();
        let mut found = Vec::new();
        assert_eq!(f.winding(-0.7, 0.3, 0.5, 3.5).unwrap(), 2 - 1);
        f.isolate([-0.7, 0.3, 0.5, 1.5], 1, &mut found, 0).unwrap();
        f.isolate([-0.7, 0.3, 2.5, 3.5], 1, &mut found, 0).unwrap();
        assert!((found[0] - Complex64::new(0.0, 1.0)).norm() < 1e-12);
        assert!((found[1] - Complex64::new(0.0, 3.0)).norm() < 1e-12);
    }

    #[test]
    fn lambda_prime_is_unbounded_for_monotone_symbol() {
        let lp = find_lambda_prime(&params(3, 0.5, 0.0)).unwrap();
        assert!(lp.value.is_infinite());
        // the second root stays above the first pole 2A = 2
        assert!(lp.min_sigma1 > 2.0);
        assert!(lp.searched_to > 10.0);
    }
}
