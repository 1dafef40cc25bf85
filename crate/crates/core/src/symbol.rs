//! Problem parameters and the Fourier symbols of the conformal fractional
//! Laplacian on the cylinder, projected onto spherical-harmonic modes.
//!
//! For a mode with sphere eigenvalue `mu`, the symbol is
//!
//! ```text
//! Theta_m(z) = 2^{2 gamma} Gamma(A_m + iz/2) Gamma(A_m - iz/2)
//!                        / (Gamma(B_m + iz/2) Gamma(B_m - iz/2))
//! ```
//!
//! with `A_m = (1 + gamma)/2 + sqrt((n/2 - 1)^2 + mu)/2` and `B_m = A_m - gamma`.
//! Its meromorphic extension is evaluated through log-Gamma sums; zeros come
//! from the poles of the denominator Gammas and are returned as exact zeros.

use std::f64::consts::LN_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{
    digamma, hyp2f1, log_gamma, near_nonpositive_integer, psi_over_gamma, POLE_TOLERANCE,
};

/// Tolerance on `|p A(p) - Lambda|` below which the exponent is classified critical.
pub const CRITICAL_TOLERANCE: f64 = 1e-9;

/// Dimension `n`, fractional order `gamma`, optional exponent `p` and potential `kappa`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CylinderParams {
    pub n: u32,
    pub gamma: f64,
    pub p: Option<f64>,
    pub kappa: f64,
}

impl CylinderParams {
    pub fn new(n: u32, gamma: f64, p: Option<f64>, kappa: f64) -> Result<Self> {
        let params = CylinderParams { n, gamma, p, kappa };
        params.validate()?;
        Ok(params)
    }

    /// Parameters at the critical exponent `p = (n + 2 gamma)/(n - 2 gamma)`.
    pub fn critical(n: u32, gamma: f64, kappa: f64) -> Result<Self> {
        let nf = f64::from(n);
        Self::new(n, gamma, Some((nf + 2.0 * gamma) / (nf - 2.0 * gamma)), kappa)
    }

    pub fn validate(&self) -> Result<()> {
        let nf = f64::from(self.n);
        if self.n < 2 {
            return Err(Error::InvalidParams(format!("dimension n = {} must be >= 2", self.n)));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::InvalidParams(format!("gamma = {} must lie in (0, 1)", self.gamma)));
        }
        if nf - 2.0 * self.gamma <= 0.0 {
            return Err(Error::InvalidParams("n - 2 gamma must be positive".into()));
        }
        if !self.kappa.is_finite() {
            return Err(Error::InvalidParams("kappa must be finite".into()));
        }
        if let Some(p) = self.p {
            let (lo, hi) = exponent_range(self.n, self.gamma);
            if !(p > lo && p <= hi * (1.0 + 1e-15)) {
                return Err(Error::InvalidParams(format!(
                    "p = {p} outside the admissible range ({lo}, {hi}]"
                )));
            }
        }
        Ok(())
    }

    pub fn with_kappa(&self, kappa: f64) -> Self {
        CylinderParams { kappa, ..*self }
    }

    pub fn nf(&self) -> f64 {
        f64::from(self.n)
    }

    pub fn critical_exponent(&self) -> f64 {
        exponent_range(self.n, self.gamma).1
    }

    pub fn require_p(&self) -> Result<f64> {
        self.p
            .ok_or_else(|| Error::InvalidParams("this operation needs the exponent p".into()))
    }

    /// `Q_0 = -(n - 2 gamma)/2 + 2 gamma/(p - 1)`; zero exactly at the critical exponent.
    pub fn q0(&self) -> Result<f64> {
        let p = self.require_p()?;
        Ok(q0_of(self.n, self.gamma, p))
    }

    pub fn is_critical(&self) -> bool {
        self.p
            .map(|p| (p - self.critical_exponent()).abs() <= 1e-14 * p)
            .unwrap_or(false)
    }
}

/// Admissible exponent interval `(n/(n-2 gamma), (n+2 gamma)/(n-2 gamma)]`.
pub fn exponent_range(n: u32, gamma: f64) -> (f64, f64) {
    let nf = f64::from(n);
    (nf / (nf - 2.0 * gamma), (nf + 2.0 * gamma) / (nf - 2.0 * gamma))
}

fn q0_of(n: u32, gamma: f64, p: f64) -> f64 {
    if (p - exponent_range(n, gamma).1).abs() <= 1e-14 * p {
        return 0.0;
    }
    -(f64::from(n) - 2.0 * gamma) / 2.0 + 2.0 * gamma / (p - 1.0)
}

/// Spherical-harmonic degree `l`; the sphere eigenvalue is `l (l + n - 2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ModeIndex {
    pub degree: u32,
}

impl ModeIndex {
    pub const RADIAL: ModeIndex = ModeIndex { degree: 0 };

    pub fn new(degree: u32) -> Self {
        ModeIndex { degree }
    }

    pub fn eigenvalue(&self, n: u32) -> f64 {
        let l = f64::from(self.degree);
        l * (l + f64::from(n) - 2.0)
    }

    /// Dimension of the degree-`l` harmonic space on `S^{n-1}`.
    pub fn multiplicity(&self, n: u32) -> u64 {
        let l = u64::from(self.degree);
        let d = u64::from(n);
        if d == 2 {
            return if l == 0 { 1 } else { 2 };
        }
        binomial(l + d - 1, d - 1) - if l >= 2 { binomial(l + d - 3, d - 1) } else { 0 }
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// `(A_m, B_m)` for the given mode.
pub fn mode_constants(params: &CylinderParams, mode: ModeIndex) -> (f64, f64) {
    let half_n = params.nf() / 2.0 - 1.0;
    let root = (half_n * half_n + mode.eigenvalue(params.n)).sqrt();
    let a = 0.5 + params.gamma / 2.0 + 0.5 * root;
    let b = 0.5 - params.gamma / 2.0 + 0.5 * root;
    (a, b)
}

/// `Lambda_{n,gamma} = 2^{2 gamma} (Gamma((n+2 gamma)/4) / Gamma((n-2 gamma)/4))^2`.
pub fn hardy_constant(params: &CylinderParams) -> f64 {
    hardy_constant_of(params.n, params.gamma)
}

pub fn hardy_constant_of(n: u32, gamma: f64) -> f64 {
    let nf = f64::from(n);
    let num = log_gamma(Complex64::new((nf + 2.0 * gamma) / 4.0, 0.0)).expect("positive argument");
    let den = log_gamma(Complex64::new((nf - 2.0 * gamma) / 4.0, 0.0)).expect("positive argument");
    (2.0 * gamma * LN_2 + 2.0 * (num.re - den.re)).exp()
}

/// The symbol `Theta_m` of one mode, with `A_m`, `B_m` precomputed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSymbol {
    pub a: f64,
    pub b: f64,
    log_prefactor: f64,
}

/// Value and first derivative of the symbol at a point.
#[derive(Debug, Clone, Copy)]
pub struct SymbolJet {
    pub value: Complex64,
    pub derivative: Complex64,
}

impl ModeSymbol {
    pub fn new(params: &CylinderParams, mode: ModeIndex) -> Self {
        let (a, b) = mode_constants(params, mode);
        ModeSymbol { a, b, log_prefactor: 2.0 * params.gamma * LN_2 }
    }

    pub fn radial(params: &CylinderParams) -> Self {
        Self::new(params, ModeIndex::RADIAL)
    }

    fn args(&self, z: Complex64) -> [Complex64; 4] {
        let u = Complex64::new(-z.im / 2.0, z.re / 2.0);
        [self.a + u, self.a - u, self.b + u, self.b - u]
    }

    /// `Theta_m(z)`; errors at the poles of the numerator Gammas.
    pub fn value(&self, z: Complex64) -> Result<Complex64> {
        let [ap, am, bp, bm] = self.args(z);
        let lap = log_gamma(ap)?;
        let lam = log_gamma(am)?;
        if near_nonpositive_integer(bp, POLE_TOLERANCE).is_some()
            || near_nonpositive_integer(bm, POLE_TOLERANCE).is_some()
        {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let l = self.log_prefactor + lap + lam - log_gamma(bp)? - log_gamma(bm)?;
        Ok(l.exp())
    }

    /// Symbol on the real frequency axis (real by conjugate symmetry).
    pub fn real_value(&self, xi: f64) -> f64 {
        self.value(Complex64::new(xi, 0.0)).map(|v| v.re).unwrap_or(f64::NAN)
    }

    /// Value and analytic derivative via digamma factors, finite at the zeros.
    pub fn jet(&self, z: Complex64) -> Result<SymbolJet> {
        let value = self.value(z)?;
        let [ap, am, bp, bm] = self.args(z);
        let lap = log_gamma(ap)?;
        let lam = log_gamma(am)?;
        let numerator_part = value * (digamma(ap)? - digamma(am)?);
        // value * psi(x) for x = B + u and x = B - u, routed through psi/Gamma
        // whenever x is near a pole of Gamma.
        let weighted = |x: Complex64, other: Complex64| -> Result<Complex64> {
            if x.re < 0.5 && (x - Complex64::new(x.re.round(), 0.0)).norm() < 1e-3 {
                let (ls, factor) = psi_over_gamma(x);
                let log_k = self.log_prefactor + lap + lam - log_gamma(other)?;
                Ok((log_k + ls).exp() * factor)
            } else {
                Ok(value * digamma(x)?)
            }
        };
        let bp_part = weighted(bp, bm)?;
        let bm_part = weighted(bm, bp)?;
        let derivative = Complex64::new(0.0, 0.5) * (numerator_part - bp_part + bm_part);
        Ok(SymbolJet { value, derivative })
    }
}

/// `Theta_m(z)` for the given parameters and mode.
pub fn theta(params: &CylinderParams, mode: ModeIndex, z: Complex64) -> Result<Complex64> {
    ModeSymbol::new(params, mode).value(z)
}

/// The `Q_0`-shifted symbol `Theta~_m(z) = Theta_m(z - i Q_0)`.
pub fn theta_shifted(params: &CylinderParams, mode: ModeIndex, z: Complex64) -> Result<Complex64> {
    let q0 = params.q0()?;
    theta(params, mode, z - Complex64::new(0.0, q0))
}

/// `A_{n,p,gamma}`: the shifted radial symbol at zero frequency.
pub fn constant_a(params: &CylinderParams) -> Result<f64> {
    let p = params.require_p()?;
    a_of_p(params.n, params.gamma, p)
}

fn a_of_p(n: u32, gamma: f64, p: f64) -> Result<f64> {
    let probe = CylinderParams { n, gamma, p: Some(p), kappa: 0.0 };
    let q0 = q0_of(n, gamma, p);
    Ok(ModeSymbol::radial(&probe).value(Complex64::new(0.0, -q0))?.re)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stability {
    Stable,
    Critical,
    Unstable,
}

/// Compares `p A(p)` with the Hardy constant.
pub fn stability_classify(params: &CylinderParams) -> Result<Stability> {
    let p = params.require_p()?;
    let excess = p * constant_a(params)? - hardy_constant(params);
    Ok(if excess.abs() <= CRITICAL_TOLERANCE {
        Stability::Critical
    } else if excess < 0.0 {
        Stability::Stable
    } else {
        Stability::Unstable
    })
}

/// The exponent `p_1` where `p A(p) = Lambda`, by bisection on the open
/// admissible interval. Only `n` and `gamma` of `params` are used.
pub fn solve_p1(params: &CylinderParams) -> Result<f64> {
    let (n, gamma) = (params.n, params.gamma);
    let lambda = hardy_constant_of(n, gamma);
    let excess = |p: f64| -> Result<f64> { Ok(p * a_of_p(n, gamma, p)? - lambda) };
    let (mut lo, mut hi) = exponent_range(n, gamma);
    let (f_lo, f_hi) = (excess(lo)?, excess(hi)?);
    if !(f_lo < 0.0 && f_hi > 0.0) {
        return Err(Error::NoRoot(format!(
            "p A(p) - Lambda = {f_lo} at p = {lo} and {f_hi} at p = {hi}"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if excess(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let p1 = 0.5 * (lo + hi);
    let residual = excess(p1)?;
    if residual.abs() > 1e-10 {
        return Err(Error::NoRoot(format!("bisection stalled with residual {residual}")));
    }
    Ok(p1)
}

/// Radial convolution kernel `K~_0(t)` with its free multiplicative constant set to 1.
pub fn kernel_k0(params: &CylinderParams, t: f64) -> Result<f64> {
    if t == 0.0 {
        return Err(Error::Domain("the kernel is singular at t = 0".into()));
    }
    let q0 = params.q0()?;
    let (nf, g) = (params.nf(), params.gamma);
    let x = (-2.0 * t.abs()).exp();
    let f = hyp2f1((nf + 2.0 * g) / 2.0, 1.0 + g, nf / 2.0, x)?;
    Ok((-q0 * t - (nf + 2.0 * g) / 2.0 * t.abs()).exp() * f)
}

/// Predicted exponential rates of `K~_0`: `K ~ e^{-rate_plus t}` as `t -> +inf`
/// and `K ~ e^{rate_minus t}` as `t -> -inf`.
pub fn kernel_k0_decay_rates(params: &CylinderParams) -> Result<(f64, f64)> {
    let q0 = params.q0()?;
    let base = 1.0 + params.gamma + (params.nf() - 2.0) / 2.0;
    Ok((base + q0, base - q0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn params(n: u32, gamma: f64) -> CylinderParams {
        CylinderParams::new(n, gamma, None, 0.0).unwrap()
    }

    #[test]
    fn hardy_constant_values() {
        assert!((hardy_constant(&params(3, 0.5)) - 2.0 / PI).abs() < 5e-14);
        assert!((hardy_constant(&params(4, 0.5)) - 1.094_219_807_613_238_3).abs() < 5e-14);
        assert!((hardy_constant(&params(5, 0.25)) - 1.259_997_097_072_343_8).abs() < 5e-14);
        // gamma -> 0 limit
        assert!((hardy_constant_of(4, 1e-9) - 1.0).abs() < 1e-7);
    }

    #[test]
    fn mode_constants_values() {
        let p = params(3, 0.5);
        assert_eq!(mode_constants(&p, ModeIndex::new(0)), (1.0, 0.5));
        let (a1, b1) = mode_constants(&p, ModeIndex::new(1));
        assert!((a1 - 1.5).abs() < 1e-15 && (b1 - 1.0).abs() < 1e-15);
        for n in 2..7 {
            for g in [0.1, 0.3, 0.7] {
                let p = params(n, g);
                let (a, b) = mode_constants(&p, ModeIndex::RADIAL);
                let nf = f64::from(n);
                assert!((a - (nf + 2.0 * g) / 4.0).abs() < 1e-15);
                assert!((b - (nf - 2.0 * g) / 4.0).abs() < 1e-15);
                for l in 0..6 {
                    let (a, b) = mode_constants(&p, ModeIndex::new(l));
                    assert!((a - b - g).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn multiplicities() {
        assert_eq!(ModeIndex::new(0).multiplicity(3), 1);
        assert_eq!(ModeIndex::new(1).multiplicity(3), 3);
        assert_eq!(ModeIndex::new(2).multiplicity(3), 5);
        assert_eq!(ModeIndex::new(1).multiplicity(4), 4);
        assert_eq!(ModeIndex::new(2).multiplicity(4), 9);
        assert_eq!(ModeIndex::new(3).multiplicity(2), 2);
    }

    #[test]
    fn closed_form_for_n3_half() {
        // Theta_0(xi) = xi coth(pi xi / 2) when n = 3, gamma = 1/2.
        let s = ModeSymbol::radial(&params(3, 0.5));
        for xi in [0.3, 1.0, 5.0, 17.5] {
            let want = xi / (PI * xi / 2.0).tanh();
            assert!((s.real_value(xi) - want).abs() < 1e-13 * want);
        }
        // imaginary axis: sigma cot(pi sigma / 2), zero at sigma = 1
        let v = s.value(Complex64::new(0.0, 1.0)).unwrap();
        assert_eq!(v, Complex64::new(0.0, 0.0));
        let v = s.value(Complex64::new(0.0, 0.5)).unwrap();
        assert!((v.re - 0.5 / (PI / 4.0).tan()).abs() < 1e-14);
        assert!(matches!(s.value(Complex64::new(0.0, 2.0)), Err(Error::Pole { .. })));
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let s = ModeSymbol::new(&params(4, 0.75), ModeIndex::new(1));
        for z in [Complex64::new(0.7, 0.3), Complex64::new(3.0, 4.1), Complex64::new(0.0, 2.2)] {
            let h = 1e-6;
            let fd = (s.value(z + h).unwrap() - s.value(z - h).unwrap()) / (2.0 * h);
            let d = s.jet(z).unwrap().derivative;
            assert!((fd - d).norm() < 1e-7 * d.norm().max(1.0), "{z}: {fd} vs {d}");
        }
        // exactly on a zero of Theta (n = 3, gamma = 1/2, sigma = 1): f(sigma) = sigma cot(pi sigma/2),
        // f'(1) = -pi/2 and Theta'(i sigma) = -i f'(sigma).
        let s = ModeSymbol::radial(&params(3, 0.5));
        let d = s.jet(Complex64::new(0.0, 1.0)).unwrap().derivative;
        assert!((d - Complex64::new(0.0, PI / 2.0)).norm() < 1e-13, "{d}");
    }

    #[test]
    fn shifted_symbol_and_constant_a() {
        let crit = CylinderParams::critical(3, 0.5, 0.0).unwrap();
        let z = Complex64::new(1.3, 0.2);
        assert_eq!(theta_shifted(&crit, ModeIndex::RADIAL, z).unwrap(), theta(&crit, ModeIndex::RADIAL, z).unwrap());
        assert!((constant_a(&crit).unwrap() - 2.0 / PI).abs() < 1e-14);
        // generic p against the Gamma-ratio closed form
        let (n, g, p) = (4u32, 0.6, 1.7);
        let prm = CylinderParams::new(n, g, Some(p), 0.0).unwrap();
        let s = g / (p - 1.0);
        let lg = |x: f64| log_gamma(Complex64::new(x, 0.0)).unwrap();
        let want = (2.0 * g * LN_2 + lg(2.0 - s) + lg(g + s) - lg(s) - lg(2.0 - g - s)).exp().re;
        assert!((constant_a(&prm).unwrap() - want).abs() < 1e-13 * want);
    }

    #[test]
    fn stability_and_p1() {
        let base = params(3, 0.5);
        let p1 = solve_p1(&base).unwrap();
        assert!(p1 > 1.5 && p1 < 2.0);
        let at = |p: f64| CylinderParams::new(3, 0.5, Some(p), 0.0).unwrap();
        assert_eq!(stability_classify(&at(p1)).unwrap(), Stability::Critical);
        assert_eq!(stability_classify(&at(1.5 + 1e-3)).unwrap(), Stability::Stable);
        assert_eq!(stability_classify(&at(2.0)).unwrap(), Stability::Unstable);
        let res = p1 * constant_a(&at(p1)).unwrap() - hardy_constant(&base);
        assert!(res.abs() <= 1e-10);
    }

    #[test]
    fn invalid_parameters() {
        assert!(CylinderParams::new(1, 0.5, None, 0.0).is_err());
        assert!(CylinderParams::new(3, 1.0, None, 0.0).is_err());
        assert!(CylinderParams::new(3, 0.5, Some(1.5), 0.0).is_err());
        assert!(CylinderParams::new(3, 0.5, Some(2.01), 0.0).is_err());
        assert!(CylinderParams::new(3, 0.5, Some(2.0), 0.0).is_ok());
        assert!(matches!(params(3, 0.5).q0(), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn kernel_closed_form_at_n3_half() {
        // 2F1(2, 3/2; 3/2; x) = (1-x)^{-2}
        let crit = CylinderParams::critical(3, 0.5, 0.0).unwrap();
        for t in [1e-4, 0.01, 1.0, -2.5] {
            let x = (-2.0 * f64::abs(t)).exp();
            let want = (-2.0 * f64::abs(t)).exp() / ((1.0 - x) * (1.0 - x));
            let got = kernel_k0(&crit, t).unwrap();
            assert!((got - want).abs() < 1e-12 * want, "t={t}: {got} vs {want}");
        }
        assert!(matches!(kernel_k0(&crit, 0.0), Err(Error::Domain(_))));
    }
}
