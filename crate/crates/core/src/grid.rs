//! Uniformly sampled functions of `t` and their CSV/JSON formats.

use std::io::{BufRead, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symbol::{CylinderParams, ModeIndex};

/// Default relative size of the end samples for a function to count as decayed.
pub const DEFAULT_DECAY_THRESHOLD: f64 = 1e-10;

/// Samples of a function on `t_min, t_min + step, ..., t_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    t_min: f64,
    step: f64,
    samples: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(t_min: f64, step: f64, samples: Vec<Complex64>) -> Result<Self> {
        if !(step > 0.0 && step.is_finite() && t_min.is_finite()) {
            return Err(Error::InvalidParams(format!("bad grid: t_min = {t_min}, step = {step}")));
        }
        if samples.is_empty() {
            return Err(Error::InvalidParams("a grid function needs at least one sample".into()));
        }
        if samples.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParams("non-finite sample".into()));
        }
        Ok(GridFunction { t_min, step, samples })
    }

    pub fn from_real(t_min: f64, step: f64, values: &[f64]) -> Result<Self> {
        Self::new(t_min, step, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    /// Number of points on `[t_min, t_max]`; the span must be a whole number of steps.
    pub fn point_count(t_min: f64, t_max: f64, step: f64) -> Result<usize> {
        let cells = (t_max - t_min) / step;
        let rounded = cells.round();
        if !(step > 0.0) || rounded < 0.0 || (cells - rounded).abs() > 1e-9 * rounded.max(1.0) {
            return Err(Error::InvalidParams(format!(
                "window [{t_min}, {t_max}] is not a whole number of steps {step}"
            )));
        }
        Ok(rounded as usize + 1)
    }

    pub fn from_fn(t_min: f64, t_max: f64, step: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        let n = Self::point_count(t_min, t_max, step)?;
        let samples = (0..n).map(|i| Complex64::new(f(t_min + i as f64 * step), 0.0)).collect();
        Self::new(t_min, step, samples)
    }

    pub fn from_complex_fn(
        t_min: f64,
        t_max: f64,
        step: f64,
        f: impl Fn(f64) -> Complex64,
    ) -> Result<Self> {
        let n = Self::point_count(t_min, t_max, step)?;
        Self::new(t_min, step, (0..n).map(|i| f(t_min + i as f64 * step)).collect())
    }

    pub fn zeros_like(&self) -> Self {
        GridFunction { samples: vec![Complex64::new(0.0, 0.0); self.len()], ..self.clone() }
    }

    pub fn with_samples(&self, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != self.len() {
            return Err(Error::GridMismatch(format!("{} samples for a grid of {}", samples.len(), self.len())));
        }
        Self::new(self.t_min, self.step, samples)
    }

    pub fn with_real(&self, values: &[f64]) -> Result<Self> {
        self.with_samples(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn t_min(&self) -> f64 {
        self.t_min
    }

    pub fn t_max(&self) -> f64 {
        self.t(self.len() - 1)
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn t(&self, i: usize) -> f64 {
        self.t_min + i as f64 * self.step
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.t(i)).collect()
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn real(&self) -> Vec<f64> {
        self.samples.iter().map(|z| z.re).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// Index of the sample nearest to `t`, if inside the window.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        let i = ((t - self.t_min) / self.step).round();
        (i >= 0.0 && (i as usize) < self.len()).then_some(i as usize)
    }

    /// Same sampling lattice (within rounding).
    pub fn same_grid(&self, other: &GridFunction) -> bool {
        self.len() == other.len()
            && (self.step - other.step).abs() <= 1e-12 * self.step
            && (self.t_min - other.t_min).abs() <= 1e-9 * self.step
    }

    pub fn require_same_grid(&self, other: &GridFunction) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "grids differ: [{}, {}]/{} vs [{}, {}]/{}",
                self.t_min, self.t_max(), self.step, other.t_min, other.t_max(), other.step
            )))
        }
    }

    /// Fails with a window error unless both end samples are below
    /// `threshold * max|samples|`.
    pub fn check_decay(&self, threshold: f64) -> Result<()> {
        let peak = self.max_abs();
        if peak == 0.0 {
            return Ok(());
        }
        let ends = self.samples[0].norm().max(self.samples[self.len() - 1].norm());
        if ends > threshold * peak {
            return Err(Error::Window(format!(
                "end samples reach {:.3e} of the peak, above the threshold {threshold:.1e}",
                ends / peak
            )));
        }
        Ok(())
    }

    /// Trapezoid rule for the integral of the samples.
    pub fn integral(&self) -> Complex64 {
        let n = self.len();
        let inner: Complex64 = self.samples.iter().sum();
        let ends = if n > 1 { (self.samples[0] + self.samples[n - 1]) * 0.5 } else { self.samples[0] };
        (inner - ends) * self.step
    }

    /// Linear interpolation; `None` outside the window.
    pub fn interpolate(&self, t: f64) -> Option<Complex64> {
        let x = (t - self.t_min) / self.step;
        if x < -1e-12 || x > (self.len() - 1) as f64 + 1e-12 {
            return None;
        }
        let i = (x.floor().max(0.0) as usize).min(self.len().saturating_sub(2));
        if self.len() == 1 {
            return Some(self.samples[0]);
        }
        let frac = x - i as f64;
        Some(self.samples[i] * (1.0 - frac) + self.samples[i + 1] * frac)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "t,re,im")?;
        for (i, z) in self.samples.iter().enumerate() {
            writeln!(out, "{:.16e},{:.16e},{:.16e}", self.t(i), z.re, z.im)?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }

    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        // leading `#` lines are comments
        let mut lines = input.lines().skip_while(|l| l.as_ref().map(|l| l.starts_with('#')).unwrap_or(false));
        let header = lines.next().ok_or_else(|| Error::Parse("empty CSV".into()))??;
        if header.trim() != "t,re,im" {
            return Err(Error::Parse(format!("expected header `t,re,im`, got `{}`", header.trim())));
        }
        let mut ts = Vec::new();
        let mut samples = Vec::new();
        for (row, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(Error::Parse(format!("row {}: expected 3 fields", row + 2)));
            }
            let parse = |s: &str| {
                s.parse::<f64>().map_err(|e| Error::Parse(format!("row {}: `{s}`: {e}", row + 2)))
            };
            ts.push(parse(fields[0])?);
            samples.push(Complex64::new(parse(fields[1])?, parse(fields[2])?));
        }
        if ts.is_empty() {
            return Err(Error::Parse("CSV has no data rows".into()));
        }
        let step = if ts.len() > 1 { (ts[ts.len() - 1] - ts[0]) / (ts.len() - 1) as f64 } else { 1.0 };
        for (i, &t) in ts.iter().enumerate() {
            if (t - (ts[0] + i as f64 * step)).abs() > 1e-9 * step.max(t.abs() * 1e-6) {
                return Err(Error::Parse(format!("non-uniform grid at row {}", i + 2)));
            }
        }
        Self::new(ts[0], step, samples)
    }

    pub fn from_csv_str(s: &str) -> Result<Self> {
        Self::read_csv(s.as_bytes())
    }

    pub fn to_document(&self, metadata: GridMetadata) -> GridDocument {
        GridDocument {
            metadata,
            grid: GridSpec { t_min: self.t_min, t_max: self.t_max(), step: self.step, len: self.len() },
            re: self.samples.iter().map(|z| z.re).collect(),
            im: self.samples.iter().map(|z| z.im).collect(),
        }
    }

    pub fn to_json(&self, metadata: GridMetadata) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_document(metadata))?)
    }

    pub fn from_json(s: &str) -> Result<(Self, GridMetadata)> {
        let doc: GridDocument = serde_json::from_str(s)?;
        doc.into_grid()
    }
}

/// Grid layout stored alongside the samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub t_min: f64,
    pub t_max: f64,
    pub step: f64,
    pub len: usize,
}

/// What produced a grid function.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GridMetadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<CylinderParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<ModeIndex>,
    #[serde(default)]
    pub provenance: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridDocument {
    pub metadata: GridMetadata,
    pub grid: GridSpec,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl GridDocument {
    pub fn into_grid(self) -> Result<(GridFunction, GridMetadata)> {
        if self.re.len() != self.grid.len || self.im.len() != self.grid.len {
            return Err(Error::Parse(format!(
                "grid declares {} points but has {} real and {} imaginary values",
                self.grid.len,
                self.re.len(),
                self.im.len()
            )));
        }
        let samples = self.re.iter().zip(&self.im).map(|(&r, &i)| Complex64::new(r, i)).collect();
        Ok((GridFunction::new(self.grid.t_min, self.grid.step, samples)?, self.metadata))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> GridFunction {
        GridFunction::from_complex_fn(-2.0, 2.0, 0.125, |t| {
            Complex64::new((-t * t).exp() / 3.0, t.sin() * 1e-300)
        })
        .unwrap()
    }

    #[test]
    fn point_counts() {
        assert_eq!(GridFunction::point_count(-30.0, 30.0, 1.0 / 128.0).unwrap(), 7681);
        assert!(GridFunction::point_count(0.0, 1.0, 0.3).is_err());
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let g = sample();
        let text = g.to_csv_string();
        assert!(text.starts_with("t,re,im\n"));
        let back = GridFunction::from_csv_str(&text).unwrap();
        assert_eq!(back.samples(), g.samples());
        assert_eq!(back.t_min(), g.t_min());
        assert!((back.step() - g.step()).abs() <= 1e-15);
        let commented = GridFunction::from_csv_str(&format!("# {{\"n\":3}}\n{text}")).unwrap();
        assert_eq!(commented.samples(), g.samples());
    }

    #[test]
    fn json_round_trip_keeps_metadata() {
        let g = sample();
        let meta = GridMetadata {
            params: Some(CylinderParams::new(3, 0.5, Some(2.0), 0.1).unwrap()),
            mode: Some(ModeIndex::new(1)),
            provenance: "unit test".into(),
        };
        let (back, m) = GridFunction::from_json(&g.to_json(meta.clone()).unwrap()).unwrap();
        assert_eq!(back, g);
        assert_eq!(m, meta);
    }

    #[test]
    fn bad_csv_is_rejected() {
        assert!(GridFunction::from_csv_str("x,y\n1,2").is_err());
        assert!(GridFunction::from_csv_str("t,re,im\n0,1,0\n1,1,0\n3,1,0\n").is_err());
        assert!(GridFunction::from_csv_str("t,re,im\n0,a,0\n").is_err());
    }

    #[test]
    fn decay_check_and_integral() {
        let g = GridFunction::from_fn(-10.0, 10.0, 0.01, |t| (-t * t).exp()).unwrap();
        g.check_decay(DEFAULT_DECAY_THRESHOLD).unwrap();
        assert!((g.integral().re - std::f64::consts::PI.sqrt()).abs() < 1e-12);
        let slow = GridFunction::from_fn(-10.0, 10.0, 0.01, |t| (-t.abs()).exp()).unwrap();
        assert!(matches!(slow.check_decay(DEFAULT_DECAY_THRESHOLD), Err(Error::Window(_))));
    }
}
