//! Command-line surface and the job configuration echoed into every artifact.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hardy_core::{CylinderParams, Error, ModeIndex, Result};
use serde::Serialize;

/// Overrides the worker-thread budget of a job.
pub const THREADS_ENV: &str = "HARDY_THREADS";

#[derive(Debug, Parser)]
#[command(name = "hardy", version, about = "Fractional Hardy operators on the cylinder: symbols, roots, Green's functions, profiles")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Ode,
    Convolution,
}

/// Flags shared by every job.
#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// Dimension of the ambient space.
    #[arg(long)]
    pub n: u32,
    /// Order of the operator, in (0, 1).
    #[arg(long)]
    pub gamma: f64,
    /// Nonlinearity exponent (only needed by exponent-dependent quantities).
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<f64>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub kappa: f64,
    /// Spherical-harmonic degree.
    #[arg(long, default_value_t = 0)]
    pub mode: u32,
    #[arg(long, default_value_t = -30.0, allow_hyphen_values = true)]
    pub t_min: f64,
    #[arg(long, default_value_t = 30.0, allow_hyphen_values = true)]
    pub t_max: f64,
    #[arg(long, default_value_t = 0.0078125, allow_hyphen_values = true)]
    pub step: f64,
    /// Index `J` of the last kept root.
    #[arg(long, default_value_t = 12)]
    pub truncation: usize,
    #[arg(long, default_value_t = 1e-6, allow_hyphen_values = true)]
    pub tolerance: f64,
    /// Defaults to csv for tabular jobs and json for reports.
    #[arg(long, value_enum)]
    #[serde(skip)]
    pub format: Option<Format>,
    /// Write the artifact here instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Evaluate the mode symbol at real frequencies.
    Symbol {
        #[command(flatten)]
        #[serde(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_value = "0", allow_hyphen_values = true)]
        xi: Vec<f64>,
    },
    /// List the first indicial roots with residues.
    Poles {
        #[command(flatten)]
        #[serde(flatten)]
        common: Common,
        #[arg(long, default_value_t = 5)]
        count: usize,
    },
    /// Sample the truncated Green's series on the grid.
    Greens {
        #[command(flatten)]
        #[serde(flatten)]
        common: Common,
        /// Grow the truncation until the tail at |t| = 0.1 is below this relative size.
        #[arg(long, allow_hyphen_values = true)]
        rel_tol: Option<f64>,
    },
    /// Solve the linear equation for a source read from CSV.
    SolveLinear {
        #[command(flatten)]
        #[serde(flatten)]
        common: Common,
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Ode)]
        method: Method,
    },
    /// Newton solve of the nonlinear profile equation.
    SolveProfile {
        #[command(flatten)]
        #[serde(flatten)]
        common: Common,
        /// Initial guess as CSV; defaults to a scaled bubble.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Factor applied to the default bubble guess.
        #[arg(long, default_value_t = 1.1, allow_hyphen_values = true)]
        guess_scale: f64,
    },
    /// Residual of the explicit bubble.
    VerifyBubble {
        #[command(flatten)]
        #[serde(flatten)]
        common: Common,
    },
    /// Three-way Pohozaev comparison on a solved profile.
    Pohozaev {
        #[command(flatten)]
        #[serde(flatten)]
        common: Common,
        /// Profile as CSV; solved from the bubble guess when absent.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Wronskian trace for two sources, or for a shared potential.
    Wronskian {
        #[command(flatten)]
        #[serde(flatten)]
        common: Common,
        #[arg(long, requires = "source_tilde", conflicts_with = "potential")]
        source: Option<PathBuf>,
        #[arg(long, requires = "source")]
        source_tilde: Option<PathBuf>,
        /// Potential V for the pair w = e^{-+sigma_0 t}/C_0 + G * (V w).
        #[arg(long)]
        potential: Option<PathBuf>,
    },
    /// Fit an exponential tail to a sampled function.
    Frobenius {
        #[command(flatten)]
        #[serde(flatten)]
        common: Common,
        #[arg(long)]
        input: PathBuf,
        /// Fit window `lo,hi`.
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        window: Vec<f64>,
        /// Fit without indicial-root candidates.
        #[arg(long)]
        free: bool,
        /// Number of candidate roots.
        #[arg(long, default_value_t = 6)]
        count: usize,
    },
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::Symbol { common, .. }
            | Command::Poles { common, .. }
            | Command::Greens { common, .. }
            | Command::SolveLinear { common, .. }
            | Command::SolveProfile { common, .. }
            | Command::VerifyBubble { common }
            | Command::Pohozaev { common, .. }
            | Command::Wronskian { common, .. }
            | Command::Frobenius { common, .. } => common,
        }
    }

    pub fn default_format(&self) -> Format {
        match self {
            Command::Poles { .. } | Command::Greens { .. } | Command::SolveLinear { .. } | Command::Wronskian { .. } => {
                Format::Csv
            }
            _ => Format::Json,
        }
    }
}

/// Everything that determines a job's output.
#[derive(Debug, Clone, Serialize)]
pub struct JobConfig {
    #[serde(flatten)]
    pub command: Command,
    pub format: Format,
    pub threads: usize,
    pub version: &'static str,
    #[serde(skip)]
    pub params: CylinderParams,
}

impl JobConfig {
    pub fn new(command: Command, threads_env: Option<&str>) -> Result<Self> {
        let c = command.common();
        let params = CylinderParams::new(c.n, c.gamma, c.p, c.kappa)?;
        for (name, v) in [("tolerance", c.tolerance), ("step", c.step)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParams(format!("{name} must be positive, got {v}")));
            }
        }
        if !(c.t_min < c.t_max) {
            return Err(Error::InvalidParams(format!("empty window [{}, {}]", c.t_min, c.t_max)));
        }
        hardy_core::GridFunction::point_count(c.t_min, c.t_max, c.step)?;
        if let Command::Frobenius { window, .. } = &command {
            if window.len() != 2 || !(window[0] < window[1]) {
                return Err(Error::InvalidParams("--window needs lo,hi with lo < hi".into()));
            }
        }
        if let Command::Wronskian { source: None, potential: None, .. } = &command {
            return Err(Error::InvalidParams("wronskian needs --source/--source-tilde or --potential".into()));
        }
        let threads = match threads_env {
            None => 1,
            Some(s) => match s.trim().parse::<usize>() {
                Ok(k) if k > 0 => k,
                _ => return Err(Error::InvalidParams(format!("{THREADS_ENV} must be a positive integer, got `{s}`"))),
            },
        };
        let format = c.format.unwrap_or_else(|| command.default_format());
        Ok(JobConfig { command, format, threads, version: env!("CARGO_PKG_VERSION"), params })
    }

    pub fn common(&self) -> &Common {
        self.command.common()
    }

    pub fn mode(&self) -> ModeIndex {
        ModeIndex::new(self.common().mode)
    }

    /// One-line JSON echo of the configuration.
    pub fn echo(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Command {
        Cli::try_parse_from(std::iter::once("hardy").chain(args.iter().copied())).unwrap().command
    }

    #[test]
    fn defaults_follow_the_documented_grid() {
        let config = JobConfig::new(parse(&["poles", "--n", "3", "--gamma", "0.5"]), None).unwrap();
        let c = config.common();
        assert_eq!((c.t_min, c.t_max, c.step, c.truncation, c.tolerance), (-30.0, 30.0, 2f64.powi(-7), 12, 1e-6));
        assert_eq!(config.format, Format::Csv);
        let echo: serde_json::Value = serde_json::from_str(&config.echo()).unwrap();
        assert_eq!(echo["command"], "poles");
        assert_eq!(echo["count"], 5);
        assert_eq!(echo["gamma"], 0.5);
    }

    #[test]
    fn rejects_bad_configs() {
        let bad = |args: &[&str], env: Option<&str>| JobConfig::new(parse(args), env).unwrap_err().is_validation();
        assert!(bad(&["symbol", "--n", "3", "--gamma", "1.5"], None));
        assert!(bad(&["symbol", "--n", "3", "--gamma", "0.5", "--tolerance", "-1"], None));
        assert!(bad(&["symbol", "--n", "3", "--gamma", "0.5", "--step", "0.7"], None));
        assert!(bad(&["symbol", "--n", "3", "--gamma", "0.5"], Some("zero")));
        assert!(bad(&["wronskian", "--n", "3", "--gamma", "0.5"], None));
        assert_eq!(JobConfig::new(parse(&["symbol", "--n", "3", "--gamma", "0.5"]), Some("4")).unwrap().threads, 4);
    }

    #[test]
    fn lists_take_commas_and_negatives() {
        match parse(&["symbol", "--n", "3", "--gamma", "0.5", "--xi", "-1,0,2.5"]) {
            Command::Symbol { xi, .. } => assert_eq!(xi, vec![-1.0, 0.0, 2.5]),
            other => panic!("{other:?}"),
        }
    }
}
