use std::fs;
use std::path::Path;

use hardy_core::greens::{build_greens, build_greens_to_tolerance, solve_convolution, solve_ode_system, GreensSeries};
use hardy_core::grid::GridMetadata;
use hardy_core::identities::{pohozaev_check, shared_potential_pair, wronskian, WronskianTrace};
use hardy_core::indicial::{find_roots, IndicialRoot};
use hardy_core::nonlinear::{solve_profile, SolveReport};
use hardy_core::profiles::{bubble_constant, bubble_grid, frobenius_fit};
use hardy_core::symbol::{hardy_constant, ModeSymbol};
use hardy_core::{Complex64, Error, GridFunction, Result};
use serde_json::{json, Value};

use crate::config::{Command, Format, JobConfig, Method};

/// What a job produced, before formatting.
pub enum Artifact {
    Json(Value),
    Csv(String),
}

/// Failure of a check the job itself performs (as opposed to a library error).
#[derive(Debug)]
pub struct CheckFailed {
    pub kind: &'static str,
    pub message: String,
    pub report: Value,
}

pub enum JobError {
    Library(Error),
    Check(CheckFailed),
}

impl From<Error> for JobError {
    fn from(e: Error) -> Self {
        JobError::Library(e)
    }
}

pub fn run(config: &JobConfig) -> std::result::Result<Artifact, JobError> {
    let c = config.common();
    let params = &config.params;
    let mode = config.mode();
    let csv = config.format == Format::Csv;
    let metadata = || GridMetadata {
        params: Some(*params),
        mode: Some(mode),
        provenance: config.echo(),
    };
    let grid_artifact = |g: &GridFunction| -> Result<Artifact> {
        Ok(if csv {
            Artifact::Csv(with_comment(config, &g.to_csv_string()))
        } else {
            Artifact::Json(serde_json::from_str(&g.to_json(metadata())?)?)
        })
    };
    let artifact = match &config.command {
        Command::Symbol { xi, .. } => {
            let symbol = ModeSymbol::new(params, mode);
            let values = par_map(config.threads, xi, |&x| symbol.value(Complex64::new(x, 0.0)));
            let values = values.into_iter().collect::<Result<Vec<_>>>()?;
            if csv {
                let mut out = String::from("xi,re,im\n");
                for (x, v) in xi.iter().zip(&values) {
                    out.push_str(&format!("{x:.16e},{:.16e},{:.16e}\n", v.re, v.im));
                }
                Artifact::Csv(with_comment(config, &out))
            } else {
                let rows: Vec<Value> = xi.iter().zip(&values).map(|(x, v)| json!({"xi": x, "re": v.re, "im": v.im})).collect();
                Artifact::Json(json!({"config": config, "values": rows}))
            }
        }
        Command::Poles { count, .. } => {
            let symbol = ModeSymbol::new(params, mode);
            let height = 2.0 * symbol.a + 2.0 * *count as f64 + 20.0;
            let roots = find_roots(params, mode, *count, height)?;
            if csv {
                Artifact::Csv(with_comment(config, &roots_csv(&roots)))
            } else {
                Artifact::Json(json!({"config": config, "roots": roots}))
            }
        }
        Command::Greens { rel_tol, .. } => {
            let series = match rel_tol {
                Some(tol) => build_greens_to_tolerance(params, mode, 0.1, *tol)?,
                None => build_greens(params, mode, c.truncation)?,
            };
            let grid = sample_series(config, &series)?;
            if csv {
                grid_artifact(&grid)?
            } else {
                Artifact::Json(json!({
                    "config": config,
                    "regime": series.regime,
                    "truncation": series.truncation,
                    "tail_bound": series.tail_bound,
                    "coefficients": series.coefficient_table().iter().map(|(r, a, b)| json!({"sigma": r.sigma, "tau": r.tau, "c": a, "c_prime": b})).collect::<Vec<_>>(),
                    "samples": serde_json::to_value(grid.to_document(metadata())).map_err(Error::from)?,
                }))
            }
        }
        Command::SolveLinear { input, method, .. } => {
            let h = read_grid(input)?;
            let series = build_greens(params, mode, c.truncation)?;
            let w = match method {
                Method::Ode => solve_ode_system(&series, &h)?,
                Method::Convolution => solve_convolution(&series, &h)?,
            };
            grid_artifact(&w)?
        }
        Command::SolveProfile { input, guess_scale, .. } => {
            let guess = match input {
                Some(path) => read_grid(path)?,
                None => bubble_guess(config, *guess_scale)?,
            };
            let report = solve_profile(params, &guess, c.tolerance)?;
            if csv {
                grid_artifact(&report.solution)?
            } else {
                Artifact::Json(solve_report_json(config, &report))
            }
        }
        Command::VerifyBubble { .. } => {
            let w = bubble_grid(params, c.t_min, c.t_max, c.step)?;
            let residual = hardy_core::profiles::profile_residual(params, &w, hardy_constant(params))?;
            let report = json!({
                "config": config,
                "bubble_constant": bubble_constant(params),
                "hardy_constant": hardy_constant(params),
                "residual": residual,
                "tolerance": c.tolerance,
                "within_tolerance": residual <= c.tolerance,
            });
            if residual > c.tolerance {
                return Err(JobError::Check(CheckFailed {
                    kind: "VerificationFailed",
                    message: format!("bubble residual {residual:.3e} above {:.1e}", c.tolerance),
                    report,
                }));
            }
            Artifact::Json(report)
        }
        Command::Pohozaev { input, .. } => {
            let (solution, solve) = match input {
                Some(path) => (read_grid(path)?, None),
                None => {
                    let report = solve_profile(params, &bubble_guess(config, 1.0)?, c.tolerance)?;
                    (report.solution.clone(), Some(json!({"iterations": report.iterations, "residual_norm": report.residual_norm})))
                }
            };
            let report = pohozaev_check(params, &solution, c.truncation)?;
            Artifact::Json(json!({"config": config, "solve": solve, "report": report}))
        }
        Command::Wronskian { source, source_tilde, potential, .. } => {
            let series = build_greens(params, mode, c.truncation)?;
            let (trace, expected) = match (source, source_tilde, potential) {
                (Some(a), Some(b), _) => {
                    let (h, ht) = (read_grid(a)?, read_grid(b)?);
                    let w = solve_ode_system(&series, &h)?;
                    let wt = solve_ode_system(&series, &ht)?;
                    (wronskian(&series, &w, &wt, &h, &ht)?, None)
                }
                (_, _, Some(v)) => {
                    let pair = shared_potential_pair(&series, &read_grid(v)?)?;
                    (pair.trace()?, Some(pair.expected))
                }
                _ => return Err(Error::InvalidParams("wronskian needs two sources or a potential".into()).into()),
            };
            if csv {
                grid_artifact(&trace.wronskian)?
            } else {
                Artifact::Json(wronskian_json(config, &trace, expected, &metadata())?)
            }
        }
        Command::Frobenius { input, window, free, count, .. } => {
            let w = read_grid(input)?;
            let candidates = if *free {
                Vec::new()
            } else {
                let symbol = ModeSymbol::new(params, mode);
                find_roots(params, mode, *count, 2.0 * symbol.a + 2.0 * *count as f64 + 20.0)?
            };
            let fit = frobenius_fit(&w, (window[0], window[1]), &candidates)?;
            Artifact::Json(json!({"config": config, "fit": fit}))
        }
    };
    Ok(artifact)
}

fn with_comment(config: &JobConfig, body: &str) -> String {
    format!("# {}\n{body}", config.echo())
}

fn roots_csv(roots: &[IndicialRoot]) -> String {
    let mut out = String::from("index,sigma,tau,residue_re,residue_im\n");
    for r in roots {
        out.push_str(&format!(
            "{},{:.16e},{:.16e},{:.16e},{:.16e}\n",
            r.index, r.sigma, r.tau, r.residue.re, r.residue.im
        ));
    }
    out
}

fn read_grid(path: &Path) -> Result<GridFunction> {
    let text = fs::read_to_string(path)?;
    if text.trim_start().starts_with('{') {
        Ok(GridFunction::from_json(&text)?.0)
    } else {
        GridFunction::from_csv_str(&text)
    }
}

fn bubble_guess(config: &JobConfig, scale: f64) -> Result<GridFunction> {
    let (c, p) = (config.common(), &config.params);
    let amplitude = scale * hardy_constant(p).powf((p.nf() - 2.0 * p.gamma) / (4.0 * p.gamma));
    let b = bubble_grid(p, c.t_min, c.t_max, c.step)?;
    b.with_real(&b.real().iter().map(|x| amplitude * x).collect::<Vec<_>>())
}

fn sample_series(config: &JobConfig, series: &GreensSeries) -> Result<GridFunction> {
    let c = config.common();
    let n = GridFunction::point_count(c.t_min, c.t_max, c.step)?;
    let times: Vec<f64> = (0..n).map(|i| c.t_min + i as f64 * c.step).collect();
    let values = par_map(config.threads, &times, |&t| series.eval(t));
    GridFunction::from_real(c.t_min, c.step, &values)
}

fn solve_report_json(config: &JobConfig, report: &SolveReport) -> Value {
    json!({
        "config": config,
        "residual_norm": report.residual_norm,
        "iterations": report.iterations,
        "converged": report.converged,
        "trivial": report.trivial,
        "residual_history": report.residual_history,
        "solution": report.solution.to_csv_string(),
    })
}

fn wronskian_json(config: &JobConfig, trace: &WronskianTrace, expected: Option<f64>, metadata: &GridMetadata) -> Result<Value> {
    Ok(json!({
        "config": config,
        "relative_residual": trace.relative_residual(),
        "relative_variation": trace.relative_variation(),
        "expected": expected,
        "wronskian": serde_json::to_value(trace.wronskian.to_document(metadata.clone()))?,
        "derivative": serde_json::to_value(trace.derivative.to_document(metadata.clone()))?,
        "identity_residual": serde_json::to_value(trace.identity_residual.to_document(metadata.clone()))?,
    }))
}

/// Order-preserving map over contiguous chunks on `threads` scoped threads.
pub fn par_map<T: Sync, U: Send>(threads: usize, items: &[T], f: impl Fn(&T) -> U + Sync) -> Vec<U> {
    if threads <= 1 || items.len() < 2 {
        return items.iter().map(&f).collect();
    }
    let chunk = items.len().div_ceil(threads);
    std::thread::scope(|s| {
        let handles: Vec<_> = items.chunks(chunk).map(|part| s.spawn(|| part.iter().map(&f).collect::<Vec<U>>())).collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn par_map_keeps_order() {
        let items: Vec<u32> = (0..103).collect();
        for threads in [1, 2, 7, 200] {
            assert_eq!(par_map(threads, &items, |x| x * 2), items.iter().map(|x| x * 2).collect::<Vec<_>>());
        }
    }

    #[test]
    fn roots_table_has_header() {
        assert_eq!(roots_csv(&[]), "index,sigma,tau,residue_re,residue_im\n");
    }
}
