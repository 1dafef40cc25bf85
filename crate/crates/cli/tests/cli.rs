use std::path::PathBuf;
use std::process::{Command, Output};

fn hardy(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hardy")).args(args).env_remove("HARDY_THREADS").output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn write_gaussian(name: &str, amplitude: f64, centre: f64) -> PathBuf {
    let path = scratch(name);
    let mut text = String::from("t,re,im\n");
    for i in 0..=320 {
        let t = -20.0 + i as f64 * 0.125;
        text.push_str(&format!("{t},{},0\n", amplitude * (-(t - centre) * (t - centre)).exp()));
    }
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn poles_on_the_riesz_ladder() {
    let out = hardy(&["poles", "--n", "3", "--gamma", "0.5", "--kappa", "0", "--count", "5"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# {"));
    assert_eq!(lines.next().unwrap(), "index,sigma,tau,residue_re,residue_im");
    for (j, line) in lines.enumerate() {
        let fields: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        assert!((fields[1] - (1.0 + 2.0 * j as f64)).abs() < 1e-12);
        assert_eq!(fields[2], 0.0);
    }
}

#[test]
fn symbol_at_zero_is_two_over_pi() {
    let out = hardy(&["symbol", "--n", "3", "--gamma", "0.5", "--mode", "0", "--xi", "0"]);
    assert!(out.status.success());
    let v = json(&out);
    let value = v["values"][0]["re"].as_f64().unwrap();
    assert!((value - 2.0 / std::f64::consts::PI).abs() < 1e-15);
    assert_eq!(v["config"]["command"], "symbol");
}

#[test]
fn bubble_report_passes() {
    let out = hardy(&["verify-bubble", "--n", "3", "--gamma", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["residual"].as_f64().unwrap() <= 1e-6);
    assert_eq!(v["within_tolerance"], true);
}

#[test]
fn failed_verification_exits_three() {
    let out = hardy(&["verify-bubble", "--n", "3", "--gamma", "0.5", "--tolerance", "1e-30"]);
    assert_eq!(out.status.code(), Some(3));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "VerificationFailed");
}

#[test]
fn exit_codes() {
    let invalid = hardy(&["symbol", "--n", "3", "--gamma", "1.5"]);
    assert_eq!(invalid.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&invalid.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "InvalidParams");

    assert_eq!(hardy(&["poles", "--gamma", "0.5"]).status.code(), Some(2));

    // a negative guess is a numerical failure, not a bad config
    let failure = hardy(&["solve-profile", "--n", "3", "--gamma", "0.5", "--guess-scale", "-1", "--step", "0.0625"]);
    assert_eq!(failure.status.code(), Some(3));
    let err: serde_json::Value = serde_json::from_slice(&failure.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "NegativityError");
    assert_eq!(err["config"]["guess_scale"], -1.0);
}

#[test]
fn output_is_deterministic_and_threads_do_not_change_it() {
    let args = ["greens", "--n", "3", "--gamma", "0.5", "--kappa", "0.3", "--t-min", "-4", "--t-max", "4", "--step", "0.25"];
    let a = stdout(&hardy(&args));
    let b = stdout(&hardy(&args));
    assert_eq!(a, b);
    let threaded = Command::new(env!("CARGO_BIN_EXE_hardy")).args(args).env("HARDY_THREADS", "3").output().unwrap();
    let c = stdout(&threaded);
    // same samples, only the echoed thread count differs
    assert_eq!(a.lines().skip(1).collect::<Vec<_>>(), c.lines().skip(1).collect::<Vec<_>>());
    assert!(c.lines().next().unwrap().contains("\"threads\":3"));
    let bad = Command::new(env!("CARGO_BIN_EXE_hardy")).args(args).env("HARDY_THREADS", "0").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn linear_solve_round_trips_through_files() {
    let source = write_gaussian("source.csv", 1.0, 0.0);
    let target = scratch("w.csv");
    let out = hardy(&[
        "solve-linear", "--n", "3", "--gamma", "0.5", "--input", source.to_str().unwrap(), "--output", target.to_str().unwrap(),
    ]);
    assert!(out.status.success() && out.stdout.is_empty());
    let conv = hardy(&["solve-linear", "--n", "3", "--gamma", "0.5", "--input", source.to_str().unwrap(), "--method", "convolution"]);
    let a = hardy_core::GridFunction::from_csv_str(&std::fs::read_to_string(&target).unwrap()).unwrap();
    let b = hardy_core::GridFunction::from_csv_str(&stdout(&conv)).unwrap();
    let gap = a.real().iter().zip(b.real()).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    assert!(gap < 1e-12 * a.max_abs());

    let fit = hardy(&["frobenius", "--n", "3", "--gamma", "0.5", "--input", target.to_str().unwrap(), "--window", "5,12"]);
    assert!(fit.status.success());
    assert!((json(&fit)["fit"]["sigma"].as_f64().unwrap() - 1.0).abs() < 1e-6);
}

#[test]
fn wronskian_modes() {
    let h = write_gaussian("h.csv", 1.0, -0.5);
    let ht = write_gaussian("ht.csv", 0.5, 1.0);
    let v = write_gaussian("v.csv", 0.2, 0.0);
    let pair = hardy(&[
        "wronskian", "--n", "3", "--gamma", "0.5", "--source", h.to_str().unwrap(), "--source-tilde", ht.to_str().unwrap(), "--format", "json",
    ]);
    assert!(pair.status.success());
    assert!(json(&pair)["relative_residual"].as_f64().unwrap() < 1e-2);
    let shared = hardy(&["wronskian", "--n", "3", "--gamma", "0.5", "--potential", v.to_str().unwrap(), "--format", "json"]);
    let report = json(&shared);
    assert!(report["relative_variation"].as_f64().unwrap() < 1e-5);
    assert_eq!(hardy(&["wronskian", "--n", "3", "--gamma", "0.5"]).status.code(), Some(2));
}

#[test]
fn profile_and_pohozaev_reports() {
    let out = hardy(&["solve-profile", "--n", "3", "--gamma", "0.5", "--step", "0.0625", "--tolerance", "1e-9"]);
    let v = json(&out);
    assert_eq!(v["converged"], true);
    let solution = hardy_core::GridFunction::from_csv_str(v["solution"].as_str().unwrap()).unwrap();
    assert_eq!(solution.len(), 961);
    let report = json(&hardy(&["pohozaev", "--n", "3", "--gamma", "0.5", "--tolerance", "1e-9"]));
    assert!(report["report"]["relative_spread"].as_f64().unwrap() < 1e-3);
}
