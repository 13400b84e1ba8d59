//! End-to-end tests of the `latsym` binary: exit codes, exact artifact
//! headers, determinism, and model round-trips.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_latsym")
}

fn work_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("latsym-cli-{}-{tag}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

fn run(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(bin());
    cmd.args(args);
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary should run")
}

fn trimer_config(gamma: f64, chi: f64, extra: &str) -> String {
    format!(
        r#"{{
  "model": {{
    "trimer": {{
      "omega": 0.0, "gamma": {gamma}, "mu": 1.0,
      "kappa": 0.7071067811865476, "chi": {chi},
      "omega3": "auto", "gamma3": "auto"
    }}
  }}{extra}
}}"#
    )
}

const EVOLVE_EXTRA: &str = r#",
  "initial_state": "bright",
  "grid": { "t_start": 0.0, "t_end": 10.0, "steps": 1001 }"#;

fn parse_csv(text: &str) -> (String, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    let rows = lines
        .map(|l| {
            l.split(',')
                .map(|f| f.parse::<f64>().unwrap_or(f64::NAN))
                .collect()
        })
        .collect();
    (header, rows)
}

#[test]
fn evolve_symmetric_occupations() {
    let dir = work_dir("evolve-sym");
    let cfg = write_config(&dir, "run.json", &trimer_config(0.5, 0.0, EVOLVE_EXTRA));
    let out = dir.join("traj.csv");
    let result = run(
        &[
            "evolve",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ],
        &[],
    );
    assert!(
        result.status.success(),
        "{}",
        String::from_utf8_lossy(&result.stderr)
    );
    let text = fs::read_to_string(&out).unwrap();
    let (header, rows) = parse_csv(&text);
    assert_eq!(header, "t,re_a1,im_a1,re_a2,im_a2,re_a3,im_a3,p1,p2,p3");
    assert_eq!(rows.len(), 1001);
    for row in &rows {
        assert!(
            (row[7] - row[8]).abs() <= 1e-12,
            "p1 != p2 at t = {}",
            row[0]
        );
    }
    // identical config: byte-identical artifact
    let out2 = dir.join("traj2.csv");
    assert!(run(
        &[
            "evolve",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out2.to_str().unwrap()
        ],
        &[],
    )
    .status
    .success());
    assert_eq!(fs::read(&out).unwrap(), fs::read(&out2).unwrap());
}

#[test]
fn evolve_deformation_shifts_ratio_but_not_p3() {
    let dir = work_dir("evolve-chi");
    let cfg_flat = write_config(&dir, "flat.json", &trimer_config(0.5, 0.0, EVOLVE_EXTRA));
    let cfg_skew = write_config(&dir, "skew.json", &trimer_config(0.5, 0.2, EVOLVE_EXTRA));
    let out_flat = dir.join("flat.csv");
    let out_skew = dir.join("skew.csv");
    assert!(run(
        &[
            "evolve",
            "--config",
            cfg_flat.to_str().unwrap(),
            "--out",
            out_flat.to_str().unwrap()
        ],
        &[],
    )
    .status
    .success());
    assert!(run(
        &[
            "evolve",
            "--config",
            cfg_skew.to_str().unwrap(),
            "--out",
            out_skew.to_str().unwrap()
        ],
        &[],
    )
    .status
    .success());
    let (_, flat) = parse_csv(&fs::read_to_string(&out_flat).unwrap());
    let (_, skew) = parse_csv(&fs::read_to_string(&out_skew).unwrap());
    let want_ratio = 0.8f64.exp();
    for (a, b) in flat.iter().zip(skew.iter()) {
        assert!(
            (b[7] / b[8] - want_ratio).abs() <= 1e-10,
            "ratio at t = {}",
            b[0]
        );
        assert!((a[9] - b[9]).abs() <= 1e-9, "p3 differs at t = {}", a[0]);
    }
}

#[test]
fn evolve_dark_state_never_populates_singlet() {
    let dir = work_dir("evolve-dark");
    let extra = r#",
  "initial_state": "dark",
  "grid": { "t_start": 0.0, "t_end": 5.0, "steps": 101 }"#;
    let cfg = write_config(&dir, "run.json", &trimer_config(0.5, 0.3, extra));
    let out = dir.join("dark.csv");
    assert!(run(
        &[
            "evolve",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap()
        ],
        &[],
    )
    .status
    .success());
    let (_, rows) = parse_csv(&fs::read_to_string(&out).unwrap());
    for row in rows {
        assert!(row[9] <= 1e-12, "p3 = {} at t = {}", row[9], row[0]);
    }
}

#[test]
fn sweep_is_deterministic_across_thread_counts() {
    let dir = work_dir("sweep-det");
    let extra = r#",
  "sweep_range": { "gamma_min": -2.0, "gamma_max": 2.0, "steps": 401 }"#;
    let cfg = write_config(&dir, "run.json", &trimer_config(0.0, 0.0, extra));
    let out_a = dir.join("a.csv");
    let out_b = dir.join("b.csv");
    assert!(run(
        &[
            "sweep",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out_a.to_str().unwrap()
        ],
        &[("LATSYM_THREADS", "1")],
    )
    .status
    .success());
    assert!(run(
        &[
            "sweep",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out_b.to_str().unwrap()
        ],
        &[("LATSYM_THREADS", "4")],
    )
    .status
    .success());
    let bytes_a = fs::read(&out_a).unwrap();
    let bytes_b = fs::read(&out_b).unwrap();
    assert_eq!(
        bytes_a, bytes_b,
        "CSV must be byte-identical across thread counts"
    );
    let side_a = fs::read(dir.join("a.ep.json")).unwrap();
    let side_b = fs::read(dir.join("b.ep.json")).unwrap();
    assert_eq!(side_a, side_b);

    let sidecar: serde_json::Value = serde_json::from_slice(&side_a).unwrap();
    let pos = sidecar["gamma_c_positive"].as_f64().unwrap();
    let neg = sidecar["gamma_c_negative"].as_f64().unwrap();
    assert!((pos - 1.0).abs() <= 1e-9, "positive EP at {pos}");
    assert!((neg + 1.0).abs() <= 1e-9, "negative EP at {neg}");

    let (header, rows) = parse_csv(&String::from_utf8(bytes_a).unwrap());
    assert_eq!(
        header,
        "gamma,re_lambda0,im_lambda0,re_lambda_plus,im_lambda_plus,re_lambda_minus,im_lambda_minus,regime"
    );
    assert_eq!(rows.len(), 401);
    // Im lambda0 = gamma on every row, and real branches inside the window
    for row in &rows {
        assert_eq!(row[2], row[0]);
        if row[0].abs() <= 0.99 {
            assert_eq!(row[4], 0.0);
            assert_eq!(row[6], 0.0);
        }
    }
}

#[test]
fn sweep_two_steps_two_rows() {
    let dir = work_dir("sweep-two");
    let extra = r#",
  "sweep_range": { "gamma_min": -2.0, "gamma_max": 2.0, "steps": 2 }"#;
    let cfg = write_config(&dir, "run.json", &trimer_config(0.0, 0.0, extra));
    let out = dir.join("two.csv");
    assert!(run(
        &[
            "sweep",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap()
        ],
        &[],
    )
    .status
    .success());
    let (_, rows) = parse_csv(&fs::read_to_string(&out).unwrap());
    assert_eq!(rows.len(), 2);
    // both endpoints sit in the broken phase; no EP inside any bracket
    let sidecar: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("two.ep.json")).unwrap()).unwrap();
    assert!(sidecar["gamma_c_positive"].is_null());
    assert!(sidecar["gamma_c_negative"].is_null());
}

#[test]
fn spectrum_reports_unbroken_closed_forms() {
    let dir = work_dir("spectrum-vals");
    let cfg = write_config(&dir, "run.json", &trimer_config(0.5, 0.0, ""));
    let result = run(&["spectrum", "--config", cfg.to_str().unwrap()], &[]);
    assert!(result.status.success());
    let report: serde_json::Value = serde_json::from_slice(&result.stdout).unwrap();
    assert_eq!(report["regime"], "PT_UNBROKEN");
    let l0 = &report["eigenvalues"]["lambda0"];
    assert!((l0["re"].as_f64().unwrap() + 1.0).abs() <= 1e-12);
    assert!((l0["im"].as_f64().unwrap() - 0.5).abs() <= 1e-12);
    let lp = &report["eigenvalues"]["lambda_plus"];
    let lm = &report["eigenvalues"]["lambda_minus"];
    let s = 0.75f64.sqrt();
    assert!((lp["re"].as_f64().unwrap() - (1.0 + s)).abs() <= 1e-12);
    assert!(lp["im"].as_f64().unwrap().abs() <= 1e-12);
    assert!((lm["re"].as_f64().unwrap() - (1.0 - s)).abs() <= 1e-12);
    assert_eq!(report["defective"], false);
}

#[test]
fn spectrum_flags_exceptional_point() {
    let dir = work_dir("spectrum-ep");
    let cfg = write_config(&dir, "run.json", &trimer_config(1.0, 0.0, ""));
    let result = run(&["spectrum", "--config", cfg.to_str().unwrap()], &[]);
    assert!(result.status.success());
    let report: serde_json::Value = serde_json::from_slice(&result.stdout).unwrap();
    assert_eq!(report["regime"], "EXCEPTIONAL_POINT");
    assert_eq!(report["defective"], true);
}

#[test]
fn spectrum_of_diagonal_network() {
    let dir = work_dir("spectrum-net");
    let cfg = write_config(
        &dir,
        "run.json",
        r#"{
  "model": {
    "network": {
      "sites": [
        { "omega": 1.0, "gamma": 0.25 },
        { "omega": -2.0, "gamma": 0.0 }
      ],
      "couplings": []
    }
  }
}"#,
    );
    let result = run(&["spectrum", "--config", cfg.to_str().unwrap()], &[]);
    assert!(result.status.success());
    let report: serde_json::Value = serde_json::from_slice(&result.stdout).unwrap();
    let eigs = report["eigenvalues"].as_array().unwrap();
    assert_eq!(eigs.len(), 2);
    let mut res: Vec<f64> = eigs.iter().map(|e| e["re"].as_f64().unwrap()).collect();
    res.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert!((res[0] + 2.0).abs() <= 1e-12);
    assert!((res[1] - 1.0).abs() <= 1e-12);
}

#[test]
fn cospectral_asymmetric_product_condition() {
    let dir = work_dir("cospectral");
    let cfg = write_config(
        &dir,
        "run.json",
        r#"{
  "model": {
    "network": {
      "sites": [
        { "omega": 0.0, "gamma": 0.5 },
        { "omega": 0.0, "gamma": 0.5 },
        { "omega": 1.0, "gamma": -0.5 }
      ],
      "couplings": [
        { "from": 0, "to": 2, "g": 2.0 },
        { "from": 2, "to": 0, "g": 0.5 },
        { "from": 1, "to": 2, "g": 1.0 },
        { "from": 2, "to": 1, "g": 1.0 }
      ]
    }
  }
}"#,
    );
    let result = run(&["cospectral", "--config", cfg.to_str().unwrap()], &[]);
    assert!(result.status.success());
    let report: serde_json::Value = serde_json::from_slice(&result.stdout).unwrap();
    let pairs = report["pairs"].as_array().unwrap();
    let p01 = pairs
        .iter()
        .find(|p| p["i"] == 0 && p["j"] == 1)
        .expect("pair (0, 1) present");
    assert_eq!(
        p01["cospectral"], true,
        "asymmetric couplings with matched products"
    );
    assert_eq!(p01["singlet_sites"], serde_json::json!([2]));
    assert_eq!(report["trimer_conditions"]["latent_symmetric"], true);
    // the other pairs must not be cospectral
    for p in pairs {
        if p["i"] == 0 && p["j"] == 1 {
            continue;
        }
        assert_eq!(p["cospectral"], false);
    }
}

#[test]
fn cospectral_gamma_mismatch_has_no_pairs() {
    let dir = work_dir("cospectral-miss");
    let cfg = write_config(
        &dir,
        "run.json",
        r#"{
  "model": {
    "network": {
      "sites": [
        { "omega": 0.0, "gamma": 0.5 },
        { "omega": 0.0, "gamma": -0.5 },
        { "omega": 1.0, "gamma": 0.0 }
      ],
      "couplings": [
        { "from": 0, "to": 2, "g": 1.0 },
        { "from": 2, "to": 0, "g": 1.0 },
        { "from": 1, "to": 2, "g": 1.0 },
        { "from": 2, "to": 1, "g": 1.0 }
      ]
    }
  }
}"#,
    );
    let result = run(&["cospectral", "--config", cfg.to_str().unwrap()], &[]);
    assert!(result.status.success());
    let report: serde_json::Value = serde_json::from_slice(&result.stdout).unwrap();
    for p in report["pairs"].as_array().unwrap() {
        assert_eq!(p["cospectral"], false);
    }
}

#[test]
fn emitted_model_reingests_identically() {
    let dir = work_dir("roundtrip");
    let cfg = write_config(&dir, "run.json", &trimer_config(0.5, 0.2, ""));
    let first = run(&["spectrum", "--config", cfg.to_str().unwrap()], &[]);
    assert!(first.status.success());
    let report: serde_json::Value = serde_json::from_slice(&first.stdout).unwrap();
    // feed the emitted model straight back in
    let round = serde_json::json!({ "model": report["model"] });
    let cfg2 = write_config(&dir, "round.json", &serde_json::to_string(&round).unwrap());
    let second = run(&["spectrum", "--config", cfg2.to_str().unwrap()], &[]);
    assert!(second.status.success());
    assert_eq!(
        first.stdout, second.stdout,
        "round-tripped model must reproduce the report"
    );
}

#[test]
fn config_errors_exit_one_and_name_the_field() {
    let dir = work_dir("config-errors");
    let cases: Vec<(&str, String, &str)> = vec![
        ("missing-model", r#"{ "tol": 1e-10 }"#.to_string(), "model"),
        (
            "both-models",
            r#"{ "model": { "trimer": { "omega": 0, "gamma": 0, "mu": 1, "kappa": 1, "chi": 0, "omega3": 0, "gamma3": 0 }, "network": { "sites": [] } } }"#
                .to_string(),
            "model",
        ),
        (
            "bad-mu",
            r#"{ "model": { "trimer": { "omega": 0, "gamma": 0, "mu": -1, "kappa": 1, "chi": 0, "omega3": "auto", "gamma3": "auto" } } }"#
                .to_string(),
            "model.trimer",
        ),
        (
            "bad-coupling-index",
            r#"{ "model": { "network": { "sites": [ { "omega": 0, "gamma": 0 } ], "couplings": [ { "from": 0, "to": 7, "g": 1 } ] } } }"#
                .to_string(),
            "model.network",
        ),
        (
            "unknown-field",
            trimer_config(0.5, 0.0, r#", "grdi": {}"#),
            "grdi",
        ),
    ];
    for (tag, body, needle) in cases {
        let cfg = write_config(&dir, &format!("{tag}.json"), &body);
        let result = run(&["spectrum", "--config", cfg.to_str().unwrap()], &[]);
        assert_eq!(result.status.code(), Some(1), "case {tag}");
        let stderr = String::from_utf8_lossy(&result.stderr);
        assert!(stderr.contains(needle), "case {tag}: stderr = {stderr}");
    }

    // dark state with a raw network model
    let cfg = write_config(
        &dir,
        "dark-network.json",
        r#"{
  "model": { "network": { "sites": [ { "omega": 0, "gamma": 0 }, { "omega": 0, "gamma": 0 } ],
             "couplings": [ { "from": 0, "to": 1, "g": 1 } ] } },
  "initial_state": "dark",
  "grid": { "t_start": 0, "t_end": 1, "steps": 2 }
}"#,
    );
    let result = run(&["evolve", "--config", cfg.to_str().unwrap()], &[]);
    assert_eq!(result.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&result.stderr).contains("initial_state"));

    // csv format for a JSON-only command
    let cfg = write_config(&dir, "csv-spectrum.json", &trimer_config(0.5, 0.0, ""));
    let result = run(
        &[
            "spectrum",
            "--config",
            cfg.to_str().unwrap(),
            "--format",
            "csv",
        ],
        &[],
    );
    assert_eq!(result.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&result.stderr).contains("format"));

    // command mismatch between config and subcommand
    let cfg = write_config(
        &dir,
        "mismatch.json",
        &trimer_config(0.5, 0.0, r#", "command": "spectrum""#),
    );
    let result = run(&["sweep", "--config", cfg.to_str().unwrap()], &[]);
    assert_eq!(result.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&result.stderr).contains("command"));

    // bad thread-count environment variable
    let extra = r#",
  "sweep_range": { "gamma_min": -1.0, "gamma_max": 1.0, "steps": 5 },
  "output": "ignored.csv""#;
    let cfg = write_config(&dir, "threads.json", &trimer_config(0.0, 0.0, extra));
    let result = run(
        &["sweep", "--config", cfg.to_str().unwrap()],
        &[("LATSYM_THREADS", "zero")],
    );
    assert_eq!(result.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&result.stderr).contains("LATSYM_THREADS"));
}

#[test]
fn numeric_overflow_exits_two() {
    let dir = work_dir("overflow");
    let extra = r#",
  "initial_state": "dark",
  "grid": { "t_start": 0.0, "t_end": 400.0, "steps": 3 }"#;
    // gain gamma = 2 amplifies the dark state as e^{2t}: occupations
    // overflow well before t = 400
    let cfg = write_config(&dir, "run.json", &trimer_config(2.0, 0.0, extra));
    let out = dir.join("never.csv");
    let result = run(
        &[
            "evolve",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(result.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&result.stderr);
    assert!(stderr.contains("numeric error"), "stderr = {stderr}");
    assert!(
        stderr.contains("largest finite sample"),
        "stderr = {stderr}"
    );
}

#[test]
fn evolve_json_format() {
    let dir = work_dir("evolve-json");
    let extra = r#",
  "initial_state": "site:0",
  "grid": { "t_start": 0.0, "t_end": 1.0, "steps": 3 },
  "format": "json""#;
    let cfg = write_config(&dir, "run.json", &trimer_config(0.5, 0.0, extra));
    let result = run(&["evolve", "--config", cfg.to_str().unwrap()], &[]);
    assert!(result.status.success());
    let rows: serde_json::Value = serde_json::from_slice(&result.stdout).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0]["occupations"][0].as_f64().unwrap(), 1.0);
    assert_eq!(rows[0]["occupations"][1].as_f64().unwrap(), 0.0);
}

#[test]
fn explicit_initial_state_dimension_checked() {
    let dir = work_dir("explicit-dim");
    let extra = r#",
  "initial_state": [[1.0, 0.0], [0.0, 0.0]],
  "grid": { "t_start": 0.0, "t_end": 1.0, "steps": 2 }"#;
    let cfg = write_config(&dir, "run.json", &trimer_config(0.5, 0.0, extra));
    let result = run(&["evolve", "--config", cfg.to_str().unwrap()], &[]);
    assert_eq!(result.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&result.stderr).contains("initial_state"));
}
