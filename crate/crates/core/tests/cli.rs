use std::path::Path;
use std::process::{Command, Output};

fn spinqc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinqc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

const HEADER: &str = "delta_omega_ratio,delta_theta_ratio,corrected,fidelity,error,log10_error";

#[test]
fn negative_coupling_is_a_usage_error() {
    let o = spinqc(&[
        "transform",
        "--J",
        "-1",
        "--orientation",
        "z",
        "--tan-omega",
        "0.1",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.starts_with("error:") && err.contains("J > 0"), "{err}");
    assert_eq!(err.trim_end().lines().count(), 1);
}

#[test]
fn unknown_config_key_names_line_and_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "# pair\norientation = z\ntan_omega = 0.1\nspeed = 3\n",
    )
    .unwrap();
    let o = spinqc(&["transform", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(
        err.contains("run.cfg:4") && err.contains("'speed'"),
        "{err}"
    );
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"orientation": "xy", "theta": "5pi/6", "tan_omega": 0.1, "J": 2}"#,
    )
    .unwrap();
    let o = spinqc(&[
        "transform",
        "--config",
        cfg.to_str().unwrap(),
        "--b-over-j",
        "0.5",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = json(&o);
    assert_eq!(v["params"]["tan_omega"], 0.5);
    assert_eq!(v["params"]["J"], 2.0);
}

#[test]
fn unknown_gate_lists_valid_names() {
    let o = spinqc(&[
        "gate",
        "--orientation",
        "z",
        "--tan-omega",
        "0.1",
        "--gate",
        "toffoli",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("swap, sqrt_swap, cnot, psw"));
}

#[test]
fn bad_syntax_is_a_usage_error() {
    assert_eq!(spinqc(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(
        spinqc(&["transform", "--no-such-flag"]).status.code(),
        Some(1)
    );
    assert_eq!(spinqc(&["--help"]).status.code(), Some(0));
}

#[test]
fn tolerance_failure_exits_two() {
    let o = spinqc(&[
        "transform",
        "--orientation",
        "xy",
        "--theta",
        "5pi/6",
        "--tan-omega",
        "0.5",
        "--tol",
        "1e-30",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("exceeds tolerance"));
}

#[test]
fn unwritable_output_exits_three() {
    let o = spinqc(&["sweep", "--out", "/nonexistent-dir/sweep.csv"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).starts_with("error:"));
}

#[test]
fn gate_json_schema() {
    for gate in ["swap", "sqrt_swap", "cnot"] {
        let o = spinqc(&[
            "gate",
            "--orientation",
            "xy",
            "--theta",
            "pi/6",
            "--tan-omega",
            "0.1",
            "--gate",
            gate,
        ]);
        assert_eq!(o.status.code(), Some(0), "{gate}: {}", stderr(&o));
        let v = json(&o);
        let obj = v.as_object().unwrap();
        let mut keys: Vec<_> = obj.keys().map(String::as_str).collect();
        keys.sort_unstable();
        assert_eq!(keys, ["label", "matrix", "phase_distance", "target"]);
        assert_eq!(v["target"], gate);
        let m = v["matrix"].as_array().unwrap();
        assert_eq!(m.len(), 4);
        for row in m {
            let row = row.as_array().unwrap();
            assert_eq!(row.len(), 4);
            assert!(row.iter().all(|c| c.as_array().unwrap().len() == 2));
        }
        assert!(v["phase_distance"].as_f64().unwrap() < 1e-10);
    }
}

#[test]
fn phase_shifted_swap_needs_a_field() {
    let base = [
        "gate",
        "--orientation",
        "z",
        "--tan-omega",
        "0.1",
        "--gate",
        "psw",
    ];
    assert_eq!(spinqc(&base).status.code(), Some(1));
    let mut with_field = base.to_vec();
    with_field.extend(["--B", "0.3"]);
    let o = spinqc(&with_field);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(json(&o)["target"], "phased_swap");
}

#[test]
fn empty_ratio_lists_give_header_only() {
    let o = spinqc(&["sweep", "--delta-omega-ratios", ""]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(String::from_utf8(o.stdout).unwrap(), format!("{HEADER}\n"));
}

#[test]
fn sweep_rejects_z_orientation() {
    assert_eq!(
        spinqc(&["sweep", "--orientation", "z"]).status.code(),
        Some(1)
    );
}

#[derive(Debug, serde::Deserialize)]
struct Row {
    delta_omega_ratio: f64,
    delta_theta_ratio: f64,
    corrected: bool,
    fidelity: f64,
    error: f64,
    log10_error: String,
}

#[test]
fn sweep_csv_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let o = spinqc(&[
        "sweep",
        "--delta-omega-ratios",
        "0,0.05,0.1",
        "--delta-theta-ratios",
        "0,0.01",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(!text.contains('\r'));
    assert_eq!(text.lines().next(), Some(HEADER));
    assert!(!Path::new(&format!("{}.meta.json", out.display())).exists());

    let rows: Vec<Row> = csv::Reader::from_path(&out)
        .unwrap()
        .deserialize()
        .collect::<Result<_, _>>()
        .unwrap();
    assert_eq!(rows.len(), 12);
    assert!(rows[..6].iter().all(|r| !r.corrected));
    assert!(rows[6..].iter().all(|r| r.corrected));
    for r in &rows {
        assert!((r.fidelity + r.error - 1.0).abs() < 1e-15);
        assert!((0.0..=0.1).contains(&r.delta_omega_ratio));
        assert!((0.0..=0.01).contains(&r.delta_theta_ratio));
        if r.error == 0.0 {
            assert_eq!(r.log10_error, "-inf");
        } else {
            let log: f64 = r.log10_error.parse().unwrap();
            assert!((log - r.error.log10()).abs() < 1e-12);
        }
    }
}

#[test]
fn stamp_writes_only_a_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let args = [
        "sweep",
        "--delta-omega-ratios",
        "0",
        "--out",
        out.to_str().unwrap(),
    ];
    spinqc(&args);
    let plain = std::fs::read(&out).unwrap();
    let mut stamped = args.to_vec();
    stamped.push("--stamp");
    assert_eq!(spinqc(&stamped).status.code(), Some(0));
    assert_eq!(std::fs::read(&out).unwrap(), plain);
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("s.csv.meta.json")).unwrap())
            .unwrap();
    assert!(meta["timestamp_unix"].as_u64().unwrap() > 0);
    assert_eq!(meta["config"]["command"], "sweep");
}

#[test]
fn thermal_and_fields_report_small_residuals() {
    let o = spinqc(&[
        "thermal",
        "--orientation",
        "xy",
        "--theta",
        "1",
        "--tan-omega",
        "0.5",
        "--beta",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(json(&o)["difference"].as_f64().unwrap() < 1e-12);

    let o = spinqc(&[
        "fields",
        "--orientation",
        "xy",
        "--theta",
        "1",
        "--tan-omega",
        "0.5",
        "--B",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = json(&o);
    assert!(v["residual"].as_f64().unwrap() < 1e-12);
    assert_eq!(v["b1"].as_array().unwrap().len(), 3);

    let o = spinqc(&["decompose", "--orientation", "z", "--tan-omega", "0.5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(json(&o)["qubit2"]["gamma"], 0.0);
}
