use std::path::Path;
use std::process::{Command, Output};

use hfi_core::elliptic::kdv_cnoidal;
use serde_json::Value;

fn hfi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hfi"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn validate(schema: &str, v: &Value) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas").join(schema);
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator.iter_errors(v).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{errors:#?}");
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

#[test]
fn analyze_verdicts_and_schema() {
    let ww = json(&hfi(&["analyze", "--model", "water-waves", "--g", "1", "--h", "1"]));
    validate("report.schema.json", &ww);
    assert_eq!(ww["overall"], "HF-instability-possible");
    for e in ww["events"].as_array().unwrap() {
        if e["at_origin"] == false {
            assert_eq!(e["verdict"], "potential-instability");
        }
    }
    let wh = json(&hfi(&["analyze", "--model", "whitham", "--g", "1", "--h", "1"]));
    validate("report.schema.json", &wh);
    assert_eq!(wh["overall"], "HF-instability-excluded");
    let sg = json(&hfi(&["analyze", "--model", "sine-gordon", "--formula", "even-second-row"]));
    assert_eq!(sg["overall"], "HF-instability-possible");
}

#[test]
fn config_errors_exit_two_with_offset() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    std::fs::write(&path, "{\n  \"model\": \"kdv\",\n  \"n_max\": ten\n}").unwrap();
    let out = hfi(&["analyze", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("line 3") && msg.contains("offset"), "{msg}");

    std::fs::write(&path, r#"{"model": "kdv", "colour": 1}"#).unwrap();
    assert_eq!(hfi(&["analyze", "--config", path.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(hfi(&["analyze", "--model", "no-such-model"]).status.code(), Some(2));
    assert_eq!(hfi(&["analyze", "--model", "kdv", "--g", "1"]).status.code(), Some(2));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    let cfg = r#"{"model": "water-waves", "params": {"g": 1, "h": 0.5}, "N": 1, "n_max": 6,
                  "collision": {"grid_points": 512}, "formula": "second-row"}"#;
    std::fs::write(&path, cfg).unwrap();
    let schema_check: Value = serde_json::from_str(cfg).unwrap();
    validate("config.schema.json", &schema_check);
    let r = json(&hfi(&["analyze", "--config", path.to_str().unwrap(), "--h", "2"]));
    assert_eq!(r["diagnostics"]["grid_points"], 512);
    assert_eq!(r["diagnostics"]["n_max"], 6);
    let direct = json(&hfi(&["analyze", "--model", "water-waves", "--h", "2", "--n-max", "6"]));
    assert!((f(&r["speed"]) - f(&direct["speed"])).abs() == 0.0);
}

#[test]
fn custom_model_config_with_float_params() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    let cfg = r#"{"model": {"kind": "canonical",
                  "omega1": "sign(k)*sqrt(g*abs(k)*tanh(abs(k)*h))",
                  "omega2": "-sign(k)*sqrt(g*abs(k)*tanh(abs(k)*h))",
                  "params": {"g": 1.0, "h": 2.5}}, "n_max": 6}"#;
    std::fs::write(&path, cfg).unwrap();
    validate("config.schema.json", &serde_json::from_str(cfg).unwrap());
    let custom = json(&hfi(&["analyze", "--config", path.to_str().unwrap()]));
    assert_eq!(custom["overall"], "HF-instability-possible");
    let ww = json(&hfi(&["analyze", "--model", "water-waves", "--h", "2.5", "--n-max", "6"]));
    assert!((f(&custom["speed"]) - f(&ww["speed"])).abs() < 1e-12);
}

#[test]
fn zero_and_kdv_waves() {
    let zero = json(&hfi(&["wave", "--model", "whitham", "--amplitude", "0"]));
    validate("wave.schema.json", &zero);
    assert!(zero["coefficients"].as_array().unwrap().iter().all(|a| f(a) == 0.0));

    let exact = kdv_cnoidal(0.3).unwrap();
    let amp = exact.amplitude.to_string();
    let mean = exact.mean().to_string();
    let w = json(&hfi(&["wave", "--model", "kdv", "--amplitude", &amp, "--mean", &mean]));
    validate("wave.schema.json", &w);
    assert!((f(&w["c"]) - exact.speed).abs() < 1e-8);
    for (a, b) in w["coefficients"].as_array().unwrap().iter().zip(&exact.coefficients) {
        assert!((f(a) - b).abs() < 1e-8);
    }
}

#[test]
fn negative_average_bw_needs_force() {
    let out = hfi(&["wave", "--model", "boussinesq-whitham", "--mean", "-0.1", "--amplitude", "0.001"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("ill-posed"));
    let forced = hfi(&[
        "wave", "--model", "boussinesq-whitham", "--mean", "-0.1", "--amplitude", "0.001", "--force",
    ]);
    assert!(forced.status.success(), "{}", String::from_utf8_lossy(&forced.stderr));
    assert!(String::from_utf8_lossy(&forced.stderr).contains("warning"));
}

#[test]
fn spectrum_paths() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let r = hfi(&["spectrum", "--model", "water-waves", "--out", out]);
    assert_eq!(r.status.code(), Some(2));

    let r = hfi(&[
        "spectrum", "--model", "whitham", "--amplitude", "0", "--mu-count", "40", "--M", "32", "--out", out,
    ]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let b: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("bubbles.json")).unwrap()).unwrap();
    validate("bubbles.schema.json", &b);
    assert!(b["bubbles"].as_array().unwrap().is_empty());
    assert!(f(&b["zero_amplitude_deviation"]) <= 1e-8);
    let csv = std::fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    assert!(csv.starts_with("mu,re_lambda,im_lambda\n"));
    assert_eq!(csv.lines().count(), 1 + 40 * 65);

    let wave_path = dir.path().join("wave.json");
    let w = hfi(&["wave", "--model", "kdv", "--amplitude", "0.01"]);
    std::fs::write(&wave_path, &w.stdout).unwrap();
    let mismatch = hfi(&["spectrum", "--model", "whitham", "--wave", wave_path.to_str().unwrap()]);
    assert_eq!(mismatch.status.code(), Some(2));
}

#[test]
fn fifth_order_spectrum_links_bubbles_to_predictions() {
    let dir = tempfile::tempdir().unwrap();
    let r = hfi(&[
        "spectrum", "--model", "fifth-order-scalar", "--amplitude", "0.05", "--modes", "24",
        "--M", "20", "--mu-count", "200", "--out", dir.path().to_str().unwrap(),
    ]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let b: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("bubbles.json")).unwrap()).unwrap();
    validate("bubbles.schema.json", &b);
    let bubbles = b["bubbles"].as_array().unwrap();
    assert!(!bubbles.is_empty());
    assert!(bubbles.iter().all(|x| x["nearest_collision"].is_u64()));
}

fn rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

#[test]
fn curves_tables() {
    let sg = String::from_utf8(hfi(&["curves", "--model", "sine-gordon", "--n-max", "3"]).stdout).unwrap();
    let sg = rows(&sg);
    assert!(sg.iter().any(|r| r[0] == 1.0) && sg.iter().any(|r| r[0] == 2.0));

    // gKdV curves only cross on the axis Ω = 0
    let gk = String::from_utf8(hfi(&["curves", "--model", "gkdv", "--n-max", "4"]).stdout).unwrap();
    let gk = rows(&gk);
    let per = 401;
    let curves: Vec<&[Vec<f64>]> = gk.chunks(per).collect();
    for (i, a) in curves.iter().enumerate() {
        for b in &curves[i + 1..] {
            for j in 0..per - 1 {
                let d0 = a[j][3] - b[j][3];
                let d1 = a[j + 1][3] - b[j + 1][3];
                if d0 == 0.0 || d0 * d1 < 0.0 {
                    let t = if d0 == 0.0 { 0.0 } else { d0 / (d0 - d1) };
                    let y = a[j][3] + t * (a[j + 1][3] - a[j][3]);
                    assert!(y.abs() < 0.2, "crossing at ordinate {y}");
                }
            }
        }
    }

    let dir = tempfile::tempdir().unwrap();
    let r = hfi(&["curves", "--model", "water-waves", "--g", "1", "--h", "1", "--out", dir.path().to_str().unwrap()]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let trace = rows(&std::fs::read_to_string(dir.path().join("depth_trace.csv")).unwrap());
    let last = trace.last().unwrap();
    assert_eq!(last[0], 100.0);
    assert!((last[1] - 0.75).abs() < 1e-2, "{last:?}");
}

#[test]
fn reruns_are_byte_identical_across_thread_counts() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for (dir, threads) in [(&a, "1"), (&b, "4")] {
        let d = dir.path().to_str().unwrap();
        let runs: [&[&str]; 2] = [
            &["analyze", "--model", "whitham"],
            &["spectrum", "--model", "whitham", "--amplitude", "0.01", "--mu-count", "30", "--M", "24"],
        ];
        for args in runs {
            let mut args = args.to_vec();
            args.extend(["--threads", threads, "--out", d]);
            let r = hfi(&args);
            assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
        }
    }
    for name in ["report.json", "spectrum.csv", "bubbles.json"] {
        let x = std::fs::read(a.path().join(name)).unwrap();
        let y = std::fs::read(b.path().join(name)).unwrap();
        assert_eq!(x, y, "{name}");
    }
}
