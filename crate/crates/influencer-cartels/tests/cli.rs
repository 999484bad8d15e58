//! End-to-end checks of the `cartels` binary: determinism, file schemas,
//! config overrides and error reporting.

use std::path::Path;
use std::process::{Command, Output};

fn cartels(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cartels"))
        .args(args)
        .current_dir(dir)
        .env_remove("CARTELS_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    assert!(
        out.status.success(),
        "command failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn simulate_natural_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "simulate", "natural", "--gamma", "0.5", "--n", "20000", "--seed", "7", "--reps", "3",
    ];
    let a = stdout_of(&cartels(&args, dir.path()));
    let b = stdout_of(&cartels(&args, dir.path()));
    assert_eq!(a, b);
    assert!(a.contains("\"seed\": 7"));
    assert!(a.contains("engagement_rate"));
}

#[test]
fn equilibrium_reports_degrees() {
    let dir = tempfile::tempdir().unwrap();
    // gamma = 1 is outside the model domain; expect a clean failure.
    let run = cartels(&["equilibrium", "--gamma", "1.0"], dir.path());
    assert!(!run.status.success());
    assert!(String::from_utf8_lossy(&run.stderr).contains("domain error"));

    let out = stdout_of(&cartels(&["equilibrium", "--gamma", "0.5"], dir.path()));
    assert!(out.contains("26.56505117707799"), "{out}");
    assert!(out.contains("\"social_optimum_threshold_deg\": 45.0"), "{out}");
}

#[test]
fn welfare_curve_writes_schema_and_markers() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("curve.csv");
    let out = cartels(
        &[
            "welfare-curve",
            "--gammas",
            "0.5,0.1",
            "--lambda-min",
            "0.1",
            "--lambda-max",
            "1.0",
            "--points",
            "10",
            "--out",
            path.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("# schema: welfare-curve v1\n"), "{text}");
    assert!(text.contains("# config: "));
    assert!(text.contains("# gamma 0.5: lambda_star=0.41421356237309515"));
    assert!(text.contains("# gamma 0.1: lambda_star=0.33597908630"));
    assert!(text.contains("gamma,lambda,w_analytic,v_analytic,membership_share"));
    // 2 gammas x 10 points.
    let rows = text.lines().filter(|l| !l.starts_with('#')).count();
    assert_eq!(rows, 1 + 20);

    // Byte-identical rerun.
    let path2 = dir.path().join("curve2.csv");
    let out = cartels(
        &[
            "welfare-curve",
            "--gammas",
            "0.5,0.1",
            "--lambda-min",
            "0.1",
            "--lambda-max",
            "1.0",
            "--points",
            "10",
            "--out",
            path2.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let text2 = std::fs::read_to_string(&path2).unwrap();
    assert_eq!(text, text2);
}

#[test]
fn pod_obligations_six_submission_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("log.csv");
    let mut content = String::from("member_id,post_id,timestamp\n");
    for i in 0..6 {
        content.push_str(&format!("m{i},p{i},{}\n", i + 1));
    }
    std::fs::write(&log, content).unwrap();
    let out = stdout_of(&cartels(
        &["pod", "obligations", "--log", log.to_str().unwrap(), "--n", "5"],
        dir.path(),
    ));
    let parsed: serde_json::Value = serde_json::from_str(&out).unwrap();
    let obligations = parsed["obligations"].as_object().unwrap();
    // The sixth member owes posts p0..p4; p5 has nobody after it.
    for i in 0..5 {
        let members = obligations[&format!("p{i}")].as_array().unwrap();
        assert!(
            members.iter().any(|m| m == "m5"),
            "p{i} should include m5: {members:?}"
        );
    }
    assert!(!obligations.contains_key("p5"));
}

#[test]
fn pod_validate_flags_missing_comment() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("log.csv");
    std::fs::write(
        &log,
        "member_id,post_id,timestamp\na,pa,1\nb,pb,10\n",
    )
    .unwrap();
    let events = dir.path().join("events.csv");
    std::fs::write(
        &events,
        "member_id,post_id,timestamp,kind\nb,pa,5,like\n",
    )
    .unwrap();
    let out = stdout_of(&cartels(
        &[
            "pod",
            "validate",
            "--log",
            log.to_str().unwrap(),
            "--events",
            events.to_str().unwrap(),
            "--n",
            "5",
        ],
        dir.path(),
    ));
    let parsed: serde_json::Value = serde_json::from_str(&out).unwrap();
    let violations = parsed["violations"].as_array().unwrap();
    assert_eq!(violations.len(), 1);
    assert_eq!(violations[0][0], "b");
    assert_eq!(parsed["purged_log"].as_array().unwrap().len(), 1);
}

#[test]
fn synth_pipes_into_regress() {
    use std::io::Write;
    use std::process::Stdio;

    let dir = tempfile::tempdir().unwrap();
    let synth = stdout_of(&cartels(
        &[
            "empirics", "synth", "--authors", "300", "--per-class", "4", "--seed", "3",
            "--sigma", "0.02",
        ],
        dir.path(),
    ));
    assert!(synth.starts_with("# schema: panel v1\n"));

    let mut regress = Command::new(env!("CARGO_BIN_EXE_cartels"))
        .args(["empirics", "regress", "--panel", "-"])
        .current_dir(dir.path())
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    regress
        .stdin
        .take()
        .unwrap()
        .write_all(synth.as_bytes())
        .unwrap();
    let out = regress.wait_with_output().unwrap();
    assert!(out.status.success());
    let parsed: serde_json::Value =
        serde_json::from_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    let b_gen = parsed["result"]["general_cartel"]["estimate"].as_f64().unwrap();
    let b_top = parsed["result"]["topic_cartel"]["estimate"].as_f64().unwrap();
    assert!(b_gen < b_top && b_top < 0.0, "general {b_gen}, topic {b_top}");
}

#[test]
fn config_file_overrides_flags() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("override.json");
    std::fs::write(&config, "{\"gamma\": 0.25}").unwrap();
    let out = stdout_of(&cartels(
        &[
            "equilibrium",
            "--gamma",
            "0.5",
            "--config",
            config.to_str().unwrap(),
        ],
        dir.path(),
    ));
    // arctan(0.25) = 14.036...; the flag value 0.5 is overridden.
    assert!(out.contains("\"gamma\": 0.25"), "{out}");
    assert!(out.contains("14.036243467926477"), "{out}");
}

#[test]
fn out_dir_env_var_sets_default_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_cartels"))
        .args(["equilibrium", "--gamma", "0.5", "--out", "eq.json"])
        .current_dir(dir.path())
        .env("CARTELS_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("eq.json").exists());
}

#[test]
fn schema_errors_carry_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("bad.csv");
    std::fs::write(&log, "member_id,post_id,timestamp\nm,p,1\nm,q,zero\n").unwrap();
    let out = cartels(
        &["pod", "obligations", "--log", log.to_str().unwrap()],
        dir.path(),
    );
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains(":3:"), "line number missing in: {err}");

    let missing = cartels(
        &["pod", "obligations", "--log", "nope.csv"],
        dir.path(),
    );
    assert!(!missing.status.success());
    assert!(String::from_utf8_lossy(&missing.stderr).contains("nope.csv"));
}

#[test]
fn min_v_and_advertising_report_expected_fields() {
    let dir = tempfile::tempdir().unwrap();
    let out = stdout_of(&cartels(
        &[
            "min-v", "--gamma", "0.5", "--epsilon", "0.3", "--lambda-deg", "180",
            "--target-reach", "2",
        ],
        dir.path(),
    ));
    let parsed: serde_json::Value = serde_json::from_str(&out).unwrap();
    let v = parsed["min_v"].as_f64().unwrap();
    assert!((v - 3.6359176589881264).abs() < 1e-9, "{v}");

    let out = stdout_of(&cartels(
        &["advertising", "--gamma", "0.5", "--epsilon", "0.6", "--v", "1"],
        dir.path(),
    ));
    let parsed: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(parsed["prices"]["cartel"].as_f64().unwrap(), 0.0);
    assert!(parsed["tightening"]["prefers_tighter"].as_bool().unwrap());
}
