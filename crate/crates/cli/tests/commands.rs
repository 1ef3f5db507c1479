use std::process::{Command, Output};

use serde_json::Value;

use twophoton_cli::Status;
use twophoton_core::auxprep::INPUT;
use twophoton_core::measurement::ProjectorFamily;
use twophoton_core::protocol::{compare_reports, oracle_report, run_protocol, AnalyzerModel, Mode};
use twophoton_core::{Amplitude, Ket};

const BIN: &str = env!("CARGO_BIN_EXE_twophoton");

fn twophoton(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn run_inline(config: &str) -> Output {
    twophoton(&["run", "--config", config])
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn parity5_hh_passes_with_quarter_success() {
    let out = run_inline(r#"{"input_state": "|HH>", "family": "parity", "mode": "parity5"}"#);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    assert!(text.contains("\"success_probability\": 0.25,"));
    let v = json(&out);
    assert_eq!(v["totals"]["success_probability"], 0.25);
    assert_eq!(v["branches"].as_array().unwrap().len(), 20);
    assert_eq!(v["family"]["preset"], "parity");
}

#[test]
fn general_layout_and_zero_rows() {
    let out = run_inline(
        r#"{"input_state": "isqrt2*|HH> + isqrt2*|HV>", "family": "parity", "mode": "general"}"#,
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = json(&out);
    let branches = v["branches"].as_array().unwrap();
    assert_eq!(branches.len(), 19);
    let registers: Vec<&str> = branches
        .iter()
        .filter_map(|b| b["register_result"].as_str())
        .collect();
    assert_eq!(registers, ["HH", "HV", "VH", "VV"]);
    for b in branches {
        let zero = b["classification"] == "zero";
        assert_eq!(b.get("residual").is_none(), zero, "{b}");
    }
    let cond = &v["totals"]["conditional_j"];
    assert!((cond[0].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!((cond[1].as_f64().unwrap() - 0.5).abs() < 1e-12);
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    assert_eq!(keys.len(), 6);
}

#[test]
fn non_orthonormal_basis_is_a_validation_failure() {
    let out = run_inline(
        r#"{"input_state": "|HH>",
            "family": {"basis": ["|HH>", "|HV>", "isqrt2*|HV> + isqrt2*|VH>", "|VV>"],
                       "assignment": [[1, 0], [0, 1], [0, 1], [1, 0]]},
            "mode": "general"}"#,
    );
    assert_eq!(code(&out), 1);
    let err = stderr(&out);
    assert!(
        err.contains("not orthonormal") && err.contains("G(1,2)"),
        "{err}"
    );
    assert!(out.stdout.is_empty());
}

#[test]
fn validation_failures_exit_one() {
    let configs = [
        r#"{"input_state": "|HH>", "family": "parity", "mode": "fast"}"#,
        r#"{"input_state": "|HH>", "family": "triangle", "mode": "general"}"#,
        r#"{"input_state": "|HH>", "family": "parity", "mode": "general", "analyzer": "magic"}"#,
        r#"{"input_state": "0*|HH>", "family": "parity", "mode": "general"}"#,
        r#"{"input_state": [1, 0], "family": "parity", "mode": "general"}"#,
        r#"{"input_state": "|HH>", "family": "parity", "mode": "general", "tol": 0}"#,
        r#"{"input_state": "|HH>",
            "family": {"basis": ["|HH>", "|HV>", "|VH>", "|VV>"],
                       "assignment": [[1, 0], [0, 1], [1, 0], [1, 0]]},
            "mode": "parity5"}"#,
        r#"{"input_state": "|HH>",
            "family": {"basis": ["|HH>", "|HV>", "|VH>", "|VV>"],
                       "assignment": [[1, 1], [0, 1], [1, 0], [1, 0]]},
            "mode": "general"}"#,
        r#"{"input_state": "|HH>",
            "family": {"basis": ["|HH>", "|HV>", "|VH>", "|VV>"],
                       "assignment": [[1, 0], [1, 0], [1, 0], [1, 0]]},
            "mode": "general"}"#,
    ];
    for config in configs {
        let out = run_inline(config);
        assert_eq!(code(&out), 1, "{config}\n{}", stderr(&out));
        assert!(stderr(&out).starts_with("error: "));
    }
}

#[test]
fn parse_failures_exit_two() {
    let configs = [
        r#"{"input_state": "|HH>", "family": "parity", "mode": "parity5""#,
        r#"{"input_state": "|HH> + |XH>", "family": "parity", "mode": "parity5"}"#,
        r#"{"input_state": "|HH>", "family": "parity"}"#,
        r#"{"input_state": "|HH>", "family": "parity", "mode": "parity5", "extra": true}"#,
        r#"{"input_state": 7, "family": "parity", "mode": "parity5"}"#,
    ];
    for config in configs {
        let out = run_inline(config);
        assert_eq!(code(&out), 2, "{config}\n{}", stderr(&out));
        assert!(stderr(&out).starts_with("parse error: "));
    }
    let bad_ket =
        run_inline(r#"{"input_state": "|HH> + |XH>", "family": "parity", "mode": "parity5"}"#);
    assert!(stderr(&bad_ket).contains("byte 8"), "{}", stderr(&bad_ket));

    let missing = twophoton(&["run", "--config", "/nonexistent/config.json"]);
    assert_eq!(code(&missing), 2);
    let no_args = twophoton(&["run"]);
    assert_eq!(code(&no_args), 2);
    let bad_format = twophoton(&["run", "--config", "{}", "--format", "xml"]);
    assert_eq!(code(&bad_format), 2);
}

#[test]
fn oracle_mismatch_maps_to_three() {
    // a correct run never disagrees with the oracle, so tamper with a report
    let beta = Ket::from_pair(INPUT, [Amplitude::new(1.0, 0.0); 4].map(|a| a * 0.5)).unwrap();
    let family = ProjectorFamily::parity();
    let mut report = run_protocol(&beta, &family, Mode::Parity5, &AnalyzerModel::linear()).unwrap();
    let oracle = oracle_report(&beta, &family).unwrap();
    assert_eq!(
        Status::from_verdict(&compare_reports(&report, &oracle, 1e-10)),
        Status::Pass
    );
    report.totals.success_probability = 0.5;
    let status = Status::from_verdict(&compare_reports(&report, &oracle, 1e-10));
    assert_eq!(status, Status::Mismatch);
    assert_eq!(status.code(), 3);
}

#[test]
fn unnormalized_input_warns_on_stderr_only() {
    let out =
        run_inline(r#"{"input_state": "|HH> + |VV>", "family": "parity", "mode": "parity5"}"#);
    assert_eq!(code(&out), 0);
    assert!(stderr(&out).contains("warning: input_state has norm 1.41"));
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    assert!(!text.contains("warning"));
    let v = json(&out);
    assert!((v["input"]["HH"][0].as_f64().unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
    assert!((v["totals"]["success_probability"].as_f64().unwrap() - 0.25).abs() < 1e-12);
}

#[test]
fn out_file_and_csv_format() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    std::fs::write(
        &config,
        r#"{"input_state": [[0.6, 0], 0, [0, 0.8], 0], "family": "parity", "mode": "parity4"}"#,
    )
    .unwrap();
    let report = dir.path().join("report.csv");
    let out = twophoton(&[
        "run",
        "--config",
        config.to_str().unwrap(),
        "--format",
        "csv",
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&report).unwrap();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(
        headers,
        [
            "bell15",
            "bell26",
            "register_result",
            "probability",
            "classification",
            "corrections",
            "residual"
        ]
    );
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 16);
    assert_eq!((&rows[5][0], &rows[5][1]), ("psi-", "psi-"));
    let psi_minus = rows
        .iter()
        .find(|r| &r[0] == "psi-" && &r[1] == "psi-")
        .unwrap();
    assert_eq!(&psi_minus[5], "3:Z;4:Z");
    assert!(psi_minus[6].starts_with("HH:"));
}

#[test]
fn families_prints_a_runnable_skeleton() {
    let out = twophoton(&["families"]);
    assert_eq!(code(&out), 0);
    let skeleton = String::from_utf8(out.stdout).unwrap();
    let v: Value = serde_json::from_str(&skeleton).unwrap();
    assert_eq!(v["family"]["assignment"].as_array().unwrap().len(), 4);
    let verify = twophoton(&["verify", "--config", &skeleton]);
    assert_eq!(code(&verify), 0, "{}", stderr(&verify));
    let line = String::from_utf8(verify.stdout).unwrap();
    assert!(
        line.starts_with("pass mode=parity5 success_probability=0.25 "),
        "{line}"
    );
}
