use std::process::Command;

use lehmer_core::analysis::{ExponentFit, Family, ScanRecord};
use lehmer_core::counting::{parity_report, ProblemSpec};
use lehmer_core::ntcore::Modulus;
use lehmer_core::Rational;
use lehmer_lab::cli::run;
use lehmer_lab::output::{
    read_scan_csv, scan_csv_string, CheckDoc, CheckLine, ComplexValue, CountDoc, ExpSumDoc, FitDoc, Meta, ParityDoc,
    ScanDoc, SCAN_CSV_HEADER,
};
use lehmer_lab::scan::{Problem, Skipped};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

fn lab(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("lehmer-lab").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> Value {
    let (code, out, err) = lab(args);
    assert_eq!(code, 0, "stderr: {err}");
    serde_json::from_str(&out).unwrap()
}

#[test]
fn count_small_example() {
    let v = json(&[
        "count", "--q", "5", "--k", "1,-1", "--m", "2,2", "--a", "1,1", "--format", "json",
    ]);
    assert_eq!(v["N"], 1);
    assert_eq!(v["main"], 1.0);
    assert_eq!(v["error"], 0.0);
    assert_eq!(v["coprime"], true);
    assert_eq!(v["meta"]["seed"], 0xC0FFEE);
}

#[test]
fn count_accepts_equals_form_for_negative_vectors() {
    let v = json(&[
        "count", "--q", "7", "--k=-1,1", "--m", "2,2", "--a", "0,0", "--format", "json",
    ]);
    assert_eq!(v["main_exact"]["num"], 3);
    assert_eq!(v["main_exact"]["den"], 2);
}

#[test]
fn zero_exponent_is_a_validation_error() {
    let (code, out, err) = lab(&["count", "--q", "7", "--k", "1,0", "--m", "2,2", "--a", "0,0"]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert!(err.contains("k contains zero component"), "{err}");
}

#[test]
fn validation_failures_exit_two() {
    for args in [
        &["count", "--q", "1", "--k", "1", "--m", "2", "--a", "0"][..],
        &["count", "--q", "7", "--k", "1,2", "--m", "2", "--a", "0"],
        &["count", "--q", "7", "--k", "1", "--m", "0", "--a", "0"],
        &["parity", "--q", "10", "--k", "1"],
        &["expsum", "--q", "7", "--k", "1,2", "--lambda", "1"],
        &["count", "--q", "7", "--k", "x", "--m", "2", "--a", "0"],
        &[
            "scan", "--family", "prime", "--q-min", "10", "--q-max", "5", "--k", "1", "--m", "2", "--a", "0",
        ],
        &["count", "--q", "7"],
        &["frobnicate"],
    ] {
        let (code, _, err) = lab(args);
        assert_eq!(code, 2, "{args:?}: {err}");
        assert!(!err.is_empty());
    }
}

#[test]
fn oversized_scan_exits_three() {
    let (code, _, err) = lab(&[
        "scan",
        "--family",
        "all",
        "--q-min",
        "2",
        "--q-max",
        "5000000",
        "--k",
        "1,-1",
        "--m",
        "2,2",
        "--a",
        "0,0",
        "--work-budget",
        "1e6",
    ]);
    assert_eq!(code, 3, "{err}");
}

#[test]
fn identities_check_line() {
    let (code, out, _) = lab(&["check", "--identities", "--l-max", "50"]);
    assert_eq!(code, 0);
    assert_eq!(out, "orthogonality: 50/50 pass\n");
}

#[test]
fn check_json_lists_selected_batteries() {
    let v = json(&["check", "--weil", "--u-bounds", "--samples", "5", "--format", "json"]);
    let names: Vec<&str> = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert_eq!(names, ["weil-bound", "closing-estimate"]);
}

#[test]
fn parity_matches_core() {
    let v = json(&["parity", "--q", "101", "--k", "2", "--format", "json"]);
    let r = parity_report(&Modulus::new(101).unwrap(), 2).unwrap();
    assert_eq!(v["same_parity"], r.same_parity);
    assert_eq!(v["both_even"], r.both_even);
}

#[test]
fn expsum_crt_agrees_with_direct() {
    let v = json(&[
        "expsum", "--q", "45", "--k", "1,-1", "--lambda", "3,-7", "--crt", "--format", "json",
    ]);
    let d = &v["direct"];
    let c = &v["crt"];
    for part in ["re", "im"] {
        let diff = d[part].as_f64().unwrap() - c[part].as_f64().unwrap();
        assert!(diff.abs() < 1e-9);
    }
    assert_eq!(v["terms"], 24);
}

#[test]
fn scan_csv_header_and_rows() {
    let (code, out, _) = lab(&[
        "scan",
        "--family",
        "prime",
        "--q-min",
        "3",
        "--q-max",
        "30",
        "--k",
        "1,-1",
        "--m",
        "2,2",
        "--a",
        "1,1",
        "--format",
        "csv",
        "--no-timing",
    ]);
    assert_eq!(code, 0);
    let mut lines = out.lines();
    assert_eq!(lines.next().unwrap(), SCAN_CSV_HEADER.join(","));
    assert_eq!(lines.next().unwrap(), "3,prime,2,1,0.5,0.5,0.5,0");
    assert_eq!(out.lines().count(), 1 + 9);
}

#[test]
fn scan_output_independent_of_jobs() {
    let base = [
        "scan",
        "--family",
        "odd",
        "--q-min",
        "3",
        "--q-max",
        "400",
        "--k",
        "2,-3",
        "--m",
        "3,2",
        "--a",
        "1,0",
        "--format",
        "csv",
        "--no-timing",
        "--jobs",
    ];
    let outputs: Vec<String> = ["1", "8"]
        .iter()
        .map(|j| {
            let mut args = base.to_vec();
            args.push(j);
            let (code, out, _) = lab(&args);
            assert_eq!(code, 0);
            out
        })
        .collect();
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn seed_env_and_flag_precedence() {
    let exe = env!("CARGO_BIN_EXE_lehmer-lab");
    let args = ["check", "--weil", "--samples", "2", "--format", "json"];
    let seed_of = |out: &[u8]| {
        serde_json::from_slice::<Value>(out).unwrap()["meta"]["seed"]
            .as_u64()
            .unwrap()
    };

    let o = Command::new(exe)
        .args(args)
        .env("LEHMER_LAB_SEED", "0x10")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(seed_of(&o.stdout), 16);

    let o = Command::new(exe)
        .args(args)
        .args(["--seed", "5"])
        .env("LEHMER_LAB_SEED", "16")
        .output()
        .unwrap();
    assert_eq!(seed_of(&o.stdout), 5);

    let o = Command::new(exe)
        .args(args)
        .env("LEHMER_LAB_SEED", "nope")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn binary_exit_codes_and_out_file() {
    let exe = env!("CARGO_BIN_EXE_lehmer-lab");
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scan.csv");
    let o = Command::new(exe)
        .args([
            "scan",
            "--family",
            "prime-power",
            "--q-min",
            "2",
            "--q-max",
            "3000",
            "--k",
            "1,-1",
            "--m",
            "3,2",
            "--a",
            "1,1",
        ])
        .args(["--format", "csv", "--no-timing", "--out"])
        .arg(&path)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());
    let records = read_scan_csv(std::fs::File::open(&path).unwrap()).unwrap();
    assert!(records.iter().all(|r| r.family == Family::PrimePower));
    // Powers of 2 and 3 share a factor with m and are reported on stderr, not scanned.
    assert!(records.iter().all(|r| r.q % 2 != 0 && r.q % 3 != 0));
    let log = String::from_utf8_lossy(&o.stderr);
    assert!(log.contains("skipped q=2:") && log.contains("skipped q=27:"), "{log}");

    let fit = Command::new(exe)
        .args(["fit", "--input"])
        .arg(&path)
        .args(["--format", "json"])
        .output()
        .unwrap();
    assert!(fit.status.success(), "{}", String::from_utf8_lossy(&fit.stderr));

    let o = Command::new(exe)
        .args(["count", "--q", "0", "--k", "1", "--m", "2", "--a", "0"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = Command::new(exe).arg("--help").output().unwrap();
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("leading minus"));
}

#[test]
fn fit_over_scan() {
    let v = json(&[
        "fit", "--family", "prime", "--q-min", "100", "--q-max", "3000", "--parity", "--k", "1", "--format", "json",
    ]);
    let slope = v["fit"]["slope"].as_f64().unwrap();
    assert!(slope > 0.2 && slope < 0.8, "{slope}");
    assert!(v["fit"]["n_points"].as_u64().unwrap() >= 100);
}

fn round_trip<T: Serialize + DeserializeOwned + PartialEq + std::fmt::Debug>(value: &T) {
    let text = serde_json::to_string(value).unwrap();
    let back: T = serde_json::from_str(&text).unwrap();
    assert_eq!(&back, value);
    assert_eq!(serde_json::to_string(&back).unwrap(), text);
}

fn meta() -> Meta {
    Meta::new(0xC0FFEE, 0.125)
}

fn record(q: u64) -> ScanRecord {
    ScanRecord {
        q,
        family: Family::Prime,
        phi: q - 1,
        count: q / 4,
        main: (q - 1) as f64 / 4.0,
        error: 0.1 * q as f64,
        abs_error: 0.1 * q as f64,
        lemma_ratio_max: Some(0.3333333333333333),
        seconds: 0.0,
    }
}

#[test]
fn json_documents_round_trip() {
    let spec = ProblemSpec::new(vec![1, 2, -1], vec![2, 3, 5], vec![0, 1, 4]).unwrap();
    let report = lehmer_core::counting::count_report(&Modulus::new(97).unwrap(), &spec).unwrap();
    round_trip(&CountDoc::new(&report, meta()));
    round_trip(&ParityDoc {
        report: parity_report(&Modulus::new(33).unwrap(), -2).unwrap(),
        meta: meta(),
    });
    round_trip(&ExpSumDoc {
        q: 45,
        k: vec![1, -1],
        lambda: vec![3, -7],
        gcd_class: Some(1),
        terms: 24,
        direct: ComplexValue {
            re: 1.5,
            im: -0.1,
            abs: 1.503329637837291,
        },
        crt: None,
        lemma_ratio: Some(0.1),
        meta: meta(),
    });
    round_trip(&ScanDoc {
        problem: Problem::Parity { k: 3 },
        family: Family::Prime,
        q_min: 3,
        q_max: 13,
        records: vec![record(5), record(13)],
        skipped: vec![Skipped {
            q: 3,
            reason: "gcd".into(),
        }],
        meta: meta(),
    });
    round_trip(&ScanDoc {
        problem: Problem::Count { spec },
        family: Family::All,
        q_min: 3,
        q_max: 3,
        records: vec![],
        skipped: vec![],
        meta: meta(),
    });
    round_trip(&FitDoc {
        fit: ExponentFit {
            slope: 0.5,
            intercept: -0.25,
            r_squared: 0.9,
            n_points: 10,
            filtered_zero_errors: 2,
        },
        records: 12,
        meta: meta(),
    });
    round_trip(&CheckDoc {
        checks: vec![CheckLine {
            name: "weil-bound".into(),
            passed: 3,
            total: 3,
        }],
        meta: meta(),
    });
    round_trip(&Rational::new(-6, 4).unwrap());
}

#[test]
fn scan_csv_round_trip() {
    let mut records = vec![record(7), record(101)];
    for r in &mut records {
        r.lemma_ratio_max = None;
    }
    let text = scan_csv_string(&records).unwrap();
    let back = read_scan_csv(text.as_bytes()).unwrap();
    assert_eq!(back.len(), records.len());
    // Decimal columns carry 12 significant digits.
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-11 * a.abs().max(1.0);
    for (r, b) in records.iter().zip(&back) {
        assert_eq!((r.q, r.family, r.phi, r.count), (b.q, b.family, b.phi, b.count));
        assert!(close(r.main, b.main) && close(r.error, b.error) && close(r.abs_error, b.abs_error));
    }
    // Re-emitting what was read reproduces the same bytes.
    assert_eq!(scan_csv_string(&back).unwrap(), text);
}
