//! End-to-end tests of the binary: schemas, determinism, exit codes.

use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gbsgauss"))
}

fn tmp(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("gbsgauss_test_{}_{name}", std::process::id()));
    p
}

fn write_problem(name: &str, text: &str) -> PathBuf {
    let p = tmp(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn hafsq_problem(k: u32) -> PathBuf {
    let out = bin().args(["problem", "hafsq", "--k", &k.to_string()]).output().unwrap();
    assert!(out.status.success());
    write_problem(&format!("hafsq{k}.json"), &String::from_utf8(out.stdout).unwrap())
}

fn haf_problem(k: u32) -> PathBuf {
    let out = bin().args(["problem", "haf", "--k", &k.to_string()]).output().unwrap();
    assert!(out.status.success());
    write_problem(&format!("haf{k}.json"), &String::from_utf8(out.stdout).unwrap())
}

#[test]
fn table_command_is_deterministic_and_rounds_trip() {
    let out1 = tmp("table1a.csv");
    let out2 = tmp("table1b.csv");
    for out in [&out1, &out2] {
        let status = bin()
            .args([
                "table",
                "1",
                "--k-list",
                "5,10",
                "--out",
                out.to_str().unwrap(),
            ])
            .status()
            .unwrap();
        assert!(status.success());
    }
    let a = std::fs::read(&out1).unwrap();
    let b = std::fs::read(&out2).unwrap();
    assert_eq!(a, b, "table output must be byte-identical across runs");
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("K,mu,U,L\n"));
    assert_eq!(text.lines().count(), 3);
    // emitted mu agrees with the library's exact mean
    let mu: f64 = text.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    let expect = gbsgauss::families::reference_hafsq(5)
        .unwrap()
        .problem
        .mu_exact()
        .unwrap();
    assert_eq!(mu, expect);
}

#[test]
fn estimate_command_writes_trace_schema() {
    let problem = hafsq_problem(4);
    let out = tmp("estimate.csv");
    let status = bin()
        .args([
            "estimate",
            "--problem",
            problem.to_str().unwrap(),
            "--estimator",
            "gbs-i",
            "--n",
            "20000",
            "--seeds",
            "1,2",
            "--out",
            out.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "estimator,seed,n,estimate,mu_exact,rel_error"
    );
    assert_eq!(lines.count(), 2);
}

#[test]
fn threads_flag_does_not_change_results() {
    let problem = hafsq_problem(4);
    let mut outputs = Vec::new();
    for threads in ["1", "4"] {
        let out = tmp(&format!("threads{threads}.csv"));
        let status = bin()
            .args([
                "estimate",
                "--problem",
                problem.to_str().unwrap(),
                "--estimator",
                "mc",
                "--n",
                "50000",
                "--seeds",
                "7",
                "--threads",
                threads,
                "--out",
                out.to_str().unwrap(),
            ])
            .status()
            .unwrap();
        assert!(status.success());
        outputs.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn converge_writes_one_file_per_estimator_seed() {
    let problem = haf_problem(3);
    let out = tmp("trace.csv");
    let status = bin()
        .args([
            "converge",
            "--problem",
            problem.to_str().unwrap(),
            "--estimators",
            "gbs-p,mc",
            "--n-max",
            "5000",
            "--checkpoints",
            "10,100,1000",
            "--seeds",
            "1,2",
            "--out",
            out.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let stem = out.file_stem().unwrap().to_str().unwrap();
    for est in ["gbs-p", "mc"] {
        for seed in ["1", "2"] {
            let p = out.with_file_name(format!("{stem}_{est}_seed{seed}.csv"));
            let text = std::fs::read_to_string(&p).unwrap_or_else(|_| panic!("missing {p:?}"));
            assert!(text.starts_with("estimator,seed,n,estimate,mu_exact,rel_error"));
            // monotone n column ending at n_max
            let ns: Vec<u64> = text
                .lines()
                .skip(1)
                .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
                .collect();
            assert!(ns.windows(2).all(|w| w[0] < w[1]));
            assert_eq!(*ns.last().unwrap(), 5000);
        }
    }
}

#[test]
fn dist_dump_has_residual_row() {
    let problem = hafsq_problem(3);
    let out = tmp("dist.csv");
    let status = bin()
        .args([
            "dist",
            "--problem",
            problem.to_str().unwrap(),
            "--k",
            "3",
            "--out",
            out.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("index,p\n"));
    assert!(text.lines().last().unwrap().starts_with("RESIDUAL,"));
    // probabilities plus residual sum to one
    let total: f64 = text
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse::<f64>().unwrap())
        .sum();
    assert!((total - 1.0).abs() < 1e-10);
}

#[test]
fn bounds_report_json_and_missing_params_error() {
    let problem = hafsq_problem(5);
    let out = tmp("bounds.json");
    let status = bin()
        .args([
            "bounds",
            "--problem",
            problem.to_str().unwrap(),
            "--eps",
            "0.3",
            "--delta",
            "0.2",
            "--out",
            out.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert!(v["values"]["n_gbs_i"].is_number());
    assert!(v["conditions"]["speedup_certificate"]["holds"].is_boolean());

    // explicit coefficients with no parameter file: MissingMuBound, exit 3
    let explicit = write_problem(
        "explicit.json",
        r#"{"N":1,"K":1,"kind":"haf",
            "B":{"explicit":[[0.4]]},
            "coefficients":{"explicit":[{"I":[2],"a":1.0}]}}"#,
    );
    let out = bin()
        .args(["bounds", "--problem", explicit.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("mu0"), "stderr: {err}");
}

#[test]
fn state_prep_reports_small_residual() {
    let problem = hafsq_problem(2);
    let out = tmp("prep.json");
    let status = bin()
        .args([
            "state-prep",
            "--problem",
            problem.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(v["inverse_residual"].as_f64().unwrap() <= 1e-9);
    assert_eq!(v["squeezings"].as_array().unwrap().len(), 3);
}

#[test]
fn exit_codes() {
    // usage error: unknown subcommand -> clap exits 2
    let out = bin().arg("bogus").output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    // domain error: inadmissible covariance -> exit 3
    let bad = write_problem(
        "bad.json",
        r#"{"N":1,"K":1,"kind":"haf",
            "B":{"explicit":[[1.7]]},
            "coefficients":{"example":{"q":0.5,"gamma":1.0}}}"#,
    );
    let out = bin()
        .args(["dist", "--problem", bad.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));

    // estimator/kind mismatch -> exit 3
    let problem = hafsq_problem(3);
    let out = bin()
        .args([
            "estimate",
            "--problem",
            problem.to_str().unwrap(),
            "--estimator",
            "gbs-p",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}
