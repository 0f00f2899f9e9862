use std::process::{Command, Output};

use clap::Parser;
use liouville_ep_cli::{run, Cli, SweepConfig, Table};

fn bin(args: &[&str], jobs_env: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_liouville-ep"));
    cmd.args(args).env_remove("LIOUVILLE_EP_JOBS");
    if let Some(j) = jobs_env {
        cmd.env("LIOUVILLE_EP_JOBS", j);
    }
    cmd.output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = bin(args, None);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn in_memory(args: &[&str]) -> Table {
    let cli =
        Cli::try_parse_from(std::iter::once("liouville-ep").chain(args.iter().copied())).unwrap();
    run(&SweepConfig::from_cli(&cli).unwrap()).unwrap()
}

fn summary(csv: &str, key: &str) -> f64 {
    let prefix = format!("# summary: {key}=");
    csv.lines()
        .find_map(|l| l.strip_prefix(&prefix))
        .unwrap_or_else(|| panic!("no summary {key}"))
        .parse()
        .unwrap()
}

#[test]
fn ep_branches_end_at_critical_detuning() {
    let csv = stdout(&["ep-locate", "--gamma", "1", "--delta-grid", "0:0.12:121"]);
    let lines: Vec<&str> = csv.lines().collect();
    assert!(lines[0].starts_with("# params: command=ep-locate"));
    assert_eq!(lines[1].split(',').count(), 7);
    let rows: Vec<Vec<&str>> = lines[2..]
        .iter()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').collect())
        .collect();
    assert_eq!(rows.len(), 121);
    let last_with_roots = rows.iter().rfind(|r| r[1] == "2").unwrap();
    let d: f64 = last_with_roots[0].parse().unwrap();
    assert!((d - 0.096).abs() < 1e-12);
    let first_without: f64 = rows.iter().find(|r| r[1] == "0").unwrap()[0]
        .parse()
        .unwrap();
    assert!((first_without - 0.097).abs() < 1e-12);
    assert!((summary(&csv, "critical_delta") - 0.0962250448649).abs() < 1e-12);
}

#[test]
fn g2_methods_agree() {
    let csv = stdout(&[
        "g2",
        "--omega",
        "1",
        "--delta",
        "0",
        "--tau-grid",
        "log:1e-3:20:400",
        "--method",
        "both",
    ]);
    assert_eq!(csv.lines().nth(1).unwrap(), "tau,analytic_g2,numeric_g2");
    assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 401);
    assert!(summary(&csv, "max_abs_diff") < 1e-8);
}

#[test]
fn spectrum_at_the_ep() {
    let csv = stdout(&["spectrum", "--omega", "0.125", "--delta", "0"]);
    assert!((summary(&csv, "elastic_weight") - 8.0 / 9.0).abs() < 1e-11);
    assert!((summary(&csv, "total_weight") - 1.0).abs() < 1e-6);
    let values: Vec<f64> = csv
        .lines()
        .skip(2)
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(values.len(), 4001);
    assert_eq!(liouville_ep::spectrum::local_maxima(&values).len(), 1);
}

#[test]
fn output_is_identical_across_thread_counts() {
    let args = [
        "eigenvalues",
        "--delta",
        "0.05",
        "--omega-grid",
        "log:1e-3:10:300",
        "--method",
        "both",
    ];
    let reference = bin(&[&args[..], &["--jobs", "1"]].concat(), None).stdout;
    for jobs in ["2", "7"] {
        assert_eq!(
            bin(&[&args[..], &["--jobs", jobs]].concat(), None).stdout,
            reference
        );
        assert_eq!(bin(&args, Some(jobs)).stdout, reference);
    }
    let ep = ["ep-locate", "--delta-grid", "0:0.12:121"];
    assert_eq!(bin(&ep, Some("1")).stdout, bin(&ep, Some("8")).stdout);
}

#[test]
fn json_round_trips_to_in_memory_result() {
    for args in [
        vec![
            "steady-state",
            "--delta",
            "0.3",
            "--omega-grid",
            "log:1e-3:10:50",
            "--method",
            "both",
        ],
        vec!["ep-locate", "--delta-grid", "0:0.12:25"],
        vec!["g1", "--omega", "0.4", "--delta", "-0.2"],
        vec!["eigenvalues", "--raw-lambda", "--omega-grid", "0:1:11"],
    ] {
        let mut with_json = args.clone();
        with_json.extend(["--format", "json"]);
        let text = stdout(&with_json);
        let parsed: Table = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed, in_memory(&with_json), "{args:?}");
    }
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pop.csv");
    let out = bin(
        &[
            "dynamics",
            "--omega",
            "0.5",
            "--out",
            path.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let csv = std::fs::read_to_string(&path).unwrap();
    assert_eq!(csv.lines().nth(1).unwrap(), "t,rho11");
    assert_eq!(csv.lines().count(), 2 + 401);
}

#[test]
fn exit_codes_and_error_records() {
    let cases: [(&[&str], i32, &str); 6] = [
        (
            &[
                "g2", "--omega", "1", "--delta", "0.1", "--method", "analytic",
            ],
            2,
            "Usage",
        ),
        (&["g2", "--omega", "1", "--gamma", "0"], 2, "InvalidParams"),
        (
            &["spectrum", "--omega", "1", "--freq-grid", "3:1:10"],
            2,
            "Usage",
        ),
        (&["nonsense"], 2, "Usage"),
        (
            &[
                "dynamics", "--omega", "1e9", "--method", "numeric", "--t-grid", "0:20:3",
            ],
            3,
            "ToleranceNotMet",
        ),
        (
            &["g1", "--omega", "1", "--out", "/nonexistent-dir/x.csv"],
            2,
            "Io",
        ),
    ];
    for (args, code, kind) in cases {
        let out = bin(args, None);
        assert_eq!(out.status.code(), Some(code), "{args:?}");
        let err = String::from_utf8(out.stderr).unwrap();
        assert_eq!(err.lines().count(), 1, "{err}");
        let rec: serde_json::Value = serde_json::from_str(err.trim()).unwrap();
        assert_eq!(rec["exit_code"], code);
        assert_eq!(rec["kind"], kind, "{args:?}");
    }
    let bad_env = bin(&["g2", "--omega", "1"], Some("many"));
    assert_eq!(bad_env.status.code(), Some(2));
}

#[test]
fn help_exits_cleanly() {
    let out = bin(&["--help"], None);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("ep-locate"));
}

#[test]
fn eigenvalues_default_to_i_lambda() {
    let csv = stdout(&["eigenvalues", "--omega-grid", "0.5:0.5:1"]);
    let header: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(header[1], "ilambda1_re");
    let row: Vec<f64> = csv
        .lines()
        .nth(2)
        .unwrap()
        .split(',')
        .map(|c| c.parse().unwrap())
        .collect();
    // i * lambda_1 with lambda_1 = -gamma/2
    assert_eq!(row[1], 0.0);
    assert!((row[2] + 0.5).abs() < 1e-12);
    let raw = stdout(&["eigenvalues", "--omega-grid", "0.5:0.5:1", "--raw-lambda"]);
    let row: Vec<f64> = raw
        .lines()
        .nth(2)
        .unwrap()
        .split(',')
        .map(|c| c.parse().unwrap())
        .collect();
    assert!((row[1] + 0.5).abs() < 1e-12 && row[2] == 0.0);
}
