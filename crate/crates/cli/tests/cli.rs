use std::process::{Command, Output};

use serde_json::Value;

fn skewdiff(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_skewdiff"))
        .args(args)
        .env_remove("SKEWDIFF_SEED")
        .output()
        .expect("spawn skewdiff")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn single_sbm_path_as_csv() {
    let out = skewdiff(&["sbm", "--q", "0.5", "--steps", "1000", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("time,x,eta,w"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 1001);
    assert_eq!(rows[0], vec![0.0, 0.0, 0.0, 0.0]);
    assert!(rows.windows(2).all(|r| r[1][2] >= r[0][2]));
    // x = x0 + q eta + w, up to printing
    assert!(rows.iter().all(|r| (r[1] - 0.5 * r[2] - r[3]).abs() < 1e-12));
}

#[test]
fn reruns_are_byte_identical() {
    let args = [
        "couple",
        "--experiment",
        "corollary2",
        "--paths",
        "300",
        "--dt",
        "1e-3",
        "--seed",
        "9",
    ];
    let a = skewdiff(&args);
    let b = skewdiff(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = skewdiff(&[
        "couple",
        "--experiment",
        "corollary2",
        "--paths",
        "300",
        "--dt",
        "1e-3",
        "--seed",
        "10",
    ]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn eta_sampler_report() {
    let out = skewdiff(&[
        "laws",
        "--experiment",
        "eta-cdf",
        "--paths",
        "10000",
        "--seed",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["experiment"], "eta-cdf");
    assert_eq!(r["pass"], true);
    assert_eq!(r["parameters"]["paths"], 10000);
    let ks = r["checks"][0]["estimate"].as_f64().unwrap();
    assert!(ks <= 0.0163, "ks {ks}");
}

#[test]
fn i_table_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("i.csv");
    let out = skewdiff(&[
        "laws",
        "--experiment",
        "i-table",
        "--xs",
        "0,1",
        "--ts",
        "1,2",
        "--seed",
        "0",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next(), Some("x,t,quadrature,closed_form,abs_diff"));
    assert_eq!(text.lines().count(), 5);
    assert!(text.contains("\n1,1,0.16663094"));
}

#[test]
fn missing_seed_is_a_config_error() {
    let out = skewdiff(&["couple", "--paths", "10"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("seed"));
}

#[test]
fn invalid_inputs_exit_with_two() {
    for args in [
        &["couple", "--experiment", "nope", "--seed", "1"][..],
        &["couple", "--q1", "1.5", "--seed", "1"],
        &["sbm", "--steps", "abc", "--seed", "1"],
        &["laws", "--experiment", "transform", "--q", "0", "--seed", "1"],
        &[
            "gdiff",
            "--experiment",
            "small-local-time",
            "--x0",
            "0.3",
            "--seed",
            "1",
        ],
        &["frobnicate"],
    ] {
        assert_eq!(skewdiff(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(
        &cfg,
        "# coupled pair\nexperiment = corollary1\nseed = 4\npaths = 100\ndt = 1e-3\nx0 = 0.5\n",
    )
    .unwrap();
    let out = skewdiff(&["couple", "--config", cfg.to_str().unwrap(), "--x0", "0.25"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["experiment"], "corollary1");
    assert_eq!(r["parameters"]["x0"], 0.25);
    assert_eq!(r["parameters"]["paths"], 100);
    assert_eq!(r["parameters"]["seed"], 4);

    std::fs::write(&cfg, "seed = 4\nbogus_key = 1\n").unwrap();
    let out = skewdiff(&["couple", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn seed_from_environment() {
    let run = |env: Option<&str>, extra: &[&str]| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_skewdiff"));
        cmd.args([
            "couple",
            "--experiment",
            "remark2",
            "--paths",
            "200",
            "--dt",
            "1e-3",
        ])
        .args(extra);
        match env {
            Some(v) => cmd.env("SKEWDIFF_SEED", v),
            None => cmd.env_remove("SKEWDIFF_SEED"),
        };
        cmd.output().unwrap()
    };
    let from_env = run(Some("12"), &[]);
    let from_flag = run(None, &["--seed", "12"]);
    assert_eq!(from_env.status.code(), Some(0));
    assert_eq!(from_env.stdout, from_flag.stdout);
    // an explicit seed wins over the environment
    assert_eq!(run(Some("99"), &["--seed", "12"]).stdout, from_flag.stdout);
    assert_eq!(run(Some("twelve"), &[]).status.code(), Some(2));
}

#[test]
fn failed_gate_exits_with_one() {
    // a coarse grid with few paths cannot meet the cross-scheme KS gate
    let out = skewdiff(&[
        "laws",
        "--experiment",
        "transform",
        "--paths",
        "300",
        "--dt",
        "1e-3",
        "--seed",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["pass"], false);
}

#[test]
fn gdiff_path_csv() {
    let out = skewdiff(&[
        "gdiff",
        "--dim",
        "2",
        "--steps",
        "200",
        "--seed",
        "6",
        "--profile",
        "sinusoidal",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("time,x1,x2,eta"));
    assert_eq!(text.lines().count(), 202);
}

#[test]
fn report_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = skewdiff(&[
        "gdiff",
        "--experiment",
        "validate",
        "--seed",
        "2",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(r["experiment"], "validate");
    assert!(r["checks"].as_array().unwrap().len() == 2);
}
