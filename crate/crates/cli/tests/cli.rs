use std::collections::BTreeSet;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};

fn run(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_biortho-dqpt"));
    cmd.args(args).env_remove("BIORTHO_DQPT_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Data rows of a CSV file, split on commas.
fn rows(file: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(file)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn header(file: &Path) -> String {
    fs::read_to_string(file).unwrap().lines().next().unwrap().to_string()
}

const ANCHOR: [&str; 8] = ["--eta-i", "0.2", "--gamma-i", "1", "--eta-f", "-0.2", "--gamma-f", "1"];

fn quench(out: &Path, params: &[&str], extra: &[&str], env: &[(&str, &str)]) -> Output {
    let mut args = vec!["quench", "--out", path(out)];
    args.extend_from_slice(params);
    args.extend_from_slice(extra);
    run(&args, env)
}

#[test]
fn quench_writes_run_directory() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("anchor");
    let o = quench(&out, &ANCHOR, &[], &[]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));

    assert_eq!(header(&out.join("rate.csv")), "t,LR_biortho,LR_selfnormal");
    assert_eq!(header(&out.join("dtop.csv")), "t,nu");
    assert_eq!(rows(&out.join("rate.csv")).len(), 2000);
    let cusps = rows(&out.join("cusps.csv"));
    let near = |series: &str| {
        cusps
            .iter()
            .any(|r| r[0] == series && (r[1].parse::<f64>().unwrap() - 0.74).abs() <= 0.02)
    };
    assert!(near("biortho"));
    assert!(!near("selfnormal"));
    let jumps = rows(&out.join("jumps.csv"));
    assert!(jumps.iter().any(|r| r[1].parse::<f64>().unwrap() == 0.5));

    let manifest: Value = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["spec"]["pre"]["eta"], 0.2);
    assert_eq!(manifest["spec"]["cells"], 2000);
    let outputs = manifest["outputs"].as_array().unwrap();
    assert_eq!(outputs.len(), 4);
    for name in outputs {
        let name = name.as_str().unwrap();
        let bytes = fs::read(out.join(name)).unwrap();
        assert_eq!(manifest["checksums"][name], hex::encode(Sha256::digest(&bytes)));
    }
    let leftovers: Vec<_> = fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.ends_with(".partial") || n == ".lock")
        .collect();
    assert!(leftovers.is_empty(), "{leftovers:?}");
}

#[test]
fn trivial_quench_has_zero_rate() {
    let tmp = tempfile::tempdir().unwrap();
    let params = ["--eta-i", "0.2", "--gamma-i", "1", "--eta-f", "0.2", "--gamma-f", "1"];
    let o = quench(tmp.path(), &params, &["--cells", "200", "--t-steps", "100"], &[]);
    assert_eq!(code(&o), 0);
    for r in rows(&tmp.path().join("rate.csv")) {
        assert_eq!(r[1].parse::<f64>().unwrap().abs(), 0.0, "{r:?}");
    }
}

#[test]
fn outputs_are_reproducible_across_worker_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let extra = ["--cells", "1000", "--t-steps", "500"];
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    let c = tmp.path().join("c");
    assert_eq!(code(&quench(&a, &ANCHOR, &extra, &[("BIORTHO_DQPT_THREADS", "1")])), 0);
    assert_eq!(code(&quench(&b, &ANCHOR, &extra, &[("BIORTHO_DQPT_THREADS", "3")])), 0);
    let mut seq = extra.to_vec();
    seq.push("--sequential");
    assert_eq!(code(&quench(&c, &ANCHOR, &seq, &[])), 0);
    for file in ["rate.csv", "dtop.csv", "cusps.csv", "jumps.csv"] {
        let reference = fs::read(a.join(file)).unwrap();
        assert_eq!(reference, fs::read(b.join(file)).unwrap(), "{file}");
        assert_eq!(reference, fs::read(c.join(file)).unwrap(), "{file}");
    }
}

#[test]
fn config_file_and_flag_override() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let cfg = tmp.path().join("run.cfg");
    fs::write(
        &cfg,
        format!(
            "# anchor quench\neta_i = 0.2\ngamma_i = 1\neta_f = -0.2\ngamma_f = 1\ncells = 300\nt_steps = 100\nout = {}\n",
            out.display()
        ),
    )
    .unwrap();
    let o = run(&["quench", "--config", path(&cfg), "--cells", "400"], &[]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let manifest: Value = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["spec"]["cells"], 400);
    assert_eq!(manifest["spec"]["t_steps"], 100);

    fs::write(&cfg, "eta_i = 0.2\ncolour = red\n").unwrap();
    let o = run(&["quench", "--config", path(&cfg)], &[]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("colour"));
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let boundary = ["--eta-i", "0.2", "--gamma-i", "4", "--eta-f", "-0.2", "--gamma-f", "1"];
    let o = quench(&tmp.path().join("b"), &boundary, &[], &[]);
    assert_eq!(code(&o), 3);
    let msg = String::from_utf8_lossy(&o.stderr);
    assert!(msg.contains("boundary") && msg.contains("gamma"), "{msg}");
    assert!(!tmp.path().join("b").join("manifest.json").exists());

    let o = quench(&tmp.path().join("m"), &ANCHOR[..6], &[], &[]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("gamma-f"));
    assert_eq!(
        code(&quench(&tmp.path().join("v"), &ANCHOR, &["--t-steps", "1"], &[])),
        2
    );
    assert_eq!(
        code(&quench(
            &tmp.path().join("v"),
            &ANCHOR,
            &[],
            &[("BIORTHO_DQPT_THREADS", "zero")]
        )),
        2
    );
    assert_eq!(code(&run(&["quench", "--bogus"], &[])), 2);
}

#[test]
fn locked_directory_is_refused() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join(".lock"), "1\n").unwrap();
    let o = quench(tmp.path(), &ANCHOR, &["--cells", "100", "--t-steps", "20"], &[]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("in use"));
    assert!(!tmp.path().join("rate.csv").exists());
}

fn fisher(out: &Path, pre: (&str, &str), post: (&str, &str)) -> Output {
    run(
        &[
            "fisher",
            "--out",
            path(out),
            "--eta-i",
            pre.0,
            "--gamma-i",
            pre.1,
            "--eta-f",
            post.0,
            "--gamma-f",
            post.1,
        ],
        &[],
    )
}

/// Crossing count per branch index.
fn counts(out: &Path) -> BTreeSet<usize> {
    let crossings = rows(&out.join("crossings.csv"));
    (0..=6)
        .map(|n| crossings.iter().filter(|r| r[0] == n.to_string()).count())
        .collect()
}

#[test]
fn fisher_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let o = fisher(&tmp.path().join("iv_vi"), ("-2", "1"), ("2", "1"));
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(header(&tmp.path().join("iv_vi/fisher.csv")), "n,k,re_z,im_z");
    assert_eq!(counts(&tmp.path().join("iv_vi")), BTreeSet::from([2]));
    for r in rows(&tmp.path().join("iv_vi/crossings.csv")) {
        assert!(r[3].parse::<f64>().unwrap() < 1e-6);
    }

    assert_eq!(code(&fisher(&tmp.path().join("ii_iii"), ("0.2", "5"), ("2", "5"))), 0);
    assert_eq!(counts(&tmp.path().join("ii_iii")), BTreeSet::from([2, 3]));

    assert_eq!(code(&fisher(&tmp.path().join("same"), ("0.2", "1"), ("0.2", "1"))), 0);
    let text = fs::read_to_string(tmp.path().join("same/crossings.csv")).unwrap();
    assert_eq!(text, "n,k_c,t_c,g_residual,p\n");
}

#[test]
fn phase_diagram_labels() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(
        &[
            "phase-diagram",
            "--out",
            path(tmp.path()),
            "--eta-range",
            "-2:2",
            "--gamma-range",
            "0:5",
            "--grid",
            "21x6",
        ],
        &[],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let cells = rows(&tmp.path().join("phases.csv"));
    assert_eq!(cells.len(), 21 * 6);
    let at = |eta: f64, gamma: f64| {
        cells
            .iter()
            .find(|r| (r[0].parse::<f64>().unwrap() - eta).abs() < 1e-9 && r[1].parse::<f64>().unwrap() == gamma)
            .unwrap()
            .clone()
    };
    for (eta, gamma, region) in [
        (-2.0, 5.0, "I"),
        (0.2, 5.0, "II"),
        (2.0, 5.0, "III"),
        (-2.0, 1.0, "IV"),
        (0.2, 1.0, "V"),
        (2.0, 1.0, "VI"),
    ] {
        assert_eq!(at(eta, gamma)[2], region, "({eta}, {gamma})");
    }
    assert!(["0", "1/2"].contains(&at(0.2, 1.0)[3].as_str()));
    for r in cells.iter().filter(|r| r[1].parse::<f64>().unwrap() == 0.0) {
        assert!(r[2] == "boundary" || ["0", "1"].contains(&r[3].as_str()), "{r:?}");
    }
    // Points on |gamma| = 4 are flagged together with their neighbours.
    assert!(cells
        .iter()
        .filter(|r| r[1].parse::<f64>().unwrap() == 4.0)
        .all(|r| r[2] == "boundary" && r[4] == "1"));
    assert_eq!(at(-2.0, 3.0)[4], "1");
    assert_eq!(at(-2.0, 1.0)[4], "0");
}

#[test]
fn sm_example_report() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&["sm-example", "--out", path(tmp.path())], &[]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["pass"], true);
    let field = |name: &str| {
        report["fields"]
            .as_array()
            .unwrap()
            .iter()
            .find(|f| f["name"] == name)
            .unwrap()
            .clone()
    };
    assert!((field("p")["computed"][0].as_f64().unwrap() - 0.603).abs() < 1e-3);
    let naive = field("p_naive")["computed"].clone();
    assert!((naive[0].as_f64().unwrap() + 0.372).abs() < 1e-3 && (naive[1].as_f64().unwrap() - 1.118).abs() < 1e-3);
    assert_eq!(fs::read(tmp.path().join("sm_example.json")).unwrap(), o.stdout);
}

#[test]
fn table_single_row_and_unknown_label() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&["table-s1", "--rows", "I-II", "--out", path(tmp.path())], &[]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(tmp.path().join("table_s1.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(
        lines[1].starts_with("I-II,forward,") && lines[1].ends_with(r#""0,1","0,1","1","1",PASS"#),
        "{}",
        lines[1]
    );
    assert!(
        lines[2].starts_with("I-II,reverse,") && lines[2].ends_with(r#""2","2","1/2","1/2",PASS"#),
        "{}",
        lines[2]
    );

    let o = run(
        &["table-s1", "--rows", "I-IX", "--out", path(&tmp.path().join("x"))],
        &[],
    );
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("I-IX"));
}
