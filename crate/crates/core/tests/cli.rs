use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn mumsep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mumsep"))
        .args(args)
        .output()
        .expect("spawn mumsep")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn build(dir: &TempDir, d: usize) -> PathBuf {
    let out = path(dir, &format!("p{d}.json"));
    let o = mumsep(&["mums", "build", "--d", &d.to_string(), "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    out
}

fn transpose(input: &Path) -> PathBuf {
    let out = input.with_extension("T.json");
    assert_eq!(
        code(&mumsep(&[
            "mums",
            "transpose",
            "--in",
            s(input),
            "--out",
            s(&out)
        ])),
        0
    );
    out
}

fn gen(dir: &TempDir, name: &str, args: &[&str]) -> PathBuf {
    let out = path(dir, name);
    let mut full = vec!["state", "gen"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", s(&out)]);
    let o = mumsep(&full);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    out
}

fn eval(args: &[&str]) -> (i32, Option<Value>) {
    let mut full = vec!["crit", "eval"];
    full.extend_from_slice(args);
    let o = mumsep(&full);
    let v = serde_json::from_slice(&o.stdout).ok();
    (code(&o), v)
}

#[test]
fn build_qubit_set() {
    let dir = TempDir::new().unwrap();
    let p = build(&dir, 2);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap();
    assert_eq!(v["M"], 3);
    assert!((v["kappa"].as_f64().unwrap() - 1.0).abs() <= 1e-12);
}

#[test]
fn build_and_verify_d6() {
    let dir = TempDir::new().unwrap();
    let p = build(&dir, 6);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
    assert_eq!(v["M"], 7);
    assert_eq!(code(&mumsep(&["mums", "verify", "--in", s(&p)])), 0);
}

#[test]
fn build_default_output_name() {
    let dir = TempDir::new().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_mumsep"))
        .args(["mums", "build", "--d", "3"])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert!(dir.path().join("mums_d3.json").exists());
}

#[test]
fn build_rejects_d1_and_large_t() {
    assert_eq!(code(&mumsep(&["mums", "build", "--d", "1"])), 2);
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "bad.json");
    let o = mumsep(&["mums", "build", "--d", "3", "--t", "0.5", "--out", s(&out)]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("b="));
}

#[test]
fn verify_detects_corruption() {
    let dir = TempDir::new().unwrap();
    let p = build(&dir, 3);
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
    let entry = &mut v["operators"][0][0][0][0][0];
    *entry = Value::from(entry.as_f64().unwrap() + 1e-3);
    let bad = path(&dir, "corrupt.json");
    std::fs::write(&bad, serde_json::to_string(&v).unwrap()).unwrap();
    assert_eq!(code(&mumsep(&["mums", "verify", "--in", s(&bad)])), 3);
}

#[test]
fn verify_missing_or_malformed_file() {
    let dir = TempDir::new().unwrap();
    assert_eq!(
        code(&mumsep(&[
            "mums",
            "verify",
            "--in",
            s(&path(&dir, "nope.json"))
        ])),
        2
    );
    let junk = path(&dir, "junk.json");
    std::fs::write(&junk, "{\"d\": 2").unwrap();
    assert_eq!(code(&mumsep(&["mums", "verify", "--in", s(&junk)])), 2);
}

#[test]
fn eval_isotropic_detected() {
    let dir = TempDir::new().unwrap();
    let p = build(&dir, 3);
    let q = transpose(&p);
    let rho = gen(
        &dir,
        "iso.json",
        &["--kind", "isotropic", "--d", "3", "--p", "0.9"],
    );
    for th in ["T1", "T2", "T3"] {
        let (c, v) = eval(&["--theorem", th, "--state", s(&rho), "--sets", s(&p), s(&q)]);
        assert_eq!(c, 0);
        let v = v.unwrap();
        assert_eq!(v["detected"], true, "{th}");
        assert_eq!(v["verdict"], "detected");
    }
}

#[test]
fn eval_maximally_mixed_not_detected() {
    let dir = TempDir::new().unwrap();
    let p = build(&dir, 3);
    let rho = gen(&dir, "mixed.json", &["--kind", "mixed", "--dims", "3,3"]);
    let (c, v) = eval(&["--theorem", "T1", "--state", s(&rho), "--sets", s(&p)]);
    assert_eq!(c, 0);
    let v = v.unwrap();
    assert_eq!(v["detected"], false);
    assert_eq!(v["selection"], "full diagonal");
}

#[test]
fn eval_multipartite_reports() {
    let dir = TempDir::new().unwrap();
    let p = build(&dir, 2);
    let rho = gen(
        &dir,
        "ghz0.json",
        &["--kind", "noisy-ghz", "--d", "2", "--m", "3", "--p", "0"],
    );
    let (c, v) = eval(&["--theorem", "T4", "--state", s(&rho), "--sets", s(&p)]);
    assert_eq!(c, 0);
    let v = v.unwrap();
    assert_eq!(v["detected"], false);
    assert_eq!(v["theorem"], "T4");
    assert!(v["bound2"].is_number());

    let (c, t5) = eval(&[
        "--theorem",
        "T5",
        "--state",
        s(&rho),
        "--sets",
        s(&p),
        s(&p),
        s(&p),
    ]);
    assert_eq!(c, 0);
    let t5 = t5.unwrap();
    assert_eq!(t5["theorem"], "T5");
    assert_eq!(t5["bound"], v["bound2"]);

    let p4 = build(&dir, 4);
    let (c, k) = eval(&[
        "--theorem",
        "T4",
        "--state",
        s(&rho),
        "--sets",
        s(&p4),
        s(&p),
        "--partition",
        "1,2|3",
    ]);
    assert_eq!(c, 0);
    assert_eq!(k.unwrap()["partition"], serde_json::json!([[0, 1], [2]]));
}

#[test]
fn eval_mub_baseline() {
    let dir = TempDir::new().unwrap();
    let rho = gen(
        &dir,
        "bell.json",
        &["--kind", "isotropic", "--d", "2", "--p", "1"],
    );
    let (c, v) = eval(&[
        "--theorem",
        "MUB",
        "--state",
        s(&rho),
        "--pairing",
        "conjugate",
    ]);
    assert_eq!(c, 0);
    let v = v.unwrap();
    assert!((v["J"].as_f64().unwrap() - 3.0).abs() <= 1e-12);
    assert_eq!(v["detected"], true);
    let rho6 = gen(&dir, "mixed6.json", &["--kind", "mixed", "--dims", "6,6"]);
    assert_eq!(eval(&["--theorem", "MUB", "--state", s(&rho6)]).0, 2);
}

#[test]
fn eval_configuration_errors() {
    let dir = TempDir::new().unwrap();
    let p2 = build(&dir, 2);
    let p3 = build(&dir, 3);
    let rho = gen(&dir, "mixed.json", &["--kind", "mixed", "--dims", "3,3"]);
    // dimension mismatch
    assert_eq!(
        eval(&[
            "--theorem",
            "T2",
            "--state",
            s(&rho),
            "--sets",
            s(&p2),
            s(&p3)
        ])
        .0,
        2
    );
    // wrong number of sets
    assert_eq!(
        eval(&[
            "--theorem",
            "T2",
            "--state",
            s(&rho),
            "--sets",
            s(&p3),
            s(&p3),
            s(&p3)
        ])
        .0,
        2
    );
    // T2 on three parties
    let rho3 = gen(&dir, "mixed3.json", &["--kind", "mixed", "--dims", "3,3,3"]);
    assert_eq!(
        eval(&["--theorem", "T2", "--state", s(&rho3), "--sets", s(&p3)]).0,
        2
    );
    // unknown theorem
    assert_eq!(
        eval(&["--theorem", "T9", "--state", s(&rho), "--sets", s(&p3)]).0,
        2
    );
    // non-adjacent partition
    assert_eq!(
        eval(&[
            "--theorem",
            "T4",
            "--state",
            s(&rho3),
            "--sets",
            s(&p3),
            "--partition",
            "1,3|2"
        ])
        .0,
        2
    );
}

#[test]
fn eval_numeric_integrity_failure() {
    let dir = TempDir::new().unwrap();
    let p = build(&dir, 2);
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
    // make one element non-Hermitian so its expectation picks up an imaginary part
    v["operators"][0][0][0][1][1] = Value::from(0.3);
    v["operators"][0][0][1][0][1] = Value::from(0.3);
    let bad = path(&dir, "nonherm.json");
    std::fs::write(&bad, serde_json::to_string(&v).unwrap()).unwrap();
    let plus = path(&dir, "skewed.json");
    let sigma = [[0.75, 0.25], [0.25, 0.25]];
    let matrix: Vec<Vec<[f64; 2]>> = (0..4)
        .map(|r| {
            (0..4)
                .map(|c| [sigma[r / 2][c / 2] * sigma[r % 2][c % 2], 0.0])
                .collect()
        })
        .collect();
    let state = serde_json::json!({"dims": [2, 2], "matrix": matrix});
    std::fs::write(&plus, state.to_string()).unwrap();
    assert_eq!(
        eval(&["--theorem", "T1", "--state", s(&plus), "--sets", s(&bad)]).0,
        4
    );
}

#[test]
fn state_gen_errors() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "x.json");
    assert_eq!(
        code(&mumsep(&[
            "state",
            "gen",
            "--kind",
            "isotropic",
            "--d",
            "3",
            "--out",
            s(&out)
        ])),
        2
    );
    assert_eq!(
        code(&mumsep(&[
            "state",
            "gen",
            "--kind",
            "random",
            "--out",
            s(&out)
        ])),
        2
    );
    assert_eq!(
        code(&mumsep(&[
            "state",
            "gen",
            "--kind",
            "mixed",
            "--dims",
            "1,2",
            "--out",
            s(&out)
        ])),
        2
    );
    assert_eq!(
        code(&mumsep(&[
            "state",
            "gen",
            "--kind",
            "bogus",
            "--dims",
            "2",
            "--out",
            s(&out)
        ])),
        2
    );
}

#[test]
fn scan_writes_ordered_csv() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "scan.csv");
    let o = mumsep(&[
        "scan",
        "isotropic",
        "--d",
        "2",
        "--theorem",
        "T2",
        "--step",
        "0.05",
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        String::from_utf8_lossy(&o.stdout).trim(),
        "threshold p=3.50000000000e-1"
    );
    let mut rdr = csv::Reader::from_path(&out).unwrap();
    assert_eq!(
        rdr.headers().unwrap().iter().collect::<Vec<_>>(),
        vec!["p", "J", "bound", "margin", "detected"]
    );
    let ps: Vec<f64> = rdr
        .records()
        .map(|r| r.unwrap()[0].parse().unwrap())
        .collect();
    assert_eq!(ps.len(), 21);
    assert!(ps.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn scan_below_threshold_reports_none() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "scan.csv");
    let o = mumsep(&[
        "scan",
        "isotropic",
        "--d",
        "3",
        "--theorem",
        "T1",
        "--start",
        "0",
        "--stop",
        "0.2",
        "--step",
        "0.01",
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), "threshold none");
}

#[test]
fn scan_grid_errors() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "scan.csv");
    for grid in [["0", "1", "0"], ["0", "1", "-0.1"], ["0.5", "0.1", "0.1"]] {
        let o = mumsep(&[
            "scan",
            "isotropic",
            "--d",
            "2",
            "--theorem",
            "T1",
            "--start",
            grid[0],
            "--stop",
            grid[1],
            "--step",
            grid[2],
            "--out",
            s(&out),
        ]);
        assert_eq!(code(&o), 2, "{grid:?}");
    }
}

#[test]
fn sweep_separable_is_sound() {
    let o = mumsep(&[
        "sweep",
        "separable",
        "--dims",
        "3,3",
        "--count",
        "200",
        "--seed",
        "1",
        "--theorem",
        "T2",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    assert!(String::from_utf8_lossy(&o.stdout).contains("max margin="));
    let o = mumsep(&[
        "sweep",
        "separable",
        "--dims",
        "2,2,2",
        "--count",
        "200",
        "--seed",
        "2",
        "--theorem",
        "T4",
    ]);
    assert_eq!(code(&o), 0);
    let o = mumsep(&[
        "sweep",
        "separable",
        "--dims",
        "2,2,2,2",
        "--count",
        "50",
        "--seed",
        "3",
        "--theorem",
        "T5",
        "--partition",
        "1|2|3,4",
    ]);
    assert_eq!(code(&o), 0);
}

#[test]
fn sweep_rejects_zero_count() {
    let o = mumsep(&[
        "sweep",
        "separable",
        "--dims",
        "3,3",
        "--count",
        "0",
        "--theorem",
        "T2",
    ]);
    assert_eq!(code(&o), 2);
}

#[test]
fn outputs_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let a = gen(
        &dir,
        "a.json",
        &[
            "--kind",
            "random-separable",
            "--dims",
            "2,3",
            "--seed",
            "11",
        ],
    );
    let b = gen(
        &dir,
        "b.json",
        &[
            "--kind",
            "random-separable",
            "--dims",
            "2,3",
            "--seed",
            "11",
        ],
    );
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let c = gen(
        &dir,
        "c.json",
        &[
            "--kind",
            "random-separable",
            "--dims",
            "2,3",
            "--seed",
            "12",
        ],
    );
    assert_ne!(std::fs::read(&a).unwrap(), std::fs::read(&c).unwrap());

    let p2 = build(&dir, 2);
    let p3 = build(&dir, 3);
    let args = [
        "--theorem",
        "T3",
        "--state",
        s(&a),
        "--sets",
        s(&p2),
        s(&p3),
        "--strategy",
        "greedy",
    ];
    let first = mumsep(&[&["crit", "eval"], &args[..]].concat());
    let second = mumsep(&[&["crit", "eval"], &args[..]].concat());
    assert_eq!(code(&first), 0);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn scan_ghz_three_qubits_never_detected() {
    // J(p) = 3/4 + 3p/4 stays below both multipartite bounds (2)
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "ghz.csv");
    for th in ["T4", "T5"] {
        let o = mumsep(&[
            "scan",
            "ghz",
            "--d",
            "2",
            "--m",
            "3",
            "--theorem",
            th,
            "--step",
            "0.25",
            "--out",
            s(&out),
        ]);
        assert_eq!(code(&o), 0);
        assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), "threshold none");
        let mut rdr = csv::Reader::from_path(&out).unwrap();
        for rec in rdr.records() {
            let rec = rec.unwrap();
            let p: f64 = rec[0].parse().unwrap();
            let j: f64 = rec[1].parse().unwrap();
            let bound: f64 = rec[2].parse().unwrap();
            assert!((j - (0.75 + 0.75 * p)).abs() <= 1e-10);
            assert!((bound - 2.0).abs() <= 1e-10);
        }
    }
}
