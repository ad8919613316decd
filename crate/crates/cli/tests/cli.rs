use std::path::Path;
use std::process::{Command, Output};

fn gfgm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gfgm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

const FINAL_PORTFOLIO: &str = r#"{
    "margins": [
        {"type": "power_law", "n": 1000, "a": 0.2, "c": 3},
        {"type": "power_law", "n": 1000, "a": 0.1, "c": 4},
        {"type": "power_law", "n": 1000, "a": 0.3, "c": 2}
    ],
    "p": ["1/2", "1/3", "2/3"],
    "driver": {"kind": "joint", "pmf": ["0", "0", "0", "1/3", "1/2", "1/6", "0", "0"]}
}"#;

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn extremal_rows() {
    let o = gfgm(&["extremal", "--d", "5", "--p", "1/2", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "k1,k2,w1,w2");
    assert_eq!(lines.len(), 10);
    assert_eq!(lines[1], "0,3,1/6,5/6");

    let o = gfgm(&["extremal", "--d", "2", "--p", "1/2"]);
    let pmfs: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(pmfs.as_array().unwrap().len(), 2);
    assert_eq!(pmfs[0]["values"], serde_json::json!(["1/2", "0/1", "1/2"]));
}

#[test]
fn vertices_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("vertices.json");
    let o = gfgm(&[
        "vertices",
        "--p",
        "1/2,1/3,2/3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let v = v.as_array().unwrap();
    assert_eq!(v.len(), 12);
    assert!(v.iter().all(|f| f["order"] == "revlex" && f["d"] == 3));
    // nothing but the output is left behind
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn bounds_exponential_report() {
    let o = gfgm(&[
        "bounds",
        "--margin",
        "exp:0.1",
        "--d",
        "100",
        "--p",
        "1/3",
        "--measures",
        "es:0.95,entropic:0.001,var:0.95",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["n_extremal"], 2278);
    let var = &r["extrema"][2];
    assert!((var["min"].as_f64().unwrap() - 1149.7294).abs() < 1e-2);
    assert!((var["max"].as_f64().unwrap() - 1791.3283).abs() < 1e-2);
    assert_eq!(r["extrema"][0]["min_id"], "(33,34)");
}

#[test]
fn fast_path_refuses_var() {
    let o = gfgm(&[
        "bounds", "--margin", "uniform", "--d", "5", "--p", "1/2", "--fast",
    ]);
    assert_eq!(code(&o), 3);
    let o = gfgm(&[
        "bounds",
        "--margin",
        "uniform",
        "--d",
        "5",
        "--p",
        "1/2",
        "--fast",
        "--measures",
        "es:0.8",
        "--format",
        "csv",
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().count(), 3);
}

#[test]
fn allocation_csv_adds_up() {
    let dir = tempfile::tempdir().unwrap();
    let pf = write(dir.path(), "portfolio.json", FINAL_PORTFOLIO);
    let o = gfgm(&["allocate", "--portfolio", &pf, "--alpha", "0.95"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "risk,cvar_contribution,ces,cstd");
    assert_eq!(lines.len(), 4);
    let ces: f64 = lines[1..]
        .iter()
        .map(|l| l.split(',').nth(2).unwrap().parse::<f64>().unwrap())
        .sum();
    assert!((ces - 1590.08).abs() < 0.05, "{ces}");

    let o = gfgm(&["allocate", "--portfolio", &pf, "--format", "json"]);
    let r: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((r["es"].as_f64().unwrap() - ces).abs() < 1e-6);
}

#[test]
fn reproduce_exit_codes() {
    let o = gfgm(&["reproduce", "bernoulli-d5"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().count(), 28);
    assert_eq!(code(&gfgm(&["reproduce", "no-such-table"])), 3);
    // two printed minima sit at a point that is not the minimiser
    let o = gfgm(&["reproduce", "cx-bounds-d100"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("FAIL"));
}

#[test]
fn validate_mc_passes() {
    let o = gfgm(&[
        "validate-mc",
        "--margin",
        "exp:0.1",
        "--d",
        "10",
        "--p",
        "1/2",
        "--driver",
        "min-convex",
        "--n",
        "100000",
        "--seed",
        "7",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["pass"], true);
    assert_eq!(r["n"], 100000);
}

#[test]
fn sampling_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let pf = write(dir.path(), "portfolio.json", FINAL_PORTFOLIO);
    let a = gfgm(&["sample", "--portfolio", &pf, "--n", "50", "--seed", "3"]);
    let b = gfgm(&["sample", "--portfolio", &pf, "--n", "50", "--seed", "3"]);
    let c = gfgm(&["sample", "--portfolio", &pf, "--n", "50", "--seed", "4"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    assert_eq!(stdout(&a).lines().count(), 51);
    assert_eq!(
        code(&gfgm(&["sample", "--portfolio", &pf, "--format", "json"])),
        3
    );
}

#[test]
fn discrete_margin_file() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(
        dir.path(),
        "margin.csv",
        "k,probability\n0,0.25\n1,0.5\n2,0.25\n",
    );
    let o = gfgm(&[
        "bounds",
        "--margin",
        &format!("discrete:{m}"),
        "--d",
        "4",
        "--p",
        "1/2",
        "--measures",
        "std",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(r["extrema"][0]["min"].as_f64().unwrap() < r["extrema"][0]["max"].as_f64().unwrap());
}

#[test]
fn usage_errors() {
    assert_eq!(
        code(&gfgm(&["bounds", "--margin", "exp:0.1", "--d", "10"])),
        3
    );
    assert_eq!(
        code(&gfgm(&[
            "bounds", "--margin", "exp:-1", "--d", "10", "--p", "1/2"
        ])),
        3
    );
    assert_eq!(code(&gfgm(&["extremal", "--p", "1/2"])), 3);
    assert_eq!(code(&gfgm(&["extremal", "--d", "5", "--p", "3/2"])), 3);
    assert_eq!(
        code(&gfgm(&["vertices", "--p", "1/2,1/2,1/2,1/2,1/2,1/2"])),
        3
    );
    assert_eq!(code(&gfgm(&["no-such-command"])), 3);
    assert_eq!(code(&gfgm(&["--help"])), 0);
}

#[test]
fn thread_cap_from_env() {
    let o = Command::new(env!("CARGO_BIN_EXE_gfgm"))
        .args(["extremal", "--d", "5", "--p", "1/2"])
        .env("GFGM_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    let bad = Command::new(env!("CARGO_BIN_EXE_gfgm"))
        .args(["extremal", "--d", "5", "--p", "1/2"])
        .env("GFGM_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(code(&bad), 3);
}
