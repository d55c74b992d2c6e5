use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const RHO: &str = r#"{"dim":2,"matrix":[[[0.75,0],[0,0]],[[0,0],[0.25,0]]]}"#;
const SIGMA: &str = r#"{"dim":2,"matrix":[[[0.5,0],[0,0]],[[0,0],[0.5,0]]]}"#;
const RHO_NC: &str = r#"{"dim":2,"matrix":[[[0.6,0],[0.1,-0.2]],[[0.1,0.2],[0.4,0]]]}"#;

fn qdiv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdiv")).args(args).output().expect("binary runs")
}

struct Files {
    _dir: TempDir,
    rho: PathBuf,
    sigma: PathBuf,
    rho_nc: PathBuf,
}

impl Files {
    fn new() -> Self {
        let dir = TempDir::new().unwrap();
        let write = |name: &str, text: &str| {
            let p = dir.path().join(name);
            std::fs::write(&p, text).unwrap();
            p
        };
        let (rho, sigma, rho_nc) = (write("rho.json", RHO), write("sigma.json", SIGMA), write("rho_nc.json", RHO_NC));
        Files { _dir: dir, rho, sigma, rho_nc }
    }
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout_json(o: &Output) -> Value {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

fn stderr_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stderr).unwrap()
}

#[test]
fn compute_renyi_two_on_commuting_pair() {
    let f = Files::new();
    let o = qdiv(&[
        "compute",
        "--rho",
        s(&f.rho),
        "--sigma",
        s(&f.sigma),
        "--divergence",
        "renyi",
        "--alpha",
        "2",
        "--method",
        "layercake",
    ]);
    let v = stdout_json(&o);
    assert!((v["value"].as_f64().unwrap() - 1.25f64.ln()).abs() < 1e-6, "{v}");
    assert_eq!(v["method"], "layercake");
    assert!(v["err_estimate"].as_f64().unwrap() >= 0.0);
}

#[test]
fn compute_reports_bits() {
    let f = Files::new();
    let o = qdiv(&[
        "compute",
        "--rho",
        s(&f.rho),
        "--sigma",
        s(&f.sigma),
        "--divergence",
        "renyi",
        "--alpha",
        "2",
        "--bits",
    ]);
    let v = stdout_json(&o);
    assert!((v["value"].as_f64().unwrap() - 1.25f64.log2()).abs() < 1e-6, "{v}");
}

#[test]
fn compute_methods_agree() {
    let f = Files::new();
    let base = ["compute", "--rho", s(&f.rho_nc), "--sigma", s(&f.sigma)];
    let value = |extra: &[&str]| {
        let mut args = base.to_vec();
        args.extend_from_slice(extra);
        stdout_json(&qdiv(&args))["value"].as_f64().unwrap()
    };
    let kl = value(&["--divergence", "f", "--f", "kl", "--method", "layercake"]);
    for m in ["hs_integral", "trace", "rs", "duality"] {
        let v = value(&["--divergence", "f", "--f", "kl", "--method", m]);
        assert!((v - kl).abs() < 1e-6, "{m}: {v} vs {kl}");
    }
    for m in ["projection", "frenkel", "layercake", "renyi_limit", "rs"] {
        let v = value(&["--divergence", "relent", "--method", m]);
        assert!((v - kl).abs() < 1e-5, "{m}: {v} vs {kl}");
    }
    let lim = value(&["--divergence", "renyi", "--alpha", "1", "--method", "renyi_limit"]);
    assert!((lim - kl).abs() < 1e-5);
}

#[test]
fn alpha_one_needs_renyi_limit() {
    let f = Files::new();
    let o = qdiv(&[
        "compute",
        "--rho",
        s(&f.rho),
        "--sigma",
        s(&f.sigma),
        "--divergence",
        "renyi",
        "--alpha",
        "1",
        "--method",
        "layercake",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    let e = stderr_json(&o);
    assert_eq!(e["message"], "alpha=1 requires method renyi_limit");
}

#[test]
fn malformed_state_is_a_validation_error() {
    let f = Files::new();
    let bad = f._dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"dim":2,"matrix":[[[0.5,0],[0,0]],[[0,0],0.5]]}"#).unwrap();
    let o = qdiv(&["compute", "--rho", s(&bad), "--sigma", s(&f.sigma), "--divergence", "renyi", "--alpha", "2"]);
    assert_eq!(o.status.code(), Some(2));
    let e = stderr_json(&o);
    assert_eq!(e["error"], "ParseError");
    assert!(e["message"].as_str().unwrap().contains("matrix[1][1]"));
}

#[test]
fn sweep_is_deterministic_and_consistent() {
    let f = Files::new();
    let dir = f._dir.path();
    let run = |name: &str| {
        let out = dir.join(name);
        let o = qdiv(&[
            "sweep",
            "--rho",
            s(&f.rho_nc),
            "--sigma",
            s(&f.sigma),
            "--alpha-range",
            "0.5:3:0.5",
            "--methods",
            "layercake,hs_integral,onesided,trace",
            "--out",
            s(&out),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read(out).unwrap()
    };
    let a = run("a.csv");
    assert_eq!(a, run("b.csv"));
    let text = String::from_utf8(a).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("alpha,layercake,hs_integral,onesided,trace"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.iter().map(|r| r[0]).collect::<Vec<_>>(), vec![0.5, 1.5, 2.0, 2.5, 3.0]);
    for r in &rows {
        for v in &r[2..] {
            assert!((v - r[1]).abs() < 1e-5, "{r:?}");
        }
    }
}

#[test]
fn rs_dist_and_exponents_emit_csv() {
    let f = Files::new();
    let o = qdiv(&["rs-dist", "--rho", s(&f.rho), "--sigma", s(&f.sigma), "--points", "5"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("gamma,P,Q,jump_P,jump_Q\n"));
    assert_eq!(text.lines().last().unwrap().split(',').nth(1).unwrap().parse::<f64>().unwrap(), 1.0);

    let o = qdiv(&[
        "exponents",
        "--rho",
        s(&f.rho),
        "--sigma",
        s(&f.sigma),
        "--n",
        "1,2",
        "--a",
        "-0.2,0.3",
        "--alphas",
        "0.5,2",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,a,alpha,type1,type2,bound2,bound1s,bound1e,holds"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 8);
    assert!(rows.iter().all(|r| r.ends_with(",true")));
}

#[test]
fn bad_alpha_range_and_threads() {
    let f = Files::new();
    let o = qdiv(&["sweep", "--rho", s(&f.rho), "--sigma", s(&f.sigma), "--alpha-range", "3:1:0.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["error"], "InvalidArgument");
    let o = Command::new(env!("CARGO_BIN_EXE_qdiv"))
        .args(["rs-dist", "--rho", s(&f.rho), "--sigma", s(&f.sigma)])
        .env("QDIV_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_small_suite_passes() {
    let o = qdiv(&["verify", "--trials", "5", "--dims", "2", "--seed", "1"]);
    let text = String::from_utf8_lossy(&o.stdout);
    assert_eq!(o.status.code(), Some(0), "{text}");
    assert!(text.contains("criterion 12: PASS"));
    assert!(text.contains("verify: PASS"));
}
