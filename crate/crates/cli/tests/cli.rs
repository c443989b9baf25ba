use std::fs;
use std::path::Path;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use serde_json::Value;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ideal-angles"))
        .args(args)
        .output()
        .unwrap()
}

fn manifest(path: &Path) -> Value {
    let mut p = path.as_os_str().to_owned();
    p.push(".manifest.json");
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let out = bin(&["primes", "--field", "cubic23", "--max-norm", "10", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn golden_check_passes() {
    let out = bin(&["verify-golden", "--field", "cubic23"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("matches 1.3247"), "{text}");
}

#[test]
fn runtime_errors_are_json_on_stderr() {
    let out = bin(&["verify-golden", "--field", "gaussian"]);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["code"], "ParamViolation");
    assert_eq!(err["context"]["subcommand"], "verify-golden");

    let out = bin(&["weyl", "--k", "1,0"]);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["code"], "ParamViolation");

    let out = bin(&["primes", "--field", "no-such-field.json", "--max-norm", "10"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(serde_json::from_slice::<Value>(&out.stderr).is_ok());
}

#[test]
fn stdout_output_has_no_manifest() {
    let out = bin(&["primes", "--field", "gaussian", "--max-norm", "13"]);
    assert!(out.status.success());
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "norm,p,root,res_degree,multiplicity,ramified\n\
         2,2,1,1,2,true\n\
         5,5,2,1,1,false\n\
         5,5,3,1,1,false\n\
         9,3,1;0;1,2,1,false\n\
         13,13,5,1,1,false\n\
         13,13,8,1,1,false\n"
    );
}

fn staged(dir: &Path, workers: &str) -> Vec<String> {
    let f = |n: &str| dir.join(n).to_string_lossy().into_owned();
    let steps: [Vec<String>; 4] = [
        vec!["primes".into(), "--field".into(), "cubic23".into(), "--max-norm".into(), "1e4".into(), "--out".into(), f("p.csv")],
        vec!["generators".into(), "--field".into(), "cubic23".into(), "--primes".into(), f("p.csv"), "--out".into(), f("g.csv")],
        vec!["angles".into(), "--field".into(), "cubic23".into(), "--generators".into(), f("g.csv"), "--out".into(), f("a.csv")],
        vec!["weyl".into(), "--angles".into(), f("a.csv"), "--k".into(), "1,0".into(), "--k".into(), "0,1".into(), "--out".into(), f("w.csv")],
    ];
    for s in &steps {
        let mut args = vec!["--workers", workers];
        args.extend(s.iter().map(String::as_str));
        let out = bin(&args);
        assert!(out.status.success(), "{s:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    ["p.csv", "g.csv", "a.csv", "w.csv"]
        .iter()
        .map(|n| {
            let m = manifest(&dir.join(n));
            m["outputs"][*n].as_str().unwrap().to_string()
        })
        .collect()
}

#[test]
fn staged_pipeline_is_fast_and_reproducible() {
    let t = Instant::now();
    let a = tempfile::tempdir().unwrap();
    let first = staged(a.path(), "1");
    assert!(t.elapsed() < Duration::from_secs(10), "{:?}", t.elapsed());
    let b = tempfile::tempdir().unwrap();
    assert_eq!(staged(b.path(), "2"), first);

    let m = manifest(&a.path().join("w.csv"));
    assert_eq!(m["subcommand"], "weyl");
    assert_eq!(m["params"]["k"], serde_json::json!([[1, 0], [0, 1]]));
    assert!(m["inputs"].as_object().unwrap().len() == 1);

    let angles = fs::read_to_string(a.path().join("a.csv")).unwrap();
    let mut lines = angles.lines();
    assert_eq!(lines.next(), Some("norm,p,root,t1,t2"));
    assert_eq!(lines.next(), Some("5,5,2,0.695926227,0.248780402"));
    assert_eq!(lines.next(), Some("7,7,5,0.965679111,0.300692625"));
}

#[test]
fn ffcount_excluded_row() {
    let out = bin(&["ffcount", "--q", "3", "--modulus", "0,1", "--max-deg", "2"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\n1,excluded,1,3,3,,,\n"), "{text}");
    assert!(text.lines().any(|l| l.starts_with("2,2,2,3,3,")), "{text}");
}
