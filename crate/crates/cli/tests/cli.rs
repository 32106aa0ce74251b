use std::process::{Command, Output};

use serde_json::Value;

fn ahss(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ahss")).args(args).output().expect("spawn ahss")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("report is JSON")
}

#[test]
fn compute_writes_a_converged_report() {
    let o = ahss(&["compute", "--space", "torus2", "--theory", "HZ"]);
    assert_eq!(o.status.code(), Some(0));
    let r = json(&o);
    assert_eq!(r["converged"], true);
    assert_eq!(r["E_inf"]["1,0"]["free_rank"], 2);
    assert_eq!(r["unresolved"].as_array().map(Vec::len), Some(0));
}

#[test]
fn unresolved_differentials_exit_with_two() {
    let o = ahss(&["compute", "--space", "sphere(5)", "--theory", "K0"]);
    assert_eq!(o.status.code(), Some(2));
    let r = json(&o);
    assert!(!r["unresolved"].as_array().unwrap().is_empty());
}

#[test]
fn bad_input_exits_with_one() {
    for args in [
        &["compute", "--space", "nowhere", "--theory", "HZ"][..],
        &["compute", "--space", "circle", "--theory", "Nope"],
        &["ops", "Sq"],
    ] {
        let o = ahss(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let a = ahss(&["compute", "--space", "rp2", "--theory", "K0", "--out", path.to_str().unwrap()]);
    assert_eq!(a.status.code(), Some(0));
    let b = ahss(&["compute", "--space", "rp2", "--theory", "K0"]);
    assert_eq!(std::fs::read(&path).unwrap(), b.stdout);
}

#[test]
fn facet_file_space() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("triangle.json");
    std::fs::write(&path, r#"{"name":"triangle","facets":[[0,1],[1,2],[0,2]]}"#).unwrap();
    let a = json(&ahss(&["compute", "--space", path.to_str().unwrap(), "--theory", "HZ"]));
    let b = json(&ahss(&["compute", "--space", "circle", "--theory", "HZ"]));
    assert_eq!(a["E_inf"], b["E_inf"]);
}

#[test]
fn forms_file_is_placed_on_the_base_row() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("forms.json");
    let p = path.to_str().unwrap();
    for (values, kept) in [(r#"["1/2","0","0"]"#, false), (r#"["1","0","0"]"#, true), (r#"["1/2","1/2","0"]"#, true)] {
        std::fs::write(&path, format!(r#"{{"degree":1,"values":{values}}}"#)).unwrap();
        let o = ahss(&["compute", "--space", "circle", "--theory", "Deligne:1", "--forms", p]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        let f = &json(&o)["forms"][0];
        assert_eq!(f["in_kernel"], kept, "{values}");
        assert_eq!(f["integral_periods"], kept, "{values}");
    }
    std::fs::write(&path, r#"{"degree":1,"values":[0.5000000000001,0,0]}"#).unwrap();
    let r = json(&ahss(&["compute", "--space", "circle", "--theory", "Deligne:1", "--forms", p]));
    assert_eq!(r["approximate_forms"][0]["integral_periods"], false);
    std::fs::write(&path, r#"{"degree":1,"values":["0.25","0","0"]}"#).unwrap();
    assert_eq!(ahss(&["compute", "--space", "circle", "--theory", "Deligne:1", "--forms", p]).status.code(), Some(1));
}

#[test]
fn ops_reduces_expressions() {
    for (expr, want) in [("Sq2 Sq2", "Sq3 Sq1"), ("Q 1", "Sq3 + Sq2 Sq1"), ("Sq1 Sq1", "0"), ("theta 1", "Sq2")] {
        let o = ahss(&["ops", expr]);
        assert_eq!(o.status.code(), Some(0), "{expr}");
        assert_eq!(String::from_utf8(o.stdout).unwrap().trim(), want, "{expr}");
    }
}

#[test]
fn check_suites_pass() {
    for args in [
        &["check", "oracle"][..],
        &["check", "steenrod", "--space", "rp3", "--trials", "10"],
        &["check", "periods", "--space", "torus2", "--trials", "10"],
        &["check", "leibniz", "--space", "torus2", "--trials", "10"],
        &["check", "bockstein", "--space", "rp2"],
    ] {
        let o = ahss(args);
        let text = String::from_utf8(o.stdout).unwrap();
        assert_eq!(o.status.code(), Some(0), "{args:?}: {text}");
        for line in text.lines() {
            let v: Value = serde_json::from_str(line).unwrap();
            assert_eq!(v["pass"], true, "{line}");
        }
    }
}

#[test]
fn thread_count_does_not_change_the_report() {
    let run = |t: &str| {
        Command::new(env!("CARGO_BIN_EXE_ahss"))
            .args(["compute", "--space", "moore(3,2)", "--theory", "K1", "--all-differentials", "--emit-e1"])
            .env("RAYON_NUM_THREADS", t)
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(run("1"), run("3"));
}

#[test]
fn compute_checks_attach_reports() {
    let o = ahss(&["compute", "--space", "rp3", "--theory", "diffK0", "--check-bockstein"]);
    assert_eq!(o.status.code(), Some(0));
    let b = &json(&o)["bockstein"];
    assert_eq!(b["checked"], b["vacuous"]);
    let o = ahss(&["compute", "--space", "torus2", "--theory", "Deligne:2", "--check-leibniz"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(json(&o)["leibniz"]["pairs"].as_u64().unwrap() >= 50);
    assert_eq!(ahss(&["compute", "--space", "rp3", "--theory", "HZ", "--check-bockstein"]).status.code(), Some(1));
}
