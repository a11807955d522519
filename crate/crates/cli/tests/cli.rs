//! End-to-end checks of the binary: exit codes, report surfaces, and the
//! JSON round trip.

use std::process::Command;

fn subsym() -> Command {
    Command::new(env!("CARGO_BIN_EXE_subsym"))
}

#[test]
fn subsystem_check_holds_and_exits_zero() {
    let out = subsym()
        .args([
            "check-subsym",
            "--system",
            "corpus:sine-gordon",
            "--field",
            "Y1",
            "--sub",
            "v*D2 - sin(u)*D1",
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("holds"));
}

#[test]
fn failing_check_exits_one() {
    let out = subsym()
        .args(["check-sym", "--system", "corpus:trivial-xy", "--field", "Xnot"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unknown_corpus_id_exits_three() {
    let out = subsym()
        .args(["check-sym", "--system", "corpus:nope", "--field", "X1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn usage_error_exits_two() {
    let out = subsym().args(["check-sym"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn rank_deficient_inverse_exits_one() {
    let out = subsym()
        .args([
            "inverse-deform",
            "--system",
            "corpus:hopf",
            "--source",
            "base",
            "--target",
            "cubic",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("rank"));
}

#[test]
fn deform_reports_trivial_law() {
    let out = subsym()
        .args([
            "deform",
            "--system",
            "corpus:sine-gordon",
            "--cl",
            "sgcl",
            "--field",
            "X1",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("trivial: true"));
}

#[test]
fn json_report_expressions_reparse() {
    let out = subsym()
        .args([
            "verify-cl",
            "--system",
            "corpus:sine-gordon",
            "--cl",
            "sgcl",
            "--json",
            "-",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["trivial"], false);
    // Printed expressions re-parse to equal normal forms.
    let sf = subsym_core::corpus::load("sine-gordon").unwrap();
    let printed: Vec<String> = report["characteristic"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap().to_string())
        .collect();
    let cl = sf.conslaw("sgcl").unwrap();
    for (text, expected) in printed.iter().zip(cl.characteristic()) {
        let back = subsym_core::expr::Expr::parse(text, sf.ctx.as_ref()).unwrap();
        assert_eq!(back.normalize(), expected.normalize());
    }
}

#[test]
fn corpus_verify_single_entry() {
    let out = subsym()
        .args(["corpus", "verify", "trivial-xy"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.lines().all(|l| l.starts_with("ok")));
}

#[test]
fn flow_prints_expansion() {
    let out = subsym()
        .args([
            "flow",
            "--system",
            "corpus:trivial-xy",
            "--field",
            "Xother",
            "--u0",
            "u=h(z)",
            "--order",
            "2",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("h(z)"));
    assert!(text.contains("eps"));
}

#[test]
fn decouple_pipeline_from_cli() {
    let out = subsym()
        .args([
            "decouple",
            "--system",
            "corpus:dyn-polar",
            "--free",
            "r",
            "--map",
            "polar",
            "--combine",
            "x,y;-y,x",
            "--barred-leads",
            "r_t,theta_t",
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("r_t"), "missing transformed equation: {text}");
}
