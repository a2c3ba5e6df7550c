use std::process::{Command, Output};

use serde_json::Value;

use hmm_asymptotics::phase::Potential;

fn hmm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hmm")).args(args).env_remove("HMM_DIGITS").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn painleve_for_the_quartic_merging() {
    let out = stdout(&hmm(&["painleve", "--potential", "quartic:-2,1", "--crosscheck"]));
    let v: Value = serde_json::from_str(&out).unwrap();
    let eq = &v["equations"][0];
    assert_eq!(eq["family"], "PII");
    assert_eq!(eq["m"], 1);
    assert_eq!(eq["rc"], "1/2");
    assert_eq!(eq["equation"], "2*u'' - 4*u^3 - x*u = 0");
    assert_eq!(eq["crosscheck"], "agree");
    let latex = stdout(&hmm(&["painleve", "--potential", "quartic:-2,1", "--format", "latex"]));
    assert_eq!(latex.trim(), r"2\,u'' - 4\,u^{3} - x\,u = 0");
}

#[test]
fn outputs_are_deterministic_and_reparse() {
    for args in [
        &["figure", "--preset", "quartic-merge"][..],
        &["phase", "--potential", "quartic:-2,1", "--T-range", "1/4:2:7", "--format", "csv"],
        &["critical", "--potential", "bmp", "--K", "3"],
        &["expand", "--potential", "quartic:1,1", "--T", "1/3", "--K", "3"],
    ] {
        let a = stdout(&hmm(args));
        let b = stdout(&hmm(args));
        assert_eq!(a, b, "{args:?}");
        if a.starts_with('{') || a.starts_with('[') {
            let v: Value = serde_json::from_str(&a).unwrap();
            let again: Value = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
            assert_eq!(v, again);
            if let Some(p) = v.get("potential") {
                assert_eq!(Potential::from_json(p).unwrap().to_json(), *p);
            }
        }
    }
}

#[test]
fn errors_are_json_with_nonzero_exit() {
    let o = hmm(&["phase", "--potential", "quartic:1,-1", "--T", "1"]);
    assert!(!o.status.success());
    let v: Value = serde_json::from_str(String::from_utf8_lossy(&o.stderr).trim()).unwrap();
    assert_eq!(v["error"], "InvalidInput");
    let o = hmm(&["expand", "--potential", "bmp", "--T", "1", "--format", "latex"]);
    assert!(!o.status.success());
    let o = hmm(&["phase", "--potential", "bmp", "--T-range", "3:1:4"]);
    assert!(!o.status.success());
}

#[test]
fn digits_from_environment_and_out_file() {
    let o = Command::new(env!("CARGO_BIN_EXE_hmm"))
        .args(["phase", "--potential", "quartic:1,1", "--T", "1"])
        .env("HMM_DIGITS", "12")
        .output()
        .unwrap();
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["r0"], "0.217129272955");
    let path = std::env::temp_dir().join(format!("hmm-cli-test-{}.csv", std::process::id()));
    let p = path.to_str().unwrap();
    assert!(stdout(&hmm(&["oracle", "--potential", "gaussian", "--N", "8", "--out", p])).is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,r_n,predicted,abs_error"));
    // r_n = n/16 for the Gaussian at N = 8
    assert!(lines.next().unwrap().starts_with("1,0.0625"));
}
