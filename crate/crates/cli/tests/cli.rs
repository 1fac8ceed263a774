//! Exit codes, report shapes and reproducibility of the `zgap` binary.

use std::process::{Command, Output};

fn zgap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zgap")).args(args).output().expect("zgap runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn lambda_report_for_the_published_mollifier() {
    let o = zgap(&["lambda", "--r", "2", "--poly", "1,-0.1,100,-0.2", "--J", "80", "--prec", "256"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let lam: f64 = v["lambda_lower"].as_str().unwrap().parse().unwrap();
    assert!(lam >= 2.9125);
    assert_eq!(v["certified"], true);
    assert_eq!(v["certificate"]["J"], 80);
    assert_eq!(v["certificate"]["coefficients"].as_array().unwrap().len(), 80);
}

#[test]
fn usage_and_parse_errors_exit_2() {
    let o = zgap(&["lambda", "--poly", "1,0.x"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("token 2"));
    assert_eq!(zgap(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(zgap(&["lambda", "--eta", "half"]).status.code(), Some(2));
}

#[test]
fn degenerate_mollifier_exits_1() {
    assert_eq!(zgap(&["lambda", "--r", "1", "--poly", "0"]).status.code(), Some(1));
}

#[test]
fn lemma_table_is_csv() {
    let o = zgap(&["lemma-check", "--lemma", "sel", "--r", "2", "--n", "12", "--x", "1000,100000"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "x,lhs_re,lhs_im,main_re,main_im,ratio_re,ratio_im,deviation");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[1].starts_with("100000,"));

    let o = zgap(&["lemma-check", "--lemma", "lemma6", "--r", "3", "--lambda-max", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().skip(1).all(|l| l.ends_with(",true")));

    let o = zgap(&["lemma-check", "--lemma", "f", "--r", "2", "--m", "2", "--n", "4", "--x", "1000"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = std::env::temp_dir().join(format!("zgap-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let a = dir.join("a.json");
    let b = dir.join("b.json");
    for p in [&a, &b] {
        let o = zgap(&["--out", p.to_str().unwrap(), "optimize", "--degree", "1", "--budget", "40", "--J", "40"]);
        assert_eq!(o.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let c = zgap(&["ct-check", "--r", "2", "--poly", "1,-1/3,2", "--eta", "2/5"]);
    let d = zgap(&["ct-check", "--r", "2", "--poly", "1,-1/3,2", "--eta", "2/5"]);
    assert_eq!(c.stdout, d.stdout);
    assert!(stdout(&c).contains("\"residual\": \"0\""));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn constants_and_verify_selection() {
    let o = zgap(&["constants", "--r", "1", "--prec", "128"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let c: f64 = v["c_r"].as_str().unwrap().parse().unwrap();
    assert!((c - 6.0 / std::f64::consts::PI.powi(2)).abs() < 1e-15);

    let o = zgap(&["verify-paper", "--only", "6,7"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("[PASS] criterion 6"));
    assert!(text.contains("2/2 criteria passed"));
    assert_eq!(zgap(&["verify-paper", "--only", "12"]).status.code(), Some(2));
}
