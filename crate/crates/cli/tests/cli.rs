use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pearchaos")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const GAUSS: &str = r#"{"class":"gaussian","variance":1}"#;

#[test]
fn gaussian_moments() {
    let o = run(&["moments", "--params", GAUSS, "--pmax", "4"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "1, 0, 1, 0, 3");
}

#[test]
fn student_moments() {
    let o = run(&["moments", "--params", r#"{"m":0,"b0":"9/8","b1":0,"b2":"1/8"}"#, "--pmax", "4"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).trim(), "1, 0, 9/7, 0, 243/35");
}

#[test]
fn missing_moment_exits_2() {
    let o = run(&["moments", "--params", r#"{"m":0,"b0":"3/2","b1":0,"b2":"1/2"}"#, "--pmax", "4"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
}

#[test]
fn malformed_json_exits_2() {
    let o = run(&["moments", "--params", r#"{"class": "#]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["converge", "--descriptor", r#"{"target": "#]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn grades() {
    let o = run(&["grade", "--params", GAUSS, "--n", "5"]);
    assert!(stdout(&o).contains("eta_5 = 2\n"));
    assert!(stdout(&o).contains("chaotic = yes"));
    let o = run(&["grade", "--params", r#"{"class":"beta","alpha":1,"beta":1}"#, "--n", "1"]);
    assert!(stdout(&o).contains("eta_1 = 3\n"));
    let o = run(&["grade", "--params", r#"{"m":0,"b0":1,"b1":0,"b2":"1/8"}"#, "--n", "3"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("not chaotic"), "{s}");
    assert!(s.contains("eta_tilde = 7/4"), "{s}");
}

#[test]
fn bound_is_json() {
    let chaos = r#"{"base":{"class":"gaussian","variance":1},"terms":[{"alpha":[2],"coeff":"1"}],"normalize":true}"#;
    let o = run(&["bound", "--params", GAUSS, "--chaos", chaos]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains(r#""inequality_holds": true"#), "{s}");
    assert!(s.contains(r#""eta": "2""#), "{s}");
}

#[test]
fn verify_suites_pass() {
    for suite in ["identities", "table1", "grades", "stein"] {
        let o = run(&["verify", suite]);
        let s = stdout(&o);
        assert!(o.status.success(), "{suite}: {s}");
        assert!(s.lines().any(|l| l.starts_with("PASS")));
        assert!(!s.lines().any(|l| l.starts_with("FAIL")), "{s}");
    }
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    let mut lines = csv.lines();
    let idx = lines.next().unwrap().split(',').position(|h| h == name).unwrap();
    lines.map(|l| l.split(',').nth(idx).unwrap().parse().unwrap()).collect()
}

#[test]
fn gaussian_sum_converges_and_is_reproducible() {
    let a = run(&["converge", "--descriptor", "bundled:gaussian-sum"]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let b = run(&["converge", "--descriptor", "bundled:gaussian-sum"]);
    assert_eq!(a.stdout, b.stdout);
    let csv = stdout(&a);
    let u = column(&csv, "U_value");
    assert_eq!(u.len(), 3);
    assert!(u.windows(2).all(|w| w[1] < w[0]), "{u:?}");
    let bound = column(&csv, "bound");
    assert!(bound.windows(2).all(|w| w[1] < w[0]), "{bound:?}");
    let other = run(&["converge", "--descriptor", "bundled:gaussian-sum", "--seed", "2"]);
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn student_first_chaos_has_zero_discrepancy() {
    let o = run(&["converge", "--descriptor", "bundled:student-t-self"]);
    assert!(o.status.success());
    let csv = stdout(&o);
    assert_eq!(column(&csv, "U_value"), vec![0.0]);
    assert_eq!(column(&csv, "bound"), vec![0.0]);
    assert!(column(&csv, "kolmogorov")[0] < 0.01);
}

#[test]
fn converge_writes_file() {
    let path = std::env::temp_dir().join(format!("pearchaos-cli-{}.csv", std::process::id()));
    let o = run(&["converge", "--descriptor", "bundled:gaussian-sum", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(text.lines().count(), 4);
    assert!(text.starts_with("k,m1,m2,m3,m4,U_value"));
}

#[test]
fn simulate_direct_and_sde() {
    let p = r#"{"class":"gamma","alpha":2,"beta":1}"#;
    let a = run(&["simulate", "--params", p, "--n", "50", "--seed", "3"]);
    let b = run(&["simulate", "--params", p, "--n", "50", "--seed", "3"]);
    assert_eq!(a.stdout, b.stdout);
    let s = stdout(&a);
    assert_eq!(s.lines().next(), Some("value"));
    assert_eq!(s.lines().count(), 51);
    assert!(s.lines().skip(1).all(|l| l.parse::<f64>().unwrap() > 0.0));
    let o = run(&["simulate", "--params", p, "--n", "20", "--sde", "--seed", "3"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 21);
}

#[test]
fn unknown_bundled_descriptor_exits_2() {
    let o = run(&["converge", "--descriptor", "bundled:nope"]);
    assert_eq!(o.status.code(), Some(2));
}
