use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;
use theta_lab::QExpansion;

const FIXTURES: [&str; 7] = ["e4", "e6", "delta", "one_plus_q", "n2_diag12", "n2_diag21", "n2_mixed"];

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(format!("{name}.json"))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_theta-lab"))
        .args(args)
        .env_remove("THETA_LAB_PRECISION")
        .output()
        .expect("binary runs")
}

fn run_to(dir: &TempDir, name: &str, args: &[&str]) -> (Output, PathBuf) {
    let out = dir.path().join(name);
    let mut all = args.to_vec();
    all.extend(["-o", out.to_str().unwrap()]);
    (run(&all), out)
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn rat(v: &Value) -> String {
    v.as_str().unwrap().to_string()
}

/// `(m, wm, wp) -> "x"` for an n=1 series with rational coefficients.
fn n1_terms(v: &Value) -> Vec<(i64, Vec<u64>, Vec<u64>, String)> {
    let mut out = Vec::new();
    for entry in v["coefficients"].as_array().unwrap() {
        let m: i64 = rat(&entry["h"][0][0][0]).parse().unwrap();
        for t in entry["c"].as_array().unwrap() {
            assert_eq!(rat(&t["c"][1]), "0");
            let word = |w: &Value| w.as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).collect();
            out.push((m, word(&t["wm"]), word(&t["wp"]), rat(&t["c"][0])));
        }
    }
    out
}

fn sigma(m: i64, power: u32) -> i64 {
    (1..=m).filter(|d| m % d == 0).map(|d| d.pow(power)).sum()
}

#[test]
fn fixtures_round_trip() {
    for name in FIXTURES {
        let text = fs::read_to_string(fixture(name)).unwrap();
        let f = QExpansion::from_json_str(&text).unwrap();
        let saved = serde_json::to_string_pretty(&f.to_json_value()).unwrap() + "\n";
        assert_eq!(saved, text, "{name}");
        assert_eq!(QExpansion::from_json_str(&saved).unwrap(), f, "{name}");
    }
}

#[test]
fn identity_frobenius_reproduces_fixtures() {
    let dir = TempDir::new().unwrap();
    for name in FIXTURES {
        let (o, out) = run_to(&dir, "id.json", &["frobenius", fixture(name).to_str().unwrap(), "--p", "1"]);
        assert!(o.status.success(), "{name}");
        assert_eq!(fs::read(out).unwrap(), fs::read(fixture(name)).unwrap(), "{name}");
    }
}

#[test]
fn output_is_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let input = fixture("n2_mixed");
    let args = ["theta", input.to_str().unwrap(), "--power", "2", "--project", "sym"];
    let (o1, a) = run_to(&dir, "a.json", &args);
    let (o2, b) = run_to(&dir, "b.json", &args);
    assert!(o1.status.success() && o2.status.success());
    assert_eq!(fs::read(a).unwrap(), fs::read(b).unwrap());
}

#[test]
fn theta_on_e4() {
    let dir = TempDir::new().unwrap();
    let (o, out) = run_to(&dir, "t.json", &["theta", fixture("e4").to_str().unwrap(), "--power", "1"]);
    assert!(o.status.success());
    let v = read_json(&out);
    assert_eq!(v["degree"], serde_json::json!([1, 1]));
    let terms = n1_terms(&v);
    assert_eq!(terms.len(), 30);
    for (m, wm, wp, c) in terms {
        assert_eq!((wm, wp), (vec![1], vec![1]));
        assert_eq!(c, (240 * m * sigma(m, 3)).to_string(), "m={m}");
    }
}

#[test]
fn frobenius_of_one_plus_q() {
    let dir = TempDir::new().unwrap();
    let (o, out) = run_to(&dir, "f.json", &["frobenius", fixture("one_plus_q").to_str().unwrap(), "--p", "3"]);
    assert!(o.status.success());
    let terms = n1_terms(&read_json(&out));
    assert_eq!(terms, vec![(0, vec![], vec![], "1".into()), (3, vec![], vec![], "1".into())]);
}

#[test]
fn maass_then_holpart_on_e4() {
    let dir = TempDir::new().unwrap();
    let (o, form) = run_to(&dir, "m.json", &["maass", fixture("e4").to_str().unwrap(), "--k", "4", "--iterate", "1"]);
    assert!(o.status.success());
    let v = read_json(&form);
    assert_eq!(v["k"], 6);
    let a = |m: i64| if m == 0 { 1 } else { 240 * sigma(m, 3) };
    for t in v["coeffs"].as_array().unwrap() {
        let (y, m) = (t["y"].as_i64().unwrap(), t["m"].as_i64().unwrap());
        let expected = if y == 0 { m * a(m) } else { 4 * a(m) };
        assert_eq!(rat(&t["c"][0]), expected.to_string(), "Y^{y} q^{m}");
    }
    let (o, hol) = run_to(&dir, "h.json", &["holpart", form.to_str().unwrap()]);
    assert!(o.status.success());
    for (m, _, _, c) in n1_terms(&read_json(&hol)) {
        assert_eq!(c, (m * a(m)).to_string());
    }
}

#[test]
fn ks_table_at_diagonal_point() {
    let dir = TempDir::new().unwrap();
    let point = dir.path().join("z.json");
    fs::write(&point, r#"[[["0","1"],["0","0"]],[["0","0"],["0","2"]]]"#).unwrap();
    let (o, out) = run_to(&dir, "ks.json", &["ks-table", "--n", "2", "--d", "1", "--point", point.to_str().unwrap()]);
    assert!(o.status.success());
    let v = read_json(&out);
    assert_eq!(v["kernel_ok"], true);
    let table = v["table"].as_array().unwrap();
    assert_eq!(table.len(), 16);
    for e in table {
        let (i, j) = (e["i"].as_u64().unwrap(), e["j"].as_u64().unwrap());
        let expected = match (i <= 2, j <= 2) {
            (true, false) => serde_json::json!([i, j - 2]),
            (false, true) => serde_json::json!([j, i - 2]),
            _ => Value::Null,
        };
        assert_eq!(e["pair"], expected, "({i}, {j})");
    }
}

#[test]
fn check_all_passes() {
    let o = run(&["check", "--suite", "all"]);
    assert_eq!(o.status.code(), Some(0));
    let report = String::from_utf8(o.stdout).unwrap();
    assert!(report.lines().count() >= 15);
    assert!(report.lines().all(|l| l.starts_with("PASS")));
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"n\": 1}").unwrap();
    let (o, _) = run_to(&dir, "x.json", &["theta", bad.to_str().unwrap(), "--power", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("validation"));

    let point = dir.path().join("z.json");
    fs::write(&point, r#"[[["0","1"]]]"#).unwrap();
    let (o, _) = run_to(&dir, "x.json", &["ks-table", "--n", "2", "--d", "1", "--point", point.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("shape"));

    fs::write(&point, r#"[[["0","-1"]]]"#).unwrap();
    let (o, _) = run_to(&dir, "x.json", &["ks-table", "--n", "1", "--d", "1", "--point", point.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));

    let (o, _) = run_to(&dir, "x.json", &["maass", fixture("e4").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(1));
}

#[test]
fn precision_variable_is_validated() {
    let o = Command::new(env!("CARGO_BIN_EXE_theta-lab"))
        .args(["check", "--suite", "theta"])
        .env("THETA_LAB_PRECISION", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    let o = Command::new(env!("CARGO_BIN_EXE_theta-lab"))
        .args(["check", "--suite", "theta"])
        .env("THETA_LAB_PRECISION", "2")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
}
