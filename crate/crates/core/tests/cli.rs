use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_propscore")).args(args).output().unwrap()
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).to_string_lossy().into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn score_selected_rules() {
    let o = bin(&["score", &data("forecasts.csv"), &data("outcomes.csv"), "--rules", "quadratic,shannon"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "forecast_id,outcome,quadratic_score,quadratic_expected,shannon_score,shannon_expected");
    assert_eq!(lines.len(), 13);
    // first row: q = (0.2, 0.3, 0.5), outcome 3
    assert_eq!(lines[1], "1,3,0.62,0.38,-0.6931471805599453,-1.0296530140645737");
    assert!(lines[2].contains("-inf"));
    assert!(lines[12].starts_with("infinite_count,,0,0,2,0"));
}

#[test]
fn score_writes_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("scores.csv");
    let o = bin(&["score", &data("forecasts.csv"), &data("outcomes.csv"), "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(data("forecasts_scored.csv")).unwrap());
}

#[test]
fn malformed_input_exits_2_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "f.csv", "p1,p2\n0.5,0.5\n0.5,abc\n");
    let o = write(dir.path(), "o.csv", "outcome\n1\n2\n");
    let out = bin(&["score", &f, &o]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 3"), "{}", stderr(&out));

    let ragged = write(dir.path(), "r.csv", "p1,p2\n0.5,0.5\n1\n");
    assert_eq!(bin(&["score", &ragged, &o]).status.code(), Some(2));

    let header = write(dir.path(), "h.csv", "a,b\n0.5,0.5\n");
    assert_eq!(bin(&["score", &header, &o]).status.code(), Some(2));

    let bad_outcome = write(dir.path(), "bo.csv", "outcome\n1\n3\n");
    let f_ok = write(dir.path(), "ok.csv", "p1,p2\n0.5,0.5\n0.1,0.9\n");
    let out = bin(&["score", &f_ok, &bad_outcome]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 3"));

    let short = write(dir.path(), "short.csv", "outcome\n1\n");
    assert_eq!(bin(&["score", &f_ok, &short]).status.code(), Some(2));
}

#[test]
fn invalid_density_exits_3_listing_rows() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "f.csv", "p1,p2\n0.5,0.5\n0.7,0.7\n-0.1,1.1\n");
    let o = write(dir.path(), "o.csv", "outcome\n1\n1\n1\n");
    let out = bin(&["score", &f, &o]);
    assert_eq!(out.status.code(), Some(3));
    let err = stderr(&out);
    assert!(err.contains("line 3") && err.contains("line 4"), "{err}");
    assert!(!err.contains("line 2"));
}

#[test]
fn unknown_rule_exits_4() {
    let out = bin(&["score", &data("forecasts.csv"), &data("outcomes.csv"), "--rules", "quadratic,brier"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(stderr(&out).contains("brier"));
    assert!(out.stdout.is_empty());
    assert_eq!(bin(&["verify", "--rules", "power(0.5)"]).status.code(), Some(2));
}

#[test]
fn divergence_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "p.csv", "p1,p2\n1,0\n0.5,0.5\n");
    let q = write(dir.path(), "q.csv", "p1,p2\n0.5,0.5\n0,1\n");
    let out = bin(&["divergence", &p, &q, "--rules", "quadratic,shannon"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "rule,row,q1,q2");
    assert_eq!(lines[1], "quadratic,p1,0.5,2.0");
    assert_eq!(lines[2], "quadratic,p2,0.0,0.5");
    assert_eq!(lines[3], "shannon,p1,0.6931471805599453,inf");
}

#[test]
fn divergence_with_config_weights() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.ini", "[global]\nweights = 0.5,0.5\n\n[rule.quadratic]\n");
    let p = write(dir.path(), "p.csv", "p1,p2\n2,0\n");
    let q = write(dir.path(), "q.csv", "p1,p2\n1,1\n");
    let out = bin(&["divergence", &p, &q, "--config", &cfg]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(stdout(&out).lines().nth(1).unwrap(), "quadratic,p1,1.0");
}

#[test]
fn verify_with_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.ini",
        "[global]\nseed = 3\nsamples = 100\ndimensions = 3\nsuites = propriety,euler,symmetry,probe\n\n[rule.cube]\nkind = power\ngamma = 3\n\n[rule.wq]\nkind = weighted_quadratic\nmatrix = 2,0.5,0.5,1\n",
    );
    let out = bin(&["verify", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["seed"], 3);
    assert_eq!(report["rules"][0]["rule"], "cube");
    assert_eq!(report["rules"][0]["symmetry"][0]["classification"], "asymmetric_with_witness");
    assert_eq!(report["rules"][1]["symmetry"][0]["classification"], "symmetric_generalized_quadratic");
    assert_eq!(report["rules"][1]["propriety"][0]["dimension"], 2);
    assert_eq!(report["rules"][0]["probe"][0]["unique_claim"], true);

    let empty = write(dir.path(), "e.ini", "[global]\nseed = 1\n");
    assert_eq!(bin(&["verify", "--config", &empty]).status.code(), Some(2));
}

#[test]
fn verify_flags_override_config() {
    let out = bin(&["verify", "--rules", "quadratic", "--seed", "9", "--samples", "50", "--tol", "1e-9"]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["seed"], 9);
    assert_eq!(report["samples"], 50);
    assert_eq!(report["tolerance"], 1e-9);
}

#[test]
fn grid_score() {
    let dir = tempfile::tempdir().unwrap();
    let values: Vec<String> = (0..16).map(|i| format!("{}", 1.0 + 0.5 * (i as f64 * std::f64::consts::PI / 8.0).sin())).collect();
    let input = write(dir.path(), "g.csv", &format!("density\n{}\n", values.join("\n")));
    let out = bin(&["grid-score", &input]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "index,x,value,score");
    assert_eq!(lines.len(), 18);
    assert!(lines[1].starts_with("1,0.0,1.0,"));
    let fisher: f64 = lines[17].rsplit(',').next().unwrap().parse().unwrap();
    assert!(lines[17].starts_with("fisher_entropy,,,") && fisher > 0.0);

    let bad = write(dir.path(), "b.csv", "1\n2\n0\n1\n");
    assert_eq!(bin(&["grid-score", &bad]).status.code(), Some(3));
    let junk = write(dir.path(), "j.csv", "1\n2\nx\n1\n");
    assert_eq!(bin(&["grid-score", &junk]).status.code(), Some(2));
}
