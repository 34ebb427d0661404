use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use bellpovm::sweep::SweepRow;
use bellpovm::{minimal_outcomes, predicted_probability, CountTable, FitDocument, Outcome, CIRELSON_BOUND};
use bellpovm_cli::Report;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn bellpovm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bellpovm"))
        .args(args)
        .env_remove(bellpovm_cli::OUT_DIR_ENV)
        .output()
        .expect("binary runs")
}

fn ok_stdout(args: &[&str]) -> String {
    let out = bellpovm(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn report(args: &[&str]) -> Report {
    serde_json::from_str(&ok_stdout(args)).unwrap()
}

fn p(r: &Report, o: &str) -> f64 {
    let o: Outcome = o.parse().unwrap();
    r.outcomes.iter().find(|row| row.outcome == o).unwrap().probability
}

#[test]
fn simulate_singlet_at_45() {
    let r = report(&["simulate", "--state", "singlet", "--theta-a", "45", "--theta-b", "45"]);
    assert!((r.aggregates.p_plus.value - 0.146447).abs() < 5e-7);
    assert!((r.aggregates.mean_b.value + std::f64::consts::SQRT_2).abs() < 1e-9);
    assert!(r.aggregates.mean_b.std_err.is_none());
    let pbf = r.p_bflip_uniform.unwrap().value;
    assert!((pbf - 0.25).abs() < 1e-12);
}

#[test]
fn simulate_fully_mixed_is_uniform() {
    let r = report(&["simulate", "--state", "werner:0", "--theta-a", "30", "--theta-b", "60"]);
    assert!(r.outcomes.iter().all(|row| (row.probability - 1.0 / 16.0).abs() < 1e-12));
    assert!(r.p_bflip_uniform.is_none());
}

#[test]
fn simulate_werner_close_to_measured_split() {
    let r = report(&["simulate", "--state", "werner:0.975", "--theta-a", "45", "--theta-b", "45"]);
    assert!((r.aggregates.p_plus.value - 0.1554).abs() < 5e-4);
}

#[test]
fn simulate_csv_has_sixteen_rows() {
    let text = ok_stdout(&["simulate", "--format", "csv"]);
    assert_eq!(text.lines().count(), 17);
    assert!(text.starts_with("outcome,b,probability,std_err,counts,p_bflip"));
}

#[test]
fn bad_state_inputs_fail() {
    assert!(!bellpovm(&["simulate", "--state", "werner:1.5"]).status.success());
    assert!(!bellpovm(&["simulate", "--state", "/no/such/matrix.json"]).status.success());
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("rho.json");
    // trace 2
    std::fs::write(&bad, r#"{"re": [[1,0,0,0],[0,1,0,0],[0,0,0,0],[0,0,0,0]]}"#).unwrap();
    let out = bellpovm(&["simulate", "--state", bad.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("density matrix"));
}

#[test]
fn matrix_file_state() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("singlet.json");
    std::fs::write(&f, r#"{"re": [[0,0,0,0],[0,0.5,-0.5,0],[0,-0.5,0.5,0],[0,0,0,0]]}"#).unwrap();
    let a = report(&["simulate", "--state", f.to_str().unwrap(), "--theta-a", "45", "--theta-b", "45"]);
    let b = report(&["simulate", "--state", "singlet", "--theta-a", "45", "--theta-b", "45"]);
    assert_eq!(a.outcomes, b.outcomes);
}

#[test]
fn counts_deterministic_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for f in [&a, &b] {
        ok_stdout(&["counts", "--state", "werner:0.975", "--seed", "42", "--out", f.to_str().unwrap()]);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let c = ok_stdout(&["counts", "--state", "werner:0.975", "--seed", "43"]);
    assert_ne!(std::fs::read_to_string(&a).unwrap(), c);
}

#[test]
fn counts_at_20_degrees_have_the_measured_scale() {
    let t =
        CountTable::from_csv(&ok_stdout(&["counts", "--state", "werner:0.975", "--theta-a", "20", "--theta-b", "20"]))
            .unwrap();
    // only the order of magnitude is meaningful: the source weight is not pinned down
    for o in &minimal_outcomes()[..2] {
        let n = t.get(*o);
        assert!((300..3000).contains(&n), "{o}: {n}");
    }
    let ideal = CountTable::from_csv(&ok_stdout(&["counts", "--theta-a", "20", "--theta-b", "20"])).unwrap();
    assert!(ideal.get(minimal_outcomes()[0]) < t.get(minimal_outcomes()[0]));
}

#[test]
fn counts_rejects_nonpositive_total() {
    let out = bellpovm(&["counts", "--mean-total", "0"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("mean total"));
    assert!(!bellpovm(&["counts", "--mean-total", "-5"]).status.success());
}

#[test]
fn analyze_measured_table() {
    let f = fixture("theta20_counts.csv");
    let r = report(&["analyze", f.to_str().unwrap(), "--theta-a", "20", "--theta-b", "20"]);
    assert_eq!(r.total_counts, Some(568_352));
    assert!((p(&r, "(+,+;+,-)") - 0.001311).abs() < 5e-7);
    assert!((p(&r, "(-,-;-,+)") - 0.001545).abs() < 5e-7);
    assert!(r.outcomes.iter().all(|row| row.std_err.unwrap() > 0.0));
    let low = r.outcomes.iter().find(|row| row.outcome == "(+,+;+,-)".parse().unwrap()).unwrap();
    assert!((low.p_bflip - 0.1478).abs() < 5e-5);
}

#[test]
fn analyze_uniform_and_split_tables() {
    let u = report(&["analyze", fixture("uniform_counts.csv").to_str().unwrap()]);
    assert_eq!(u.aggregates.mean_b.value, 0.0);
    let r = report(&["analyze", fixture("theta45_counts.csv").to_str().unwrap(), "--theta-a", "45", "--theta-b", "45"]);
    assert!((r.aggregates.p_plus.value - 0.1554).abs() < 1e-12);
    assert!((r.aggregates.mean_b.value + 1.3784).abs() < 1e-12);
    assert!(r.aggregates.mean_b.std_err.unwrap() > 0.0);
    let pbf = r.p_bflip_uniform.unwrap();
    assert!((pbf.value - 0.2563).abs() < 3e-4);
    assert!(pbf.std_err.unwrap() > 0.0);
}

#[test]
fn analyze_names_missing_outcome() {
    let out = bellpovm(&["analyze", fixture("missing_outcome.csv").to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("(-,-;-,+)"));
}

#[test]
fn analyze_rejects_duplicates_and_garbage() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(fixture("uniform_counts.csv")).unwrap();
    let dup = dir.path().join("dup.csv");
    std::fs::write(&dup, text.replacen("-1,-1,-1,-1,1000", "-1,-1,-1,+1,1000", 1)).unwrap();
    assert!(!bellpovm(&["analyze", dup.to_str().unwrap()]).status.success());
    let junk = dir.path().join("junk.csv");
    std::fs::write(&junk, text.replacen("+1,+1,+1,+1,1000", "+1,+1,+1,+1,lots", 1)).unwrap();
    let out = bellpovm(&["analyze", junk.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn counts_then_analyze_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("c.csv");
    let f = f.to_str().unwrap();
    let args = ["--state", "werner:0.9", "--theta-a", "30", "--theta-b", "55", "--mean-total", "200000"];
    ok_stdout(&[&["counts", "--out", f], &args[..]].concat());
    let measured = report(&["analyze", f, "--theta-a", "30", "--theta-b", "55"]);
    let exact = report(&[&["simulate"], &args[..]].concat());
    for (m, e) in measured.outcomes.iter().zip(&exact.outcomes) {
        assert!((m.probability - e.probability).abs() < 5.0 * m.std_err.unwrap());
    }
}

#[test]
fn sweep_shapes() {
    let rows: Vec<SweepRow> = serde_json::from_str(&ok_stdout(&["sweep", "--thetas", "0,20,40"])).unwrap();
    let low: Outcome = "(+,+;+,-)".parse().unwrap();
    let p: Vec<f64> = rows.iter().filter(|r| r.outcome == low).map(|r| r.probability).collect();
    assert!(p[1] < p[0] && p[1] < p[2]);

    let rows: Vec<SweepRow> = serde_json::from_str(&ok_stdout(&["sweep", "--thetas", "45"])).unwrap();
    let minus: Vec<f64> = rows.iter().filter(|r| r.b == -2).map(|r| r.probability).collect();
    assert!(minus.iter().all(|&x| (x - minus[0]).abs() < 1e-12));

    let rows: Vec<SweepRow> = serde_json::from_str(&ok_stdout(&["sweep", "--thetas", "90"])).unwrap();
    for r in &rows {
        let partner = rows.iter().find(|q| q.outcome == r.outcome.flipped(0b1010)).unwrap();
        assert!((r.probability - partner.probability).abs() < 1e-12);
    }
}

#[test]
fn sweep_rejects_bad_lists() {
    assert!(!bellpovm(&["sweep", "--thetas", "120"]).status.success());
    assert!(!bellpovm(&["sweep", "--thetas", "x"]).status.success());
}

#[test]
fn fit_from_sweep_files() {
    let dir = tempfile::tempdir().unwrap();
    for fmt in ["json", "csv"] {
        let f = dir.path().join(format!("s.{fmt}"));
        ok_stdout(&["sweep", "--state", "werner:0.9716", "--format", fmt, "--out", f.to_str().unwrap()]);
        let doc: FitDocument = serde_json::from_str(&ok_stdout(&["fit", f.to_str().unwrap()])).unwrap();
        let r = doc.result.unwrap();
        assert!((r.cirelson_ratio - 0.9716).abs() < 1e-9, "{fmt}");
        assert_eq!(doc.points.len(), 40);
    }
    let f = dir.path().join("noisy.json");
    ok_stdout(&["sweep", "--state", "werner:0.9716", "--sample", "--seed", "5", "--out", f.to_str().unwrap()]);
    let doc: FitDocument = serde_json::from_str(&ok_stdout(&["fit", f.to_str().unwrap()])).unwrap();
    let r = doc.result.unwrap();
    assert!(r.weighted);
    assert!((r.bell_magnitude - 0.9716 * CIRELSON_BOUND).abs() < 3.0 * r.bell_magnitude_std_err);
}

#[test]
fn fit_rejects_degenerate_abscissae() {
    let dir = tempfile::tempdir().unwrap();
    let doc = r#"{"points": [{"p_bflip": 0.2, "p_obs": 0.01}, {"p_bflip": 0.2, "p_obs": 0.02}]}"#;
    let g = dir.path().join("flat.json");
    std::fs::write(&g, doc).unwrap();
    let out = bellpovm(&["fit", g.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("distinct"));
}

#[test]
fn figures_csv_and_svg() {
    let six = ok_stdout(&["figures", "6", "--format", "csv"]);
    let mut r = csv::Reader::from_reader(six.as_bytes());
    let probs: Vec<(i32, f64)> = r
        .records()
        .map(|rec| {
            let rec = rec.unwrap();
            (rec[2].parse().unwrap(), rec[3].parse().unwrap())
        })
        .collect();
    assert_eq!(probs.len(), 16);
    let levels = |b: i32| probs.iter().filter(|(bb, _)| *bb == b).map(|(_, p)| *p).collect::<Vec<_>>();
    for b in [2, -2] {
        let l = levels(b);
        assert_eq!(l.len(), 8);
        assert!(l.iter().all(|&x| (x - l[0]).abs() < 1e-12));
    }

    let nine = ok_stdout(&["figures", "9", "--format", "csv"]);
    let mut r = csv::Reader::from_reader(nine.as_bytes());
    let mut n = 0;
    for rec in r.records() {
        let rec = rec.unwrap();
        let (pbf, p): (f64, f64) = (rec[2].parse().unwrap(), rec[3].parse().unwrap());
        assert!((p - predicted_probability(CIRELSON_BOUND, pbf)).abs() < 1e-12);
        n += 1;
    }
    assert_eq!(n, 40);

    for id in ["6", "7", "8", "9"] {
        let svg = ok_stdout(&["figures", id, "--format", "svg"]);
        let doc = roxmltree::Document::parse(&svg).unwrap_or_else(|e| panic!("figure {id}: {e}"));
        assert_eq!(doc.root_element().tag_name().name(), "svg");
    }
    assert_eq!(ok_stdout(&["figures", "7", "--seed", "3"]), ok_stdout(&["figures", "7", "--seed", "3"]));
    assert!(!bellpovm(&["figures", "5"]).status.success());
    assert!(!bellpovm(&["figures", "6", "--format", "json"]).status.success());
}

#[test]
fn validate_passes() {
    let out = ok_stdout(&["validate"]);
    assert!(out.contains("povm") && out.contains("oracle"));
    assert!(!out.contains("FAILED"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "state = \"werner:0\"\ntheta_a = 45.0\ntheta_b = 45.0\n").unwrap();
    let from_file = report(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert!((from_file.outcomes[0].probability - 1.0 / 16.0).abs() < 1e-12);
    let overridden = report(&["simulate", "--config", cfg.to_str().unwrap(), "--state", "singlet"]);
    assert!((overridden.aggregates.p_plus.value - 0.146447).abs() < 5e-7);
    assert_eq!(overridden.theta_a, 45.0);
    std::fs::write(&cfg, "thetaa = 1\n").unwrap();
    assert!(!bellpovm(&["simulate", "--config", cfg.to_str().unwrap()]).status.success());
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_bellpovm"))
        .args(["simulate", "--format", "csv"])
        .env(bellpovm_cli::OUT_DIR_ENV, dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert!(dir.path().join("report.csv").exists());
    // an explicit --out wins
    let explicit = dir.path().join("sub/x.json");
    let out = Command::new(env!("CARGO_BIN_EXE_bellpovm"))
        .args(["simulate", "--out", explicit.to_str().unwrap()])
        .env(bellpovm_cli::OUT_DIR_ENV, dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(explicit.exists());
    assert!(!dir.path().join("report.json").exists());
}
