//! End-to-end checks through the `bbs` binary.

use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bbs() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bbs"))
}

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn scenario(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn run_ok(cmd: &mut Command) -> Output {
    let out = cmd.output().expect("spawn bbs");
    assert!(
        out.status.success(),
        "command failed ({:?}):\n{}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

#[test]
fn dataset_descriptives_match_published_summaries() {
    let of = bbs_core::io::load_dataset(
        &data("oldfaithful.csv"),
        bbs_core::io::FileFormat::Csv,
        "time",
        None,
    )
    .unwrap()
    .dataset;
    assert_eq!(of.n(), 272);
    let mean = of.times().iter().sum::<f64>() / of.n() as f64;
    assert!((mean - 70.897).abs() < 0.001, "mean {mean}");

    let kv = bbs_core::io::load_dataset(
        &data("kevlar49.csv"),
        bbs_core::io::FileFormat::Csv,
        "time",
        None,
    )
    .unwrap()
    .dataset;
    assert_eq!(kv.n(), 49);
    let mut t = kv.times();
    t.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert_eq!(t[t.len() / 2], 8831.0);
}

#[test]
fn fit_old_faithful_report() {
    let dir = tempfile::tempdir().unwrap();
    let json_path = dir.path().join("report.json");
    let out = run_ok(bbs()
        .arg("fit")
        .arg(data("oldfaithful.csv"))
        .args(["--models", "bbs,bbso,mxbs,bs,ln"])
        .args(["--out", json_path.to_str().unwrap()]));
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    assert!(text.contains("best by AIC: mxbs"), "{text}");

    let report: Value = serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    let rows = report["rows"].as_array().unwrap();
    let aic_of = |model: &str| -> f64 {
        rows.iter()
            .find(|r| r["model"] == model)
            .unwrap_or_else(|| panic!("no row for {model}"))["aic"]
            .as_f64()
            .unwrap()
    };
    assert!((aic_of("bbs") - 2107.184).abs() < 0.5, "bbs aic {}", aic_of("bbs"));
    assert!((aic_of("mxbs") - 2075.362).abs() < 0.5, "mxbs aic {}", aic_of("mxbs"));
    // -2(-1107.849) + 2k with k = 2 free parameters
    assert!((aic_of("bs") - 2219.698).abs() < 0.5, "bs aic {}", aic_of("bs"));
    let lr = report["lr_bs_vs_bbs"]["statistic"].as_f64().unwrap();
    assert!((lr - 114.514).abs() < 0.2, "LR {lr}");
    assert_eq!(report["lr_bs_vs_bbs"]["reject_at_5pct"], Value::Bool(true));

    // report arithmetic is recomputable from loglik and k, exactly
    let n = report["n"].as_f64().unwrap();
    for row in rows {
        let (ll, k) = (row["loglik"].as_f64().unwrap(), row["k"].as_f64().unwrap());
        assert!((row["aic"].as_f64().unwrap() - (-2.0 * ll + 2.0 * k)).abs() < 1e-10);
        assert!((row["bic"].as_f64().unwrap() - (-2.0 * ll + k * n.ln())).abs() < 1e-10);
    }

    // JSON re-run reproduces identical numbers
    let json2 = dir.path().join("report2.json");
    run_ok(bbs()
        .arg("fit")
        .arg(data("oldfaithful.csv"))
        .args(["--models", "bbs,bbso,mxbs,bs,ln"])
        .args(["--out", json2.to_str().unwrap()]));
    assert_eq!(
        std::fs::read_to_string(&json_path).unwrap(),
        std::fs::read_to_string(&json2).unwrap()
    );
}

#[test]
fn fit_kevlar_lr() {
    let dir = tempfile::tempdir().unwrap();
    let json_path = dir.path().join("report.json");
    run_ok(bbs()
        .arg("fit")
        .arg(data("kevlar49.csv"))
        .args(["--models", "bbs,bs"])
        .args(["--out", json_path.to_str().unwrap()]));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    let lr = report["lr_bs_vs_bbs"]["statistic"].as_f64().unwrap();
    assert!((lr - 16.771).abs() < 0.2, "LR {lr}");
    assert_eq!(report["lr_bs_vs_bbs"]["reject_at_5pct"], Value::Bool(true));
}

#[test]
fn fit_entomology_if_bundled() {
    let path = data("entomology.csv");
    if !path.exists() {
        eprintln!("entomology.csv not bundled; skipping (supply the censored dataset to enable)");
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let json_path = dir.path().join("report.json");
    run_ok(bbs()
        .arg("fit")
        .arg(&path)
        .args(["--event-col", "event"])
        .args(["--models", "bbs,bbso,mxbs,bs,ln"])
        .args(["--out", json_path.to_str().unwrap()]));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    assert_eq!(report["best_by_aic"], Value::String("bbs".into()));
    assert_eq!(report["best_by_bic"], Value::String("bbs".into()));
}

#[test]
fn simulate_is_deterministic_and_names_bad_keys() {
    let dir = tempfile::tempdir().unwrap();
    let (out1, out2) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&out1, &out2] {
        run_ok(bbs()
            .arg("simulate")
            .arg(scenario("table1_a01_d-10_n50_c00.scn"))
            .args(["--reps", "40"])
            .args(["--out", out.to_str().unwrap()]));
    }
    assert_eq!(
        std::fs::read(out1.join("report.json")).unwrap(),
        std::fs::read(out2.join("report.json")).unwrap()
    );
    assert_eq!(
        std::fs::read(out1.join("report.txt")).unwrap(),
        std::fs::read(out2.join("report.txt")).unwrap()
    );

    // malformed key: exit code 2, message names the key and line
    let bad = dir.path().join("bad.scn");
    std::fs::write(&bad, "study = 1\ngenerator = bbs\nalpha = 0.5\nbeta = 1\ndelta = 0\nn = 20\nreplications = 5\nseed = 1\nfrobnicate = 9\n").unwrap();
    let out = bbs().arg("simulate").arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("frobnicate") && err.contains("line 9"), "{err}");
}

#[test]
fn curves_rows_match_library_bit_exactly() {
    let out = run_ok(bbs()
        .arg("curves")
        .args(["--model", "bbs", "--alpha", "1", "--beta", "1", "--delta", "-1"])
        .args(["--range", "0.05:3", "--points", "100"]));
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    let p = bbs_core::BbsParams::new(1.0, 1.0, -1.0).unwrap();
    let mut prev_cdf = -1.0;
    let mut n_rows = 0;
    for line in text.lines().skip(1) {
        let cols: Vec<&str> = line.split('\t').collect();
        assert_eq!(cols.len(), 5);
        let t: f64 = cols[0].parse().unwrap();
        let pdf: f64 = cols[1].parse().unwrap();
        let cdf: f64 = cols[2].parse().unwrap();
        let sf: f64 = cols[3].parse().unwrap();
        // 17 significant digits round-trip exactly
        assert_eq!(pdf, p.pdf(t).unwrap());
        assert_eq!(cdf, p.cdf(t).unwrap());
        assert!(cdf >= prev_cdf);
        prev_cdf = cdf;
        assert!((sf + cdf - 1.0).abs() < 1e-12);
        n_rows += 1;
    }
    assert_eq!(n_rows, 100);
}

#[test]
fn ci_command_outputs_valid_intervals() {
    let dir = tempfile::tempdir().unwrap();
    let json_path = dir.path().join("ci.json");
    run_ok(bbs()
        .arg("ci")
        .arg(data("oldfaithful.csv"))
        .args(["--target", "mean,variance,survival@70"])
        .args(["--rho", "0.025"])
        .args(["--delta-grid", "-6:0"])
        .args(["--out", json_path.to_str().unwrap()]));
    let results: Value = serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    let rows = results.as_array().unwrap();
    assert_eq!(rows.len(), 3);
    for row in rows {
        let lower = row["lower"].as_f64().unwrap();
        let upper = row["upper"].as_f64().unwrap();
        let estimate = row["estimate"].as_f64().unwrap();
        assert!(lower <= upper);
        match row["target"]["target"].as_str().unwrap() {
            "survival-at-t" => {
                assert!((0.0..=1.0).contains(&lower) && (0.0..=1.0).contains(&upper));
                assert!((row["confidence"].as_f64().unwrap() - 0.975).abs() < 1e-12);
            }
            "mean" => {
                assert!(lower <= estimate && estimate <= upper);
                assert!((row["confidence"].as_f64().unwrap() - 0.975).abs() < 1e-12);
            }
            "variance" => {
                // variance target carries confidence 1 - 2 rho
                assert!((row["confidence"].as_f64().unwrap() - 0.95).abs() < 1e-12);
            }
            other => panic!("unexpected target {other}"),
        }
    }
}

#[test]
fn km_handles_censored_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("surv.csv");
    std::fs::write(&file, "time,event\n1,1\n2,1\n2,0\n3,1\n5,0\n").unwrap();
    let json_path = dir.path().join("km.json");
    let out = run_ok(bbs()
        .arg("km")
        .arg(&file)
        .args(["--event-col", "event"])
        .args(["--out", json_path.to_str().unwrap()]));
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    assert!(text.contains("survival"));
    let km: Value = serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    let pts = km["points"].as_array().unwrap();
    // events at t = 1 (5 at risk), t = 2 (4 at risk), t = 3 (2 at risk)
    assert_eq!(pts.len(), 3);
    let s: Vec<f64> = pts.iter().map(|p| p["survival"].as_f64().unwrap()).collect();
    assert!((s[0] - 0.8).abs() < 1e-12);
    assert!((s[1] - 0.6).abs() < 1e-12);
    assert!((s[2] - 0.3).abs() < 1e-12);
}

#[test]
fn ingestion_reports_rejected_rows_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("mixed.csv");
    std::fs::write(&file, "time\n2.0\n-1\nnope\n3.5\n").unwrap();
    let out = run_ok(bbs().arg("km").arg(&file));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains(":3:") && err.contains("rejected"), "{err}");

    // missing file: input error -> exit code 2
    let out = bbs().arg("km").arg(dir.path().join("absent.csv")).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    let missing_col = dir.path().join("cols.csv");
    std::fs::write(&missing_col, "hours\n1\n").unwrap();
    let out = bbs().arg("km").arg(&missing_col).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn numerical_failures_exit_with_code_3() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("tiny.csv");
    std::fs::write(&file, "time\n1.0\n2.0\n3.0\n").unwrap();
    let out = bbs()
        .arg("fit")
        .arg(&file)
        .args(["--models", "bbs"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn simulate_requires_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    let sc = dir.path().join("noseed.scn");
    std::fs::write(
        &sc,
        "study = 1\ngenerator = bbs\nalpha = 0.5\nbeta = 1\ndelta = 0\nn = 20\nreplications = 5\n",
    )
    .unwrap();
    let out = bbs().arg("simulate").arg(&sc).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("seed"));
    // and with --seed it runs
    run_ok(bbs().arg("simulate").arg(&sc).args(["--seed", "7"]));
}

#[test]
fn refine_pass_reports_separately() {
    let out = run_ok(bbs()
        .arg("fit")
        .arg(data("kevlar49.csv"))
        .args(["--models", "bbs"])
        .args(["--delta-grid", "-4:0"])
        .arg("--refine"));
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    assert!(text.contains("refinement pass"), "{text}");
    assert!(text.contains("bbs-refined"), "{text}");
}
