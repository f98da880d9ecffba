use polsar_entropy::io::fixtures::{sigma_u, INTERVALS_A};
use polsar_entropy::io::{write_mask, write_stack, CovarianceStack, Mask};
use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_polsar-entropy"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn synth(dir: &Path, name: &str, looks: &str, scale: &str, seed: &str) -> String {
    let path = dir.join(name);
    let p = path.to_str().unwrap();
    let out = run(&[
        "synth", "--looks", looks, "--scale", scale, "--rows", "20", "--cols", "40", "--stack-out", p, "--seed", seed,
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    p.to_string()
}

#[test]
fn interval_table_from_presets() {
    let v = json(&[
        "entropy",
        "--preset",
        "regions-a",
        "--level",
        "0.95",
        "--convention",
        "paper-compat",
        "--format",
        "json",
    ]);
    assert_eq!(v["schema"], "polsar-entropy/run-report/v1");
    assert_eq!(v["convention"], "paper-compat");
    let regions = v["regions"].as_array().unwrap();
    assert_eq!(regions.len(), 3);
    for (region, row) in regions.iter().zip(&INTERVALS_A) {
        assert_eq!(region["id"], row.region);
        for (e, (lo, hi)) in region["entropies"].as_array().unwrap().iter().zip(row.intervals) {
            let ci = &e["interval"];
            assert!((ci["lower"].as_f64().unwrap() - lo).abs() <= 0.05);
            assert!((ci["upper"].as_f64().unwrap() - hi).abs() <= 0.05);
        }
    }
}

#[test]
fn fixture_contrast_test_rejects_distinct_regions() {
    let v = json(&[
        "test",
        "--fixture",
        "name=A1,m=3,looks=1.361,det=355494.5,n=3708",
        "--fixture",
        "name=A3,m=3,looks=2.557,det=274.189,n=1079",
        "--kinds",
        "shannon",
        "--format",
        "json",
    ]);
    let t = &v["tests"][0];
    assert_eq!(t["test"], "contrast");
    assert_eq!(t["df"], 1);
    assert!(t["decisions"].as_array().unwrap().iter().all(|d| d["reject"] == true));
}

#[test]
fn synth_then_estimate_recovers_looks() {
    let dir = tempfile::tempdir().unwrap();
    let stack = synth(dir.path(), "s.pcsk", "4", "1", "11");
    let v = json(&[
        "estimate",
        "--stack",
        &stack,
        "--region",
        "rect:0,0,39,19",
        "--format",
        "json",
    ]);
    let r = &v["regions"][0];
    assert_eq!(r["n"], 800);
    assert_eq!(r["source"], "ml");
    assert!((r["looks"].as_f64().unwrap() - 4.0).abs() < 0.3);
    assert!(r["score_residual"].as_f64().unwrap().abs() <= 1e-8);
    let aic = &r["aic"];
    assert!(aic["looks_free"].as_f64().unwrap() < aic["looks_fixed"].as_f64().unwrap());
    assert_eq!(v["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let a = synth(dir.path(), "a.pcsk", "3.2", "1", "5");
    let b = synth(dir.path(), "b.pcsk", "3.2", "1", "5");
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let args = ["entropy", "--stack", &a, "--region", "rect:0,0,9,9", "--level", "0.9"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn mask_regions_and_gof() {
    let dir = tempfile::tempdir().unwrap();
    let stack = synth(dir.path(), "s.pcsk", "4", "1", "3");
    let mut data = vec![0u8; 20 * 40];
    data.iter_mut().step_by(3).for_each(|b| *b = 1);
    let mask_path = dir.path().join("m.pmsk");
    write_mask(&Mask::new(20, 40, data).unwrap(), &mask_path).unwrap();
    let region = format!("mask:{}", mask_path.display());
    let v = json(&["gof", "--stack", &stack, "--region", &region, "--value", "-5", "--format", "json"]);
    assert_eq!(v["inputs"].as_array().unwrap().len(), 2);
    assert_eq!(v["regions"][0]["n"], 267);
    assert_eq!(v["tests"].as_array().unwrap().len(), 3);
    assert_eq!(v["tests"][0]["reference"], -5.0);
}

#[test]
fn out_flag_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.txt");
    let o = run(&["entropy", "--preset", "regions-b", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(out).unwrap();
    assert!(text.contains("region B1"));
}

#[test]
fn casestudy_grid() {
    let o = run(&["casestudy", "--looks", "3:5", "--betas", "0.5", "--scales", "0,0.2"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("scale,looks,kind,value"));
    // 2 scales × 3 looks × (shannon, renyi, tsallis)
    assert_eq!(lines.count(), 18);
}

#[test]
fn simulate_writes_report_files() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.toml");
    std::fs::write(
        &config,
        "mode = \"size\"\nreplicas = 50\nsample_sizes = [9]\nkinds = [\"shannon\"]\n\n[population]\npreset = \"sigma_u\"\nlooks = 3.2\n",
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let v = json(&[
        "simulate",
        "--config",
        config.to_str().unwrap(),
        "--out-dir",
        out_dir.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(v["simulation"]["replicas"], 50);
    let csv = std::fs::read_to_string(out_dir.join("report.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 3);
    assert!(out_dir.join("report.json").exists());
}

#[test]
fn resample_two_regions() {
    let dir = tempfile::tempdir().unwrap();
    let stack = synth(dir.path(), "s.pcsk", "4", "1", "8");
    let v = json(&[
        "resample",
        "--stack",
        &stack,
        "--region",
        "rect:0,0,19,19",
        "--region",
        "rect:20,0,39,19",
        "--sizes",
        "49",
        "--replicas",
        "40",
        "--kinds",
        "shannon",
        "--same-population",
        "--seed",
        "2",
        "--format",
        "json",
    ]);
    assert_eq!(v["seed"], 2);
    assert_eq!(v["simulation"]["mode"], "size");
    assert_eq!(v["simulation"]["rates"].as_array().unwrap().len(), 3);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["nope"]).status.code(), Some(2));
    assert_eq!(run(&["entropy"]).status.code(), Some(2));
    let o = run(&["entropy", "--preset", "regions-a", "--kinds", "tsallis:0.5", "--level", "0.95"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error: "));
    assert_eq!(run(&["estimate", "--stack", "/nonexistent.pcsk", "--region", "rect:0,0,1,1"]).status.code(), Some(2));
    assert_eq!(run(&["test", "--preset", "regions-a", "--levels", "1.5"]).status.code(), Some(2));

    // a constant image has no finite looks estimate
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("flat.pcsk");
    write_stack(&CovarianceStack::new(3, 3, vec![sigma_u(); 9]).unwrap(), &path).unwrap();
    let o = run(&["estimate", "--stack", path.to_str().unwrap(), "--region", "rect:0,0,2,2"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("rect:0,0,2,2"));
}
