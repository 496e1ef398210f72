use std::fs;
use std::process::Command;

use ehcrn::boundary::Source;
use ehcrn::config::{parse_config, Settings};
use ehcrn::csv::{emit_boundary_csv, parse_boundary, quantized, HEADER};
use ehcrn::sweep::{builtin_experiment, ComparisonReport};
use ehcrn::*;

const BASELINE: &str = "\
p_pd_success = 0.3
p_ss_success = 0.4
s_pd_success = 0.7
s_sd_success = 0.7
lambda_ep = 0.6
lambda_es = 0.6
";

fn report(fig: &str) -> ComparisonReport {
    run_experiment(&builtin_experiment(fig).unwrap()).unwrap()
}

fn ehcrn(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_ehcrn")).args(args).output().unwrap()
}

#[test]
fn config_examples() {
    let mut spec = parse_config(BASELINE).unwrap();
    spec.name = "fig4".into();
    assert_eq!(spec, builtin_experiment("fig4").unwrap());

    let err = parse_config(&BASELINE.replace("lambda_ep = 0.6", "lambda_ep = 1.5")).unwrap_err();
    assert!(err.to_string().contains("lambda_ep"), "{err}");

    let err = parse_config("# nothing here\n").unwrap_err().to_string();
    for key in ["p_pd_success", "p_ss_success", "s_pd_success", "s_sd_success"] {
        assert!(err.contains(key), "{err}");
    }
}

#[test]
fn fig9_csv() {
    let dir = tempfile::tempdir().unwrap();
    let r = report("fig9");
    let paths = emit_boundary_csv(&r, dir.path()).unwrap();
    assert_eq!(paths.len(), 2);
    let noncoop = fs::read_to_string(dir.path().join("fig9_noncoop_lep0.50_les0.80_analytic.csv")).unwrap();
    assert_eq!(noncoop.lines().next(), Some(HEADER));
    assert!(noncoop.lines().any(|l| l == "0.000000,0.560000,noncoop,analytic,false"));

    for (path, b) in paths.iter().zip(&r.boundaries) {
        let parsed = parse_boundary(&fs::read_to_string(path).unwrap()).unwrap().unwrap();
        assert_eq!(parsed, quantized(&b.boundary));
    }
}

#[test]
fn fig6_last_nonzero_row() {
    let dir = tempfile::tempdir().unwrap();
    let r = report("fig6");
    emit_boundary_csv(&r, dir.path()).unwrap();
    let text = fs::read_to_string(dir.path().join("fig6_union_lep0.60_les1.00_analytic.csv")).unwrap();
    let b = parse_boundary(&text).unwrap().unwrap();
    let last = b.points().filter(|&(_, s)| s > 0.0).last().unwrap();
    assert!(last.0 <= 0.348, "{last:?}");
    assert!((b.pu_cutoff().unwrap() - 0.348).abs() <= 0.005);
}

#[test]
fn empty_boundary_is_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let mut r = report("fig4");
    r.boundaries[0].boundary = RegionBoundary::new(RegionLabel::Union, Source::Analytic, vec![], vec![], vec![]).unwrap();
    let paths = emit_boundary_csv(&r, dir.path()).unwrap();
    assert_eq!(fs::read_to_string(&paths[0]).unwrap(), format!("{HEADER}\n"));
}

#[test]
fn unwritable_output() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("plain-file");
    fs::write(&file, "x").unwrap();
    assert!(matches!(emit_boundary_csv(&report("fig4"), &file), Err(Error::Io { .. })));
}

#[test]
fn overrides_apply_over_file() {
    let mut s = Settings::parse(BASELINE).unwrap();
    s.set("policy=noncooperative").unwrap();
    s.set("lambda_es=0.8").unwrap();
    let spec = s.to_spec("x").unwrap();
    assert_eq!(spec.policies, vec![PolicySpec::non_cooperative()]);
    assert_eq!(spec.params.lambda_es, 0.8);
}

#[test]
fn binary_reproduce() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_str().unwrap();

    let out = ehcrn(&["reproduce", "fig9", "--out", out_dir]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("seed 42"), "{stdout}");
    assert!(stdout.contains("crossover") && stdout.contains("reference 0.075"), "{stdout}");
    assert!(dir.path().join("fig9_union_lep0.50_les0.80_analytic.csv").exists());

    let stdout = String::from_utf8(ehcrn(&["reproduce", "fig5", "--out", out_dir]).stdout).unwrap();
    assert!(stdout.contains("computed 0.350000 vs reference 0.35"), "{stdout}");

    let bad = ehcrn(&["reproduce", "nosuchfig", "--out", out_dir]);
    assert!(!bad.status.success());
    let stderr = String::from_utf8(bad.stderr).unwrap();
    assert!(stderr.contains("fig2") && stderr.contains("fig10"), "{stderr}");
    assert!(bad.stdout.is_empty());
}

#[test]
fn binary_config_commands() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("base.cfg");
    fs::write(&cfg, BASELINE).unwrap();
    let (cfg, out_dir) = (cfg.to_str().unwrap(), dir.path().to_str().unwrap());

    let out = ehcrn(&["region", "--config", cfg, "--out", out_dir]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("base_union_lep0.60_les0.60_analytic.csv").exists());

    let out = ehcrn(&["crossover", "--config", cfg, "--set", "lambda_ep=0.5", "--set", "lambda_es=0.8", "--out", out_dir]);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("Lambda_p(lambda_es = 0.8) = 0.075652"), "{stdout}");

    let out = ehcrn(&[
        "simulate", "--config", cfg, "--out", out_dir,
        "--set", "lambda_p_grid_max=0.1", "--set", "lambda_p_grid_step=0.1",
        "--set", "horizon_slots=20000", "--set", "burn_in_slots=2000", "--set", "seed=7",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8(out.stdout).unwrap().contains("seed 7"));
    let sim = fs::read_to_string(dir.path().join("base_union_lep0.60_les0.60_simulated.csv")).unwrap();
    assert_eq!(sim.lines().count(), 3);

    assert!(!ehcrn(&["region", "--set", "colour=red"]).status.success());
    assert!(!ehcrn(&["region", "--config", "/nonexistent/cfg"]).status.success());
    let list = String::from_utf8(ehcrn(&["list"]).stdout).unwrap();
    assert_eq!(list.lines().count(), 9);
}
