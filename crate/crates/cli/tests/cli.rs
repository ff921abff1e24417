use std::path::Path;
use std::process::{Command, Output};

use dispersive_cli::files::{read_trajectory, Run};
use num_complex::Complex64;
use serde_json::Value;

fn dispflow(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dispflow")).current_dir(dir).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn overrides<'a>(pairs: &[&'a str]) -> Vec<&'a str> {
    pairs.iter().flat_map(|p| ["--override", p]).collect()
}

fn run_with(dir: &Path, command: &str, out: &str, pairs: &[&str]) -> Output {
    let mut args = vec![command, "--out", out];
    args.extend(overrides(pairs));
    let o = dispflow(dir, &args);
    assert!(code(&o) == 0 || command == "verify", "{command} failed: {}", stderr(&o));
    o
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Rows of (t, x, re, im) from a q or ψ table.
fn complex_rows(path: &Path) -> Vec<(f64, f64, Complex64)> {
    let mut r = csv::Reader::from_path(path).unwrap();
    assert_eq!(r.headers().unwrap().iter().collect::<Vec<_>>(), ["t", "x", "re", "im"]);
    r.records()
        .map(|rec| {
            let v: Vec<f64> = rec.unwrap().iter().map(|s| s.parse().unwrap()).collect();
            (v[0], v[1], Complex64::new(v[2], v[3]))
        })
        .collect()
}

const GREAT_CIRCLE: &[&str] = &[
    "initial.preset=great_circle",
    "flow.kind=schrodinger_map",
    "grid.n=64",
    "evolution.t_final=0.01",
];

#[test]
fn great_circle_schrodinger_map_is_stationary() {
    let tmp = tempfile::tempdir().unwrap();
    run_with(tmp.path(), "evolve", "gc", GREAT_CIRCLE);
    let (meta, run) = read_trajectory(&tmp.path().join("gc")).unwrap();
    assert_eq!(meta.preset, "great_circle");
    let Run::Map(tr) = run else { panic!("map trajectory expected") };
    assert!(tr.len() > 2);
    let first = &tr.states[0];
    assert!(tr.states.iter().all(|u| u.data().max_distance(first.data()) <= 1e-10));
    assert!((tr.times.last().unwrap() - 0.01).abs() < 1e-15);
}

#[test]
fn bump_smoke_run_writes_trajectory_and_diagnostics() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run_with(
        tmp.path(),
        "evolve",
        "bump",
        &["initial.preset=bump", "flow.kind=third_order", "flow.fm_a=1", "grid.n=64", "evolution.t_final=0.001"],
    );
    assert!(stdout(&o).contains("snapshots"), "{}", stdout(&o));
    let dir = tmp.path().join("bump");
    let mut traj = csv::Reader::from_path(dir.join("trajectory.csv")).unwrap();
    assert_eq!(traj.headers().unwrap().iter().collect::<Vec<_>>(), ["t", "x", "u1", "u2", "u3"]);
    let rows = traj.records().count();
    let mut diag = csv::Reader::from_path(dir.join("diagnostics.csv")).unwrap();
    assert_eq!(diag.headers().unwrap().iter().collect::<Vec<_>>(), ["t", "energy", "sphere_deviation", "arc_length_deviation"]);
    let snaps = diag.records().count();
    assert_eq!(rows, 64 * snaps);
    let meta = read_json(&dir.join("scenario.json"));
    assert_eq!(meta["flow"]["a"], 1.0);
    assert_eq!(meta["flow"]["b"], 0.5);
}

#[test]
fn invalid_flow_kind_names_the_key() {
    let tmp = tempfile::tempdir().unwrap();
    let o = dispflow(tmp.path(), &["evolve", "--override", "flow.kind=fifth_order"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("flow.kind") && stderr(&o).contains("fifth_order"), "{}", stderr(&o));

    let cfg = tmp.path().join("bad.ini");
    std::fs::write(&cfg, "# scenario\n[flow]\nkind = quintic\n").unwrap();
    let o = dispflow(tmp.path(), &["evolve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    let e = stderr(&o);
    assert!(e.contains("line 3") && e.contains("flow.kind"), "{e}");
}

#[test]
fn config_errors_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    let o = dispflow(tmp.path(), &["evolve", "--override", "initial.preset=torus"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("dispflow presets"), "{}", stderr(&o));

    let o = dispflow(tmp.path(), &["evolve", "--override", "grid.spacing=1"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("grid.spacing"), "{}", stderr(&o));

    let o = dispflow(tmp.path(), &["evolve", "--config", "missing.ini"]);
    assert_eq!(code(&o), 2);

    let o = dispflow(tmp.path(), &["evolve", "--override", "evolution.dt=0.1", "--override", "grid.n=64"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).to_lowercase().contains("stability") || stderr(&o).contains("CFL"), "{}", stderr(&o));
}

#[test]
fn transform_of_great_circle_is_minus_i() {
    let tmp = tempfile::tempdir().unwrap();
    run_with(tmp.path(), "evolve", "gc", GREAT_CIRCLE);
    let o = dispflow(tmp.path(), &["transform", "gc"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = complex_rows(&tmp.path().join("gc/q.csv"));
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|(_, _, q)| (q + Complex64::i()).norm() <= 1e-10));
    let summary = read_json(&tmp.path().join("gc/transform.json"));
    assert!(summary["modulus_gap"].as_f64().unwrap() <= 1e-10);
    assert_eq!(summary["flags"]["gauge_uncertain"], true);
}

#[test]
fn transform_of_constant_map_is_zero() {
    let tmp = tempfile::tempdir().unwrap();
    run_with(
        tmp.path(),
        "evolve",
        "c",
        &["initial.preset=constant_map", "initial.point=0,0.6,0.8", "grid.n=32", "evolution.t_final=0.001"],
    );
    let o = dispflow(tmp.path(), &["transform", "c", "--out", "cq"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = complex_rows(&tmp.path().join("cq/q.csv"));
    assert!(rows.iter().all(|(_, _, q)| q.norm() == 0.0));
    let summary = read_json(&tmp.path().join("cq/transform.json"));
    assert_eq!(summary["flags"]["decay_margin_satisfied"], true);
}

#[test]
fn transform_of_helix_gives_the_classical_psi() {
    let tmp = tempfile::tempdir().unwrap();
    run_with(
        tmp.path(),
        "evolve",
        "hx",
        &["initial.preset=helix", "flow.kind=filament_third", "flow.fm_a=1", "grid.n=64", "evolution.t_final=0.001"],
    );
    let o = dispflow(tmp.path(), &["transform", "hx"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = complex_rows(&tmp.path().join("hx/psi.csv"));
    let initial: Vec<_> = rows.iter().filter(|(t, _, _)| *t == 0.0).collect();
    assert_eq!(initial.len(), 64);
    assert!(initial.iter().all(|(_, x, psi)| (psi - Complex64::from_polar(0.5, x / 2.0)).norm() <= 1e-10));
    let q = complex_rows(&tmp.path().join("hx/q.csv"));
    assert!(q.iter().all(|(_, _, q)| (q.norm() - 0.5).abs() <= 1e-10));
}

#[test]
fn straight_filament_ends_omit_psi_but_keep_q() {
    let tmp = tempfile::tempdir().unwrap();
    run_with(
        tmp.path(),
        "evolve",
        "gf",
        &[
            "initial.preset=gaussian_filament",
            "flow.kind=filament_third",
            "flow.fm_a=1",
            "grid.n=128",
            "grid.x_min=-10",
            "grid.length=20",
            "evolution.t_final=0.001",
        ],
    );
    let o = dispflow(tmp.path(), &["transform", "gf"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(tmp.path().join("gf/q.csv").exists());
    assert!(!tmp.path().join("gf/psi.csv").exists());
    let summary = read_json(&tmp.path().join("gf/transform.json"));
    assert_eq!(summary["psi"]["written"], false);
    let undefined = summary["psi"]["undefined"].as_array().unwrap();
    assert_eq!(undefined.len(), summary["snapshots"].as_u64().unwrap() as usize);
    let points = undefined[0]["points"].as_array().unwrap();
    assert!(points.iter().any(|p| p == 0) && points.len() < 128);
}

#[test]
fn default_scenario_passes_every_check() {
    let tmp = tempfile::tempdir().unwrap();
    let o = dispflow(tmp.path(), &["verify", "--out", "v"]);
    assert_eq!(code(&o), 0, "{}\n{}", stdout(&o), stderr(&o));
    let report = read_json(&tmp.path().join("v/report.json"));
    assert_eq!(report["passed"], true);
    let names: Vec<&str> = report["reports"].as_array().unwrap().iter().map(|r| r["scenario"].as_str().unwrap()).collect();
    assert_eq!(names, ["invariants", "residual_t3rd", "commutation", "refinement"]);
    let summary = std::fs::read_to_string(tmp.path().join("v/summary.txt")).unwrap();
    assert!(summary.starts_with("verification PASS"), "{summary}");
    assert_eq!(summary, stdout(&o));
}

#[test]
fn great_circle_verify_flags_the_gauge() {
    let tmp = tempfile::tempdir().unwrap();
    let mut pairs = GREAT_CIRCLE.to_vec();
    pairs.extend(["verify.refinement=false", "verify.commutation=false"]);
    let o = run_with(tmp.path(), "verify", "v", &pairs);
    assert_eq!(code(&o), 0, "{}\n{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("gauge-uncertain"), "{}", stdout(&o));
    let report = read_json(&tmp.path().join("v/report.json"));
    let residual = report["reports"].as_array().unwrap().iter().find(|r| r["scenario"] == "residual_t3rd").unwrap();
    assert_eq!(residual["flags"]["gauge_uncertain"], true);
    let series = residual["series"].as_array().unwrap();
    let max_l2 = |name: &str| {
        let s = series.iter().find(|s| s["name"] == name).unwrap();
        s["l2"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).fold(0.0, f64::max)
    };
    assert!(max_l2("residual_uncorrected") > 1.0);
    assert!(max_l2("residual") < 1e-8);
}

#[test]
fn coarse_refinement_reports_orders_and_fails() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run_with(
        tmp.path(),
        "verify",
        "v",
        &[
            "verify.invariants=false",
            "verify.residual=false",
            "verify.commutation=false",
            "verify.refinement_n0=16",
            "verify.refinement_stride=1",
            "grid.n=64",
            "evolution.t_final=0.002",
        ],
    );
    assert_eq!(code(&o), 4, "{}\n{}", stdout(&o), stderr(&o));
    let out = stdout(&o);
    assert!(out.starts_with("verification FAIL") && out.contains("residual_l2 orders"), "{out}");
    let report = read_json(&tmp.path().join("v/report.json"));
    let orders = &report["reports"][0]["orders"][0];
    assert_eq!(orders["norm"], "residual_l2");
    assert_eq!(orders["ratios"].as_array().unwrap().len(), 2);
}

#[test]
fn stored_trajectories_verify_like_fresh_ones() {
    let tmp = tempfile::tempdir().unwrap();
    let pairs = ["grid.n=64", "initial.sigma=4", "evolution.t_final=0.002", "verify.refinement=false"];
    run_with(tmp.path(), "evolve", "ev", &pairs);
    let fresh = run_with(tmp.path(), "verify", "a", &pairs);
    let mut stored_pairs = pairs.to_vec();
    stored_pairs.push("verify.input=ev");
    let stored = run_with(tmp.path(), "verify", "b", &stored_pairs);
    assert_eq!(code(&fresh), 0, "{}", stdout(&fresh));
    assert_eq!(code(&stored), 0, "{}", stdout(&stored));
    let a = read_json(&tmp.path().join("a/report.json"));
    let b = read_json(&tmp.path().join("b/report.json"));
    assert_eq!(a["reports"], b["reports"]);
}

#[test]
fn presets_listing_is_complete_and_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let a = dispflow(tmp.path(), &["presets"]);
    let b = dispflow(tmp.path(), &["presets"]);
    assert_eq!(code(&a), 0);
    assert_eq!(stdout(&a), stdout(&b));
    let names: Vec<String> =
        stdout(&a).lines().map(|l| l.split_whitespace().next().unwrap().to_string()).collect();
    assert_eq!(
        names,
        ["constant_map", "great_circle", "bump", "perturbed_geodesic", "helix", "circle", "gaussian_filament", "random_bandlimited"]
    );
}

#[test]
fn random_presets_follow_the_seed() {
    let tmp = tempfile::tempdir().unwrap();
    let base = ["initial.preset=random_bandlimited", "grid.n=32", "evolution.t_final=0.0005"];
    let run = |out: &str, seed: &str| {
        let mut args = vec!["evolve", "--out", out, "--seed", seed];
        args.extend(overrides(&base));
        assert_eq!(code(&dispflow(tmp.path(), &args)), 0);
        std::fs::read_to_string(tmp.path().join(out).join("trajectory.csv")).unwrap()
    };
    let a = run("a", "11");
    assert_eq!(a, run("b", "11"));
    assert_ne!(a, run("c", "12"));
}
