use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn skyroute(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_skyroute"))
        .current_dir(dir)
        .env("RUST_LOG", "warn")
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) {
    let out = skyroute(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn json(path: &Path) -> Value {
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

/// Small scene with maps built, shared by the planning tests.
fn setup() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    ok(
        dir.path(),
        &[
            "gen-scene",
            "--seed",
            "3",
            "--edge",
            "210",
            "--obstacles",
            "4",
            "--out",
            "scene.json",
        ],
    );
    ok(
        dir.path(),
        &["build-maps", "--scene", "scene.json", "--out-dir", "maps"],
    );
    dir
}

fn plan(dir: &Path, gamma: &str, extra: &[&str], out: &str) -> Output {
    let mut args = vec![
        "plan",
        "--sinr",
        "maps/sinr.json",
        "--start",
        "5,5,95",
        "--goal",
        "205,205,125",
        "--gamma-db",
        gamma,
        "--out",
        out,
    ];
    args.extend_from_slice(extra);
    skyroute(dir, &args)
}

#[test]
fn gen_scene_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a.json", "b.json"] {
        ok(dir.path(), &["gen-scene", "--seed", "11", "--out", name]);
    }
    ok(
        dir.path(),
        &["gen-scene", "--seed", "12", "--out", "c.json"],
    );
    let a = json(&dir.path().join("a.json"));
    assert_eq!(a, json(&dir.path().join("b.json")));
    assert_ne!(a, json(&dir.path().join("c.json")));
    assert_eq!(a["config"]["seed"], 11);
}

#[test]
fn gen_scene_without_obstacles() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        dir.path(),
        &[
            "gen-scene",
            "--obstacles",
            "0",
            "--m",
            "3",
            "--out",
            "s.json",
        ],
    );
    let s = json(&dir.path().join("s.json"));
    assert_eq!(s["obstacles"].as_array().unwrap().len(), 0);
    assert_eq!(s["gbs"].as_array().unwrap().len(), 3);
}

#[test]
fn missing_input_and_bad_args_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = skyroute(
        dir.path(),
        &["build-maps", "--scene", "absent.json", "--out-dir", "m"],
    );
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(
        skyroute(dir.path(), &["plan", "--bogus"]).status.code(),
        Some(1)
    );
    assert_eq!(skyroute(dir.path(), &["--help"]).status.code(), Some(0));
}

#[test]
fn plan_reports_path_and_no_path() {
    let dir = setup();
    let d = dir.path();
    let out = plan(d, "-30", &[], "opt.json");
    assert_eq!(out.status.code(), Some(0));
    let opt = json(&d.join("opt.json"));
    assert_eq!(opt["feasible"], true);
    assert_eq!(opt["outage_m"], 0.0);
    let wps = opt["waypoints"].as_array().unwrap();
    assert_eq!(wps.first().unwrap(), &serde_json::json!([5.0, 5.0, 95.0]));
    assert_eq!(
        wps.last().unwrap(),
        &serde_json::json!([205.0, 205.0, 125.0])
    );

    let out = plan(d, "200", &[], "none.json");
    assert_eq!(out.status.code(), Some(2));
    let none = json(&d.join("none.json"));
    assert_eq!(none["feasible"], false);
    assert_eq!(none["no_path"]["start_feasible"], false);
}

#[test]
fn quantized_is_never_shorter_than_optimal() {
    let dir = setup();
    let d = dir.path();
    assert!(plan(d, "-30", &[], "o.json").status.success());
    assert!(plan(
        d,
        "-30",
        &["--mode", "quantized", "--kxy", "3", "--kz", "1"],
        "q.json"
    )
    .status
    .success());
    let o = json(&d.join("o.json"))["length_m"].as_f64().unwrap();
    let q = json(&d.join("q.json"))["length_m"].as_f64().unwrap();
    assert!(q >= o - 1e-9, "quantized {q} < optimal {o}");
}

#[test]
fn off_grid_endpoint_is_a_usage_error() {
    let dir = setup();
    let out = skyroute(
        dir.path(),
        &[
            "plan",
            "--sinr",
            "maps/sinr.json",
            "--start",
            "7,5,95",
            "--goal",
            "205,205,125",
            "--gamma-db",
            "-30",
            "--out",
            "x.json",
        ],
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn inspect_prints_json() {
    let dir = setup();
    let out = skyroute(
        dir.path(),
        &["inspect", "maps/sinr.json", "--gamma-db", "-1000"],
    );
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["kind"], "sinr");
    assert_eq!(v["feasible"][0]["feasible_cells"], v["covered_cells"]);
    let out = skyroute(dir.path(), &["inspect", "maps/gain_1.json"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["kind"], "gain");
}

#[test]
fn sweep_writes_csv_and_config() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(
        d,
        &[
            "gen-scene",
            "--seed",
            "5",
            "--edge",
            "90",
            "--obstacles",
            "1",
            "--out",
            "s.json",
        ],
    );
    ok(
        d,
        &[
            "sweep",
            "--scene",
            "s.json",
            "--goal",
            "85,85,125",
            "--gamma-from",
            "-10",
            "--gamma-to",
            "0",
            "--gamma-step",
            "5",
            "--modes",
            "optimal,quantized:3:1",
            "--bases",
            "actual,zero-load",
            "--out",
            "r.csv",
        ],
    );
    let csv = std::fs::read_to_string(d.join("r.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "gamma_t_db,mode,basis,feasible,length_m,outage_fraction,runtime_s"
    );
    assert_eq!(lines.count(), 3 * 2 * 2);
    assert!(!csv.contains('\r'));
    let cfg = json(&d.join("r.csv.config.json"));
    assert_eq!(
        cfg["sweep"]["gammas_db"],
        serde_json::json!([-10.0, -5.0, 0.0])
    );
}

#[test]
fn quantization_must_divide_the_grid() {
    let dir = setup();
    let out = plan(
        dir.path(),
        "-30",
        &["--mode", "quantized", "--kxy", "4"],
        "x.json",
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn sweep_rejects_bad_quantization() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(
        d,
        &[
            "gen-scene",
            "--edge",
            "90",
            "--obstacles",
            "0",
            "--out",
            "s.json",
        ],
    );
    let out = skyroute(
        d,
        &[
            "sweep",
            "--scene",
            "s.json",
            "--goal",
            "85,85,125",
            "--gamma-from",
            "0",
            "--gamma-to",
            "0",
            "--modes",
            "quantized:5:1",
            "--out",
            "r.csv",
        ],
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn build_maps_accepts_explicit_epsilon() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(
        d,
        &[
            "gen-scene",
            "--edge",
            "90",
            "--obstacles",
            "0",
            "--out",
            "s.json",
        ],
    );
    ok(
        d,
        &[
            "build-maps",
            "--scene",
            "s.json",
            "--epsilon",
            "-70",
            "--antenna",
            "ula",
            "--out-dir",
            "m",
        ],
    );
    let gain = json(&d.join("m/gain_1.json"));
    assert_eq!(gain["epsilon_db"], -70.0);
    assert_eq!(gain["config"]["channel"]["antenna"]["kind"], "ula");
}
