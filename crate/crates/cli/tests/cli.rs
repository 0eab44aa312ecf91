use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_bistable-waves");

struct Workspace {
    dir: TempDir,
}

impl Workspace {
    fn new() -> Self {
        Self {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn config(&self, name: &str, json: &str) -> PathBuf {
        let path = self.dir.path().join(name);
        fs::write(&path, json).unwrap();
        path
    }

    fn path(&self, rel: &str) -> PathBuf {
        self.dir.path().join(rel)
    }

    fn run(&self, args: &[&str], config: &Path, out: &str) -> Output {
        Command::new(BIN)
            .args(args)
            .arg("--config")
            .arg(config)
            .arg("--out")
            .arg(self.path(out))
            .output()
            .unwrap()
    }

    fn json(&self, rel: &str) -> Value {
        serde_json::from_slice(&fs::read(self.path(rel)).unwrap()).unwrap()
    }
}

fn linear_speed(a: f64) -> f64 {
    (1.0 - 2.0 * a) / (a * (1.0 - a)).sqrt()
}

const SMALL_GRID: &str = r#""grid": {"x_min": -20, "x_max": 20, "dx": 0.1},
    "experiment": {"t_end": 8, "observe_every": 0.25}"#;

#[test]
fn check_reports_h3_integral() {
    let ws = Workspace::new();
    let cfg = ws.config("demo.json", r#"{"reaction": "quadratic_demo"}"#);
    let out = ws.run(&["check"], &cfg, "out");
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = ws.json("out/check.json");
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["config"]["reaction"]["a"], 0.3);
    assert!((v["result"]["report"]["h3_integral"].as_f64().unwrap() - 0.125667).abs() < 1e-6);
}

#[test]
fn symmetric_term_fails_hypotheses() {
    let ws = Workspace::new();
    let cfg = ws.config("sym.json", r#"{"reaction": "piecewise_linear(-1,0.5)"}"#);
    let out = ws.run(&["check"], &cfg, "out");
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(
        ws.json("out/check.json")["result"]["report"]["h3_ok"],
        false
    );
}

#[test]
fn speed_of_linear_term() {
    let ws = Workspace::new();
    let cfg = ws.config("lin.json", r#"{"reaction": "piecewise_linear(-1,0.3)"}"#);
    let out = ws.run(&["speed"], &cfg, "out");
    assert_eq!(out.status.code(), Some(0));
    let c = ws.json("out/speed.json")["result"]["c_star"]
        .as_f64()
        .unwrap();
    assert!((c - 0.872872).abs() < 1e-6, "{c}");
    for label in ["c_zero", "c_check", "c_under", "c_over", "c_hat", "c_star"] {
        let text = fs::read_to_string(ws.path(&format!("out/phase_paths/{label}.csv"))).unwrap();
        assert!(text.starts_with("path,u,w\n"));
        assert!(text.contains("shoot_left,") && text.contains("envelope_beta_hi,"));
    }
}

#[test]
fn invalid_config_lists_every_violation() {
    let ws = Workspace::new();
    let cfg = ws.config(
        "bad.json",
        r#"{"reaction": "no_such_term", "grid": {"dx": 0.05, "dt": 5}, "experiment": {"t_end": -1}}"#,
    );
    let out = ws.run(&["speed"], &cfg, "out");
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    for field in ["reaction:", "experiment.t_end:"] {
        assert!(err.contains(field), "{field} missing in {err}");
    }
    assert!(!ws.path("out").exists());

    let cfg = ws.config(
        "dt.json",
        r#"{"reaction": "quadratic_demo", "grid": {"dt": 2}}"#,
    );
    let out = ws.run(&["simulate"], &cfg, "out");
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("dt_stability"));
}

#[test]
fn sweep_rows_follow_input_order() {
    let ws = Workspace::new();
    let cfg = ws.config("lin.json", r#"{"reaction": "piecewise_linear(-1,0.3)"}"#);
    let values = [0.45, 0.1, 0.5, 0.2, 0.3, 0.4];
    let arg = format!("reaction.a={}", values.map(|v| v.to_string()).join(","));
    let out = Command::new(BIN)
        .args(["speed", "--sweep", &arg, "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(ws.path("out"))
        .env("BW_THREADS", "3")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let table = fs::read_to_string(ws.path("out/sweep.csv")).unwrap();
    let mut lines = table.lines();
    assert_eq!(
        lines.next(),
        Some("index,reaction.a,status,c_star,c_check,c_hat,derivative_jump")
    );
    for (i, line) in lines.enumerate() {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells[0], i.to_string());
        let a: f64 = cells[1].parse().unwrap();
        assert_eq!(a, values[i]);
        if a == 0.5 {
            assert_eq!(cells[2], "NoPositiveRoot");
            assert!(cells[3].is_empty());
        } else {
            assert_eq!(cells[2], "ok");
            let c: f64 = cells[3].parse().unwrap();
            assert!((c - linear_speed(a)).abs() < 1e-6, "a = {a}: {c}");
        }
    }
    assert!(ws.path("out/rows/row_000/speed.json").exists());
}

#[test]
fn empty_sweep_gives_empty_table() {
    let ws = Workspace::new();
    let cfg = ws.config("lin.json", r#"{"reaction": "piecewise_linear(-1,0.3)"}"#);
    let out = ws.run(&["speed", "--sweep", "reaction.a="], &cfg, "out");
    assert_eq!(out.status.code(), Some(0));
    let table = fs::read_to_string(ws.path("out/sweep.csv")).unwrap();
    assert_eq!(table.lines().count(), 1);

    let out = ws.run(&["speed", "--sweep", "reaction.colour=1"], &cfg, "bad");
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(BIN)
        .args(["speed", "--sweep", "reaction.a=0.2", "--config"])
        .arg(&cfg)
        .env("BW_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

fn files_under(root: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                out.push(path.strip_prefix(root).unwrap().to_path_buf());
            }
        }
    }
    out.sort();
    out
}

#[test]
fn artifacts_are_byte_identical_across_runs() {
    let ws = Workspace::new();
    let cfg = ws.config(
        "demo.json",
        &format!(r#"{{"reaction": "quadratic_demo", {SMALL_GRID}, "output": {{"snapshot_times": [2, 4]}}}}"#),
    );
    for cmd in ["speed", "profile", "simulate"] {
        for out in ["first", "second"] {
            let o = ws.run(&[cmd], &cfg, out);
            assert_eq!(
                o.status.code(),
                Some(0),
                "{cmd}: {}",
                String::from_utf8_lossy(&o.stderr)
            );
        }
    }
    let first = files_under(&ws.path("first"));
    assert_eq!(first, files_under(&ws.path("second")));
    assert!(first.iter().all(|p| !p.to_string_lossy().contains(".tmp")));
    for rel in &first {
        assert_eq!(
            fs::read(ws.path("first").join(rel)).unwrap(),
            fs::read(ws.path("second").join(rel)).unwrap()
        );
    }
}

#[test]
fn profile_is_monotone() {
    let ws = Workspace::new();
    let cfg = ws.config("demo.json", r#"{"reaction": "quadratic_demo"}"#);
    assert_eq!(ws.run(&["profile"], &cfg, "out").status.code(), Some(0));
    let text = fs::read_to_string(ws.path("out/profile.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("z,u,w"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    assert!(rows
        .windows(2)
        .all(|p| p[1][0] > p[0][0] && p[1][1] > p[0][1]));
    assert!(rows.iter().all(|r| r[2] > 0.0));
    let summary = ws.json("out/profile.json");
    assert_eq!(summary["result"]["c1_ok"], true);
    assert_eq!(
        summary["result"]["points"].as_u64().unwrap() as usize,
        rows.len()
    );
}

#[test]
fn simulate_writes_trajectory_and_snapshots() {
    let ws = Workspace::new();
    let cfg = ws.config(
        "demo.json",
        &format!(
            r#"{{"reaction": "quadratic_demo", {SMALL_GRID}, "output": {{"snapshot_times": [0, 8]}}}}"#
        ),
    );
    let out = ws.run(&["simulate"], &cfg, "out");
    assert_eq!(out.status.code(), Some(0));
    let traj = fs::read_to_string(ws.path("out/trajectory.csv")).unwrap();
    assert!(traj.starts_with("t,front_position,shift_distance,z_best\n"));
    assert_eq!(traj.lines().count(), 1 + 33);
    let snap = fs::read_to_string(ws.path("out/snapshots/snapshot_001.csv")).unwrap();
    assert!(snap.starts_with("x,u\n"));
    assert_eq!(snap.lines().count(), 1 + 401);
    let v = ws.json("out/simulate.json");
    let speed = v["result"]["speed"].as_f64().unwrap();
    let c = v["result"]["c_star"].as_f64().unwrap();
    assert!((speed - c).abs() / c < 0.05, "{speed} vs {c}");
}

#[test]
fn short_domain_is_warned_about() {
    let ws = Workspace::new();
    let cfg = ws.config(
        "short.json",
        r#"{"reaction": "quadratic_demo", "grid": {"x_min": -10, "x_max": 10, "dx": 0.1},
            "experiment": {"t_end": 20, "observe_every": 0.5}}"#,
    );
    let out = ws.run(&["simulate"], &cfg, "out");
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("domain too short"));
    let warnings = &ws.json("out/simulate.json")["warnings"];
    assert!(warnings[0].as_str().unwrap().contains("x_min"));
}

#[test]
fn stability_reports_decay_fit() {
    let ws = Workspace::new();
    let cfg = ws.config(
        "wave.json",
        &format!(
            r#"{{"reaction": "quadratic_demo", "grid": {{"x_min": -20, "x_max": 20, "dx": 0.1}},
                "experiment": {{"t_end": 6, "observe_every": 0.25, "initial_condition": "wave_plus_delta",
                                "delta": 0.1, "window": [0.5, 3]}}}}"#
        ),
    );
    let out = ws.run(&["stability"], &cfg, "out");
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let r = &ws.json("out/stability.json")["result"];
    for key in [
        "kappa",
        "K",
        "r2",
        "window",
        "speed",
        "speed_error_vs_cstar",
    ] {
        assert!(!r[key].is_null(), "{key}");
    }
    assert!(r["kappa"].as_f64().unwrap() > 0.0);
    assert!(fs::read_to_string(ws.path("out/stability.csv"))
        .unwrap()
        .starts_with("t,"));
}

#[test]
fn blow_up_exits_with_divergence_code() {
    let ws = Workspace::new();
    let cfg = ws.config(
        "stiff.json",
        r#"{"reaction": {"a": 0.3, "f0": [0, -1], "f1": [100, -100]},
            "grid": {"x_min": -20, "x_max": 20, "dx": 1, "dt": 0.019},
            "experiment": {"t_end": 2, "observe_every": 0.5, "initial_condition": "custom_table",
                           "table": [[-5, 0], [5, 1]]}}"#,
    );
    let out = ws.run(&["simulate"], &cfg, "out");
    assert_eq!(out.status.code(), Some(5));
    assert!(String::from_utf8_lossy(&out.stderr).contains("diverged"));
}

#[test]
fn embedded_config_parses_back() {
    let ws = Workspace::new();
    let cfg = ws.config(
        "demo.json",
        r#"{"reaction": {"preset": "quadratic_demo", "branch_rule": "average"}}"#,
    );
    assert_eq!(ws.run(&["bounds"], &cfg, "one").status.code(), Some(0));
    let embedded = ws.json("one/bounds.json")["config"].clone();
    let again = ws.config("again.json", &embedded.to_string());
    assert_eq!(ws.run(&["bounds"], &again, "two").status.code(), Some(0));
    assert_eq!(
        fs::read(ws.path("one/bounds.json")).unwrap(),
        fs::read(ws.path("two/bounds.json")).unwrap()
    );
}
