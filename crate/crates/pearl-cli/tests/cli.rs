//! End-to-end tests of the binary: determinism, exit codes, file formats.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pearl"))
}

fn workdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("pearl-cli-test-{name}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("spawn pearl binary")
}

const SMALL_PURSUIT: &str = r#"
task = "pursuit"
seed = 3

[pursuit]
agents = 3
prey = "static"

[training]
iterations = 20
samples_per_iteration = 60
goal_radius = 0.45
margin = 0.4
n_mc = 1
eval_count = 5
eval_horizon = 10.0
agents = 3
"#;

#[test]
fn train_same_seed_same_file() {
    let dir = workdir("train-determinism");
    let cfg = dir.join("task.cfg");
    write(&cfg, SMALL_PURSUIT);
    for out in ["w1.toml", "w2.toml"] {
        let output = run(bin()
            .arg("train")
            .arg("--config")
            .arg(&cfg)
            .arg("--out")
            .arg(dir.join(out)));
        assert!(output.status.success(), "{output:?}");
    }
    let a = std::fs::read(dir.join("w1.toml")).unwrap();
    let b = std::fs::read(dir.join("w2.toml")).unwrap();
    assert_eq!(a, b, "training output must be seed-deterministic");
}

#[test]
fn malformed_preference_exits_2_naming_field() {
    let dir = workdir("bad-pref");
    let cfg = dir.join("task.cfg");
    write(
        &cfg,
        r#"
task = "cargo"

[[preference]]
kind = "attractor"
agents = []
subspace = "position"
target = { point = [0.0, 0.0, 0.0] }
"#,
    );
    let output = run(bin()
        .arg("plan")
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out")));
    assert_eq!(output.status.code(), Some(2), "{output:?}");
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("agents"), "stderr names the field: {stderr}");
}

#[test]
fn unknown_task_exits_2() {
    let dir = workdir("bad-task");
    let cfg = dir.join("task.cfg");
    write(&cfg, "task = \"teleport\"\n");
    let output = run(bin()
        .arg("plan")
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out")));
    assert_eq!(output.status.code(), Some(2), "{output:?}");
}

#[test]
fn unknown_bench_suite_exits_2() {
    let dir = workdir("bad-suite");
    let output = run(bin()
        .arg("bench")
        .arg("--suite")
        .arg("everything")
        .arg("--out")
        .arg(dir.join("b.csv")));
    assert_eq!(output.status.code(), Some(2), "{output:?}");
}

#[test]
fn zero_horizon_plan_reports_exhaustion() {
    let dir = workdir("zero-horizon");
    let cfg = dir.join("task.cfg");
    write(
        &cfg,
        r#"
task = "cargo"
seed = 5
"#,
    );
    let output = run(bin()
        .arg("plan")
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .arg("--horizon")
        .arg("0"));
    assert!(output.status.success(), "{output:?}");
    let summary = std::fs::read_to_string(dir.join("out/summary.csv")).unwrap();
    assert!(summary.contains("horizon exhausted"), "{summary}");
    let traj = std::fs::read_to_string(dir.join("out/traj_000.csv")).unwrap();
    assert_eq!(traj.lines().count(), 1, "header only for an empty trajectory");
}

#[test]
fn cargo_plan_with_published_weights_reaches_goal() {
    let dir = workdir("cargo-deterministic");
    let cfg = dir.join("task.cfg");
    // Deterministic variant: no [disturbance] table.
    write(
        &cfg,
        r#"
task = "cargo"
seed = 1
horizon = 20.0

[cargo]
goal = [0.0, 0.0, 1.2]
"#,
    );
    let ic = dir.join("starts.toml");
    write(
        &ic,
        r#"
[[state]]
coords = [3.0, -4.0, 1.2, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]
"#,
    );
    let output = run(bin()
        .arg("plan")
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .arg("--policy")
        .arg("das")
        .arg("--initial-conditions")
        .arg(&ic));
    assert!(output.status.success(), "{output:?}");
    let summary = std::fs::read_to_string(dir.join("out/summary.csv")).unwrap();
    let line = summary.lines().nth(1).unwrap();
    let cells: Vec<&str> = line.split(',').collect();
    assert_eq!(cells[2], "1", "success flag: {summary}");
    let final_distance: f64 = cells[4].parse().unwrap();
    assert!(final_distance <= 0.05, "final distance {final_distance}");
}

#[test]
fn plan_outputs_identical_modulo_timing() {
    let dir = workdir("plan-determinism");
    let cfg = dir.join("task.cfg");
    write(
        &cfg,
        r#"
task = "pendulum"
seed = 9
horizon = 1.0

[disturbance]
mean = 1.0
std = 1.0
"#,
    );
    for out in ["a", "b"] {
        let output = run(bin()
            .arg("plan")
            .arg("--config")
            .arg(&cfg)
            .arg("--out")
            .arg(dir.join(out))
            .arg("--trials")
            .arg("2"));
        assert!(output.status.success(), "{output:?}");
    }
    for traj in ["traj_000.csv", "traj_001.csv"] {
        let a = std::fs::read_to_string(dir.join("a").join(traj)).unwrap();
        let b = std::fs::read_to_string(dir.join("b").join(traj)).unwrap();
        let header: Vec<&str> = a.lines().next().unwrap().split(',').collect();
        let timing_col = header.iter().position(|&h| h == "plan_ms").unwrap();
        for (la, lb) in a.lines().zip(b.lines()).skip(1) {
            let ca: Vec<&str> = la.split(',').collect();
            let cb: Vec<&str> = lb.split(',').collect();
            assert_eq!(ca.len(), cb.len());
            for (k, (va, vb)) in ca.iter().zip(&cb).enumerate() {
                if k != timing_col {
                    assert_eq!(va, vb, "column {} differs", header[k]);
                }
            }
        }
    }
}

#[test]
fn trajectory_csv_has_documented_column_count() {
    let dir = workdir("csv-schema");
    let cfg = dir.join("task.cfg");
    write(&cfg, "task = \"cargo\"\nseed = 2\nhorizon = 0.1\n");
    let output = run(bin()
        .arg("plan")
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out")));
    assert!(output.status.success(), "{output:?}");
    let traj = std::fs::read_to_string(dir.join("out/traj_000.csv")).unwrap();
    let header: Vec<&str> = traj.lines().next().unwrap().split(',').collect();
    // 1 (t) + 2*d_s (state) + d_a (action) + 1 (value) + 1 (timing) + d_a (xi)
    let (d_s2, d_a) = (10, 3);
    assert_eq!(header.len(), 1 + d_s2 + d_a + 1 + 1 + d_a);
    assert_eq!(header[0], "t");
    assert!(header.contains(&"v"));
    assert!(header.contains(&"plan_ms"));
    assert!(header.contains(&"xi2"));
}

#[test]
fn analyze_counts_transition_and_rerun_is_identical() {
    let dir = workdir("analyze");
    let out1 = dir.join("extrema1.csv");
    let out2 = dir.join("extrema2.csv");
    for out in [&out1, &out2] {
        let output = run(bin()
            .arg("analyze")
            .arg("--c-range")
            .arg("100:100:1")
            .arg("--d-range")
            .arg("0.5:5:4")
            .arg("--out")
            .arg(out));
        assert!(output.status.success(), "{output:?}");
    }
    assert_eq!(
        std::fs::read(&out1).unwrap(),
        std::fs::read(&out2).unwrap(),
        "analyze output is deterministic"
    );
    let text = std::fs::read_to_string(&out1).unwrap();
    let mut counts = std::collections::BTreeMap::new();
    for line in text.lines().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        let d: f64 = cells[1].parse().unwrap();
        let n_minima: usize = cells[3].parse().unwrap();
        counts.insert((d * 10.0) as i64, n_minima);
    }
    assert_eq!(counts.get(&5), Some(&2), "two basins at d = 0.5: {counts:?}");
    assert_eq!(counts.get(&50), Some(&1), "one basin at d = 5: {counts:?}");
}

#[test]
fn preset_configs_parse_and_roundtrip() {
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(configs).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("cfg") {
            continue;
        }
        let text = std::fs::read_to_string(&path).unwrap();
        let cfg = pearl::config::TaskConfig::parse_str(&text)
            .unwrap_or_else(|e| panic!("{path:?}: {e}"));
        let reparsed =
            pearl::config::TaskConfig::parse_str(&cfg.to_toml_string().unwrap()).unwrap();
        assert_eq!(cfg, reparsed, "{path:?} round-trips");
        cfg.build_task().unwrap_or_else(|e| panic!("{path:?}: {e}"));
        seen += 1;
    }
    assert_eq!(seen, 5, "all five presets exist");
}

#[test]
fn pearl_threads_env_caps_pool() {
    let dir = workdir("threads");
    let cfg = dir.join("task.cfg");
    write(&cfg, "task = \"cargo\"\nseed = 4\nhorizon = 0.5\n");
    let output = run(bin()
        .env("PEARL_THREADS", "1")
        .arg("plan")
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .arg("--trials")
        .arg("3"));
    assert!(output.status.success(), "{output:?}");
    let summary = std::fs::read_to_string(dir.join("out/summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 4, "three trials plus header");
}

#[test]
fn weight_length_mismatch_exits_3() {
    let dir = workdir("bad-weights");
    let cfg = dir.join("task.cfg");
    write(&cfg, "task = \"cargo\"\nseed = 1\nhorizon = 0.5\n");
    let weights = dir.join("w.toml");
    write(
        &weights,
        r#"
task = "cargo"
theta = [-1.0, -2.0]
seed = 1

[meta]
n_mc = 1
fittest_trial = 0
success_rate = 1.0
mean_duration = 1.0
intercept = 0.0
iteration_norms = []
"#,
    );
    let output = run(bin()
        .arg("plan")
        .arg("--config")
        .arg(&cfg)
        .arg("--weights")
        .arg(&weights)
        .arg("--out")
        .arg(dir.join("out")));
    assert_eq!(output.status.code(), Some(3), "{output:?}");
}

#[test]
fn bench_feature_scaling_is_near_linear() {
    let dir = workdir("bench-features");
    let out = dir.join("features.csv");
    let output = run(bin()
        .arg("bench")
        .arg("--suite")
        .arg("feature-scaling")
        .arg("--out")
        .arg(&out));
    assert!(output.status.success(), "{output:?}");
    let text = std::fs::read_to_string(&out).unwrap();
    let fit = text
        .lines()
        .find(|l| l.starts_with("fit,"))
        .expect("fit row present");
    let cells: Vec<&str> = fit.split(',').collect();
    let exponent: f64 = cells[3].parse().unwrap();
    assert!(exponent <= 1.2, "feature scaling exponent {exponent}: {text}");
}

#[test]
fn bench_pursuit_scaling_is_near_linear() {
    let dir = workdir("bench-pursuit");
    let out = dir.join("pursuit.csv");
    let output = run(bin()
        .arg("bench")
        .arg("--suite")
        .arg("pursuit-scaling")
        .arg("--out")
        .arg(&out));
    assert!(output.status.success(), "{output:?}");
    let text = std::fs::read_to_string(&out).unwrap();
    let fit = text
        .lines()
        .find(|l| l.starts_with("fit,"))
        .expect("fit row present");
    let cells: Vec<&str> = fit.split(',').collect();
    let exponent: f64 = cells[3].parse().unwrap();
    assert!(exponent <= 1.3, "pursuit scaling exponent {exponent}: {text}");
}
