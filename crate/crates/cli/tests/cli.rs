use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const DESK: &str = r#"
schema_version = 1

[gsa]
epsilon = 500.0

[[gsa.schedule.iterations]]
factors = ["safety_stock_coverage", "marketing_budget"]
levels = 2

[gsa.sampling]
initial_n = 10
trim_per_tail = 1
max_samples = 20

[gsa.stability]
steps = 100
"#;

/// Prisoner's dilemma without noise: (1, 1) is the unique strict NE.
const PD: &str = "\
,c,d
c,3;5;0|3;5;0,0;5;0|5;5;0
d,5;5;0|0;5;0,1;5;0|1;5;0
";

const PENNIES: &str = "\
,h,t
h,1;5;0|-1;5;0,-1;5;0|1;5;0
t,-1;5;0|1;5;0,1;5;0|-1;5;0
";

fn duopoly(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_duopoly"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn ok(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}\nstdout: {}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn simulate_is_byte_reproducible_with_one_row_per_day_and_company() {
    let tmp = TempDir::new().unwrap();
    for out in ["a", "b"] {
        ok(&duopoly(&["simulate", "--trace", "--seed", "7", "--out", out], tmp.path()));
    }
    for file in ["payoffs.json", "trace_0001.csv"] {
        let a = fs::read(tmp.path().join("a").join(file)).unwrap();
        let b = fs::read(tmp.path().join("b").join(file)).unwrap();
        assert_eq!(a, b, "{file} differs between runs");
    }
    let trace = fs::read_to_string(tmp.path().join("a/trace_0001.csv")).unwrap();
    let mut lines = trace.lines();
    assert_eq!(lines.next().unwrap(), "day,company,price,inv,backlog,shipR,MS,labor,wip");
    let rows: Vec<&str> = lines.collect();
    for company in ["1", "2"] {
        let n = rows.iter().filter(|r| r.split(',').nth(1) == Some(company)).count();
        assert_eq!(n, 100);
    }
    assert!(tmp.path().join("a/config.resolved.toml").exists());
}

#[test]
fn simulate_without_trace_writes_only_payoffs() {
    let tmp = TempDir::new().unwrap();
    ok(&duopoly(&["simulate", "-n", "3", "--out", "o"], tmp.path()));
    let v = json(&tmp.path().join("o/payoffs.json"));
    assert_eq!(v["replications"].as_array().unwrap().len(), 3);
    assert!(!tmp.path().join("o/trace_0001.csv").exists());
}

#[test]
fn validation_errors_exit_with_two_and_name_the_key() {
    let tmp = TempDir::new().unwrap();
    let cases = [
        ("empty.toml", "", "schema_version"),
        ("psens.toml", "schema_version = 1\n[baseline.sd]\npsens_i = 0.5\n", "baseline.sd.psens_i"),
        ("unknown.toml", "schema_version = 1\n[run]\ndayz = 3\n", "run"),
        (
            "factor.toml",
            "schema_version = 1\n[simulate.player1]\nwarp_drive = \"H\"\n",
            "simulate.player1",
        ),
    ];
    for (file, text, key) in cases {
        fs::write(tmp.path().join(file), text).unwrap();
        let out = duopoly(&["simulate", "--config", file, "--out", "o"], tmp.path());
        assert_eq!(out.status.code(), Some(2), "{file}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains(key), "{file}: {err}");
    }
}

#[test]
fn solve_finds_the_strict_equilibrium() {
    let tmp = TempDir::new().unwrap();
    fs::write(tmp.path().join("pd.csv"), PD).unwrap();
    let stdout = ok(&duopoly(&["solve", "--game", "pd.csv", "--out", "o"], tmp.path()));
    assert!(stdout.contains("1 pure equilibria"), "{stdout}");
    let v = json(&tmp.path().join("o/solve.json"));
    assert_eq!(v["solution"]["profile"], serde_json::json!([1, 1]));
    assert!(tmp.path().join("o/tolerance_curve.csv").exists());
}

#[test]
fn stability_ratios_on_toy_games() {
    let tmp = TempDir::new().unwrap();
    fs::write(tmp.path().join("pd.csv"), PD).unwrap();
    fs::write(tmp.path().join("mp.csv"), PENNIES).unwrap();
    let ratios = |dir: &str| {
        let v = json(&tmp.path().join(dir).join("stability.json"));
        let r = &v["result"]["ratios"];
        let get = |k: &str| r[k].as_f64().unwrap();
        (get("asymptotic"), get("marginal"), get("instable"))
    };

    ok(&duopoly(&["stability", "--game", "pd.csv", "--epsilon", "0", "--steps", "40", "--out", "pd"], tmp.path()));
    assert_eq!(ratios("pd"), (1.0, 0.0, 0.0));

    let args = ["stability", "--game", "mp.csv", "--asymmetric", "--solution", "0,0", "--steps", "40"];
    ok(&duopoly(&[&args[..], &["--epsilon", "0", "--out", "mp0"]].concat(), tmp.path()));
    assert_eq!(ratios("mp0").2, 1.0);
    ok(&duopoly(&[&args[..], &["--epsilon", "1e6", "--out", "mp1"]].concat(), tmp.path()));
    let (a, m, i) = ratios("mp1");
    assert_eq!(i, 0.0);
    assert!((a + m + i - 1.0).abs() < 1e-12);
}

#[test]
fn bad_solution_argument_is_a_validation_error() {
    let tmp = TempDir::new().unwrap();
    fs::write(tmp.path().join("pd.csv"), PD).unwrap();
    let out = duopoly(&["stability", "--game", "pd.csv", "--solution", "5,0", "--out", "o"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn incomplete_game_is_a_runtime_error() {
    let tmp = TempDir::new().unwrap();
    fs::write(tmp.path().join("hole.csv"), ",c,d\nc,3;5;0|3;5;0,\nd,,1;5;0|1;5;0\n").unwrap();
    let out = duopoly(&["stability", "--game", "hole.csv", "--solution", "1,1", "--out", "o"], tmp.path());
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn desk_gsa_reports_reproduce_and_resume() {
    let tmp = TempDir::new().unwrap();
    fs::write(tmp.path().join("desk.toml"), DESK).unwrap();
    let run = |out: &str| ok(&duopoly(&["gsa", "--config", "desk.toml", "--out", out], tmp.path()));
    run("a");
    run("b");

    let a = tmp.path().join("a");
    let report = json(&a.join("iteration_01.json"));
    assert_eq!(report["strategies"].as_array().unwrap().len(), 4);
    assert_eq!(report["profiles"], 10);
    assert!(!a.join("iteration_02.json").exists());
    for f in [
        "summary.json",
        "payoffs_01.csv",
        "plot_tolerance_curves.csv",
        "plot_neighbor_pvalues.csv",
        "plot_cross_iteration.csv",
        "plot_stability.csv",
        "plot_payoff_ci.csv",
        "timeseries_01.csv",
    ] {
        assert!(a.join(f).exists(), "{f} missing");
    }
    let same = |x: &Path, y: &Path, f: &str| assert_eq!(fs::read(x.join(f)).unwrap(), fs::read(y.join(f)).unwrap(), "{f}");
    let b = tmp.path().join("b");
    for f in ["iteration_01.json", "summary.json", "payoffs_01.csv", "timeseries_01.csv"] {
        same(&a, &b, f);
    }

    // Remove the outputs but keep the checkpoint: the rerun must resume and
    // reproduce them exactly.
    fs::remove_file(b.join("iteration_01.json")).unwrap();
    fs::remove_file(b.join("summary.json")).unwrap();
    run("b");
    for f in ["iteration_01.json", "summary.json"] {
        same(&a, &b, f);
    }

    // `report` regenerates the plot data from the JSON alone.
    fs::remove_file(a.join("plot_tolerance_curves.csv")).unwrap();
    let stdout = ok(&duopoly(&["report", "--dir", "a"], tmp.path()));
    assert!(stdout.contains("iter"));
    same(&a, &b, "plot_tolerance_curves.csv");
}

#[test]
fn gsa_flags_override_the_config() {
    let tmp = TempDir::new().unwrap();
    fs::write(tmp.path().join("desk.toml"), DESK).unwrap();
    ok(&duopoly(
        &["gsa", "--config", "desk.toml", "--out", "o", "--epsilon", "0", "--steps", "10", "--seed", "3", "--jobs", "2"],
        tmp.path(),
    ));
    let resolved = fs::read_to_string(tmp.path().join("o/config.resolved.toml")).unwrap();
    assert!(resolved.contains("master_seed = 3"));
    assert!(resolved.contains("epsilon = 0.0"));
    assert!(resolved.contains("steps = 10"));
    let report = json(&tmp.path().join("o/iteration_01.json"));
    assert_eq!(report["stability"]["epsilon"], 0.0);
}
