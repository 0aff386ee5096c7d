use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn eqsearch(args: &[&str], extra: &[&Path]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_eqsearch"));
    cmd.args(args);
    for p in extra {
        cmd.arg(p);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn line_value<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines()
        .find_map(|l| l.strip_prefix(key))
        .unwrap_or_else(|| panic!("no `{key}` in output:\n{text}"))
        .trim()
}

#[test]
fn generate_then_discover_then_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let out = eqsearch(
        &["generate", "--case", "burgers", "--nt", "41", "--nx", "41", "--out"],
        &[dir.path()],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let data = dir.path().join("burgers.csv");
    assert!(data.exists() && dir.path().join("burgers.json").exists());

    let trace = dir.path().join("trace.csv");
    let out = eqsearch(&["discover", "--mode", "multi", "--seed", "3", "--data"], &[&data]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("pareto front:"));
    assert!(line_value(&text, "q_op:").parse::<f64>().unwrap().is_finite());

    let out = Command::new(env!("CARGO_BIN_EXE_eqsearch"))
        .arg("discover")
        .arg("--data")
        .arg(&data)
        .arg("--trace")
        .arg(&trace)
        .output()
        .unwrap();
    assert!(out.status.success());
    let rows = fs::read_to_string(&trace).unwrap();
    // header plus iterations 0..=64
    assert_eq!(rows.lines().count(), 66);

    let out = eqsearch(
        &["oracle", "--pool", "u,du/dt,du/dx,d2u/dx2;factors=2;terms=3", "--data"],
        &[&data],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    // the file route differentiates numerically, so the coefficient carries O(h^2) error
    let best = line_value(&text, "best:");
    let coef: f64 = best
        .strip_prefix("du/dt + ")
        .and_then(|r| r.strip_suffix("*u*du/dx = 0"))
        .unwrap_or_else(|| panic!("unexpected structure `{best}`"))
        .parse()
        .unwrap();
    assert!((coef - 1.0).abs() < 5e-3, "{best}");
    assert_eq!(line_value(&text, "candidate terms:"), "14");
}

#[test]
fn config_file_with_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.cfg");
    fs::write(
        &cfg,
        "# small wave study\ncase = wave\nmode = single\nruns = 5\nbase_seed = 7\n",
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = eqsearch(
        &["experiment", "--runs", "3", "--set", "iterations=4", "--config"],
        &[&cfg, Path::new("--out"), &out_dir],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stats: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("stats.json")).unwrap()).unwrap();
    assert_eq!(stats["config"]["runs"], "3");
    assert_eq!(stats["config"]["base_seed"], "7");
    assert_eq!(stats["config"]["iterations_single"], "4");
    assert!(stats["modes"]["multi"].is_null());
    let mut rdr = csv::Reader::from_path(out_dir.join("runs.csv")).unwrap();
    let seeds: Vec<String> = rdr.records().map(|r| r.unwrap()[2].to_string()).collect();
    assert_eq!(seeds, ["7", "8", "9"]);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad_case = eqsearch(&["experiment", "--set", "case=heat", "--runs", "1"], &[]);
    assert_eq!(bad_case.status.code(), Some(2));
    let bad_key = eqsearch(&["experiment", "--set", "colour=blue"], &[]);
    assert_eq!(bad_key.status.code(), Some(2));

    let out = eqsearch(
        &["generate", "--case", "wave", "--nt", "21", "--nx", "21", "--out"],
        &[dir.path()],
    );
    assert!(out.status.success());
    let data = dir.path().join("wave.csv");
    let bad_pool = eqsearch(&["oracle", "--pool", "u,du/dz", "--data"], &[&data]);
    assert_eq!(bad_pool.status.code(), Some(2));

    let missing = eqsearch(&["discover", "--data"], &[&dir.path().join("absent.csv")]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("absent.csv"));
}

fn run_experiment(out: &Path) -> Output {
    eqsearch(
        &[
            "experiment",
            "--case",
            "wave",
            "--mode",
            "both",
            "--runs",
            "10",
            "--out",
        ],
        &[out],
    )
}

#[test]
fn experiment_reports_are_consistent_and_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(run_experiment(&a).status.success());
    assert!(run_experiment(&b).status.success());
    let stats_a = fs::read(a.join("stats.json")).unwrap();
    assert_eq!(stats_a, fs::read(b.join("stats.json")).unwrap());
    assert_eq!(
        fs::read(a.join("runs.csv")).unwrap(),
        fs::read(b.join("runs.csv")).unwrap()
    );

    let stats: serde_json::Value = serde_json::from_slice(&stats_a).unwrap();
    let mut rdr = csv::Reader::from_path(a.join("runs.csv")).unwrap();
    let header = rdr.headers().unwrap().clone();
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    let (mode_i, q_i) = (col("mode"), col("q_op"));
    let records: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    for mode in ["single", "multi"] {
        let q: Vec<f64> = records
            .iter()
            .filter(|r| &r[mode_i] == mode)
            .map(|r| r[q_i].parse().unwrap())
            .collect();
        assert_eq!(q.len(), 10);
        let n = q.len() as f64;
        let mean = q.iter().sum::<f64>() / n;
        let var = q.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let s = &stats["modes"][mode];
        assert!((s["mean"].as_f64().unwrap() - mean).abs() <= 1e-12);
        assert!((s["variance"].as_f64().unwrap() - var).abs() <= 1e-12);
    }

    let mut box_rdr = csv::Reader::from_path(a.join("boxplot.csv")).unwrap();
    let head: Vec<String> = box_rdr.headers().unwrap().iter().map(str::to_string).collect();
    assert_eq!(head, ["single", "multi"]);
    assert_eq!(box_rdr.records().count(), 10);
}
