use std::path::Path;
use std::process::{Command, Output};

use treentropy_cli::acceptance::{cj_band_configs, determinism_configs, entropy_law_config, partition_fuzz_config};
use treentropy_cli::config::*;
use treentropy_cli::table::Table;
use treentropy_cli::{execute, ExperimentConfig};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_treentropy"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, config: &ExperimentConfig) -> String {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string_pretty(config).unwrap()).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn entropy_oracle_run_writes_csv_and_meta() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "law.json", &entropy_law_config());
    let out = dir.path().join("out");
    let o = run(&["run", &cfg, "--out", out.to_str().unwrap(), "--jobs", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));

    let table = Table::parse(&std::fs::read_to_string(out.join("entropy-oracle.csv")).unwrap()).unwrap();
    let lower = table.column("lower").unwrap();
    let upper = table.column("upper").unwrap();
    for k in 1..=6 {
        let exact = (1.0 - k as f64).exp2();
        assert!(lower[k - 1] <= exact && exact <= upper[k - 1]);
    }
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("meta.json")).unwrap()).unwrap();
    assert_eq!(meta["pass"], true);
    assert_eq!(meta["config"]["experiment"]["kind"], "entropy-oracle");
    assert!(meta["elapsed_seconds"].is_number());
}

#[test]
fn schema_violations_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"experiment": {"kind": "kuhn", "sequence": {"kind": "geometric", "scale": 1, "ratio": 0.5}, "p": "inf", "q": 1, "n_max": 3}}"#).unwrap();
    let o = run(&["run", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("seed"), "{err}");

    let range = dir.path().join("range.json");
    std::fs::write(
        &range,
        r#"{"seed": 1, "experiment": {"kind": "cj-band", "weights": {"kappa_u": 0, "alpha_u": 0, "kappa_w": 1.5, "alpha_w": 0, "m_star": 1},
            "profile": {"theta": 1, "gamma": 0, "m_star": 1, "c_star": 1, "t_floor": 1}, "p": 1, "q": 1, "j_min": 1, "j_max": 4}}"#,
    )
    .unwrap();
    let o = run(&["run", range.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("j_min"));

    assert_eq!(run(&["run"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn band_failures_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = cj_band_configs().remove(0);
    if let Experiment::CjBand(b) = &mut c.experiment {
        b.max_spread = 1.0;
    }
    let cfg = write_config(dir.path(), "band.json", &c);
    let o = run(&["run", &cfg, "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let table = Table::parse(&std::fs::read_to_string(dir.path().join("o/cj-band.csv")).unwrap()).unwrap();
    assert_eq!(table.rows.len(), 7);
}

#[test]
fn partition_fuzz_reports_no_violations() {
    let o = execute(&partition_fuzz_config(40, 3000), 2).unwrap();
    assert!(o.pass, "{}", o.summary);
    let report: serde_json::Value = serde_json::from_str(&o.artifacts[1].body).unwrap();
    assert_eq!(report["failing_trees"], 0);
}

#[test]
fn seed_flag_overrides_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "fuzz.json", &partition_fuzz_config(5, 300));
    let read = |sub: &str, seed: &str| {
        let out = dir.path().join(sub);
        let o = run(&["run", &cfg, "--seed", seed, "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        std::fs::read_to_string(out.join("partition-fuzz.csv")).unwrap()
    };
    let a = read("a", "1");
    assert_eq!(a, read("b", "1"));
    assert_ne!(a, read("c", "2"));
}

#[test]
fn csv_bodies_do_not_depend_on_worker_count() {
    for c in determinism_configs() {
        let a = execute(&c, 1).unwrap();
        let b = execute(&c, 3).unwrap();
        assert_eq!(a, b, "{}", c.experiment.kind());
        for art in a.artifacts.iter().filter(|a| a.is_csv()) {
            assert_eq!(Table::parse(&art.body).unwrap().to_csv(), art.body);
        }
    }
}

#[test]
fn configs_round_trip_through_json() {
    for c in determinism_configs() {
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(ExperimentConfig::parse(&text).unwrap(), c);
    }
}

#[test]
fn subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("gen");
    let o = run(&["tree", "gen", "--theta", "1", "--t-floor", "1", "--depth", "5", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let tree = out.join("tree.txt");

    let o = run(&["tree", "verify", tree.to_str().unwrap(), "--theta", "1", "--t-floor", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["vertices"], 63);

    let o = run(&["tree", "partition", tree.to_str().unwrap(), "--n", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["check"]["pass"], true);

    let params = dir.path().join("env.json");
    std::fs::write(
        &params,
        r#"{"side": "tree", "theta": 1, "kappa_u": 0, "kappa_w": 1, "alpha_u": 0.7, "p": 2, "q": 2}"#,
    )
    .unwrap();
    let o = run(&["envelope", "eval", params.to_str().unwrap(), "--n", "4096"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let value = v[0]["value"]["value"].as_f64().unwrap();
    assert!((value - 12f64.powf(-0.7) / 4096.0).abs() < 1e-15);

    let o = run(&[
        "entropy", "oracle", "--rows", "1,0;0,1", "--p", "inf", "--q", "inf", "--k-max", "3", "--mesh", "0.02", "--out",
        dir.path().join("oracle").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let t = Table::parse(&std::fs::read_to_string(dir.path().join("oracle/entropy-oracle.csv")).unwrap()).unwrap();
    let (lo, hi) = (t.column("lower").unwrap()[2], t.column("upper").unwrap()[2]);
    assert!(lo <= 0.5 && 0.5 <= hi);
}

#[test]
fn sumop_norm_on_a_dump() {
    use treentropy_core::sumop::SummationOperator;
    use treentropy_core::tree::RootedTree;
    use treentropy_core::Exponent;
    let dir = tempfile::tempdir().unwrap();
    let s = SummationOperator::new(RootedTree::chain(3).unwrap(), vec![1.0; 3], vec![1.0; 3], Exponent::ONE, Exponent::ONE)
        .unwrap();
    let dump = dir.path().join("chain.txt");
    std::fs::write(&dump, s.dump().unwrap()).unwrap();
    let o = run(&["sumop", "norm", dump.to_str().unwrap(), "--p", "1", "--q", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["exact"], 3.0);
}
