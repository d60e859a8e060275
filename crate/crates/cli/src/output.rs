use std::path::{Path, PathBuf};
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde_json::json;

use crate::config::ExperimentConfig;
use crate::experiments::Outcome;

/// Wall-clock facts about a run; they only ever reach `meta.json`.
#[derive(Debug, Clone, Copy)]
pub struct Timing {
    pub started: SystemTime,
    pub elapsed: Duration,
}

fn unix_seconds(t: SystemTime) -> f64 {
    t.duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}

/// Output directory: `--out`, else the config's `output`, else `out/<kind>`.
pub fn output_dir(cli_out: Option<&Path>, config: &ExperimentConfig) -> PathBuf {
    cli_out
        .map(Path::to_path_buf)
        .or_else(|| config.output.clone())
        .unwrap_or_else(|| PathBuf::from("out").join(config.experiment.kind()))
}

/// Writes every artifact plus `meta.json`, returning the written paths.
pub fn write_run(
    dir: &Path,
    config: &ExperimentConfig,
    outcome: &Outcome,
    jobs: usize,
    timing: Timing,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut written = Vec::new();
    for a in &outcome.artifacts {
        let path = dir.join(&a.name);
        std::fs::write(&path, &a.body).with_context(|| format!("writing {}", path.display()))?;
        written.push(path);
    }
    let meta = json!({
        "config": config,
        "kind": outcome.kind,
        "pass": outcome.pass,
        "summary": outcome.summary,
        "artifacts": outcome.artifacts.iter().map(|a| &a.name).collect::<Vec<_>>(),
        "versions": {
            "treentropy": env!("CARGO_PKG_VERSION"),
        },
        "jobs": jobs,
        "started_unix": unix_seconds(timing.started),
        "elapsed_seconds": timing.elapsed.as_secs_f64(),
    });
    let path = dir.join("meta.json");
    std::fs::write(&path, serde_json::to_string_pretty(&meta)? + "\n")
        .with_context(|| format!("writing {}", path.display()))?;
    written.push(path);
    Ok(written)
}
