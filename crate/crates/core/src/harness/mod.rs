//! Experiment orchestration: configuration, seeded batch runs, artifact
//! export and invariant diagnostics.

mod config;
mod export;
mod runs;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::par;

pub use config::{
    load_class, parse_class, parse_seeds, parse_dist, parse_oracle, ClassSpec, Command, DistSpec, ExperimentConfig, OracleSpec,
};
pub use export::{round12, Cell, Format, Rows};
pub use runs::{run_agnostic, run_dim, run_evolve, run_learn, EVOLVE_HEADER, LEARN_HEADER, REPORT_HEADER};

/// A guarantee that a run observed to fail.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Breach {
    pub run: usize,
    pub guarantee: String,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunInfo {
    pub index: usize,
    pub seed: u64,
    pub label: String,
}

/// Everything a command produces before it touches the filesystem.
#[derive(Clone, Debug)]
pub struct RunOutput {
    /// Per-run artifacts as (file stem, rows).
    pub files: Vec<(String, Rows)>,
    pub summary: Rows,
    pub metrics: BTreeMap<String, f64>,
    pub runs: Vec<RunInfo>,
    pub breaches: Vec<Breach>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub code_version: String,
    pub config: ExperimentConfig,
    pub workers: usize,
    pub runs: Vec<RunInfo>,
    pub metrics: BTreeMap<String, f64>,
    pub breaches: Vec<Breach>,
    pub files: Vec<String>,
    pub wall_clock_ms: u128,
}

pub fn run(cfg: &ExperimentConfig) -> Result<RunOutput> {
    cfg.validate()?;
    match cfg.command {
        Command::Learn => run_learn(cfg),
        Command::Evolve => run_evolve(cfg),
        Command::Dim => run_dim(cfg),
        Command::Agnostic => run_agnostic(cfg),
    }
}

/// Runs `cfg` on `workers` threads (0 = default pool).
pub fn run_with_workers(cfg: &ExperimentConfig, workers: usize) -> Result<RunOutput> {
    par::with_workers(workers, || run(cfg))
}

/// Writes per-run files, `summary`, `config.toml` and `manifest.json` into `dir`.
pub fn write_outputs(out: &RunOutput, cfg: &ExperimentConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let ext = cfg.format.extension();
    let mut written = Vec::new();
    for (stem, rows) in &out.files {
        let p = dir.join(format!("{stem}.{ext}"));
        rows.write(&p, cfg.format)?;
        written.push(p);
    }
    let p = dir.join(format!("summary.{ext}"));
    out.summary.write(&p, cfg.format)?;
    written.push(p);
    let p = dir.join("config.toml");
    std::fs::write(&p, cfg.to_toml())?;
    written.push(p);
    Ok(written)
}

/// Runs, writes all artifacts and the manifest, then reports breaches as an
/// [`Error::InvariantBreach`] (the artifacts are kept for inspection).
pub fn execute(cfg: &ExperimentConfig, workers: usize) -> Result<RunManifest> {
    let start = Instant::now();
    let out = run_with_workers(cfg, workers)?;
    let files = write_outputs(&out, cfg, &cfg.out)?;
    let manifest = RunManifest {
        command: cfg.command.as_str().into(),
        code_version: env!("CARGO_PKG_VERSION").into(),
        config: cfg.clone(),
        workers: if workers == 0 { par::current_workers() } else { workers },
        runs: out.runs.clone(),
        metrics: out.metrics.clone(),
        breaches: out.breaches.clone(),
        files: files
            .iter()
            .filter_map(|p| p.file_name().map(|f| f.to_string_lossy().into_owned()))
            .collect(),
        wall_clock_ms: start.elapsed().as_millis(),
    };
    std::fs::write(cfg.out.join("manifest.json"), serde_json::to_string_pretty(&manifest)?)?;
    if let Some(b) = out.breaches.first() {
        return Err(Error::InvariantBreach {
            guarantee: b.guarantee.clone(),
            detail: format!("run {}: {} ({} breach(es) in total)", b.run, b.detail, out.breaches.len()),
        });
    }
    Ok(manifest)
}
