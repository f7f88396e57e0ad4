//! Loading configuration directories, running experiments on a worker pool
//! and writing artifacts.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use rayon::prelude::*;

use crate::config::{ConfigError, ExperimentConfig};
use crate::experiments::{run_experiment, Outcome};
use crate::record::{write_checks, write_rows};
use crate::report::{key_values, summary, Verdict};

pub const CONFIG_EXTENSION: &str = "cfg";
pub const SUMMARY_FILE: &str = "summary.txt";
pub const VERDICT_FILE: &str = "verdicts.kv";

/// Every `*.cfg` file in `dir`, sorted by file name. Ids must be unique.
pub fn load_dir(dir: &Path) -> Result<Vec<ExperimentConfig>, ConfigError> {
    let io = |e: std::io::Error| ConfigError::Io { path: dir.display().to_string(), message: e.to_string() };
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io)?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<_, _>>()
        .map_err(io)?;
    paths.retain(|p| p.extension().is_some_and(|e| e == CONFIG_EXTENSION));
    paths.sort();
    let mut configs: Vec<ExperimentConfig> = Vec::with_capacity(paths.len());
    for p in &paths {
        let c = ExperimentConfig::load(p).map_err(|e| match e {
            ConfigError::Io { .. } => e,
            other => ConfigError::Io { path: p.display().to_string(), message: other.to_string() },
        })?;
        if configs.iter().any(|o| o.id == c.id || o.output_stem() == c.output_stem()) {
            return Err(ConfigError::Invalid { key: "id", reason: format!("`{}` is used twice in {}", c.id, dir.display()) });
        }
        configs.push(c);
    }
    Ok(configs)
}

/// Override the seed of every config.
pub fn apply_seed(configs: &mut [ExperimentConfig], seed: Option<u64>) {
    if let Some(s) = seed {
        for c in configs {
            c.seed = s;
        }
    }
}

/// Run up to `workers` experiments at once; outcomes sorted by id.
pub fn run_all(configs: &[ExperimentConfig], workers: usize) -> Result<Vec<Outcome>> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build()?;
    let mut outcomes: Vec<Outcome> = pool.install(|| configs.par_iter().map(run_experiment).collect());
    outcomes.sort_by(|a, b| a.verdict.id.cmp(&b.verdict.id));
    Ok(outcomes)
}

/// `<stem>.csv` per experiment, `<stem>_checks.csv` for the property suite,
/// then the summary and key-value verdict files.
pub fn write_outputs(out_dir: &Path, configs: &[ExperimentConfig], outcomes: &[Outcome]) -> Result<Vec<Verdict>> {
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    for o in outcomes {
        let cfg = configs.iter().find(|c| c.id == o.verdict.id).context("outcome without config")?;
        let stem = cfg.output_stem();
        let path = out_dir.join(format!("{stem}.csv"));
        let file = fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        write_rows(file, &o.rows).with_context(|| format!("writing {}", path.display()))?;
        if let Some(checks) = &o.checks {
            let path = out_dir.join(format!("{stem}_checks.csv"));
            let file = fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
            write_checks(file, checks).with_context(|| format!("writing {}", path.display()))?;
        }
    }
    let verdicts: Vec<Verdict> = outcomes.iter().map(|o| o.verdict.clone()).collect();
    fs::write(out_dir.join(SUMMARY_FILE), summary(&verdicts)).context("writing summary")?;
    fs::write(out_dir.join(VERDICT_FILE), key_values(&verdicts)).context("writing verdicts")?;
    Ok(verdicts)
}
