use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use rayon::prelude::*;

use crate::acquisition::Strategy;
use crate::bench::config::ExperimentConfig;
use crate::bench::records::{trial_file_name, write_atomic, write_trial};
use crate::bench::runner::{prepare_trial, run_prepared, TrialResult};
use crate::error::{Error, Result};
use crate::seeds;

pub const MANIFEST_NAME: &str = "manifest.txt";
pub const MANIFEST_FORMAT: &str = "tsrsr-manifest/1";

/// What a call to [`run_experiment`] left on disk.
#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub dir: PathBuf,
    pub manifest: PathBuf,
    /// Result files written, sorted.
    pub files: Vec<PathBuf>,
    pub complete: bool,
}

struct Completed {
    trial: usize,
    algo: Strategy,
    file: PathBuf,
    duration_ms: u128,
}

fn render_manifest(cfg: &ExperimentConfig, done: &[Completed]) -> String {
    let total = cfg.trials * cfg.algos.len();
    let mut out = String::new();
    let mut kv = |k: &str, v: &str| {
        let _ = writeln!(out, "{k} = {v}");
    };
    kv("format", MANIFEST_FORMAT);
    kv("status", if done.len() == total { "complete" } else { "incomplete" });
    kv("library_version", env!("CARGO_PKG_VERSION"));
    kv("config_hash", &cfg.hash());
    kv("master_seed", &cfg.seed.to_string());
    kv("pairs_total", &total.to_string());
    kv("pairs_completed", &done.len().to_string());
    for (k, v) in cfg.canonical_pairs() {
        kv(&format!("config.{k}"), &v);
    }
    let mut sorted: Vec<&Completed> = done.iter().collect();
    sorted.sort_by_key(|c| (c.trial, c.algo));
    let mut last_trial = None;
    for c in sorted {
        let t = format!("trial.{:03}", c.trial);
        if last_trial != Some(c.trial) {
            kv(
                &format!("{t}.seed_shared"),
                &seeds::seed_hex(cfg.seed, c.trial as u64, "shared"),
            );
            last_trial = Some(c.trial);
        }
        let a = c.algo.id();
        kv(
            &format!("{t}.{a}.seed"),
            &seeds::seed_hex(cfg.seed, c.trial as u64, &format!("algo:{a}")),
        );
        kv(
            &format!("{t}.{a}.file"),
            &c.file.file_name().unwrap_or_default().to_string_lossy(),
        );
        kv(&format!("{t}.{a}.duration_ms"), &c.duration_ms.to_string());
    }
    out
}

/// Parses a flat `key = value` manifest.
pub fn read_manifest(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut map = BTreeMap::new();
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let (k, v) = line.split_once(" = ").ok_or_else(|| Error::Parse {
            path: path.to_path_buf(),
            message: format!("malformed manifest line {line:?}"),
        })?;
        map.insert(k.to_string(), v.to_string());
    }
    if map.get("format").map(String::as_str) != Some(MANIFEST_FORMAT) {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            message: "not a manifest".into(),
        });
    }
    Ok(map)
}

/// Whether `path` looks like a manifest rather than a config file.
pub fn is_manifest(path: &Path) -> bool {
    fs::read_to_string(path)
        .map(|t| t.lines().next() == Some(&format!("format = {MANIFEST_FORMAT}")))
        .unwrap_or(false)
}

/// Rebuilds the configuration recorded in a manifest.
pub fn config_from_manifest(path: &Path) -> Result<ExperimentConfig> {
    let map = read_manifest(path)?;
    let text: String = map
        .iter()
        .filter_map(|(k, v)| k.strip_prefix("config.").map(|k| format!("{k} = {v}\n")))
        .collect();
    let cfg = ExperimentConfig::from_toml_str(&text, path)?;
    if map.get("config_hash") != Some(&cfg.hash()) {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            message: "manifest config does not match its recorded hash".into(),
        });
    }
    Ok(cfg)
}

/// Runs every (trial, algorithm) pair and writes one file per pair plus a
/// manifest into `cfg.out_dir`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    run_experiment_with(cfg, &|_| false)
}

/// As [`run_experiment`], but before each pair starts `should_stop` is
/// called with the number of completed pairs; returning true skips the
/// remaining pairs and leaves the manifest marked incomplete.
pub fn run_experiment_with(
    cfg: &ExperimentConfig,
    should_stop: &(dyn Fn(usize) -> bool + Sync),
) -> Result<ExperimentOutcome> {
    cfg.validate()?;
    let dir = cfg.out_dir.clone();
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let manifest = dir.join(MANIFEST_NAME);
    // Results of a different configuration must not be mixed in.
    for t in 0..cfg.trials {
        for a in &cfg.algos {
            let stale = dir.join(trial_file_name(t, *a));
            if stale.exists() {
                fs::remove_file(&stale).map_err(|e| Error::io(&stale, e))?;
            }
        }
    }
    write_atomic(&manifest, &render_manifest(cfg, &[]))?;

    let done = Mutex::new(Vec::<Completed>::new());
    let count = AtomicUsize::new(0);
    let record = |r: TrialResult| -> Result<()> {
        let file = write_trial(&dir, cfg, &r)?;
        let mut guard = done.lock().expect("manifest lock");
        guard.push(Completed {
            trial: r.trial,
            algo: r.algo,
            file,
            duration_ms: r.duration.as_millis(),
        });
        count.fetch_add(1, Ordering::SeqCst);
        write_atomic(&manifest, &render_manifest(cfg, &guard))
    };
    let run_one_trial = |trial: usize| -> Result<()> {
        if should_stop(count.load(Ordering::SeqCst)) {
            return Ok(());
        }
        let setup = prepare_trial(cfg, trial)?;
        let run_algo = |algo: &Strategy| -> Result<()> {
            if should_stop(count.load(Ordering::SeqCst)) {
                return Ok(());
            }
            record(run_prepared(cfg, *algo, &setup)?)
        };
        if cfg.parallel {
            cfg.algos.par_iter().try_for_each(run_algo)
        } else {
            cfg.algos.iter().try_for_each(run_algo)
        }
    };
    if cfg.parallel {
        (0..cfg.trials).into_par_iter().try_for_each(run_one_trial)?;
    } else {
        (0..cfg.trials).try_for_each(run_one_trial)?;
    }

    let done = done.into_inner().expect("manifest lock");
    let mut files: Vec<PathBuf> = done.iter().map(|c| c.file.clone()).collect();
    files.sort();
    Ok(ExperimentOutcome {
        complete: done.len() == cfg.trials * cfg.algos.len(),
        dir,
        manifest,
        files,
    })
}
