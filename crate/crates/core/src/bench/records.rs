//! Self-describing trial files: `# key = value` header lines followed by a
//! comma-separated trace table
//! (`iter,slot,x1..xd,y,regret,sigma_used,rsr_ratio,fstar_draw,resamples`).
//!
//! Floats use Rust's shortest round-trip form, so traces reload exactly.
//! Files carry no timestamps or paths and are byte-identical across reruns.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::acquisition::Strategy;
use crate::bench::config::ExperimentConfig;
use crate::bench::runner::TrialResult;
use crate::diagnostics::{cumulative_regret, simple_regret, RegretTrace, TraceEntry};
use crate::error::{Error, Result};

pub const FORMAT: &str = "tsrsr-trace/1";

pub fn trial_file_name(trial: usize, algo: Strategy) -> String {
    format!("trial_{trial:03}_{}.csv", algo.id())
}

fn num(v: f64) -> String {
    format!("{v:?}")
}

/// Renders a trial file.
pub fn render_trial(cfg: &ExperimentConfig, r: &TrialResult) -> String {
    let d = cfg.dim();
    let mut head: Vec<(String, String)> = vec![
        ("format".into(), FORMAT.into()),
        ("config_hash".into(), cfg.hash()),
        ("objective".into(), cfg.objective.clone()),
        ("algo".into(), r.algo.id().into()),
        ("trial".into(), r.trial.to_string()),
        ("seed_shared".into(), r.seed_shared.clone()),
        ("seed_algo".into(), r.seed_algo.clone()),
        ("dim".into(), d.to_string()),
        ("candidates".into(), r.candidate_count.to_string()),
        ("m".into(), cfg.m.to_string()),
        ("T".into(), cfg.iterations.to_string()),
        ("t_init".into(), cfg.t_init.to_string()),
        ("n_init".into(), r.n_init.to_string()),
        ("noise".into(), num(cfg.noise)),
        ("fstar".into(), num(r.trace.fstar)),
        ("evaluations".into(), r.evaluations.to_string()),
        ("cumulative_regret".into(), num(cumulative_regret(&r.trace))),
        ("simple_regret".into(), num(simple_regret(&r.trace))),
    ];
    if let Some(t) = &r.theory {
        head.extend([
            ("theory.rho_hat".into(), num(t.rho_hat)),
            ("theory.rho_floored".into(), t.rho_floored.to_string()),
            ("theory.rho_subsets".into(), t.rho_subsets.to_string()),
            ("theory.info_gain".into(), num(t.info_gain)),
            ("theory.max_ratio".into(), num(t.max_ratio)),
            ("theory.bound".into(), num(t.bound)),
            ("theory.violation_fraction".into(), num(t.violation_fraction)),
            ("theory.delta".into(), num(t.delta)),
        ]);
    }
    let mut out = String::new();
    for (k, v) in head {
        let _ = writeln!(out, "# {k} = {v}");
    }
    out.push_str("iter,slot");
    for i in 1..=d {
        let _ = write!(out, ",x{i}");
    }
    out.push_str(",y,regret,sigma_used,rsr_ratio,fstar_draw,resamples\n");
    for e in &r.trace.entries {
        let _ = write!(out, "{},{}", e.iter, e.slot);
        for v in &e.x {
            let _ = write!(out, ",{}", num(*v));
        }
        let _ = writeln!(
            out,
            ",{},{},{},{},{},{}",
            num(e.y),
            num(e.regret),
            num(e.sigma_used),
            num(e.rsr_ratio),
            num(e.fstar_draw),
            e.resamples
        );
    }
    out
}

/// Writes `contents` to `path` through a temporary file and a rename, so a
/// reader never sees a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

pub fn write_trial(dir: &Path, cfg: &ExperimentConfig, r: &TrialResult) -> Result<PathBuf> {
    let path = dir.join(trial_file_name(r.trial, r.algo));
    write_atomic(&path, &render_trial(cfg, r))?;
    Ok(path)
}

/// A trial file read back from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub path: PathBuf,
    pub header: BTreeMap<String, String>,
    pub algo: Strategy,
    pub trial: usize,
    pub trace: RegretTrace,
}

impl TrialRecord {
    pub fn get(&self, key: &str) -> Result<&str> {
        self.header
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| self.parse_err(format!("missing header key {key}")))
    }

    pub fn get_parsed<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        self.get(key)?
            .parse()
            .map_err(|_| self.parse_err(format!("malformed header value for {key}")))
    }

    pub fn config_hash(&self) -> Result<&str> {
        self.get("config_hash")
    }

    fn parse_err(&self, message: String) -> Error {
        Error::Parse {
            path: self.path.clone(),
            message,
        }
    }
}

pub fn read_trial(path: &Path) -> Result<TrialRecord> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_trial(&text, path)
}

pub fn parse_trial(text: &str, path: &Path) -> Result<TrialRecord> {
    let err = |message: String| Error::Parse {
        path: path.to_path_buf(),
        message,
    };
    let mut header = BTreeMap::new();
    let mut lines = text.lines().enumerate().peekable();
    while let Some((_, line)) = lines.peek() {
        let Some(rest) = line.strip_prefix('#') else { break };
        let (k, v) = rest
            .split_once('=')
            .ok_or_else(|| err(format!("malformed header line {line:?}")))?;
        header.insert(k.trim().to_string(), v.trim().to_string());
        lines.next();
    }
    if header.get("format").map(String::as_str) != Some(FORMAT) {
        return Err(err(format!("not a {FORMAT} file")));
    }
    let field = |k: &str| -> Result<&String> {
        header.get(k).ok_or_else(|| err(format!("missing header key {k}")))
    };
    let parse_usize = |k: &str| -> Result<usize> {
        field(k)?.parse().map_err(|_| err(format!("malformed {k}")))
    };
    let d = parse_usize("dim")?;
    let m = parse_usize("m")?;
    let warmup = parse_usize("t_init")?;
    let trial = parse_usize("trial")?;
    let algo: Strategy = field("algo")?.parse()?;
    let fstar: f64 = field("fstar")?
        .parse()
        .map_err(|_| err("malformed fstar".into()))?;
    let (_, columns) = lines.next().ok_or_else(|| err("missing column header".into()))?;
    let width = d + 8;
    if columns.split(',').count() != width {
        return Err(err("column header does not match dimension".into()));
    }
    let mut trace = RegretTrace::new(fstar, m, warmup);
    for (no, line) in lines {
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != width {
            return Err(err(format!("line {}: expected {width} fields", no + 1)));
        }
        let f = |i: usize| -> Result<f64> {
            cells[i]
                .parse()
                .map_err(|_| err(format!("line {}: bad number {:?}", no + 1, cells[i])))
        };
        let u = |i: usize| -> Result<usize> {
            cells[i]
                .parse()
                .map_err(|_| err(format!("line {}: bad integer {:?}", no + 1, cells[i])))
        };
        trace.entries.push(TraceEntry {
            iter: u(0)?,
            slot: u(1)?,
            x: (2..2 + d).map(f).collect::<Result<_>>()?,
            y: f(2 + d)?,
            regret: f(3 + d)?,
            sigma_used: f(4 + d)?,
            rsr_ratio: f(5 + d)?,
            fstar_draw: f(6 + d)?,
            resamples: u(7 + d)?,
        });
    }
    Ok(TrialRecord {
        path: path.to_path_buf(),
        header,
        algo,
        trial,
        trace,
    })
}

/// Every trial file in `dir`, sorted by file name.
pub fn load_results(dir: &Path) -> Result<Vec<TrialRecord>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with("trial_") && n.ends_with(".csv"))
        })
        .collect();
    paths.sort();
    paths.iter().map(|p| read_trial(p)).collect()
}
