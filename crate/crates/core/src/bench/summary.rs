use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::acquisition::Strategy;
use crate::bench::records::{write_atomic, TrialRecord};
use crate::diagnostics::{best_so_far, rsr_bound, rsr_bound_check};
use crate::error::{Error, Result};

/// Mean and standard error (zero for a single value).
pub fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub algo: Strategy,
    pub trials: usize,
    pub mean: f64,
    pub std_error: f64,
    pub rank: usize,
    /// `mean / best mean`.
    pub ratio: f64,
}

/// Best-so-far simple regret per algorithm at one iteration, ranked.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryTable {
    pub at_iteration: usize,
    pub rows: Vec<SummaryRow>,
}

impl SummaryTable {
    pub fn row(&self, algo: Strategy) -> Option<&SummaryRow> {
        self.rows.iter().find(|r| r.algo == algo)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("algo,trials,mean,std_error,rank,ratio\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{:e},{:e},{},{}",
                r.algo, r.trials, r.mean, r.std_error, r.rank, r.ratio
            );
        }
        out
    }
}

fn check_single_config(records: &[TrialRecord]) -> Result<()> {
    let first = records
        .first()
        .ok_or_else(|| Error::invalid("no trial records"))?
        .config_hash()?;
    for r in records {
        if r.config_hash()? != first {
            return Err(Error::invalid(format!(
                "{} was produced by a different configuration",
                r.path.display()
            )));
        }
    }
    Ok(())
}

fn curves_by_algo(records: &[TrialRecord]) -> Result<BTreeMap<Strategy, Vec<Vec<f64>>>> {
    check_single_config(records)?;
    let mut by: BTreeMap<Strategy, Vec<Vec<f64>>> = BTreeMap::new();
    for r in records {
        r.trace.validate().map_err(|e| match e {
            Error::InvalidArgument(m) => Error::Parse {
                path: r.path.clone(),
                message: m,
            },
            other => other,
        })?;
        by.entry(r.algo).or_default().push(best_so_far(&r.trace));
    }
    Ok(by)
}

/// Ranks algorithms by mean best-so-far simple regret after `at_iteration`
/// iterations (default: the last). Ties in the mean are broken by id.
pub fn summarize(records: &[TrialRecord], at_iteration: Option<usize>) -> Result<SummaryTable> {
    let curves = curves_by_algo(records)?;
    let len = curves.values().flatten().map(Vec::len).min().unwrap_or(0);
    let at = at_iteration.unwrap_or(len);
    if at == 0 || at > len {
        return Err(Error::invalid(format!("iteration {at} outside 1..={len}")));
    }
    let mut rows: Vec<SummaryRow> = curves
        .iter()
        .map(|(algo, cs)| {
            let vals: Vec<f64> = cs.iter().map(|c| c[at - 1]).collect();
            let (mean, std_error) = mean_and_se(&vals);
            SummaryRow {
                algo: *algo,
                trials: vals.len(),
                mean,
                std_error,
                rank: 0,
                ratio: 0.0,
            }
        })
        .collect();
    rows.sort_by(|a, b| a.mean.total_cmp(&b.mean).then(a.algo.id().cmp(b.algo.id())));
    let best = rows[0].mean;
    for (i, r) in rows.iter_mut().enumerate() {
        r.rank = i + 1;
        r.ratio = if r.mean == best {
            1.0
        } else if best == 0.0 {
            f64::INFINITY
        } else {
            r.mean / best
        };
    }
    Ok(SummaryTable {
        at_iteration: at,
        rows,
    })
}

/// One curve table: `(iteration, mean, std_error)` of best-so-far regret.
pub fn curve(records: &[TrialRecord], algo: Strategy) -> Result<Vec<(usize, f64, f64)>> {
    let curves = curves_by_algo(records)?;
    let cs = curves
        .get(&algo)
        .ok_or_else(|| Error::invalid(format!("no records for {algo}")))?;
    let len = cs.iter().map(Vec::len).min().unwrap_or(0);
    Ok((0..len)
        .map(|t| {
            let vals: Vec<f64> = cs.iter().map(|c| c[t]).collect();
            let (m, se) = mean_and_se(&vals);
            (t + 1, m, se)
        })
        .collect())
}

/// Writes `curve_<algo>.csv` per algorithm into `dir`.
pub fn emit_plotdata(records: &[TrialRecord], dir: &Path) -> Result<Vec<PathBuf>> {
    let curves = curves_by_algo(records)?;
    let mut paths = Vec::new();
    for algo in curves.keys() {
        let mut out = String::from("iteration,mean,std_error\n");
        for (t, m, se) in curve(records, *algo)? {
            let _ = writeln!(out, "{t},{m:?},{se:?}");
        }
        let path = dir.join(format!("curve_{}.csv", algo.id()));
        write_atomic(&path, &out)?;
        paths.push(path);
    }
    Ok(paths)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TheoryRow {
    pub trial: usize,
    pub rho_hat: f64,
    pub bound: f64,
    pub slots: usize,
    pub violation_fraction: f64,
}

/// Regret-to-sigma bound audit over every TS-RSR record.
#[derive(Debug, Clone, PartialEq)]
pub struct TheoryAudit {
    pub delta: f64,
    pub rows: Vec<TheoryRow>,
    /// Violations over all audited slots pooled across trials.
    pub pooled_fraction: f64,
}

impl TheoryAudit {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("trial,rho_hat,bound,slots,violation_fraction\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{:?},{:?},{},{:?}",
                r.trial, r.rho_hat, r.bound, r.slots, r.violation_fraction
            );
        }
        let _ = writeln!(out, "pooled,,,,{:?}", self.pooled_fraction);
        out
    }
}

pub fn verify_theory(records: &[TrialRecord], delta: f64) -> Result<TheoryAudit> {
    check_single_config(records)?;
    let mut rows = Vec::new();
    let (mut over, mut total) = (0.0, 0usize);
    for r in records.iter().filter(|r| r.algo == Strategy::TsRsr) {
        let rho: f64 = r.get_parsed("theory.rho_hat")?;
        let d: usize = r.get_parsed("candidates")?;
        let t: usize = r.get_parsed("T")?;
        let m = r.trace.m;
        let frac = rsr_bound_check(&r.trace, d, m, t, delta, rho)?;
        let slots = r.trace.entries.iter().filter(|e| e.iter >= r.trace.warmup).count();
        over += frac * slots as f64;
        total += slots;
        rows.push(TheoryRow {
            trial: r.trial,
            rho_hat: rho,
            bound: rsr_bound(d, m, t, delta, rho),
            slots,
            violation_fraction: frac,
        });
    }
    if rows.is_empty() {
        return Err(Error::invalid("no tsrsr records to audit"));
    }
    Ok(TheoryAudit {
        delta,
        rows,
        pooled_fraction: if total == 0 { 0.0 } else { over / total as f64 },
    })
}
