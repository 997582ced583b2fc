use crate::error::{Error, Result};

/// Tolerance below zero accepted for instantaneous regret.
pub const REGRET_TOLERANCE: f64 = 1e-9;

/// One evaluated batch slot.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceEntry {
    /// 0-based iteration, counting warm-up iterations first.
    pub iter: usize,
    pub slot: usize,
    pub x: Vec<f64>,
    /// Noisy observation.
    pub y: f64,
    /// `f* − f(x)`.
    pub regret: f64,
    /// σ_t(x | earlier picks of the batch) at selection time.
    pub sigma_used: f64,
    /// Regret-to-sigma ratio at the pick; NaN for other strategies.
    pub rsr_ratio: f64,
    /// Max of the joint draw behind the pick; NaN where unused.
    pub fstar_draw: f64,
    pub resamples: usize,
}

/// Per-slot record of a run, excluding the initial design.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretTrace {
    pub fstar: f64,
    pub m: usize,
    /// Leading max-variance warm-up iterations.
    pub warmup: usize,
    pub entries: Vec<TraceEntry>,
}

impl RegretTrace {
    pub fn new(fstar: f64, m: usize, warmup: usize) -> Self {
        RegretTrace {
            fstar,
            m,
            warmup,
            entries: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of iterations, each contributing `m` entries.
    pub fn iterations(&self) -> usize {
        self.entries.len().checked_div(self.m).unwrap_or(0)
    }

    /// Checks the layout (`iterations × m` entries in order) and that no
    /// regret is below `-REGRET_TOLERANCE`.
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::invalid("trace batch size must be positive"));
        }
        if !self.entries.len().is_multiple_of(self.m) {
            return Err(Error::invalid(format!(
                "trace has {} entries, not a multiple of m = {}",
                self.entries.len(),
                self.m
            )));
        }
        for (k, e) in self.entries.iter().enumerate() {
            if e.iter != k / self.m || e.slot != k % self.m {
                return Err(Error::invalid(format!("trace entry {k} is out of order")));
            }
            if !(e.regret >= -REGRET_TOLERANCE) {
                return Err(Error::invalid(format!(
                    "trace entry {k} has regret {} below zero",
                    e.regret
                )));
            }
        }
        Ok(())
    }

    /// Entries of iteration `t`.
    pub fn iteration(&self, t: usize) -> &[TraceEntry] {
        &self.entries[t * self.m..(t + 1) * self.m]
    }
}

/// `R = Σ_t Σ_i [f* − f(x_{t,i})]`.
pub fn cumulative_regret(trace: &RegretTrace) -> f64 {
    trace.entries.iter().map(|e| e.regret).sum()
}

/// Smallest instantaneous regret; infinite for an empty trace.
pub fn simple_regret(trace: &RegretTrace) -> f64 {
    trace
        .entries
        .iter()
        .map(|e| e.regret)
        .fold(f64::INFINITY, f64::min)
}

/// Best-so-far simple regret after each iteration.
pub fn best_so_far(trace: &RegretTrace) -> Vec<f64> {
    let mut best = f64::INFINITY;
    (0..trace.iterations())
        .map(|t| {
            for e in trace.iteration(t) {
                best = best.min(e.regret);
            }
            best
        })
        .collect()
}

/// Best-so-far simple regret after the first `iterations` iterations.
pub fn simple_regret_at(trace: &RegretTrace, iterations: usize) -> Result<f64> {
    if iterations == 0 || iterations > trace.iterations() {
        return Err(Error::invalid(format!(
            "iteration {iterations} outside 1..={}",
            trace.iterations()
        )));
    }
    Ok(best_so_far(trace)[iterations - 1])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trace_from(m: usize, regrets: &[f64]) -> RegretTrace {
        let mut t = RegretTrace::new(0.0, m, 0);
        for (k, &r) in regrets.iter().enumerate() {
            t.entries.push(TraceEntry {
                iter: k / m,
                slot: k % m,
                x: vec![0.0],
                y: -r,
                regret: r,
                sigma_used: 1.0,
                rsr_ratio: f64::NAN,
                fstar_draw: f64::NAN,
                resamples: 0,
            });
        }
        t
    }

    #[test]
    fn arithmetic() {
        let t = trace_from(2, &[0.5, 0.25]);
        assert_eq!(cumulative_regret(&t), 0.75);
        let t = trace_from(1, &[0.5, 0.25, 0.75]);
        assert_eq!(simple_regret(&t), 0.25);
        assert_eq!(best_so_far(&t), vec![0.5, 0.25, 0.25]);
        assert_eq!(simple_regret_at(&t, 1).unwrap(), 0.5);
        assert!(simple_regret_at(&t, 4).is_err());
    }

    #[test]
    fn validation_catches_layout_and_sign() {
        assert!(trace_from(2, &[0.1, 0.2, 0.3, 0.0]).validate().is_ok());
        assert!(trace_from(2, &[0.1, 0.2, 0.3]).validate().is_err());
        assert!(trace_from(1, &[0.1, -1e-6]).validate().is_err());
        assert!(trace_from(1, &[0.1, -1e-10]).validate().is_ok());
    }
}
