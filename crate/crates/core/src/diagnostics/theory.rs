use rand::seq::index;
use rand::Rng;

use crate::diagnostics::regret::RegretTrace;
use crate::error::{Error, Result};
use crate::gp::fantasy::CandidateFantasy;
use crate::gp::points::CandidateSet;
use crate::gp::posterior::PosteriorState;

/// Conditional σ below this is floored in the ρ̂ ratio.
pub const SIGMA_FLOOR: f64 = 1e-8;

/// `½ Σ log(1 + σ²/σ_n²)` over a chain of conditional σ values.
pub fn information_gain(noise_std: f64, sigmas: &[f64]) -> Result<f64> {
    if !(noise_std > 0.0) {
        return Err(Error::invalid("noise standard deviation must be positive"));
    }
    if sigmas.iter().any(|s| !(*s >= 0.0)) {
        return Err(Error::invalid("sigma values must be nonnegative"));
    }
    let nv = noise_std * noise_std;
    Ok(0.5 * sigmas.iter().map(|s| (s * s / nv).ln_1p()).sum::<f64>())
}

/// Monte-Carlo lower bound on ρ_m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhoEstimate {
    pub value: f64,
    /// Ratio evaluations whose conditional σ was floored.
    pub floored: usize,
    pub subsets: usize,
}

/// `max σ_t(x) / max(σ_t(x | X̃), 1e-8)` over `n_subsets` random sets `X̃`
/// of `min(m, D)` distinct candidates and over all candidates `x`.
///
/// This is a lower bound on ρ_m, since only sampled subsets are examined.
/// The running maximum is taken in draw order, so for a fixed stream the
/// estimate never decreases as `n_subsets` grows. Returns exactly 1 when
/// `m = 0` or `n_subsets = 0`.
pub fn rho_m_estimate<R: Rng + ?Sized>(
    state: &PosteriorState,
    candidates: &CandidateSet,
    m: usize,
    n_subsets: usize,
    rng: &mut R,
) -> Result<RhoEstimate> {
    let mut est = RhoEstimate {
        value: 1.0,
        floored: 0,
        subsets: 0,
    };
    if m == 0 {
        return Ok(est);
    }
    let pred = state.predict(candidates)?;
    let size = m.min(candidates.len());
    for _ in 0..n_subsets {
        let mut fant = CandidateFantasy::new(state, candidates, &pred);
        for j in index::sample(rng, candidates.len(), size) {
            fant.condition_on(j)?;
        }
        for j in 0..candidates.len() {
            let s0 = pred.std(j);
            if s0 <= 0.0 {
                continue;
            }
            let mut s1 = fant.sigma(j);
            if s1 < SIGMA_FLOOR {
                s1 = SIGMA_FLOOR;
                est.floored += 1;
            }
            est.value = est.value.max(s0 / s1);
        }
        est.subsets += 1;
    }
    Ok(est)
}

/// `√(2 log(2DmT/δ)) · ρ̂`.
pub fn rsr_bound(d: usize, m: usize, t: usize, delta: f64, rho_hat: f64) -> f64 {
    (2.0 * (2.0 * d as f64 * m as f64 * t as f64 / delta).ln()).sqrt() * rho_hat
}

/// Ratios of the non-warm-up slots, failing if any is missing.
fn audited_ratios(trace: &RegretTrace) -> Result<Vec<(usize, f64)>> {
    trace
        .entries
        .iter()
        .filter(|e| e.iter >= trace.warmup)
        .map(|e| {
            if e.rsr_ratio.is_nan() {
                Err(Error::invalid(format!(
                    "trace slot ({}, {}) has no regret-to-sigma ratio",
                    e.iter, e.slot
                )))
            } else {
                Ok((e.iter, e.rsr_ratio))
            }
        })
        .collect()
}

/// Fraction of audited slots whose recorded ratio exceeds the bound.
pub fn rsr_bound_check(
    trace: &RegretTrace,
    d: usize,
    m: usize,
    t: usize,
    delta: f64,
    rho_hat: f64,
) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid("delta must lie in (0, 1)"));
    }
    let ratios = audited_ratios(trace)?;
    if ratios.is_empty() {
        return Ok(0.0);
    }
    let bound = rsr_bound(d, m, t, delta, rho_hat);
    let over = ratios.iter().filter(|(_, r)| *r > bound).count();
    Ok(over as f64 / ratios.len() as f64)
}

/// Theory audit of one TS-RSR trace.
#[derive(Debug, Clone, PartialEq)]
pub struct TheoryReport {
    pub rho_hat: f64,
    pub rho_floored: usize,
    pub rho_subsets: usize,
    /// Information gain of the executed sequence given the initial design.
    pub info_gain: f64,
    pub max_ratio: f64,
    pub bound: f64,
    /// Per audited iteration: some slot exceeded the bound.
    pub violations: Vec<bool>,
    pub violation_fraction: f64,
    pub delta: f64,
}

/// Builds the report for `trace` over `d` candidates, `t` audited
/// iterations of batch size `m`.
pub fn theory_report(
    trace: &RegretTrace,
    noise_std: f64,
    d: usize,
    t: usize,
    delta: f64,
    rho: RhoEstimate,
) -> Result<TheoryReport> {
    let m = trace.m;
    let sigmas: Vec<f64> = trace.entries.iter().map(|e| e.sigma_used).collect();
    let info_gain = information_gain(noise_std, &sigmas)?;
    let ratios = audited_ratios(trace)?;
    let bound = rsr_bound(d, m, t, delta, rho.value);
    let mut violations = vec![false; trace.iterations().saturating_sub(trace.warmup)];
    for (iter, r) in &ratios {
        if *r > bound {
            violations[iter - trace.warmup] = true;
        }
    }
    Ok(TheoryReport {
        rho_hat: rho.value,
        rho_floored: rho.floored,
        rho_subsets: rho.subsets,
        info_gain,
        max_ratio: ratios.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max),
        bound,
        violation_fraction: rsr_bound_check(trace, d, m, t, delta, rho.value)?,
        violations,
        delta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn information_gain_basics() {
        assert_eq!(information_gain(0.1, &[0.0, 0.0]).unwrap(), 0.0);
        let g = information_gain(0.3, &[0.3]).unwrap();
        assert!((g - 0.5 * 2f64.ln()).abs() < 1e-15);
        assert!(information_gain(0.0, &[1.0]).is_err());
        assert!(information_gain(1.0, &[-1.0]).is_err());
    }

    #[test]
    fn bound_formula() {
        let b = rsr_bound(2000, 5, 50, 0.05, 2.0);
        assert!((b - 2.0 * (2.0 * (2.0 * 2000.0 * 250.0 / 0.05f64).ln()).sqrt()).abs() < 1e-12);
    }
}
