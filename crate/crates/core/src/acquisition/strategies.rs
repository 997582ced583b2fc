use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use statrs::function::erf::erfc;

use crate::acquisition::config::{AcquisitionConfig, LiarStrategy, Strategy};
use crate::error::{Error, Result};
use crate::gp::fantasy::CandidateFantasy;
use crate::gp::points::{CandidateSet, Points};
use crate::gp::posterior::{CandidatePrediction, PosteriorState};
use crate::gp::sampling::{argmax, JointSampler, MaxDraw, PriorFactor};

/// Everything a strategy needs to score one iteration's candidates.
pub struct ProposalContext<'a> {
    pub posterior: &'a PosteriorState,
    pub candidates: &'a CandidateSet,
    pub prediction: CandidatePrediction,
    /// Prior factor over `candidates`, enabling pathwise joint sampling.
    pub prior: Option<&'a PriorFactor>,
    /// 0-based iteration index, used by the β schedule.
    pub iteration: usize,
}

impl<'a> ProposalContext<'a> {
    pub fn new(posterior: &'a PosteriorState, candidates: &'a CandidateSet) -> Result<Self> {
        Ok(ProposalContext {
            prediction: posterior.predict(candidates)?,
            posterior,
            candidates,
            prior: None,
            iteration: 0,
        })
    }

    pub fn with_prior(mut self, prior: &'a PriorFactor) -> Self {
        self.prior = Some(prior);
        self
    }

    pub fn at_iteration(mut self, t: usize) -> Self {
        self.iteration = t;
        self
    }

    fn sampler(&self) -> Result<JointSampler<'_>> {
        JointSampler::auto(self.posterior, self.candidates, &self.prediction, self.prior)
    }

    fn fantasy(&self) -> CandidateFantasy<'_> {
        CandidateFantasy::new(self.posterior, self.candidates, &self.prediction)
    }
}

/// Diagnostics recorded for one batch slot. Quantities that a strategy
/// does not use are NaN.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlotDiagnostics {
    /// Maximum of the joint posterior draw used for this slot.
    pub fstar: f64,
    /// μ_t at the pick.
    pub mean: f64,
    /// σ_t(pick | earlier picks of the batch).
    pub sigma: f64,
    /// Regret-to-sigma ratio at the pick.
    pub ratio: f64,
    pub resamples: usize,
    /// The resample cap ran out and the slot fell back to argmax μ_t.
    pub fallback: bool,
}

impl SlotDiagnostics {
    fn plain(mean: f64, sigma: f64) -> Self {
        SlotDiagnostics {
            fstar: f64::NAN,
            mean,
            sigma,
            ratio: f64::NAN,
            resamples: 0,
            fallback: false,
        }
    }
}

/// An ordered batch of candidate picks.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchProposal {
    pub strategy: Strategy,
    pub indices: Vec<usize>,
    pub points: Points,
    pub slots: Vec<SlotDiagnostics>,
}

impl BatchProposal {
    fn new(strategy: Strategy, dim: usize) -> Self {
        BatchProposal {
            strategy,
            indices: Vec::new(),
            points: Points::new(dim),
            slots: Vec::new(),
        }
    }

    fn push(&mut self, candidates: &CandidateSet, j: usize, slot: SlotDiagnostics) {
        self.indices.push(j);
        self.points
            .push(candidates.get(j))
            .expect("candidate dimension matches");
        self.slots.push(slot);
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// `(f̃* − μ) / σ`.
pub fn rsr_value(f_star_tilde: f64, mean: f64, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(Error::invalid(format!("sigma must be positive, got {sigma}")));
    }
    Ok((f_star_tilde - mean) / sigma)
}

/// Closed-form expected improvement over `incumbent`.
pub fn expected_improvement(mean: f64, sigma: f64, incumbent: f64) -> f64 {
    let gap = mean - incumbent;
    if sigma <= 0.0 {
        return gap.max(0.0);
    }
    let z = gap / sigma;
    let cdf = 0.5 * erfc(-z / std::f64::consts::SQRT_2);
    let pdf = (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
    (gap * cdf + sigma * pdf).max(0.0)
}

/// Index maximizing `score`, lowest index on ties.
fn best_by(len: usize, score: impl Fn(usize) -> f64) -> usize {
    let scores: Vec<f64> = (0..len).map(score).collect();
    argmax(&scores).unwrap_or(0)
}

fn check_batch(m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::invalid("batch size must be at least 1"));
    }
    Ok(())
}

/// Dispatches to the configured strategy.
pub fn propose<R: Rng + ?Sized>(
    ctx: &ProposalContext<'_>,
    m: usize,
    cfg: &AcquisitionConfig,
    rng: &mut R,
) -> Result<BatchProposal> {
    cfg.validate()?;
    match cfg.strategy {
        Strategy::TsRsr => propose_tsrsr(ctx, m, cfg, rng),
        Strategy::Ts => propose_ts(ctx, m, rng),
        Strategy::Bucb => propose_bucb(ctx, m, cfg),
        Strategy::Ucbpe => propose_ucbpe(ctx, m, cfg),
        Strategy::Qei => propose_qei(ctx, m, cfg),
        Strategy::Sp => propose_sp(ctx, m, cfg, rng),
        Strategy::MaxVar => propose_maxvar(ctx, m),
    }
}

/// TS-RSR: slot `i` minimizes `(f̃*_i − μ_t(x)) / σ_t(x | picks₁..ᵢ₋₁)` over
/// candidates with positive conditional σ, with an independent joint draw
/// per slot.
pub fn propose_tsrsr<R: Rng + ?Sized>(
    ctx: &ProposalContext<'_>,
    m: usize,
    cfg: &AcquisitionConfig,
    rng: &mut R,
) -> Result<BatchProposal> {
    let sampler = ctx.sampler()?;
    propose_tsrsr_with(ctx, m, cfg.resample_cap, || Ok(sampler.draw_max(rng).value))
}

/// TS-RSR with a caller-supplied source of draw maxima `f̃*`.
///
/// Each slot takes one value from `next_fstar`, and redraws (at most
/// `resample_cap` times) while it is below `max_x μ_t(x)`. If the cap runs
/// out the slot falls back to `argmax μ_t`.
pub fn propose_tsrsr_with(
    ctx: &ProposalContext<'_>,
    m: usize,
    resample_cap: usize,
    mut next_fstar: impl FnMut() -> Result<f64>,
) -> Result<BatchProposal> {
    check_batch(m)?;
    let mu = &ctx.prediction.mean;
    let max_mu = ctx.prediction.max_mean();
    let mut fant = ctx.fantasy();
    let mut out = BatchProposal::new(Strategy::TsRsr, ctx.candidates.dim());
    for _ in 0..m {
        let mut fstar = next_fstar()?;
        let mut resamples = 0;
        while fstar < max_mu && resamples < resample_cap {
            fstar = next_fstar()?;
            resamples += 1;
        }
        let (pick, ratio, fallback) = if fstar < max_mu {
            let j = argmax(mu).expect("nonempty candidates");
            let s = fant.sigma(j);
            // fstar < μ_j here, so the ratio tends to -inf as σ -> 0.
            let r = if s > 0.0 { (fstar - mu[j]) / s } else { f64::NEG_INFINITY };
            (j, r, true)
        } else {
            let mut best: Option<(usize, f64)> = None;
            for (j, &m_j) in mu.iter().enumerate() {
                let s = fant.sigma(j);
                if s > 0.0 {
                    let r = (fstar - m_j) / s;
                    if best.is_none_or(|(_, b)| r < b) {
                        best = Some((j, r));
                    }
                }
            }
            let (j, r) = best.ok_or(Error::DegeneratePosterior)?;
            (j, r, false)
        };
        let slot = SlotDiagnostics {
            fstar,
            mean: mu[pick],
            sigma: fant.sigma(pick),
            ratio,
            resamples,
            fallback,
        };
        out.push(ctx.candidates, pick, slot);
        fant.condition_on(pick)?;
    }
    Ok(out)
}

/// Batch Thompson sampling: `m` independent joint draws, each contributing
/// its argmax. Duplicates are allowed.
pub fn propose_ts<R: Rng + ?Sized>(
    ctx: &ProposalContext<'_>,
    m: usize,
    rng: &mut R,
) -> Result<BatchProposal> {
    check_batch(m)?;
    let sampler = ctx.sampler()?;
    let mut fant = ctx.fantasy();
    let mut out = BatchProposal::new(Strategy::Ts, ctx.candidates.dim());
    for _ in 0..m {
        let MaxDraw { value, index } = sampler.draw_max(rng);
        let mut slot = SlotDiagnostics::plain(ctx.prediction.mean[index], fant.sigma(index));
        slot.fstar = value;
        out.push(ctx.candidates, index, slot);
        fant.condition_on(index)?;
    }
    Ok(out)
}

/// Greedy selection where each slot maximizes `score(j, σ_t(c_j | picks))`.
fn greedy(
    ctx: &ProposalContext<'_>,
    m: usize,
    strategy: Strategy,
    score: impl Fn(usize, usize, &CandidateFantasy<'_>) -> f64,
) -> Result<BatchProposal> {
    check_batch(m)?;
    let mut fant = ctx.fantasy();
    let mut out = BatchProposal::new(strategy, ctx.candidates.dim());
    for slot in 0..m {
        let pick = best_by(fant.len(), |j| score(slot, j, &fant));
        let diag = SlotDiagnostics::plain(ctx.prediction.mean[pick], fant.sigma(pick));
        out.push(ctx.candidates, pick, diag);
        fant.condition_on(pick)?;
    }
    Ok(out)
}

/// BUCB: mean frozen at batch start, variance hallucinated for each slot.
pub fn propose_bucb(
    ctx: &ProposalContext<'_>,
    m: usize,
    cfg: &AcquisitionConfig,
) -> Result<BatchProposal> {
    let rb = cfg.beta_at(ctx.candidates.len(), ctx.iteration).sqrt();
    let mu = &ctx.prediction.mean;
    greedy(ctx, m, Strategy::Bucb, |_, j, f| mu[j] + rb * f.sigma(j))
}

/// UCBPE: first slot by UCB, the rest by maximal conditional σ.
pub fn propose_ucbpe(
    ctx: &ProposalContext<'_>,
    m: usize,
    cfg: &AcquisitionConfig,
) -> Result<BatchProposal> {
    let rb = cfg.beta_at(ctx.candidates.len(), ctx.iteration).sqrt();
    let mu = &ctx.prediction.mean;
    greedy(ctx, m, Strategy::Ucbpe, |slot, j, f| {
        if slot == 0 {
            mu[j] + rb * f.sigma(j)
        } else {
            f.sigma(j)
        }
    })
}

/// Greedy maximal conditional σ, the pure-exploration warm-up rule.
pub fn propose_maxvar(ctx: &ProposalContext<'_>, m: usize) -> Result<BatchProposal> {
    greedy(ctx, m, Strategy::MaxVar, |_, j, f| f.sigma(j))
}

/// Incumbent for EI: best observed target, or best prior mean with no data.
fn incumbent(ctx: &ProposalContext<'_>) -> f64 {
    let y = ctx.posterior.data().targets();
    if y.is_empty() {
        ctx.prediction.max_mean()
    } else {
        y.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Sequential EI with kriging-believer hallucination. Believing the mean
/// leaves μ unchanged, so only σ and the incumbent move between slots.
pub fn propose_qei(
    ctx: &ProposalContext<'_>,
    m: usize,
    cfg: &AcquisitionConfig,
) -> Result<BatchProposal> {
    let LiarStrategy::KrigingBeliever = cfg.liar;
    check_batch(m)?;
    let mu = &ctx.prediction.mean;
    let mut best = incumbent(ctx);
    let mut fant = ctx.fantasy();
    let mut out = BatchProposal::new(Strategy::Qei, ctx.candidates.dim());
    for _ in 0..m {
        let pick = best_by(fant.len(), |j| expected_improvement(mu[j], fant.sigma(j), best));
        out.push(
            ctx.candidates,
            pick,
            SlotDiagnostics::plain(mu[pick], fant.sigma(pick)),
        );
        fant.condition_on(pick)?;
        best = best.max(mu[pick]);
    }
    Ok(out)
}

/// Boltzmann probabilities `∝ exp(EI / temperature)`; uniform when every
/// EI is zero.
pub fn sp_probabilities(ctx: &ProposalContext<'_>, temperature: f64) -> Vec<f64> {
    let best = incumbent(ctx);
    let ei: Vec<f64> = (0..ctx.prediction.len())
        .map(|j| expected_improvement(ctx.prediction.mean[j], ctx.prediction.std(j), best))
        .collect();
    let n = ei.len();
    if ei.iter().all(|&e| e == 0.0) {
        return vec![1.0 / n as f64; n];
    }
    let top = ei.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = ei.iter().map(|e| ((e - top) / temperature).exp()).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|v| v / total).collect()
}

/// Stochastic policy: every slot sampled independently from the Boltzmann
/// distribution over EI.
pub fn propose_sp<R: Rng + ?Sized>(
    ctx: &ProposalContext<'_>,
    m: usize,
    cfg: &AcquisitionConfig,
    rng: &mut R,
) -> Result<BatchProposal> {
    check_batch(m)?;
    let probs = sp_probabilities(ctx, cfg.temperature);
    let dist = WeightedIndex::new(&probs)
        .map_err(|e| Error::Internal(format!("invalid SP weights: {e}")))?;
    let mut fant = ctx.fantasy();
    let mut out = BatchProposal::new(Strategy::Sp, ctx.candidates.dim());
    for _ in 0..m {
        let pick = dist.sample(rng);
        out.push(
            ctx.candidates,
            pick,
            SlotDiagnostics::plain(ctx.prediction.mean[pick], fant.sigma(pick)),
        );
        fant.condition_on(pick)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rsr_arithmetic() {
        assert_eq!(rsr_value(1.0, 1.0, 0.5).unwrap(), 0.0);
        assert_eq!(rsr_value(2.0, 1.0, 0.5).unwrap(), 2.0);
        assert!(rsr_value(2.0, 1.0, 0.0).is_err());
        assert!(rsr_value(2.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn ei_closed_form_at_zero_gap() {
        let phi0 = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
        assert!((expected_improvement(0.3, 1.0, 0.3) - phi0).abs() < 1e-15);
        assert_eq!(expected_improvement(2.0, 0.0, 0.5), 1.5);
        assert_eq!(expected_improvement(0.0, 0.0, 0.5), 0.0);
    }

    #[test]
    fn ei_large_gap_is_the_gap() {
        assert!((expected_improvement(10.0, 0.1, 0.0) - 10.0).abs() < 1e-12);
    }
}
