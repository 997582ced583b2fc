use std::sync::Arc;
use std::time::{Duration, Instant};

use crate::acquisition::{propose, propose_maxvar, ProposalContext, Strategy};
use crate::bench::config::ExperimentConfig;
use crate::diagnostics::{rho_m_estimate, theory_report, RegretTrace, TheoryReport, TraceEntry};
use crate::error::{Error, Result};
use crate::gp::points::CandidateSet;
use crate::gp::posterior::{Dataset, PosteriorState};
use crate::gp::sampling::PriorFactor;
use crate::seeds;
use crate::testbed::{
    initial_design, make_candidates, sample_prior_function_with, NoisyOracle, ObjectiveSpec,
};

/// Everything shared by the algorithms of one trial: the candidate set,
/// the objective (a fresh function draw for GP-prior objectives), the
/// regret reference f* and the initial design.
#[derive(Debug, Clone)]
pub struct TrialSetup {
    pub trial: usize,
    pub candidates: CandidateSet,
    pub objective: Arc<ObjectiveSpec>,
    pub fstar: f64,
    pub initial: Dataset,
    /// Oracle state right after the initial design.
    pub oracle: NoisyOracle,
}

/// Builds the shared part of trial `trial`. Draw order on the `shared`
/// stream: candidates, function draw (GP-prior objectives only), initial
/// design indices.
pub fn prepare_trial(cfg: &ExperimentConfig, trial: usize) -> Result<TrialSetup> {
    cfg.validate()?;
    let mut shared = seeds::stream(cfg.seed, trial as u64, "shared");
    let domain = cfg.domain()?;
    let candidates = make_candidates(&domain, cfg.candidates, cfg.scheme, &mut shared)?;
    let objective = match cfg.closed_objective()? {
        Some(obj) => obj,
        None => {
            let kernel = cfg.prior_kernel()?.expect("GP-prior objective");
            let prior = PriorFactor::new(&kernel, &candidates)
                .map_err(|e| e.with_context("GP-prior objective draw"))?;
            let table = sample_prior_function_with(&prior, &candidates, &mut shared)?;
            ObjectiveSpec::tabulated(&cfg.objective, table)
        }
    };
    let fstar = if cfg.objective == "michalewicz10" {
        // The global optimum is far from any candidate; use the best one.
        let mut best = f64::NEG_INFINITY;
        for x in candidates.points().iter() {
            best = best.max(objective.value(x)?);
        }
        best
    } else {
        objective
            .optimum()
            .ok_or_else(|| Error::Internal(format!("{} has no optimum", cfg.objective)))?
    };
    let objective = Arc::new(objective);
    let noise = seeds::stream(cfg.seed, trial as u64, "noise");
    let mut oracle = NoisyOracle::new(objective.clone(), cfg.noise, noise)?;
    let initial = initial_design(&mut oracle, &candidates, cfg.n_init, cfg.noise, &mut shared)?;
    Ok(TrialSetup {
        trial,
        candidates,
        objective,
        fstar,
        initial,
        oracle,
    })
}

/// One (trial, algorithm) run.
#[derive(Debug, Clone)]
pub struct TrialResult {
    pub trial: usize,
    pub algo: Strategy,
    pub seed_shared: String,
    pub seed_algo: String,
    /// Actual number of candidates (a grid may round down).
    pub candidate_count: usize,
    pub n_init: usize,
    pub trace: RegretTrace,
    pub evaluations: usize,
    pub duration: Duration,
    pub theory: Option<TheoryReport>,
}

/// Affine map between raw targets and the model's standardized targets.
#[derive(Debug, Clone, Copy)]
struct Scaling {
    shift: f64,
    scale: f64,
}

impl Scaling {
    fn fit(y: &[f64], enabled: bool) -> Self {
        let identity = Scaling {
            shift: 0.0,
            scale: 1.0,
        };
        if !enabled || y.is_empty() {
            return identity;
        }
        let n = y.len() as f64;
        let mean = y.iter().sum::<f64>() / n;
        let sd = (y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
        Scaling {
            shift: mean,
            scale: if sd > 0.0 && y.len() > 1 { sd } else { 1.0 },
        }
    }

    fn dataset(&self, raw: &Dataset, noise: f64) -> Result<Dataset> {
        let y = raw
            .targets()
            .iter()
            .map(|v| (v - self.shift) / self.scale)
            .collect();
        Dataset::new(raw.inputs().clone(), y, noise / self.scale)
    }
}

fn fit_model(cfg: &ExperimentConfig, raw: &Dataset) -> Result<(PosteriorState, Scaling)> {
    let scaling = Scaling::fit(raw.targets(), cfg.standardize);
    let data = scaling.dataset(raw, cfg.noise)?;
    Ok((PosteriorState::fit(data, cfg.kernel_spec()?)?, scaling))
}

/// Runs `algo` on trial `trial`: initial design, `t_init` max-variance
/// iterations, then `T` batch iterations of propose / evaluate / refit.
pub fn run_trial(cfg: &ExperimentConfig, algo: Strategy, trial: usize) -> Result<TrialResult> {
    let setup = prepare_trial(cfg, trial)?;
    run_prepared(cfg, algo, &setup)
}

/// As [`run_trial`] on an already prepared trial.
pub fn run_prepared(cfg: &ExperimentConfig, algo: Strategy, setup: &TrialSetup) -> Result<TrialResult> {
    let start = Instant::now();
    let trial = setup.trial;
    let label = format!("algo:{}", algo.id());
    let mut rng = seeds::stream(cfg.seed, trial as u64, &label);
    let kernel = cfg.kernel_spec()?;
    let ctx_err = |e: Error| e.with_context(&format!("trial {trial}, {}", algo.id()));
    let prior = PriorFactor::new(&kernel, &setup.candidates).map_err(ctx_err)?;
    let acq = cfg.acquisition(algo);
    let mut oracle = setup.oracle.clone();
    let mut data = setup.initial.clone();
    let mut trace = RegretTrace::new(setup.fstar, cfg.m, cfg.t_init);

    let rho = if algo == Strategy::TsRsr {
        let (post, _) = fit_model(cfg, &data).map_err(ctx_err)?;
        let mut theory_rng = seeds::stream(cfg.seed, trial as u64, "theory");
        Some(rho_m_estimate(&post, &setup.candidates, cfg.m, cfg.rho_subsets, &mut theory_rng)?)
    } else {
        None
    };

    for iter in 0..cfg.t_init + cfg.iterations {
        let (post, scaling) = fit_model(cfg, &data).map_err(ctx_err)?;
        let ctx = ProposalContext::new(&post, &setup.candidates)?
            .with_prior(&prior)
            .at_iteration(iter.saturating_sub(cfg.t_init));
        let batch = if iter < cfg.t_init {
            propose_maxvar(&ctx, cfg.m)
        } else {
            propose(&ctx, cfg.m, &acq, &mut rng)
        }
        .map_err(ctx_err)?;
        for (slot, (x, d)) in batch.points.iter().zip(&batch.slots).enumerate() {
            let y = oracle.evaluate(x)?;
            let f = setup.objective.value(x)?;
            data.push(x, y)?;
            trace.entries.push(TraceEntry {
                iter,
                slot,
                x: x.to_vec(),
                y,
                regret: setup.fstar - f,
                sigma_used: d.sigma * scaling.scale,
                rsr_ratio: d.ratio,
                fstar_draw: scaling.shift + scaling.scale * d.fstar,
                resamples: d.resamples,
            });
        }
    }

    let expected = cfg.n_init + (cfg.t_init + cfg.iterations) * cfg.m;
    if oracle.count() != expected || trace.len() != (cfg.t_init + cfg.iterations) * cfg.m {
        return Err(Error::Internal(format!(
            "budget mismatch: {} evaluations, expected {expected}",
            oracle.count()
        )));
    }
    trace.validate()?;
    let theory = match rho {
        Some(rho) => Some(theory_report(
            &trace,
            cfg.noise,
            setup.candidates.len(),
            cfg.iterations,
            cfg.theory_delta,
            rho,
        )?),
        None => None,
    };
    Ok(TrialResult {
        trial,
        algo,
        seed_shared: seeds::seed_hex(cfg.seed, trial as u64, "shared"),
        seed_algo: seeds::seed_hex(cfg.seed, trial as u64, &label),
        candidate_count: setup.candidates.len(),
        n_init: cfg.n_init,
        trace,
        evaluations: oracle.count(),
        duration: start.elapsed(),
        theory,
    })
}
