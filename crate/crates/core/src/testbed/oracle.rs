use std::sync::Arc;

use rand::seq::index;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::gp::kernel::KernelSpec;
use crate::gp::points::{CandidateSet, Points};
use crate::gp::posterior::Dataset;
use crate::gp::sampling::PriorFactor;
use crate::testbed::objectives::{ObjectiveSpec, TabulatedFunction};

/// Noisy evaluation oracle `y = f(x) + ε`, `ε ~ N(0, σ_n²)`.
///
/// Owns its random stream, so the observation sequence is a pure function of
/// the seed and the query sequence.
#[derive(Debug, Clone)]
pub struct NoisyOracle {
    objective: Arc<ObjectiveSpec>,
    noise_std: f64,
    count: usize,
    rng: ChaCha8Rng,
}

impl NoisyOracle {
    pub fn new(objective: Arc<ObjectiveSpec>, noise_std: f64, rng: ChaCha8Rng) -> Result<Self> {
        if !(noise_std >= 0.0 && noise_std.is_finite()) {
            return Err(Error::invalid("oracle noise must be finite and nonnegative"));
        }
        Ok(NoisyOracle {
            objective,
            noise_std,
            count: 0,
            rng,
        })
    }

    pub fn objective(&self) -> &ObjectiveSpec {
        &self.objective
    }

    pub fn noise_std(&self) -> f64 {
        self.noise_std
    }

    /// Number of evaluations made so far.
    pub fn count(&self) -> usize {
        self.count
    }

    pub fn evaluate(&mut self, x: &[f64]) -> Result<f64> {
        let f = self.objective.value(x)?;
        self.count += 1;
        // The stream advances even when noise is zero, keeping positions
        // aligned across noise settings.
        let eps: f64 = self.rng.sample(StandardNormal);
        Ok(f + self.noise_std * eps)
    }
}

pub fn evaluate(oracle: &mut NoisyOracle, x: &[f64]) -> Result<f64> {
    oracle.evaluate(x)
}

/// One exact joint draw from `GP(0, k)` restricted to the candidates.
pub fn sample_prior_function<R: Rng + ?Sized>(
    spec: &KernelSpec,
    candidates: &CandidateSet,
    rng: &mut R,
) -> Result<TabulatedFunction> {
    let prior = PriorFactor::new(spec, candidates)?;
    sample_prior_function_with(&prior, candidates, rng)
}

/// As [`sample_prior_function`] with a precomputed prior factor.
pub fn sample_prior_function_with<R: Rng + ?Sized>(
    prior: &PriorFactor,
    candidates: &CandidateSet,
    rng: &mut R,
) -> Result<TabulatedFunction> {
    if prior.len() != candidates.len() {
        return Err(Error::invalid("prior factor does not match the candidate set"));
    }
    TabulatedFunction::new(candidates.clone(), prior.sample_prior(rng))
}

/// `n_init` distinct candidates drawn without replacement, each evaluated
/// once. The dataset carries the model noise level `noise_std`.
pub fn initial_design<R: Rng + ?Sized>(
    oracle: &mut NoisyOracle,
    candidates: &CandidateSet,
    n_init: usize,
    noise_std: f64,
    rng: &mut R,
) -> Result<Dataset> {
    if n_init > candidates.len() {
        return Err(Error::invalid(format!(
            "initial design of {n_init} exceeds the {} candidates",
            candidates.len()
        )));
    }
    let mut inputs = Points::new(candidates.dim());
    let mut targets = Vec::with_capacity(n_init);
    for i in index::sample(rng, candidates.len(), n_init) {
        let x = candidates.get(i);
        targets.push(oracle.evaluate(x)?);
        inputs.push(x)?;
    }
    Dataset::new(inputs, targets, noise_std)
}
