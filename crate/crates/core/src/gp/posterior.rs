use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gp::kernel::KernelSpec;
use crate::gp::points::{CandidateSet, Points};
use crate::linalg::{self, Factor};

/// Observed inputs, noisy targets and the observation noise level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    inputs: Points,
    targets: Vec<f64>,
    noise_std: f64,
}

impl Dataset {
    pub fn new(inputs: Points, targets: Vec<f64>, noise_std: f64) -> Result<Self> {
        if inputs.len() != targets.len() {
            return Err(Error::invalid(format!(
                "{} inputs but {} targets",
                inputs.len(),
                targets.len()
            )));
        }
        if !(noise_std > 0.0 && noise_std.is_finite()) {
            return Err(Error::invalid("noise standard deviation must be positive"));
        }
        if inputs.as_flat().iter().chain(&targets).any(|v| !v.is_finite()) {
            return Err(Error::invalid("dataset contains non-finite values"));
        }
        Ok(Dataset {
            inputs,
            targets,
            noise_std,
        })
    }

    pub fn empty(dim: usize, noise_std: f64) -> Result<Self> {
        Dataset::new(Points::new(dim), Vec::new(), noise_std)
    }

    pub fn push(&mut self, x: &[f64], y: f64) -> Result<()> {
        if !y.is_finite() || x.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("non-finite observation"));
        }
        self.inputs.push(x)?;
        self.targets.push(y);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.inputs.dim()
    }

    pub fn inputs(&self) -> &Points {
        &self.inputs
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn noise_std(&self) -> f64 {
        self.noise_std
    }

    /// Same inputs with targets replaced (used for target standardization).
    pub fn with_targets(&self, targets: Vec<f64>) -> Result<Self> {
        Dataset::new(self.inputs.clone(), targets, self.noise_std)
    }
}

/// Exact GP posterior given a dataset: the factor `L` of `K + σ_n² I` and the
/// weights `α = (K + σ_n² I)⁻¹ y`.
#[derive(Debug, Clone)]
pub struct PosteriorState {
    kernel: KernelSpec,
    data: Dataset,
    factor: Factor,
    alpha: DVector<f64>,
    /// `L⁻¹ y`, so that `μ(x) = (L⁻¹ k(X, x)) · white_targets`.
    white_targets: DVector<f64>,
}

/// Posterior quantities over a whole candidate set, computed once and reused
/// by every acquisition rule within an iteration.
#[derive(Debug, Clone)]
pub struct CandidatePrediction {
    /// `L⁻¹ k(X, c_j)` as column `j` (n × D).
    pub proj: DMatrix<f64>,
    pub mean: Vec<f64>,
    /// Clamped posterior variances σ_t²(c_j).
    pub var: Vec<f64>,
    /// `k(c_j, c_j)`.
    pub prior_var: Vec<f64>,
    /// Largest magnitude of negative round-off that was clamped to zero.
    pub max_clamp: f64,
}

impl CandidatePrediction {
    pub fn len(&self) -> usize {
        self.mean.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mean.is_empty()
    }

    pub fn std(&self, j: usize) -> f64 {
        self.var[j].sqrt()
    }

    pub fn max_mean(&self) -> f64 {
        self.mean.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Fits the exact posterior. The data system is tried without jitter first
/// and then escalated along the shared jitter policy.
pub fn fit_posterior(data: &Dataset, spec: &KernelSpec) -> Result<PosteriorState> {
    PosteriorState::fit(data.clone(), spec.clone())
}

impl PosteriorState {
    pub fn fit(data: Dataset, kernel: KernelSpec) -> Result<Self> {
        if !data.is_empty() && data.dim() != kernel.dim() {
            return Err(Error::invalid(format!(
                "dataset dimension {} does not match kernel dimension {}",
                data.dim(),
                kernel.dim()
            )));
        }
        let mut system = kernel.gram(data.inputs());
        let noise_var = data.noise_std() * data.noise_std();
        for i in 0..system.nrows() {
            system[(i, i)] += noise_var;
        }
        let factor = linalg::cholesky_with_jitter(&system, 0.0, "posterior system")?;
        let y = DVector::from_column_slice(data.targets());
        let white_targets = linalg::solve_lower(&factor.lower, &y);
        let mut alpha = white_targets.clone();
        linalg::solve_upper_transposed_in_place(&factor.lower, alpha.as_mut_slice());
        Ok(PosteriorState {
            kernel,
            data,
            factor,
            alpha,
            white_targets,
        })
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn data(&self) -> &Dataset {
        &self.data
    }

    pub fn noise_std(&self) -> f64 {
        self.data.noise_std()
    }

    pub fn noise_var(&self) -> f64 {
        self.data.noise_std() * self.data.noise_std()
    }

    pub fn factor(&self) -> &DMatrix<f64> {
        &self.factor.lower
    }

    pub fn jitter(&self) -> f64 {
        self.factor.jitter
    }

    pub fn alpha(&self) -> &DVector<f64> {
        &self.alpha
    }

    pub fn n(&self) -> usize {
        self.data.len()
    }

    /// `k(X, x)` as a vector.
    pub(crate) fn cross_vec(&self, x: &[f64]) -> Vec<f64> {
        self.data
            .inputs()
            .iter()
            .map(|xi| self.kernel.eval_unchecked(xi, x))
            .collect()
    }

    /// `L⁻¹ k(X, x)`.
    pub(crate) fn whiten(&self, x: &[f64]) -> Vec<f64> {
        let mut v = self.cross_vec(x);
        linalg::solve_lower_in_place(&self.factor.lower, &mut v);
        v
    }

    /// Mean and unclamped variance.
    pub(crate) fn mean_var_raw(&self, x: &[f64]) -> Result<(f64, f64)> {
        self.kernel.check_dim(x)?;
        let v = self.whiten(x);
        let mean: f64 = v.iter().zip(self.white_targets.iter()).map(|(a, b)| a * b).sum();
        let var = self.kernel.diag() - v.iter().map(|a| a * a).sum::<f64>();
        Ok((mean, var))
    }

    /// `(μ_t(x), σ_t²(x))`, with negative round-off clamped to zero.
    pub fn mean_var(&self, x: &[f64]) -> Result<(f64, f64)> {
        let (m, v) = self.mean_var_raw(x)?;
        Ok((m, v.max(0.0)))
    }

    /// Posterior covariance `k_t(a, b)`.
    pub fn covariance(&self, a: &[f64], b: &[f64]) -> Result<f64> {
        self.kernel.check_dim(a)?;
        self.kernel.check_dim(b)?;
        let va = self.whiten(a);
        let vb = self.whiten(b);
        let dot: f64 = va.iter().zip(&vb).map(|(p, q)| p * q).sum();
        Ok(self.kernel.eval_unchecked(a, b) - dot)
    }

    /// Mean, variance and whitened cross-covariances for every candidate.
    pub fn predict(&self, candidates: &CandidateSet) -> Result<CandidatePrediction> {
        if candidates.dim() != self.kernel.dim() {
            return Err(Error::invalid("candidate dimension does not match kernel"));
        }
        let d = candidates.len();
        let cross = self.kernel.cross(self.data.inputs(), candidates.points());
        let proj = linalg::solve_lower_matrix(&self.factor.lower, &cross);
        let mut mean = Vec::with_capacity(d);
        let mut var = Vec::with_capacity(d);
        let mut max_clamp: f64 = 0.0;
        let kd = self.kernel.diag();
        for col in proj.column_iter() {
            mean.push(col.dot(&self.white_targets));
            let v = kd - col.norm_squared();
            if v < 0.0 {
                max_clamp = max_clamp.max(-v);
            }
            var.push(v.max(0.0));
        }
        Ok(CandidatePrediction {
            proj,
            mean,
            var,
            prior_var: vec![kd; d],
            max_clamp,
        })
    }

    /// Posterior covariance matrix over the candidates (D × D).
    pub fn joint_covariance(&self, candidates: &CandidateSet, pred: &CandidatePrediction) -> DMatrix<f64> {
        let mut cov = self.kernel.gram(candidates.points());
        if pred.proj.nrows() > 0 {
            cov -= pred.proj.transpose() * &pred.proj;
        }
        cov
    }
}

/// `(μ_t(x), σ_t²(x))` for a fitted state.
pub fn posterior_mean_var(state: &PosteriorState, x: &[f64]) -> Result<(f64, f64)> {
    state.mean_var(x)
}
