//! Posterior variance conditioned on pending, value-free batch points.
//!
//! The variance of a GP posterior does not depend on observed values, so
//! "hallucinating" pending evaluations only requires growing the Cholesky
//! factor of the augmented system
//!
//! ```text
//! [ K_t      K_{t,B} ]
//! [ K_{t,B}ᵀ K_{B,B} ] + σ_n² I
//! ```
//!
//! one row per pending point.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::gp::points::{CandidateSet, Points};
use crate::gp::posterior::{CandidatePrediction, PosteriorState};
use crate::linalg::{self, BASE_JITTER, MAX_JITTER};

/// Base posterior plus an ordered list of pending points.
#[derive(Debug, Clone)]
pub struct FantasyState<'a> {
    base: &'a PosteriorState,
    pending: Points,
    /// Lower factor of the augmented system, `(n + B) × (n + B)`.
    factor: DMatrix<f64>,
}

impl<'a> FantasyState<'a> {
    /// Fantasy with no pending points.
    pub fn new(base: &'a PosteriorState) -> Self {
        FantasyState {
            base,
            pending: Points::new(base.kernel().dim()),
            factor: base.factor().clone(),
        }
    }

    /// Builds the augmented factor for the whole pending list in one
    /// factorization.
    pub fn with_pending(base: &'a PosteriorState, pending: &Points) -> Result<Self> {
        if !pending.is_empty() && pending.dim() != base.kernel().dim() {
            return Err(Error::invalid("pending point dimension does not match kernel"));
        }
        let mut all = base.data().inputs().clone();
        for p in pending.iter() {
            all.push(p)?;
        }
        let mut system = base.kernel().gram(&all);
        let nv = base.noise_var();
        for i in 0..system.nrows() {
            system[(i, i)] += nv;
        }
        let factor = linalg::cholesky_with_jitter(&system, 0.0, "fantasy system")?;
        Ok(FantasyState {
            base,
            pending: pending.clone(),
            factor: factor.lower,
        })
    }

    pub fn base(&self) -> &'a PosteriorState {
        self.base
    }

    pub fn pending(&self) -> &Points {
        &self.pending
    }

    fn augmented_cross(&self, x: &[f64]) -> Vec<f64> {
        let k = self.base.kernel();
        let mut v = self.base.cross_vec(x);
        v.extend(self.pending.iter().map(|p| k.eval_unchecked(p, x)));
        v
    }

    /// Unclamped `σ_t²(x | pending)`.
    pub(crate) fn conditional_variance_raw(&self, x: &[f64]) -> Result<f64> {
        self.base.kernel().check_dim(x)?;
        let mut v = self.augmented_cross(x);
        linalg::solve_lower_in_place(&self.factor, &mut v);
        Ok(self.base.kernel().diag() - v.iter().map(|a| a * a).sum::<f64>())
    }

    pub fn conditional_variance(&self, x: &[f64]) -> Result<f64> {
        Ok(self.conditional_variance_raw(x)?.max(0.0))
    }

    /// `σ_t(x | pending)`.
    pub fn conditional_sigma(&self, x: &[f64]) -> Result<f64> {
        Ok(self.conditional_variance(x)?.sqrt())
    }

    /// Returns a new fantasy with `x_new` appended, growing the factor by a
    /// single row instead of refactoring.
    pub fn extend(&self, x_new: &[f64]) -> Result<FantasyState<'a>> {
        self.base.kernel().check_dim(x_new)?;
        let mut row = self.augmented_cross(x_new);
        linalg::solve_lower_in_place(&self.factor, &mut row);
        let schur = self.base.kernel().diag() + self.base.noise_var()
            - row.iter().map(|a| a * a).sum::<f64>();
        let diag = pivot_with_jitter(schur, "fantasy extension")?;
        let mut pending = self.pending.clone();
        pending.push(x_new)?;
        Ok(FantasyState {
            base: self.base,
            pending,
            factor: linalg::append_row(&self.factor, &row, diag),
        })
    }
}

/// Square root of a Schur-complement pivot, escalating jitter on failure.
fn pivot_with_jitter(schur: f64, context: &str) -> Result<f64> {
    if schur > 0.0 {
        return Ok(schur.sqrt());
    }
    let mut jitter = BASE_JITTER;
    while jitter <= MAX_JITTER * (1.0 + 1e-9) {
        if schur + jitter > 0.0 {
            return Ok((schur + jitter).sqrt());
        }
        jitter *= 10.0;
    }
    Err(Error::NumericalFailure {
        context: context.to_string(),
        jitter: MAX_JITTER,
        dim: 1,
        min_diag: schur,
        max_diag: schur,
    })
}

/// `σ_t(x | {x_b})`.
pub fn conditional_sigma(fantasy: &FantasyState<'_>, x: &[f64]) -> Result<f64> {
    fantasy.conditional_sigma(x)
}

/// Returns `fantasy` extended by `x_new`.
pub fn extend_fantasy<'a>(fantasy: &FantasyState<'a>, x_new: &[f64]) -> Result<FantasyState<'a>> {
    fantasy.extend(x_new)
}

/// Vectorized fantasy over a fixed candidate set: keeps `σ_t²(c | pending)`
/// for every candidate and updates all of them in `O((n + B)·D)` per
/// appended pending point.
#[derive(Debug, Clone)]
pub struct CandidateFantasy<'a> {
    posterior: &'a PosteriorState,
    candidates: &'a CandidateSet,
    pred: &'a CandidatePrediction,
    /// Whitened cross-covariance rows for each pending point (length D each).
    rows: Vec<Vec<f64>>,
    /// Unclamped conditional variances.
    var: Vec<f64>,
    pending: Vec<usize>,
}

impl<'a> CandidateFantasy<'a> {
    pub fn new(
        posterior: &'a PosteriorState,
        candidates: &'a CandidateSet,
        pred: &'a CandidatePrediction,
    ) -> Self {
        // Recompute unclamped variances so that later subtractions start
        // from the same values the pointwise fantasy would see.
        let var = pred
            .proj
            .column_iter()
            .zip(&pred.prior_var)
            .map(|(c, k)| k - c.norm_squared())
            .collect();
        CandidateFantasy {
            posterior,
            candidates,
            pred,
            rows: Vec::new(),
            var,
            pending: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.var.len()
    }

    pub fn is_empty(&self) -> bool {
        self.var.is_empty()
    }

    pub fn pending(&self) -> &[usize] {
        &self.pending
    }

    pub fn prediction(&self) -> &CandidatePrediction {
        self.pred
    }

    /// Clamped `σ_t²(c_j | pending)`.
    pub fn variance(&self, j: usize) -> f64 {
        self.var[j].max(0.0)
    }

    pub fn sigma(&self, j: usize) -> f64 {
        self.variance(j).sqrt()
    }

    pub fn sigmas(&self) -> Vec<f64> {
        (0..self.len()).map(|j| self.sigma(j)).collect()
    }

    /// Posterior covariance `k_t(c_j, c_x)` for every `x`.
    fn posterior_cov_column(&self, j: usize) -> Vec<f64> {
        let kernel = self.posterior.kernel();
        let cj = self.candidates.get(j);
        let proj = &self.pred.proj;
        let pj = proj.column(j);
        (0..self.len())
            .map(|x| {
                let prior = kernel.eval_unchecked(cj, self.candidates.get(x));
                prior - pj.dot(&proj.column(x))
            })
            .collect()
    }

    /// Appends candidate `j` to the pending list.
    pub fn condition_on(&mut self, j: usize) -> Result<()> {
        if j >= self.len() {
            return Err(Error::invalid(format!("candidate index {j} out of range")));
        }
        let schur = self.var[j] + self.posterior.noise_var();
        let d = pivot_with_jitter(schur, "candidate fantasy extension")?;
        let mut row = self.posterior_cov_column(j);
        for prev in &self.rows {
            let pj = prev[j];
            if pj != 0.0 {
                for (r, p) in row.iter_mut().zip(prev) {
                    *r -= pj * p;
                }
            }
        }
        let inv = 1.0 / d;
        for (r, v) in row.iter_mut().zip(self.var.iter_mut()) {
            *r *= inv;
            *v -= *r * *r;
        }
        self.rows.push(row);
        self.pending.push(j);
        Ok(())
    }
}
