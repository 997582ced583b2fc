//! Joint posterior draws over a finite candidate set.
//!
//! Two exact routes are provided:
//!
//! * **direct** factors the D × D posterior covariance `K_CC − PᵀP`;
//! * **pathwise** draws a prior sample `f₀ ~ GP(0, k)` from a factor of the
//!   prior Gram matrix over the candidates (computed once per candidate set)
//!   and conditions it on the data by
//!   `f(x) = f₀(x) + k(x, X)(K + σ_n²I)⁻¹(y − f₀(X) − ε)`, `ε ~ N(0, σ_n²I)`.
//!   This requires every training input to be a candidate point.
//!
//! Both produce draws from the same Gaussian; the pathwise route avoids a
//! D³ factorization per posterior.

use std::collections::HashMap;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::gp::kernel::KernelSpec;
use crate::gp::points::{point_key, CandidateSet};
use crate::gp::posterior::{CandidatePrediction, PosteriorState};
use crate::linalg::{self, Factor, BASE_JITTER};

/// Cholesky factor of the prior Gram matrix over a candidate set.
#[derive(Debug, Clone)]
pub struct PriorFactor {
    factor: Factor,
    lookup: HashMap<Vec<u64>, usize>,
}

impl PriorFactor {
    pub fn new(kernel: &KernelSpec, candidates: &CandidateSet) -> Result<Self> {
        if kernel.dim() != candidates.dim() {
            return Err(Error::invalid("kernel dimension does not match candidates"));
        }
        let gram = kernel.gram(candidates.points());
        let factor = linalg::cholesky_with_jitter(&gram, BASE_JITTER, "prior candidate covariance")?;
        let lookup = candidates
            .points()
            .iter()
            .enumerate()
            .map(|(i, p)| (point_key(p), i))
            .collect();
        Ok(PriorFactor { factor, lookup })
    }

    pub fn len(&self) -> usize {
        self.factor.lower.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn jitter(&self) -> f64 {
        self.factor.jitter
    }

    pub fn lower(&self) -> &DMatrix<f64> {
        &self.factor.lower
    }

    /// Candidate index of every training input, or `None` if some input is
    /// not a candidate.
    fn locate(&self, posterior: &PosteriorState) -> Option<Vec<usize>> {
        posterior
            .data()
            .inputs()
            .iter()
            .map(|x| self.lookup.get(&point_key(x)).copied())
            .collect()
    }

    /// One draw from the prior restricted to the candidates.
    pub fn sample_prior<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let z = standard_normals(rng, self.len());
        linalg::lower_mul(&self.factor.lower, &z)
    }
}

fn standard_normals<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

enum Route<'a> {
    Direct {
        lower: DMatrix<f64>,
    },
    Pathwise {
        prior: &'a PriorFactor,
        posterior: &'a PosteriorState,
        proj: &'a DMatrix<f64>,
        obs_index: Vec<usize>,
    },
}

/// Reusable sampler for joint posterior draws over one candidate set.
pub struct JointSampler<'a> {
    mean: &'a [f64],
    route: Route<'a>,
}

/// One joint draw reduced to its maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxDraw {
    pub value: f64,
    pub index: usize,
}

impl<'a> JointSampler<'a> {
    /// Factors the posterior covariance once; every draw reuses the factor.
    pub fn direct(
        posterior: &'a PosteriorState,
        candidates: &'a CandidateSet,
        pred: &'a CandidatePrediction,
    ) -> Result<Self> {
        let cov = posterior.joint_covariance(candidates, pred);
        let f = linalg::cholesky_with_jitter(&cov, BASE_JITTER, "joint posterior covariance")?;
        Ok(JointSampler {
            mean: &pred.mean,
            route: Route::Direct { lower: f.lower },
        })
    }

    /// Pathwise conditioning of prior draws; fails if some training input is
    /// not among the candidates.
    pub fn pathwise(
        posterior: &'a PosteriorState,
        pred: &'a CandidatePrediction,
        prior: &'a PriorFactor,
    ) -> Result<Self> {
        if prior.len() != pred.len() {
            return Err(Error::invalid("prior factor and prediction cover different sets"));
        }
        let obs_index = prior
            .locate(posterior)
            .ok_or_else(|| Error::invalid("pathwise sampling needs every input to be a candidate"))?;
        Ok(JointSampler {
            mean: &pred.mean,
            route: Route::Pathwise {
                prior,
                posterior,
                proj: &pred.proj,
                obs_index,
            },
        })
    }

    /// Pathwise when a prior factor is available and applicable, direct
    /// otherwise.
    pub fn auto(
        posterior: &'a PosteriorState,
        candidates: &'a CandidateSet,
        pred: &'a CandidatePrediction,
        prior: Option<&'a PriorFactor>,
    ) -> Result<Self> {
        if let Some(p) = prior {
            if p.len() == candidates.len() && p.locate(posterior).is_some() {
                return JointSampler::pathwise(posterior, pred, p);
            }
        }
        JointSampler::direct(posterior, candidates, pred)
    }

    pub fn is_pathwise(&self) -> bool {
        matches!(self.route, Route::Pathwise { .. })
    }

    pub fn len(&self) -> usize {
        self.mean.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mean.is_empty()
    }

    /// One joint draw of the latent function at every candidate.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        match &self.route {
            Route::Direct { lower } => {
                let z = standard_normals(rng, self.mean.len());
                let mut f = linalg::lower_mul(lower, &z);
                for (v, m) in f.iter_mut().zip(self.mean) {
                    *v += m;
                }
                f
            }
            Route::Pathwise {
                prior,
                posterior,
                proj,
                obs_index,
            } => {
                let mut f = prior.sample_prior(rng);
                if obs_index.is_empty() {
                    return f;
                }
                let sn = posterior.noise_std();
                let mut resid: Vec<f64> = obs_index
                    .iter()
                    .zip(posterior.data().targets())
                    .map(|(&i, y)| {
                        let eps: f64 = rng.sample(StandardNormal);
                        y - f[i] - sn * eps
                    })
                    .collect();
                linalg::solve_lower_in_place(posterior.factor(), &mut resid);
                for (v, col) in f.iter_mut().zip(proj.column_iter()) {
                    *v += col.iter().zip(&resid).map(|(a, b)| a * b).sum::<f64>();
                }
                f
            }
        }
    }

    /// Maximum of one joint draw; ties go to the lowest index.
    pub fn draw_max<R: Rng + ?Sized>(&self, rng: &mut R) -> MaxDraw {
        let f = self.draw(rng);
        let index = argmax(&f).expect("candidate set is nonempty");
        MaxDraw {
            value: f[index],
            index,
        }
    }
}

/// Index of the largest value, lowest index on ties. NaNs are skipped.
pub fn argmax(values: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &v) in values.iter().enumerate() {
        if v.is_nan() {
            continue;
        }
        match best {
            Some((_, b)) if v <= b => {}
            _ => best = Some((i, v)),
        }
    }
    best.map(|(i, _)| i)
}

/// A single joint draw from the posterior over the candidates, factoring the
/// posterior covariance for this draw.
pub fn sample_posterior_joint<R: Rng + ?Sized>(
    state: &PosteriorState,
    candidates: &CandidateSet,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let pred = state.predict(candidates)?;
    let sampler = JointSampler::direct(state, candidates, &pred)?;
    Ok(sampler.draw(rng))
}

/// `(max_x f̃(x), argmax)` of one joint posterior draw.
pub fn sample_max<R: Rng + ?Sized>(
    state: &PosteriorState,
    candidates: &CandidateSet,
    rng: &mut R,
) -> Result<(f64, Vec<f64>)> {
    let f = sample_posterior_joint(state, candidates, rng)?;
    let i = argmax(&f).ok_or_else(|| Error::invalid("empty candidate set"))?;
    Ok((f[i], candidates.get(i).to_vec()))
}
