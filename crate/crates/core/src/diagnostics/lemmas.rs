//! Monte-Carlo checks of two Gaussian maximum inequalities:
//!
//! * for `Y ~ N(μ, Σ)` with argmax `ℓ*`, `(Y_ℓ* − μ_ℓ*)/σ_ℓ* ≤ √(2 log(D/δ))`
//!   with probability at least `1 − δ`;
//! * for zero-mean `Y` with variances at most 1, `E[max_j Y_j²] ≤ 6 log D`.
//!
//! Draws run in parallel; draw `i` uses its own stream seeded from a base
//! seed taken from the caller's generator, so results do not depend on
//! thread scheduling.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::{self, BASE_JITTER};

/// Correlation structure of the sampled Gaussian vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CovarianceMode {
    Independent,
    /// Constant pairwise correlation `ρ ∈ [0, 1)`.
    Equicorrelated(f64),
    /// Fresh random correlation matrix per draw (normalized Wishart).
    Random,
}

/// How per-coordinate variances are chosen (always at most `scale ≤ 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VarianceMode {
    /// Every variance equals `scale`.
    Fixed(f64),
    /// Variances uniform on `(0, scale]`, fresh per draw.
    Random(f64),
}

impl VarianceMode {
    fn scale(&self) -> f64 {
        match self {
            VarianceMode::Fixed(s) | VarianceMode::Random(s) => *s,
        }
    }
}

fn draw_stream(base: u64, i: usize) -> ChaCha8Rng {
    let digest = Sha256::digest(format!("lemma/{base}/{i}").as_bytes());
    ChaCha8Rng::from_seed(digest.into())
}

fn correlation<R: Rng + ?Sized>(d: usize, mode: CovarianceMode, rng: &mut R) -> DMatrix<f64> {
    match mode {
        CovarianceMode::Independent => DMatrix::identity(d, d),
        CovarianceMode::Equicorrelated(rho) => {
            DMatrix::from_fn(d, d, |i, j| if i == j { 1.0 } else { rho })
        }
        CovarianceMode::Random => {
            let a = DMatrix::from_fn(d, d + 2, |_, _| rng.sample::<f64, _>(StandardNormal));
            let w = &a * a.transpose();
            DMatrix::from_fn(d, d, |i, j| w[(i, j)] / (w[(i, i)] * w[(j, j)]).sqrt())
        }
    }
}

/// One zero-mean draw with its standard deviations.
fn gaussian_draw<R: Rng + ?Sized>(
    d: usize,
    cov: CovarianceMode,
    var: VarianceMode,
    rng: &mut R,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let c = correlation(d, cov, rng);
    let sd: Vec<f64> = match var {
        VarianceMode::Fixed(s) => vec![s.sqrt(); d],
        VarianceMode::Random(s) => (0..d)
            .map(|_| (s * (1.0 - rng.random::<f64>())).sqrt())
            .collect(),
    };
    let lower = if matches!(cov, CovarianceMode::Independent) {
        c
    } else {
        linalg::cholesky_with_jitter(&c, BASE_JITTER, "lemma correlation")?.lower
    };
    let z: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
    let y = linalg::lower_mul(&lower, &z)
        .into_iter()
        .zip(&sd)
        .map(|(v, s)| v * s)
        .collect();
    Ok((y, sd))
}

fn validate(d: usize, n_draws: usize, var: VarianceMode, cov: CovarianceMode) -> Result<()> {
    if d == 0 || n_draws == 0 {
        return Err(Error::invalid("dimension and draw count must be positive"));
    }
    let s = var.scale();
    if !(s > 0.0 && s <= 1.0) {
        return Err(Error::invalid("variance scale must lie in (0, 1]"));
    }
    if let CovarianceMode::Equicorrelated(r) = cov {
        if !(0.0..1.0).contains(&r) {
            return Err(Error::invalid("equicorrelation must lie in [0, 1)"));
        }
    }
    Ok(())
}

/// Fraction of draws where the standardized argmax exceeds
/// `√(2 log(D/δ))`. Means are standard normal, so the argmax is not
/// simply the largest noise coordinate.
pub fn verify_max_ratio_lemma<R: Rng + ?Sized>(
    d: usize,
    delta: f64,
    n_draws: usize,
    cov: CovarianceMode,
    rng: &mut R,
) -> Result<f64> {
    let var = VarianceMode::Random(1.0);
    validate(d, n_draws, var, cov)?;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid("delta must lie in (0, 1)"));
    }
    let threshold = (2.0 * (d as f64 / delta).ln()).sqrt();
    let base: u64 = rng.random();
    let hits = (0..n_draws)
        .into_par_iter()
        .map(|i| -> Result<usize> {
            let mut r = draw_stream(base, i);
            let mu: Vec<f64> = (0..d).map(|_| r.sample(StandardNormal)).collect();
            let (noise, sd) = gaussian_draw(d, cov, var, &mut r)?;
            let y: Vec<f64> = noise.iter().zip(&mu).map(|(e, m)| e + m).collect();
            let l = crate::gp::sampling::argmax(&y).expect("d >= 1");
            Ok(usize::from((y[l] - mu[l]) / sd[l] > threshold))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .sum::<usize>();
    Ok(hits as f64 / n_draws as f64)
}

/// Monte-Carlo estimate of `E[max_j Y_j²]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentEstimate {
    pub mean: f64,
    pub std_error: f64,
    /// `6 log D`.
    pub bound: f64,
}

impl MomentEstimate {
    /// `mean ≤ bound + k · std_error`.
    pub fn within(&self, k: f64) -> bool {
        self.mean <= self.bound + k * self.std_error
    }
}

pub fn verify_max_square_lemma<R: Rng + ?Sized>(
    d: usize,
    n_draws: usize,
    cov: CovarianceMode,
    var: VarianceMode,
    rng: &mut R,
) -> Result<MomentEstimate> {
    validate(d, n_draws, var, cov)?;
    if d < 2 {
        return Err(Error::invalid("the max-square bound needs D >= 2"));
    }
    let base: u64 = rng.random();
    let values = (0..n_draws)
        .into_par_iter()
        .map(|i| -> Result<f64> {
            let mut r = draw_stream(base, i);
            let (y, _) = gaussian_draw(d, cov, var, &mut r)?;
            Ok(y.iter().map(|v| v * v).fold(0.0, f64::max))
        })
        .collect::<Result<Vec<_>>>()?;
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var_hat = if values.len() > 1 {
        values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Ok(MomentEstimate {
        mean,
        std_error: (var_hat / n).sqrt(),
        bound: 6.0 * (d as f64).ln(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_correlation_has_unit_diagonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let c = correlation(6, CovarianceMode::Random, &mut rng);
        for i in 0..6 {
            assert!((c[(i, i)] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(verify_max_ratio_lemma(5, 1.5, 10, CovarianceMode::Independent, &mut rng).is_err());
        assert!(verify_max_square_lemma(
            1,
            10,
            CovarianceMode::Independent,
            VarianceMode::Fixed(1.0),
            &mut rng
        )
        .is_err());
        assert!(verify_max_square_lemma(
            3,
            10,
            CovarianceMode::Independent,
            VarianceMode::Fixed(2.0),
            &mut rng
        )
        .is_err());
    }
}
