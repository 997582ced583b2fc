//! Independent reference implementations shared by the integration tests.
//! Nothing here calls the library's linear algebra: kernels are re-derived
//! from their formulas and every solve is a dense matrix inverse.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use tsrsr::gp::{
    CandidateScheme, CandidateSet, Dataset, DomainBox, KernelFamily, KernelSpec, Points,
};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Kernel value from the textbook formulas.
pub fn ref_kernel(spec: &KernelSpec, a: &[f64], b: &[f64]) -> f64 {
    let r2: f64 = a
        .iter()
        .zip(b)
        .zip(spec.lengthscales())
        .map(|((x, y), l)| ((x - y) / l).powi(2))
        .sum();
    let r = r2.sqrt();
    let s = spec.signal_variance();
    match spec.family() {
        KernelFamily::SquaredExponential => s * (-0.5 * r2).exp(),
        KernelFamily::Matern { nu } if nu == 0.5 => s * (-r).exp(),
        KernelFamily::Matern { nu } if nu == 1.5 => {
            let t = 3f64.sqrt() * r;
            s * (1.0 + t) * (-t).exp()
        }
        KernelFamily::Matern { .. } => {
            let t = 5f64.sqrt() * r;
            s * (1.0 + t + t * t / 3.0) * (-t).exp()
        }
    }
}

pub fn ref_gram(spec: &KernelSpec, pts: &[Vec<f64>]) -> DMatrix<f64> {
    DMatrix::from_fn(pts.len(), pts.len(), |i, j| ref_kernel(spec, &pts[i], &pts[j]))
}

/// Dense-inverse posterior mean and variance at `x`.
pub fn dense_posterior(
    spec: &KernelSpec,
    inputs: &[Vec<f64>],
    y: &[f64],
    noise: f64,
    x: &[f64],
) -> (f64, f64) {
    if inputs.is_empty() {
        return (0.0, ref_kernel(spec, x, x));
    }
    let n = inputs.len();
    let k = ref_gram(spec, inputs) + DMatrix::identity(n, n) * noise * noise;
    let kinv = k.try_inverse().expect("invertible");
    let kx = DVector::from_iterator(n, inputs.iter().map(|p| ref_kernel(spec, p, x)));
    let yv = DVector::from_column_slice(y);
    let mean = (kx.transpose() * &kinv * yv)[0];
    let var = ref_kernel(spec, x, x) - (kx.transpose() * &kinv * &kx)[0];
    (mean, var)
}

/// Variance at `x` conditioned on the data inputs and pending points, all
/// with observation noise, via the dense inverse of the block matrix.
pub fn block_variance(
    spec: &KernelSpec,
    inputs: &[Vec<f64>],
    pending: &[Vec<f64>],
    noise: f64,
    x: &[f64],
) -> f64 {
    let all: Vec<Vec<f64>> = inputs.iter().chain(pending).cloned().collect();
    dense_posterior(spec, &all, &vec![0.0; all.len()], noise, x).1
}

/// Random kernel over `d` dimensions: SE or one of the Matern orders.
pub fn random_kernel(rng: &mut ChaCha8Rng, d: usize) -> KernelSpec {
    let family = match rng.random_range(0..4) {
        0 => KernelFamily::SquaredExponential,
        1 => KernelFamily::matern(0.5).unwrap(),
        2 => KernelFamily::matern(1.5).unwrap(),
        _ => KernelFamily::matern(2.5).unwrap(),
    };
    let ls = (0..d).map(|_| rng.random_range(0.3..1.5)).collect();
    KernelSpec::new(family, ls, rng.random_range(0.5..2.0)).unwrap()
}

pub fn random_points(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..d).map(|_| rng.random::<f64>()).collect())
        .collect()
}

pub fn to_points(rows: &[Vec<f64>], d: usize) -> Points {
    let mut p = Points::new(d);
    for r in rows {
        p.push(r).unwrap();
    }
    p
}

/// Explicit candidate set inside the unit cube.
pub fn unit_candidates(rows: &[Vec<f64>], d: usize) -> CandidateSet {
    CandidateSet::new(
        to_points(rows, d),
        DomainBox::cube(d, 0.0, 1.0).unwrap(),
        CandidateScheme::Explicit,
    )
    .unwrap()
}

/// A random regression instance with `n ≤ max_n` points in `d ≤ max_d`
/// dimensions.
pub struct Instance {
    pub spec: KernelSpec,
    pub inputs: Vec<Vec<f64>>,
    pub y: Vec<f64>,
    pub noise: f64,
    pub d: usize,
}

impl Instance {
    pub fn random(rng: &mut ChaCha8Rng, max_n: usize, max_d: usize) -> Self {
        let d = rng.random_range(1..=max_d);
        let n = rng.random_range(0..=max_n);
        let inputs = random_points(rng, n, d);
        let y = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        Instance {
            spec: random_kernel(rng, d),
            inputs,
            y,
            noise: rng.random_range(0.05..0.5),
            d,
        }
    }

    pub fn dataset(&self) -> Dataset {
        Dataset::new(to_points(&self.inputs, self.d), self.y.clone(), self.noise).unwrap()
    }
}

/// `½ log det(I + σ_n⁻² K_A)` from a dense determinant.
pub fn logdet_gain(spec: &KernelSpec, pts: &[Vec<f64>], noise: f64) -> f64 {
    let n = pts.len();
    let m = DMatrix::identity(n, n) + ref_gram(spec, pts) / (noise * noise);
    0.5 * m.determinant().ln()
}

/// Independent joint sampler: eigen-decomposition of the covariance.
pub fn eigen_sampler(cov: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = cov.clone().symmetric_eigen();
    let sq = eig.eigenvalues.map(|v| v.max(0.0).sqrt());
    &eig.eigenvectors * DMatrix::from_diagonal(&sq)
}
