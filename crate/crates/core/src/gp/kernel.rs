use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gp::points::Points;

/// Stationary kernel families with closed-form evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelFamily {
    SquaredExponential,
    /// Matérn with smoothness ν ∈ {0.5, 1.5, 2.5}.
    Matern { nu: f64 },
}

impl KernelFamily {
    pub fn matern(nu: f64) -> Result<Self> {
        if [0.5, 1.5, 2.5].contains(&nu) {
            Ok(KernelFamily::Matern { nu })
        } else {
            Err(Error::invalid(format!(
                "matern smoothness must be one of 0.5, 1.5, 2.5 (got {nu})"
            )))
        }
    }

    /// Correlation as a function of the scaled distance `r`.
    #[inline]
    fn correlation(&self, r2: f64) -> f64 {
        match *self {
            KernelFamily::SquaredExponential => (-0.5 * r2).exp(),
            KernelFamily::Matern { nu } => {
                let r = r2.sqrt();
                if nu == 0.5 {
                    (-r).exp()
                } else if nu == 1.5 {
                    let s = 3f64.sqrt() * r;
                    (1.0 + s) * (-s).exp()
                } else {
                    let s = 5f64.sqrt() * r;
                    (1.0 + s + s * s / 3.0) * (-s).exp()
                }
            }
        }
    }
}

/// A kernel family with per-dimension lengthscales and a signal variance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    family: KernelFamily,
    lengthscales: Vec<f64>,
    signal_variance: f64,
}

impl KernelSpec {
    pub fn new(family: KernelFamily, lengthscales: Vec<f64>, signal_variance: f64) -> Result<Self> {
        if lengthscales.is_empty() {
            return Err(Error::invalid("kernel needs at least one lengthscale"));
        }
        if lengthscales.iter().any(|l| !(*l > 0.0 && l.is_finite())) {
            return Err(Error::invalid("lengthscales must be positive and finite"));
        }
        if !(signal_variance > 0.0 && signal_variance.is_finite()) {
            return Err(Error::invalid("signal variance must be positive and finite"));
        }
        if let KernelFamily::Matern { nu } = family {
            KernelFamily::matern(nu)?;
        }
        Ok(KernelSpec {
            family,
            lengthscales,
            signal_variance,
        })
    }

    /// Unit signal variance with one shared lengthscale.
    pub fn isotropic(family: KernelFamily, dim: usize, lengthscale: f64) -> Result<Self> {
        KernelSpec::new(family, vec![lengthscale; dim], 1.0)
    }

    pub fn family(&self) -> KernelFamily {
        self.family
    }

    pub fn dim(&self) -> usize {
        self.lengthscales.len()
    }

    pub fn lengthscales(&self) -> &[f64] {
        &self.lengthscales
    }

    pub fn signal_variance(&self) -> f64 {
        self.signal_variance
    }

    pub fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::invalid(format!(
                "point dimension {} does not match kernel dimension {}",
                x.len(),
                self.dim()
            )));
        }
        Ok(())
    }

    /// `k(x, x2)`.
    pub fn eval(&self, x: &[f64], x2: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        self.check_dim(x2)?;
        Ok(self.eval_unchecked(x, x2))
    }

    #[inline]
    pub(crate) fn eval_unchecked(&self, x: &[f64], x2: &[f64]) -> f64 {
        let mut r2 = 0.0;
        for ((a, b), l) in x.iter().zip(x2).zip(&self.lengthscales) {
            let d = (a - b) / l;
            r2 += d * d;
        }
        self.signal_variance * self.family.correlation(r2)
    }

    /// `k(x, x)`; constant for stationary kernels.
    pub fn diag(&self) -> f64 {
        self.signal_variance
    }

    /// Cross-covariance matrix `[k(a_i, b_j)]`.
    pub fn cross(&self, a: &Points, b: &Points) -> DMatrix<f64> {
        DMatrix::from_fn(a.len(), b.len(), |i, j| {
            self.eval_unchecked(a.get(i), b.get(j))
        })
    }

    /// Symmetric Gram matrix `[k(a_i, a_j)]`.
    pub fn gram(&self, a: &Points) -> DMatrix<f64> {
        let n = a.len();
        let mut g = DMatrix::zeros(n, n);
        for j in 0..n {
            g[(j, j)] = self.diag();
            for i in j + 1..n {
                let v = self.eval_unchecked(a.get(i), a.get(j));
                g[(i, j)] = v;
                g[(j, i)] = v;
            }
        }
        g
    }
}

/// `k(x, x2)` with dimension checking.
pub fn kernel_eval(spec: &KernelSpec, x: &[f64], x2: &[f64]) -> Result<f64> {
    spec.eval(x, x2)
}
