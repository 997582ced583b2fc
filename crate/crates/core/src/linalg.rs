//! Dense Cholesky helpers shared by the GP code.
//!
//! All factors are lower triangular and stored in `nalgebra::DMatrix`
//! (column-major). Jitter escalation follows one policy everywhere: start at
//! `initial`, multiply by ten on failure, give up past [`MAX_JITTER`].

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// First jitter tried when factoring a joint covariance.
pub const BASE_JITTER: f64 = 1e-10;
/// Largest jitter tried before reporting a numerical failure.
pub const MAX_JITTER: f64 = 1e-4;

/// A lower-triangular Cholesky factor together with the jitter that was
/// needed to obtain it.
#[derive(Debug, Clone)]
pub struct Factor {
    pub lower: DMatrix<f64>,
    pub jitter: f64,
}

/// In-place unblocked Cholesky of the lower triangle of `a`.
///
/// Returns `false` if a non-positive pivot is hit. The strict upper
/// triangle is zeroed on success.
fn cholesky_in_place(a: &mut DMatrix<f64>) -> bool {
    let n = a.nrows();
    for j in 0..n {
        // Left-looking update of column j using columns 0..j.
        let mut diag = a[(j, j)];
        for k in 0..j {
            let l = a[(j, k)];
            diag -= l * l;
        }
        if !(diag > 0.0) || !diag.is_finite() {
            return false;
        }
        let ljj = diag.sqrt();
        a[(j, j)] = ljj;
        if j + 1 < n {
            // a[j+1.., j] -= L[j+1.., 0..j] * L[j, 0..j]^T, column by column
            // so the inner loop runs down contiguous memory.
            for k in 0..j {
                let ljk = a[(j, k)];
                if ljk == 0.0 {
                    continue;
                }
                let (left, mut right) = a.columns_range_pair_mut(k, j);
                let src = left.rows_range(j + 1..n);
                let mut dst = right.rows_range_mut(j + 1..n);
                dst.axpy(-ljk, &src, 1.0);
            }
            let inv = 1.0 / ljj;
            for i in j + 1..n {
                a[(i, j)] *= inv;
            }
        }
    }
    for j in 1..n {
        for i in 0..j {
            a[(i, j)] = 0.0;
        }
    }
    true
}

/// Factors the symmetric matrix `a` (only the lower triangle is read),
/// adding `initial`, `10·initial`, ... up to [`MAX_JITTER`] to the diagonal
/// until the factorization succeeds. An `initial` of zero tries the bare
/// matrix first and then continues from [`BASE_JITTER`].
pub fn cholesky_with_jitter(a: &DMatrix<f64>, initial: f64, context: &str) -> Result<Factor> {
    if a.nrows() != a.ncols() {
        return Err(Error::invalid(format!(
            "{context}: cholesky of non-square {}x{} matrix",
            a.nrows(),
            a.ncols()
        )));
    }
    let mut jitter = initial;
    loop {
        let mut work = a.clone();
        if jitter > 0.0 {
            for i in 0..work.nrows() {
                work[(i, i)] += jitter;
            }
        }
        if cholesky_in_place(&mut work) {
            return Ok(Factor {
                lower: work,
                jitter,
            });
        }
        let next = if jitter == 0.0 {
            BASE_JITTER
        } else {
            jitter * 10.0
        };
        if next > MAX_JITTER * (1.0 + 1e-9) {
            let diag = a.diagonal();
            return Err(Error::NumericalFailure {
                context: context.to_string(),
                jitter,
                dim: a.nrows(),
                min_diag: diag.min(),
                max_diag: diag.max(),
            });
        }
        jitter = next;
    }
}

/// Solves `L x = b` for lower-triangular `L`.
pub fn solve_lower(lower: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let mut x = b.clone();
    solve_lower_in_place(lower, x.as_mut_slice());
    x
}

/// Forward substitution on a raw slice (length must equal the factor size).
pub fn solve_lower_in_place(lower: &DMatrix<f64>, x: &mut [f64]) {
    let n = lower.nrows();
    debug_assert_eq!(x.len(), n);
    // Column-oriented so each inner loop walks one contiguous column.
    for j in 0..n {
        let xj = x[j] / lower[(j, j)];
        x[j] = xj;
        if xj != 0.0 {
            let col = lower.column(j);
            for i in j + 1..n {
                x[i] -= col[i] * xj;
            }
        }
    }
}

/// Solves `Lᵀ x = b` for lower-triangular `L`.
pub fn solve_upper_transposed_in_place(lower: &DMatrix<f64>, x: &mut [f64]) {
    let n = lower.nrows();
    for j in (0..n).rev() {
        let col = lower.column(j);
        let mut s = x[j];
        for i in j + 1..n {
            s -= col[i] * x[i];
        }
        x[j] = s / lower[(j, j)];
    }
}

/// Solves `L X = B` column by column.
pub fn solve_lower_matrix(lower: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let mut x = b.clone();
    for mut col in x.column_iter_mut() {
        solve_lower_in_place(lower, col.as_mut_slice());
    }
    x
}

/// Computes `L z` for lower-triangular `L`, skipping the zero upper triangle.
pub fn lower_mul(lower: &DMatrix<f64>, z: &[f64]) -> Vec<f64> {
    let n = lower.nrows();
    let mut out = vec![0.0; n];
    for (j, &zj) in z.iter().enumerate().take(n) {
        if zj == 0.0 {
            continue;
        }
        let col = lower.column(j);
        for i in j..n {
            out[i] += col[i] * zj;
        }
    }
    out
}

/// Grows a lower-triangular factor by one row `[row, diag]`.
pub fn append_row(lower: &DMatrix<f64>, row: &[f64], diag: f64) -> DMatrix<f64> {
    let n = lower.nrows();
    debug_assert_eq!(row.len(), n);
    let mut grown = DMatrix::zeros(n + 1, n + 1);
    grown.view_mut((0, 0), (n, n)).copy_from(lower);
    for (j, &v) in row.iter().enumerate() {
        grown[(n, j)] = v;
    }
    grown[(n, n)] = diag;
    grown
}
