use rand::Rng;

use crate::error::{Error, Result};
use crate::gp::points::{CandidateScheme, CandidateSet, DomainBox, Points};

const PRIMES: [u64; 32] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
    101, 103, 107, 109, 113, 127, 131,
];

/// Van der Corput radical inverse of `i` in `base`.
fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += (i % base) as f64 * f;
        i /= base;
        f *= inv;
    }
    r
}

/// Halton point `index` in the unit cube of dimension `dim`.
pub fn halton_point(index: u64, dim: usize) -> Vec<f64> {
    PRIMES[..dim].iter().map(|&b| radical_inverse(index, b)).collect()
}

/// Largest `k` with `k^d <= count`.
fn per_axis(count: usize, d: usize) -> usize {
    let mut k = (count as f64).powf(1.0 / d as f64).round() as usize + 1;
    while k > 0 && k.checked_pow(d as u32).is_none_or(|p| p > count) {
        k -= 1;
    }
    k
}

/// `count` candidate points in `domain`.
///
/// * `Grid` uses `k` points per axis (corners included) with `k^d <= count`;
///   the returned set reports the actual size `k^d`.
/// * `Uniform` draws i.i.d. uniform points from `rng`.
/// * `LowDiscrepancy` is the Halton sequence starting at index 1. It is
///   deterministic and ignores `rng`.
pub fn make_candidates<R: Rng + ?Sized>(
    domain: &DomainBox,
    count: usize,
    scheme: CandidateScheme,
    rng: &mut R,
) -> Result<CandidateSet> {
    if count < 2 {
        return Err(Error::invalid(format!("need at least 2 candidates, got {count}")));
    }
    let d = domain.dim();
    let mut pts = Points::new(d);
    match scheme {
        CandidateScheme::Grid => {
            let k = per_axis(count, d);
            if k < 2 {
                return Err(Error::invalid(format!(
                    "grid with {count} points in {d} dimensions has fewer than 2 points per axis"
                )));
            }
            let axes: Vec<Vec<f64>> = (0..d)
                .map(|a| {
                    let (lo, hi) = (domain.lower()[a], domain.upper()[a]);
                    (0..k)
                        .map(|i| lo + (hi - lo) * i as f64 / (k - 1) as f64)
                        .collect()
                })
                .collect();
            let total = k.pow(d as u32);
            let mut x = vec![0.0; d];
            for mut flat in 0..total {
                for (a, axis) in axes.iter().enumerate() {
                    x[a] = axis[flat % k];
                    flat /= k;
                }
                pts.push(&x)?;
            }
        }
        CandidateScheme::Uniform => {
            let mut seen = std::collections::HashSet::new();
            while pts.len() < count {
                let u: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
                let x = domain.from_unit(&u);
                if seen.insert(crate::gp::points::point_key(&x)) {
                    pts.push(&x)?;
                }
            }
        }
        CandidateScheme::LowDiscrepancy => {
            if d > PRIMES.len() {
                return Err(Error::invalid(format!(
                    "low-discrepancy candidates support at most {} dimensions",
                    PRIMES.len()
                )));
            }
            for i in 1..=count as u64 {
                pts.push(&domain.from_unit(&halton_point(i, d)))?;
            }
        }
        CandidateScheme::Explicit => {
            return Err(Error::invalid("explicit candidate sets are built with CandidateSet::new"));
        }
    }
    CandidateSet::new(pts, domain.clone(), scheme)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn radical_inverse_base_two() {
        let v: Vec<f64> = (1..=4).map(|i| radical_inverse(i, 2)).collect();
        assert_eq!(v, vec![0.5, 0.25, 0.75, 0.125]);
    }

    #[test]
    fn per_axis_rounds_down() {
        assert_eq!(per_axis(9, 2), 3);
        assert_eq!(per_axis(10, 2), 3);
        assert_eq!(per_axis(2025, 2), 45);
        assert_eq!(per_axis(2024, 2), 44);
        assert_eq!(per_axis(27, 3), 3);
        assert_eq!(per_axis(26, 3), 2);
        assert_eq!(per_axis(3, 2), 1);
    }

    #[test]
    fn grid_includes_corners() {
        let dom = DomainBox::cube(2, 0.0, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let c = make_candidates(&dom, 9, CandidateScheme::Grid, &mut rng).unwrap();
        assert_eq!(c.len(), 9);
        for corner in [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [0.5, 0.5]] {
            assert!(c.index_of(&corner).is_some(), "{corner:?}");
        }
    }

    #[test]
    fn too_few_points_is_rejected() {
        let dom = DomainBox::cube(3, 0.0, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(make_candidates(&dom, 1, CandidateScheme::Uniform, &mut rng).is_err());
        assert!(make_candidates(&dom, 7, CandidateScheme::Grid, &mut rng).is_err());
    }
}
