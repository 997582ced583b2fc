mod common;

use std::sync::Arc;

use common::*;
use rand::Rng;
use tsrsr::gp::*;
use tsrsr::testbed::*;
use tsrsr::Error;

const IDS: [&str; 7] = [
    "ackley2",
    "ackley3",
    "bird",
    "rosenbrock",
    "hartmann6",
    "griewank8",
    "michalewicz10",
];

fn uniform_in(r: &mut impl Rng, dom: &DomainBox) -> Vec<f64> {
    dom.lower()
        .iter()
        .zip(dom.upper())
        .map(|(lo, hi)| r.random_range(*lo..*hi))
        .collect()
}

#[test]
fn no_random_probe_beats_the_stated_optimum() {
    let mut r = rng(51);
    for id in IDS {
        let f = objective_by_id(id).unwrap();
        let opt = f.optimum().unwrap();
        for _ in 0..100_000 {
            let x = uniform_in(&mut r, f.domain());
            assert!(f.value(&x).unwrap() <= opt + 1e-9, "{id}");
        }
    }
}

#[test]
fn published_minimizers_attain_the_optimum() {
    // Minimizers as tabulated in the standard benchmark literature.
    let cases: [(&str, Vec<f64>, f64); 7] = [
        ("ackley2", vec![0.0, 0.0], 1e-12),
        ("ackley3", vec![0.0; 3], 1e-12),
        ("rosenbrock", vec![1.0, 1.0], 0.0),
        ("griewank8", vec![0.0; 8], 0.0),
        ("bird", vec![4.70104, 3.15294], 1e-3),
        ("bird", vec![-1.58214, -3.13024], 1e-3),
        (
            "hartmann6",
            vec![0.20169, 0.150011, 0.476874, 0.275332, 0.311652, 0.6573],
            1e-5,
        ),
    ];
    for (id, x, tol) in cases {
        let f = objective_by_id(id).unwrap();
        let v = f.value(&x).unwrap();
        assert!((v - f.optimum().unwrap()).abs() <= tol, "{id}: {v}");
    }
    // Published five-digit values.
    let bird = objective_by_id("bird").unwrap().optimum().unwrap();
    assert!((bird - 106.764537).abs() < 1e-6);
    let h = objective_by_id("hartmann6").unwrap().optimum().unwrap();
    assert!((h - 3.32237).abs() < 1e-5);
    let m = objective_by_id("michalewicz10").unwrap().optimum().unwrap();
    assert!((m - 9.66015).abs() < 1e-5);
}

#[test]
fn bird_optimum_survives_grid_refinement() {
    // Independent search: coarse grid, then shrinking compass steps.
    let f = objective_by_id("bird").unwrap();
    let g = |x: &[f64]| f.value(x).unwrap_or(f64::NEG_INFINITY);
    let lim = 2.0 * std::f64::consts::PI;
    let n = 400;
    let mut best = (f64::NEG_INFINITY, vec![0.0, 0.0]);
    for i in 0..=n {
        for j in 0..=n {
            let x = vec![-lim + 2.0 * lim * i as f64 / n as f64, -lim + 2.0 * lim * j as f64 / n as f64];
            let v = g(&x);
            if v > best.0 {
                best = (v, x);
            }
        }
    }
    let (mut v, mut x) = best;
    let mut step = lim / n as f64;
    while step > 1e-13 {
        let mut moved = false;
        for (dx, dy) in [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)] {
            let y = vec![x[0] + dx * step, x[1] + dy * step];
            let w = g(&y);
            if w > v {
                (v, x, moved) = (w, y, true);
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    assert!((v - objective_by_id("bird").unwrap().optimum().unwrap()).abs() < 1e-9);
}

#[test]
fn objective_rejects_bad_points() {
    let f = objective_by_id("rosenbrock").unwrap();
    assert!(matches!(f.value(&[0.0]), Err(Error::InvalidArgument(_))));
    assert!(matches!(f.value(&[0.0, 5.0]), Err(Error::InvalidArgument(_))));
    assert!(matches!(make_objective("ackley", 4), Err(Error::InvalidArgument(_))));
    assert!(matches!(objective_by_id("sphere"), Err(Error::InvalidArgument(_))));
}

#[test]
fn oracle_noise_has_the_stated_moments() {
    let f = Arc::new(objective_by_id("ackley2").unwrap());
    let x = [1.0, -2.0];
    let truth = f.value(&x).unwrap();
    let mut o = NoisyOracle::new(f, 0.5, rng(52)).unwrap();
    let n = 20_000;
    let ys: Vec<f64> = (0..n).map(|_| evaluate(&mut o, &x).unwrap()).collect();
    assert_eq!(o.count(), n);
    let mean = ys.iter().sum::<f64>() / n as f64;
    let var = ys.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    assert!((mean - truth).abs() < 4.0 * 0.5 / (n as f64).sqrt());
    // Var of the sample variance is 2σ⁴/(n−1) for Gaussian noise.
    assert!((var - 0.25).abs() < 4.0 * (2.0 * 0.0625 / (n - 1) as f64).sqrt());
}

#[test]
fn noiseless_oracle_is_exact_and_streams_stay_aligned() {
    let f = Arc::new(objective_by_id("bird").unwrap());
    let mut a = NoisyOracle::new(f.clone(), 0.0, rng(53)).unwrap();
    let mut b = NoisyOracle::new(f.clone(), 0.1, rng(53)).unwrap();
    let mut c = NoisyOracle::new(f.clone(), 0.1, rng(53)).unwrap();
    let mut r = rng(54);
    for _ in 0..20 {
        let x = uniform_in(&mut r, f.domain());
        assert_eq!(a.evaluate(&x).unwrap(), f.value(&x).unwrap());
        assert_eq!(b.evaluate(&x).unwrap(), c.evaluate(&x).unwrap());
    }
    assert!(NoisyOracle::new(f, -1.0, rng(0)).is_err());
}

#[test]
fn prior_draws_have_kernel_covariance() {
    let spec = KernelSpec::isotropic(KernelFamily::matern(2.5).unwrap(), 2, 0.4).unwrap();
    let rows = vec![vec![0.1, 0.1], vec![0.3, 0.2], vec![0.9, 0.8]];
    let cands = unit_candidates(&rows, 2);
    let prior = PriorFactor::new(&spec, &cands).unwrap();
    let mut r = rng(55);
    let n = 20_000;
    let mut acc = [[0.0; 3]; 3];
    for _ in 0..n {
        let t = sample_prior_function_with(&prior, &cands, &mut r).unwrap();
        let v = t.values();
        for i in 0..3 {
            for j in 0..3 {
                acc[i][j] += v[i] * v[j];
            }
        }
    }
    for i in 0..3 {
        for j in 0..3 {
            let want = ref_kernel(&spec, &rows[i], &rows[j]);
            let got = acc[i][j] / n as f64;
            let tol = 5.0 * ((1.0 + want * want) / n as f64).sqrt();
            assert!((got - want).abs() < tol, "{i},{j}: {got} vs {want}");
        }
    }
}

#[test]
fn tabulated_objective_lookup() {
    let rows = vec![vec![0.0], vec![0.5], vec![1.0]];
    let cands = unit_candidates(&rows, 1);
    let table = TabulatedFunction::new(cands.clone(), vec![1.0, 3.0, 2.0]).unwrap();
    let f = ObjectiveSpec::tabulated("toy", table);
    assert_eq!(f.optimum(), Some(3.0));
    assert_eq!(f.value(&[0.5]).unwrap(), 3.0);
    assert!(matches!(f.value(&[0.25]), Err(Error::InvalidArgument(_))));
    assert!(TabulatedFunction::new(cands, vec![1.0]).is_err());
    let spec = KernelSpec::isotropic(KernelFamily::SquaredExponential, 1, 0.5).unwrap();
    let cands = unit_candidates(&rows, 1);
    let t = sample_prior_function(&spec, &cands, &mut rng(1)).unwrap();
    assert_eq!(t.values().len(), 3);
}

#[test]
fn halton_prefix_matches_radical_inverses() {
    assert_eq!(halton_point(1, 2), vec![0.5, 1.0 / 3.0]);
    assert_eq!(halton_point(2, 2), vec![0.25, 2.0 / 3.0]);
    let p = halton_point(5, 3);
    assert!((p[0] - 0.625).abs() < 1e-15);
    assert!((p[1] - 7.0 / 9.0).abs() < 1e-15);
    assert!((p[2] - 0.04).abs() < 1e-15);
}

/// Largest gap between the empirical and true mass over random anchored
/// boxes `[0, u)`.
fn box_discrepancy(pts: &[Vec<f64>], boxes: &[Vec<f64>]) -> f64 {
    boxes
        .iter()
        .map(|u| {
            let vol: f64 = u.iter().product();
            let inside = pts
                .iter()
                .filter(|p| p.iter().zip(u).all(|(a, b)| a < b))
                .count();
            (inside as f64 / pts.len() as f64 - vol).abs()
        })
        .fold(0.0, f64::max)
}

#[test]
fn halton_beats_uniform_on_box_discrepancy() {
    let dom = DomainBox::cube(6, 0.0, 1.0).unwrap();
    let mut r = rng(56);
    let boxes: Vec<Vec<f64>> = (0..3000).map(|_| (0..6).map(|_| r.random()).collect()).collect();
    let halton = make_candidates(&dom, 128, CandidateScheme::LowDiscrepancy, &mut r).unwrap();
    let hp: Vec<Vec<f64>> = halton.points().iter().map(<[f64]>::to_vec).collect();
    let dh = box_discrepancy(&hp, &boxes);
    let mut du = 0.0;
    for _ in 0..20 {
        let u = make_candidates(&dom, 128, CandidateScheme::Uniform, &mut r).unwrap();
        let up: Vec<Vec<f64>> = u.points().iter().map(<[f64]>::to_vec).collect();
        du += box_discrepancy(&up, &boxes) / 20.0;
    }
    assert!(dh < du, "halton {dh} vs uniform {du}");
}

#[test]
fn grid_candidates_include_corners_and_center() {
    let f = objective_by_id("ackley2").unwrap();
    let g = make_candidates(f.domain(), 2025, CandidateScheme::Grid, &mut rng(0)).unwrap();
    assert_eq!(g.len(), 2025);
    assert!(g.index_of(&[0.0, 0.0]).is_some());
    assert!(g.index_of(&[-5.0, 5.0]).is_some());
    let small = make_candidates(f.domain(), 10, CandidateScheme::Grid, &mut rng(0)).unwrap();
    assert_eq!(small.len(), 9);
    assert!(make_candidates(f.domain(), 3, CandidateScheme::Grid, &mut rng(0)).is_err());
    assert!(make_candidates(f.domain(), 10, CandidateScheme::Explicit, &mut rng(0)).is_err());
    let u = make_candidates(f.domain(), 500, CandidateScheme::Uniform, &mut rng(3)).unwrap();
    assert!(u.points().iter().all(|p| f.domain().contains(p)));
}

#[test]
fn initial_design_draws_distinct_candidates() {
    let f = Arc::new(objective_by_id("rosenbrock").unwrap());
    let cands = make_candidates(f.domain(), 50, CandidateScheme::LowDiscrepancy, &mut rng(0)).unwrap();
    let mut o = NoisyOracle::new(f.clone(), 0.0, rng(57)).unwrap();
    let data = initial_design(&mut o, &cands, 50, 1e-3, &mut rng(58)).unwrap();
    assert_eq!(data.len(), 50);
    assert_eq!(o.count(), 50);
    let mut idx: Vec<usize> = data.inputs().iter().map(|x| cands.index_of(x).unwrap()).collect();
    idx.sort();
    idx.dedup();
    assert_eq!(idx.len(), 50);
    for (x, y) in data.inputs().iter().zip(data.targets()) {
        assert_eq!(*y, f.value(x).unwrap());
    }
    assert_eq!(data.noise_std(), 1e-3);

    let empty = initial_design(&mut o, &cands, 0, 1e-3, &mut rng(58)).unwrap();
    assert!(empty.is_empty());
    assert!(matches!(
        initial_design(&mut o, &cands, 51, 1e-3, &mut rng(58)),
        Err(Error::InvalidArgument(_))
    ));
}
