mod common;

use common::*;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;
use tsrsr::gp::*;

#[test]
fn posterior_matches_dense_inverse() {
    let mut r = rng(11);
    for _ in 0..60 {
        let inst = Instance::random(&mut r, 20, 6);
        let post = fit_posterior(&inst.dataset(), &inst.spec).unwrap();
        for x in random_points(&mut r, 4, inst.d) {
            let (m, v) = posterior_mean_var(&post, &x).unwrap();
            let (mo, vo) = dense_posterior(&inst.spec, &inst.inputs, &inst.y, inst.noise, &x);
            assert!((m - mo).abs() < 1e-8, "mean {m} vs {mo}");
            assert!((v - vo.max(0.0)).abs() < 1e-8, "var {v} vs {vo}");
        }
    }
}

#[test]
fn fantasy_matches_block_inverse() {
    let mut r = rng(12);
    for _ in 0..40 {
        let inst = Instance::random(&mut r, 12, 4);
        let post = fit_posterior(&inst.dataset(), &inst.spec).unwrap();
        let pending = random_points(&mut r, 2, inst.d);
        let f = FantasyState::with_pending(&post, &to_points(&pending, inst.d)).unwrap();
        for x in random_points(&mut r, 3, inst.d) {
            let s = conditional_sigma(&f, &x).unwrap();
            let v = block_variance(&inst.spec, &inst.inputs, &pending, inst.noise, &x);
            assert!((s * s - v.max(0.0)).abs() < 1e-8);
        }
    }
}

#[test]
fn sequential_extension_equals_batch_rebuild() {
    let mut r = rng(13);
    for _ in 0..30 {
        let inst = Instance::random(&mut r, 10, 3);
        let post = fit_posterior(&inst.dataset(), &inst.spec).unwrap();
        let pending = random_points(&mut r, 5, inst.d);
        let mut f = FantasyState::new(&post);
        for p in &pending {
            f = extend_fantasy(&f, p).unwrap();
        }
        let batch = FantasyState::with_pending(&post, &to_points(&pending, inst.d)).unwrap();
        for x in random_points(&mut r, 3, inst.d).iter().chain(&pending) {
            let a = f.conditional_variance(x).unwrap();
            let b = batch.conditional_variance(x).unwrap();
            assert!((a - b).abs() <= 1e-6 * b.abs().max(1e-12) + 1e-12, "{a} vs {b}");
        }
    }
}

#[test]
fn candidate_fantasy_matches_block_inverse() {
    let mut r = rng(14);
    for _ in 0..20 {
        let inst = Instance::random(&mut r, 10, 3);
        let post = fit_posterior(&inst.dataset(), &inst.spec).unwrap();
        let rows = random_points(&mut r, 25, inst.d);
        let cands = unit_candidates(&rows, inst.d);
        let pred = post.predict(&cands).unwrap();
        let mut cf = CandidateFantasy::new(&post, &cands, &pred);
        let mut pending = Vec::new();
        for _ in 0..4 {
            let j = r.random_range(0..rows.len());
            cf.condition_on(j).unwrap();
            pending.push(rows[j].clone());
            for (k, x) in rows.iter().enumerate() {
                let v = block_variance(&inst.spec, &inst.inputs, &pending, inst.noise, x);
                assert!((cf.variance(k) - v.max(0.0)).abs() < 1e-8);
            }
        }
    }
}

#[test]
fn thompson_argmax_frequencies_match_independent_sampler() {
    let spec = KernelSpec::isotropic(KernelFamily::SquaredExponential, 1, 0.4).unwrap();
    let data = Dataset::new(to_points(&[vec![0.1], vec![0.9]], 1), vec![0.2, 0.5], 0.3).unwrap();
    let post = fit_posterior(&data, &spec).unwrap();
    let rows = vec![vec![0.0], vec![0.5], vec![1.0]];
    let cands = unit_candidates(&rows, 1);
    let n = 10_000;

    let mut r = rng(21);
    let mut lib = [0usize; 3];
    for _ in 0..n {
        let (_, x) = sample_max(&post, &cands, &mut r).unwrap();
        lib[cands.index_of(&x).unwrap()] += 1;
    }

    // Oracle: dense posterior moments and an eigen-decomposition sampler.
    let mut mean = [0.0; 3];
    let mut cov = DMatrix::zeros(3, 3);
    for i in 0..3 {
        mean[i] = dense_posterior(&spec, &[vec![0.1], vec![0.9]], &[0.2, 0.5], 0.3, &rows[i]).0;
        for j in 0..3 {
            let ab = [vec![0.1], vec![0.9]];
            let n2 = ab.len();
            let k = ref_gram(&spec, &ab) + DMatrix::identity(n2, n2) * 0.09;
            let kinv = k.try_inverse().unwrap();
            let ki = nalgebra::DVector::from_iterator(2, ab.iter().map(|p| ref_kernel(&spec, p, &rows[i])));
            let kj = nalgebra::DVector::from_iterator(2, ab.iter().map(|p| ref_kernel(&spec, p, &rows[j])));
            cov[(i, j)] = ref_kernel(&spec, &rows[i], &rows[j]) - (ki.transpose() * &kinv * kj)[0];
        }
    }
    let a = eigen_sampler(&cov);
    let mut r2 = rng(99);
    let mut oracle = [0usize; 3];
    for _ in 0..n {
        let z = nalgebra::DVector::from_iterator(3, (0..3).map(|_| r2.sample(rand_distr::StandardNormal)));
        let f = &a * z;
        let vals: Vec<f64> = (0..3).map(|i| f[i] + mean[i]).collect();
        oracle[argmax(&vals).unwrap()] += 1;
    }
    for i in 0..3 {
        let p = lib[i] as f64 / n as f64;
        let q = oracle[i] as f64 / n as f64;
        assert!((p - q).abs() < 0.02, "candidate {i}: {p} vs {q}");
    }
}

#[test]
fn pathwise_and_direct_draws_share_moments() {
    let spec = KernelSpec::isotropic(KernelFamily::matern(1.5).unwrap(), 2, 0.5).unwrap();
    let mut r = rng(5);
    let rows = random_points(&mut r, 12, 2);
    let cands = unit_candidates(&rows, 2);
    let mut data = Dataset::empty(2, 0.1).unwrap();
    for j in [0, 3, 7] {
        data.push(&rows[j], r.random::<f64>()).unwrap();
    }
    let post = fit_posterior(&data, &spec).unwrap();
    let pred = post.predict(&cands).unwrap();
    let prior = PriorFactor::new(&spec, &cands).unwrap();
    let path = JointSampler::pathwise(&post, &pred, &prior).unwrap();
    assert!(path.is_pathwise());
    let cov = post.joint_covariance(&cands, &pred);

    let n = 20_000;
    let mut sum = [0.0; 12];
    let mut sq = DMatrix::<f64>::zeros(12, 12);
    for _ in 0..n {
        let f = path.draw(&mut r);
        for i in 0..12 {
            sum[i] += f[i];
            for j in 0..12 {
                sq[(i, j)] += (f[i] - pred.mean[i]) * (f[j] - pred.mean[j]);
            }
        }
    }
    for i in 0..12 {
        let m = sum[i] / n as f64;
        let se = (cov[(i, i)] / n as f64).sqrt();
        assert!((m - pred.mean[i]).abs() < 5.0 * se + 1e-9, "mean {i}");
        for j in 0..12 {
            let c = sq[(i, j)] / n as f64;
            let tol = 5.0 * ((cov[(i, i)] * cov[(j, j)] + cov[(i, j)].powi(2)) / n as f64).sqrt();
            assert!((c - cov[(i, j)]).abs() < tol + 1e-9, "cov {i},{j}: {c} vs {}", cov[(i, j)]);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn conditioning_never_increases_variance(seed in any::<u64>(), k in 1usize..6) {
        let mut r = rng(seed);
        let inst = Instance::random(&mut r, 8, 3);
        let post = fit_posterior(&inst.dataset(), &inst.spec).unwrap();
        let x = random_points(&mut r, 1, inst.d).pop().unwrap();
        let mut f = FantasyState::new(&post);
        let mut prev = post.mean_var(&x).unwrap().1;
        for p in random_points(&mut r, k, inst.d) {
            f = f.extend(&p).unwrap();
            let v = f.conditional_variance(&x).unwrap();
            prop_assert!(v >= 0.0);
            prop_assert!(v <= prev + 1e-12);
            prev = v;
        }
    }

    #[test]
    fn posterior_variance_is_bounded_by_prior(seed in any::<u64>()) {
        let mut r = rng(seed);
        let inst = Instance::random(&mut r, 15, 4);
        let post = fit_posterior(&inst.dataset(), &inst.spec).unwrap();
        for x in random_points(&mut r, 5, inst.d) {
            let (_, v) = post.mean_var(&x).unwrap();
            prop_assert!(v >= 0.0 && v <= inst.spec.signal_variance() + 1e-12);
        }
    }
}
