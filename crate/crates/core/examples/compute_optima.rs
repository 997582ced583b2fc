//! Recomputes the optimum constants stored in `testbed::objectives`.
//!
//! Bird: 1000×1000 grid, then compass-search refinement of the best cells.
//! Hartmann-6: multistart compass search from a Halton design.
//! Michalewicz-10: separable, so each coordinate is maximized in 1-d.
//!
//! Run with `cargo run --release --example compute_optima`.

use std::f64::consts::PI;

use tsrsr::testbed::{halton_point, make_objective, ObjectiveSpec};

/// Maximizes `f` from `x0` by compass search inside the domain box.
fn refine(f: &ObjectiveSpec, x0: &[f64], step0: f64) -> (Vec<f64>, f64) {
    let dom = f.domain();
    let mut x = x0.to_vec();
    let mut best = f.value(&x).unwrap();
    let mut step = step0;
    while step > 1e-14 {
        let mut improved = false;
        for a in 0..x.len() {
            for s in [step, -step] {
                let mut y = x.clone();
                y[a] = (y[a] + s).clamp(dom.lower()[a], dom.upper()[a]);
                let v = f.value(&y).unwrap();
                if v > best {
                    best = v;
                    x = y;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (x, best)
}

fn bird() {
    let f = make_objective("bird", 2).unwrap();
    let n = 1000;
    let (lo, hi) = (-2.0 * PI, 2.0 * PI);
    let mut cells: Vec<(f64, [f64; 2])> = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let x = [
                lo + (hi - lo) * i as f64 / (n - 1) as f64,
                lo + (hi - lo) * j as f64 / (n - 1) as f64,
            ];
            cells.push((f.value(&x).unwrap(), x));
        }
    }
    cells.sort_by(|a, b| b.0.total_cmp(&a.0));
    let h = (hi - lo) / (n - 1) as f64;
    let best = cells[..20]
        .iter()
        .map(|(_, x)| refine(&f, x, h))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    println!("bird        {:.17} at {:?}", best.1, best.0);
}

fn hartmann() {
    let f = make_objective("hartmann", 6).unwrap();
    let best = (1..=2000u64)
        .map(|i| refine(&f, &halton_point(i, 6), 0.05))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    println!("hartmann6   {:.17} at {:?}", best.1, best.0);
}

fn michalewicz() {
    let mut total = 0.0;
    let mut argmax = Vec::new();
    for i in 1..=10 {
        let g = |v: f64| v.sin() * (i as f64 * v * v / PI).sin().powi(20);
        let n = 200_000;
        let (mut bx, mut bv) = (0.0, f64::NEG_INFINITY);
        for k in 0..=n {
            let v = PI * k as f64 / n as f64;
            if g(v) > bv {
                bv = g(v);
                bx = v;
            }
        }
        let mut step = PI / n as f64;
        while step > 1e-15 {
            let mut moved = false;
            for s in [step, -step] {
                let v = (bx + s).clamp(0.0, PI);
                if g(v) > bv {
                    bv = g(v);
                    bx = v;
                    moved = true;
                }
            }
            if !moved {
                step *= 0.5;
            }
        }
        total += bv;
        argmax.push(bx);
    }
    let f = make_objective("michalewicz", 10).unwrap();
    println!(
        "michalewicz {:.17} (direct {:.17}) at {:?}",
        total,
        f.value(&argmax).unwrap(),
        argmax
    );
}

fn main() {
    bird();
    hartmann();
    michalewicz();
}
