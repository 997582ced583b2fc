//! Synthetic objectives, all in maximization form (standard minimization
//! test functions are negated).

use std::collections::HashMap;
use std::f64::consts::{E, PI};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gp::points::{point_key, CandidateSet, DomainBox};

/// Maximized optimum values, produced by `examples/compute_optima.rs`
/// (dense grid or multistart search plus local refinement) and checked by
/// `tests/testbed.rs`.
pub const BIRD_OPTIMUM: f64 = 106.764_536_749_264_75;
pub const HARTMANN6_OPTIMUM: f64 = 3.322_368_011_415_516;
pub const MICHALEWICZ10_OPTIMUM: f64 = 9.660_151_715_641_35;

const HARTMANN_ALPHA: [f64; 4] = [1.0, 1.2, 3.0, 3.2];
const HARTMANN_A: [[f64; 6]; 4] = [
    [10.0, 3.0, 17.0, 3.5, 1.7, 8.0],
    [0.05, 10.0, 17.0, 0.1, 8.0, 14.0],
    [3.0, 3.5, 1.7, 10.0, 17.0, 8.0],
    [17.0, 8.0, 0.05, 10.0, 0.1, 14.0],
];
const HARTMANN_P: [[f64; 6]; 4] = [
    [0.1312, 0.1696, 0.5569, 0.0124, 0.8283, 0.5886],
    [0.2329, 0.4135, 0.8307, 0.3736, 0.1004, 0.9991],
    [0.2348, 0.1451, 0.3522, 0.2883, 0.3047, 0.6650],
    [0.4047, 0.8828, 0.8732, 0.5743, 0.1091, 0.0381],
];

/// Closed-form test functions in their usual minimization form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosedForm {
    Ackley,
    Bird,
    Rosenbrock,
    Hartmann6,
    Griewank,
    Michalewicz,
}

impl ClosedForm {
    /// Minimization-form value.
    pub fn minimize_form(&self, x: &[f64]) -> f64 {
        match self {
            ClosedForm::Ackley => {
                let (a, b, c) = (20.0, 0.2, 2.0 * PI);
                let d = x.len() as f64;
                let sq = x.iter().map(|v| v * v).sum::<f64>() / d;
                let cs = x.iter().map(|v| (c * v).cos()).sum::<f64>() / d;
                -a * (-b * sq.sqrt()).exp() - cs.exp() + a + E
            }
            ClosedForm::Bird => {
                let (u, v) = (x[0], x[1]);
                u.sin() * (1.0 - v.cos()).powi(2).exp()
                    + v.cos() * (1.0 - u.sin()).powi(2).exp()
                    + (u - v).powi(2)
            }
            ClosedForm::Rosenbrock => x
                .windows(2)
                .map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (1.0 - w[0]).powi(2))
                .sum(),
            ClosedForm::Hartmann6 => {
                let mut s = 0.0;
                for i in 0..4 {
                    let inner: f64 = (0..6)
                        .map(|j| HARTMANN_A[i][j] * (x[j] - HARTMANN_P[i][j]).powi(2))
                        .sum();
                    s += HARTMANN_ALPHA[i] * (-inner).exp();
                }
                -s
            }
            ClosedForm::Griewank => {
                let sum: f64 = x.iter().map(|v| v * v).sum::<f64>() / 4000.0;
                let prod: f64 = x
                    .iter()
                    .enumerate()
                    .map(|(i, v)| (v / ((i + 1) as f64).sqrt()).cos())
                    .product();
                1.0 + sum - prod
            }
            ClosedForm::Michalewicz => {
                let steep = 10;
                -x.iter()
                    .enumerate()
                    .map(|(i, v)| {
                        v.sin() * ((i + 1) as f64 * v * v / PI).sin().powi(2 * steep)
                    })
                    .sum::<f64>()
            }
        }
    }
}

/// Function values tabulated on a candidate set (a joint GP-prior draw).
#[derive(Debug, Clone)]
pub struct TabulatedFunction {
    candidates: CandidateSet,
    values: Vec<f64>,
    lookup: HashMap<Vec<u64>, usize>,
}

impl TabulatedFunction {
    pub fn new(candidates: CandidateSet, values: Vec<f64>) -> Result<Self> {
        if candidates.len() != values.len() {
            return Err(Error::invalid("one value per candidate is required"));
        }
        let lookup = candidates
            .points()
            .iter()
            .enumerate()
            .map(|(i, p)| (point_key(p), i))
            .collect();
        Ok(TabulatedFunction {
            candidates,
            values,
            lookup,
        })
    }

    pub fn candidates(&self) -> &CandidateSet {
        &self.candidates
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn lookup(&self, x: &[f64]) -> Result<f64> {
        self.lookup
            .get(&point_key(x))
            .map(|&i| self.values[i])
            .ok_or_else(|| Error::invalid("tabulated function queried off its candidate set"))
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

#[derive(Debug, Clone)]
pub enum EvaluationRule {
    Closed(ClosedForm),
    Tabulated(Arc<TabulatedFunction>),
}

/// A named objective in maximization form on a box domain.
#[derive(Debug, Clone)]
pub struct ObjectiveSpec {
    name: String,
    domain: DomainBox,
    rule: EvaluationRule,
    optimum: Option<f64>,
}

impl ObjectiveSpec {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn domain(&self) -> &DomainBox {
        &self.domain
    }

    pub fn rule(&self) -> &EvaluationRule {
        &self.rule
    }

    /// Known maximized optimum value, where one exists.
    pub fn optimum(&self) -> Option<f64> {
        self.optimum
    }

    /// Noise-free value `f(x)` (maximization sense).
    pub fn value(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::invalid(format!(
                "objective {} expects dimension {}, got {}",
                self.name,
                self.dim(),
                x.len()
            )));
        }
        if !self.domain.contains(x) {
            return Err(Error::invalid(format!("point outside the domain of {}", self.name)));
        }
        match &self.rule {
            EvaluationRule::Closed(f) => Ok(-f.minimize_form(x)),
            EvaluationRule::Tabulated(t) => t.lookup(x),
        }
    }

    /// Wraps a tabulated function as an objective whose optimum is its
    /// largest tabulated value.
    pub fn tabulated(name: &str, table: TabulatedFunction) -> Self {
        ObjectiveSpec {
            name: name.to_string(),
            domain: table.candidates().domain().clone(),
            optimum: Some(table.max_value()),
            rule: EvaluationRule::Tabulated(Arc::new(table)),
        }
    }
}

/// Builds one of the closed-form roster objectives.
///
/// Supported `(name, d)`: ackley (2, 3), bird (2), rosenbrock (2),
/// hartmann (6), griewank (8), michalewicz (10).
pub fn make_objective(name: &str, d: usize) -> Result<ObjectiveSpec> {
    let (rule, domain, optimum, id) = match (name, d) {
        ("ackley", 2 | 3) => (
            ClosedForm::Ackley,
            DomainBox::cube(d, -5.0, 5.0)?,
            0.0,
            format!("ackley{d}"),
        ),
        ("bird", 2) => (
            ClosedForm::Bird,
            DomainBox::cube(2, -2.0 * PI, 2.0 * PI)?,
            BIRD_OPTIMUM,
            "bird".into(),
        ),
        ("rosenbrock", 2) => (
            ClosedForm::Rosenbrock,
            DomainBox::new(vec![-2.0, -1.0], vec![2.0, 3.0])?,
            0.0,
            "rosenbrock".into(),
        ),
        ("hartmann", 6) => (
            ClosedForm::Hartmann6,
            DomainBox::cube(6, 0.0, 1.0)?,
            HARTMANN6_OPTIMUM,
            "hartmann6".into(),
        ),
        ("griewank", 8) => (
            ClosedForm::Griewank,
            DomainBox::cube(8, -1.0, 4.0)?,
            0.0,
            "griewank8".into(),
        ),
        ("michalewicz", 10) => (
            ClosedForm::Michalewicz,
            DomainBox::cube(10, 0.0, PI)?,
            MICHALEWICZ10_OPTIMUM,
            "michalewicz10".into(),
        ),
        _ => {
            return Err(Error::invalid(format!(
                "unsupported objective ({name}, {d})"
            )))
        }
    };
    Ok(ObjectiveSpec {
        name: id,
        domain,
        rule: EvaluationRule::Closed(rule),
        optimum: Some(optimum),
    })
}

/// Closed-form objective by stable identifier (`ackley2`, `bird`, ...).
pub fn objective_by_id(id: &str) -> Result<ObjectiveSpec> {
    match id {
        "ackley2" => make_objective("ackley", 2),
        "ackley3" => make_objective("ackley", 3),
        "bird" => make_objective("bird", 2),
        "rosenbrock" => make_objective("rosenbrock", 2),
        "hartmann6" => make_objective("hartmann", 6),
        "griewank8" => make_objective("griewank", 8),
        "michalewicz10" => make_objective("michalewicz", 10),
        other => Err(Error::invalid(format!("unknown closed-form objective id {other:?}"))),
    }
}
