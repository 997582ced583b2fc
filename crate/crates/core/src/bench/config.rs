use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use toml::{Table, Value};

use crate::acquisition::{AcquisitionConfig, Strategy};
use crate::error::{Error, Result};
use crate::gp::kernel::{KernelFamily, KernelSpec};
use crate::gp::points::{CandidateScheme, DomainBox};
use crate::testbed::{objective_by_id, ObjectiveSpec};

/// Objective identifiers accepted by `objective.name`.
pub const OBJECTIVE_IDS: [&str; 9] = [
    "ackley2",
    "ackley3",
    "bird",
    "rosenbrock",
    "hartmann6",
    "griewank8",
    "michalewicz10",
    "gp-prior-2d",
    "gp-prior-3d",
];

/// Functions drawn from a GP prior: `(id, lengthscale, domain low, high, d)`.
const PRIOR_OBJECTIVES: [(&str, f64, f64, f64, usize); 2] = [
    ("gp-prior-2d", 0.25, -5.0, 5.0, 2),
    ("gp-prior-3d", 0.15, 0.0, 1.0, 3),
];

/// Keys left out of the configuration hash: they change where and how a run
/// executes, not what it computes.
const UNHASHED: [&str; 2] = ["out.dir", "run.parallel"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelChoice {
    Matern,
    SquaredExponential,
}

/// A fully resolved experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub objective: String,
    pub kernel: KernelChoice,
    pub nu: f64,
    pub lengthscale: f64,
    pub signal_variance: f64,
    /// Observation noise σ_n, used by both the oracle and the model.
    pub noise: f64,
    /// Fit the model to standardized targets.
    pub standardize: bool,
    pub scheme: CandidateScheme,
    /// Requested candidate count (a grid may round it down).
    pub candidates: usize,
    pub m: usize,
    pub iterations: usize,
    pub n_init: usize,
    /// Max-variance warm-up iterations before the main loop.
    pub t_init: usize,
    pub trials: usize,
    pub seed: u64,
    pub parallel: bool,
    pub algos: Vec<Strategy>,
    pub resample_cap: usize,
    pub beta_delta: f64,
    pub beta: Option<f64>,
    pub temperature: f64,
    pub theory_delta: f64,
    pub rho_subsets: usize,
    pub out_dir: PathBuf,
}

impl ExperimentConfig {
    /// Defaults for `objective`.
    pub fn for_objective(objective: &str) -> Result<Self> {
        if !OBJECTIVE_IDS.contains(&objective) {
            return Err(Error::invalid(format!("unknown objective {objective:?}")));
        }
        let d = objective_dim(objective)?;
        let (kernel, lengthscale) = match prior_params(objective) {
            Some((l, ..)) => (KernelChoice::SquaredExponential, l),
            None => (KernelChoice::Matern, std::f64::consts::LN_2),
        };
        Ok(ExperimentConfig {
            objective: objective.to_string(),
            kernel,
            nu: 1.5,
            lengthscale,
            signal_variance: 1.0,
            noise: 1e-3,
            standardize: true,
            scheme: CandidateScheme::LowDiscrepancy,
            candidates: 1000 * d,
            m: 5,
            iterations: 50,
            n_init: 15,
            t_init: 0,
            trials: 10,
            seed: 0,
            parallel: true,
            algos: vec![
                Strategy::TsRsr,
                Strategy::Ts,
                Strategy::Bucb,
                Strategy::Ucbpe,
                Strategy::Qei,
                Strategy::Sp,
            ],
            resample_cap: 10,
            beta_delta: 0.1,
            beta: None,
            temperature: 1.0,
            theory_delta: 0.05,
            rho_subsets: 500,
            out_dir: PathBuf::from("results"),
        })
    }

    pub fn dim(&self) -> usize {
        objective_dim(&self.objective).expect("validated objective")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::invalid(msg));
        if self.m == 0 || self.iterations == 0 || self.trials == 0 {
            return bad("run.m, run.T and run.trials must be at least 1".into());
        }
        if self.algos.is_empty() {
            return bad("algos must name at least one strategy".into());
        }
        if self.algos.contains(&Strategy::MaxVar) {
            return bad("maxvar is the warm-up rule; set run.t_init instead".into());
        }
        let mut sorted = self.algos.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != self.algos.len() {
            return bad("algos contains duplicates".into());
        }
        if !(self.noise > 0.0 && self.noise.is_finite()) {
            return bad("gp.noise must be positive".into());
        }
        if self.candidates < 2 {
            return bad("candidates.count must be at least 2".into());
        }
        if self.n_init > self.candidates {
            return bad("run.n_init exceeds candidates.count".into());
        }
        if self.scheme == CandidateScheme::Explicit {
            return bad("candidates.scheme must be grid, uniform or low-discrepancy".into());
        }
        if !(self.theory_delta > 0.0 && self.theory_delta < 1.0) {
            return bad("theory.delta must lie in (0, 1)".into());
        }
        self.kernel_spec()?;
        for s in &self.algos {
            self.acquisition(*s).validate()?;
        }
        Ok(())
    }

    pub fn kernel_spec(&self) -> Result<KernelSpec> {
        let family = match self.kernel {
            KernelChoice::Matern => KernelFamily::matern(self.nu)?,
            KernelChoice::SquaredExponential => KernelFamily::SquaredExponential,
        };
        KernelSpec::new(family, vec![self.lengthscale; self.dim()], self.signal_variance)
    }

    pub fn acquisition(&self, strategy: Strategy) -> AcquisitionConfig {
        AcquisitionConfig {
            resample_cap: self.resample_cap,
            delta: self.beta_delta,
            beta: self.beta,
            temperature: self.temperature,
            ..AcquisitionConfig::new(strategy)
        }
    }

    /// Closed-form objective, or `None` for GP-prior objectives.
    pub fn closed_objective(&self) -> Result<Option<ObjectiveSpec>> {
        if prior_params(&self.objective).is_some() {
            Ok(None)
        } else {
            objective_by_id(&self.objective).map(Some)
        }
    }

    /// Domain box of the objective.
    pub fn domain(&self) -> Result<DomainBox> {
        match prior_params(&self.objective) {
            Some((_, lo, hi, d)) => DomainBox::cube(d, lo, hi),
            None => Ok(objective_by_id(&self.objective)?.domain().clone()),
        }
    }

    /// Kernel of the GP prior that generates tabulated objectives.
    pub fn prior_kernel(&self) -> Result<Option<KernelSpec>> {
        prior_params(&self.objective)
            .map(|(l, _, _, d)| KernelSpec::isotropic(KernelFamily::SquaredExponential, d, l))
            .transpose()
    }

    /// Resolved settings as sorted `key = value` pairs with values in TOML
    /// syntax. The text form parses back into the same configuration.
    pub fn canonical_pairs(&self) -> BTreeMap<String, String> {
        let mut p = BTreeMap::new();
        let s = |v: &str| Value::String(v.to_string()).to_string();
        let f = |v: f64| format!("{v:?}");
        p.insert("objective.name".into(), s(&self.objective));
        p.insert(
            "gp.kernel".into(),
            s(match self.kernel {
                KernelChoice::Matern => "matern",
                KernelChoice::SquaredExponential => "se",
            }),
        );
        p.insert("gp.nu".into(), f(self.nu));
        p.insert("gp.lengthscale".into(), f(self.lengthscale));
        p.insert("gp.signal_variance".into(), f(self.signal_variance));
        p.insert("gp.noise".into(), f(self.noise));
        p.insert("gp.standardize".into(), self.standardize.to_string());
        p.insert("candidates.scheme".into(), s(self.scheme.as_str()));
        p.insert("candidates.count".into(), self.candidates.to_string());
        p.insert("run.m".into(), self.m.to_string());
        p.insert("run.T".into(), self.iterations.to_string());
        p.insert("run.n_init".into(), self.n_init.to_string());
        p.insert("run.t_init".into(), self.t_init.to_string());
        p.insert("run.trials".into(), self.trials.to_string());
        p.insert("run.seed".into(), self.seed.to_string());
        p.insert("run.parallel".into(), self.parallel.to_string());
        let ids: Vec<Value> = self.algos.iter().map(|a| Value::String(a.id().into())).collect();
        p.insert("algos".into(), Value::Array(ids).to_string());
        p.insert("acq.resample_cap".into(), self.resample_cap.to_string());
        p.insert("acq.delta".into(), f(self.beta_delta));
        if let Some(b) = self.beta {
            p.insert("acq.beta".into(), f(b));
        }
        p.insert("acq.temperature".into(), f(self.temperature));
        p.insert("theory.delta".into(), f(self.theory_delta));
        p.insert("theory.rho_subsets".into(), self.rho_subsets.to_string());
        p.insert(
            "out.dir".into(),
            s(&self.out_dir.to_string_lossy()),
        );
        p
    }

    pub fn canonical_text(&self) -> String {
        self.canonical_pairs()
            .into_iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }

    /// SHA-256 of the canonical text without the execution-only keys.
    pub fn hash(&self) -> String {
        let text: String = self
            .canonical_pairs()
            .into_iter()
            .filter(|(k, _)| !UNHASHED.contains(&k.as_str()))
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect();
        hex::encode(Sha256::digest(text.as_bytes()))
    }

    pub fn from_toml_str(text: &str, origin: &Path) -> Result<Self> {
        let table: Table = text.parse().map_err(|e: toml::de::Error| Error::Parse {
            path: origin.to_path_buf(),
            message: e.message().to_string(),
        })?;
        let mut flat = BTreeMap::new();
        flatten("", &table, &mut flat);
        Self::from_flat(flat).map_err(|e| match e {
            Error::InvalidArgument(message) => Error::Parse {
                path: origin.to_path_buf(),
                message,
            },
            other => other,
        })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text, path)
    }

    fn from_flat(mut flat: BTreeMap<String, Value>) -> Result<Self> {
        let name = match flat.remove("objective.name") {
            Some(Value::String(s)) => s,
            Some(_) => return Err(Error::invalid("objective.name must be a string")),
            None => return Err(Error::invalid("objective.name is required")),
        };
        let mut c = Self::for_objective(&name)?;
        let mut take = |k: &str| flat.remove(k);
        if let Some(v) = take("gp.kernel") {
            c.kernel = match as_str(&v, "gp.kernel")?.as_str() {
                "matern" => KernelChoice::Matern,
                "se" | "rbf" => KernelChoice::SquaredExponential,
                other => return Err(Error::invalid(format!("unknown gp.kernel {other:?}"))),
            };
        }
        set_f64(&mut c.nu, take("gp.nu"), "gp.nu")?;
        set_f64(&mut c.lengthscale, take("gp.lengthscale"), "gp.lengthscale")?;
        set_f64(&mut c.signal_variance, take("gp.signal_variance"), "gp.signal_variance")?;
        set_f64(&mut c.noise, take("gp.noise"), "gp.noise")?;
        set_bool(&mut c.standardize, take("gp.standardize"), "gp.standardize")?;
        if let Some(v) = take("candidates.scheme") {
            c.scheme = match as_str(&v, "candidates.scheme")?.as_str() {
                "grid" => CandidateScheme::Grid,
                "uniform" => CandidateScheme::Uniform,
                "low-discrepancy" => CandidateScheme::LowDiscrepancy,
                other => return Err(Error::invalid(format!("unknown candidates.scheme {other:?}"))),
            };
        }
        set_usize(&mut c.candidates, take("candidates.count"), "candidates.count")?;
        set_usize(&mut c.m, take("run.m"), "run.m")?;
        set_usize(&mut c.iterations, take("run.T"), "run.T")?;
        set_usize(&mut c.n_init, take("run.n_init"), "run.n_init")?;
        set_usize(&mut c.t_init, take("run.t_init"), "run.t_init")?;
        set_usize(&mut c.trials, take("run.trials"), "run.trials")?;
        if let Some(v) = take("run.seed") {
            c.seed = match v {
                Value::Integer(i) if i >= 0 => i as u64,
                _ => return Err(Error::invalid("run.seed must be a nonnegative integer")),
            };
        }
        set_bool(&mut c.parallel, take("run.parallel"), "run.parallel")?;
        if let Some(v) = take("algos") {
            let Value::Array(items) = v else {
                return Err(Error::invalid("algos must be an array of strategy ids"));
            };
            c.algos = items
                .iter()
                .map(|i| as_str(i, "algos")?.parse())
                .collect::<Result<_>>()?;
        }
        set_usize(&mut c.resample_cap, take("acq.resample_cap"), "acq.resample_cap")?;
        set_f64(&mut c.beta_delta, take("acq.delta"), "acq.delta")?;
        if let Some(v) = take("acq.beta") {
            c.beta = Some(as_f64(&v, "acq.beta")?);
        }
        set_f64(&mut c.temperature, take("acq.temperature"), "acq.temperature")?;
        set_f64(&mut c.theory_delta, take("theory.delta"), "theory.delta")?;
        set_usize(&mut c.rho_subsets, take("theory.rho_subsets"), "theory.rho_subsets")?;
        if let Some(v) = take("out.dir") {
            c.out_dir = PathBuf::from(as_str(&v, "out.dir")?);
        }
        if let Some(k) = flat.keys().next() {
            return Err(Error::invalid(format!("unknown configuration key {k:?}")));
        }
        c.validate()?;
        Ok(c)
    }
}

fn prior_params(objective: &str) -> Option<(f64, f64, f64, usize)> {
    PRIOR_OBJECTIVES
        .iter()
        .find(|p| p.0 == objective)
        .map(|&(_, l, lo, hi, d)| (l, lo, hi, d))
}

fn objective_dim(objective: &str) -> Result<usize> {
    match prior_params(objective) {
        Some((.., d)) => Ok(d),
        None => Ok(objective_by_id(objective)?.dim()),
    }
}

fn flatten(prefix: &str, table: &Table, out: &mut BTreeMap<String, Value>) {
    for (k, v) in table {
        let key = if prefix.is_empty() {
            k.clone()
        } else {
            format!("{prefix}.{k}")
        };
        match v {
            Value::Table(t) => flatten(&key, t, out),
            other => {
                out.insert(key, other.clone());
            }
        }
    }
}

fn as_str(v: &Value, key: &str) -> Result<String> {
    v.as_str()
        .map(str::to_string)
        .ok_or_else(|| Error::invalid(format!("{key} must be a string")))
}

fn as_f64(v: &Value, key: &str) -> Result<f64> {
    match v {
        Value::Float(f) => Ok(*f),
        Value::Integer(i) => Ok(*i as f64),
        _ => Err(Error::invalid(format!("{key} must be a number"))),
    }
}

fn set_f64(slot: &mut f64, v: Option<Value>, key: &str) -> Result<()> {
    if let Some(v) = v {
        *slot = as_f64(&v, key)?;
    }
    Ok(())
}

fn set_usize(slot: &mut usize, v: Option<Value>, key: &str) -> Result<()> {
    match v {
        None => Ok(()),
        Some(Value::Integer(i)) if i >= 0 => {
            *slot = i as usize;
            Ok(())
        }
        Some(_) => Err(Error::invalid(format!("{key} must be a nonnegative integer"))),
    }
}

fn set_bool(slot: &mut bool, v: Option<Value>, key: &str) -> Result<()> {
    match v {
        None => Ok(()),
        Some(Value::Boolean(b)) => {
            *slot = b;
            Ok(())
        }
        Some(_) => Err(Error::invalid(format!("{key} must be true or false"))),
    }
}
