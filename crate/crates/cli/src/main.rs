//! `tsrsr` command-line front end.
//!
//! Exit codes: 0 success, 1 invalid input (bad arguments, config or result
//! files), 2 numerical failure, 3 io failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use tsrsr::bench::{self, ExperimentConfig};
use tsrsr::diagnostics::{verify_max_ratio_lemma, verify_max_square_lemma, CovarianceMode, VarianceMode};
use tsrsr::{seeds, Error};

#[derive(Parser)]
#[command(name = "tsrsr", version, about = "Batch Bayesian optimization experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a config file, or replay a manifest.
    Run {
        path: PathBuf,
        /// Output directory, overriding out.dir.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Run (trial, algorithm) pairs one at a time.
        #[arg(long)]
        serial: bool,
    },
    /// Rank algorithms by mean best-so-far simple regret.
    Summarize {
        dir: PathBuf,
        /// Iteration to report (default: the last).
        #[arg(long = "at-iter")]
        at_iter: Option<usize>,
    },
    /// Write per-algorithm regret curves as curve_<algo>.csv.
    Plotdata {
        dir: PathBuf,
        /// Where to write the curves (default: the results directory).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Audit TS-RSR traces against the regret-to-sigma bound.
    VerifyTheory {
        dir: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
    },
    /// Monte-Carlo checks of the Gaussian maximum inequalities.
    CheckLemmas {
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 10_000)]
        draws: usize,
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        #[arg(long, value_enum, default_value_t = Cov::Random)]
        cov: Cov,
        /// Pairwise correlation for `--cov equicorrelated`.
        #[arg(long, default_value_t = 0.5)]
        rho: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Cov {
    Random,
    Independent,
    Equicorrelated,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidArgument(_) | Error::Parse { .. } => 1,
        Error::NumericalFailure { .. } | Error::DegeneratePosterior | Error::Internal(_) => 2,
        Error::Io { .. } => 3,
    }
}

fn run(cmd: Command) -> tsrsr::Result<()> {
    match cmd {
        Command::Run { path, out, serial } => {
            let mut cfg = if bench::is_manifest(&path) {
                bench::config_from_manifest(&path)?
            } else {
                ExperimentConfig::from_file(&path)?
            };
            if let Some(dir) = out {
                cfg.out_dir = dir;
            }
            if serial {
                cfg.parallel = false;
            }
            let res = bench::run_experiment(&cfg)?;
            println!(
                "{} result files in {} (manifest {}, config {})",
                res.files.len(),
                res.dir.display(),
                res.manifest.display(),
                cfg.hash()
            );
        }
        Command::Summarize { dir, at_iter } => {
            let recs = bench::load_results(&dir)?;
            print!("{}", bench::summarize(&recs, at_iter)?.to_csv());
        }
        Command::Plotdata { dir, out } => {
            let recs = bench::load_results(&dir)?;
            let target = out.unwrap_or_else(|| dir.clone());
            std::fs::create_dir_all(&target).map_err(|source| Error::Io {
                path: target.clone(),
                source,
            })?;
            for p in bench::emit_plotdata(&recs, &target)? {
                println!("{}", p.display());
            }
        }
        Command::VerifyTheory { dir, delta } => {
            let recs = bench::load_results(&dir)?;
            print!("{}", bench::verify_theory(&recs, delta)?.to_csv());
        }
        Command::CheckLemmas {
            d,
            draws,
            delta,
            cov,
            rho,
            seed,
        } => {
            let mode = match cov {
                Cov::Random => CovarianceMode::Random,
                Cov::Independent => CovarianceMode::Independent,
                Cov::Equicorrelated => CovarianceMode::Equicorrelated(rho),
            };
            let mut rng = seeds::stream(seed, 0, "lemmas");
            println!("lemma,d,draws,statistic,std_error,bound,pass");
            let frac = verify_max_ratio_lemma(d, delta, draws, mode, &mut rng)?;
            let se = (delta * (1.0 - delta) / draws as f64).sqrt();
            // Pass within three binomial standard errors of δ.
            println!(
                "max_ratio,{d},{draws},{frac:?},{se:?},{delta:?},{}",
                frac <= delta + 3.0 * se
            );
            if d >= 2 {
                let est = verify_max_square_lemma(d, draws, mode, VarianceMode::Fixed(1.0), &mut rng)?;
                println!(
                    "max_square,{d},{draws},{:?},{:?},{:?},{}",
                    est.mean,
                    est.std_error,
                    est.bound,
                    est.within(4.0)
                );
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
