use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Parser)]
#[command(name = "stiefel-mcmc", version, about = "Simulation and Gibbs estimation for Stiefel-manifold models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Simulate a low-rank matrix plus Gaussian noise.
    SvdSim(SvdSimArgs),
    /// Fit the model-based SVD by Gibbs sampling.
    SvdFit(SvdFitArgs),
    /// Fit the probit eigenmodel to a symmetric binary network.
    EigenFit(EigenFitArgs),
    /// Re-run the configuration recorded in a manifest.json.
    Replay(ReplayArgs),
}

/// A runnable configuration, as recorded in a run manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum RunConfig {
    SvdSim(SvdSimArgs),
    SvdFit(SvdFitArgs),
    EigenFit(EigenFitArgs),
}

impl RunConfig {
    pub fn seed(&self) -> u64 {
        match self {
            RunConfig::SvdSim(a) => a.seed,
            RunConfig::SvdFit(a) => a.seed,
            RunConfig::EigenFit(a) => a.seed,
        }
    }

    pub fn out_dir(&self) -> &PathBuf {
        match self {
            RunConfig::SvdSim(a) => &a.out_dir,
            RunConfig::SvdFit(a) => &a.out_dir,
            RunConfig::EigenFit(a) => &a.out_dir,
        }
    }

    pub fn set_out_dir(&mut self, dir: PathBuf) {
        match self {
            RunConfig::SvdSim(a) => a.out_dir = dir,
            RunConfig::SvdFit(a) => a.out_dir = dir,
            RunConfig::EigenFit(a) => a.out_dir = dir,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SvdSimArgs {
    /// Number of rows.
    #[arg(long, default_value_t = 60)]
    pub m: usize,
    /// Number of columns.
    #[arg(long, default_value_t = 40)]
    pub n: usize,
    /// Rank of the simulated mean matrix.
    #[arg(long, default_value_t = 4)]
    pub rank_true: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SvdFitArgs {
    /// Data matrix CSV (numeric, no missing values).
    #[arg(long)]
    pub input: PathBuf,
    /// True mean matrix CSV; enables summary.csv.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Number of factors fitted.
    #[arg(long, default_value_t = 6)]
    pub rank: usize,
    #[arg(long, default_value_t = 2500)]
    pub iters: usize,
    /// Save every thin-th iteration; there is no burn-in.
    #[arg(long, default_value_t = 5)]
    pub thin: usize,
    /// Prior sample size for the noise precision.
    #[arg(long, default_value_t = 1.0)]
    pub nu0: f64,
    /// Prior guess of the noise variance.
    #[arg(long, default_value_t = 1.0)]
    pub s20: f64,
    /// Prior sample size for the singular-value precision.
    #[arg(long, default_value_t = 1.0)]
    pub eta0: f64,
    /// Prior guess of the singular-value variance.
    #[arg(long, default_value_t = 1.0)]
    pub t20: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Independent chains, run in parallel into chain_<k> subdirectories.
    #[arg(long, default_value_t = 1)]
    pub chains: usize,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct EigenFitArgs {
    /// Adjacency CSV with entries 0, 1 or NA; the diagonal is ignored.
    #[arg(long)]
    pub input: PathBuf,
    /// Binary node covariates CSV, one row per node, copied into positions.csv.
    #[arg(long)]
    pub covariates: Option<PathBuf>,
    /// Latent dimension.
    #[arg(long, default_value_t = 2)]
    pub rank: usize,
    #[arg(long, default_value_t = 10_000)]
    pub iters: usize,
    #[arg(long, default_value_t = 100)]
    pub burn: usize,
    /// Save every thin-th iteration after burn-in. The default of 10 is this
    /// tool's choice; the reference analysis leaves the interval unspecified.
    #[arg(long, default_value_t = 10)]
    pub thin: usize,
    /// Prior variance of the eigenvalues [default: number of nodes].
    #[arg(long)]
    pub t2_lambda: Option<f64>,
    /// Prior variance of the intercept.
    #[arg(long, default_value_t = 100.0)]
    pub t2_theta: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Independent chains, run in parallel into chain_<k> subdirectories.
    #[arg(long, default_value_t = 1)]
    pub chains: usize,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct ReplayArgs {
    /// manifest.json written by a previous run.
    #[arg(long)]
    pub manifest: PathBuf,
    /// Write outputs here instead of the recorded directory.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

fn positive(name: &str, v: usize) -> Result<()> {
    if v == 0 {
        return Err(CliError::Validation(format!("--{name} must be positive")));
    }
    Ok(())
}

impl SvdSimArgs {
    pub fn validate(&self) -> Result<()> {
        positive("m", self.m)?;
        positive("n", self.n)?;
        positive("rank-true", self.rank_true)?;
        if self.rank_true > self.m.min(self.n) {
            return Err(CliError::Validation(format!(
                "--rank-true {} exceeds min(m, n) = {}",
                self.rank_true,
                self.m.min(self.n)
            )));
        }
        Ok(())
    }
}

impl SvdFitArgs {
    pub fn validate(&self) -> Result<()> {
        positive("rank", self.rank)?;
        positive("iters", self.iters)?;
        positive("thin", self.thin)?;
        positive("chains", self.chains)?;
        if self.thin > self.iters {
            return Err(CliError::Validation(format!("--thin {} exceeds --iters {}", self.thin, self.iters)));
        }
        Ok(())
    }
}

impl EigenFitArgs {
    pub fn validate(&self) -> Result<()> {
        positive("rank", self.rank)?;
        positive("iters", self.iters)?;
        positive("thin", self.thin)?;
        positive("chains", self.chains)?;
        if self.burn >= self.iters {
            return Err(CliError::Validation(format!("--burn {} must be below --iters {}", self.burn, self.iters)));
        }
        if !(self.burn + 1..=self.iters).any(|s| s % self.thin == 0) {
            return Err(CliError::Validation("no iteration is saved with these --iters/--burn/--thin".into()));
        }
        Ok(())
    }
}
