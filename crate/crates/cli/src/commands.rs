use std::fs;
use std::path::{Path, PathBuf};
use std::thread;

use log::info;
use nalgebra::DMatrix;
use stiefel_core::eigenmodel::{
    latent_positions, run_eigenmodel_gibbs, EigenChainConfig, EigenHyperParams, NodeCovariates, SymmetricBinaryNetwork,
};
use stiefel_core::linalg::mean_squared_error;
use stiefel_core::rng::stream;
use stiefel_core::svd::{mle_mean, rank_r_approximation, run_svd_gibbs, simulate_dataset, DataMatrix, SvdHyperParams};

use crate::config::{EigenFitArgs, RunConfig, SvdFitArgs, SvdSimArgs};
use crate::error::{CliError, Result};
use crate::io::{format_binary, parse_adjacency, parse_covariates, read_matrix, write_matrix, write_rows};
use crate::manifest::Manifest;

/// Validates and runs a configuration, then records it in `manifest.json`.
pub fn run(config: &RunConfig) -> Result<()> {
    match config {
        RunConfig::SvdSim(a) => svd_sim(a)?,
        RunConfig::SvdFit(a) => {
            svd_fit(a)?;
        }
        RunConfig::EigenFit(a) => {
            eigen_fit(a)?;
        }
    }
    Manifest::for_config(config).write(&config.out_dir().join("manifest.json"))
}

/// Re-runs the configuration stored in a manifest, optionally elsewhere.
pub fn replay(manifest: &Path, out_dir: Option<PathBuf>) -> Result<()> {
    let mut config = Manifest::read(manifest)?.config;
    if let Some(dir) = out_dir {
        config.set_out_dir(dir);
    }
    run(&config)
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

fn chain_dir(out: &Path, chains: usize, k: usize) -> PathBuf {
    if chains == 1 {
        out.to_path_buf()
    } else {
        out.join(format!("chain_{k}"))
    }
}

/// Runs `chains` independent jobs on separate threads; job `k` is 1-based.
fn run_chains<T, F>(chains: usize, job: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync,
{
    if chains == 1 {
        return Ok(vec![job(1)?]);
    }
    thread::scope(|scope| {
        let handles: Vec<_> = (1..=chains)
            .map(|k| {
                let job = &job;
                scope.spawn(move || job(k))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("chain thread panicked")).collect()
    })
}

fn input_exists(path: &Path) -> Result<()> {
    fs::metadata(path).map(|_| ()).map_err(|e| CliError::io(path, e))
}

pub fn svd_sim(args: &SvdSimArgs) -> Result<()> {
    args.validate()?;
    ensure_dir(&args.out_dir)?;
    let mut rng = stream(args.seed, "svd-sim");
    let (y, truth) = simulate_dataset(args.m, args.n, args.rank_true, &mut rng)?;
    write_matrix(&args.out_dir.join("Y.csv"), y.matrix())?;
    write_matrix(&args.out_dir.join("M0.csv"), &truth.mean_matrix())?;
    let d0 = DMatrix::from_column_slice(truth.rank(), 1, truth.d.as_slice());
    write_matrix(&args.out_dir.join("d0.csv"), &d0)?;
    info!("simulated {}×{} rank-{} data into {}", args.m, args.n, args.rank_true, args.out_dir.display());
    Ok(())
}

/// Errors of the three point estimates against a known mean matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvdSummary {
    pub mse_mle: f64,
    pub mse_posterior_mean: f64,
    pub mse_rank_r: f64,
}

pub fn svd_fit(args: &SvdFitArgs) -> Result<Vec<Option<SvdSummary>>> {
    args.validate()?;
    let hyper = SvdHyperParams::new(args.nu0, args.s20, args.eta0, args.t20)?;
    input_exists(&args.input)?;
    if let Some(t) = &args.truth {
        input_exists(t)?;
    }
    let y = DataMatrix::new(read_matrix(&args.input)?)
        .map_err(|e| CliError::Validation(format!("{}: {e}", args.input.display())))?;
    if args.rank > y.nrows().min(y.ncols()) {
        return Err(CliError::Validation(format!(
            "--rank {} exceeds min(m, n) = {} for {}",
            args.rank,
            y.nrows().min(y.ncols()),
            args.input.display()
        )));
    }
    let truth = match &args.truth {
        Some(path) => {
            let m0 = read_matrix(path)?;
            if m0.shape() != (y.nrows(), y.ncols()) {
                return Err(CliError::Validation(format!(
                    "{} is {}×{} but the data are {}×{}",
                    path.display(),
                    m0.nrows(),
                    m0.ncols(),
                    y.nrows(),
                    y.ncols()
                )));
            }
            Some(m0)
        }
        None => None,
    };
    ensure_dir(&args.out_dir)?;
    run_chains(args.chains, |k| {
        let dir = chain_dir(&args.out_dir, args.chains, k);
        ensure_dir(&dir)?;
        let mut rng = stream(args.seed, &format!("svd-fit/chain-{k}"));
        info!("svd-fit chain {k}: {} iterations", args.iters);
        let out = run_svd_gibbs(&y, args.rank, &hyper, args.iters, args.thin, &mut rng)?;

        let header: Vec<String> =
            std::iter::once("iter".to_owned()).chain((1..=args.rank).map(|j| format!("d_{j}"))).collect();
        let rows = out
            .d_trace
            .iter()
            .map(|(s, d)| std::iter::once(s.to_string()).chain(d.iter().map(|x| x.to_string())).collect());
        write_rows(&dir.join("d_trace.csv"), Some(&header), rows)?;
        let rank_r = rank_r_approximation(&out.m_posterior_mean, args.rank)?;
        write_matrix(&dir.join("M_post_mean.csv"), &out.m_posterior_mean)?;
        write_matrix(&dir.join("M_rankR.csv"), &rank_r)?;

        let Some(m0) = &truth else { return Ok(None) };
        let summary = SvdSummary {
            mse_mle: mean_squared_error(&mle_mean(&y, args.rank)?, m0)?,
            mse_posterior_mean: mean_squared_error(&out.m_posterior_mean, m0)?,
            mse_rank_r: mean_squared_error(&rank_r, m0)?,
        };
        let header = ["estimator".to_owned(), "mse".to_owned()];
        let rows =
            [("mle", summary.mse_mle), ("posterior_mean", summary.mse_posterior_mean), ("rank_r", summary.mse_rank_r)]
                .into_iter()
                .map(|(name, v)| vec![name.to_owned(), v.to_string()]);
        write_rows(&dir.join("summary.csv"), Some(&header), rows)?;
        info!("svd-fit chain {k}: {summary:?}");
        Ok(Some(summary))
    })
}

pub fn eigen_fit(args: &EigenFitArgs) -> Result<()> {
    args.validate()?;
    input_exists(&args.input)?;
    if let Some(c) = &args.covariates {
        input_exists(c)?;
    }
    let y = parse_adjacency(&args.input)?;
    let covariates = match &args.covariates {
        Some(path) => {
            let c = parse_covariates(path)?;
            c.check_matches(&y).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
            Some(c)
        }
        None => None,
    };
    let n = y.n();
    let hyper =
        EigenHyperParams { t2_lambda: args.t2_lambda.unwrap_or(n as f64), t2_theta: args.t2_theta, rank: args.rank };
    hyper.validate(n)?;
    let config = EigenChainConfig { iters: args.iters, burn: args.burn, thin: args.thin };
    ensure_dir(&args.out_dir)?;
    run_chains(args.chains, |k| {
        let dir = chain_dir(&args.out_dir, args.chains, k);
        ensure_dir(&dir)?;
        let mut rng = stream(args.seed, &format!("eigen-fit/chain-{k}"));
        info!("eigen-fit chain {k}: {} iterations on {n} nodes", args.iters);
        let out = run_eigenmodel_gibbs(&y, &hyper, config, &mut rng)?;
        write_eigen_outputs(&dir, &y, covariates.as_ref(), args.rank, &out)
    })?;
    Ok(())
}

fn write_eigen_outputs(
    dir: &Path,
    y: &SymmetricBinaryNetwork,
    covariates: Option<&NodeCovariates>,
    rank: usize,
    out: &stiefel_core::eigenmodel::EigenGibbsOutput,
) -> Result<()> {
    let header: Vec<String> = std::iter::once("iter".to_owned())
        .chain((1..=rank).map(|r| format!("lambda_{r}")))
        .chain(std::iter::once("theta".to_owned()))
        .collect();
    let rows = out.lambda_trace.iter().zip(&out.theta_trace).map(|((s, l), theta)| {
        std::iter::once(s.to_string())
            .chain(l.iter().map(|x| x.to_string()))
            .chain(std::iter::once(theta.to_string()))
            .collect()
    });
    write_rows(&dir.join("lambda_theta_trace.csv"), Some(&header), rows)?;
    write_matrix(&dir.join("M_bar.csv"), &out.m_bar)?;

    let lp = latent_positions(&out.m_bar, rank)?;
    let scaled = lp.scaled();
    let mut header: Vec<String> = std::iter::once("node".to_owned())
        .chain((1..=rank).map(|r| format!("u_{r}")))
        .chain((1..=rank).map(|r| format!("scaled_{r}")))
        .collect();
    if let Some(c) = covariates {
        header.extend(c.names().iter().cloned());
    }
    let rows = (0..y.n()).map(|i| {
        let mut row = vec![(i + 1).to_string()];
        row.extend(lp.positions.row(i).iter().map(|x| x.to_string()));
        row.extend(scaled.row(i).iter().map(|x| x.to_string()));
        if let Some(c) = covariates {
            row.extend(c.rows()[i].iter().map(|&v| format_binary(v).to_owned()));
        }
        row
    });
    write_rows(&dir.join("positions.csv"), Some(&header), rows)
}
