//! Probit eigenmodel for a symmetric binary network:
//!
//! ```text
//! z_ij = θ + u_iᵀ Λ u_j + ε_ij,   ε_ij = ε_ji ~ normal(0, 1),   y_ij = 1(z_ij > 0)
//! ```
//!
//! with `U` on `V(R, n)`, `Λ = diag(λ)`, priors `θ ~ normal(0, τ²_θ)`,
//! `λ_r ~ normal(0, τ²_λ)` and `U` uniform. The diagonal of `Z` is latent with
//! variance 2 so that the density of `Z` is `etr(−(Z − M)ᵀ(Z − M)/4)`; this
//! makes the full conditional of `U` the matrix Bingham with `A = (Z − θ11ᵀ)/2`
//! and `B = λ`.
//!
//! The full conditional of `λ_r` comes from completing the square in
//! `λ_r u_rᵀEu_r/2 − λ_r²/4 − λ_r²/(2τ²_λ)` with `E = Z − θ11ᵀ`:
//! variance `v = 2τ²_λ/(2 + τ²_λ)` and mean `v·u_rᵀEu_r/2`.

use std::f64::consts::SQRT_2;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use statrs::function::erf::erfc_inv;

use crate::error::{dim_err, input_err, Result};
use crate::linalg::{is_symmetric, sym_eigen_desc};
use crate::manifold::{random_uniform_frame, OrthonormalFrame};
use crate::samplers::{sample_bingham_matrix_gibbs, sample_truncated_normal, Truncation};

/// Undirected network with entries `Some(true)` (tie), `Some(false)` (no
/// tie) or `None` (missing). The diagonal is always missing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetricBinaryNetwork {
    n: usize,
    y: Vec<Option<bool>>,
}

impl SymmetricBinaryNetwork {
    /// `entries` is row-major `n × n`. Diagonal entries are ignored. An
    /// asymmetric pair is reported with its 1-based `(i, j)`, `i < j`.
    pub fn new(n: usize, mut entries: Vec<Option<bool>>) -> Result<Self> {
        if n == 0 {
            return dim_err("network has no nodes");
        }
        if entries.len() != n * n {
            return dim_err(format!("expected {} entries for n = {n}, got {}", n * n, entries.len()));
        }
        if let Some((i, j)) = first_asymmetry(n, &entries) {
            return input_err(format!("adjacency is not symmetric at ({}, {})", i + 1, j + 1));
        }
        for i in 0..n {
            entries[i * n + i] = None;
        }
        Ok(Self { n, y: entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Option<bool> {
        self.y[i * self.n + j]
    }

    /// Fraction of observed off-diagonal pairs that are ties.
    pub fn observed_density(&self) -> Option<f64> {
        let (mut ties, mut seen) = (0usize, 0usize);
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if let Some(t) = self.get(i, j) {
                    seen += 1;
                    ties += usize::from(t);
                }
            }
        }
        (seen > 0).then(|| ties as f64 / seen as f64)
    }

    /// Ties as 0-based `(i, j)` with `i < j`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if self.get(i, j) == Some(true) {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

/// First off-diagonal pair (0-based, row-major over `i < j`) whose two
/// entries disagree.
pub fn first_asymmetry(n: usize, entries: &[Option<bool>]) -> Option<(usize, usize)> {
    for i in 0..n {
        for j in (i + 1)..n {
            if entries[i * n + j] != entries[j * n + i] {
                return Some((i, j));
            }
        }
    }
    None
}

/// Per-node binary indicators carried alongside the network for annotation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeCovariates {
    names: Vec<String>,
    rows: Vec<Vec<Option<bool>>>,
}

impl NodeCovariates {
    pub fn new(names: Vec<String>, rows: Vec<Vec<Option<bool>>>) -> Result<Self> {
        if let Some((k, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != names.len()) {
            return dim_err(format!("row {} has {} values, expected {}", k + 1, row.len(), names.len()));
        }
        Ok(Self { names, rows })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn rows(&self) -> &[Vec<Option<bool>>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn check_matches(&self, network: &SymmetricBinaryNetwork) -> Result<()> {
        if self.len() != network.n() {
            return dim_err(format!("covariates have {} rows, network has {} nodes", self.len(), network.n()));
        }
        Ok(())
    }
}

/// `(τ²_λ, τ²_θ, R)`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenHyperParams {
    pub t2_lambda: f64,
    pub t2_theta: f64,
    pub rank: usize,
}

impl EigenHyperParams {
    /// `R = 2`, `τ²_λ = n`, `τ²_θ = 100`.
    pub fn for_network(n: usize) -> Self {
        Self { t2_lambda: n as f64, t2_theta: 100.0, rank: 2 }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if !(self.t2_lambda > 0.0 && self.t2_lambda.is_finite()) {
            return input_err(format!("t2_lambda must be positive, got {}", self.t2_lambda));
        }
        if !(self.t2_theta > 0.0 && self.t2_theta.is_finite()) {
            return input_err(format!("t2_theta must be positive, got {}", self.t2_theta));
        }
        if self.rank == 0 || self.rank > n {
            return dim_err(format!("rank {} must be in 1..={n}", self.rank));
        }
        Ok(())
    }
}

/// Current values of `(Z, U, λ, θ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenmodelState {
    pub z: DMatrix<f64>,
    pub u: OrthonormalFrame,
    pub lambda: DVector<f64>,
    pub theta: f64,
}

impl EigenmodelState {
    pub fn n(&self) -> usize {
        self.u.rows()
    }

    /// `U diag(λ) Uᵀ`, exactly symmetric.
    pub fn latent_mean(&self) -> DMatrix<f64> {
        let u = self.u.as_matrix();
        let n = u.nrows();
        let mut ul = u.clone();
        for (r, mut col) in ul.column_iter_mut().enumerate() {
            col *= self.lambda[r];
        }
        let full = ul * u.transpose();
        DMatrix::from_fn(n, n, |i, j| if i <= j { full[(i, j)] } else { full[(j, i)] })
    }

    /// `θ11ᵀ + U diag(λ) Uᵀ`
    pub fn mean_matrix(&self) -> DMatrix<f64> {
        self.latent_mean().add_scalar(self.theta)
    }

    /// `(mean, variance)` of the normal full conditional of `θ`, using the
    /// upper triangle of `Z − UΛUᵀ`.
    pub fn theta_conditional(&self, hyper: &EigenHyperParams) -> (f64, f64) {
        let n = self.n();
        let resid = &self.z - self.latent_mean();
        let mut sum = 0.0;
        for j in 0..n {
            for i in 0..j {
                sum += resid[(i, j)];
            }
        }
        let pairs = (n * (n - 1) / 2) as f64;
        let var = 1.0 / (1.0 / hyper.t2_theta + pairs);
        (var * sum, var)
    }

    /// Means (one per `λ_r`) and common variance of the normal full
    /// conditionals of `λ`, with `E = Z − θ11ᵀ` including its diagonal.
    pub fn lambda_conditional(&self, hyper: &EigenHyperParams) -> (DVector<f64>, f64) {
        let e = self.z.add_scalar(-self.theta);
        let var = 2.0 * hyper.t2_lambda / (2.0 + hyper.t2_lambda);
        let u = self.u.as_matrix();
        let eu = &e * u;
        let means = DVector::from_fn(u.ncols(), |r, _| var * u.column(r).dot(&eu.column(r)) / 2.0);
        (means, var)
    }

    /// `A = (Z − θ11ᵀ)/2` of the Bingham full conditional of `U`.
    pub fn bingham_parameter(&self) -> DMatrix<f64> {
        self.z.add_scalar(-self.theta) * 0.5
    }

    pub fn update_z<G: Rng + ?Sized>(&mut self, y: &SymmetricBinaryNetwork, rng: &mut G) -> Result<()> {
        self.z = sample_z_full_conditional(y, &self.mean_matrix(), rng)?;
        Ok(())
    }

    pub fn update_theta<G: Rng + ?Sized>(&mut self, hyper: &EigenHyperParams, rng: &mut G) {
        let (mean, var) = self.theta_conditional(hyper);
        self.theta = mean + var.sqrt() * rng.sample::<f64, _>(StandardNormal);
    }

    pub fn update_lambda<G: Rng + ?Sized>(&mut self, hyper: &EigenHyperParams, rng: &mut G) {
        let (means, var) = self.lambda_conditional(hyper);
        let sd = var.sqrt();
        self.lambda = means.map(|m| m + sd * rng.sample::<f64, _>(StandardNormal));
    }

    /// One matrix Bingham sweep from the current `U`.
    pub fn update_u<G: Rng + ?Sized>(&mut self, rng: &mut G) -> Result<()> {
        self.u = sample_bingham_matrix_gibbs(&self.bingham_parameter(), &self.lambda, &self.u, rng)?;
        Ok(())
    }
}

/// Draws `Z` given `Y` and the mean matrix.
///
/// Off-diagonal `z_ij ~ normal(mean_ij, 1)` restricted to `(0, ∞)` for a tie,
/// `(−∞, 0)` for a non-tie and unrestricted when missing, mirrored into
/// `z_ji`. Diagonal `z_ii ~ normal(mean_ii, 2)`.
pub fn sample_z_full_conditional<G: Rng + ?Sized>(
    y: &SymmetricBinaryNetwork,
    mean: &DMatrix<f64>,
    rng: &mut G,
) -> Result<DMatrix<f64>> {
    let n = y.n();
    if mean.shape() != (n, n) {
        return dim_err(format!("mean is {:?}, network has {n} nodes", mean.shape()));
    }
    if !is_symmetric(mean) {
        return input_err("mean matrix is not symmetric");
    }
    let mut z = DMatrix::zeros(n, n);
    for i in 0..n {
        z[(i, i)] = sample_truncated_normal(mean[(i, i)], SQRT_2, Truncation::None, rng);
        for j in (i + 1)..n {
            let trunc = match y.get(i, j) {
                Some(true) => Truncation::Above(0.0),
                Some(false) => Truncation::Below(0.0),
                None => Truncation::None,
            };
            let v = sample_truncated_normal(mean[(i, j)], 1.0, trunc, rng);
            z[(i, j)] = v;
            z[(j, i)] = v;
        }
    }
    Ok(z)
}

/// Number of observed off-diagonal entries of `z` whose sign disagrees with
/// `y` (`z > 0` required for a tie, `z < 0` for a non-tie), plus the number of
/// asymmetric pairs.
pub fn sign_violations(y: &SymmetricBinaryNetwork, z: &DMatrix<f64>) -> usize {
    let n = y.n();
    let mut bad = 0;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            if z[(i, j)] != z[(j, i)] {
                bad += 1;
            }
            match y.get(i, j) {
                Some(true) if z[(i, j)].partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) => bad += 1,
                Some(false) if z[(i, j)].partial_cmp(&0.0) != Some(std::cmp::Ordering::Less) => bad += 1,
                _ => {}
            }
        }
    }
    bad
}

/// Standard normal quantile.
pub fn probit(p: f64) -> f64 {
    -SQRT_2 * erfc_inv(2.0 * p)
}

/// Iteration counts for [`run_eigenmodel_gibbs`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EigenChainConfig {
    pub iters: usize,
    pub burn: usize,
    pub thin: usize,
}

impl Default for EigenChainConfig {
    fn default() -> Self {
        Self { iters: 10_000, burn: 100, thin: 10 }
    }
}

/// Output of [`run_eigenmodel_gibbs`].
#[derive(Debug, Clone)]
pub struct EigenGibbsOutput {
    /// `(iteration, sort(λ) non-decreasing)` per saved iteration.
    pub lambda_trace: Vec<(usize, DVector<f64>)>,
    pub theta_trace: Vec<f64>,
    /// Average of `U diag(λ) Uᵀ` over saved iterations.
    pub m_bar: DMatrix<f64>,
    pub saved_count: usize,
}

/// Starting state: `θ` the probit of the observed tie density, `λ = 0`, `U`
/// uniform, `Z = 0`.
pub fn initial_state<G: Rng + ?Sized>(y: &SymmetricBinaryNetwork, rank: usize, rng: &mut G) -> Result<EigenmodelState> {
    let n = y.n();
    // keep θ finite for empty or complete networks
    let theta = match y.observed_density() {
        Some(p) => {
            let pairs = (n * (n - 1) / 2) as f64;
            let eps = 0.5 / pairs;
            probit(p.clamp(eps, 1.0 - eps))
        }
        None => 0.0,
    };
    Ok(EigenmodelState {
        z: DMatrix::zeros(n, n),
        u: random_uniform_frame(n, rank, rng)?,
        lambda: DVector::zeros(rank),
        theta,
    })
}

pub fn run_eigenmodel_gibbs<G: Rng + ?Sized>(
    y: &SymmetricBinaryNetwork,
    hyper: &EigenHyperParams,
    config: EigenChainConfig,
    rng: &mut G,
) -> Result<EigenGibbsOutput> {
    run_eigenmodel_gibbs_with(y, hyper, config, rng, |_, _| {})
}

/// Gibbs sampler with a per-iteration observer.
///
/// Each iteration draws `Z`, `θ`, `λ`, `U` in that order. Iterations `s`
/// (1-based) with `s > burn` and `s % thin == 0` record `sort(λ)`, `θ`, and
/// add `UΛUᵀ` to a running sum.
pub fn run_eigenmodel_gibbs_with<G, F>(
    y: &SymmetricBinaryNetwork,
    hyper: &EigenHyperParams,
    config: EigenChainConfig,
    rng: &mut G,
    mut observe: F,
) -> Result<EigenGibbsOutput>
where
    G: Rng + ?Sized,
    F: FnMut(usize, &EigenmodelState),
{
    let n = y.n();
    hyper.validate(n)?;
    let EigenChainConfig { iters, burn, thin } = config;
    if thin == 0 || iters <= burn {
        return input_err(format!("need iters > burn >= 0 and thin >= 1, got {iters}/{burn}/{thin}"));
    }
    let mut state = initial_state(y, hyper.rank, rng)?;
    let mut sum = DMatrix::zeros(n, n);
    let mut lambda_trace = Vec::new();
    let mut theta_trace = Vec::new();
    for s in 1..=iters {
        state.update_z(y, rng)?;
        state.update_theta(hyper, rng);
        state.update_lambda(hyper, rng);
        state.update_u(rng)?;
        observe(s, &state);
        if s > burn && s % thin == 0 {
            let mut sorted: Vec<f64> = state.lambda.iter().copied().collect();
            sorted.sort_by(f64::total_cmp);
            lambda_trace.push((s, DVector::from_vec(sorted)));
            theta_trace.push(state.theta);
            sum += state.latent_mean();
        }
    }
    let saved_count = lambda_trace.len();
    if saved_count == 0 {
        return input_err(format!("no iterations saved with iters={iters}, burn={burn}, thin={thin}"));
    }
    Ok(EigenGibbsOutput { lambda_trace, theta_trace, m_bar: sum / saved_count as f64, saved_count })
}

/// Rank-`R` eigen-summary of a symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentPositions {
    /// Unit-norm eigenvectors as columns.
    pub positions: DMatrix<f64>,
    pub eigenvalues: DVector<f64>,
}

impl LatentPositions {
    /// Columns scaled by `√|eigenvalue|`, for plotting.
    pub fn scaled(&self) -> DMatrix<f64> {
        let mut out = self.positions.clone();
        for (r, mut col) in out.column_iter_mut().enumerate() {
            col *= self.eigenvalues[r].abs().sqrt();
        }
        out
    }
}

/// The `R` eigenvectors of `m_bar` with largest `|eigenvalue|`, ordered by
/// decreasing `|eigenvalue|`. Each eigenvector is signed so that its first
/// nonzero coordinate is positive.
pub fn latent_positions(m_bar: &DMatrix<f64>, r: usize) -> Result<LatentPositions> {
    if !m_bar.is_square() {
        return dim_err(format!("matrix is {}×{}, expected square", m_bar.nrows(), m_bar.ncols()));
    }
    let n = m_bar.nrows();
    if r == 0 || r > n {
        return dim_err(format!("rank {r} must be in 1..={n}"));
    }
    if !is_symmetric(m_bar) {
        return input_err("matrix is not symmetric");
    }
    let (vals, vecs) = sym_eigen_desc(m_bar);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| vals[j].abs().total_cmp(&vals[i].abs()));
    order.truncate(r);
    let mut positions = DMatrix::from_fn(n, r, |i, k| vecs[(i, order[k])]);
    let eigenvalues = DVector::from_iterator(r, order.iter().map(|&k| vals[k]));
    for mut col in positions.column_iter_mut() {
        if let Some(first) = col.iter().copied().find(|x| x.abs() > 1e-12) {
            if first < 0.0 {
                col.neg_mut();
            }
        }
    }
    Ok(LatentPositions { positions, eigenvalues })
}

/// Draws a network from the eigenmodel with the given `θ`, `λ` and a uniform
/// `U`; returns the network and the `U` used.
pub fn simulate_network<G: Rng + ?Sized>(
    n: usize,
    theta: f64,
    lambda: &DVector<f64>,
    rng: &mut G,
) -> Result<(SymmetricBinaryNetwork, OrthonormalFrame)> {
    let u = random_uniform_frame(n, lambda.len(), rng)?;
    let state = EigenmodelState { z: DMatrix::zeros(n, n), u: u.clone(), lambda: lambda.clone(), theta };
    let mean = state.mean_matrix();
    let mut entries = vec![None; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let z = mean[(i, j)] + rng.sample::<f64, _>(StandardNormal);
            entries[i * n + j] = Some(z > 0.0);
            entries[j * n + i] = Some(z > 0.0);
        }
    }
    Ok((SymmetricBinaryNetwork::new(n, entries)?, u))
}
