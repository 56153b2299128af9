//! Model-based SVD: `Y = U diag(d) Vᵀ + E` with i.i.d. `normal(0, σ²)` noise.
//!
//! Priors: `U`, `V` uniform on their Stiefel manifolds; `d_j | τ² ~ normal(0, τ²)`;
//! `1/τ² ~ gamma(η₀/2, η₀τ₀²/2)`; `1/σ² ~ gamma(ν₀/2, ν₀σ₀²/2)`. All full
//! conditionals are conjugate:
//!
//! * `U | ·  ~ MF(Y V D / σ²)`, `V | · ~ MF(Yᵀ U D / σ²)`
//! * `d_j | · ~ normal(τ² u_jᵀ Y v_j / (σ² + τ²), τ²σ² / (σ² + τ²))`
//! * `1/τ² | · ~ gamma((η₀ + R)/2, (η₀τ₀² + Σ d_j²)/2)`
//! * `1/σ² | · ~ gamma((ν₀ + mn)/2, (ν₀σ₀² + ‖Y − UDVᵀ‖²)/2)`

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma, StandardNormal};

use crate::error::{dim_err, input_err, Result};
use crate::linalg::{svd_desc, truncated_svd};
use crate::manifold::{random_uniform_frame, OrthonormalFrame};
use crate::samplers::sample_mf_matrix_gibbs;

/// Hyperparameters `(ν₀, σ₀², η₀, τ₀²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvdHyperParams {
    pub nu0: f64,
    pub s20: f64,
    pub eta0: f64,
    pub t20: f64,
}

impl SvdHyperParams {
    pub fn new(nu0: f64, s20: f64, eta0: f64, t20: f64) -> Result<Self> {
        let h = Self { nu0, s20, eta0, t20 };
        h.validate()?;
        Ok(h)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("nu0", self.nu0), ("s20", self.s20), ("eta0", self.eta0), ("t20", self.t20)] {
            if !(v > 0.0 && v.is_finite()) {
                return input_err(format!("{name} must be positive and finite, got {v}"));
            }
        }
        Ok(())
    }
}

impl Default for SvdHyperParams {
    fn default() -> Self {
        Self { nu0: 1.0, s20: 1.0, eta0: 1.0, t20: 1.0 }
    }
}

/// A fully observed real `m × n` data matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix(DMatrix<f64>);

impl DataMatrix {
    pub fn new(y: DMatrix<f64>) -> Result<Self> {
        if y.nrows() == 0 || y.ncols() == 0 {
            return dim_err("data matrix is empty");
        }
        if let Some(pos) = y.iter().position(|x| !x.is_finite()) {
            let (i, j) = (pos % y.nrows(), pos / y.nrows());
            return input_err(format!("non-finite entry at ({}, {})", i + 1, j + 1));
        }
        Ok(Self(y))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn nrows(&self) -> usize {
        self.0.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.0.ncols()
    }
}

/// Current values of the unknowns.
#[derive(Debug, Clone, PartialEq)]
pub struct SvdModelState {
    pub u: OrthonormalFrame,
    pub v: OrthonormalFrame,
    pub d: DVector<f64>,
    pub sigma2: f64,
    pub tau2: f64,
}

impl SvdModelState {
    pub fn rank(&self) -> usize {
        self.d.len()
    }

    /// `U diag(d) Vᵀ`
    pub fn mean_matrix(&self) -> DMatrix<f64> {
        let ud = scale_columns(self.u.as_matrix(), &self.d);
        ud * self.v.as_matrix().transpose()
    }

    /// Parameter of the MF full conditional of `U`: `Y V diag(d) / σ²`.
    pub fn u_conditional_parameter(&self, y: &DataMatrix) -> DMatrix<f64> {
        scale_columns(&(y.matrix() * self.v.as_matrix()), &self.d) / self.sigma2
    }

    /// Parameter of the MF full conditional of `V`: `Yᵀ U diag(d) / σ²`.
    pub fn v_conditional_parameter(&self, y: &DataMatrix) -> DMatrix<f64> {
        scale_columns(&y.matrix().tr_mul(self.u.as_matrix()), &self.d) / self.sigma2
    }

    /// Mean and variance of the normal full conditional of `d_j`.
    pub fn d_conditional(&self, y: &DataMatrix, j: usize) -> (f64, f64) {
        let (s2, t2) = (self.sigma2, self.tau2);
        let proj = self.u.as_matrix().column(j).dot(&(y.matrix() * self.v.as_matrix().column(j)));
        (t2 * proj / (s2 + t2), t2 * s2 / (t2 + s2))
    }

    /// `(shape, rate)` of the gamma full conditional of `1/σ²`.
    pub fn precision_conditional(&self, y: &DataMatrix, hyper: &SvdHyperParams) -> (f64, f64) {
        let (m, n) = (y.nrows() as f64, y.ncols() as f64);
        let rss = (y.matrix() - self.mean_matrix()).norm_squared();
        ((hyper.nu0 + m * n) / 2.0, (hyper.nu0 * hyper.s20 + rss) / 2.0)
    }

    /// `(shape, rate)` of the gamma full conditional of `1/τ²`.
    pub fn tau_precision_conditional(&self, hyper: &SvdHyperParams) -> (f64, f64) {
        let r = self.rank() as f64;
        ((hyper.eta0 + r) / 2.0, (hyper.eta0 * hyper.t20 + self.d.norm_squared()) / 2.0)
    }

    fn check(&self, y: &DataMatrix) -> Result<()> {
        let r = self.rank();
        if self.u.rows() != y.nrows() || self.v.rows() != y.ncols() || self.u.cols() != r || self.v.cols() != r {
            return dim_err(format!(
                "state U {}×{}, V {}×{}, d {} incompatible with data {}×{}",
                self.u.rows(),
                self.u.cols(),
                self.v.rows(),
                self.v.cols(),
                r,
                y.nrows(),
                y.ncols()
            ));
        }
        Ok(())
    }

    /// `U ~ MF(Y V D / σ²)`, one column sweep from the current `U`.
    pub fn update_u<G: Rng + ?Sized>(&mut self, y: &DataMatrix, rng: &mut G) -> Result<()> {
        self.check(y)?;
        let c = self.u_conditional_parameter(y);
        self.u = sample_mf_matrix_gibbs(&c, &self.u, rng)?;
        Ok(())
    }

    /// `V ~ MF(Yᵀ U D / σ²)`, one column sweep from the current `V`.
    pub fn update_v<G: Rng + ?Sized>(&mut self, y: &DataMatrix, rng: &mut G) -> Result<()> {
        self.check(y)?;
        let c = self.v_conditional_parameter(y);
        self.v = sample_mf_matrix_gibbs(&c, &self.v, rng)?;
        Ok(())
    }

    /// Draws every `d_j` from its normal full conditional. The result is not
    /// re-sorted.
    pub fn update_d<G: Rng + ?Sized>(&mut self, y: &DataMatrix, rng: &mut G) -> Result<()> {
        self.check(y)?;
        for j in 0..self.rank() {
            let (mean, var) = self.d_conditional(y, j);
            self.d[j] = mean + var.sqrt() * rng.sample::<f64, _>(StandardNormal);
        }
        Ok(())
    }

    /// Draws `σ²` then `τ²` from their inverse-gamma full conditionals.
    pub fn update_variances<G: Rng + ?Sized>(
        &mut self,
        y: &DataMatrix,
        hyper: &SvdHyperParams,
        rng: &mut G,
    ) -> Result<()> {
        self.check(y)?;
        let (shape, rate) = self.precision_conditional(y, hyper);
        self.sigma2 = 1.0 / gamma_draw(shape, rate, rng)?;
        let (shape, rate) = self.tau_precision_conditional(hyper);
        self.tau2 = 1.0 / gamma_draw(shape, rate, rng)?;
        Ok(())
    }
}

fn gamma_draw<G: Rng + ?Sized>(shape: f64, rate: f64, rng: &mut G) -> Result<f64> {
    let g = Gamma::new(shape, 1.0 / rate).map_err(|e| crate::Error::Input(format!("gamma({shape}, {rate}): {e}")))?;
    // a zero draw would give an infinite variance
    loop {
        let x = g.sample(rng);
        if x > 0.0 {
            return Ok(x);
        }
    }
}

fn scale_columns(m: &DMatrix<f64>, d: &DVector<f64>) -> DMatrix<f64> {
    let mut out = m.clone();
    for (j, mut col) in out.column_iter_mut().enumerate() {
        col *= d[j];
    }
    out
}

/// Draws a synthetic dataset: uniform `U₀`, `V₀`; `d₀` sorted decreasing
/// exponential(1) draws times `√(mn)`; `Y = U₀ D₀ V₀ᵀ + normal(0, 1)` noise.
///
/// The returned true state has `σ² = 1` and `τ² = mean(d₀²)`.
pub fn simulate_dataset<G: Rng + ?Sized>(
    m: usize,
    n: usize,
    r0: usize,
    rng: &mut G,
) -> Result<(DataMatrix, SvdModelState)> {
    if r0 == 0 || r0 > m.min(n) {
        return dim_err(format!("true rank {r0} must be in 1..={}", m.min(n)));
    }
    let u0 = random_uniform_frame(m, r0, rng)?;
    let v0 = random_uniform_frame(n, r0, rng)?;
    let mut d: Vec<f64> = (0..r0).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    d.sort_by(|a, b| b.total_cmp(a));
    let scale = ((m * n) as f64).sqrt();
    let d0 = DVector::from_iterator(r0, d.into_iter().map(|x| x * scale));
    let tau2 = d0.norm_squared() / r0 as f64;
    let truth = SvdModelState { u: u0, v: v0, d: d0, sigma2: 1.0, tau2 };
    let noise = DMatrix::from_fn(m, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let y = DataMatrix::new(truth.mean_matrix() + noise)?;
    Ok((y, truth))
}

/// Starting values from the truncated SVD of `Y`: leading `R` singular
/// vectors and values, `σ²` the sample variance (denominator `mn − 1`) of the
/// residual entries, `τ² = mean(d²)`.
pub fn mle_init(y: &DataMatrix, r: usize) -> Result<SvdModelState> {
    let (m, n) = (y.nrows(), y.ncols());
    if r == 0 || r > m.min(n) {
        return dim_err(format!("rank {r} must be in 1..={}", m.min(n)));
    }
    let (uf, s, vf) = svd_desc(y.matrix());
    let u = OrthonormalFrame::from_parts(uf.columns(0, r).into_owned());
    let v = OrthonormalFrame::from_parts(vf.columns(0, r).into_owned());
    let d = s.rows(0, r).into_owned();
    let tau2 = d.norm_squared() / r as f64;
    let mut state = SvdModelState { u, v, d, sigma2: 1.0, tau2 };
    let resid = y.matrix() - state.mean_matrix();
    let count = resid.len() as f64;
    let mean = resid.sum() / count;
    state.sigma2 =
        if count > 1.0 { resid.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / (count - 1.0) } else { 0.0 };
    Ok(state)
}

/// Best rank-`R` approximation (truncated SVD).
pub fn rank_r_approximation(m: &DMatrix<f64>, r: usize) -> Result<DMatrix<f64>> {
    truncated_svd(m, r)
}

/// Output of [`run_svd_gibbs`].
#[derive(Debug, Clone)]
pub struct SvdGibbsOutput {
    /// `(iteration, sort(|d|) decreasing)` for every saved iteration.
    pub d_trace: Vec<(usize, DVector<f64>)>,
    /// Average of `U diag(d) Vᵀ` over saved iterations.
    pub m_posterior_mean: DMatrix<f64>,
    pub saved_count: usize,
    /// The starting (maximum-likelihood) state.
    pub mle: SvdModelState,
}

/// Runs the Gibbs sampler for `iters` iterations from [`mle_init`]; see
/// [`run_svd_gibbs_with`].
pub fn run_svd_gibbs<G: Rng + ?Sized>(
    y: &DataMatrix,
    r: usize,
    hyper: &SvdHyperParams,
    iters: usize,
    thin: usize,
    rng: &mut G,
) -> Result<SvdGibbsOutput> {
    run_svd_gibbs_with(y, r, hyper, iters, thin, rng, |_, _| {})
}

/// Gibbs sampler with a per-iteration observer.
///
/// Each iteration updates `U`, `V`, `d`, `σ²`, `τ²` in that order. Iterations
/// `s` (1-based) with `s % thin == 0` are saved: the trace gets
/// `sort(|d|)` in decreasing order and `U diag(d) Vᵀ` is added to a running
/// sum. There is no burn-in.
pub fn run_svd_gibbs_with<G, F>(
    y: &DataMatrix,
    r: usize,
    hyper: &SvdHyperParams,
    iters: usize,
    thin: usize,
    rng: &mut G,
    mut observe: F,
) -> Result<SvdGibbsOutput>
where
    G: Rng + ?Sized,
    F: FnMut(usize, &SvdModelState),
{
    hyper.validate()?;
    if thin == 0 || iters < thin {
        return input_err(format!("need iters >= thin >= 1, got iters={iters}, thin={thin}"));
    }
    let mle = mle_init(y, r)?;
    let mut state = mle.clone();
    let mut sum = DMatrix::zeros(y.nrows(), y.ncols());
    let mut d_trace = Vec::with_capacity(iters / thin);
    for s in 1..=iters {
        state.update_u(y, rng)?;
        state.update_v(y, rng)?;
        state.update_d(y, rng)?;
        state.update_variances(y, hyper, rng)?;
        observe(s, &state);
        if s % thin == 0 {
            let mut sorted: Vec<f64> = state.d.iter().map(|x| x.abs()).collect();
            sorted.sort_by(|a, b| b.total_cmp(a));
            d_trace.push((s, DVector::from_vec(sorted)));
            sum += state.mean_matrix();
        }
    }
    let saved_count = d_trace.len();
    Ok(SvdGibbsOutput { d_trace, m_posterior_mean: sum / saved_count as f64, saved_count, mle })
}

/// `U diag(d) Vᵀ` from the leading `R` singular triplets of `Y`.
pub fn mle_mean(y: &DataMatrix, r: usize) -> Result<DMatrix<f64>> {
    rank_r_approximation(y.matrix(), r)
}
