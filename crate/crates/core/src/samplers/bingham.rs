use nalgebra::{DMatrix, DVector};
use rand::distr::Open01;
use rand::Rng;
use rand_distr::StandardNormal;

use super::sample_von_mises;
use crate::error::{dim_err, input_err, Error, Result};
use crate::linalg::{is_symmetric, sym_eigen_desc};
use crate::manifold::ORTHONORMALITY_TOL;

/// Exact draw from the Bingham density `∝ exp(uᵀAu)` on the unit sphere.
///
/// Rejection from an angular central Gaussian envelope (Kent, Ganeiber &
/// Mardia). Efficient for small and moderate dimensions; the matrix Gibbs
/// kernels use [`sample_bingham_vector_gibbs`] instead.
pub fn sample_bingham_vector<G: Rng + ?Sized>(a: &DMatrix<f64>, rng: &mut G) -> Result<DVector<f64>> {
    check_symmetric(a)?;
    let q = a.nrows();
    if q == 0 {
        return dim_err("A is empty");
    }
    let (l, e) = sym_eigen_desc(&centered(a));
    if q == 1 {
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        return Ok(DVector::from_element(1, sign));
    }
    // exp(uᵀAu) ∝ exp(−xᵀΨx) with Ψ = diag(l₀ − lᵢ) ⪰ 0 in eigen-coordinates
    let psi: Vec<f64> = l.iter().map(|li| (l[0] - li).max(0.0)).collect();
    let qf = q as f64;
    let b = acg_b(&psi);
    let omega_sd: Vec<f64> = psi.iter().map(|p| (1.0 + 2.0 * p / b).sqrt().recip()).collect();
    let log_bound = -(qf - b) / 2.0 + qf / 2.0 * (qf / b).ln();
    let x = loop {
        let z = DVector::from_fn(q, |i, _| rng.sample::<f64, _>(StandardNormal) * omega_sd[i]);
        let x = &z / z.norm();
        let s: f64 = psi.iter().zip(x.iter()).map(|(p, xi)| p * xi * xi).sum();
        let log_ratio = -s + qf / 2.0 * (1.0 + 2.0 * s / b).ln() - log_bound;
        let u: f64 = rng.sample(Open01);
        if u.ln() <= log_ratio {
            break x;
        }
    };
    let mut u = e * x;
    u /= u.norm();
    Ok(u)
}

/// Solves `Σ 1/(b + 2ψᵢ) = 1` for `b ∈ (0, q]`, the envelope parameter that
/// minimizes the rejection constant.
fn acg_b(psi: &[f64]) -> f64 {
    let f = |b: f64| psi.iter().map(|p| 1.0 / (b + 2.0 * p)).sum::<f64>() - 1.0;
    let (mut lo, mut hi) = (0.0_f64, psi.len() as f64);
    if f(hi) >= 0.0 {
        return hi;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 * hi {
            break;
        }
    }
    hi
}

/// One Markov update targeting the Bingham density `∝ exp(uᵀAu)`, starting
/// from the unit vector `current`.
///
/// In the eigenbasis of `A` the density is `exp(Σ lᵢyᵢ²)`. For every pair
/// `(i, j)` the kernel resamples the angle of `(yᵢ, yⱼ)` with the other
/// coordinates held fixed; that conditional is von Mises in the doubled
/// angle with concentration `(yᵢ² + yⱼ²)(lᵢ − lⱼ)/2`, so each step is an
/// exact conditional draw.
pub fn sample_bingham_vector_gibbs<G: Rng + ?Sized>(
    a: &DMatrix<f64>,
    current: &DVector<f64>,
    rng: &mut G,
) -> Result<DVector<f64>> {
    check_symmetric(a)?;
    if current.len() != a.nrows() {
        return dim_err(format!("current has length {}, A is {}×{}", current.len(), a.nrows(), a.ncols()));
    }
    let norm = current.norm();
    if (norm - 1.0).abs() > ORTHONORMALITY_TOL {
        return Err(Error::Constraint(format!("current has norm {norm}, expected 1")));
    }
    let (l, e) = sym_eigen_desc(&centered(a));
    Ok(bingham_step_in_basis(l.as_slice(), &e, current, rng))
}

/// Kernel step given the eigendecomposition `(l, e)` of the parameter.
pub(crate) fn bingham_step_in_basis<G: Rng + ?Sized>(
    l: &[f64],
    e: &DMatrix<f64>,
    current: &DVector<f64>,
    rng: &mut G,
) -> DVector<f64> {
    let mut y = e.tr_mul(current);
    rotation_sweep(l, y.as_mut_slice(), rng);
    let mut x = e * y;
    x /= x.norm();
    x
}

fn rotation_sweep<G: Rng + ?Sized>(l: &[f64], y: &mut [f64], rng: &mut G) {
    let q = y.len();
    for i in 0..q {
        for j in (i + 1)..q {
            let r2 = y[i] * y[i] + y[j] * y[j];
            if r2 == 0.0 {
                continue;
            }
            let kappa = 0.5 * r2 * (l[i] - l[j]);
            let psi = sample_von_mises(0.0, kappa, rng);
            let half_turn = if rng.random::<bool>() { std::f64::consts::PI } else { 0.0 };
            let (s, c) = (0.5 * psi + half_turn).sin_cos();
            let r = r2.sqrt();
            y[i] = r * c;
            y[j] = r * s;
        }
    }
}

/// `A − (tr A / m)·I`. The Bingham family is invariant under `A → A + aI`;
/// removing the diagonal mean first makes the kernels reproduce the same
/// draws for shifted parameters whenever the shift is exact in floating point.
pub(crate) fn centered(a: &DMatrix<f64>) -> DMatrix<f64> {
    let m = a.nrows();
    if m == 0 {
        return a.clone();
    }
    let mean = a.trace() / m as f64;
    let mut c = a.clone();
    for i in 0..m {
        c[(i, i)] -= mean;
    }
    c
}

pub(crate) fn check_symmetric(a: &DMatrix<f64>) -> Result<()> {
    if !a.is_square() {
        return dim_err(format!("A is {}×{}, expected square", a.nrows(), a.ncols()));
    }
    if a.iter().any(|x| !x.is_finite()) {
        return input_err("A has non-finite entries");
    }
    if !is_symmetric(a) {
        return input_err("A is not symmetric");
    }
    Ok(())
}
