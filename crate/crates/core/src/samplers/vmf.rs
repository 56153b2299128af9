use nalgebra::DVector;
use rand::distr::Open01;
use rand::Rng;
use rand_distr::{Beta, Distribution, StandardNormal};

use super::uniform_sphere;
use crate::error::{input_err, Result};

/// Exact draw from the von Mises-Fisher (Langevin) density `∝ exp(cᵀu)` on
/// the unit sphere in `R^m`.
///
/// Uses Wood's rejection sampler for the component `w = uᵀμ` along the mean
/// direction `μ = c/‖c‖`, followed by a uniform tangent direction. `c = 0`
/// returns a uniform point.
pub fn sample_mf_vector<G: Rng + ?Sized>(c: &DVector<f64>, rng: &mut G) -> Result<DVector<f64>> {
    let m = c.len();
    if m == 0 {
        return input_err("parameter vector is empty");
    }
    if c.iter().any(|x| !x.is_finite()) {
        return input_err("parameter vector has non-finite entries");
    }
    let kappa = c.norm();
    if kappa == 0.0 {
        return Ok(uniform_sphere(m, rng));
    }
    let mu = c / kappa;
    if m == 1 {
        // S^0 = {±1}: P(+μ) = e^κ / (e^κ + e^−κ)
        let p_plus = 1.0 / (1.0 + (-2.0 * kappa).exp());
        let sign = if rng.random::<f64>() < p_plus { 1.0 } else { -1.0 };
        return Ok(mu * sign);
    }

    let w = sample_mean_component(kappa, m, rng);
    // tangent direction: uniform on the unit sphere orthogonal to μ
    let tangent = loop {
        let g = DVector::from_fn(m, |_, _| rng.sample::<f64, _>(StandardNormal));
        let t = &g - &mu * mu.dot(&g);
        let norm = t.norm();
        if norm > 1e-12 {
            break t / norm;
        }
    };
    let mut u = mu * w + tangent * (1.0 - w * w).max(0.0).sqrt();
    u /= u.norm();
    Ok(u)
}

/// Wood (1994): `w ∈ [−1, 1]` with density `∝ (1 − w²)^{(m−3)/2} exp(κw)`.
fn sample_mean_component<G: Rng + ?Sized>(kappa: f64, m: usize, rng: &mut G) -> f64 {
    let d1 = (m - 1) as f64;
    // b = (−2κ + √(4κ² + d1²)) / d1, written without cancellation
    let b = d1 / (2.0 * kappa + (4.0 * kappa * kappa + d1 * d1).sqrt());
    let x0 = (1.0 - b) / (1.0 + b);
    let c0 = kappa * x0 + d1 * (1.0 - x0 * x0).ln();
    let beta = Beta::new(d1 / 2.0, d1 / 2.0).expect("positive shape");
    loop {
        let z: f64 = beta.sample(rng);
        let w = (1.0 - (1.0 + b) * z) / (1.0 - (1.0 - b) * z);
        let u: f64 = rng.sample(Open01);
        if kappa * w + d1 * (1.0 - x0 * w).ln() - c0 >= u.ln() {
            return w.clamp(-1.0, 1.0);
        }
    }
}
