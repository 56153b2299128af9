use std::f64::consts::PI;

use rand::distr::Open01;
use rand::Rng;
use rand_distr::StandardNormal;

/// Angle in `(−π, π]` from the von Mises density `∝ exp(κ cos(θ − μ))`.
///
/// Best & Fisher (1979) rejection. A negative `kappa` is the same as
/// `|kappa|` with the mean moved by `π`.
pub fn sample_von_mises<G: Rng + ?Sized>(mu: f64, kappa: f64, rng: &mut G) -> f64 {
    let (mu, kappa) = if kappa < 0.0 { (mu + PI, -kappa) } else { (mu, kappa) };
    let offset = if kappa < 1e-9 {
        PI * (2.0 * rng.random::<f64>() - 1.0)
    } else if kappa > 1e8 {
        // the density is normal(0, 1/κ) to within O(1/κ)
        rng.sample::<f64, _>(StandardNormal) / kappa.sqrt()
    } else {
        best_fisher(kappa, rng)
    };
    wrap(mu + offset)
}

fn best_fisher<G: Rng + ?Sized>(kappa: f64, rng: &mut G) -> f64 {
    let s = (1.0 + 4.0 * kappa * kappa).sqrt();
    let tau = 1.0 + s;
    // ρ = (τ − √(2τ)) / 2κ, rearranged to avoid cancellation at small κ
    let rho = 2.0 * kappa * tau / ((s + 1.0) * (tau + (2.0 * tau).sqrt()));
    let r = (1.0 + rho * rho) / (2.0 * rho);
    loop {
        let u1: f64 = rng.random();
        let u2: f64 = rng.sample(Open01);
        let z = (PI * u1).cos();
        let f = (1.0 + r * z) / (r + z);
        let c = kappa * (r - f);
        if c * (2.0 - c) - u2 > 0.0 || (c / u2).ln() + 1.0 - c >= 0.0 {
            let theta = f.clamp(-1.0, 1.0).acos();
            return if rng.random::<bool>() { theta } else { -theta };
        }
    }
}

fn wrap(theta: f64) -> f64 {
    let mut t = theta % (2.0 * PI);
    if t > PI {
        t -= 2.0 * PI;
    } else if t <= -PI {
        t += 2.0 * PI;
    }
    t
}
