use std::f64::consts::SQRT_2;

use rand::distr::Open01;
use rand::Rng;
use rand_distr::StandardNormal;
use statrs::function::erf::{erfc, erfc_inv};

/// Standardized truncation points beyond this use the exponential envelope.
const TAIL_CUTOFF: f64 = 5.0;

/// Support restriction for [`sample_truncated_normal`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Truncation {
    /// No restriction.
    None,
    /// `x > bound`
    Above(f64),
    /// `x < bound`
    Below(f64),
}

/// Draw from `normal(mean, sd²)` restricted by `truncation`. The result is
/// strictly on the allowed side of the bound, however far in the tail the
/// bound lies.
pub fn sample_truncated_normal<G: Rng + ?Sized>(mean: f64, sd: f64, truncation: Truncation, rng: &mut G) -> f64 {
    match truncation {
        Truncation::None => mean + sd * rng.sample::<f64, _>(StandardNormal),
        Truncation::Above(bound) => above(mean, sd, bound, rng),
        Truncation::Below(bound) => -above(-mean, sd, -bound, rng),
    }
}

fn above<G: Rng + ?Sized>(mean: f64, sd: f64, bound: f64, rng: &mut G) -> f64 {
    let alpha = (bound - mean) / sd;
    loop {
        let z = if alpha > TAIL_CUTOFF {
            exponential_tail(alpha, rng)
        } else {
            // z = Φ⁻¹(1 − U·Φ̄(α)) written through the upper tail to keep precision
            let tail = 0.5 * erfc(alpha / SQRT_2);
            let u: f64 = rng.sample(Open01);
            SQRT_2 * erfc_inv(2.0 * u * tail)
        };
        let x = mean + sd * z;
        // rounding can land exactly on the bound
        if x > bound && x.is_finite() {
            return x;
        }
    }
}

/// Robert (1995): standard normal restricted to `z > alpha`, `alpha > 0`,
/// by rejection from a translated exponential with the optimal rate.
fn exponential_tail<G: Rng + ?Sized>(alpha: f64, rng: &mut G) -> f64 {
    let rate = 0.5 * (alpha + (alpha * alpha + 4.0).sqrt());
    loop {
        let u: f64 = rng.sample(Open01);
        let z = alpha - u.ln() / rate;
        let v: f64 = rng.random();
        if v <= (-0.5 * (z - rate) * (z - rate)).exp() {
            return z;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn deep_tail_keeps_sign() {
        let mut rng = stream(1, "tn-tail");
        for mean in [-10.0, -40.0, -5.5, -4.9] {
            for _ in 0..10_000 {
                let x = sample_truncated_normal(mean, 1.0, Truncation::Above(0.0), &mut rng);
                assert!(x > 0.0 && x.is_finite(), "mean {mean} gave {x}");
                let y = sample_truncated_normal(-mean, 1.0, Truncation::Below(0.0), &mut rng);
                assert!(y < 0.0 && y.is_finite());
            }
        }
    }

    #[test]
    fn half_normal_mean() {
        let mut rng = stream(2, "tn-half");
        let n = 100_000;
        let m: f64 =
            (0..n).map(|_| sample_truncated_normal(0.0, 1.0, Truncation::Below(0.0), &mut rng)).sum::<f64>() / n as f64;
        let expected = -(2.0 / std::f64::consts::PI).sqrt();
        assert!((m - expected).abs() < 0.01, "{m}");
    }

    #[test]
    fn tail_mean_matches_mills_ratio() {
        // E[z | z > a] = φ(a) / Φ̄(a)
        let mut rng = stream(3, "tn-mills");
        for a in [1.0_f64, 4.0, 6.0, 12.0] {
            let phi = (-0.5 * a * a).exp() / (2.0 * std::f64::consts::PI).sqrt();
            let expected = phi / (0.5 * erfc(a / SQRT_2));
            let n = 50_000;
            let m: f64 = (0..n).map(|_| sample_truncated_normal(0.0, 1.0, Truncation::Above(a), &mut rng)).sum::<f64>()
                / n as f64;
            assert!((m - expected).abs() < 0.01, "a={a}: {m} vs {expected}");
        }
    }
}
