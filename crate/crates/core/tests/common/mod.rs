#![allow(dead_code)]

/// Composite Simpson rule with `n` (even) intervals.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    assert!(n % 2 == 0);
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + k as f64 * h);
    }
    s * h / 3.0
}

/// Two-sample Kolmogorov–Smirnov statistic.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

/// Asymptotic 1% critical value of the two-sample KS statistic.
pub fn ks_critical_1pct(n1: usize, n2: usize) -> f64 {
    let (a, b) = (n1 as f64, n2 as f64);
    1.628 * ((a + b) / (a * b)).sqrt()
}

pub fn ks_passes(a: &[f64], b: &[f64]) -> bool {
    ks_statistic(a, b) < ks_critical_1pct(a.len(), b.len())
}

/// Sign-flip test: first half against the negated second half.
pub fn antipodal_ks_passes(x: &[f64]) -> bool {
    let half = x.len() / 2;
    let flipped: Vec<f64> = x[half..].iter().map(|v| -v).collect();
    ks_passes(&x[..half], &flipped)
}

/// Langevin mean resultant on the 2-sphere by quadrature of the density of
/// `t = u·μ`, which is `∝ exp(κt)` on `[−1, 1]`.
pub fn langevin_mean_resultant(kappa: f64) -> f64 {
    let num = simpson(|t| t * (kappa * t).exp(), -1.0, 1.0, 4000);
    let den = simpson(|t| (kappa * t).exp(), -1.0, 1.0, 4000);
    num / den
}

/// `E[g(φ)]` for the circle density `∝ exp(a cos²φ + b sin²φ)`.
pub fn circle_bingham_moment<G: Fn(f64) -> f64>(a: f64, b: f64, g: G) -> f64 {
    let w = |p: f64| (a * p.cos().powi(2) + b * p.sin().powi(2)).exp();
    let tau = std::f64::consts::TAU;
    simpson(|p| g(p) * w(p), 0.0, tau, 20_000) / simpson(w, 0.0, tau, 20_000)
}

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

pub fn variance(x: &[f64]) -> f64 {
    let m = mean(x);
    x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (x.len() - 1) as f64
}
