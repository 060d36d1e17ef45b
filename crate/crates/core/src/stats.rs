//! Small statistics helpers shared by the estimators and the test suites:
//! sample moments, normal-approximation confidence intervals, and the
//! Kolmogorov-Smirnov distance between a sample and a reference CDF.

/// Two-sided 97.5% standard-normal quantile, for 95% confidence intervals.
pub const Z_95: f64 = 1.959963984540054;

/// Sample mean; NaN for an empty slice.
pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample standard deviation; 0 for fewer than two points.
pub fn sample_std(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64;
    var.sqrt()
}

/// Half-width of the 95% normal-approximation CI for the mean of `xs`.
pub fn ci95_halfwidth(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    Z_95 * sample_std(xs) / (xs.len() as f64).sqrt()
}

/// Half-width of the 95% normal-approximation CI for a proportion
/// estimated from `successes` out of `n` trials.
pub fn proportion_ci95_halfwidth(successes: u64, n: u64) -> f64 {
    if n == 0 {
        return f64::NAN;
    }
    let p = successes as f64 / n as f64;
    Z_95 * (p * (1.0 - p) / n as f64).sqrt()
}

/// Kolmogorov-Smirnov statistic between an ascending-sorted sample and the
/// reference CDF `cdf`: the supremum gap between the empirical and reference
/// distribution functions.
pub fn ks_statistic<F: Fn(f64) -> f64>(sorted: &[f64], cdf: F) -> f64 {
    let n = sorted.len();
    assert!(n > 0, "KS statistic needs a non-empty sample");
    debug_assert!(
        sorted.windows(2).all(|w| w[0] <= w[1]),
        "sample must be sorted ascending"
    );
    let nf = n as f64;
    let mut sup = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        let above = ((i + 1) as f64 / nf - f).abs();
        let below = (f - i as f64 / nf).abs();
        sup = sup.max(above).max(below);
    }
    sup
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments_of_small_samples() {
        assert!(mean(&[]).is_nan());
        assert_eq!(mean(&[2.0, 4.0]), 3.0);
        assert_eq!(sample_std(&[5.0]), 0.0);
        assert!((sample_std(&[2.0, 4.0]) - std::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn proportion_ci_is_zero_at_extremes() {
        assert_eq!(proportion_ci95_halfwidth(0, 100), 0.0);
        assert_eq!(proportion_ci95_halfwidth(100, 100), 0.0);
        assert!(proportion_ci95_halfwidth(50, 100) > 0.09);
    }

    #[test]
    fn ks_of_exact_uniform_grid_is_small() {
        // Midpoint grid: empirical CDF straddles the true CDF by 1/(2n).
        let n = 1000;
        let sample: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let ks = ks_statistic(&sample, |x| x.clamp(0.0, 1.0));
        assert!(ks <= 0.5 / n as f64 + 1e-12);
    }

    #[test]
    fn ks_detects_wrong_distribution() {
        let n = 1000;
        let sample: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let ks = ks_statistic(&sample, |x| (x * x).clamp(0.0, 1.0));
        assert!(ks > 0.2);
    }
}
