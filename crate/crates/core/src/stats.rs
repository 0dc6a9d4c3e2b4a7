//! Small statistics helpers shared by the 1D McKean study and the 2D
//! experiment drivers: KS distances, running moments, least squares.

/// Kolmogorov-Smirnov distance between the empirical CDF of `samples`
/// (any order; sorted internally) and the model CDF.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut sorted: Vec<f64> = samples.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    d
}

/// Standard Gumbel CDF exp(-e^{-x}).
pub fn gumbel_cdf(x: f64) -> f64 {
    (-(-x).exp()).exp()
}

/// Mean and unbiased sample variance in one pass (Welford).
pub fn mean_and_variance(samples: &[f64]) -> (f64, f64) {
    let mut mean = 0.0f64;
    let mut m2 = 0.0f64;
    for (i, &x) in samples.iter().enumerate() {
        let delta = x - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (x - mean);
    }
    let var = if samples.len() > 1 { m2 / (samples.len() - 1) as f64 } else { 0.0 };
    (mean, var)
}

/// Median by total order; averages the two central values for even lengths.
/// Empty input returns NaN.
pub fn median(samples: &[f64]) -> f64 {
    if samples.is_empty() {
        return f64::NAN;
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let mid = sorted.len() / 2;
    if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        0.5 * (sorted[mid - 1] + sorted[mid])
    }
}

#[derive(Clone, Copy, Debug)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope under i.i.d. residuals.
    pub slope_stderr: f64,
}

/// Ordinary least squares y ~ intercept + slope x. Needs >= 3 points for a
/// finite stderr; with exactly 2 the stderr is 0.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> LinearFit {
    assert_eq!(xs.len(), ys.len(), "length mismatch {} vs {}", xs.len(), ys.len());
    assert!(xs.len() >= 2, "need at least 2 points, got {}", xs.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0f64;
    let mut sxy = 0.0f64;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    assert!(sxx > 0.0, "degenerate abscissae (all equal to {mx})");
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let mut ss_res = 0.0f64;
    for (&x, &y) in xs.iter().zip(ys) {
        let r = y - intercept - slope * x;
        ss_res += r * r;
    }
    let dof = (xs.len() as f64 - 2.0).max(1.0);
    LinearFit { slope, intercept, slope_stderr: (ss_res / dof / sxx).sqrt() }
}

/// splitmix64-style seed derivation: one base seed plus coordinates gives
/// decorrelated per-task seeds.
pub fn derive_seed(seed: u64, a: u64, b: u64) -> u64 {
    let mut z = seed
        ^ a.wrapping_mul(0x9e37_79b9_7f4a_7c15)
        ^ b.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
