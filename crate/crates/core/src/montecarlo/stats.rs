use serde::Serialize;

use crate::ensemble::Ensemble;
use crate::error::{Error, Result};

/// Asymptotic Kolmogorov coefficient `sqrt(-ln(0.01 / 2) / 2)` for the 1%
/// level.
pub const KS_COEFFICIENT_1PCT: f64 = 1.627_623_630_718_729_3;

/// Mean, unbiased variance and standard error of the mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleStats {
    pub n: usize,
    pub mean: f64,
    pub variance: f64,
    pub stderr: f64,
}

pub fn empirical_stats(samples: &[f64]) -> Result<SampleStats> {
    let n = samples.len();
    if n < 2 {
        return Err(Error::domain(format!("need at least 2 samples, got {n}")));
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    let variance = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
    Ok(SampleStats {
        n,
        mean,
        variance,
        stderr: (variance / n as f64).sqrt(),
    })
}

fn sorted(samples: &[f64]) -> Vec<f64> {
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    s
}

/// Kolmogorov-Smirnov distance between the empirical CDF of `samples` and
/// `cdf`.
pub fn ks_one_sample<F>(samples: &[f64], cdf: F) -> f64
where
    F: Fn(f64) -> f64,
{
    let s = sorted(samples);
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &x)| {
            let c = cdf(x);
            (c - i as f64 / n).max((i + 1) as f64 / n - c)
        })
        .fold(0.0, f64::max)
}

/// One-sample KS distance against the spacing CDF of `ens`, evaluated by
/// integrating the Gibbs weight between consecutive sorted samples.
pub fn ks_one_sample_numeric(ens: &Ensemble<'_>, samples: &[f64]) -> Result<f64> {
    let s = sorted(samples);
    let z = ens.shifted_partition()?.value;
    let n = s.len() as f64;
    let mut cdf = 0.0;
    let mut prev = 0.0;
    let mut d: f64 = 0.0;
    for (i, &x) in s.iter().enumerate() {
        cdf += ens.integrate_range(|_| 1.0, prev, x)?.value / z;
        prev = x;
        d = d.max(cdf - i as f64 / n).max((i + 1) as f64 / n - cdf);
    }
    Ok(d)
}

/// Two-sample KS distance.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let a = sorted(a);
    let b = sorted(b);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// 1% critical distance for a one-sample test of size `n` (Stephens'
/// finite-sample correction).
pub fn ks_critical_one_sample(n: usize) -> f64 {
    let root = (n as f64).sqrt();
    KS_COEFFICIENT_1PCT / (root + 0.12 + 0.11 / root)
}

/// 1% critical distance for two samples of sizes `n` and `m`.
pub fn ks_critical_two_sample(n: usize, m: usize) -> f64 {
    let (n, m) = (n as f64, m as f64);
    KS_COEFFICIENT_1PCT * ((n + m) / (n * m)).sqrt()
}
