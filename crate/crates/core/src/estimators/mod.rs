//! Sample quantiles and kernel quantile-density estimators.

mod bandwidth;
mod kernel;

use serde::Serialize;

pub use bandwidth::{
    optimal_bandwidth, pareto_qor, pareto_shape_mle, source_qor, BandwidthRule, BandwidthSource,
    BoundaryCorrection,
};
pub use kernel::Kernel;

use crate::data::Sample;
use crate::error::{check_probability, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum QdensEstimator {
    /// Linear combination of order statistics.
    DirectG,
    /// `1 / f̂(Q̂(u))`.
    ReciprocalF,
    /// Soni's kernel-weighted reciprocal densities.
    SoniH,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuantileDensityEstimate {
    pub u: f64,
    pub value: f64,
    pub bandwidth_used: f64,
    pub estimator: QdensEstimator,
    /// Set when a negative raw sum was replaced by zero.
    pub floored: bool,
}

/// Type 8 sample quantile of already sorted, non-empty data.
pub fn type8_sorted(sorted: &[f64], u: f64) -> f64 {
    let n = sorted.len();
    let h = ((n as f64 + 1.0 / 3.0) * u + 1.0 / 3.0).clamp(1.0, n as f64);
    let lo = h.floor();
    let i = lo as usize - 1;
    let frac = h - lo;
    if frac == 0.0 || i + 1 >= n {
        sorted[i]
    } else {
        sorted[i] + frac * (sorted[i + 1] - sorted[i])
    }
}

/// Hyndman–Fan Type 8 quantile.
pub fn sample_quantile_type8(data: &[f64], u: f64) -> Result<f64> {
    check_probability("u", u)?;
    if data.is_empty() {
        return Err(Error::EmptyData);
    }
    let mut sorted = data.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(type8_sorted(&sorted, u))
}

fn check_inputs(sample: &Sample, u: f64, b: f64) -> Result<()> {
    check_probability("u", u)?;
    if sample.len() < 2 {
        return Err(Error::TooFewObservations {
            n: sample.len(),
            min: 2,
        });
    }
    if !(b > 0.0 && b < 1.0) {
        return Err(Error::Domain(format!("bandwidth {b} is outside (0, 1)")));
    }
    Ok(())
}

/// Indices `j` in `0..=n` with `|u − j/n| < b`.
fn window(u: f64, b: f64, n: usize) -> std::ops::RangeInclusive<usize> {
    let nf = n as f64;
    let lo = ((u - b) * nf).floor().max(0.0) as usize;
    let hi = (((u + b) * nf).ceil().max(0.0) as usize).min(n);
    lo..=hi
}

/// Direct estimator `Σ X₍ᵢ₎ {k_b(u − (i−1)/n) − k_b(u − i/n)}`, evaluated
/// in spacing form. A negative sum is floored at zero and flagged.
pub fn qdens_direct(
    sample: &Sample,
    u: f64,
    b: f64,
    kernel: Kernel,
) -> Result<QuantileDensityEstimate> {
    check_inputs(sample, u, b)?;
    let x = sample.sorted();
    let n = x.len();
    let nf = n as f64;
    let mut sum = x[0] * kernel.scaled(u, b) - x[n - 1] * kernel.scaled(u - 1.0, b);
    for j in window(u, b, n) {
        if j == 0 || j >= n {
            continue;
        }
        let w = kernel.scaled(u - j as f64 / nf, b);
        if w != 0.0 {
            sum += (x[j] - x[j - 1]) * w;
        }
    }
    let floored = sum < 0.0;
    Ok(QuantileDensityEstimate {
        u,
        value: if floored { 0.0 } else { sum },
        bandwidth_used: b,
        estimator: QdensEstimator::DirectG,
        floored,
    })
}

/// Weights `∫_{(i−1)/n}^{i/n} k_b(u − y) dy` for `i = 1..n`.
pub fn kernel_quantile_weights(n: usize, u: f64, b: f64, kernel: Kernel) -> Vec<f64> {
    let nf = n as f64;
    (1..=n)
        .map(|i| {
            kernel.antiderivative((u - (i - 1) as f64 / nf) / b)
                - kernel.antiderivative((u - i as f64 / nf) / b)
        })
        .collect()
}

/// Kernel quantile estimator `Σ X₍ᵢ₎ ∫_{(i−1)/n}^{i/n} k_b(u − y) dy`.
pub fn kernel_quantile_estimate(sample: &Sample, u: f64, b: f64, kernel: Kernel) -> Result<f64> {
    check_inputs(sample, u, b)?;
    let x = sample.sorted();
    let nf = x.len() as f64;
    let mut sum = 0.0;
    for j in window(u, b, x.len()) {
        if j == 0 {
            continue;
        }
        let w = kernel.antiderivative((u - (j - 1) as f64 / nf) / b)
            - kernel.antiderivative((u - j as f64 / nf) / b);
        sum += x[j - 1] * w;
    }
    Ok(sum)
}

/// Kernel density `(1/n) Σ k_h(Xᵢ − x)` on sorted data.
fn density_sorted(sorted: &[f64], x: f64, h: f64, kernel: Kernel) -> f64 {
    let start = sorted.partition_point(|&v| v <= x - h);
    let end = sorted.partition_point(|&v| v < x + h);
    let sum: f64 = sorted[start..end]
        .iter()
        .map(|&v| kernel.scaled(v - x, h))
        .sum();
    sum / sorted.len() as f64
}

/// Kernel density estimate at `x` with data-scale bandwidth `b · sd`.
pub fn kernel_density(sample: &Sample, x: f64, b: f64, kernel: Kernel) -> Result<f64> {
    let h = b * sample.sd();
    if !(h > 0.0) {
        return Err(Error::ZeroDensity(
            "density bandwidth is zero (constant data)".into(),
        ));
    }
    Ok(density_sorted(sample.sorted(), x, h, kernel))
}

/// Reciprocal estimator `1 / f̂(Q̂(u))`.
pub fn qdens_reciprocal(
    sample: &Sample,
    u: f64,
    b: f64,
    kernel: Kernel,
) -> Result<QuantileDensityEstimate> {
    check_inputs(sample, u, b)?;
    let xq = kernel_quantile_estimate(sample, u, b, kernel)?;
    let f = kernel_density(sample, xq, b, kernel)?;
    if !(f > 0.0) {
        return Err(Error::ZeroDensity(format!(
            "no observation within kernel reach of {xq}"
        )));
    }
    Ok(QuantileDensityEstimate {
        u,
        value: 1.0 / f,
        bandwidth_used: b,
        estimator: QdensEstimator::ReciprocalF,
        floored: false,
    })
}

/// Soni's estimator `(1/n) Σ k_b(Sᵢ − u) / f̂(X₍ᵢ₎)`, where `Sᵢ` is the
/// proportion of observations less than or equal to `X₍ᵢ₎`.
pub fn qdens_soni(
    sample: &Sample,
    u: f64,
    b: f64,
    kernel: Kernel,
) -> Result<QuantileDensityEstimate> {
    check_inputs(sample, u, b)?;
    let x = sample.sorted();
    let n = x.len();
    let nf = n as f64;
    let h = b * sample.sd();
    if !(h > 0.0) {
        return Err(Error::ZeroDensity(
            "density bandwidth is zero (constant data)".into(),
        ));
    }
    let mut sum = 0.0;
    let mut i = 0;
    while i < n {
        // ties share the rank of their last member
        let mut last = i;
        while last + 1 < n && x[last + 1] == x[i] {
            last += 1;
        }
        let s = (last + 1) as f64 / nf;
        let w = kernel.scaled(s - u, b);
        if w != 0.0 {
            let f = density_sorted(x, x[i], h, kernel);
            if !(f > 0.0) {
                return Err(Error::ZeroDensity(format!(
                    "density estimate vanishes at {}",
                    x[i]
                )));
            }
            sum += (last - i + 1) as f64 * w / f;
        }
        i = last + 1;
    }
    Ok(QuantileDensityEstimate {
        u,
        value: sum / nf,
        bandwidth_used: b,
        estimator: QdensEstimator::SoniH,
        floored: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn type8_examples() {
        let d = [5.0, 3.0, 1.0, 4.0, 2.0];
        assert_eq!(sample_quantile_type8(&d, 0.5).unwrap(), 3.0);
        assert!((sample_quantile_type8(&d, 0.25).unwrap() - 5.0 / 3.0).abs() < 1e-12);
        assert_eq!(sample_quantile_type8(&[7.5; 9], 0.13).unwrap(), 7.5);
        assert_eq!(sample_quantile_type8(&d, 0.001).unwrap(), 1.0);
        assert_eq!(sample_quantile_type8(&d, 0.999).unwrap(), 5.0);
        assert!(matches!(
            sample_quantile_type8(&[], 0.5),
            Err(Error::EmptyData)
        ));
    }

    fn naive_direct(x: &[f64], u: f64, b: f64, k: Kernel) -> f64 {
        let n = x.len() as f64;
        x.iter()
            .enumerate()
            .map(|(i, xi)| {
                let i = (i + 1) as f64;
                xi * (k.scaled(u - (i - 1.0) / n, b) - k.scaled(u - i / n, b))
            })
            .sum()
    }

    #[test]
    fn direct_matches_naive_sum() {
        let raw: Vec<f64> = (0..37)
            .map(|i| ((i * 7919) % 101) as f64 / 13.0 - 2.0)
            .collect();
        let s = Sample::new(&raw).unwrap();
        for k in [Kernel::Epanechnikov, Kernel::Triangular] {
            for (u, b) in [(0.5, 0.2), (0.1, 0.3), (0.93, 0.25), (0.3, 0.01)] {
                let est = qdens_direct(&s, u, b, k).unwrap();
                let naive = naive_direct(s.sorted(), u, b, k).max(0.0);
                assert!(
                    (est.value - naive).abs() < 1e-10 * naive.abs().max(1.0),
                    "{u} {b}"
                );
            }
        }
    }

    #[test]
    fn direct_constant_and_grid() {
        let c = Sample::new(&[4.2; 50]).unwrap();
        assert_eq!(
            qdens_direct(&c, 0.5, 0.3, Kernel::Epanechnikov)
                .unwrap()
                .value,
            0.0
        );
        let grid: Vec<f64> = (1..=100).map(|i| i as f64 / 100.0).collect();
        let s = Sample::new(&grid).unwrap();
        let v = qdens_direct(&s, 0.5, 0.2, Kernel::Epanechnikov)
            .unwrap()
            .value;
        assert!((v - 1.0).abs() < 1e-3, "{v}");
    }

    #[test]
    fn kernel_quantile_weights_sum() {
        let w = kernel_quantile_weights(50, 0.5, 0.2, Kernel::Epanechnikov);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let w = kernel_quantile_weights(50, 0.05, 0.2, Kernel::Epanechnikov);
        let mass = 1.0 - Kernel::Epanechnikov.antiderivative(-0.25);
        assert!(
            (w.iter().sum::<f64>() - (mass - Kernel::Epanechnikov.antiderivative(-4.75))).abs()
                < 1e-12
        );
        let c = Sample::new(&[3.0; 40]).unwrap();
        assert!(
            (kernel_quantile_estimate(&c, 0.5, 0.2, Kernel::Epanechnikov).unwrap() - 3.0).abs()
                < 1e-12
        );
    }

    #[test]
    fn reciprocal_and_soni_degenerate() {
        let c = Sample::new(&[1.0; 10]).unwrap();
        assert!(matches!(
            qdens_reciprocal(&c, 0.5, 0.19, Kernel::Epanechnikov),
            Err(Error::ZeroDensity(_))
        ));
        assert!(matches!(
            qdens_soni(&c, 0.5, 0.19, Kernel::Epanechnikov),
            Err(Error::ZeroDensity(_))
        ));
        let gap = Sample::new(&[0.0, 100.0]).unwrap();
        assert!(matches!(
            qdens_reciprocal(&gap, 0.5, 0.05, Kernel::Epanechnikov),
            Err(Error::ZeroDensity(_))
        ));
    }

    #[test]
    fn window_covers_support() {
        for n in [2, 3, 10, 97] {
            for (u, b) in [(0.5, 0.2), (0.01, 0.5), (0.99, 0.9)] {
                let w = window(u, b, n);
                for j in 0..=n {
                    if (u - j as f64 / n as f64).abs() < b {
                        assert!(w.contains(&j));
                    }
                }
            }
        }
    }
}
