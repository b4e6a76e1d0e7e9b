//! Seeded Monte Carlo studies of interval coverage, estimator MSE and GLD
//! quantile bias.
//!
//! Replicate `r` always draws from stream `r` of the configured seed and
//! results are reduced in replicate order, so reports do not depend on the
//! number of worker threads.

mod config;
mod report;

pub use config::{
    BandwidthChoice, CoverageMethod, CoverageSpec, EstimatorSpec, ExperimentConfig, GldBiasSpec,
    MseSpec, PairMethod, TwoSampleSpec,
};
pub use report::{
    CoverageReport, CoverageRow, GldBiasReport, GldBiasRow, MseReport, MseRow, Report,
};

use rayon::prelude::*;

use crate::data::Sample;
use crate::distributions::DistributionModel;
use crate::error::{Error, Result};
use crate::estimators::{
    optimal_bandwidth, qdens_direct, qdens_reciprocal, qdens_soni, type8_sorted, BandwidthRule,
    BandwidthSource, BoundaryCorrection, Kernel, QdensEstimator,
};
use crate::gld::gld_quantile;
use crate::intervals::{ci_two_sample, confidence_interval, IntervalOptions};
use crate::numerics::{std_normal_quantile, RngStream};

/// Share of failed replicates above which a row is marked unreliable.
pub const UNRELIABLE_FAILURE_RATE: f64 = 0.02;

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Worker threads; `None` uses every available core.
    pub threads: Option<usize>,
}

fn run_replicates<T, F>(replicates: usize, opts: &RunOptions, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = opts.threads {
        builder = builder.num_threads(t.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Io(format!("cannot start worker threads: {e}")))?;
    Ok(pool.install(|| (0..replicates as u64).into_par_iter().map(&f).collect()))
}

/// Outcome of one interval in one replicate: `(covered, standardized width)`.
type Hit = Option<(bool, f64)>;

#[derive(Default)]
struct CoverageAcc {
    hits: usize,
    ok: usize,
    width_sum: f64,
    failures: usize,
}

impl CoverageAcc {
    fn push(&mut self, hit: Hit) {
        match hit {
            Some((covered, width)) => {
                self.ok += 1;
                self.hits += covered as usize;
                self.width_sum += width;
            }
            None => self.failures += 1,
        }
    }

    fn row(&self, method: String, u: f64, p: Option<f64>, replicates: usize) -> CoverageRow {
        let c = if self.ok > 0 {
            self.hits as f64 / self.ok as f64
        } else {
            f64::NAN
        };
        CoverageRow {
            method,
            u,
            p,
            coverage: c,
            mc_error: (c * (1.0 - c) / self.ok as f64).sqrt(),
            mean_std_width: self.width_sum / self.ok as f64,
            failures: self.failures,
            successes: self.ok,
            unreliable: self.failures as f64 > UNRELIABLE_FAILURE_RATE * replicates as f64,
        }
    }
}

fn interval_options(
    level: f64,
    kernel: Kernel,
    gld_boundary: Option<BoundaryCorrection>,
) -> IntervalOptions {
    IntervalOptions {
        level,
        kernel,
        gld_boundary,
        ..Default::default()
    }
}

/// Empirical coverage of each method for the true quantiles of the generator.
pub fn run_coverage(spec: &CoverageSpec, opts: &RunOptions) -> Result<CoverageReport> {
    spec.validate()?;
    let g = &spec.generator;
    let truth: Vec<f64> = spec
        .u_grid
        .iter()
        .map(|&u| g.quantile(u))
        .collect::<Result<_>>()?;
    let oracle_tau: Vec<f64> = spec
        .u_grid
        .iter()
        .map(|&u| Ok((u * (1.0 - u)).sqrt() * g.quantile_density(u)?))
        .collect::<Result<_>>()?;
    let z = std_normal_quantile(0.5 + spec.level / 2.0)?;
    let iopts = interval_options(spec.level, spec.kernel, spec.gld_boundary);
    let n = spec.n;

    let outcomes = run_replicates(spec.replicates, opts, |r| -> Vec<Hit> {
        let cells = spec.methods.len() * spec.u_grid.len();
        let sample = match g
            .sample(n, RngStream::new(spec.seed, r))
            .and_then(|x| Sample::new(&x))
        {
            Ok(s) => s,
            Err(_) => return vec![None; cells],
        };
        let mut out = Vec::with_capacity(cells);
        for method in &spec.methods {
            for (k, &u) in spec.u_grid.iter().enumerate() {
                out.push(match method {
                    CoverageMethod::Oracle => {
                        let center = type8_sorted(sample.sorted(), u);
                        let half = z * oracle_tau[k] / (n as f64).sqrt();
                        let covered = (center - truth[k]).abs() <= half;
                        Some((covered, 2.0 * z * oracle_tau[k]))
                    }
                    CoverageMethod::Method(m) => confidence_interval(&sample, u, m, &iopts)
                        .ok()
                        .map(|ci| (ci.contains(truth[k]), ci.standardized_width)),
                });
            }
        }
        out
    })?;

    let mut rows = Vec::new();
    let nu = spec.u_grid.len();
    for (mi, method) in spec.methods.iter().enumerate() {
        for (k, &u) in spec.u_grid.iter().enumerate() {
            let mut acc = CoverageAcc::default();
            for rep in &outcomes {
                acc.push(rep[mi * nu + k]);
            }
            rows.push(acc.row(method.to_string(), u, None, spec.replicates));
        }
    }
    Ok(CoverageReport {
        rows,
        two_sample: false,
    })
}

/// Coverage of `x_u − y_p` for pairs of independent samples.
pub fn run_two_sample_coverage(spec: &TwoSampleSpec, opts: &RunOptions) -> Result<CoverageReport> {
    spec.validate()?;
    let (gx, gy) = (&spec.generator_x, &spec.generator_y);
    let ps = spec.p_values().to_vec();
    let pairs: Vec<(f64, f64)> = spec
        .u_grid
        .iter()
        .copied()
        .zip(ps.iter().copied())
        .collect();
    let truth: Vec<f64> = pairs
        .iter()
        .map(|&(u, p)| Ok(gx.quantile(u)? - gy.quantile(p)?))
        .collect::<Result<_>>()?;
    let z = std_normal_quantile(0.5 + spec.level / 2.0)?;
    let iopts = interval_options(spec.level, spec.kernel, spec.gld_boundary);
    let (n, m) = (spec.n, spec.m);
    let oracle_half: Vec<f64> = pairs
        .iter()
        .map(|&(u, p)| {
            let tx = (u * (1.0 - u)).sqrt() * gx.quantile_density(u)?;
            let ty = (p * (1.0 - p)).sqrt() * gy.quantile_density(p)?;
            Ok(z * (tx * tx / n as f64 + ty * ty / m as f64).sqrt())
        })
        .collect::<Result<_>>()?;

    let outcomes = run_replicates(spec.replicates, opts, |r| -> Vec<Hit> {
        let cells = spec.methods.len() * pairs.len();
        let uniforms: Vec<f64> = RngStream::new(spec.seed, r)
            .generator()
            .take(n + m)
            .collect();
        let samples = gx
            .quantiles_of(&uniforms[..n])
            .and_then(|x| Sample::new(&x))
            .and_then(|x| Ok((x, Sample::new(&gy.quantiles_of(&uniforms[n..])?)?)));
        let (xs, ys) = match samples {
            Ok(s) => s,
            Err(_) => return vec![None; cells],
        };
        let mut out = Vec::with_capacity(cells);
        for method in &spec.methods {
            for (k, &(u, p)) in pairs.iter().enumerate() {
                out.push(match method {
                    PairMethod::Oracle => {
                        let d = type8_sorted(xs.sorted(), u) - type8_sorted(ys.sorted(), p);
                        let covered = (d - truth[k]).abs() <= oracle_half[k];
                        Some((covered, 2.0 * oracle_half[k]))
                    }
                    PairMethod::Pair(mx, my) => ci_two_sample(&xs, &ys, u, p, mx, my, &iopts)
                        .ok()
                        .map(|ci| (ci.contains(truth[k]), ci.upper - ci.lower)),
                });
            }
        }
        out
    })?;

    let mut rows = Vec::new();
    let np = pairs.len();
    for (mi, method) in spec.methods.iter().enumerate() {
        for (k, &(u, p)) in pairs.iter().enumerate() {
            let mut acc = CoverageAcc::default();
            for rep in &outcomes {
                acc.push(rep[mi * np + k]);
            }
            rows.push(acc.row(method.to_string(), u, Some(p), spec.replicates));
        }
    }
    Ok(CoverageReport {
        rows,
        two_sample: true,
    })
}

fn estimate_qdens(sample: &Sample, u: f64, est: &EstimatorSpec, kernel: Kernel) -> Result<f64> {
    let n = sample.len();
    let b = match est.bandwidth {
        BandwidthChoice::Constant(b) => b,
        BandwidthChoice::FamilyQor(model) => {
            optimal_bandwidth(&BandwidthRule::for_family(model, kernel), u, n, None)?
        }
        BandwidthChoice::FittedGld(param) => {
            let fit = sample.gld_fit(param)?;
            let (lo, hi) = fit.params.support();
            let rule = BandwidthRule {
                source: BandwidthSource::FittedGldQor(fit.params),
                kernel,
                boundary_correction: BoundaryCorrection::for_support(lo, hi),
            };
            optimal_bandwidth(&rule, u, n, None)?
        }
        BandwidthChoice::AdaptivePareto => {
            let rule = BandwidthRule {
                source: BandwidthSource::AdaptiveParetoQor,
                kernel,
                boundary_correction: BoundaryCorrection::LowerOnly,
            };
            optimal_bandwidth(&rule, u, n, Some(sample.sorted()))?
        }
    };
    let e = match est.estimator {
        QdensEstimator::DirectG => qdens_direct(sample, u, b, kernel)?,
        QdensEstimator::ReciprocalF => qdens_reciprocal(sample, u, b, kernel)?,
        QdensEstimator::SoniH => qdens_soni(sample, u, b, kernel)?,
    };
    Ok(e.value)
}

/// Bias, variance and MSE of quantile-density estimators against the true `q(u)`.
pub fn run_mse(spec: &MseSpec, opts: &RunOptions) -> Result<MseReport> {
    spec.validate()?;
    let g = &spec.generator;
    let q_true: Vec<f64> = spec
        .u_grid
        .iter()
        .map(|&u| g.quantile_density(u))
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for &n in &spec.n_list {
        let outcomes = run_replicates(spec.replicates, opts, |r| -> Vec<Option<f64>> {
            let cells = spec.estimators.len() * spec.u_grid.len();
            let sample = match g
                .sample(n, RngStream::new(spec.seed, r))
                .and_then(|x| Sample::new(&x))
            {
                Ok(s) => s,
                Err(_) => return vec![None; cells],
            };
            let mut out = Vec::with_capacity(cells);
            for est in &spec.estimators {
                for &u in &spec.u_grid {
                    out.push(estimate_qdens(&sample, u, est, spec.kernel).ok());
                }
            }
            out
        })?;
        let nu = spec.u_grid.len();
        for (ei, est) in spec.estimators.iter().enumerate() {
            for (k, &u) in spec.u_grid.iter().enumerate() {
                let values: Vec<f64> = outcomes.iter().filter_map(|rep| rep[ei * nu + k]).collect();
                let failures = spec.replicates - values.len();
                let count = values.len() as f64;
                let mean = values.iter().sum::<f64>() / count;
                let variance = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / count;
                let mse = values.iter().map(|v| (v - q_true[k]).powi(2)).sum::<f64>() / count;
                rows.push(MseRow {
                    estimator: est.to_string(),
                    n,
                    u,
                    q_true: q_true[k],
                    mean,
                    bias: mean - q_true[k],
                    variance,
                    mse,
                    failures,
                    replicates: spec.replicates,
                });
            }
        }
    }
    Ok(MseReport { rows })
}

/// Percentage difference between the mean fitted-GLD quantile and the truth.
/// Where the true quantile is (numerically) zero the absolute difference is
/// reported instead and the row is flagged.
pub fn run_gld_bias(spec: &GldBiasSpec, opts: &RunOptions) -> Result<GldBiasReport> {
    spec.validate()?;
    let g: &DistributionModel = &spec.generator;
    let truth: Vec<f64> = spec
        .u_grid
        .iter()
        .map(|&u| g.quantile(u))
        .collect::<Result<_>>()?;
    let scale = truth.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    let mut rows = Vec::new();
    for &n in &spec.n_list {
        let outcomes = run_replicates(spec.replicates, opts, |r| -> Option<Vec<f64>> {
            let x = g.sample(n, RngStream::new(spec.seed, r)).ok()?;
            let fit = crate::gld::fit_gld_mle(&x, spec.parameterization).ok()?;
            spec.u_grid
                .iter()
                .map(|&u| gld_quantile(&fit.params, u).ok())
                .collect()
        })?;
        let fitted: Vec<&Vec<f64>> = outcomes.iter().flatten().collect();
        let failures = spec.replicates - fitted.len();
        for (k, &u) in spec.u_grid.iter().enumerate() {
            let mean = fitted.iter().map(|q| q[k]).sum::<f64>() / fitted.len() as f64;
            let diff = mean - truth[k];
            let near_zero = truth[k].abs() <= 1e-10 * scale.max(1.0);
            rows.push(GldBiasRow {
                n,
                u,
                q_true: truth[k],
                mean_fitted: mean,
                difference: if near_zero {
                    diff
                } else {
                    100.0 * diff / truth[k]
                },
                absolute: near_zero,
                failures,
                replicates: spec.replicates,
            });
        }
    }
    Ok(GldBiasReport { rows })
}

/// Runs any experiment.
pub fn run_experiment(config: &ExperimentConfig, opts: &RunOptions) -> Result<Report> {
    Ok(match config {
        ExperimentConfig::Coverage(s) => Report::Coverage(run_coverage(s, opts)?),
        ExperimentConfig::TwoSampleCoverage(s) => {
            Report::Coverage(run_two_sample_coverage(s, opts)?)
        }
        ExperimentConfig::Mse(s) => Report::Mse(run_mse(s, opts)?),
        ExperimentConfig::GldBias(s) => Report::GldBias(run_gld_bias(s, opts)?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_spec() -> CoverageSpec {
        CoverageSpec {
            generator: "logistic".parse().unwrap(),
            n: 60,
            u_grid: vec![0.25, 0.5],
            methods: vec![
                CoverageMethod::Oracle,
                CoverageMethod::Method("G:0.19".parse().unwrap()),
                CoverageMethod::Method("A:cauchy".parse().unwrap()),
            ],
            level: 0.9,
            replicates: 40,
            seed: 11,
            kernel: Kernel::Epanechnikov,
            gld_boundary: None,
        }
    }

    #[test]
    fn coverage_is_thread_independent() {
        let spec = small_spec();
        let a = run_coverage(&spec, &RunOptions { threads: Some(1) }).unwrap();
        let b = run_coverage(&spec, &RunOptions { threads: Some(3) }).unwrap();
        assert_eq!(a.to_csv(6), b.to_csv(6));
        for row in &a.rows {
            let k = (row.coverage * row.successes as f64).round();
            assert!((k - row.coverage * row.successes as f64).abs() < 1e-9);
            assert!(row.successes + row.failures == spec.replicates);
        }
    }

    #[test]
    fn gld_bias_flags_zero_truth() {
        let spec = GldBiasSpec {
            generator: "logistic".parse().unwrap(),
            n_list: vec![200],
            u_grid: vec![0.5, 0.9],
            replicates: 3,
            seed: 5,
            parameterization: Default::default(),
        };
        let rep = run_gld_bias(&spec, &RunOptions::default()).unwrap();
        assert!(rep.rows[0].absolute);
        assert!(!rep.rows[1].absolute);
    }
}
