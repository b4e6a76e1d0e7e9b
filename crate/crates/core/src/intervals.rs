//! Confidence intervals for quantiles and quantile differences.
//!
//! Every method except D has the form `center ± z τ̂ / √n` with
//! `τ̂ = √(u(1−u)) q̂(u)`; the methods differ in how `q̂(u)` is obtained.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize, Serializer};

use crate::data::Sample;
use crate::distributions::DistributionModel;
use crate::error::{check_probability, Error, Result};
use crate::estimators::{
    optimal_bandwidth, qdens_direct, qdens_reciprocal, qdens_soni, type8_sorted, BandwidthRule,
    BandwidthSource, BoundaryCorrection, Kernel,
};
use crate::format_sig;
use crate::gld::{gld_quantile, gld_quantile_density, Parameterization, MIN_FIT_SIZE};
use crate::numerics::{beta_quantile, std_normal_quantile};

/// Constant bandwidth used by Methods F, G and H unless overridden.
pub const DEFAULT_CONSTANT_BANDWIDTH: f64 = 0.19;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    /// Direct estimator with the bandwidth of a representative family.
    A(DistributionModel),
    /// Direct estimator with the bandwidth of a fitted Pareto II.
    B,
    /// Normal approximation with the fitted GLD quantile density.
    C(Parameterization),
    /// Order-statistic beta limits mapped through the fitted GLD.
    D(Parameterization),
    /// Direct estimator with the bandwidth of the fitted GLD.
    E(Parameterization),
    F(f64),
    G(f64),
    H(f64),
}

impl Method {
    pub fn letter(&self) -> char {
        match self {
            Method::A(_) => 'A',
            Method::B => 'B',
            Method::C(_) => 'C',
            Method::D(_) => 'D',
            Method::E(_) => 'E',
            Method::F(_) => 'F',
            Method::G(_) => 'G',
            Method::H(_) => 'H',
        }
    }

    pub fn needs_gld_fit(&self) -> bool {
        matches!(self, Method::C(_) | Method::D(_) | Method::E(_))
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::A(m) => write!(f, "A:{m}"),
            Method::B => f.write_str("B"),
            Method::C(p) | Method::D(p) | Method::E(p) => match p {
                Parameterization::Fkml => write!(f, "{}", self.letter()),
                Parameterization::Rs => write!(f, "{}:rs", self.letter()),
            },
            Method::F(b) | Method::G(b) | Method::H(b) => write!(f, "{}:{b}", self.letter()),
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a.trim())),
            None => (s, None),
        };
        let param = |arg: Option<&str>| -> Result<Parameterization> {
            arg.map_or(Ok(Parameterization::Fkml), str::parse)
        };
        let bandwidth = |arg: Option<&str>| -> Result<f64> {
            let b = match arg {
                None => DEFAULT_CONSTANT_BANDWIDTH,
                Some(a) => a.parse::<f64>().map_err(|_| {
                    Error::Parse(format!("invalid bandwidth '{a}' in method '{s}'"))
                })?,
            };
            if b > 0.0 && b < 1.0 {
                Ok(b)
            } else {
                Err(Error::Parse(format!(
                    "bandwidth {b} in method '{s}' is outside (0, 1)"
                )))
            }
        };
        match head.trim().to_ascii_uppercase().as_str() {
            "A" => {
                let model = arg.ok_or_else(|| {
                    Error::Parse("method A needs a family, e.g. 'A:cauchy'".into())
                })?;
                Ok(Method::A(model.parse()?))
            }
            "B" if arg.is_none() => Ok(Method::B),
            "C" => Ok(Method::C(param(arg)?)),
            "D" => Ok(Method::D(param(arg)?)),
            "E" => Ok(Method::E(param(arg)?)),
            "F" => Ok(Method::F(bandwidth(arg)?)),
            "G" => Ok(Method::G(bandwidth(arg)?)),
            "H" => Ok(Method::H(bandwidth(arg)?)),
            _ => Err(Error::Parse(format!(
                "unknown method '{s}' (expected A:<family>, B, C[:rs], D[:rs], E[:rs], F[:b], G[:b] or H[:b])"
            ))),
        }
    }
}

impl Serialize for Method {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Method {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CiFlag {
    /// The standard error came out as zero; the interval collapses to its center.
    Degenerate,
    /// The direct estimator went negative and was recomputed with `b = min{u, 1 − u}`.
    NegativeDensityFallback,
    /// The GLD fit failed and Method A with the Cauchy bandwidth was used.
    FitFailureFallback,
}

impl fmt::Display for CiFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CiFlag::Degenerate => "degenerate",
            CiFlag::NegativeDensityFallback => "negative_density_fallback",
            CiFlag::FitFailureFallback => "fit_failure_fallback",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalOptions {
    pub level: f64,
    pub kernel: Kernel,
    /// Smallest sample accepted by Method A.
    pub min_n_a: usize,
    /// Boundary correction for Method E; `None` picks it from the fitted support.
    pub gld_boundary: Option<BoundaryCorrection>,
}

impl Default for IntervalOptions {
    fn default() -> Self {
        IntervalOptions {
            level: 0.95,
            kernel: Kernel::Epanechnikov,
            min_n_a: 30,
            gld_boundary: None,
        }
    }
}

impl IntervalOptions {
    pub fn with_level(level: f64) -> Self {
        IntervalOptions {
            level,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuantileCI {
    pub method: String,
    pub u: f64,
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
    pub level: f64,
    #[serde(rename = "bandwidth")]
    pub bandwidth_used: Option<f64>,
    #[serde(rename = "std_width")]
    pub standardized_width: f64,
    #[serde(skip)]
    pub tau: Option<f64>,
    #[serde(skip)]
    pub n: usize,
    #[serde(skip)]
    pub flag: Option<CiFlag>,
}

impl QuantileCI {
    pub const CSV_HEADER: &'static str = "method,u,estimate,lower,upper,level,bandwidth,std_width";

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn csv_row(&self, digits: usize) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.method,
            format_sig(self.u, digits),
            format_sig(self.estimate, digits),
            format_sig(self.lower, digits),
            format_sig(self.upper, digits),
            format_sig(self.level, digits),
            self.bandwidth_used
                .map_or(String::new(), |b| format_sig(b, digits)),
            format_sig(self.standardized_width, digits),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoSampleCI {
    pub method: String,
    pub u: f64,
    pub p: f64,
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
    pub level: f64,
    pub n: usize,
    pub m: usize,
    #[serde(skip)]
    pub flags: Vec<CiFlag>,
}

impl TwoSampleCI {
    pub const CSV_HEADER: &'static str = "method,u,p,estimate,lower,upper,level,n,m";

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }

    pub fn csv_row(&self, digits: usize) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.method,
            format_sig(self.u, digits),
            format_sig(self.p, digits),
            format_sig(self.estimate, digits),
            format_sig(self.lower, digits),
            format_sig(self.upper, digits),
            format_sig(self.level, digits),
            self.n,
            self.m,
        )
    }
}

/// Point estimate and `τ̂` of a Wald-type method.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StandardError {
    pub center: f64,
    pub tau: f64,
    pub bandwidth: Option<f64>,
    pub flag: Option<CiFlag>,
}

fn check_level(level: f64) -> Result<f64> {
    if level > 0.5 && level < 1.0 {
        std_normal_quantile(0.5 + level / 2.0)
    } else {
        Err(Error::Domain(format!(
            "confidence level {level} is outside (0.5, 1)"
        )))
    }
}

fn root_uv(u: f64) -> f64 {
    (u * (1.0 - u)).sqrt()
}

/// `τ̂` from the direct estimator under `rule`, with the negative-sum fallback.
fn direct_standard_error(sample: &Sample, u: f64, rule: &BandwidthRule) -> Result<StandardError> {
    let b = optimal_bandwidth(rule, u, sample.len(), Some(sample.sorted()))?;
    let mut est = qdens_direct(sample, u, b, rule.kernel)?;
    let mut flag = None;
    if est.floored {
        est = qdens_direct(sample, u, u.min(1.0 - u), rule.kernel)?;
        flag = Some(CiFlag::NegativeDensityFallback);
    }
    let tau = root_uv(u) * est.value;
    if tau == 0.0 {
        flag = Some(CiFlag::Degenerate);
    }
    Ok(StandardError {
        center: type8_sorted(sample.sorted(), u),
        tau,
        bandwidth: Some(est.bandwidth_used),
        flag,
    })
}

fn se_method_a(
    sample: &Sample,
    u: f64,
    model: &DistributionModel,
    kernel: Kernel,
) -> Result<StandardError> {
    direct_standard_error(sample, u, &BandwidthRule::for_family(*model, kernel))
}

fn se_method_b(sample: &Sample, u: f64, kernel: Kernel) -> Result<StandardError> {
    if let Some(x) = sample.sorted().iter().find(|&&x| !(x > 0.0)) {
        return Err(Error::NonPositiveData(format!(
            "Method B needs positive data, found {x}"
        )));
    }
    let rule = BandwidthRule {
        source: BandwidthSource::AdaptiveParetoQor,
        kernel,
        boundary_correction: BoundaryCorrection::LowerOnly,
    };
    direct_standard_error(sample, u, &rule)
}

fn check_fit_size(sample: &Sample) -> Result<()> {
    if sample.len() < MIN_FIT_SIZE {
        return Err(Error::TooFewObservations {
            n: sample.len(),
            min: MIN_FIT_SIZE,
        });
    }
    Ok(())
}

fn se_method_c(sample: &Sample, u: f64, param: Parameterization) -> Result<StandardError> {
    check_fit_size(sample)?;
    let fit = sample.gld_fit(param)?;
    let tau = root_uv(u) * gld_quantile_density(&fit.params, u)?;
    Ok(StandardError {
        center: gld_quantile(&fit.params, u)?,
        tau,
        bandwidth: None,
        flag: (tau == 0.0).then_some(CiFlag::Degenerate),
    })
}

fn se_method_e(
    sample: &Sample,
    u: f64,
    param: Parameterization,
    opts: &IntervalOptions,
) -> Result<StandardError> {
    check_fit_size(sample)?;
    match sample.gld_fit(param) {
        Ok(fit) => {
            let boundary_correction = opts.gld_boundary.unwrap_or_else(|| {
                let (lo, hi) = fit.params.support();
                BoundaryCorrection::for_support(lo, hi)
            });
            let rule = BandwidthRule {
                source: BandwidthSource::FittedGldQor(fit.params),
                kernel: opts.kernel,
                boundary_correction,
            };
            direct_standard_error(sample, u, &rule)
        }
        Err(Error::FitFailure(_)) => {
            let cauchy = DistributionModel::new(crate::distributions::Family::Cauchy, 0.0, 1.0)?;
            let mut se = se_method_a(sample, u, &cauchy, opts.kernel)?;
            se.flag = Some(CiFlag::FitFailureFallback);
            Ok(se)
        }
        Err(e) => Err(e),
    }
}

fn se_constant(sample: &Sample, u: f64, method: &Method, kernel: Kernel) -> Result<StandardError> {
    let est = match *method {
        Method::F(b) => qdens_reciprocal(sample, u, b, kernel)?,
        Method::G(b) => qdens_direct(sample, u, b, kernel)?,
        Method::H(b) => qdens_soni(sample, u, b, kernel)?,
        _ => unreachable!("not a constant-bandwidth method"),
    };
    let tau = root_uv(u) * est.value;
    Ok(StandardError {
        center: type8_sorted(sample.sorted(), u),
        tau,
        bandwidth: Some(est.bandwidth_used),
        flag: (tau == 0.0).then_some(CiFlag::Degenerate),
    })
}

/// Center and `τ̂` for any method except D, which has no standard error.
pub fn standard_error(
    sample: &Sample,
    u: f64,
    method: &Method,
    opts: &IntervalOptions,
) -> Result<StandardError> {
    check_probability("u", u)?;
    match method {
        Method::A(model) => {
            if sample.len() < opts.min_n_a {
                return Err(Error::TooFewObservations {
                    n: sample.len(),
                    min: opts.min_n_a,
                });
            }
            se_method_a(sample, u, model, opts.kernel)
        }
        Method::B => se_method_b(sample, u, opts.kernel),
        Method::C(p) => se_method_c(sample, u, *p),
        Method::D(_) => Err(Error::IncompatibleMethod(
            method.to_string(),
            "Method D has no standard error".into(),
        )),
        Method::E(p) => se_method_e(sample, u, *p, opts),
        Method::F(_) | Method::G(_) | Method::H(_) => se_constant(sample, u, method, opts.kernel),
    }
}

fn wald(
    sample: &Sample,
    u: f64,
    method: &Method,
    level: f64,
    z: f64,
    se: StandardError,
) -> QuantileCI {
    let sqrt_n = (sample.len() as f64).sqrt();
    let half = z * se.tau / sqrt_n;
    QuantileCI {
        method: method.to_string(),
        u,
        estimate: se.center,
        lower: se.center - half,
        upper: se.center + half,
        level,
        bandwidth_used: se.bandwidth,
        standardized_width: 2.0 * z * se.tau,
        tau: Some(se.tau),
        n: sample.len(),
        flag: se.flag,
    }
}

/// Method D: `Q̂_GLD` applied to the beta limits of the `⌊nu⌋ + 1` order statistic.
pub fn ci_method_d(
    sample: &Sample,
    u: f64,
    level: f64,
    param: Parameterization,
) -> Result<QuantileCI> {
    check_probability("u", u)?;
    check_level(level)?;
    check_fit_size(sample)?;
    let n = sample.len();
    let m = (n as f64 * u).floor();
    let (a, b) = (m + 1.0, n as f64 - m);
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::DegenerateBeta { a, b });
    }
    let alpha = 1.0 - level;
    let fit = sample.gld_fit(param)?;
    let lower = gld_quantile(&fit.params, beta_quantile(alpha / 2.0, a, b)?)?;
    let upper = gld_quantile(&fit.params, beta_quantile(1.0 - alpha / 2.0, a, b)?)?;
    Ok(QuantileCI {
        method: Method::D(param).to_string(),
        u,
        estimate: gld_quantile(&fit.params, u)?,
        lower,
        upper,
        level,
        bandwidth_used: None,
        standardized_width: (n as f64).sqrt() * (upper - lower),
        tau: None,
        n,
        flag: (lower == upper).then_some(CiFlag::Degenerate),
    })
}

/// Interval for `Q(u)` by the given method.
pub fn confidence_interval(
    sample: &Sample,
    u: f64,
    method: &Method,
    opts: &IntervalOptions,
) -> Result<QuantileCI> {
    if let Method::D(p) = method {
        return ci_method_d(sample, u, opts.level, *p);
    }
    let z = check_level(opts.level)?;
    let se = standard_error(sample, u, method, opts)?;
    Ok(wald(sample, u, method, opts.level, z, se))
}

pub fn ci_method_a(
    sample: &Sample,
    u: f64,
    level: f64,
    qor_model: &DistributionModel,
    kernel: Kernel,
) -> Result<QuantileCI> {
    let opts = IntervalOptions {
        level,
        kernel,
        ..Default::default()
    };
    confidence_interval(sample, u, &Method::A(*qor_model), &opts)
}

pub fn ci_method_b_pareto(
    sample: &Sample,
    u: f64,
    level: f64,
    kernel: Kernel,
) -> Result<QuantileCI> {
    let opts = IntervalOptions {
        level,
        kernel,
        ..Default::default()
    };
    confidence_interval(sample, u, &Method::B, &opts)
}

pub fn ci_method_c(
    sample: &Sample,
    u: f64,
    level: f64,
    param: Parameterization,
) -> Result<QuantileCI> {
    confidence_interval(
        sample,
        u,
        &Method::C(param),
        &IntervalOptions::with_level(level),
    )
}

pub fn ci_method_e(
    sample: &Sample,
    u: f64,
    level: f64,
    kernel: Kernel,
    param: Parameterization,
) -> Result<QuantileCI> {
    let opts = IntervalOptions {
        level,
        kernel,
        ..Default::default()
    };
    confidence_interval(sample, u, &Method::E(param), &opts)
}

/// Methods F, G and H; `method` must be one of those variants.
pub fn ci_methods_fgh(
    sample: &Sample,
    u: f64,
    level: f64,
    method: &Method,
    kernel: Kernel,
) -> Result<QuantileCI> {
    if !matches!(method, Method::F(_) | Method::G(_) | Method::H(_)) {
        return Err(Error::IncompatibleMethod(
            method.to_string(),
            "expected F, G or H".into(),
        ));
    }
    let opts = IntervalOptions {
        level,
        kernel,
        ..Default::default()
    };
    confidence_interval(sample, u, method, &opts)
}

/// Interval for `x_u − y_p` from independent samples. Each side contributes
/// its Type 8 estimate and the `τ̂` of its method.
pub fn ci_two_sample(
    x: &Sample,
    y: &Sample,
    u: f64,
    p: f64,
    method_x: &Method,
    method_y: &Method,
    opts: &IntervalOptions,
) -> Result<TwoSampleCI> {
    for m in [method_x, method_y] {
        if let Method::D(_) = m {
            return Err(Error::IncompatibleMethod(
                m.to_string(),
                "two-sample intervals need a method with a standard error".into(),
            ));
        }
    }
    let z = check_level(opts.level)?;
    let sx = standard_error(x, u, method_x, opts)?;
    let sy = standard_error(y, p, method_y, opts)?;
    let (n, m) = (x.len(), y.len());
    let estimate = type8_sorted(x.sorted(), u) - type8_sorted(y.sorted(), p);
    let half = z * (sx.tau * sx.tau / n as f64 + sy.tau * sy.tau / m as f64).sqrt();
    Ok(TwoSampleCI {
        method: format!("{method_x}/{method_y}"),
        u,
        p,
        estimate,
        lower: estimate - half,
        upper: estimate + half,
        level: opts.level,
        n,
        m,
        flags: sx.flag.into_iter().chain(sy.flag).collect(),
    })
}
