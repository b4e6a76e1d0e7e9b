//! Generalized lambda distribution in the FKML and RS parameterizations.
//!
//! FKML: `Q(u) = λ1 + ((u^λ3 − 1)/λ3 − ((1−u)^λ4 − 1)/λ4) / λ2`, with the
//! logarithmic limit when a shape parameter is (near) zero.
//! RS: `Q(u) = λ1 + (u^λ3 − (1−u)^λ4) / λ2`.
//!
//! Neither has a closed-form density, so the CDF is obtained by inverting
//! `Q` numerically and the density as `1 / q(F(x))`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Error, Result};
use crate::numerics::{brent_root, nelder_mead, NelderMeadOptions, RootBracket};

/// Shape parameters smaller than this in magnitude use the log limit.
pub const LOG_LIMIT: f64 = 1e-8;
const RS_GRID: usize = 512;
const CDF_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Parameterization {
    #[default]
    Fkml,
    Rs,
}

impl fmt::Display for Parameterization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parameterization::Fkml => "fkml",
            Parameterization::Rs => "rs",
        })
    }
}

impl FromStr for Parameterization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "fkml" | "fmkl" => Ok(Parameterization::Fkml),
            "rs" => Ok(Parameterization::Rs),
            other => Err(Error::Parse(format!(
                "unknown GLD parameterization '{other}' (expected fkml or rs)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GldParams {
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
    pub lambda4: f64,
    pub parameterization: Parameterization,
}

/// `(u^λ − 1)/λ`, continuous through λ = 0.
fn box_cox(ln_u: f64, lambda: f64) -> f64 {
    if lambda.abs() < LOG_LIMIT {
        ln_u
    } else {
        (lambda * ln_u).exp_m1() / lambda
    }
}

impl GldParams {
    pub fn fkml(l1: f64, l2: f64, l3: f64, l4: f64) -> Self {
        GldParams {
            lambda1: l1,
            lambda2: l2,
            lambda3: l3,
            lambda4: l4,
            parameterization: Parameterization::Fkml,
        }
    }

    pub fn rs(l1: f64, l2: f64, l3: f64, l4: f64) -> Self {
        GldParams {
            lambda1: l1,
            lambda2: l2,
            lambda3: l3,
            lambda4: l4,
            parameterization: Parameterization::Rs,
        }
    }

    pub fn lambdas(&self) -> [f64; 4] {
        [self.lambda1, self.lambda2, self.lambda3, self.lambda4]
    }

    pub fn with_lambdas(&self, l: [f64; 4]) -> Self {
        GldParams {
            lambda1: l[0],
            lambda2: l[1],
            lambda3: l[2],
            lambda4: l[3],
            parameterization: self.parameterization,
        }
    }

    /// FKML needs λ2 > 0. RS needs a non-zero λ2 whose sign makes
    /// `q(u) ≥ 0` on a 512-point grid.
    pub fn validate(&self) -> Result<()> {
        if !self.lambdas().iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParams(format!("non-finite lambda in {self}")));
        }
        match self.parameterization {
            Parameterization::Fkml => {
                if self.lambda2 > 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidParams(format!(
                        "FKML requires lambda2 > 0, got {}",
                        self.lambda2
                    )))
                }
            }
            Parameterization::Rs => {
                if self.lambda2 == 0.0 {
                    return Err(Error::InvalidParams("RS requires lambda2 != 0".into()));
                }
                let ok = (0..RS_GRID).all(|k| {
                    let u = (k as f64 + 0.5) / RS_GRID as f64;
                    self.quantile_density_unchecked(u) >= 0.0
                });
                if ok {
                    Ok(())
                } else {
                    Err(Error::InvalidParams(format!(
                        "RS shape ({}, {}) with lambda2 = {} gives a negative quantile density",
                        self.lambda3, self.lambda4, self.lambda2
                    )))
                }
            }
        }
    }

    pub(crate) fn quantile_unchecked(&self, u: f64) -> f64 {
        let ln_u = u.ln();
        let ln_v = (-u).ln_1p();
        match self.parameterization {
            Parameterization::Fkml => {
                self.lambda1
                    + (box_cox(ln_u, self.lambda3) - box_cox(ln_v, self.lambda4)) / self.lambda2
            }
            Parameterization::Rs => {
                self.lambda1
                    + ((self.lambda3 * ln_u).exp() - (self.lambda4 * ln_v).exp()) / self.lambda2
            }
        }
    }

    pub(crate) fn quantile_density_unchecked(&self, u: f64) -> f64 {
        let v = 1.0 - u;
        match self.parameterization {
            Parameterization::Fkml => {
                (u.powf(self.lambda3 - 1.0) + v.powf(self.lambda4 - 1.0)) / self.lambda2
            }
            Parameterization::Rs => {
                (self.lambda3 * u.powf(self.lambda3 - 1.0)
                    + self.lambda4 * v.powf(self.lambda4 - 1.0))
                    / self.lambda2
            }
        }
    }

    /// `(q, q', q'')` at `u`.
    pub(crate) fn derivatives(&self, u: f64) -> (f64, f64, f64) {
        let v = 1.0 - u;
        let (l3, l4) = (self.lambda3, self.lambda4);
        let (c3, c4) = match self.parameterization {
            Parameterization::Fkml => (1.0, 1.0),
            Parameterization::Rs => (l3, l4),
        };
        let q = (c3 * u.powf(l3 - 1.0) + c4 * v.powf(l4 - 1.0)) / self.lambda2;
        let q1 = (c3 * (l3 - 1.0) * u.powf(l3 - 2.0) - c4 * (l4 - 1.0) * v.powf(l4 - 2.0))
            / self.lambda2;
        let q2 = (c3 * (l3 - 1.0) * (l3 - 2.0) * u.powf(l3 - 3.0)
            + c4 * (l4 - 1.0) * (l4 - 2.0) * v.powf(l4 - 3.0))
            / self.lambda2;
        (q, q1, q2)
    }

    /// Support endpoints `(Q(0+), Q(1-))`; infinite when the matching
    /// tail is unbounded.
    pub fn support(&self) -> (f64, f64) {
        let lower = match self.parameterization {
            Parameterization::Fkml => {
                if self.lambda3 > LOG_LIMIT {
                    self.lambda1 - 1.0 / (self.lambda2 * self.lambda3)
                } else {
                    f64::NEG_INFINITY
                }
            }
            Parameterization::Rs => rs_endpoint(self.lambda1, self.lambda2, self.lambda3, -1.0),
        };
        let upper = match self.parameterization {
            Parameterization::Fkml => {
                if self.lambda4 > LOG_LIMIT {
                    self.lambda1 + 1.0 / (self.lambda2 * self.lambda4)
                } else {
                    f64::INFINITY
                }
            }
            Parameterization::Rs => rs_endpoint(self.lambda1, self.lambda2, self.lambda4, 1.0),
        };
        (lower, upper)
    }
}

/// Limit of `λ1 + sign·(t^λ − 1)/λ2`-type RS terms as `t → 0`: the tail
/// term is `t^λ` which tends to 0 (λ > 0), 1 (λ = 0) or ∞ (λ < 0); the
/// other power tends to 1.
fn rs_endpoint(l1: f64, l2: f64, l: f64, sign: f64) -> f64 {
    // lower: λ1 + (0^λ3 − 1)/λ2 ; upper: λ1 + (1 − 0^λ4)/λ2
    let power = if l > 0.0 {
        0.0
    } else if l == 0.0 {
        1.0
    } else {
        f64::INFINITY
    };
    let num = if sign < 0.0 { power - 1.0 } else { 1.0 - power };
    let v = l1 + num / l2;
    if v.is_nan() {
        sign * f64::INFINITY
    } else {
        v
    }
}

impl fmt::Display for GldParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "gld-{}:l1={},l2={},l3={},l4={}",
            self.parameterization, self.lambda1, self.lambda2, self.lambda3, self.lambda4
        )
    }
}

pub fn gld_quantile(params: &GldParams, u: f64) -> Result<f64> {
    check_probability("u", u)?;
    params.validate()?;
    Ok(params.quantile_unchecked(u))
}

pub fn gld_quantile_density(params: &GldParams, u: f64) -> Result<f64> {
    check_probability("u", u)?;
    params.validate()?;
    Ok(params.quantile_density_unchecked(u))
}

/// `q(u) / q''(u)`, `+∞` when `q''` vanishes.
pub fn gld_qor(params: &GldParams, u: f64) -> Result<f64> {
    check_probability("u", u)?;
    params.validate()?;
    let (q, _, q2) = params.derivatives(u);
    Ok(if q2 == 0.0 { f64::INFINITY } else { q / q2 })
}

/// Distribution function by bracketed inversion of `Q` on (1e-12, 1 − 1e-12).
pub fn gld_cdf(params: &GldParams, x: f64) -> Result<f64> {
    params.validate()?;
    Ok(cdf_unchecked(params, x))
}

fn cdf_unchecked(params: &GldParams, x: f64) -> f64 {
    let (lower, upper) = params.support();
    if x <= lower {
        return 0.0;
    }
    if x >= upper {
        return 1.0;
    }
    let mut f = |u: f64| params.quantile_unchecked(u) - x;
    let (lo, hi) = (CDF_EPS, 1.0 - CDF_EPS);
    let f_lo = f(lo);
    if f_lo >= 0.0 {
        return lo;
    }
    let f_hi = f(hi);
    if f_hi <= 0.0 {
        return hi;
    }
    let bracket = RootBracket { lo, hi, f_lo, f_hi };
    brent_root(&mut f, bracket, 1e-15).unwrap_or(f64::NAN)
}

/// Density `1 / q(F(x))` inside the support, 0 outside.
pub fn gld_pdf(params: &GldParams, x: f64) -> Result<f64> {
    params.validate()?;
    let (lower, upper) = params.support();
    if x <= lower || x >= upper {
        return Ok(0.0);
    }
    let u = cdf_unchecked(params, x);
    let q = params.quantile_density_unchecked(u);
    Ok(if q > 0.0 { 1.0 / q } else { 0.0 })
}

/// Result of a maximum-likelihood GLD fit.
#[derive(Debug, Clone, PartialEq)]
pub struct GldFit {
    pub params: GldParams,
    pub log_likelihood: f64,
    pub converged: bool,
    pub iterations: usize,
    pub n: usize,
}

#[derive(Serialize, Deserialize)]
struct GldFitJson {
    parameterization: Parameterization,
    lambda: [f64; 4],
    loglik: f64,
    converged: bool,
    n: usize,
}

impl Serialize for GldFit {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GldFitJson {
            parameterization: self.params.parameterization,
            lambda: self.params.lambdas(),
            loglik: self.log_likelihood,
            converged: self.converged,
            n: self.n,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GldFit {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = GldFitJson::deserialize(d)?;
        let l = j.lambda;
        Ok(GldFit {
            params: GldParams {
                lambda1: l[0],
                lambda2: l[1],
                lambda3: l[2],
                lambda4: l[3],
                parameterization: j.parameterization,
            },
            log_likelihood: j.loglik,
            converged: j.converged,
            iterations: 0,
            n: j.n,
        })
    }
}

pub const MIN_FIT_SIZE: usize = 20;
const MULTISTART_SHAPES: [f64; 4] = [-0.2, 0.1, 0.5, 1.5];
const INVERSION_TOL: f64 = 1e-10;

/// Log-likelihood of sorted data; `-∞` when any point lies outside the
/// support or the parameters are invalid.
pub fn gld_log_likelihood(params: &GldParams, sorted: &[f64]) -> f64 {
    if params.validate().is_err() {
        return f64::NEG_INFINITY;
    }
    sorted_log_likelihood(params, sorted)
}

fn sorted_log_likelihood(params: &GldParams, sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n == 0 {
        return 0.0;
    }
    let (lower, upper) = params.support();
    if !(sorted[0] > lower && sorted[n - 1] < upper) {
        return f64::NEG_INFINITY;
    }
    let mut ll = 0.0;
    let mut prev = CDF_EPS;
    for (i, &x) in sorted.iter().enumerate() {
        let guess = (i as f64 + 0.5) / n as f64;
        let u = invert_from(params, x, prev, guess);
        let q = params.quantile_density_unchecked(u);
        if !(q > 0.0 && q.is_finite()) {
            return f64::NEG_INFINITY;
        }
        ll -= q.ln();
        prev = u;
    }
    ll
}

/// Safeguarded Newton inversion of `Q(u) = x` on `[lo, 1 − 1e-12]`,
/// exploiting that data are visited in increasing order.
fn invert_from(params: &GldParams, x: f64, lo: f64, guess: f64) -> f64 {
    let mut lo = lo;
    let mut hi = 1.0 - CDF_EPS;
    if params.quantile_unchecked(lo) >= x {
        return lo;
    }
    if params.quantile_unchecked(hi) <= x {
        return hi;
    }
    let mut u = guess.clamp(lo, hi);
    if u <= lo || u >= hi {
        u = 0.5 * (lo + hi);
    }
    for _ in 0..200 {
        let fx = params.quantile_unchecked(u) - x;
        if fx == 0.0 {
            return u;
        }
        if fx < 0.0 {
            lo = u;
        } else {
            hi = u;
        }
        let q = params.quantile_density_unchecked(u);
        let mut next = u - fx / q;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        let step = (next - u).abs();
        u = next;
        if step < INVERSION_TOL * u.min(1.0 - u).max(1e-3) || hi - lo < INVERSION_TOL * 1e-3 {
            break;
        }
    }
    u
}

fn median_and_iqr(sorted: &[f64]) -> (f64, f64) {
    let q = |p: f64| crate::estimators::type8_sorted(sorted, p);
    (q(0.5), q(0.75) - q(0.25))
}

/// Maximum-likelihood fit by Nelder–Mead with a four-point multistart.
///
/// The data are standardized by median and interquartile range before
/// optimizing, so the fitted quantile function transforms with the data
/// under affine maps.
pub fn fit_gld_mle(data: &[f64], parameterization: Parameterization) -> Result<GldFit> {
    let n = data.len();
    if n < MIN_FIT_SIZE {
        return Err(Error::TooFewObservations {
            n,
            min: MIN_FIT_SIZE,
        });
    }
    if let Some((i, &v)) = data.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(Error::NonFiniteData { index: i, value: v });
    }
    let mut sorted = data.to_vec();
    sorted.sort_by(f64::total_cmp);
    fit_sorted(&sorted, parameterization)
}

pub(crate) fn fit_sorted(sorted: &[f64], parameterization: Parameterization) -> Result<GldFit> {
    let n = sorted.len();
    if n < MIN_FIT_SIZE {
        return Err(Error::TooFewObservations {
            n,
            min: MIN_FIT_SIZE,
        });
    }
    if sorted[0] == sorted[n - 1] {
        return Err(Error::DegenerateData("all observations are equal".into()));
    }
    let (median, iqr) = median_and_iqr(sorted);
    let scale = if iqr > 0.0 {
        iqr
    } else {
        let mean = sorted.iter().sum::<f64>() / n as f64;
        (sorted.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
    };
    let std: Vec<f64> = sorted.iter().map(|x| (x - median) / scale).collect();
    let (_, std_iqr) = median_and_iqr(&std);
    let std_iqr = if std_iqr > 0.0 { std_iqr } else { 1.0 };

    let template = GldParams::fkml(0.0, 1.0, 0.0, 0.0);
    let template = GldParams {
        parameterization,
        ..template
    };
    let objective = |x: &[f64]| {
        let p = template.with_lambdas([x[0], x[1], x[2], x[3]]);
        -gld_log_likelihood(&p, &std)
    };

    let mut best: Option<(Vec<f64>, f64, bool)> = None;
    let mut total_iterations = 0;
    for &shape in &MULTISTART_SHAPES {
        let Some(start) = feasible_start(&template, shape, std_iqr, &std) else {
            continue;
        };
        let options = NelderMeadOptions {
            initial_step: Some(vec![0.1, 0.1 * start[1].abs(), 0.1, 0.1]),
            ..NelderMeadOptions::default()
        };
        let r = nelder_mead(objective, &start, &options);
        total_iterations += r.iterations;
        if !r.min.is_finite() {
            continue;
        }
        let better = match &best {
            None => true,
            Some((bx, bv, _)) => {
                let tie = (r.min - bv).abs() <= 1e-9 * (1.0 + bv.abs());
                if tie {
                    r.argmin[2].abs() + r.argmin[3].abs() < bx[2].abs() + bx[3].abs()
                } else {
                    r.min < *bv
                }
            }
        };
        if better {
            best = Some((r.argmin, r.min, r.converged));
        }
    }
    let Some((x, _, _)) = best else {
        return Err(Error::FitFailure("no feasible starting point".into()));
    };
    // One restart from the winner to escape premature simplex collapse.
    let options = NelderMeadOptions {
        initial_step: Some(vec![0.05, 0.05 * x[1].abs(), 0.05, 0.05]),
        ..NelderMeadOptions::default()
    };
    let polish = nelder_mead(objective, &x, &options);
    total_iterations += polish.iterations;
    let std_params = template.with_lambdas([
        polish.argmin[0],
        polish.argmin[1],
        polish.argmin[2],
        polish.argmin[3],
    ]);
    let params = std_params.with_lambdas([
        median + scale * std_params.lambda1,
        std_params.lambda2 / scale,
        std_params.lambda3,
        std_params.lambda4,
    ]);
    let log_likelihood = -polish.min - n as f64 * scale.ln();
    if !log_likelihood.is_finite() {
        return Err(Error::FitFailure(
            "likelihood is not finite at the optimum".into(),
        ));
    }
    Ok(GldFit {
        params,
        log_likelihood,
        converged: polish.converged,
        iterations: total_iterations,
        n,
    })
}

/// Starting point with λ3 = λ4 = `shape`, centred on the standardized
/// median and with λ2 matched to the standardized interquartile range.
/// λ2 is shrunk (widening the support) until every point is inside.
fn feasible_start(template: &GldParams, shape: f64, iqr: f64, data: &[f64]) -> Option<Vec<f64>> {
    let unit = template.with_lambdas([0.0, 1.0, shape, shape]);
    let spread = unit.quantile_unchecked(0.75) - unit.quantile_unchecked(0.25);
    let mut l2 = spread / iqr;
    if !(l2.is_finite() && l2 != 0.0) {
        return None;
    }
    for _ in 0..60 {
        let p = template.with_lambdas([0.0, l2, shape, shape]);
        if gld_log_likelihood(&p, data).is_finite() {
            return Some(vec![0.0, l2, shape, shape]);
        }
        l2 *= 0.5;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{rng_uniform, RngStream};

    fn draw(params: &GldParams, n: usize, seed: u64) -> Vec<f64> {
        rng_uniform(RngStream::new(seed, 0), n)
            .into_iter()
            .map(|u| params.quantile_unchecked(u))
            .collect()
    }

    #[test]
    fn quantile_examples() {
        let uni = GldParams::fkml(0.0, 1.0, 1.0, 1.0);
        assert!((gld_quantile(&uni, 0.75).unwrap() - 0.5).abs() < 1e-15);
        let logistic = GldParams::fkml(0.0, 1.0, 0.0, 0.0);
        assert_eq!(gld_quantile(&logistic, 0.5).unwrap(), 0.0);
        let u: f64 = 0.2;
        assert!((gld_quantile(&logistic, u).unwrap() - (u / (1.0 - u)).ln()).abs() < 1e-14);
        let shifted = GldParams::fkml(5.0, 2.0, 1.0, 1.0);
        assert_eq!(gld_quantile(&shifted, 0.5).unwrap(), 5.0);
        assert!(gld_quantile(&uni, 1.0).is_err());
        assert!(gld_quantile(&GldParams::fkml(0.0, -1.0, 1.0, 1.0), 0.5).is_err());
    }

    #[test]
    fn log_limit_is_continuous() {
        let a = GldParams::fkml(0.0, 1.0, 0.0, 0.0);
        let b = GldParams::fkml(0.0, 1.0, 2e-8, -2e-8);
        for u in [0.01, 0.3, 0.77] {
            let d = gld_quantile(&a, u).unwrap() - gld_quantile(&b, u).unwrap();
            assert!(d.abs() < 1e-6);
        }
    }

    #[test]
    fn quantile_density_examples() {
        let uni = GldParams::fkml(0.0, 1.0, 1.0, 1.0);
        for u in [0.1, 0.5, 0.9] {
            assert!((gld_quantile_density(&uni, u).unwrap() - 2.0).abs() < 1e-15);
        }
        let logistic = GldParams::fkml(0.0, 1.0, 0.0, 0.0);
        assert!((gld_quantile_density(&logistic, 0.5).unwrap() - 4.0).abs() < 1e-14);
        for p in [
            GldParams::fkml(1.0, 0.7, 0.2, -0.1),
            GldParams::rs(0.0, 0.2, 0.2, 0.2),
        ] {
            let h = 1e-5;
            let fd = (gld_quantile(&p, 0.3 + h).unwrap() - gld_quantile(&p, 0.3 - h).unwrap())
                / (2.0 * h);
            let q = gld_quantile_density(&p, 0.3).unwrap();
            assert!(((fd - q) / q).abs() < 1e-6);
        }
    }

    #[test]
    fn qor_examples() {
        let t = GldParams::fkml(0.0, 1.0, 2.5, 2.5);
        assert!((gld_qor(&t, 0.5).unwrap() - 1.0 / 3.0).abs() < 1e-14);
        let uni = GldParams::fkml(0.0, 1.0, 1.0, 1.0);
        assert_eq!(gld_qor(&uni, 0.3).unwrap(), f64::INFINITY);
        let two = GldParams::fkml(0.0, 1.0, 2.0, 2.0);
        assert_eq!(gld_qor(&two, 0.6).unwrap(), f64::INFINITY);
        // finite-difference oracle for RS
        let rs = GldParams::rs(0.0, 1.0, 0.2, 0.2);
        let (u, h) = (0.3, 1e-4);
        let q = |u| gld_quantile_density(&rs, u).unwrap();
        let fd = q(u) / ((q(u + h) - 2.0 * q(u) + q(u - h)) / (h * h));
        assert!(((gld_qor(&rs, u).unwrap() - fd) / fd).abs() < 1e-4);
    }

    #[test]
    fn rs_validity() {
        assert!(GldParams::rs(0.0, 1.0, 0.2, 0.2).validate().is_ok());
        assert!(GldParams::rs(0.0, -1.0, -0.2, -0.2).validate().is_ok());
        assert!(GldParams::rs(0.0, 1.0, -0.2, -0.2).validate().is_err());
        assert!(GldParams::rs(0.0, 1.0, 0.2, -0.3).validate().is_err());
    }

    #[test]
    fn support_examples() {
        assert_eq!(GldParams::fkml(0.0, 1.0, 1.0, 1.0).support(), (-1.0, 1.0));
        let (lo, hi) = GldParams::fkml(0.0, 1.0, -0.1, 0.0).support();
        assert!(lo.is_infinite() && lo < 0.0 && hi.is_infinite() && hi > 0.0);
        assert_eq!(GldParams::rs(0.0, 1.0, 0.5, 0.5).support(), (-1.0, 1.0));
        let (lo, hi) = GldParams::rs(0.0, -1.0, -0.5, -0.5).support();
        assert_eq!((lo, hi), (f64::NEG_INFINITY, f64::INFINITY));
    }

    #[test]
    fn cdf_and_pdf() {
        let uni = GldParams::fkml(0.0, 1.0, 1.0, 1.0);
        assert!((gld_cdf(&uni, 0.0).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(gld_cdf(&uni, -2.0).unwrap(), 0.0);
        assert_eq!(gld_cdf(&uni, 2.0).unwrap(), 1.0);
        assert!((gld_pdf(&uni, 0.0).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(gld_pdf(&uni, 1.5).unwrap(), 0.0);
        let logistic = GldParams::fkml(0.0, 1.0, 0.0, 0.0);
        assert!((gld_pdf(&logistic, 0.0).unwrap() - 0.25).abs() < 1e-12);
        for p in [
            GldParams::fkml(0.0, 1.0, 0.2, 0.2),
            GldParams::fkml(2.0, 3.0, -0.2, 0.8),
            GldParams::rs(0.0, 0.2, 0.2, 0.2),
        ] {
            for k in 1..100 {
                let u = k as f64 / 100.0;
                let x = gld_quantile(&p, u).unwrap();
                assert!((gld_cdf(&p, x).unwrap() - u).abs() < 1e-9);
                let prod = gld_pdf(&p, x).unwrap() * gld_quantile_density(&p, u).unwrap();
                assert!((prod - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn pdf_integrates_to_one() {
        // Substituting x = Q(u) turns the integral into ∫ f(Q(u)) q(u) du;
        // integrate directly in x by composite Simpson on a wide range instead.
        let p = GldParams::fkml(0.0, 1.0, 0.2, 0.2);
        let (a, b) = p.support();
        let m = 20_000;
        let h = (b - a) / m as f64;
        let mut s = 0.0;
        for i in 0..=m {
            let x = a + i as f64 * h;
            let w = if i == 0 || i == m {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            s += w * gld_pdf(&p, x).unwrap();
        }
        s *= h / 3.0;
        assert!((s - 1.0).abs() < 1e-4, "integral {s}");
    }

    #[test]
    fn fit_refuses_small_or_constant() {
        assert!(matches!(
            fit_gld_mle(&[1.0; 10], Parameterization::Fkml),
            Err(Error::TooFewObservations { .. })
        ));
        assert!(matches!(
            fit_gld_mle(&[3.0; 40], Parameterization::Fkml),
            Err(Error::DegenerateData(_))
        ));
    }

    #[test]
    fn fit_recovers_logistic_shape() {
        let truth = GldParams::fkml(0.0, 1.0, 0.0, 0.0);
        let data = draw(&truth, 5000, 11);
        let fit = fit_gld_mle(&data, Parameterization::Fkml).unwrap();
        assert!(fit.params.lambda3.abs() < 0.15, "{:?}", fit);
        assert!(fit.params.lambda4.abs() < 0.15, "{:?}", fit);
        let mut sorted = data.clone();
        sorted.sort_by(f64::total_cmp);
        let ll_true = gld_log_likelihood(&truth, &sorted);
        assert!(fit.log_likelihood >= ll_true - 1e-6);
    }

    #[test]
    fn fit_recovers_uniform_quantiles() {
        let truth = GldParams::fkml(0.0, 1.0, 1.0, 1.0);
        let data = draw(&truth, 5000, 12);
        let fit = fit_gld_mle(&data, Parameterization::Fkml).unwrap();
        for u in [0.1, 0.5, 0.9] {
            let q = gld_quantile(&fit.params, u).unwrap();
            assert!((q - (2.0 * u - 1.0)).abs() < 0.05, "u {u}: {q}");
        }
    }

    #[test]
    fn fit_is_deterministic_and_serializes() {
        let data = draw(&GldParams::fkml(1.0, 2.0, 0.1, 0.3), 60, 3);
        let a = fit_gld_mle(&data, Parameterization::Fkml).unwrap();
        let b = fit_gld_mle(&data, Parameterization::Fkml).unwrap();
        assert_eq!(a, b);
        let json = serde_json::to_value(&a).unwrap();
        assert_eq!(json["parameterization"], "fkml");
        assert_eq!(json["lambda"].as_array().unwrap().len(), 4);
        assert_eq!(json["n"], 60);
        assert!(json.get("loglik").is_some() && json.get("converged").is_some());
    }

    #[test]
    fn rs_fit_runs() {
        let data = draw(&GldParams::rs(0.0, 0.2, 0.2, 0.2), 300, 5);
        let fit = fit_gld_mle(&data, Parameterization::Rs).unwrap();
        assert!(fit.params.validate().is_ok());
        let (lo, hi) = fit.params.support();
        assert!(data.iter().all(|&x| x > lo && x < hi));
        for u in [0.25, 0.5, 0.75] {
            let want = GldParams::rs(0.0, 0.2, 0.2, 0.2).quantile_unchecked(u);
            let got = gld_quantile(&fit.params, u).unwrap();
            assert!((got - want).abs() < 0.5, "u {u}: {got} vs {want}");
        }
    }
}
