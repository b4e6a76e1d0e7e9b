//! QOR-driven asymptotically optimal bandwidths.
//!
//! `b(u) = (κ/σ_k⁴)^{1/5} |QOR(u)|^{2/5} / n^{1/5}`, followed by an
//! optional boundary correction that keeps the kernel window inside the
//! unit interval.

use serde::{Deserialize, Serialize};

use crate::distributions::DistributionModel;
use crate::error::{check_probability, Error, Result};
use crate::estimators::Kernel;
use crate::gld::{gld_qor, GldParams};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BandwidthSource {
    FixedFamilyQor(DistributionModel),
    FittedGldQor(GldParams),
    /// Pareto II with unit scale and shape estimated by `n / Σ ln(1 + x)`.
    AdaptiveParetoQor,
    Constant(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryCorrection {
    #[default]
    None,
    /// `b ← min{u, b}`
    LowerOnly,
    /// `b ← min{u, 1 − u, b}`
    Both,
}

impl BoundaryCorrection {
    /// Lower-only correction when the support has a finite lower endpoint,
    /// none otherwise.
    pub fn for_support(lower: f64, _upper: f64) -> Self {
        if lower.is_finite() {
            BoundaryCorrection::LowerOnly
        } else {
            BoundaryCorrection::None
        }
    }

    pub fn for_model(model: &DistributionModel) -> Self {
        let (lo, hi) = model.support();
        Self::for_support(lo, hi)
    }

    fn apply(self, b: f64, u: f64) -> f64 {
        match self {
            BoundaryCorrection::None => b,
            BoundaryCorrection::LowerOnly => b.min(u),
            BoundaryCorrection::Both => b.min(u).min(1.0 - u),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandwidthRule {
    pub source: BandwidthSource,
    pub kernel: Kernel,
    pub boundary_correction: BoundaryCorrection,
}

impl BandwidthRule {
    /// Rule for a fixed family with the support-appropriate correction.
    pub fn for_family(model: DistributionModel, kernel: Kernel) -> Self {
        BandwidthRule {
            source: BandwidthSource::FixedFamilyQor(model),
            kernel,
            boundary_correction: BoundaryCorrection::for_model(&model),
        }
    }
}

/// Maximum-likelihood Pareto II shape with unit scale, `n / Σ ln(1 + x)`.
pub fn pareto_shape_mle(data: &[f64]) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::EmptyData);
    }
    if let Some(x) = data.iter().find(|&&x| !(x > -1.0)) {
        return Err(Error::NonPositiveData(format!(
            "Pareto shape estimate needs every observation > -1, found {x}"
        )));
    }
    let total: f64 = data.iter().map(|x| x.ln_1p()).sum();
    if !(total > 0.0) {
        return Err(Error::NonPositiveData(
            "sum of ln(1 + x) must be positive for the Pareto shape estimate".into(),
        ));
    }
    Ok(data.len() as f64 / total)
}

pub fn pareto_qor(a: f64, u: f64) -> f64 {
    a * a * (1.0 - u).powi(2) / ((1.0 + a) * (1.0 + 2.0 * a))
}

/// QOR value feeding the bandwidth for this source, before the absolute
/// value is taken.
pub fn source_qor(source: &BandwidthSource, u: f64, data: Option<&[f64]>) -> Result<f64> {
    match source {
        BandwidthSource::FixedFamilyQor(model) => Ok(model.qor(u)?.qor),
        BandwidthSource::FittedGldQor(params) => gld_qor(params, u),
        BandwidthSource::AdaptiveParetoQor => {
            let data = data.ok_or(Error::DataRequired("adaptive Pareto"))?;
            Ok(pareto_qor(pareto_shape_mle(data)?, u))
        }
        BandwidthSource::Constant(_) => {
            Err(Error::Domain("a constant bandwidth has no QOR".into()))
        }
    }
}

/// Bandwidth for estimating `q(u)` from `n` observations.
///
/// An infinite QOR (or any result outside (0, 1)) is clamped to
/// `min{u, 1 − u}`.
pub fn optimal_bandwidth(
    rule: &BandwidthRule,
    u: f64,
    n: usize,
    data: Option<&[f64]>,
) -> Result<f64> {
    check_probability("u", u)?;
    if n < 2 {
        return Err(Error::TooFewObservations { n, min: 2 });
    }
    let clamp = u.min(1.0 - u);
    if let BandwidthSource::Constant(b) = rule.source {
        if !(b > 0.0 && b < 1.0) {
            return Err(Error::Domain(format!(
                "constant bandwidth {b} is outside (0, 1)"
            )));
        }
        return Ok(rule.boundary_correction.apply(b, u));
    }
    let qor = source_qor(&rule.source, u, data)?;
    if qor.is_infinite() {
        return Ok(clamp);
    }
    let b = rule.kernel.bandwidth_constant() * qor.abs().powf(0.4) / (n as f64).powf(0.2);
    let b = rule.boundary_correction.apply(b, u);
    if b > 0.0 && b < 1.0 {
        Ok(b)
    } else {
        Ok(clamp)
    }
}
