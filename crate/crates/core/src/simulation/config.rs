use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize, Serializer};

use crate::distributions::DistributionModel;
use crate::error::{Error, Result};
use crate::estimators::{BoundaryCorrection, Kernel, QdensEstimator};
use crate::gld::{Parameterization, MIN_FIT_SIZE};
use crate::intervals::Method;

fn default_level() -> f64 {
    0.95
}

/// Interval arm of a coverage experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoverageMethod {
    /// Type 8 center with the true `τ`; checks the harness itself.
    Oracle,
    Method(Method),
}

impl fmt::Display for CoverageMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoverageMethod::Oracle => f.write_str("oracle"),
            CoverageMethod::Method(m) => m.fmt(f),
        }
    }
}

impl FromStr for CoverageMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim().eq_ignore_ascii_case("oracle") {
            Ok(CoverageMethod::Oracle)
        } else {
            Ok(CoverageMethod::Method(s.parse()?))
        }
    }
}

/// Pair of methods for the two samples, written `X/Y` (or `X` for both).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PairMethod {
    Oracle,
    Pair(Method, Method),
}

impl fmt::Display for PairMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PairMethod::Oracle => f.write_str("oracle"),
            PairMethod::Pair(x, y) => write!(f, "{x}/{y}"),
        }
    }
}

impl FromStr for PairMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim().eq_ignore_ascii_case("oracle") {
            return Ok(PairMethod::Oracle);
        }
        let (x, y) = match s.split_once('/') {
            Some((x, y)) => (x.parse()?, y.parse()?),
            None => {
                let m: Method = s.parse()?;
                (m, m)
            }
        };
        for m in [x, y] {
            if let Method::D(_) = m {
                return Err(Error::IncompatibleMethod(
                    m.to_string(),
                    "two-sample intervals need a method with a standard error".into(),
                ));
            }
        }
        Ok(PairMethod::Pair(x, y))
    }
}

/// Where an estimator in an MSE study takes its bandwidth from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BandwidthChoice {
    Constant(f64),
    FamilyQor(DistributionModel),
    FittedGld(Parameterization),
    AdaptivePareto,
}

/// Quantile-density estimator arm, written `<F|G|H>:<bandwidth>` where the
/// bandwidth is a number, `qor=<family>`, `gld[=rs]` or `pareto`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorSpec {
    pub estimator: QdensEstimator,
    pub bandwidth: BandwidthChoice,
}

impl fmt::Display for EstimatorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let letter = match self.estimator {
            QdensEstimator::ReciprocalF => 'F',
            QdensEstimator::DirectG => 'G',
            QdensEstimator::SoniH => 'H',
        };
        match self.bandwidth {
            BandwidthChoice::Constant(b) => write!(f, "{letter}:{b}"),
            BandwidthChoice::FamilyQor(m) => write!(f, "{letter}:qor={m}"),
            BandwidthChoice::FittedGld(Parameterization::Fkml) => write!(f, "{letter}:gld"),
            BandwidthChoice::FittedGld(Parameterization::Rs) => write!(f, "{letter}:gld=rs"),
            BandwidthChoice::AdaptivePareto => write!(f, "{letter}:pareto"),
        }
    }
}

impl FromStr for EstimatorSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::Parse(format!("invalid estimator '{s}': {why}"));
        let (head, arg) = s.trim().split_once(':').unwrap_or((s.trim(), "0.19"));
        let estimator = match head.to_ascii_uppercase().as_str() {
            "F" => QdensEstimator::ReciprocalF,
            "G" => QdensEstimator::DirectG,
            "H" => QdensEstimator::SoniH,
            _ => return Err(bad("expected F, G or H")),
        };
        let arg = arg.trim();
        let bandwidth = if let Some(family) = arg.strip_prefix("qor=") {
            BandwidthChoice::FamilyQor(family.parse()?)
        } else if arg == "gld" {
            BandwidthChoice::FittedGld(Parameterization::Fkml)
        } else if let Some(p) = arg.strip_prefix("gld=") {
            BandwidthChoice::FittedGld(p.parse()?)
        } else if arg == "pareto" {
            BandwidthChoice::AdaptivePareto
        } else {
            let b: f64 = arg.parse().map_err(|_| bad("unknown bandwidth"))?;
            if !(b > 0.0 && b < 1.0) {
                return Err(bad("bandwidth must lie in (0, 1)"));
            }
            BandwidthChoice::Constant(b)
        };
        Ok(EstimatorSpec {
            estimator,
            bandwidth,
        })
    }
}

macro_rules! string_serde {
    ($t:ty) => {
        impl Serialize for $t {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }

        impl<'de> Deserialize<'de> for $t {
            fn deserialize<D: serde::Deserializer<'de>>(
                d: D,
            ) -> std::result::Result<Self, D::Error> {
                let s = String::deserialize(d)?;
                s.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

string_serde!(CoverageMethod);
string_serde!(PairMethod);
string_serde!(EstimatorSpec);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverageSpec {
    pub generator: DistributionModel,
    pub n: usize,
    pub u_grid: Vec<f64>,
    pub methods: Vec<CoverageMethod>,
    #[serde(default = "default_level")]
    pub level: f64,
    pub replicates: usize,
    pub seed: u64,
    #[serde(default)]
    pub kernel: Kernel,
    /// Boundary correction for Method E; defaults to the fitted support.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gld_boundary: Option<BoundaryCorrection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoSampleSpec {
    pub generator_x: DistributionModel,
    pub generator_y: DistributionModel,
    pub n: usize,
    pub m: usize,
    pub u_grid: Vec<f64>,
    /// Probabilities for the second sample, paired with `u_grid`; defaults to `u_grid`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_grid: Option<Vec<f64>>,
    pub methods: Vec<PairMethod>,
    #[serde(default = "default_level")]
    pub level: f64,
    pub replicates: usize,
    pub seed: u64,
    #[serde(default)]
    pub kernel: Kernel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gld_boundary: Option<BoundaryCorrection>,
}

impl TwoSampleSpec {
    pub fn p_values(&self) -> &[f64] {
        self.p_grid.as_deref().unwrap_or(&self.u_grid)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MseSpec {
    pub generator: DistributionModel,
    pub n_list: Vec<usize>,
    pub u_grid: Vec<f64>,
    pub estimators: Vec<EstimatorSpec>,
    pub replicates: usize,
    pub seed: u64,
    #[serde(default)]
    pub kernel: Kernel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GldBiasSpec {
    pub generator: DistributionModel,
    pub n_list: Vec<usize>,
    pub u_grid: Vec<f64>,
    pub replicates: usize,
    pub seed: u64,
    #[serde(default)]
    pub parameterization: Parameterization,
}

/// A simulation study read from JSON, selected by its `kind` field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExperimentConfig {
    Coverage(CoverageSpec),
    TwoSampleCoverage(TwoSampleSpec),
    Mse(MseSpec),
    GldBias(GldBiasSpec),
}

fn spec_err(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Spec {
        path: path.into(),
        message: message.into(),
    }
}

fn check_grid(path: &str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(spec_err(path, "grid must not be empty"));
    }
    for (i, &u) in grid.iter().enumerate() {
        if !(u > 0.0 && u < 1.0) {
            return Err(spec_err(
                format!("{path}/{i}"),
                format!("{u} is outside (0, 1)"),
            ));
        }
    }
    Ok(())
}

fn check_common(replicates: usize, level: f64) -> Result<()> {
    if replicates == 0 {
        return Err(spec_err("/replicates", "must be at least 1"));
    }
    if !(level > 0.5 && level < 1.0) {
        return Err(spec_err("/level", format!("{level} is outside (0.5, 1)")));
    }
    Ok(())
}

fn check_method(
    path: &str,
    method: &Method,
    generator: &DistributionModel,
    n: usize,
) -> Result<()> {
    match method {
        Method::A(_) if n < 30 => Err(spec_err(path, format!("Method A needs n >= 30, got {n}"))),
        Method::B if !(generator.support().0 >= 0.0) => Err(spec_err(
            path,
            format!("Method B needs positive data but {generator} has support below 0"),
        )),
        Method::C(_) | Method::D(_) | Method::E(_) if n < MIN_FIT_SIZE => Err(spec_err(
            path,
            format!("GLD-based methods need n >= {MIN_FIT_SIZE}, got {n}"),
        )),
        _ if n < 2 => Err(spec_err(path, "need n >= 2")),
        _ => Ok(()),
    }
}

fn from_value<T: serde::de::DeserializeOwned>(value: serde_json::Value) -> Result<T> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        use serde_path_to_error::Segment;
        let mut path = String::new();
        for seg in e.path().iter() {
            match seg {
                Segment::Seq { index } => path.push_str(&format!("/{index}")),
                Segment::Map { key } => path.push_str(&format!("/{key}")),
                Segment::Enum { variant } => path.push_str(&format!("/{variant}")),
                Segment::Unknown => {}
            }
        }
        spec_err(path, e.into_inner().to_string())
    })
}

impl ExperimentConfig {
    /// Parses and validates a JSON experiment; errors carry a JSON pointer.
    pub fn from_json(text: &str) -> Result<Self> {
        let mut value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| spec_err("", e.to_string()))?;
        let object = value
            .as_object_mut()
            .ok_or_else(|| spec_err("", "expected a JSON object"))?;
        let kind = match object.remove("kind") {
            Some(serde_json::Value::String(k)) => k,
            Some(_) => return Err(spec_err("/kind", "expected a string")),
            None => return Err(spec_err("/kind", "missing field `kind`")),
        };
        let config = match kind.as_str() {
            "coverage" => ExperimentConfig::Coverage(from_value(value)?),
            "two_sample_coverage" => ExperimentConfig::TwoSampleCoverage(from_value(value)?),
            "mse" => ExperimentConfig::Mse(from_value(value)?),
            "gld_bias" => ExperimentConfig::GldBias(from_value(value)?),
            other => {
                return Err(spec_err(
                    "/kind",
                    format!(
                        "unknown kind `{other}`, expected coverage, two_sample_coverage, mse or gld_bias"
                    ),
                ))
            }
        };
        config.validate()?;
        Ok(config)
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ExperimentConfig::Coverage(_) => "coverage",
            ExperimentConfig::TwoSampleCoverage(_) => "two_sample_coverage",
            ExperimentConfig::Mse(_) => "mse",
            ExperimentConfig::GldBias(_) => "gld_bias",
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            ExperimentConfig::Coverage(s) => s.seed,
            ExperimentConfig::TwoSampleCoverage(s) => s.seed,
            ExperimentConfig::Mse(s) => s.seed,
            ExperimentConfig::GldBias(s) => s.seed,
        }
    }

    pub fn set_seed(&mut self, seed: u64) {
        match self {
            ExperimentConfig::Coverage(s) => s.seed = seed,
            ExperimentConfig::TwoSampleCoverage(s) => s.seed = seed,
            ExperimentConfig::Mse(s) => s.seed = seed,
            ExperimentConfig::GldBias(s) => s.seed = seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ExperimentConfig::Coverage(s) => s.validate(),
            ExperimentConfig::TwoSampleCoverage(s) => s.validate(),
            ExperimentConfig::Mse(s) => s.validate(),
            ExperimentConfig::GldBias(s) => s.validate(),
        }
    }
}

impl CoverageSpec {
    pub fn validate(&self) -> Result<()> {
        check_common(self.replicates, self.level)?;
        check_grid("/u_grid", &self.u_grid)?;
        if self.n < 2 {
            return Err(spec_err("/n", "need n >= 2"));
        }
        if self.methods.is_empty() {
            return Err(spec_err("/methods", "at least one method is required"));
        }
        for (i, m) in self.methods.iter().enumerate() {
            if let CoverageMethod::Method(m) = m {
                check_method(&format!("/methods/{i}"), m, &self.generator, self.n)?;
            }
        }
        Ok(())
    }
}

impl TwoSampleSpec {
    pub fn validate(&self) -> Result<()> {
        check_common(self.replicates, self.level)?;
        check_grid("/u_grid", &self.u_grid)?;
        if let Some(p) = &self.p_grid {
            check_grid("/p_grid", p)?;
            if p.len() != self.u_grid.len() {
                return Err(spec_err("/p_grid", "must have the same length as u_grid"));
            }
        }
        if self.methods.is_empty() {
            return Err(spec_err("/methods", "at least one method is required"));
        }
        for (i, m) in self.methods.iter().enumerate() {
            if let PairMethod::Pair(x, y) = m {
                let path = format!("/methods/{i}");
                check_method(&path, x, &self.generator_x, self.n)?;
                check_method(&path, y, &self.generator_y, self.m)?;
            }
        }
        Ok(())
    }
}

impl MseSpec {
    pub fn validate(&self) -> Result<()> {
        check_common(self.replicates, 0.95)?;
        check_grid("/u_grid", &self.u_grid)?;
        if self.n_list.is_empty() {
            return Err(spec_err("/n_list", "must not be empty"));
        }
        for (i, &n) in self.n_list.iter().enumerate() {
            if n < 2 {
                return Err(spec_err(format!("/n_list/{i}"), "need n >= 2"));
            }
            let needs_fit = self
                .estimators
                .iter()
                .any(|e| matches!(e.bandwidth, BandwidthChoice::FittedGld(_)));
            if needs_fit && n < MIN_FIT_SIZE {
                return Err(spec_err(
                    format!("/n_list/{i}"),
                    format!("GLD bandwidths need n >= {MIN_FIT_SIZE}"),
                ));
            }
        }
        if self.estimators.is_empty() {
            return Err(spec_err(
                "/estimators",
                "at least one estimator is required",
            ));
        }
        for (i, e) in self.estimators.iter().enumerate() {
            if e.bandwidth == BandwidthChoice::AdaptivePareto && self.generator.support().0 < -1.0 {
                return Err(spec_err(
                    format!("/estimators/{i}"),
                    "the Pareto bandwidth needs data above -1",
                ));
            }
        }
        Ok(())
    }
}

impl GldBiasSpec {
    pub fn validate(&self) -> Result<()> {
        check_common(self.replicates, 0.95)?;
        check_grid("/u_grid", &self.u_grid)?;
        if self.n_list.is_empty() {
            return Err(spec_err("/n_list", "must not be empty"));
        }
        for (i, &n) in self.n_list.iter().enumerate() {
            if n < MIN_FIT_SIZE {
                return Err(spec_err(
                    format!("/n_list/{i}"),
                    format!("GLD fitting needs n >= {MIN_FIT_SIZE}"),
                ));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_coverage_spec() {
        let text = r#"{"kind":"coverage","generator":"cauchy","n":400,
            "u_grid":[0.1,0.5],"methods":["A:cauchy","oracle"],"replicates":10,"seed":7}"#;
        let c = ExperimentConfig::from_json(text).unwrap();
        match &c {
            ExperimentConfig::Coverage(s) => {
                assert_eq!(s.level, 0.95);
                assert_eq!(s.methods[1], CoverageMethod::Oracle);
            }
            other => panic!("{other:?}"),
        }
        let echo = serde_json::to_string(&c).unwrap();
        assert_eq!(ExperimentConfig::from_json(&echo).unwrap(), c);
    }

    #[test]
    fn errors_carry_pointers() {
        let text = r#"{"kind":"coverage","generator":"cauchy","n":400,
            "u_grid":[0.1,1.5],"methods":["A:cauchy"],"replicates":10,"seed":7}"#;
        match ExperimentConfig::from_json(text) {
            Err(Error::Spec { path, .. }) => assert_eq!(path, "/u_grid/1"),
            other => panic!("{other:?}"),
        }
        let text = r#"{"kind":"coverage","generator":"cauchy","n":400,
            "u_grid":[0.1],"methods":["A:cauchy","Q"],"replicates":10,"seed":7}"#;
        match ExperimentConfig::from_json(text) {
            Err(Error::Spec { path, .. }) => assert_eq!(path, "/methods/1"),
            other => panic!("{other:?}"),
        }
        let text = r#"{"kind":"coverage","generator":"normal","n":400,
            "u_grid":[0.1],"methods":["B"],"replicates":10,"seed":7}"#;
        match ExperimentConfig::from_json(text) {
            Err(Error::Spec { path, .. }) => assert_eq!(path, "/methods/0"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn estimator_specs() {
        for s in [
            "G:qor=exponential",
            "F:0.19",
            "G:gld",
            "H:gld=rs",
            "G:pareto",
        ] {
            let e: EstimatorSpec = s.parse().unwrap();
            assert_eq!(e.to_string().parse::<EstimatorSpec>().unwrap(), e);
        }
        assert!("G:2".parse::<EstimatorSpec>().is_err());
        assert!("D/E".parse::<PairMethod>().is_err());
        assert_eq!(
            "E".parse::<PairMethod>().unwrap(),
            PairMethod::Pair(
                Method::E(Parameterization::Fkml),
                Method::E(Parameterization::Fkml)
            )
        );
    }
}
