//! Catalog of quantile-parameterized families.
//!
//! Every family exposes its quantile function `Q`, the quantile density
//! `q = Q'` and the first two derivatives of `q`, from which the quantile
//! optimality ratio `QOR(u) = q(u) / q''(u)` follows. Location and scale
//! enter as `Q_{a,b}(u) = a + b·Q(u)`, so `q` scales by `b` and the QOR is
//! computed on the standard member and is exactly invariant.

use std::f64::consts::{E, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{check_probability, Error, Result};
use crate::gld::{GldParams, Parameterization};
use crate::numerics::{
    gamma_density, gamma_quantile, std_normal_pdf, std_normal_quantile, RngStream,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    Uniform,
    Normal,
    Lognormal,
    Cauchy,
    Laplace,
    Logistic,
    Exponential,
    ParetoII { a: f64 },
    Gamma { alpha: f64 },
    Weibull { beta: f64 },
    TukeyLambda { lambda: f64 },
    BimodalConstantQor,
    Gh { g: f64, h: f64 },
    Gld(GldParams),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistributionModel {
    pub family: Family,
    pub location: f64,
    pub scale: f64,
}

/// `q`, `q''` and their ratio at one probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QorEvaluation {
    pub u: f64,
    pub qor: f64,
    pub q: f64,
    pub q_first: f64,
    pub q_second: f64,
}

/// `(Q, q, q', q'')` of the standard member.
#[derive(Debug, Clone, Copy)]
struct Derivs {
    quantile: f64,
    q: f64,
    q1: f64,
    q2: f64,
}

impl Family {
    pub fn standard(self) -> DistributionModel {
        DistributionModel {
            family: self,
            location: 0.0,
            scale: 1.0,
        }
    }

    fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Domain(format!("{name} must be positive, got {v}")))
            }
        };
        match *self {
            Family::ParetoII { a } => positive("a", a),
            Family::Gamma { alpha } => positive("alpha", alpha),
            Family::Weibull { beta } => positive("beta", beta),
            Family::TukeyLambda { lambda } if !lambda.is_finite() => {
                Err(Error::Domain("lambda must be finite".into()))
            }
            Family::Gh { g, h } if !(g.is_finite() && h >= 0.0 && h.is_finite()) => Err(
                Error::Domain(format!("gh requires finite g and h >= 0, got g={g}, h={h}")),
            ),
            Family::Gld(p) => p.validate(),
            _ => Ok(()),
        }
    }

    fn derivs(&self, u: f64) -> Result<Derivs> {
        let v = 1.0 - u;
        let d = match *self {
            Family::Uniform => Derivs {
                quantile: u,
                q: 1.0,
                q1: 0.0,
                q2: 0.0,
            },
            Family::Normal => {
                let z = std_normal_quantile(u)?;
                let q = 1.0 / std_normal_pdf(z);
                Derivs {
                    quantile: z,
                    q,
                    q1: z * q * q,
                    q2: q * q * q * (1.0 + 2.0 * z * z),
                }
            }
            Family::Lognormal => {
                let z = std_normal_quantile(u)?;
                let qn = 1.0 / std_normal_pdf(z);
                let qn1 = z * qn * qn;
                let qn2 = qn * qn * qn * (1.0 + 2.0 * z * z);
                let x = z.exp();
                let q = x * qn;
                let q1 = q * qn + x * qn1;
                let q2 = q1 * qn + 2.0 * q * qn1 + x * qn2;
                Derivs {
                    quantile: x,
                    q,
                    q1,
                    q2,
                }
            }
            Family::Cauchy => {
                let t = (PI * (u - 0.5)).tan();
                let s = 1.0 + t * t;
                Derivs {
                    quantile: t,
                    q: PI * s,
                    q1: 2.0 * PI * PI * t * s,
                    q2: 2.0 * PI.powi(3) * s * (1.0 + 3.0 * t * t),
                }
            }
            Family::Laplace => {
                if u < 0.5 {
                    Derivs {
                        quantile: (2.0 * u).ln(),
                        q: 1.0 / u,
                        q1: -1.0 / (u * u),
                        q2: 2.0 / (u * u * u),
                    }
                } else {
                    Derivs {
                        quantile: -(2.0 * v).ln(),
                        q: 1.0 / v,
                        q1: 1.0 / (v * v),
                        q2: 2.0 / (v * v * v),
                    }
                }
            }
            Family::Logistic => Derivs {
                quantile: u.ln() - (-u).ln_1p(),
                q: 1.0 / (u * v),
                q1: 1.0 / (v * v) - 1.0 / (u * u),
                q2: 2.0 / (u * u * u) + 2.0 / (v * v * v),
            },
            Family::Exponential => Derivs {
                quantile: -(-u).ln_1p(),
                q: 1.0 / v,
                q1: 1.0 / (v * v),
                q2: 2.0 / (v * v * v),
            },
            Family::ParetoII { a } => {
                let r = 1.0 / a;
                let ln_v = (-u).ln_1p();
                Derivs {
                    quantile: (-r * ln_v).exp_m1(),
                    q: r * (-(r + 1.0) * ln_v).exp(),
                    q1: r * (r + 1.0) * (-(r + 2.0) * ln_v).exp(),
                    q2: r * (r + 1.0) * (r + 2.0) * (-(r + 3.0) * ln_v).exp(),
                }
            }
            Family::Gamma { alpha } => {
                let x = gamma_quantile(u, alpha)?;
                let q = 1.0 / gamma_density(x, alpha);
                let g = (alpha - 1.0) / x - 1.0;
                let g1 = -(alpha - 1.0) / (x * x);
                Derivs {
                    quantile: x,
                    q,
                    q1: -g * q * q,
                    q2: (2.0 * g * g - g1) * q * q * q,
                }
            }
            Family::Weibull { beta } => {
                let l = -(-u).ln_1p();
                let x = l.powf(1.0 / beta);
                // f(x) = β x^{β-1} e^{-x^β} and e^{-x^β} = 1 - u
                let f = beta * x.powf(beta - 1.0) * v;
                let q = 1.0 / f;
                let g = (beta - 1.0) / x - beta * x.powf(beta - 1.0);
                let g1 = -(beta - 1.0) / (x * x) - beta * (beta - 1.0) * x.powf(beta - 2.0);
                Derivs {
                    quantile: x,
                    q,
                    q1: -g * q * q,
                    q2: (2.0 * g * g - g1) * q * q * q,
                }
            }
            Family::TukeyLambda { lambda } => {
                gld_derivs(&GldParams::fkml(0.0, 1.0, lambda, lambda), u)
            }
            Family::BimodalConstantQor => {
                if u < 0.5 {
                    let w = (2.0 * u).exp();
                    Derivs {
                        quantile: w - E,
                        q: 2.0 * w,
                        q1: 4.0 * w,
                        q2: 8.0 * w,
                    }
                } else {
                    let w = (2.0 * v).exp();
                    Derivs {
                        quantile: E - w,
                        q: 2.0 * w,
                        q1: -4.0 * w,
                        q2: 8.0 * w,
                    }
                }
            }
            Family::Gh { g, h } => {
                let q = |u: f64| gh_quantile_density(g, h, u);
                let (q1, q2) = richardson_derivatives(q, u)?;
                let z = std_normal_quantile(u)?;
                Derivs {
                    quantile: gh_transform(g, h, z),
                    q: q(u)?,
                    q1,
                    q2,
                }
            }
            Family::Gld(p) => gld_derivs(&p, u),
        };
        Ok(d)
    }
}

fn gld_derivs(p: &GldParams, u: f64) -> Derivs {
    let (q, q1, q2) = p.derivatives(u);
    Derivs {
        quantile: p.quantile_unchecked(u),
        q,
        q1,
        q2,
    }
}

/// Tukey g-and-h transform of a standard normal deviate.
fn gh_transform(g: f64, h: f64, z: f64) -> f64 {
    let stretch = (0.5 * h * z * z).exp();
    if g == 0.0 {
        z * stretch
    } else {
        (g * z).exp_m1() / g * stretch
    }
}

fn gh_quantile_density(g: f64, h: f64, u: f64) -> Result<f64> {
    let z = std_normal_quantile(u)?;
    let stretch = (0.5 * h * z * z).exp();
    let skew = if g == 0.0 { z } else { (g * z).exp_m1() / g };
    let dz = (g * z).exp() * stretch + skew * h * z * stretch;
    Ok(dz / std_normal_pdf(z))
}

/// First and second derivatives of a smooth function by central
/// differences with one Richardson extrapolation step.
fn richardson_derivatives(f: impl Fn(f64) -> Result<f64>, u: f64) -> Result<(f64, f64)> {
    let h = 2e-3 * u.min(1.0 - u);
    let f0 = f(u)?;
    let d = |h: f64| -> Result<(f64, f64)> {
        let fp = f(u + h)?;
        let fm = f(u - h)?;
        Ok(((fp - fm) / (2.0 * h), (fp - 2.0 * f0 + fm) / (h * h)))
    };
    let (d1a, d2a) = d(h)?;
    let (d1b, d2b) = d(0.5 * h)?;
    Ok(((4.0 * d1b - d1a) / 3.0, (4.0 * d2b - d2a) / 3.0))
}

impl DistributionModel {
    pub fn new(family: Family, location: f64, scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite() && location.is_finite()) {
            return Err(Error::Domain(format!(
                "location must be finite and scale positive, got ({location}, {scale})"
            )));
        }
        family.validate()?;
        Ok(DistributionModel {
            family,
            location,
            scale,
        })
    }

    pub fn with_location_scale(&self, location: f64, scale: f64) -> Result<Self> {
        DistributionModel::new(self.family, location, scale)
    }

    /// True for the GLD member; its λ parameters carry their own location
    /// and scale on top of `location`/`scale`.
    pub fn is_gld(&self) -> bool {
        matches!(self.family, Family::Gld(_))
    }

    fn derivs(&self, u: f64) -> Result<Derivs> {
        check_probability("u", u)?;
        self.family.validate()?;
        self.family.derivs(u)
    }

    pub fn quantile(&self, u: f64) -> Result<f64> {
        let d = self.derivs(u)?;
        Ok(self.location + self.scale * d.quantile)
    }

    pub fn quantile_density(&self, u: f64) -> Result<f64> {
        let d = self.derivs(u)?;
        Ok(self.scale * d.q)
    }

    /// `q'(u)` of this (location, scale) member.
    pub fn quantile_density_derivative(&self, u: f64) -> Result<f64> {
        let d = self.derivs(u)?;
        Ok(self.scale * d.q1)
    }

    /// Density at the `u`-th quantile, `f(Q(u)) = 1 / q(u)`.
    pub fn density_quantile(&self, u: f64) -> Result<f64> {
        Ok(1.0 / self.quantile_density(u)?)
    }

    pub fn qor(&self, u: f64) -> Result<QorEvaluation> {
        let d = self.derivs(u)?;
        let qor = if d.q2 == 0.0 {
            f64::INFINITY
        } else {
            d.q / d.q2
        };
        Ok(QorEvaluation {
            u,
            qor,
            q: self.scale * d.q,
            q_first: self.scale * d.q1,
            q_second: self.scale * d.q2,
        })
    }

    /// Support `(lower, upper)`, with infinite endpoints where unbounded.
    pub fn support(&self) -> (f64, f64) {
        let (lo, hi) = match self.family {
            Family::Uniform => (0.0, 1.0),
            Family::Normal | Family::Cauchy | Family::Laplace | Family::Logistic => {
                (f64::NEG_INFINITY, f64::INFINITY)
            }
            Family::Lognormal
            | Family::Exponential
            | Family::ParetoII { .. }
            | Family::Gamma { .. }
            | Family::Weibull { .. } => (0.0, f64::INFINITY),
            Family::TukeyLambda { lambda } => GldParams::fkml(0.0, 1.0, lambda, lambda).support(),
            Family::BimodalConstantQor => (-(E - 1.0), E - 1.0),
            Family::Gh { g, h } => {
                if h > 0.0 || g == 0.0 {
                    (f64::NEG_INFINITY, f64::INFINITY)
                } else if g > 0.0 {
                    (-1.0 / g, f64::INFINITY)
                } else {
                    (f64::NEG_INFINITY, -1.0 / g)
                }
            }
            Family::Gld(p) => p.support(),
        };
        (
            self.location + self.scale * lo,
            self.location + self.scale * hi,
        )
    }

    /// Inverse-transform sample of size `n` from `stream`.
    pub fn sample(&self, n: usize, stream: RngStream) -> Result<Vec<f64>> {
        if n == 0 {
            return Err(Error::Domain("sample size must be at least 1".into()));
        }
        self.family.validate()?;
        stream
            .generator()
            .take(n)
            .map(|u| self.quantile(u))
            .collect()
    }

    /// Writes the quantiles for already-drawn uniforms.
    pub fn quantiles_of(&self, uniforms: &[f64]) -> Result<Vec<f64>> {
        uniforms.iter().map(|&u| self.quantile(u)).collect()
    }
}

pub fn quantile(model: &DistributionModel, u: f64) -> Result<f64> {
    model.quantile(u)
}

pub fn quantile_density(model: &DistributionModel, u: f64) -> Result<f64> {
    model.quantile_density(u)
}

pub fn qor(model: &DistributionModel, u: f64) -> Result<QorEvaluation> {
    model.qor(u)
}

pub fn sample(model: &DistributionModel, n: usize, stream: RngStream) -> Result<Vec<f64>> {
    model.sample(n, stream)
}

pub fn support(model: &DistributionModel) -> (f64, f64) {
    model.support()
}

/// Names accepted by the parser, for error messages.
pub const CATALOG: &str = "uniform, normal, lognormal, cauchy, laplace, logistic, exponential, \
pareto2:a=<a>, gamma:alpha=<alpha>, weibull:beta=<beta>, tukey:lambda=<lambda>, bimodal, \
gh:g=<g>,h=<h>, gld-fkml:l1=..,l2=..,l3=..,l4=.., gld-rs:l1=..,l2=..,l3=..,l4=.. \
(any family also takes loc=<a>,scale=<b>)";

impl FromStr for DistributionModel {
    type Err = Error;

    /// Parses `name[:key=value,...]`, e.g. `pareto2:a=1` or
    /// `gld-fkml:l1=0,l2=1,l3=0.2,l4=0.2`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, rest) = match s.split_once(':') {
            Some((n, r)) => (n.trim(), r.trim()),
            None => (s, ""),
        };
        let mut args: Vec<(String, f64)> = Vec::new();
        if !rest.is_empty() {
            for part in rest.split(',') {
                let (k, v) = part.split_once('=').ok_or_else(|| {
                    Error::Parse(format!("expected key=value in '{part}' of family '{s}'"))
                })?;
                let v: f64 = v.trim().parse().map_err(|_| {
                    Error::Parse(format!("'{}' is not a number in family '{s}'", v.trim()))
                })?;
                args.push((k.trim().to_ascii_lowercase(), v));
            }
        }
        let mut take = |key: &str, default: Option<f64>| -> Result<f64> {
            match args.iter().position(|(k, _)| k == key) {
                Some(i) => Ok(args.remove(i).1),
                None => default.ok_or_else(|| {
                    Error::Parse(format!("family '{name}' requires parameter '{key}'"))
                }),
            }
        };
        let location = take("loc", Some(0.0))?;
        let scale = take("scale", Some(1.0))?;
        let family = match name.to_ascii_lowercase().as_str() {
            "uniform" => Family::Uniform,
            "normal" | "gaussian" => Family::Normal,
            "lognormal" | "ln" => Family::Lognormal,
            "cauchy" => Family::Cauchy,
            "laplace" => Family::Laplace,
            "logistic" => Family::Logistic,
            "exponential" | "exp" => Family::Exponential,
            "pareto2" | "pareto" => Family::ParetoII {
                a: take("a", None)?,
            },
            "gamma" => Family::Gamma {
                alpha: take("alpha", None)?,
            },
            "weibull" => Family::Weibull {
                beta: take("beta", None)?,
            },
            "tukey" => Family::TukeyLambda {
                lambda: take("lambda", None)?,
            },
            "bimodal" => Family::BimodalConstantQor,
            "gh" => Family::Gh {
                g: take("g", None)?,
                h: take("h", None)?,
            },
            "gld-fkml" | "gld-rs" | "gld" => {
                let l = [
                    take("l1", Some(0.0))?,
                    take("l2", Some(1.0))?,
                    take("l3", None)?,
                    take("l4", None)?,
                ];
                let mut p = GldParams::fkml(l[0], l[1], l[2], l[3]);
                if name.eq_ignore_ascii_case("gld-rs") {
                    p.parameterization = Parameterization::Rs;
                }
                Family::Gld(p)
            }
            other => {
                return Err(Error::Parse(format!(
                    "unknown family '{other}'; known families: {CATALOG}"
                )))
            }
        };
        if let Some((k, _)) = args.first() {
            return Err(Error::Parse(format!(
                "unknown parameter '{k}' for family '{name}'"
            )));
        }
        DistributionModel::new(family, location, scale)
    }
}

impl fmt::Display for DistributionModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut params: Vec<String> = Vec::new();
        let name = match self.family {
            Family::Uniform => "uniform",
            Family::Normal => "normal",
            Family::Lognormal => "lognormal",
            Family::Cauchy => "cauchy",
            Family::Laplace => "laplace",
            Family::Logistic => "logistic",
            Family::Exponential => "exponential",
            Family::ParetoII { a } => {
                params.push(format!("a={a}"));
                "pareto2"
            }
            Family::Gamma { alpha } => {
                params.push(format!("alpha={alpha}"));
                "gamma"
            }
            Family::Weibull { beta } => {
                params.push(format!("beta={beta}"));
                "weibull"
            }
            Family::TukeyLambda { lambda } => {
                params.push(format!("lambda={lambda}"));
                "tukey"
            }
            Family::BimodalConstantQor => "bimodal",
            Family::Gh { g, h } => {
                params.push(format!("g={g}"));
                params.push(format!("h={h}"));
                "gh"
            }
            Family::Gld(p) => {
                params.push(format!("l1={}", p.lambda1));
                params.push(format!("l2={}", p.lambda2));
                params.push(format!("l3={}", p.lambda3));
                params.push(format!("l4={}", p.lambda4));
                match p.parameterization {
                    Parameterization::Fkml => "gld-fkml",
                    Parameterization::Rs => "gld-rs",
                }
            }
        };
        if self.location != 0.0 {
            params.push(format!("loc={}", self.location));
        }
        if self.scale != 1.0 {
            params.push(format!("scale={}", self.scale));
        }
        if params.is_empty() {
            f.write_str(name)
        } else {
            write!(f, "{name}:{}", params.join(","))
        }
    }
}

impl Serialize for DistributionModel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for DistributionModel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(s: &str) -> DistributionModel {
        s.parse().unwrap()
    }

    #[test]
    fn quantile_examples() {
        assert_eq!(m("cauchy").quantile(0.5).unwrap(), 0.0);
        assert!((m("exponential").quantile(0.5).unwrap() - std::f64::consts::LN_2).abs() < 1e-15);
        assert!((m("pareto2:a=1").quantile(0.75).unwrap() - 3.0).abs() < 1e-14);
        assert!((m("weibull:beta=1").quantile(0.5).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert!(m("normal").quantile(0.0).is_err());
        assert!(m("normal").quantile(1.0).is_err());
    }

    #[test]
    fn quantile_density_examples() {
        assert!((m("logistic").quantile_density(0.5).unwrap() - 4.0).abs() < 1e-14);
        assert!((m("normal").quantile_density(0.5).unwrap() - (2.0 * PI).sqrt()).abs() < 1e-14);
        assert_eq!(m("uniform").quantile_density(0.3).unwrap(), 1.0);
    }

    #[test]
    fn qor_examples() {
        assert!((m("laplace").qor(0.25).unwrap().qor - 0.03125).abs() < 1e-15);
        for u in [0.1, 0.5, 0.83] {
            assert_eq!(m("bimodal").qor(u).unwrap().qor, 0.25);
        }
        assert!((m("exponential").qor(0.5).unwrap().qor - 0.125).abs() < 1e-15);
        assert!((m("normal").qor(0.5).unwrap().qor - 1.0 / (2.0 * PI)).abs() < 1e-14);
        assert!((m("cauchy").qor(0.5).unwrap().qor - 1.0 / (2.0 * PI * PI)).abs() < 1e-14);
        assert!((m("tukey:lambda=2.5").qor(0.5).unwrap().qor - 1.0 / 3.0).abs() < 1e-14);
        assert_eq!(m("uniform").qor(0.4).unwrap().qor, f64::INFINITY);
    }

    #[test]
    fn table_formulas() {
        for u in [0.05, 0.3, 0.5, 0.71, 0.95] {
            let v: f64 = 1.0 - u;
            let logistic = (u * v).powi(2) / (2.0 * (v.powi(3) + u.powi(3)));
            assert!(((m("logistic").qor(u).unwrap().qor - logistic) / logistic).abs() < 1e-12);
            let a: f64 = 2.0;
            let pareto = a * a * v * v / ((1.0 + a) * (1.0 + 2.0 * a));
            assert!(((m("pareto2:a=2").qor(u).unwrap().qor - pareto) / pareto).abs() < 1e-12);
            let z = std_normal_quantile(u).unwrap();
            let phi = std_normal_pdf(z);
            let normal = phi * phi / (1.0 + 2.0 * z * z);
            assert!(((m("normal").qor(u).unwrap().qor - normal) / normal).abs() < 1e-12);
            let t = (PI * (u - 0.5)).tan();
            let cauchy = 1.0 / (2.0 * PI * PI * (1.0 + 3.0 * t * t));
            assert!(((m("cauchy").qor(u).unwrap().qor - cauchy) / cauchy).abs() < 1e-12);
            for alpha in [0.5_f64, 2.0, 5.0] {
                let x = gamma_quantile(u, alpha).unwrap();
                let f = gamma_density(x, alpha);
                let eq = x * x * f * f
                    / ((2.0 * alpha - 1.0) * (alpha - 1.0) - 4.0 * (alpha - 1.0) * x + 2.0 * x * x);
                let got = m(&format!("gamma:alpha={alpha}")).qor(u).unwrap().qor;
                assert!(((got - eq) / eq).abs() < 1e-10);
            }
            for beta in [0.7_f64, 1.5, 3.0] {
                let x = (-v.ln()).powf(1.0 / beta);
                let f = beta * x.powf(beta - 1.0) * (-x.powf(beta)).exp();
                let eq = x * x * f * f
                    / ((2.0 * beta - 1.0) * (beta - 1.0)
                        - 3.0 * beta * (beta - 1.0) * x.powf(beta)
                        + 2.0 * beta * beta * x.powf(2.0 * beta));
                let got = m(&format!("weibull:beta={beta}")).qor(u).unwrap().qor;
                assert!(((got - eq) / eq).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn gamma_qor_can_be_negative() {
        let g = m("gamma:alpha=0.7");
        let any_negative = (1..100).any(|k| g.qor(k as f64 / 100.0).unwrap().qor < 0.0);
        assert!(any_negative);
    }

    #[test]
    fn location_scale() {
        let base = m("logistic");
        let shifted = base.with_location_scale(3.0, 2.5).unwrap();
        for u in [0.1, 0.4, 0.9] {
            let q0 = base.quantile(u).unwrap();
            assert!((shifted.quantile(u).unwrap() - (3.0 + 2.5 * q0)).abs() < 1e-13);
            assert_eq!(
                shifted.quantile_density(u).unwrap(),
                2.5 * base.quantile_density(u).unwrap()
            );
            assert_eq!(shifted.qor(u).unwrap().qor, base.qor(u).unwrap().qor);
        }
    }

    #[test]
    fn support_examples() {
        assert_eq!(m("exponential").support(), (0.0, f64::INFINITY));
        assert_eq!(m("gld-fkml:l1=0,l2=1,l3=1,l4=1").support(), (-1.0, 1.0));
        assert_eq!(m("cauchy").support(), (f64::NEG_INFINITY, f64::INFINITY));
        assert_eq!(m("bimodal").support(), (1.0 - E, E - 1.0));
        assert_eq!(
            m("normal:loc=2,scale=3").support(),
            (f64::NEG_INFINITY, f64::INFINITY)
        );
        assert_eq!(m("uniform:loc=2,scale=3").support(), (2.0, 5.0));
    }

    #[test]
    fn bimodal_quantile_inverts_cdf() {
        // F(x) = 1/2 + sign(x)/2 (1 - ln(e - |x|)) on |x| < e - 1
        let b = m("bimodal");
        for u in [0.01, 0.2, 0.5, 0.7, 0.99] {
            let x: f64 = b.quantile(u).unwrap();
            let f = 0.5 + 0.5 * x.signum() * (1.0 - (E - x.abs()).ln());
            assert!((f - u).abs() < 1e-14, "u {u}");
        }
    }

    #[test]
    fn sampling() {
        let s = RngStream::new(3, 0);
        let e = m("exponential");
        assert_eq!(e.sample(50, s).unwrap(), e.sample(50, s).unwrap());
        assert!(e.sample(0, s).is_err());
        let mut big = e.sample(100_000, RngStream::new(5, 1)).unwrap();
        big.sort_by(f64::total_cmp);
        let med = 0.5 * (big[49_999] + big[50_000]);
        assert!((med - 2f64.ln()).abs() < 0.02);
    }

    #[test]
    fn parse_round_trip() {
        for s in [
            "cauchy",
            "pareto2:a=1",
            "gamma:alpha=2",
            "tukey:lambda=2.5",
            "gld-fkml:l1=0,l2=1,l3=0.2,l4=0.2",
            "gld-rs:l1=0,l2=0.2,l3=0.2,l4=0.2",
            "gh:g=0.2,h=0.2",
            "normal:loc=1.5,scale=2",
            "weibull:beta=3",
        ] {
            let model = m(s);
            assert_eq!(model.to_string(), s);
            assert_eq!(
                model.to_string().parse::<DistributionModel>().unwrap(),
                model
            );
        }
        assert!("foo"
            .parse::<DistributionModel>()
            .unwrap_err()
            .to_string()
            .contains("cauchy"));
        assert!("pareto2".parse::<DistributionModel>().is_err());
        assert!("pareto2:a=-1".parse::<DistributionModel>().is_err());
        assert!("normal:sigma=2".parse::<DistributionModel>().is_err());
        assert!("normal:scale=0".parse::<DistributionModel>().is_err());
    }
}
