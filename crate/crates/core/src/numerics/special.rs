//! Normal, beta and gamma distribution functions.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{check_probability, domain, Result};
use crate::numerics::roots::{brent_root, RootBracket};

const EPS: f64 = f64::EPSILON;
const CF_MAX_ITER: usize = 20_000;
const TINY: f64 = 1e-300;

/// Standard normal distribution function Φ(z).
pub fn std_normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z * FRAC_1_SQRT_2)
}

/// Standard normal density φ(z).
pub fn std_normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

/// Inverse of the standard normal distribution function.
///
/// Wichura's AS 241 (PPND16) rational approximations, accurate to about
/// 1e-16 relative over the whole open interval.
pub fn std_normal_quantile(p: f64) -> Result<f64> {
    check_probability("p", p)?;
    Ok(ppnd16(p))
}

fn ppnd16(p: f64) -> f64 {
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        let num = (((((((2.509_080_928_730_122_7e3 * r + 3.343_057_558_358_813e4) * r
            + 6.726_577_092_700_87e4)
            * r
            + 4.592_195_393_154_987e4)
            * r
            + 1.373_169_376_550_946e4)
            * r
            + 1.971_590_950_306_551_3e3)
            * r
            + 1.331_416_678_917_843_8e2)
            * r
            + 3.387_132_872_796_366_5)
            * q;
        let den = ((((((5.226_495_278_852_545e3 * r + 2.872_908_573_572_194_3e4) * r
            + 3.930_789_580_009_271e4)
            * r
            + 2.121_379_430_158_659_7e4)
            * r
            + 5.394_196_021_424_751e3)
            * r
            + 6.871_870_074_920_579e2)
            * r
            + 4.231_333_070_160_091e1)
            * r
            + 1.0;
        return num / den;
    }
    let tail = if q < 0.0 { p } else { 1.0 - p };
    let mut r = (-tail.ln()).sqrt();
    let val = if r <= 5.0 {
        r -= 1.6;
        let num = ((((((7.745_450_142_783_414e-4 * r + 2.272_384_498_926_918_4e-2) * r
            + 2.417_807_251_774_506e-1)
            * r
            + 1.270_458_252_452_368_4)
            * r
            + 3.647_848_324_763_204_5)
            * r
            + 5.769_497_221_460_691)
            * r
            + 4.630_337_846_156_545)
            * r
            + 1.423_437_110_749_683_5;
        let den = ((((((1.050_750_071_644_416_9e-9 * r + 5.475_938_084_995_345e-4) * r
            + 1.519_866_656_361_645_7e-2)
            * r
            + 1.481_039_764_274_800_8e-1)
            * r
            + 6.897_673_349_851e-1)
            * r
            + 1.676_384_830_183_803_8)
            * r
            + 2.053_191_626_637_759)
            * r
            + 1.0;
        num / den
    } else {
        r -= 5.0;
        let num = ((((((2.010_334_399_292_288_1e-7 * r + 2.711_555_568_743_487_6e-5) * r
            + 1.242_660_947_388_078_4e-3)
            * r
            + 2.653_218_952_657_612_4e-2)
            * r
            + 2.965_605_718_285_048_7e-1)
            * r
            + 1.784_826_539_917_291_3)
            * r
            + 5.463_784_911_164_114)
            * r
            + 6.657_904_643_501_103;
        let den = ((((((2.044_263_103_389_939_7e-15 * r + 1.421_511_758_316_446e-7) * r
            + 1.846_318_317_510_054_8e-5)
            * r
            + 7.868_691_311_456_133e-4)
            * r
            + 1.487_536_129_085_061_5e-2)
            * r
            + 1.369_298_809_227_358e-1)
            * r
            + 5.998_322_065_558_88e-1)
            * r
            + 1.0;
        num / den
    };
    if q < 0.0 {
        -val
    } else {
        val
    }
}

pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Regularized incomplete beta function I_x(a, b).
pub fn regularized_incomplete_beta(x: f64, a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
        return Err(domain(format!(
            "beta shape parameters ({a}, {b}) must be positive"
        )));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(domain(format!("x = {x} is outside [0, 1]")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == 1.0 {
        return Ok(1.0);
    }
    // The continued fraction converges fastest below the mean.
    if x < (a + 1.0) / (a + b + 2.0) {
        Ok(beta_front(x, a, b) * beta_cf(x, a, b) / a)
    } else {
        Ok(1.0 - beta_front(1.0 - x, b, a) * beta_cf(1.0 - x, b, a) / b)
    }
}

fn beta_front(x: f64, a: f64, b: f64) -> f64 {
    (a * x.ln() + b * (-x).ln_1p() - ln_beta(a, b)).exp()
}

/// Modified Lentz evaluation of the incomplete-beta continued fraction.
fn beta_cf(x: f64, a: f64, b: f64) -> f64 {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=CF_MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Quantile of the Beta(a, b) distribution.
pub fn beta_quantile(p: f64, a: f64, b: f64) -> Result<f64> {
    check_probability("p", p)?;
    if !(a > 0.0 && b > 0.0) {
        return Err(domain(format!(
            "beta shape parameters ({a}, {b}) must be positive"
        )));
    }
    if a == 1.0 && b == 1.0 {
        return Ok(p);
    }
    let mut f = |x: f64| {
        regularized_incomplete_beta(x, a, b)
            .map(|v| v - p)
            .unwrap_or(f64::NAN)
    };
    let bracket = RootBracket::evaluate(&mut f, 0.0, 1.0)?;
    let x = brent_root(&mut f, bracket, 1e-15)?;
    Ok(polish_newton(
        x,
        &mut f,
        |x| beta_density(x, a, b),
        0.0,
        1.0,
    ))
}

fn beta_density(x: f64, a: f64, b: f64) -> f64 {
    ((a - 1.0) * x.ln() + (b - 1.0) * (-x).ln_1p() - ln_beta(a, b)).exp()
}

/// Regularized lower incomplete gamma function P(shape, x), the CDF of
/// Gamma(shape, 1).
pub fn regularized_incomplete_gamma(x: f64, shape: f64) -> Result<f64> {
    if !(shape > 0.0 && shape.is_finite()) {
        return Err(domain(format!("gamma shape {shape} must be positive")));
    }
    if !(x >= 0.0) {
        return Err(domain(format!("x = {x} must be non-negative")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(1.0);
    }
    if x < shape + 1.0 {
        Ok(gamma_series(x, shape))
    } else {
        Ok(1.0 - gamma_cf(x, shape))
    }
}

fn gamma_series(x: f64, a: f64) -> f64 {
    let mut ap = a;
    let mut del = 1.0 / a;
    let mut sum = del;
    for _ in 0..CF_MAX_ITER {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if del.abs() < sum.abs() * EPS {
            break;
        }
    }
    sum * (-x + a * x.ln() - ln_gamma(a)).exp()
}

/// Upper tail Q(a, x) by Lentz's continued fraction.
fn gamma_cf(x: f64, a: f64) -> f64 {
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=CF_MAX_ITER {
        let i = i as f64;
        let an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    (-x + a * x.ln() - ln_gamma(a)).exp() * h
}

/// Density of Gamma(shape, 1).
pub fn gamma_density(x: f64, shape: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    ((shape - 1.0) * x.ln() - x - ln_gamma(shape)).exp()
}

/// Quantile of Gamma(shape, 1), by bracketing on the CDF.
pub fn gamma_quantile(p: f64, shape: f64) -> Result<f64> {
    check_probability("p", p)?;
    if !(shape > 0.0) {
        return Err(domain(format!("gamma shape {shape} must be positive")));
    }
    let mut f = |x: f64| {
        regularized_incomplete_gamma(x, shape)
            .map(|v| v - p)
            .unwrap_or(f64::NAN)
    };
    let mut hi = shape.max(1.0);
    while f(hi) < 0.0 {
        hi *= 2.0;
    }
    let bracket = RootBracket::evaluate(&mut f, 0.0, hi)?;
    let x = brent_root(&mut f, bracket, 1e-15 * hi.max(1.0))?;
    Ok(polish_newton(
        x,
        &mut f,
        |x| gamma_density(x, shape),
        0.0,
        f64::INFINITY,
    ))
}

/// A couple of guarded Newton steps on top of a Brent root, so the result
/// is as smooth in `p` as the underlying CDF allows.
fn polish_newton(
    mut x: f64,
    f: &mut impl FnMut(f64) -> f64,
    density: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
) -> f64 {
    for _ in 0..2 {
        let fx = f(x);
        let d = density(x);
        if !(d > 0.0 && d.is_finite() && fx.is_finite()) {
            break;
        }
        let next = x - fx / d;
        if !(next > lo && next < hi) || (next - x).abs() > 1e-6 * x.abs().max(1e-300) {
            break;
        }
        x = next;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_cdf_reference_points() {
        assert_eq!(std_normal_cdf(0.0), 0.5);
        assert!((std_normal_cdf(1.959_963_984_540_054) - 0.975).abs() < 1e-12);
        assert!(std_normal_cdf(-8.0) <= 1e-15);
        assert!(std_normal_cdf(-40.0) >= 0.0);
        assert_eq!(std_normal_cdf(40.0), 1.0);
    }

    #[test]
    fn normal_pdf_reference_points() {
        assert!((std_normal_pdf(0.0) - 0.398_942_280_401_432_7).abs() < 1e-15);
        assert!((std_normal_pdf(1.0) - 0.241_970_724_519_143_37).abs() < 1e-15);
        assert_eq!(std_normal_pdf(1.7), std_normal_pdf(-1.7));
    }

    #[test]
    fn normal_quantile_reference_points() {
        assert_eq!(std_normal_quantile(0.5).unwrap(), 0.0);
        let z = std_normal_quantile(0.975).unwrap();
        assert!((z - 1.959_963_984_540_054).abs() < 1e-12);
        let zl = std_normal_quantile(0.025).unwrap();
        assert!((zl + z).abs() < 1e-12);
        for p in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(std_normal_quantile(p).is_err());
        }
    }

    #[test]
    fn normal_quantile_matches_cdf() {
        for i in 1..1000 {
            let p = i as f64 / 1000.0;
            let z = std_normal_quantile(p).unwrap();
            assert!((std_normal_cdf(z) - p).abs() < 1e-9, "p = {p}");
        }
        for p in [1e-300, 1e-100, 1e-20, 1e-10, 1.0 - 1e-10] {
            let z = std_normal_quantile(p).unwrap();
            assert!(((std_normal_cdf(z) - p) / p.min(1.0 - p)).abs() < 1e-9);
        }
    }

    #[test]
    fn incomplete_beta_edges_and_uniform() {
        assert_eq!(regularized_incomplete_beta(0.0, 2.0, 3.0).unwrap(), 0.0);
        assert_eq!(regularized_incomplete_beta(1.0, 2.0, 3.0).unwrap(), 1.0);
        for x in [0.1, 0.37, 0.5, 0.93] {
            assert!((regularized_incomplete_beta(x, 1.0, 1.0).unwrap() - x).abs() < 1e-15);
        }
        assert!((regularized_incomplete_beta(0.5, 3.0, 3.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(regularized_incomplete_beta(0.5, 0.0, 1.0).is_err());
        assert!(regularized_incomplete_beta(1.2, 1.0, 1.0).is_err());
    }

    #[test]
    fn incomplete_beta_polynomial_case() {
        // I_x(2, 5) integrates 30 t (1 - t)^4 and has a polynomial closed form.
        let x: f64 = 0.3;
        let exact = 1.0 - (1.0 - x).powi(5) * (1.0 + 5.0 * x);
        let got = regularized_incomplete_beta(x, 2.0, 5.0).unwrap();
        assert!(((got - exact) / exact).abs() < 1e-13, "{got} vs {exact}");
    }

    #[test]
    fn beta_quantile_basic() {
        assert_eq!(beta_quantile(0.5, 1.0, 1.0).unwrap(), 0.5);
        assert_eq!(beta_quantile(0.123, 1.0, 1.0).unwrap(), 0.123);
        let x = beta_quantile(0.975, 51.0, 50.0).unwrap();
        let back = regularized_incomplete_beta(x, 51.0, 50.0).unwrap();
        assert!((back - 0.975).abs() < 1e-12);
        assert!(beta_quantile(1.0, 2.0, 2.0).is_err());
    }

    #[test]
    fn incomplete_gamma_cases() {
        for x in [0.1_f64, 1.0, 3.5, 20.0] {
            let got = regularized_incomplete_gamma(x, 1.0).unwrap();
            let exact = -(-x).exp_m1();
            assert!(((got - exact) / exact).abs() < 1e-13);
        }
        assert_eq!(regularized_incomplete_gamma(0.0, 2.5).unwrap(), 0.0);
        // P(3, 2) = 1 - e^{-2}(1 + 2 + 2).
        let exact = 1.0 - (-2.0_f64).exp() * 5.0;
        let got = regularized_incomplete_gamma(2.0, 3.0).unwrap();
        assert!(((got - exact) / exact).abs() < 1e-13);
        assert!(regularized_incomplete_gamma(-1.0, 2.0).is_err());
        assert!(regularized_incomplete_gamma(1.0, 0.0).is_err());
    }

    #[test]
    fn gamma_quantile_inverts_cdf() {
        for shape in [0.5, 1.0, 2.0, 7.5] {
            for p in [0.01, 0.25, 0.5, 0.9, 0.999] {
                let x = gamma_quantile(p, shape).unwrap();
                let back = regularized_incomplete_gamma(x, shape).unwrap();
                assert!((back - p).abs() < 1e-12, "shape {shape} p {p}");
            }
        }
    }
}
