//! Quantile confidence intervals driven by the quantile optimality ratio.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod data;
pub mod distributions;
pub mod error;
pub mod estimators;
pub mod gld;
pub mod intervals;
pub mod numerics;
pub mod simulation;

pub use error::{Error, Result};

/// Formats `x` with `digits` significant digits, switching to exponent
/// notation for very large or very small magnitudes.
pub fn format_sig(x: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "NaN".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..15).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{:.*e}", digits - 1, x)
    }
}
