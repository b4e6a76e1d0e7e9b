//! Bracketed root finding.

use crate::error::{Error, Result};

/// An interval known to contain a sign change of some function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootBracket {
    pub lo: f64,
    pub hi: f64,
    pub f_lo: f64,
    pub f_hi: f64,
}

impl RootBracket {
    /// Evaluates `f` at both ends and checks the sign change.
    pub fn evaluate(f: &mut impl FnMut(f64) -> f64, lo: f64, hi: f64) -> Result<Self> {
        let bracket = RootBracket {
            lo,
            hi,
            f_lo: f(lo),
            f_hi: f(hi),
        };
        bracket.validate()?;
        Ok(bracket)
    }

    pub fn validate(&self) -> Result<()> {
        let signs_differ =
            self.f_lo == 0.0 || self.f_hi == 0.0 || (self.f_lo < 0.0) != (self.f_hi < 0.0);
        if self.lo < self.hi && signs_differ && !self.f_lo.is_nan() && !self.f_hi.is_nan() {
            Ok(())
        } else {
            Err(Error::InvalidBracket {
                lo: self.lo,
                hi: self.hi,
                f_lo: self.f_lo,
                f_hi: self.f_hi,
            })
        }
    }
}

const MAX_ITER: usize = 500;

/// Brent's method (inverse quadratic interpolation with bisection fallback).
///
/// Terminates when the bracket has shrunk to `tol` (plus a few ulps of the
/// current iterate) or `f` is exactly zero.
pub fn brent_root(f: &mut impl FnMut(f64) -> f64, bracket: RootBracket, tol: f64) -> Result<f64> {
    bracket.validate()?;
    let RootBracket {
        lo: mut a,
        hi: mut b,
        f_lo: mut fa,
        f_hi: mut fb,
    } = bracket;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;

    for _ in 0..MAX_ITER {
        if (fb > 0.0) == (fc > 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
        if fb.is_nan() {
            return Err(Error::Domain(format!("function returned NaN at {b}")));
        }
    }
    Ok(b)
}
