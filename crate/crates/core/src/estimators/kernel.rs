use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Second-order kernels supported on [−1, 1].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kernel {
    #[default]
    Epanechnikov,
    Triangular,
}

impl Kernel {
    pub fn evaluate(self, x: f64) -> f64 {
        if x.abs() >= 1.0 {
            return 0.0;
        }
        match self {
            Kernel::Epanechnikov => 0.75 * (1.0 - x * x),
            Kernel::Triangular => 1.0 - x.abs(),
        }
    }

    /// `∫_{-1}^{x} k(t) dt`.
    pub fn antiderivative(self, x: f64) -> f64 {
        if x <= -1.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return 1.0;
        }
        match self {
            Kernel::Epanechnikov => 0.5 + 0.75 * (x - x * x * x / 3.0),
            Kernel::Triangular => {
                if x < 0.0 {
                    0.5 * (1.0 + x) * (1.0 + x)
                } else {
                    1.0 - 0.5 * (1.0 - x) * (1.0 - x)
                }
            }
        }
    }

    /// `∫ x² k(x) dx`.
    pub fn sigma_k_sq(self) -> f64 {
        match self {
            Kernel::Epanechnikov => 0.2,
            Kernel::Triangular => 1.0 / 6.0,
        }
    }

    /// Roughness `∫ k²(x) dx`.
    pub fn kappa(self) -> f64 {
        match self {
            Kernel::Epanechnikov => 0.6,
            Kernel::Triangular => 2.0 / 3.0,
        }
    }

    /// `(κ / σ_k⁴)^{1/5}`, the kernel factor of the optimal bandwidth.
    pub fn bandwidth_constant(self) -> f64 {
        (self.kappa() / self.sigma_k_sq().powi(2)).powf(0.2)
    }

    /// Rescaled kernel `k_b(t) = k(t / b) / b`.
    pub fn scaled(self, t: f64, b: f64) -> f64 {
        self.evaluate(t / b) / b
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kernel::Epanechnikov => "epanechnikov",
            Kernel::Triangular => "triangular",
        })
    }
}

impl FromStr for Kernel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim().to_ascii_lowercase().as_str() {
            "epanechnikov" | "epa" => Ok(Kernel::Epanechnikov),
            "triangular" | "tri" => Ok(Kernel::Triangular),
            other => Err(Error::Parse(format!(
                "unknown kernel '{other}' (expected epanechnikov or triangular)"
            ))),
        }
    }
}
