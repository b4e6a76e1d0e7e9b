//! Data vectors: validated, sorted samples and text-file loading.

use std::path::Path;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::gld::{fit_sorted, GldFit, Parameterization};

/// A finite, non-empty sample kept in ascending order.
///
/// GLD fits are computed at most once per parameterization and shared by
/// every interval method that needs them.
#[derive(Debug)]
pub struct Sample {
    sorted: Vec<f64>,
    sd: f64,
    fits: [OnceLock<Result<GldFit>>; 2],
}

impl Clone for Sample {
    fn clone(&self) -> Self {
        Sample {
            sorted: self.sorted.clone(),
            sd: self.sd,
            fits: Default::default(),
        }
    }
}

impl Sample {
    pub fn new(data: &[f64]) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::EmptyData);
        }
        if let Some((index, &value)) = data.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFiniteData { index, value });
        }
        let mut sorted = data.to_vec();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        let sd = if n < 2 {
            0.0
        } else {
            let mean = sorted.iter().sum::<f64>() / n as f64;
            (sorted.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        };
        Ok(Sample {
            sorted,
            sd,
            fits: Default::default(),
        })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    /// Sample standard deviation (n − 1 denominator).
    pub fn sd(&self) -> f64 {
        self.sd
    }

    pub fn is_constant(&self) -> bool {
        self.sorted[0] == self.sorted[self.sorted.len() - 1]
    }

    /// Maximum-likelihood GLD fit, computed on first use.
    pub fn gld_fit(&self, parameterization: Parameterization) -> Result<&GldFit> {
        let slot = match parameterization {
            Parameterization::Fkml => &self.fits[0],
            Parameterization::Rs => &self.fits[1],
        };
        slot.get_or_init(|| fit_sorted(&self.sorted, parameterization))
            .as_ref()
            .map_err(Clone::clone)
    }
}

/// Parses single-column CSV or newline-delimited numbers. Blank lines and
/// lines starting with `#` are skipped; anything else that is not a finite
/// number is rejected with its 1-based line number.
pub fn parse_data(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let field = line.strip_suffix(',').unwrap_or(line).trim();
        if field.contains(',') {
            return Err(Error::DataLine {
                line: i + 1,
                message: format!("expected a single column, got '{line}'"),
            });
        }
        match field.parse::<f64>() {
            Ok(v) if v.is_finite() => out.push(v),
            _ => {
                return Err(Error::DataLine {
                    line: i + 1,
                    message: format!("'{field}' is not a finite number"),
                })
            }
        }
    }
    if out.is_empty() {
        return Err(Error::EmptyData);
    }
    Ok(out)
}

pub fn read_data(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let path = path.as_ref();
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_data(&text)
}
