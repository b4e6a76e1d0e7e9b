use serde::Serialize;

use crate::format_sig;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageRow {
    pub method: String,
    pub u: f64,
    /// Probability for the second sample in two-sample studies.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    pub coverage: f64,
    pub mc_error: f64,
    pub mean_std_width: f64,
    pub failures: usize,
    pub successes: usize,
    pub unreliable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageReport {
    pub rows: Vec<CoverageRow>,
    #[serde(skip)]
    pub two_sample: bool,
}

impl CoverageReport {
    pub fn to_csv(&self, digits: usize) -> String {
        let mut out = String::from(if self.two_sample {
            "method,u,p,coverage,mc_error,mean_std_width,failures\n"
        } else {
            "method,u,coverage,mc_error,mean_std_width,failures\n"
        });
        for r in &self.rows {
            out.push_str(&r.method);
            out.push(',');
            out.push_str(&format_sig(r.u, digits));
            if let Some(p) = r.p {
                out.push(',');
                out.push_str(&format_sig(p, digits));
            }
            out.push_str(&format!(
                ",{},{},{},{}\n",
                format_sig(r.coverage, digits),
                format_sig(r.mc_error, digits),
                format_sig(r.mean_std_width, digits),
                r.failures
            ));
        }
        out
    }

    pub fn unreliable(&self) -> Vec<&CoverageRow> {
        self.rows.iter().filter(|r| r.unreliable).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MseRow {
    pub estimator: String,
    pub n: usize,
    pub u: f64,
    pub q_true: f64,
    pub mean: f64,
    pub bias: f64,
    pub variance: f64,
    pub mse: f64,
    pub failures: usize,
    pub replicates: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MseReport {
    pub rows: Vec<MseRow>,
}

impl MseReport {
    pub fn to_csv(&self, digits: usize) -> String {
        let mut out = String::from("estimator,n,u,q_true,mean,bias,variance,mse,failures\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                r.estimator,
                r.n,
                format_sig(r.u, digits),
                format_sig(r.q_true, digits),
                format_sig(r.mean, digits),
                format_sig(r.bias, digits),
                format_sig(r.variance, digits),
                format_sig(r.mse, digits),
                r.failures
            ));
        }
        out
    }

    pub fn find(&self, estimator: &str, n: usize, u: f64) -> Option<&MseRow> {
        self.rows
            .iter()
            .find(|r| r.estimator == estimator && r.n == n && r.u == u)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GldBiasRow {
    pub n: usize,
    pub u: f64,
    pub q_true: f64,
    pub mean_fitted: f64,
    /// Percent difference, or the absolute difference when `absolute` is set.
    /// Negative values mean the fitted GLD under-approximates.
    pub difference: f64,
    pub absolute: bool,
    pub failures: usize,
    pub replicates: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GldBiasReport {
    pub rows: Vec<GldBiasRow>,
}

impl GldBiasReport {
    pub fn to_csv(&self, digits: usize) -> String {
        let mut out = String::from("n,u,q_true,mean_fitted,difference,unit,failures\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.n,
                format_sig(r.u, digits),
                format_sig(r.q_true, digits),
                format_sig(r.mean_fitted, digits),
                format_sig(r.difference, digits),
                if r.absolute { "absolute" } else { "percent" },
                r.failures
            ));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Report {
    Coverage(CoverageReport),
    Mse(MseReport),
    GldBias(GldBiasReport),
}

impl Report {
    pub fn to_csv(&self, digits: usize) -> String {
        match self {
            Report::Coverage(r) => r.to_csv(digits),
            Report::Mse(r) => r.to_csv(digits),
            Report::GldBias(r) => r.to_csv(digits),
        }
    }

    /// Number of rows whose failure rate exceeds the reliability threshold.
    pub fn unreliable_rows(&self) -> usize {
        match self {
            Report::Coverage(r) => r.unreliable().len(),
            Report::Mse(r) => r
                .rows
                .iter()
                .filter(|row| too_many(row.failures, row.replicates))
                .count(),
            Report::GldBias(r) => r
                .rows
                .iter()
                .filter(|row| too_many(row.failures, row.replicates))
                .count(),
        }
    }
}

fn too_many(failures: usize, replicates: usize) -> bool {
    failures as f64 > super::UNRELIABLE_FAILURE_RATE * replicates as f64
}
