//! Oracles shared by the integration tests and the acceptance harness.
#![allow(dead_code, clippy::excessive_precision)]

use qci_core::distributions::DistributionModel;

/// Ten observations with one tie (1.05 twice).
pub const FIXTURE: [f64; 10] = [2.31, -0.74, 1.05, 3.92, 0.18, 1.05, -1.66, 0.87, 2.04, 5.5];

/// Reference values for `FIXTURE` with the Epanechnikov kernel, from
/// 40-digit brute-force summation:
/// `(u, b, direct, soni, kernel quantile, reciprocal)`.
pub const FIXTURE_REFERENCE: [(f64, f64, f64, f64, f64, f64); 3] = [
    (
        0.4,
        0.19,
        2.679_727_365_505_175_3,
        2.344_795_208_531_029_7,
        0.862_218_982_358_944_5,
        2.091_787_815_722_184_3,
    ),
    (
        0.5,
        0.3,
        3.933_333_333_333_333_4,
        3.774_082_641_549_052_7,
        1.228_888_888_888_888_9,
        3.357_485_787_140_607_8,
    ),
    (
        0.25,
        0.2,
        7.464_843_75,
        5.246_162_658_044_284_2,
        0.075_429_687_499_999_99,
        6.011_625_689_342_168_2,
    ),
];

/// Every cataloged family with a spread of shapes.
pub fn qor_families() -> Vec<DistributionModel> {
    [
        "uniform",
        "normal",
        "lognormal",
        "cauchy",
        "laplace",
        "logistic",
        "exponential",
        "pareto2:a=0.5",
        "pareto2:a=1",
        "pareto2:a=2",
        "pareto2:a=5",
        "gamma:alpha=0.5",
        "gamma:alpha=1",
        "gamma:alpha=2",
        "gamma:alpha=5",
        "weibull:beta=0.5",
        "weibull:beta=1",
        "weibull:beta=1.5",
        "weibull:beta=3",
        "tukey:lambda=-0.2",
        "tukey:lambda=0.14",
        "tukey:lambda=0.5",
        "tukey:lambda=2.5",
        "bimodal",
        "gh:g=0.2,h=0.2",
        "gh:g=0,h=0.1",
        "gh:g=0.5,h=0",
        "gld-fkml:l1=0,l2=1,l3=0.1,l4=0.3",
        "gld-fkml:l1=1,l2=2,l3=-0.1,l4=0.6",
        "gld-rs:l1=0,l2=0.2,l3=0.15,l4=0.3",
    ]
    .iter()
    .map(|s| s.parse().expect("catalog entry"))
    .collect()
}

pub fn u_grid() -> Vec<f64> {
    (1..=19).map(|k| k as f64 * 0.05).collect()
}

/// Families whose quantile density has a kink at the median.
pub fn kinked_at_median(model: &DistributionModel) -> bool {
    let s = model.to_string();
    s.starts_with("laplace") || s.starts_with("bimodal")
}

/// Second derivative of `q` by differences of the closed-form `q`.
/// Central three-point stencil, or a second-order forward stencil when
/// `forward` is set (used at kinks, from the side the closed form takes).
pub fn q_second_fd(model: &DistributionModel, u: f64, h: f64, forward: bool) -> f64 {
    let q = |t: f64| model.quantile_density(t).unwrap();
    if forward {
        (2.0 * q(u) - 5.0 * q(u + h) + 4.0 * q(u + 2.0 * h) - q(u + 3.0 * h)) / (h * h)
    } else {
        (q(u + h) - 2.0 * q(u) + q(u - h)) / (h * h)
    }
}

/// Fourth-order central second difference of `q`.
pub fn q_second_fd4(model: &DistributionModel, u: f64, h: f64) -> f64 {
    let q = |t: f64| model.quantile_density(t).unwrap();
    (-q(u + 2.0 * h) + 16.0 * q(u + h) - 30.0 * q(u) + 16.0 * q(u - h) - q(u - 2.0 * h))
        / (12.0 * h * h)
}

/// Third derivative of the closed-form quantile function.
pub fn q_second_from_quantile(model: &DistributionModel, u: f64, h: f64) -> f64 {
    let big_q = |t: f64| model.quantile(t).unwrap();
    (big_q(u + 2.0 * h) - 2.0 * big_q(u + h) + 2.0 * big_q(u - h) - big_q(u - 2.0 * h))
        / (2.0 * h * h * h)
}

pub fn rel_err(got: f64, want: f64) -> f64 {
    if got == want {
        0.0
    } else {
        ((got - want) / want).abs()
    }
}

/// Outcome of one QOR oracle comparison.
pub struct QorCheck {
    pub model: String,
    pub u: f64,
    pub closed: f64,
    pub oracle: f64,
    pub tol: f64,
}

impl QorCheck {
    pub fn ok(&self) -> bool {
        if self.closed.is_infinite() || self.oracle.is_infinite() {
            return self.closed == self.oracle;
        }
        rel_err(self.closed, self.oracle) <= self.tol
    }
}

/// Compares closed-form QORs against difference quotients of `q` for every
/// family and every `u` on the 0.05 grid: 1e-4 with the three-point stencil,
/// and 1e-6 with the five-point stencil where `q''` is not close to zero.
pub fn qor_oracle_checks() -> Vec<QorCheck> {
    let mut out = Vec::new();
    for model in qor_families() {
        for u in u_grid() {
            let closed = model.qor(u).unwrap().qor;
            let q = model.quantile_density(u).unwrap();
            let kink = kinked_at_median(&model) && (u - 0.5).abs() < 1e-12;
            let second = q_second_fd(&model, u, 1e-4, kink);
            let oracle = if second == 0.0 {
                f64::INFINITY
            } else {
                q / second
            };
            out.push(QorCheck {
                model: model.to_string(),
                u,
                closed,
                oracle,
                tol: 1e-4,
            });
            let well_conditioned = closed.is_finite() && closed.abs() < 1e3 && !kink;
            let is_gh = model.to_string().starts_with("gh");
            if well_conditioned && !is_gh {
                let second4 = q_second_fd4(&model, u, 0.01 * u.min(1.0 - u));
                out.push(QorCheck {
                    model: model.to_string(),
                    u,
                    closed,
                    oracle: q / second4,
                    tol: 1e-6,
                });
            }
            if is_gh {
                // q itself is numeric for g-and-h, so also difference Q directly
                let third = q_second_from_quantile(&model, u, 2e-3 * u.min(1.0 - u));
                out.push(QorCheck {
                    model: model.to_string(),
                    u,
                    closed,
                    oracle: q / third,
                    tol: 1e-4,
                });
            }
        }
    }
    out
}

/// g-and-h QORs from 50-digit numerical differentiation of the quantile
/// function: `(g, h, u, QOR)`.
pub const GH_REFERENCE: [(f64, f64, f64, f64); 12] = [
    (0.2, 0.2, 0.05, 0.001_028_912_301_431_85),
    (0.2, 0.2, 0.1, 0.004_448_607_511_324_83),
    (0.2, 0.2, 0.5, 0.097_045_697_007_253_3),
    (0.2, 0.2, 0.9, 0.003_745_918_700_906_26),
    (0.0, 0.1, 0.05, 0.001_199_200_184_885_14),
    (0.0, 0.1, 0.1, 0.005_160_360_082_258_87),
    (0.0, 0.1, 0.5, 0.122_426_879_301_458),
    (0.0, 0.1, 0.9, 0.005_160_360_082_258_86),
    (0.5, 0.0, 0.05, 0.002_536_349_828_586_67),
    (0.5, 0.0, 0.1, 0.011_789_699_603_798),
    (0.5, 0.0, 0.5, 0.127_323_954_473_516),
    (0.5, 0.0, 0.9, 0.004_769_908_803_783_74),
];
