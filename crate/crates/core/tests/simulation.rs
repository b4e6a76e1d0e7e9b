use qci_core::simulation::{
    run_coverage, run_gld_bias, run_mse, run_two_sample_coverage, ExperimentConfig, RunOptions,
};

fn config(text: &str) -> ExperimentConfig {
    ExperimentConfig::from_json(text).unwrap()
}

fn threads(n: usize) -> RunOptions {
    RunOptions { threads: Some(n) }
}

#[test]
fn coverage_mc_error_is_binomial() {
    let ExperimentConfig::Coverage(spec) = config(
        r#"{"kind":"coverage","generator":"logistic","n":150,"u_grid":[0.2,0.5],
            "methods":["A:logistic","H","oracle"],"replicates":300,"seed":21}"#,
    ) else {
        unreachable!()
    };
    let report = run_coverage(&spec, &threads(2)).unwrap();
    assert_eq!(report.rows.len(), 6);
    for row in &report.rows {
        let c = row.coverage;
        let want = (c * (1.0 - c) / row.successes as f64).sqrt();
        assert!((row.mc_error - want).abs() < 1e-15);
        assert_eq!(row.successes + row.failures, 300);
        assert!(c > 0.8, "{} u={} coverage {c}", row.method, row.u);
    }
    let again = run_coverage(&spec, &threads(1)).unwrap();
    assert_eq!(report.to_csv(6), again.to_csv(6));
}

#[test]
fn two_sample_identical_generators() {
    let ExperimentConfig::TwoSampleCoverage(spec) = config(
        r#"{"kind":"two_sample_coverage","generator_x":"normal","generator_y":"normal",
            "n":120,"m":80,"u_grid":[0.5],"methods":["G/H","oracle"],"replicates":400,"seed":5}"#,
    ) else {
        unreachable!()
    };
    let report = run_two_sample_coverage(&spec, &threads(2)).unwrap();
    assert!(report.two_sample);
    for row in &report.rows {
        assert_eq!(row.p, Some(0.5));
        // 400 replicates put three binomial standard errors at about 0.033.
        assert!(
            (row.coverage - 0.95).abs() < 0.04,
            "{} {}",
            row.method,
            row.coverage
        );
    }
    assert!(report.to_csv(6).contains("method,u,p,coverage"));
}

#[test]
fn method_f_tail_bias_grows_with_n() {
    let ExperimentConfig::Mse(spec) = config(
        r#"{"kind":"mse","generator":"exponential","n_list":[200,500,2000],"u_grid":[0.9],
            "estimators":["F:0.19"],"replicates":2000,"seed":8}"#,
    ) else {
        unreachable!()
    };
    let report = run_mse(&spec, &threads(2)).unwrap();
    let bias = |n: usize| report.find("F:0.19", n, 0.9).unwrap().bias.abs();
    // A constant bandwidth leaves a bias that does not shrink as n grows.
    assert!(
        bias(500) > bias(200) && bias(2000) > bias(500),
        "{} {} {}",
        bias(200),
        bias(500),
        bias(2000)
    );
    let big = report.find("F:0.19", 2000, 0.9).unwrap();
    assert!(big.bias.powi(2) > big.variance);
}

#[test]
fn mse_regression_baseline() {
    let ExperimentConfig::Mse(spec) = config(
        r#"{"kind":"mse","generator":"exponential","n_list":[200],"u_grid":[0.5],
            "estimators":["G:qor=exponential"],"replicates":2000,"seed":9}"#,
    ) else {
        unreachable!()
    };
    let report = run_mse(&spec, &threads(2)).unwrap();
    let row = &report.rows[0];
    assert_eq!(row.q_true, 2.0);
    assert!(row.mse > 0.0);
    assert!((row.mse - (row.bias.powi(2) + row.variance)).abs() < 1e-12 * row.mse);
    assert!(row.bias.abs() < 0.2, "{}", row.bias);
}

#[test]
fn gld_bias_vanishes_for_gld_generator() {
    let ExperimentConfig::GldBias(spec) = config(
        r#"{"kind":"gld_bias","generator":"gld-fkml:l1=1,l2=1,l3=0.3,l4=0.1","n_list":[60,800],
            "u_grid":[0.1,0.9],"replicates":30,"seed":2}"#,
    ) else {
        unreachable!()
    };
    let report = run_gld_bias(&spec, &threads(2)).unwrap();
    let model = &spec.generator;
    for u in [0.1, 0.9] {
        let row = report.rows.iter().find(|r| r.n == 800 && r.u == u).unwrap();
        assert!(!row.absolute);
        // Standard error of the mean of 30 fitted quantiles, each with sd about tau/sqrt(n).
        let tau = (u * (1.0 - u)).sqrt() * model.quantile_density(u).unwrap();
        let se = tau / 800f64.sqrt() / 30f64.sqrt();
        let gap = (row.mean_fitted - row.q_true).abs();
        assert!(gap < 4.0 * se, "u={u}: gap {gap}, se {se}");
    }
}
