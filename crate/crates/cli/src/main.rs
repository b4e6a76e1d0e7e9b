#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use qci_core::data::{read_data, Sample};
use qci_core::distributions::DistributionModel;
use qci_core::estimators::{optimal_bandwidth, BandwidthRule, Kernel};
use qci_core::format_sig;
use qci_core::gld::{fit_gld_mle, Parameterization};
use qci_core::intervals::{
    ci_two_sample, confidence_interval, IntervalOptions, Method, QuantileCI, TwoSampleCI,
};
use qci_core::numerics::RngStream;
use qci_core::simulation::{run_experiment, ExperimentConfig, RunOptions};
use qci_core::Error;

#[derive(Parser)]
#[command(
    name = "qci",
    version,
    about = "Confidence intervals for quantiles with QOR-optimal bandwidths"
)]
struct Cli {
    /// Significant digits in numeric output.
    #[arg(long, global = true, default_value_t = 6)]
    precision: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate QOR(u), A(u) and the optimal bandwidth for a family.
    Qor(QorArgs),
    /// Confidence intervals for quantiles of one sample.
    Ci(CiArgs),
    /// Confidence interval for the difference of two quantiles.
    CiDiff(CiDiffArgs),
    /// Maximum-likelihood GLD fit.
    FitGld(FitArgs),
    /// Run a simulation study from a JSON config.
    Simulate(SimulateArgs),
    /// Draw a seeded sample from a family.
    Sample(SampleArgs),
}

#[derive(Args)]
struct QorArgs {
    #[arg(long)]
    family: String,
    /// Probabilities: a comma list or start:stop:step.
    #[arg(long)]
    u: String,
    /// Sample size for the bandwidth column.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value = "epanechnikov")]
    kernel: String,
}

#[derive(Args)]
struct IntervalFlags {
    #[arg(long, default_value_t = 0.95)]
    level: f64,
    #[arg(long, default_value = "epanechnikov")]
    kernel: String,
    /// GLD parameterization for Methods C, D and E.
    #[arg(long)]
    param: Option<String>,
    /// Constant bandwidth for Methods F, G and H.
    #[arg(long)]
    bandwidth: Option<f64>,
    /// Emit JSON instead of CSV.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct CiArgs {
    #[arg(long)]
    data: PathBuf,
    /// A:<family>, B, C, D, E, F, G or H.
    #[arg(long)]
    method: String,
    #[arg(long)]
    u: String,
    #[command(flatten)]
    flags: IntervalFlags,
}

#[derive(Args)]
struct CiDiffArgs {
    #[arg(long)]
    data1: PathBuf,
    #[arg(long)]
    data2: PathBuf,
    #[arg(long)]
    u: f64,
    /// Probability for the second sample; defaults to --u.
    #[arg(long)]
    p: Option<f64>,
    /// One method for both samples, or X/Y.
    #[arg(long)]
    method: String,
    #[command(flatten)]
    flags: IntervalFlags,
}

#[derive(Args)]
struct FitArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value = "fkml")]
    param: String,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Worker threads (defaults to all cores).
    #[arg(long)]
    workers: Option<usize>,
    /// Overrides the seed in the config.
    #[arg(long, env = "QCI_SEED")]
    seed: Option<u64>,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    family: String,
    #[arg(long)]
    n: usize,
    #[arg(long, env = "QCI_SEED", default_value_t = 1)]
    seed: u64,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A failure with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Parse(_) | Error::Spec { .. } | Error::IncompatibleMethod(..) => 2,
            Error::EmptyData
            | Error::NonFiniteData { .. }
            | Error::DataLine { .. }
            | Error::DegenerateData(_)
            | Error::TooFewObservations { .. }
            | Error::NonPositiveData(_)
            | Error::DataRequired(_)
            | Error::Io(_) => 3,
            _ => 4,
        };
        let message = match hint(&e) {
            Some(h) => format!("{e}\nhint: {h}"),
            None => e.to_string(),
        };
        Failure { code, message }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Error::from(e).into()
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

fn hint(e: &Error) -> Option<&'static str> {
    Some(match e {
        Error::NonPositiveData(_) => "Method B needs strictly positive data; try E or A:<family>",
        Error::TooFewObservations { .. } => {
            "collect more data or use a method with a lower floor (GLD methods need 20, A needs 30)"
        }
        Error::ZeroDensity(_) => {
            "the density estimate vanished; try a larger --bandwidth or Method G"
        }
        Error::FitFailure(_) => "the GLD fit did not converge; try --param rs, or Method A or G",
        Error::IncompatibleMethod(..) => {
            "Method D has no standard error; use C or E for two-sample intervals"
        }
        Error::DegenerateBeta { .. } => "u is too close to 1 for this sample size",
        _ => return None,
    })
}

fn parse<T: std::str::FromStr<Err = Error>>(s: &str) -> Result<T, Failure> {
    s.parse().map_err(Failure::from)
}

/// Parses `a,b,c` or `start:stop:step` (inclusive) into probabilities.
fn parse_grid(spec: &str) -> Result<Vec<f64>, Failure> {
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| usage(format!("invalid number '{s}' in --u")))
    };
    let grid = if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(usage("a range must look like start:stop:step"));
        }
        let (start, stop, step) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
        if !(step > 0.0) || stop < start {
            return Err(usage("a range needs step > 0 and stop >= start"));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize;
        (0..=count)
            .map(|k| ((start + k as f64 * step) * 1e12).round() / 1e12)
            .collect()
    } else {
        spec.split(',').map(num).collect::<Result<Vec<_>, _>>()?
    };
    if let Some(u) = grid.iter().find(|&&u| !(u > 0.0 && u < 1.0)) {
        return Err(usage(format!("probability {u} is outside (0, 1)")));
    }
    Ok(grid)
}

fn meta_line(config: &Value) -> String {
    format!("# {config}\n")
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => {
            fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display())).into())
        }
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn cmd_qor(a: &QorArgs, digits: usize) -> Result<String, Failure> {
    let model: DistributionModel = parse(&a.family)?;
    let kernel: Kernel = parse(&a.kernel)?;
    let grid = parse_grid(&a.u)?;
    if let Some(n) = a.n {
        if n < 2 {
            return Err(usage("--n must be at least 2"));
        }
    }
    let rule = BandwidthRule::for_family(model, kernel);
    let config = json!({
        "command": "qor", "family": model.to_string(), "u": grid, "n": a.n,
        "kernel": kernel.to_string(), "boundary_correction": rule.boundary_correction,
    });
    let mut out = meta_line(&config);
    out.push_str("u,qor,A_u,bandwidth\n");
    for u in grid {
        let qor = model.qor(u)?.qor;
        let a_u = kernel.bandwidth_constant() * qor.abs().powf(0.4);
        let b = match a.n {
            Some(n) => format_sig(optimal_bandwidth(&rule, u, n, None)?, digits),
            None => String::new(),
        };
        out.push_str(&format!(
            "{},{},{},{}\n",
            format_sig(u, digits),
            format_sig(qor, digits),
            format_sig(a_u, digits),
            b
        ));
    }
    Ok(out)
}

fn resolve_method(s: &str, flags: &IntervalFlags) -> Result<Method, Failure> {
    let mut m: Method = parse(s)?;
    if let Some(p) = &flags.param {
        let p: Parameterization = parse(p)?;
        m = match m {
            Method::C(_) => Method::C(p),
            Method::D(_) => Method::D(p),
            Method::E(_) => Method::E(p),
            other => other,
        };
    }
    if let Some(b) = flags.bandwidth {
        if !(b > 0.0 && b < 1.0) {
            return Err(usage(format!("--bandwidth {b} is outside (0, 1)")));
        }
        m = match m {
            Method::F(_) => Method::F(b),
            Method::G(_) => Method::G(b),
            Method::H(_) => Method::H(b),
            other => other,
        };
    }
    Ok(m)
}

fn interval_options(flags: &IntervalFlags) -> Result<IntervalOptions, Failure> {
    if !(flags.level > 0.5 && flags.level < 1.0) {
        return Err(usage(format!(
            "--level {} is outside (0.5, 1)",
            flags.level
        )));
    }
    Ok(IntervalOptions {
        level: flags.level,
        kernel: parse(&flags.kernel)?,
        ..Default::default()
    })
}

fn load(path: &Path) -> Result<Sample, Failure> {
    let data = read_data(path)?;
    Ok(Sample::new(&data)?)
}

fn warn_flags(ci: &QuantileCI) {
    if let Some(flag) = ci.flag {
        eprintln!("warning: u={} method {}: {flag}", ci.u, ci.method);
    }
}

fn cmd_ci(a: &CiArgs, digits: usize) -> Result<String, Failure> {
    let method = resolve_method(&a.method, &a.flags)?;
    let opts = interval_options(&a.flags)?;
    let grid = parse_grid(&a.u)?;
    let sample = load(&a.data)?;
    let config = json!({
        "command": "ci", "data": a.data.display().to_string(), "n": sample.len(),
        "method": method.to_string(), "u": grid, "level": opts.level,
        "kernel": opts.kernel.to_string(),
    });
    let rows: Vec<QuantileCI> = grid
        .iter()
        .map(|&u| confidence_interval(&sample, u, &method, &opts))
        .collect::<Result<_, _>>()?;
    rows.iter().for_each(warn_flags);
    if a.flags.json {
        let v = json!({ "config": config, "intervals": rows });
        return Ok(format!(
            "{}\n",
            serde_json::to_string_pretty(&v).expect("json")
        ));
    }
    let mut out = meta_line(&config);
    out.push_str(QuantileCI::CSV_HEADER);
    out.push('\n');
    for r in &rows {
        out.push_str(&r.csv_row(digits));
        out.push('\n');
    }
    Ok(out)
}

fn cmd_ci_diff(a: &CiDiffArgs, digits: usize) -> Result<String, Failure> {
    let (mx, my) = match a.method.split_once('/') {
        Some((x, y)) => (resolve_method(x, &a.flags)?, resolve_method(y, &a.flags)?),
        None => {
            let m = resolve_method(&a.method, &a.flags)?;
            (m, m)
        }
    };
    let opts = interval_options(&a.flags)?;
    let p = a.p.unwrap_or(a.u);
    for v in [a.u, p] {
        if !(v > 0.0 && v < 1.0) {
            return Err(usage(format!("probability {v} is outside (0, 1)")));
        }
    }
    let x = load(&a.data1)?;
    let y = load(&a.data2)?;
    let ci: TwoSampleCI = ci_two_sample(&x, &y, a.u, p, &mx, &my, &opts)?;
    for f in &ci.flags {
        eprintln!("warning: method {}: {f}", ci.method);
    }
    let config = json!({
        "command": "ci-diff", "data1": a.data1.display().to_string(),
        "data2": a.data2.display().to_string(), "u": a.u, "p": p,
        "method": ci.method, "level": opts.level, "kernel": opts.kernel.to_string(),
    });
    if a.flags.json {
        let v = json!({ "config": config, "interval": ci });
        return Ok(format!(
            "{}\n",
            serde_json::to_string_pretty(&v).expect("json")
        ));
    }
    Ok(format!(
        "{}{}\n{}\n",
        meta_line(&config),
        TwoSampleCI::CSV_HEADER,
        ci.csv_row(digits)
    ))
}

fn cmd_fit_gld(a: &FitArgs) -> Result<String, Failure> {
    let param: Parameterization = parse(&a.param)?;
    let data = read_data(&a.data)?;
    let fit = fit_gld_mle(&data, param)?;
    if !fit.converged {
        eprintln!("warning: the optimizer stopped before meeting its tolerances");
    }
    let mut v = serde_json::to_value(&fit).expect("json");
    v["config"] = json!({
        "command": "fit-gld", "data": a.data.display().to_string(), "param": param.to_string(),
    });
    Ok(format!(
        "{}\n",
        serde_json::to_string_pretty(&v).expect("json")
    ))
}

fn cmd_simulate(a: &SimulateArgs, digits: usize) -> Result<String, Failure> {
    let text = fs::read_to_string(&a.config)
        .map_err(|e| Error::Io(format!("{}: {e}", a.config.display())))?;
    let mut config = ExperimentConfig::from_json(&text)?;
    if let Some(seed) = a.seed {
        config.set_seed(seed);
    }
    if a.workers == Some(0) {
        return Err(usage("--workers must be at least 1"));
    }
    let stem = a
        .config
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| config.kind().to_string());
    let start = Instant::now();
    let report = run_experiment(&config, &RunOptions { threads: a.workers })?;
    let wall = start.elapsed().as_secs_f64();

    let echo = serde_json::to_value(&config).expect("json");
    let csv = format!("{}{}", meta_line(&echo), report.to_csv(digits));
    let meta = json!({
        "config": echo,
        "seed": config.seed(),
        "workers": a.workers,
        "precision": digits,
        "wall_time_seconds": wall,
        "unreliable_rows": report.unreliable_rows(),
        "report": report,
    });
    fs::create_dir_all(&a.out)?;
    let csv_path = a.out.join(format!("{stem}.csv"));
    let json_path = a.out.join(format!("{stem}.json"));
    write_atomic(&csv_path, &csv)?;
    if let Err(e) = write_atomic(
        &json_path,
        &serde_json::to_string_pretty(&meta).expect("json"),
    ) {
        let _ = fs::remove_file(&csv_path);
        return Err(e);
    }
    if report.unreliable_rows() > 0 {
        eprintln!(
            "warning: {} rows had more than 2% failed replicates",
            report.unreliable_rows()
        );
    }
    Ok(format!(
        "wrote {} and {}\n",
        csv_path.display(),
        json_path.display()
    ))
}

fn write_atomic(path: &Path, text: &str) -> Result<(), Failure> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, text)?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        Failure::from(e)
    })
}

fn cmd_sample(a: &SampleArgs) -> Result<String, Failure> {
    let model: DistributionModel = parse(&a.family)?;
    if a.n == 0 {
        return Err(usage("--n must be at least 1"));
    }
    let data = model.sample(a.n, RngStream::new(a.seed, 0))?;
    let config =
        json!({ "command": "sample", "family": model.to_string(), "n": a.n, "seed": a.seed });
    let mut out = meta_line(&config);
    for x in data {
        out.push_str(&format!("{x}\n"));
    }
    Ok(out)
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let digits = cli.precision.clamp(1, 17);
    match &cli.command {
        Command::Qor(a) => write_output(None, &cmd_qor(a, digits)?),
        Command::Ci(a) => write_output(None, &cmd_ci(a, digits)?),
        Command::CiDiff(a) => write_output(None, &cmd_ci_diff(a, digits)?),
        Command::FitGld(a) => write_output(None, &cmd_fit_gld(a)?),
        Command::Simulate(a) => {
            let msg = cmd_simulate(a, digits)?;
            eprint!("{msg}");
            Ok(())
        }
        Command::Sample(a) => write_output(a.out.as_deref(), &cmd_sample(a)?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
