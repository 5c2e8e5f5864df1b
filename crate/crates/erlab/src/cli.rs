//! The `erlab` command-line interface: thin wrappers over the library.
//!
//! Subcommands: `iid-exact`, `rate-fn`, `er-scan`, `tower-info`, `corr`,
//! `experiment <name> --config <file>`. Exit codes: 0 success / all criteria
//! pass, 1 criteria failure, 2 usage or config error. CSV output uses `,`
//! separators, `.` decimal points, LF line endings; `--out` redirects a
//! table to a file.

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use crate::er::{er_scan, geometric_grid, WindowSchedule};
use crate::error::{Error, Result};
use crate::experiments::{
    autocorrelation, parse_config_file, parse_seed, run_experiment, write_csv, ExperimentConfig,
    ExperimentId, Overrides,
};
use crate::large_deviations::{
    rate_function_exact, rate_function_scgf, rate_function_tail, solve_t_alpha, RateFunction,
};
use crate::processes::{
    generate_series, DiscreteDistribution, ProcessSpec, DEFAULT_MASTER_SEED,
};
use crate::tower::{TowerObservable, Variant, YoungTower, DEFAULT_TOWER_TOL};

#[derive(Parser)]
#[command(
    name = "erlab",
    version,
    about = "Erdős–Rényi window laws for Birkhoff sums: simulation and estimation"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact i.i.d. rates: prints alpha,t_alpha,c_alpha
    IidExact(IidExactArgs),
    /// Rate-function grid as CSV: alpha,I_hat,method,n,replicas,stderr
    RateFn(RateFnArgs),
    /// Window scan over a geometric horizon grid: n,k,theta,theta_over_k,ddl_stat
    ErScan(ErScanArgs),
    /// Example-tower table: columns, measures, normalizers, tail slope
    TowerInfo(TowerInfoArgs),
    /// Autocorrelation diagnostic with decay-model fits
    Corr(CorrArgs),
    /// Run an acceptance experiment (E1..E7) and print its verdict
    Experiment(ExperimentArgs),
}

fn parse_seed_arg(s: &str) -> std::result::Result<u64, String> {
    parse_seed(s).map_err(|e| e.to_string())
}

/// Counts accept plain integers or scientific notation (1e7).
fn parse_count_arg(s: &str) -> std::result::Result<u64, String> {
    if let Ok(n) = s.parse::<u64>() {
        return Ok(n);
    }
    let x: f64 = s.parse().map_err(|_| format!("`{s}` is not a count"))?;
    if x >= 0.0 && x.fract() == 0.0 && x <= u64::MAX as f64 {
        Ok(x as u64)
    } else {
        Err(format!("`{s}` is not a nonnegative integer"))
    }
}

fn parse_f64_list(s: &str) -> std::result::Result<Vec<f64>, String> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| format!("`{x}` is not a number"))
        })
        .collect()
}

#[derive(Args)]
struct CommonOpts {
    /// Master seed, decimal or 0x-hex
    #[arg(long, value_parser = parse_seed_arg, default_value_t = DEFAULT_MASTER_SEED)]
    seed: u64,
    /// Write the table to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Suppress stdout output (tables still go to --out)
    #[arg(long)]
    quiet: bool,
}

#[derive(Args)]
struct ProcessOpts {
    /// Series source: rademacher | iid | doubling | tower
    #[arg(long, default_value = "rademacher")]
    process: String,
    /// Atom values for --process iid, comma-separated
    #[arg(long)]
    values: Option<String>,
    /// Atom probabilities for --process iid, comma-separated
    #[arg(long)]
    probs: Option<String>,
    /// Tower tail exponent (beta > 1)
    #[arg(long, default_value_t = 2.0)]
    beta: f64,
    /// Tower perturbation size; kappa > 0 selects the mixing-modified tower
    /// with the mean-zero perturbed observable
    #[arg(long, default_value_t = 0.01)]
    kappa: f64,
    /// Use the mixing-modified tower even at kappa = 0
    #[arg(long)]
    modified: bool,
    /// Tower truncation tolerance, in (0, 1e-6]
    #[arg(long, default_value_t = DEFAULT_TOWER_TOL)]
    tol: f64,
}

impl ProcessOpts {
    fn build(&self, seed: u64) -> Result<ProcessSpec> {
        match self.process.as_str() {
            "rademacher" => Ok(ProcessSpec::rademacher(seed)),
            "doubling" => Ok(ProcessSpec::doubling(seed)),
            "iid" => {
                let (values, probs) = match (&self.values, &self.probs) {
                    (Some(v), Some(p)) => (
                        parse_f64_list(v).map_err(Error::Config)?,
                        parse_f64_list(p).map_err(Error::Config)?,
                    ),
                    _ => {
                        return Err(Error::Config(
                            "--process iid needs --values and --probs".into(),
                        ))
                    }
                };
                Ok(ProcessSpec::iid(
                    DiscreteDistribution::new(values, probs)?,
                    seed,
                ))
            }
            "tower" => {
                let modified = self.modified || self.kappa > 0.0;
                let variant = if self.kappa > 0.0 {
                    Variant::Perturbed
                } else {
                    Variant::Plain
                };
                let tower = Arc::new(YoungTower::build_example(
                    self.beta, self.kappa, modified, self.tol,
                )?);
                Ok(ProcessSpec::tower(
                    TowerObservable::new(tower, variant)?,
                    seed,
                ))
            }
            other => Err(Error::Config(format!(
                "unknown process `{other}` (rademacher | iid | doubling | tower)"
            ))),
        }
    }

    fn describe(&self) -> String {
        match self.process.as_str() {
            "tower" => format!(
                "tower(beta={},kappa={},modified={})",
                self.beta,
                self.kappa,
                self.modified || self.kappa > 0.0
            ),
            other => other.to_string(),
        }
    }

    /// The discrete distribution of an i.i.d. process, for exact branches.
    fn iid_dist(&self) -> Option<DiscreteDistribution> {
        match self.process.as_str() {
            "rademacher" => Some(DiscreteDistribution::rademacher()),
            "iid" => {
                let values = parse_f64_list(self.values.as_ref()?).ok()?;
                let probs = parse_f64_list(self.probs.as_ref()?).ok()?;
                DiscreteDistribution::new(values, probs).ok()
            }
            _ => None,
        }
    }
}

#[derive(Args)]
struct IidExactArgs {
    /// Levels alpha, comma-separated
    #[arg(long, value_parser = parse_f64_list, required = true, allow_hyphen_values = true)]
    alpha: Vec<Vec<f64>>,
    /// Atom values (default: fair +-1 coin), comma-separated
    #[arg(long)]
    values: Option<String>,
    /// Atom probabilities, comma-separated
    #[arg(long)]
    probs: Option<String>,
    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Args)]
struct RateFnArgs {
    /// exact-iid | scgf-legendre | tail-regression
    #[arg(long, default_value = "exact-iid")]
    method: String,
    /// Level grid, comma-separated
    #[arg(long, value_parser = parse_f64_list, default_value = "0.1,0.2,0.3,0.4,0.5,0.6,0.7")]
    alphas: Vec<Vec<f64>>,
    /// SCGF block length
    #[arg(long, default_value_t = 64)]
    block: usize,
    /// Monte Carlo replicas
    #[arg(long, value_parser = parse_count_arg, default_value_t = 10_000)]
    replicas: u64,
    /// Largest |t| of the SCGF grid
    #[arg(long, default_value_t = 2.0)]
    t_max: f64,
    /// SCGF grid spacing
    #[arg(long, default_value_t = 0.02)]
    t_step: f64,
    /// Tail-regression block grid, comma-separated
    #[arg(long, value_delimiter = ',', default_value = "16,32,48,64,96")]
    n_grid: Vec<u64>,
    #[command(flatten)]
    process: ProcessOpts,
    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Args)]
struct ErScanArgs {
    /// log | poly | fixed
    #[arg(long, default_value = "log")]
    schedule: String,
    /// Rate value for the log schedule (default: exact i.i.d. rate at --alpha)
    #[arg(long)]
    i_alpha: Option<f64>,
    /// Exponent for the poly schedule
    #[arg(long, default_value_t = 0.5)]
    tau: f64,
    /// Window for the fixed schedule
    #[arg(long, default_value_t = 1)]
    k: u64,
    /// Reference level alpha
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    /// Largest horizon n
    #[arg(long, value_parser = parse_count_arg, default_value_t = 1_000_000)]
    n_max: u64,
    /// Geometric grid ratio
    #[arg(long, default_value_t = 2.0)]
    grid_ratio: f64,
    /// Smallest horizon
    #[arg(long, value_parser = parse_count_arg, default_value_t = 1000)]
    n_min: u64,
    /// Also write the realization as CSV t,phi,S to this path
    #[arg(long)]
    dump_series: Option<PathBuf>,
    #[command(flatten)]
    process: ProcessOpts,
    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Args)]
struct TowerInfoArgs {
    #[arg(long, default_value_t = 2.0)]
    beta: f64,
    #[arg(long, default_value_t = 0.0)]
    kappa: f64,
    #[arg(long)]
    modified: bool,
    #[arg(long, default_value_t = DEFAULT_TOWER_TOL)]
    tol: f64,
    /// Emit the machine-readable CSV variant
    #[arg(long)]
    csv: bool,
    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Args)]
struct CorrArgs {
    /// Series length
    #[arg(long, value_parser = parse_count_arg, default_value_t = 100_000)]
    length: u64,
    /// Largest lag (lags 0..=max-lag are reported)
    #[arg(long, default_value_t = 100)]
    max_lag: u64,
    #[command(flatten)]
    process: ProcessOpts,
    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Experiment name: E1..E7
    name: String,
    /// Flat key = value config file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed override
    #[arg(long, value_parser = parse_seed_arg)]
    seed: Option<u64>,
    /// Output directory override
    #[arg(long)]
    out: Option<PathBuf>,
    /// Replica-count override
    #[arg(long, value_parser = parse_count_arg)]
    replicas: Option<u64>,
    /// Suppress the verdict table
    #[arg(long)]
    quiet: bool,
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.cmd {
        Cmd::IidExact(a) => iid_exact(a),
        Cmd::RateFn(a) => rate_fn(a),
        Cmd::ErScan(a) => er_scan_cmd(a),
        Cmd::TowerInfo(a) => tower_info(a),
        Cmd::Corr(a) => corr(a),
        Cmd::Experiment(a) => experiment(a),
    }
}

/// Print or write a table with optional comment lines.
fn emit(common: &CommonOpts, comments: &[String], header: &str, rows: &[String]) -> Result<()> {
    if let Some(path) = &common.out {
        write_csv(path, comments, header, rows)?;
    }
    if !common.quiet && common.out.is_none() {
        for c in comments {
            println!("# {c}");
        }
        println!("{header}");
        for r in rows {
            println!("{r}");
        }
    }
    Ok(())
}

fn iid_exact(a: IidExactArgs) -> Result<ExitCode> {
    let dist = match (&a.values, &a.probs) {
        (Some(v), Some(p)) => DiscreteDistribution::new(
            parse_f64_list(v).map_err(Error::Config)?,
            parse_f64_list(p).map_err(Error::Config)?,
        )?,
        (None, None) => DiscreteDistribution::rademacher(),
        _ => return Err(Error::Config("--values and --probs go together".into())),
    };
    let alphas: Vec<f64> = a.alpha.into_iter().flatten().collect();
    let mut rows = Vec::new();
    for alpha in alphas {
        let r = solve_t_alpha(&dist, alpha)?;
        rows.push(format!("{alpha},{},{}", r.t_alpha, r.c_alpha));
    }
    emit(&a.common, &[], "alpha,t_alpha,c_alpha", &rows)?;
    Ok(ExitCode::SUCCESS)
}

fn rate_fn(a: RateFnArgs) -> Result<ExitCode> {
    let alphas: Vec<f64> = a.alphas.iter().flatten().copied().collect();
    let spec = a.process.build(a.common.seed)?;
    let rf: RateFunction = match a.method.as_str() {
        "exact-iid" => {
            let dist = a.process.iid_dist().ok_or_else(|| {
                Error::Config("exact-iid needs an i.i.d. process (rademacher or iid)".into())
            })?;
            rate_function_exact(&dist, &alphas)?
        }
        "scgf-legendre" => {
            if !(a.t_step > 0.0 && a.t_max > a.t_step && a.t_max <= 100.0) {
                return Err(Error::Config(format!(
                    "need 0 < t_step < t_max <= 100, got t_step = {}, t_max = {}",
                    a.t_step, a.t_max
                )));
            }
            let steps = (a.t_max / a.t_step).round() as i64;
            let t_grid: Vec<f64> = (-steps..=steps).map(|i| i as f64 * a.t_step).collect();
            rate_function_scgf(&spec, &alphas, a.block, a.replicas as usize, &t_grid)?
        }
        "tail-regression" => rate_function_tail(&spec, &alphas, &a.n_grid, a.replicas)?,
        other => {
            return Err(Error::Config(format!(
                "unknown method `{other}` (exact-iid | scgf-legendre | tail-regression)"
            )))
        }
    };
    let n_col = match rf.method {
        crate::large_deviations::RateMethod::ExactIid => 1,
        crate::large_deviations::RateMethod::ScgfLegendre => rf.block_len,
        crate::large_deviations::RateMethod::TailRegression => {
            *a.n_grid.last().unwrap_or(&0) as usize
        }
    };
    let rows: Vec<String> = rf
        .alphas
        .iter()
        .zip(rf.values.iter().zip(&rf.stderr))
        .map(|(alpha, (v, se))| {
            format!(
                "{alpha},{v},{},{n_col},{},{se}",
                rf.method.as_str(),
                rf.replicas
            )
        })
        .collect();
    emit(
        &a.common,
        &[format!(
            "process={} seed={:#x}",
            a.process.describe(),
            a.common.seed
        )],
        "alpha,I_hat,method,n,replicas,stderr",
        &rows,
    )?;
    Ok(ExitCode::SUCCESS)
}

fn er_scan_cmd(a: ErScanArgs) -> Result<ExitCode> {
    let spec = a.process.build(a.common.seed)?;
    let schedule = match a.schedule.as_str() {
        "log" => {
            let i_alpha = match a.i_alpha {
                Some(v) => v,
                None => {
                    let dist = a.process.iid_dist().ok_or_else(|| {
                        Error::Config(
                            "log schedule needs --i-alpha for non-i.i.d. processes".into(),
                        )
                    })?;
                    solve_t_alpha(&dist, a.alpha)?.c_alpha
                }
            };
            WindowSchedule::Logarithmic { i_alpha }
        }
        "poly" => WindowSchedule::Polynomial { tau: a.tau },
        "fixed" => WindowSchedule::Fixed { k: a.k },
        other => {
            return Err(Error::Config(format!(
                "unknown schedule `{other}` (log | poly | fixed)"
            )))
        }
    };
    if !(a.grid_ratio > 1.0) || a.n_min < 1 || a.n_max < a.n_min {
        return Err(Error::Config(format!(
            "need grid_ratio > 1 and 1 <= n_min <= n_max, got ratio = {}, n_min = {}, n_max = {}",
            a.grid_ratio, a.n_min, a.n_max
        )));
    }
    let grid = geometric_grid(a.n_max, a.grid_ratio, a.n_min.min(a.n_max));
    // DDL reference tilt is available on the exact i.i.d. branch
    let t_alpha = a
        .process
        .iid_dist()
        .and_then(|d| solve_t_alpha(&d, a.alpha).ok())
        .map(|r| r.t_alpha);
    let scan = er_scan(&spec, schedule, a.alpha, &grid, t_alpha)?;

    if let Some(path) = &a.dump_series {
        let series = generate_series(&spec, a.n_max as usize)?;
        let rows: Vec<String> = (0..series.n())
            .map(|t| format!("{t},{},{}", series.increment(t), series.values()[t + 1]))
            .collect();
        write_csv(
            path,
            &[format!(
                "process={} seed={:#x}",
                a.process.describe(),
                a.common.seed
            )],
            "t,phi,S",
            &rows,
        )?;
    }

    let mut comments = vec![format!(
        "process={} seed={:#x} schedule={} alpha={}",
        a.process.describe(),
        a.common.seed,
        schedule.describe(),
        a.alpha
    )];
    if let Some(r) = scan.ddl_reference {
        comments.push(format!("ddl_reference={r}"));
    }
    let rows: Vec<String> = scan
        .rows
        .iter()
        .map(|r| {
            format!(
                "{},{},{},{},{}",
                r.n,
                r.k,
                r.theta,
                r.theta_over_k,
                r.ddl_stat.map(|v| v.to_string()).unwrap_or_default()
            )
        })
        .collect();
    emit(&a.common, &comments, "n,k,theta,theta_over_k,ddl_stat", &rows)?;
    Ok(ExitCode::SUCCESS)
}

fn tower_info(a: TowerInfoArgs) -> Result<ExitCode> {
    let tower = YoungTower::build_example(a.beta, a.kappa, a.modified, a.tol)?;
    let grid: Vec<u64> = (4..=14).map(|p| 1u64 << p).collect();
    let slope = tower.tail_loglog_slope(&grid);
    let comments = vec![
        format!(
            "beta={} kappa={} modified={} tol={} i_max={}",
            a.beta,
            a.kappa,
            a.modified,
            a.tol,
            tower.i_max()
        ),
        format!("Zbar={} Zdelta={}", tower.zbar(), tower.zdelta()),
        format!("tail_loglog_slope={slope} (grid 2^4..2^14)"),
    ];
    let rows: Vec<String> = (1..=10u32)
        .map(|i| {
            format!(
                "{i},{},{},{},{}",
                tower.mass(i),
                tower.height(i),
                tower.nu_bar(i),
                tower.nu_delta_column(i)
            )
        })
        .collect();
    if a.csv {
        emit(&a.common, &comments, "i,m_i,R_i,nu_bar,nu_delta", &rows)?;
    } else if !a.common.quiet {
        for c in &comments {
            println!("{c}");
        }
        println!(
            "{:>4} {:>14} {:>6} {:>14} {:>14}",
            "i", "m_i", "R_i", "nu_bar", "nu_delta"
        );
        for i in 1..=10u32 {
            println!(
                "{i:>4} {:>14.6e} {:>6} {:>14.8} {:>14.8}",
                tower.mass(i),
                tower.height(i),
                tower.nu_bar(i),
                tower.nu_delta_column(i)
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn corr(a: CorrArgs) -> Result<ExitCode> {
    let spec = a.process.build(a.common.seed)?;
    let lags: Vec<u64> = (0..=a.max_lag).collect();
    let table = autocorrelation(&spec, a.length as usize, &lags)?;
    let comments = vec![
        format!(
            "process={} seed={:#x} length={}",
            a.process.describe(),
            a.common.seed,
            a.length
        ),
        format!("mean={} variance={}", table.mean, table.variance),
        format!(
            "semilog_slope={} semilog_residual={}",
            table.semilog.0, table.semilog.1
        ),
        format!(
            "loglog_slope={} loglog_residual={}",
            table.loglog.0, table.loglog.1
        ),
    ];
    let rows: Vec<String> = table
        .lags
        .iter()
        .zip(&table.values)
        .map(|(l, c)| format!("{l},{c}"))
        .collect();
    emit(&a.common, &comments, "lag,corr", &rows)?;
    Ok(ExitCode::SUCCESS)
}

fn experiment(a: ExperimentArgs) -> Result<ExitCode> {
    let id: ExperimentId = a.name.parse()?;
    let map = match &a.config {
        Some(path) => parse_config_file(path)?,
        None => Default::default(),
    };
    let overrides = Overrides {
        seed: a.seed,
        out: a.out.clone(),
        replicas: a.replicas,
        quiet: a.quiet,
    };
    let cfg = ExperimentConfig::from_map(id, &map, &overrides)?;
    let verdict = run_experiment(&cfg)?;
    if !cfg.quiet {
        print!("{}", verdict.render());
    }
    Ok(if verdict.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
