//! Command-line front end.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use sag_core::equilibrium::{solve_online_sse, solve_ossp};
use sag_core::oracle::{
    check_instance, collect_report, grid_best_scheme, grid_best_sse, grid_tolerance, ossp_lipschitz,
    sse_lipschitz, GridMode, VerifyReport,
};
use sag_core::{fixtures, EquilibriumSolution, FutureEstimate, RateProfile};

use crate::config::Config;
use crate::error::Failure;
use crate::experiment::{self, SimParams};
use crate::io::{read_alert_log, write_alert_log, write_trace};

#[derive(Debug, Parser)]
#[command(name = "sag", version, about = "Signaling audit game solver and replay simulator")]
pub struct Cli {
    /// TOML configuration; the bundled defaults are used when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic alert log.
    Generate {
        #[arg(long)]
        days: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit per-type arrival forecasts from an alert log.
    Fit {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replay the test days of an alert log (synthetic if none is given).
    Simulate {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        budget: Option<f64>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        quit_loss: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        quit_prob_scale: f64,
        #[arg(long)]
        seed: Option<u64>,
        /// Per-alert trace CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Summary JSON; printed to stdout when omitted.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Solve one game state and print both policies.
    Solve {
        /// Spendable budget.
        #[arg(long)]
        budget: f64,
        /// Expected remaining alerts per type, comma separated; defaults to
        /// the configured daily means.
        #[arg(long, value_delimiter = ',')]
        lambdas: Option<Vec<f64>>,
    },
    /// Check the equilibrium properties on random small games.
    Verify {
        #[arg(long, default_value_t = 1000)]
        instances: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time the per-alert signaling solve on the configured type table.
    Bench {
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 100.0)]
        threshold_ms: f64,
        #[arg(long)]
        seed: Option<u64>,
    },
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("sag: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: Cli) -> Result<(), Failure> {
    let config = Config::load(cli.config.as_deref())?;
    match cli.command {
        Command::Generate { days, seed, out } => {
            let seed = seed.unwrap_or(config.seed);
            let n = days.unwrap_or(config.experiment.days);
            let cycles = sag_core::datagen::generate_cycles(&config.generator_spec(), n, seed)?;
            write_alert_log(output(out.as_deref())?, &cycles)
        }
        Command::Fit { input, out } => {
            let days = read_log(&input, &config)?;
            let profile = RateProfile::fit(&days, config.types.len(), config.bucket_width)?;
            write_json(out.as_deref(), &fit_report(&config, &profile))
        }
        Command::Simulate {
            input,
            budget,
            alpha,
            quit_loss,
            quit_prob_scale,
            seed,
            trace,
            summary,
        } => {
            let params = SimParams {
                budget: budget.unwrap_or(config.budget),
                alpha: alpha.unwrap_or(config.alpha),
                quit_loss,
                quit_prob_scale,
                seed: seed.unwrap_or(config.seed),
            };
            let days = match input {
                Some(path) => read_log(&path, &config)?,
                None => experiment::synthetic_days(&config, params.seed)?,
            };
            let (reports, run) = experiment::simulate(&config, &days, &params)?;
            if let Some(path) = trace {
                write_trace(output(Some(&path))?, &reports)?;
            }
            write_json(summary.as_deref(), &run)
        }
        Command::Solve { budget, lambdas } => {
            let payoffs = config.payoffs()?;
            let lambdas =
                lambdas.unwrap_or_else(|| config.types.iter().map(|t| t.daily_mean).collect());
            if lambdas.len() != payoffs.len() {
                return Err(Failure::config(format!(
                    "{} rates given for {} types",
                    lambdas.len(),
                    payoffs.len()
                )));
            }
            let estimates = FutureEstimate::from_lambdas(&lambdas, &payoffs);
            let report = SolveReport {
                budget,
                lambdas: estimates.lambdas(),
                kappas: estimates.kappas(),
                ossp: solve_ossp(&payoffs, &estimates, budget)?,
                online_sse: solve_online_sse(&payoffs, &estimates, budget)?,
            };
            write_json(None, &report)
        }
        Command::Verify {
            instances,
            seed,
            out,
        } => {
            let seed = seed.unwrap_or(config.seed);
            let checks: Vec<_> = (0..instances as u64)
                .into_par_iter()
                .map(|i| check_instance(seed, i))
                .collect();
            let report = VerifyOutput {
                properties: collect_report(seed, checks),
                grid: grid_checks(config.grid_step)?,
            };
            write_json(out.as_deref(), &report)?;
            let off_grid = report.grid.iter().filter(|g| !g.within_bound).count();
            if report.properties.is_clean() && off_grid == 0 {
                Ok(())
            } else {
                Err(Failure::internal(format!(
                    "{} property violations, {off_grid} grid disagreements",
                    report.properties.violations.len()
                )))
            }
        }
        Command::Bench {
            samples,
            threshold_ms,
            seed,
        } => {
            let report = bench(&config, samples, threshold_ms, seed.unwrap_or(config.seed))?;
            write_json(None, &report)?;
            if report.pass {
                Ok(())
            } else {
                Err(Failure::internal(format!(
                    "median solve {:.2} ms exceeds {threshold_ms} ms",
                    report.median_ms
                )))
            }
        }
    }
}

#[derive(Debug, Serialize)]
struct SolveReport {
    budget: f64,
    lambdas: Vec<f64>,
    kappas: Vec<f64>,
    ossp: EquilibriumSolution,
    online_sse: EquilibriumSolution,
}

#[derive(Debug, Serialize)]
struct FitType<'a> {
    type_id: usize,
    name: &'a str,
    /// Mean alerts from each bucket start to the end of the cycle.
    remaining: &'a [f64],
}

#[derive(Debug, Serialize)]
struct FitReport<'a> {
    bucket_width: u32,
    cycles: usize,
    types: Vec<FitType<'a>>,
}

fn fit_report<'a>(config: &'a Config, profile: &'a RateProfile) -> FitReport<'a> {
    FitReport {
        bucket_width: profile.bucket_width(),
        cycles: profile.cycles(),
        types: config
            .type_names()
            .into_iter()
            .enumerate()
            .map(|(t, name)| FitType {
                type_id: t,
                name,
                remaining: profile.bucket_means(t),
            })
            .collect(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub types: usize,
    pub samples: usize,
    pub median_ms: f64,
    pub mean_ms: f64,
    pub p95_ms: f64,
    pub max_ms: f64,
    pub threshold_ms: f64,
    pub pass: bool,
}

/// Times the signaling solve at the arrival times of one synthetic day,
/// forecast from the configured history.
pub fn bench(config: &Config, samples: usize, threshold_ms: f64, seed: u64) -> Result<BenchReport, Failure> {
    let payoffs = config.payoffs()?;
    let history = config.experiment.history_days;
    let days = sag_core::datagen::generate_cycles(&config.generator_spec(), history + 1, seed)?;
    let profile = RateProfile::fit(&days[..history], payoffs.len(), config.bucket_width)?;
    let budget = config.budget * (1.0 - config.alpha);
    let day = &days[history];
    if day.is_empty() || samples == 0 {
        return Err(Failure::data("no alerts to time"));
    }
    let estimate_config = config.estimate_config();
    let mut times = Vec::with_capacity(samples);
    let mut prev: Option<FutureEstimate> = None;
    for k in 0..samples {
        let alert = day[k * day.len() / samples.max(1) % day.len()];
        let estimate = profile.estimate(alert.timestamp, prev.as_ref(), &estimate_config, &payoffs)?;
        let t = Instant::now();
        let solution = solve_ossp(&payoffs, &estimate, budget)?;
        times.push(t.elapsed().as_secs_f64() * 1e3);
        std::hint::black_box(solution);
        prev = Some(estimate);
    }
    times.sort_by(f64::total_cmp);
    let n = times.len();
    let median_ms = if n % 2 == 1 {
        times[n / 2]
    } else {
        0.5 * (times[n / 2 - 1] + times[n / 2])
    };
    Ok(BenchReport {
        types: payoffs.len(),
        samples: n,
        median_ms,
        mean_ms: times.iter().sum::<f64>() / n as f64,
        p95_ms: times[((n as f64 * 0.95).ceil() as usize).clamp(1, n) - 1],
        max_ms: times[n - 1],
        threshold_ms,
        pass: median_ms <= threshold_ms,
    })
}

fn read_log(path: &Path, config: &Config) -> Result<Vec<Vec<sag_core::AlertEvent>>, Failure> {
    let file = File::open(path).map_err(|e| Failure::data(format!("{}: {e}", path.display())))?;
    read_alert_log(BufReader::new(file), config.types.len())
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Failure::data(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> Result<(), Failure> {
    let mut out = output(path)?;
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| Failure::internal(e.to_string()))?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct VerifyOutput {
    #[serde(flatten)]
    properties: VerifyReport,
    grid: Vec<GridCheck>,
}

/// LP value against a brute-force grid search on a small two-type game.
#[derive(Debug, Serialize)]
pub struct GridCheck {
    pub game: &'static str,
    pub budget: f64,
    pub ossp_gap: f64,
    pub ossp_bound: f64,
    pub sse_gap: f64,
    pub sse_bound: f64,
    pub within_bound: bool,
}

pub fn grid_checks(step: f64) -> Result<Vec<GridCheck>, Failure> {
    let games = [
        ("cheap quit", fixtures::two_type_payoffs(0.186, -1.0), 1.0),
        ("costly quit", fixtures::two_type_payoffs(0.5, -2.0), 1.5),
    ];
    let mut checks = Vec::new();
    for (game, payoffs, budget) in games {
        let est = FutureEstimate::from_lambdas(&[2.0, 5.0], &payoffs);
        let ossp = solve_ossp(&payoffs, &est, budget)?;
        let ossp_grid = grid_best_scheme(&payoffs, &est, budget, step, GridMode::Shortcut)?;
        let sse = solve_online_sse(&payoffs, &est, budget)?;
        let sse_grid = grid_best_sse(&payoffs, &est, budget, step)?;
        let ossp_gap = (ossp.auditor_utility - ossp_grid.auditor_utility).abs();
        let ossp_bound = grid_tolerance(ossp_lipschitz(&payoffs, &est), step, 4 * payoffs.len());
        let sse_gap = (sse.auditor_utility - sse_grid.auditor_utility).abs();
        let sse_bound = grid_tolerance(sse_lipschitz(&payoffs), step, payoffs.len());
        checks.push(GridCheck {
            game,
            budget,
            ossp_gap,
            ossp_bound,
            sse_gap,
            sse_bound,
            within_bound: ossp_gap <= ossp_bound && sse_gap <= sse_bound,
        });
    }
    Ok(checks)
}
