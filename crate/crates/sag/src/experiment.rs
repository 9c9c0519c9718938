//! Rolling-history replay of test days and run summaries.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use sag_core::datagen::generate_cycles;
use sag_core::engine::{mean_std, CycleSummary};
use sag_core::{AlertEvent, AuditEngine, CycleReport, EngineConfig, PayoffStructure, RateProfile};

use crate::config::Config;
use crate::error::Failure;

/// Knobs varied between runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimParams {
    pub budget: f64,
    pub alpha: f64,
    /// Overrides every type's loss per quitting benign user.
    pub quit_loss: Option<f64>,
    /// Multiplies every type's quit probability.
    pub quit_prob_scale: f64,
    pub seed: u64,
}

impl SimParams {
    pub fn from_config(config: &Config) -> Self {
        Self {
            budget: config.budget,
            alpha: config.alpha,
            quit_loss: None,
            quit_prob_scale: 1.0,
            seed: config.seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DaySummary {
    pub cycle_id: u64,
    #[serde(flatten)]
    pub summary: CycleSummary,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuntimeStats {
    pub total_seconds: f64,
    pub mean_ms_per_alert: f64,
    pub slowest_day_ms_per_alert: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub params: SimParams,
    pub alerts: usize,
    /// Per-alert signaling minus budget-matched Stackelberg utility, pooled
    /// over all test days.
    pub mean_advantage: f64,
    pub std_advantage: f64,
    /// `mean_advantage` relative to the magnitude of the mean Stackelberg
    /// utility, in percent.
    pub improvement_pct: f64,
    pub mean_ossp_utility: f64,
    pub mean_online_sse_utility: f64,
    pub mean_offline_sse_utility: Option<f64>,
    pub days: Vec<DaySummary>,
    pub runtime: RuntimeStats,
}

/// Alert log to replay: the configured number of synthetic days.
pub fn synthetic_days(config: &Config, seed: u64) -> Result<Vec<Vec<AlertEvent>>, Failure> {
    Ok(generate_cycles(&config.generator_spec(), config.experiment.days, seed)?)
}

/// Payoffs with the run's quit-probability scale and quit-loss override.
pub fn adjusted_payoffs(config: &Config, params: &SimParams) -> Result<PayoffStructure, Failure> {
    let mut payoffs = config.payoffs()?.with_quit_prob_scale(params.quit_prob_scale)?;
    if let Some(loss) = params.quit_loss {
        payoffs = payoffs.with_quit_loss(loss)?;
    }
    Ok(payoffs)
}

/// Replays the last `test_days` of `days`, each forecast from the
/// `history_days` before it.
pub fn simulate(
    config: &Config,
    days: &[Vec<AlertEvent>],
    params: &SimParams,
) -> Result<(Vec<CycleReport>, RunSummary), Failure> {
    let started = Instant::now();
    let exp = config.experiment;
    if days.len() < exp.history_days + 1 {
        return Err(Failure::data(format!(
            "{} days in the log, need at least {}",
            days.len(),
            exp.history_days + 1
        )));
    }
    let payoffs = adjusted_payoffs(config, params)?;
    let engine_config = EngineConfig {
        total_budget: params.budget,
        alpha: params.alpha,
        estimate: config.estimate_config(),
        seed: params.seed,
    };
    let first = exp.history_days.max(days.len().saturating_sub(exp.test_days));

    let results: Vec<(CycleReport, f64)> = (first..days.len())
        .into_par_iter()
        .map(|i| {
            let t = Instant::now();
            let history = &days[i - exp.history_days..i];
            let profile = RateProfile::fit(history, payoffs.len(), config.bucket_width)?;
            let engine = AuditEngine::new(&payoffs, &profile, engine_config)?;
            let report = engine.run_cycle(i as u64, &days[i])?;
            Ok((report, t.elapsed().as_secs_f64()))
        })
        .collect::<Result<_, Failure>>()?;

    let (reports, seconds): (Vec<CycleReport>, Vec<f64>) = results.into_iter().unzip();
    let summary = summarize_run(params, &reports, &seconds, started.elapsed().as_secs_f64());
    Ok((reports, summary))
}

fn summarize_run(
    params: &SimParams,
    reports: &[CycleReport],
    seconds: &[f64],
    total_seconds: f64,
) -> RunSummary {
    let decisions = || reports.iter().flat_map(|r| &r.trace);
    let diffs: Vec<f64> = decisions()
        .map(|d| d.ossp_utility - d.online_sse_utility)
        .collect();
    let alerts = diffs.len();
    let (mean_advantage, std_advantage) = mean_std(&diffs);
    let (mean_ossp_utility, _) = mean_std(&decisions().map(|d| d.ossp_utility).collect::<Vec<_>>());
    let (mean_online_sse_utility, _) =
        mean_std(&decisions().map(|d| d.online_sse_utility).collect::<Vec<_>>());
    let offline: Vec<f64> = reports
        .iter()
        .filter_map(|r| r.summary.offline_sse_utility)
        .collect();
    let improvement_pct = if mean_online_sse_utility != 0.0 {
        100.0 * mean_advantage / mean_online_sse_utility.abs()
    } else {
        0.0
    };
    let per_alert_ms: Vec<f64> = reports
        .iter()
        .zip(seconds)
        .filter(|(r, _)| !r.trace.is_empty())
        .map(|(r, s)| 1e3 * s / r.trace.len() as f64)
        .collect();
    RunSummary {
        params: *params,
        alerts,
        mean_advantage,
        std_advantage,
        improvement_pct,
        mean_ossp_utility,
        mean_online_sse_utility,
        mean_offline_sse_utility: (!offline.is_empty()).then(|| mean_std(&offline).0),
        days: reports
            .iter()
            .zip(seconds)
            .map(|(r, &s)| DaySummary {
                cycle_id: r.cycle_id,
                summary: r.summary,
                seconds: s,
            })
            .collect(),
        runtime: RuntimeStats {
            total_seconds,
            mean_ms_per_alert: if alerts > 0 {
                1e3 * seconds.iter().sum::<f64>() / alerts as f64
            } else {
                0.0
            },
            slowest_day_ms_per_alert: per_alert_ms.iter().copied().fold(0.0, f64::max),
        },
    }
}
