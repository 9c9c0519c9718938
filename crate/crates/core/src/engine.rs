//! Online replay of one audit cycle.
//!
//! For every alert the engine forecasts the remaining arrivals, solves the
//! signaling policy on the spendable budget, samples a warning for alerts of
//! the attacker's best-response type and charges the signal-conditional audit
//! probability against the budget. Alerts of other types are charged their
//! no-signaling coverage. The Stackelberg baselines are recorded alongside.

use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::arrival::{EstimateConfig, FutureEstimate, RateProfile};
use crate::equilibrium::{solve_offline_sse, solve_online_sse, solve_ossp};
use crate::error::{Error, Result};
use crate::rng::{self, StreamRng};
use crate::types::{AlertEvent, AlertTypeId, PayoffStructure, SchemeEntry};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EngineConfig {
    pub total_budget: f64,
    /// Fraction of the budget held back for investigating repeated requests.
    pub alpha: f64,
    pub estimate: EstimateConfig,
    pub seed: u64,
}

impl EngineConfig {
    fn validate(&self) -> Result<()> {
        if !(self.total_budget.is_finite() && self.total_budget >= 0.0) {
            return Err(Error::InvalidConfig("total budget must be non-negative".into()));
        }
        if !(0.0..1.0).contains(&self.alpha) {
            return Err(Error::InvalidConfig("alpha must lie in [0, 1)".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Signal {
    Warn,
    Silent,
    /// Alert type differs from the best response; no signal is sampled.
    None,
}

impl Signal {
    pub fn as_str(self) -> &'static str {
        match self {
            Signal::Warn => "warn",
            Signal::Silent => "silent",
            Signal::None => "none",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionRecord {
    pub alert_index: usize,
    pub alert: AlertEvent,
    pub best_type: AlertTypeId,
    /// Signaling policy for the alert's own type.
    pub scheme: SchemeEntry,
    pub signal: Signal,
    /// Audit probability conditional on the sampled signal.
    pub audit_probability: f64,
    /// Budget charged for this alert.
    pub deduction: f64,
    /// Budget left after this alert.
    pub remaining_budget: f64,
    pub ossp_utility: f64,
    pub online_sse_utility: f64,
    pub offline_sse_utility: Option<f64>,
    pub rollback_active: bool,
}

/// Mutable state of one cycle. Single writer.
#[derive(Debug, Clone)]
pub struct CycleState {
    pub cycle_id: u64,
    pub remaining_budget: f64,
    pub reserved_budget: f64,
    pub clock: u32,
    pub decisions: Vec<DecisionRecord>,
    offline_utility: Option<f64>,
    last_estimate: Option<FutureEstimate>,
    rng: StreamRng,
}

impl CycleState {
    /// Flat offline baseline reported with every decision.
    pub fn set_offline_utility(&mut self, utility: f64) {
        self.offline_utility = Some(utility);
    }

    pub fn last_estimate(&self) -> Option<&FutureEstimate> {
        self.last_estimate.as_ref()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleSummary {
    pub alerts: usize,
    /// Mean and sample standard deviation of per-alert signaling minus
    /// budget-matched Stackelberg utility.
    pub mean_advantage: f64,
    pub std_advantage: f64,
    pub mean_ossp_utility: f64,
    pub mean_online_sse_utility: f64,
    pub offline_sse_utility: Option<f64>,
    pub spendable_budget: f64,
    pub total_deduction: f64,
    pub final_budget: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleReport {
    pub cycle_id: u64,
    pub trace: Vec<DecisionRecord>,
    pub summary: CycleSummary,
}

pub struct AuditEngine<'a> {
    payoffs: &'a PayoffStructure,
    profile: &'a RateProfile,
    config: EngineConfig,
}

impl<'a> AuditEngine<'a> {
    pub fn new(
        payoffs: &'a PayoffStructure,
        profile: &'a RateProfile,
        config: EngineConfig,
    ) -> Result<Self> {
        config.validate()?;
        if profile.num_types() != payoffs.len() {
            return Err(Error::InvalidConfig(alloc::format!(
                "profile has {} types, payoff table {}",
                profile.num_types(),
                payoffs.len()
            )));
        }
        Ok(Self {
            payoffs,
            profile,
            config,
        })
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn start_cycle(&self, cycle_id: u64) -> CycleState {
        let total = self.config.total_budget;
        CycleState {
            cycle_id,
            remaining_budget: total * (1.0 - self.config.alpha),
            reserved_budget: total * self.config.alpha,
            clock: 0,
            decisions: Vec::new(),
            offline_utility: None,
            last_estimate: None,
            rng: rng::substream(self.config.seed, rng::SIGNAL, cycle_id),
        }
    }

    pub fn process_alert<'s>(
        &self,
        state: &'s mut CycleState,
        alert: AlertEvent,
    ) -> Result<&'s DecisionRecord> {
        if alert.timestamp < state.clock {
            return Err(Error::OutOfOrderAlert {
                timestamp: alert.timestamp,
                clock: state.clock,
            });
        }
        let payoff = self.payoffs.get(alert.type_id)?;
        let estimate = self.profile.estimate(
            alert.timestamp,
            state.last_estimate.as_ref(),
            &self.config.estimate,
            self.payoffs,
        )?;

        let budget = state.remaining_budget;
        let ossp = solve_ossp(self.payoffs, &estimate, budget)?;
        let matched = solve_online_sse(self.payoffs, &estimate, budget + state.reserved_budget)?;
        let scheme = ossp
            .scheme
            .as_ref()
            .map(|s| *s.entry(alert.type_id))
            .ok_or(Error::NoFeasibleType)?;

        let (signal, audit_probability) = if alert.type_id == ossp.best_type {
            let draw: f64 = state.rng.random();
            sample_signal(&scheme, draw)
        } else {
            let own = solve_online_sse(self.payoffs, &estimate, budget)?;
            (Signal::None, own.coverage[alert.type_id.0])
        };

        let deduction = (audit_probability * payoff.audit_cost).min(budget).max(0.0);
        state.remaining_budget = (budget - deduction).max(0.0);
        state.clock = alert.timestamp;
        let rollback_active = estimate.types.iter().any(|t| t.rollback_active);
        state.last_estimate = Some(estimate);
        state.decisions.push(DecisionRecord {
            alert_index: state.decisions.len(),
            alert,
            best_type: ossp.best_type,
            scheme,
            signal,
            audit_probability,
            deduction,
            remaining_budget: state.remaining_budget,
            ossp_utility: ossp.auditor_utility,
            online_sse_utility: matched.auditor_utility,
            offline_sse_utility: state.offline_utility,
            rollback_active,
        });
        Ok(state.decisions.last().expect("just pushed"))
    }

    /// Replays a time-sorted stream as cycle `cycle_id`.
    pub fn run_cycle(&self, cycle_id: u64, stream: &[AlertEvent]) -> Result<CycleReport> {
        let mut state = self.start_cycle(cycle_id);
        let spendable = state.remaining_budget;
        if !stream.is_empty() {
            let mut counts = alloc::vec![0u32; self.payoffs.len()];
            for a in stream {
                *counts
                    .get_mut(a.type_id.0)
                    .ok_or(Error::UnknownType(a.type_id.0))? += 1;
            }
            let offline = solve_offline_sse(self.payoffs, &counts, self.config.total_budget)?;
            state.set_offline_utility(offline.auditor_utility);
        }
        for &alert in stream {
            self.process_alert(&mut state, alert)?;
        }
        let summary = summarize(&state.decisions, spendable, state.offline_utility);
        Ok(CycleReport {
            cycle_id,
            trace: state.decisions,
            summary,
        })
    }
}

/// Signal and conditional audit probability for a uniform `draw` in [0, 1).
pub fn sample_signal(scheme: &SchemeEntry, draw: f64) -> (Signal, f64) {
    let warn_mass = scheme.p1 + scheme.q1;
    if draw < warn_mass {
        (Signal::Warn, scheme.p1 / warn_mass)
    } else {
        let silent_mass = scheme.p0 + scheme.q0;
        let p = if silent_mass > 0.0 {
            scheme.p0 / silent_mass
        } else {
            0.0
        };
        (Signal::Silent, p)
    }
}

pub fn summarize(trace: &[DecisionRecord], spendable: f64, offline: Option<f64>) -> CycleSummary {
    let diffs: Vec<f64> = trace
        .iter()
        .map(|d| d.ossp_utility - d.online_sse_utility)
        .collect();
    let (mean_advantage, std_advantage) = mean_std(&diffs);
    let mean_of = |f: fn(&DecisionRecord) -> f64| {
        if trace.is_empty() {
            0.0
        } else {
            trace.iter().map(f).sum::<f64>() / trace.len() as f64
        }
    };
    CycleSummary {
        alerts: trace.len(),
        mean_advantage,
        std_advantage,
        mean_ossp_utility: mean_of(|d| d.ossp_utility),
        mean_online_sse_utility: mean_of(|d| d.online_sse_utility),
        offline_sse_utility: offline,
        spendable_budget: spendable,
        total_deduction: trace.iter().map(|d| d.deduction).sum(),
        final_budget: trace.last().map_or(spendable, |d| d.remaining_budget),
    }
}

/// Mean and sample standard deviation; zeros for short inputs.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, libm::sqrt(var))
}
