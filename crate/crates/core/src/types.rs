//! Domain records shared by the solvers and the replay engine.

use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::{CYCLE_SECONDS, EPSILON};

/// Index into the alert type table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AlertTypeId(pub usize);

impl AlertTypeId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for AlertTypeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Payoffs and costs for a single alert type.
///
/// `u_dc`/`u_du` are the auditor's utilities when an attack through this type
/// is audited/missed, `u_ac`/`u_au` the attacker's. A warned benign user quits
/// with probability `quit_prob`, costing the auditor `quit_loss`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TypePayoff {
    pub u_dc: f64,
    pub u_du: f64,
    pub u_ac: f64,
    pub u_au: f64,
    pub audit_cost: f64,
    pub quit_prob: f64,
    pub quit_loss: f64,
}

impl TypePayoff {
    fn validate(&self, type_id: usize) -> Result<()> {
        let fail = |reason: &str| {
            Err(Error::InvalidPayoff {
                type_id,
                reason: reason.into(),
            })
        };
        let all = [
            self.u_dc,
            self.u_du,
            self.u_ac,
            self.u_au,
            self.audit_cost,
            self.quit_prob,
            self.quit_loss,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return fail("non-finite value");
        }
        if !(self.u_ac < 0.0 && self.u_au > 0.0) {
            return fail("attacker payoffs must satisfy u_ac < 0 < u_au");
        }
        if !(self.u_dc >= 0.0 && self.u_du < 0.0) {
            return fail("auditor payoffs must satisfy u_dc >= 0 > u_du");
        }
        if self.audit_cost <= 0.0 {
            return fail("audit_cost must be positive");
        }
        if !(0.0..=1.0).contains(&self.quit_prob) {
            return fail("quit_prob must lie in [0, 1]");
        }
        if self.quit_loss > 0.0 {
            return fail("quit_loss must be non-positive");
        }
        Ok(())
    }

    /// Attacker utility when the alert is covered with probability `coverage`
    /// and no warning is ever sent.
    pub fn attacker_utility_at(&self, coverage: f64) -> f64 {
        coverage * self.u_ac + (1.0 - coverage) * self.u_au
    }

    /// Auditor utility for an attack through this type covered with
    /// probability `coverage` and no warning.
    pub fn auditor_utility_at(&self, coverage: f64) -> f64 {
        coverage * self.u_dc + (1.0 - coverage) * self.u_du
    }

    /// Expected usability loss per unit of warning probability given
    /// `expected_future` benign alerts left in the cycle.
    pub fn warn_cost(&self, expected_future: f64) -> f64 {
        self.quit_prob * expected_future * self.quit_loss
    }
}

/// Validated payoff table, one entry per alert type.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PayoffStructure {
    types: Vec<TypePayoff>,
}

impl PayoffStructure {
    pub fn new(types: Vec<TypePayoff>) -> Result<Self> {
        if types.is_empty() {
            return Err(Error::InvalidConfig("payoff table has no types".into()));
        }
        for (i, t) in types.iter().enumerate() {
            t.validate(i)?;
        }
        Ok(Self { types })
    }

    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }

    pub fn get(&self, id: AlertTypeId) -> Result<&TypePayoff> {
        self.types.get(id.0).ok_or(Error::UnknownType(id.0))
    }

    pub fn types(&self) -> &[TypePayoff] {
        &self.types
    }

    pub fn ids(&self) -> impl Iterator<Item = AlertTypeId> {
        (0..self.types.len()).map(AlertTypeId)
    }

    /// Copy with every quit probability multiplied by `scale`, clamped to [0, 1].
    pub fn with_quit_prob_scale(&self, scale: f64) -> Result<Self> {
        let types = self
            .types
            .iter()
            .map(|t| TypePayoff {
                quit_prob: (t.quit_prob * scale).clamp(0.0, 1.0),
                ..*t
            })
            .collect();
        Self::new(types)
    }

    /// Copy with every quit loss replaced by `loss`.
    pub fn with_quit_loss(&self, loss: f64) -> Result<Self> {
        let types = self
            .types
            .iter()
            .map(|t| TypePayoff {
                quit_loss: loss,
                ..*t
            })
            .collect();
        Self::new(types)
    }
}

impl core::ops::Index<AlertTypeId> for PayoffStructure {
    type Output = TypePayoff;

    fn index(&self, id: AlertTypeId) -> &TypePayoff {
        &self.types[id.0]
    }
}

/// Joint signal/audit probabilities for one alert type.
///
/// `p1 = P(warn, audit)`, `q1 = P(warn, skip)`, `p0 = P(silent, audit)`,
/// `q0 = P(silent, skip)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeEntry {
    pub p1: f64,
    pub q1: f64,
    pub p0: f64,
    pub q0: f64,
}

impl SchemeEntry {
    /// Warning off, audit with probability `coverage`.
    pub fn silent(coverage: f64) -> Self {
        Self {
            p1: 0.0,
            q1: 0.0,
            p0: coverage,
            q0: 1.0 - coverage,
        }
    }

    pub fn coverage(&self) -> f64 {
        self.p1 + self.p0
    }

    pub fn warn_probability(&self) -> f64 {
        self.p1 + self.q1
    }

    fn is_closed(&self) -> bool {
        let parts = [self.p1, self.q1, self.p0, self.q0];
        parts
            .iter()
            .all(|v| v.is_finite() && (-EPSILON..=1.0 + EPSILON).contains(v))
            && (parts.iter().sum::<f64>() - 1.0).abs() <= EPSILON
    }
}

/// Signaling scheme for every type plus the budget split that funds it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalingScheme {
    entries: Vec<SchemeEntry>,
    budget_split: Vec<f64>,
}

impl SignalingScheme {
    pub fn new(entries: Vec<SchemeEntry>, budget_split: Vec<f64>) -> Result<Self> {
        if entries.len() != budget_split.len() {
            return Err(Error::InvalidConfig(format!(
                "scheme has {} entries but {} budget shares",
                entries.len(),
                budget_split.len()
            )));
        }
        if let Some(i) = entries.iter().position(|e| !e.is_closed()) {
            return Err(Error::InvalidScheme { type_id: i });
        }
        if budget_split.iter().any(|b| !(b.is_finite() && *b >= -EPSILON)) {
            return Err(Error::InvalidConfig("negative budget share".into()));
        }
        Ok(Self {
            entries,
            budget_split,
        })
    }

    pub fn entries(&self) -> &[SchemeEntry] {
        &self.entries
    }

    pub fn entry(&self, id: AlertTypeId) -> &SchemeEntry {
        &self.entries[id.0]
    }

    pub fn budget_split(&self) -> &[f64] {
        &self.budget_split
    }

    pub fn total_budget(&self) -> f64 {
        self.budget_split.iter().sum()
    }

    pub fn coverage(&self) -> Vec<f64> {
        self.entries.iter().map(SchemeEntry::coverage).collect()
    }
}

/// A single alert in a cycle stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlertEvent {
    /// Seconds since the start of the cycle.
    pub timestamp: u32,
    pub type_id: AlertTypeId,
}

impl AlertEvent {
    pub fn new(timestamp: u32, type_id: AlertTypeId) -> Result<Self> {
        if timestamp >= CYCLE_SECONDS {
            return Err(Error::TimestampOutOfRange(timestamp));
        }
        Ok(Self { timestamp, type_id })
    }
}

/// Attacker utility conditional on the branch with audit mass `audit` and
/// skip mass `skip`.
pub fn attacker_cond_utility(audit: f64, skip: f64, payoff: &TypePayoff) -> Result<f64> {
    let mass = audit + skip;
    if mass <= 0.0 {
        return Err(Error::ZeroMass);
    }
    Ok((audit * payoff.u_ac + skip * payoff.u_au) / mass)
}

/// Auditor utility of `scheme` when the attacker targets `best_type`.
///
/// A warned attacker quits and both sides receive nothing, so only the silent
/// branch of the attacked type contributes, plus the usability loss of every
/// warning. `warn_cost_weights[t]` is the per-unit warning loss of type `t`
/// (see [`TypePayoff::warn_cost`]).
pub fn auditor_expected_utility(
    scheme: &SignalingScheme,
    payoffs: &PayoffStructure,
    best_type: AlertTypeId,
    warn_cost_weights: &[f64],
) -> f64 {
    let best = scheme.entry(best_type);
    let payoff = &payoffs[best_type];
    let warn_loss: f64 = scheme
        .entries()
        .iter()
        .zip(warn_cost_weights)
        .map(|(e, w)| e.warn_probability() * w)
        .sum();
    best.p0 * payoff.u_dc + best.q0 * payoff.u_du + warn_loss
}
