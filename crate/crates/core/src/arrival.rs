//! Forecasts of the alerts still to come in the current cycle.
//!
//! The number of type-`t` alerts remaining after time `now` is modeled as
//! Poisson with a mean read off historical cycles. Coverage bought with a
//! budget share `B` is then `B * kappa`, where `kappa = E[1/d; d >= 1] / V`
//! spreads the share over the `d` alerts that actually arrive.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{AlertEvent, PayoffStructure};
use crate::CYCLE_SECONDS;

/// Upper-tail mass at which the Poisson series for `kappa` is truncated.
const TAIL_MASS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Interpolation {
    /// Use the mean at the start of the bucket containing `now`.
    #[default]
    PiecewiseConstant,
    /// Interpolate between bucket starts, reaching zero at the cycle end.
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateConfig {
    /// Below this many expected remaining alerts the previous estimate is
    /// reused (knowledge rollback).
    pub rollback_threshold: f64,
    pub interpolation: Interpolation,
}

impl Default for EstimateConfig {
    fn default() -> Self {
        Self {
            rollback_threshold: 1.0,
            interpolation: Interpolation::PiecewiseConstant,
        }
    }
}

/// Mean number of alerts remaining from each bucket start to the cycle end,
/// per type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateProfile {
    bucket_width: u32,
    cycles: usize,
    /// `remaining[type][bucket]`
    remaining: Vec<Vec<f64>>,
}

impl RateProfile {
    /// Fits a profile over `num_types` alert types from historical cycles.
    pub fn fit(history: &[Vec<AlertEvent>], num_types: usize, bucket_width: u32) -> Result<Self> {
        if history.is_empty() {
            return Err(Error::EmptyHistory);
        }
        if bucket_width == 0 || !CYCLE_SECONDS.is_multiple_of(bucket_width) {
            return Err(Error::InvalidBucketWidth(bucket_width));
        }
        let buckets = (CYCLE_SECONDS / bucket_width) as usize;
        let mut remaining = vec![vec![0.0; buckets]; num_types];
        for cycle in history {
            let mut hist = vec![vec![0u32; buckets]; num_types];
            for alert in cycle {
                if alert.timestamp >= CYCLE_SECONDS {
                    return Err(Error::TimestampOutOfRange(alert.timestamp));
                }
                let row = hist
                    .get_mut(alert.type_id.0)
                    .ok_or(Error::UnknownType(alert.type_id.0))?;
                row[(alert.timestamp / bucket_width) as usize] += 1;
            }
            for (acc, counts) in remaining.iter_mut().zip(&hist) {
                let mut suffix = 0u32;
                for b in (0..buckets).rev() {
                    suffix += counts[b];
                    acc[b] += f64::from(suffix);
                }
            }
        }
        let n = history.len() as f64;
        for row in remaining.iter_mut() {
            row.iter_mut().for_each(|v| *v /= n);
            isotonic_non_increasing(row);
        }
        Ok(Self {
            bucket_width,
            cycles: history.len(),
            remaining,
        })
    }

    pub fn num_types(&self) -> usize {
        self.remaining.len()
    }

    pub fn bucket_width(&self) -> u32 {
        self.bucket_width
    }

    pub fn cycles(&self) -> usize {
        self.cycles
    }

    /// Remaining-count means per bucket for `type_index`.
    pub fn bucket_means(&self, type_index: usize) -> &[f64] {
        &self.remaining[type_index]
    }

    /// Expected alerts of `type_index` from `now` to the end of the cycle.
    pub fn remaining_mean(&self, type_index: usize, now: u32, interpolation: Interpolation) -> f64 {
        let row = &self.remaining[type_index];
        let now = now.min(CYCLE_SECONDS - 1);
        let b = (now / self.bucket_width) as usize;
        match interpolation {
            Interpolation::PiecewiseConstant => row[b],
            Interpolation::Linear => {
                let next = row.get(b + 1).copied().unwrap_or(0.0);
                let frac =
                    f64::from(now - b as u32 * self.bucket_width) / f64::from(self.bucket_width);
                row[b] + (next - row[b]) * frac
            }
        }
    }

    /// Forecast at `now`, applying knowledge rollback against `prev`.
    pub fn estimate(
        &self,
        now: u32,
        prev: Option<&FutureEstimate>,
        config: &EstimateConfig,
        payoffs: &PayoffStructure,
    ) -> Result<FutureEstimate> {
        if now >= CYCLE_SECONDS {
            return Err(Error::TimestampOutOfRange(now));
        }
        if payoffs.len() != self.num_types() {
            return Err(Error::InvalidConfig(alloc::format!(
                "profile has {} types, payoff table {}",
                self.num_types(),
                payoffs.len()
            )));
        }
        let types = payoffs
            .types()
            .iter()
            .enumerate()
            .map(|(t, payoff)| {
                let lambda = self.remaining_mean(t, now, config.interpolation);
                match prev.and_then(|p| p.types.get(t)) {
                    Some(old) if lambda < config.rollback_threshold => TypeEstimate {
                        rollback_active: true,
                        ..*old
                    },
                    _ => TypeEstimate::new(lambda, payoff.audit_cost),
                }
            })
            .collect();
        Ok(FutureEstimate { types })
    }
}

/// Forecast for one type.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TypeEstimate {
    /// Poisson mean of the remaining alerts.
    pub lambda: f64,
    /// Coverage bought per unit of budget.
    pub kappa: f64,
    pub rollback_active: bool,
}

impl TypeEstimate {
    pub fn new(lambda: f64, audit_cost: f64) -> Self {
        let lambda = lambda.max(0.0);
        Self {
            lambda,
            kappa: coverage_coefficient(lambda, audit_cost),
            rollback_active: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FutureEstimate {
    pub types: Vec<TypeEstimate>,
}

impl FutureEstimate {
    /// Forecast from explicit Poisson means, one per type of `payoffs`.
    pub fn from_lambdas(lambdas: &[f64], payoffs: &PayoffStructure) -> Self {
        let types = lambdas
            .iter()
            .zip(payoffs.types())
            .map(|(&l, p)| TypeEstimate::new(l, p.audit_cost))
            .collect();
        Self { types }
    }

    /// Forecast with explicit coverage coefficients (deterministic arrivals).
    pub fn from_kappas(lambdas: &[f64], kappas: &[f64]) -> Self {
        let types = lambdas
            .iter()
            .zip(kappas)
            .map(|(&lambda, &kappa)| TypeEstimate {
                lambda,
                kappa,
                rollback_active: false,
            })
            .collect();
        Self { types }
    }

    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }

    pub fn lambdas(&self) -> Vec<f64> {
        self.types.iter().map(|t| t.lambda).collect()
    }

    pub fn kappas(&self) -> Vec<f64> {
        self.types.iter().map(|t| t.kappa).collect()
    }
}

/// `E[1/d; d >= 1] / audit_cost` for `d ~ Poisson(lambda)`.
///
/// The series is summed until the remaining upper-tail mass drops below
/// `1e-9`; the `d = 0` outcome contributes no coverage.
pub fn coverage_coefficient(lambda: f64, audit_cost: f64) -> f64 {
    if lambda.is_nan() || lambda <= 0.0 {
        return 0.0;
    }
    let ln_lambda = libm::log(lambda);
    let mut cdf = libm::exp(-lambda);
    let mut sum = 0.0;
    let hard_cap = (lambda + 50.0 * libm::sqrt(lambda) + 100.0) as u64;
    let mut d = 1u64;
    while d <= hard_cap {
        let df = d as f64;
        let pmf = libm::exp(-lambda + df * ln_lambda - libm::lgamma(df + 1.0));
        sum += pmf / df;
        cdf += pmf;
        if d as f64 > lambda && 1.0 - cdf < TAIL_MASS {
            break;
        }
        d += 1;
    }
    sum / audit_cost
}

/// Pool-adjacent-violators projection onto non-increasing sequences.
fn isotonic_non_increasing(values: &mut [f64]) {
    let mut blocks: Vec<(f64, usize)> = Vec::with_capacity(values.len());
    for &v in values.iter() {
        blocks.push((v, 1));
        while blocks.len() > 1 {
            let (s2, n2) = blocks[blocks.len() - 1];
            let (s1, n1) = blocks[blocks.len() - 2];
            if s1 / n1 as f64 >= s2 / n2 as f64 {
                break;
            }
            blocks.pop();
            let last = blocks.len() - 1;
            blocks[last] = (s1 + s2, n1 + n2);
        }
    }
    let mut i = 0;
    for (sum, n) in blocks {
        let mean = sum / n as f64;
        values[i..i + n].iter_mut().for_each(|v| *v = mean);
        i += n;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::types::AlertTypeId;

    fn alert(ts: u32, t: usize) -> AlertEvent {
        AlertEvent::new(ts, AlertTypeId(t)).unwrap()
    }

    #[test]
    fn remaining_counts_by_direct_counting() {
        let cycle = vec![alert(3600, 0), alert(7200, 0), alert(10800, 0)];
        let p = RateProfile::fit(core::slice::from_ref(&cycle), 1, 3600).unwrap();
        let m = p.bucket_means(0);
        assert_eq!(m[0], 3.0);
        assert_eq!(m[1], 3.0);
        assert_eq!(m[2], 2.0);
        assert_eq!(m[3], 1.0);
        assert_eq!(m[4], 0.0);

        let twice = RateProfile::fit(&[cycle.clone(), cycle], 1, 3600).unwrap();
        assert_eq!(twice.bucket_means(0), p.bucket_means(0));
    }

    #[test]
    fn fit_rejects_bad_input() {
        assert_eq!(RateProfile::fit(&[], 1, 3600), Err(Error::EmptyHistory));
        assert_eq!(
            RateProfile::fit(&[vec![]], 1, 7000),
            Err(Error::InvalidBucketWidth(7000))
        );
        assert_eq!(
            RateProfile::fit(&[vec![alert(5, 3)]], 2, 3600),
            Err(Error::UnknownType(3))
        );
    }

    #[test]
    fn pav_pools_violations() {
        let mut v = [3.0, 1.0, 2.0, 0.0];
        isotonic_non_increasing(&mut v);
        assert_eq!(v, [3.0, 1.5, 1.5, 0.0]);
        let mut w = [1.0, 2.0, 3.0];
        isotonic_non_increasing(&mut w);
        assert_eq!(w, [2.0, 2.0, 2.0]);
    }

    #[test]
    fn linear_interpolation_reaches_zero_at_cycle_end() {
        let p = RateProfile::fit(&[vec![alert(0, 0), alert(43_200, 0)]], 1, 43_200).unwrap();
        let mid = p.remaining_mean(0, 21_600, Interpolation::Linear);
        assert!((mid - 1.5).abs() < 1e-12);
        let late = p.remaining_mean(0, 64_800, Interpolation::Linear);
        assert!((late - 0.5).abs() < 1e-12);
        assert_eq!(p.remaining_mean(0, 21_600, Interpolation::PiecewiseConstant), 2.0);
    }

    #[test]
    fn zero_rate_gives_zero_kappa() {
        assert_eq!(coverage_coefficient(0.0, 1.0), 0.0);
        let e = TypeEstimate::new(0.0, 1.0);
        assert_eq!((e.lambda, e.kappa, e.rollback_active), (0.0, 0.0, false));
    }

    #[test]
    fn kappa_scales_inversely_with_audit_cost() {
        let a = coverage_coefficient(3.0, 1.0);
        let b = coverage_coefficient(3.0, 2.0);
        assert!((a - 2.0 * b).abs() < 1e-15);
    }

    #[test]
    fn kappa_survives_large_rates() {
        let k = coverage_coefficient(2000.0, 1.0);
        assert!(k > 0.0 && (k * 2000.0 - 1.0).abs() < 0.01);
    }

    #[test]
    fn rollback_reuses_previous_estimate() {
        let payoffs = fixtures::two_type_payoffs(0.186, -1.0);
        let cycle = vec![alert(0, 0), alert(0, 1)];
        let profile = RateProfile::fit(&[cycle], 2, 3600).unwrap();
        let prev = FutureEstimate::from_lambdas(&[5.0, 5.0], &payoffs);
        let config = EstimateConfig::default();
        // Both types have 1 expected alert at t=0, then none.
        let late = profile.estimate(7200, Some(&prev), &config, &payoffs).unwrap();
        for t in &late.types {
            assert!(t.rollback_active);
            assert_eq!(t.lambda, 5.0);
            assert_eq!(t.kappa, prev.types[0].kappa);
        }
        let fresh = profile.estimate(7200, None, &config, &payoffs).unwrap();
        assert!(fresh.types.iter().all(|t| t.lambda == 0.0 && t.kappa == 0.0));
    }

    #[test]
    fn rollback_below_custom_threshold() {
        let payoffs = fixtures::two_type_payoffs(0.186, -1.0);
        let cycles: Vec<Vec<AlertEvent>> = (0..10)
            .map(|i| if i < 3 { vec![alert(0, 0)] } else { vec![] })
            .collect();
        let profile = RateProfile::fit(&cycles, 2, 3600).unwrap();
        let prev = FutureEstimate::from_lambdas(&[5.0, 5.0], &payoffs);
        let config = EstimateConfig {
            rollback_threshold: 1.0,
            ..Default::default()
        };
        let e = profile.estimate(0, Some(&prev), &config, &payoffs).unwrap();
        assert!(e.types[0].rollback_active);
        assert_eq!(e.types[0].lambda, 5.0);
        let lower = EstimateConfig {
            rollback_threshold: 0.2,
            ..Default::default()
        };
        let e = profile.estimate(0, Some(&prev), &lower, &payoffs).unwrap();
        assert!(!e.types[0].rollback_active);
        assert!((e.types[0].lambda - 0.3).abs() < 1e-12);
    }
}
