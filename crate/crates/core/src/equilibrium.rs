//! Equilibrium computation by best-response enumeration.
//!
//! Each solver assumes in turn that type `t` is the attacker's best response,
//! solves the linear program that maximizes the auditor's utility under that
//! assumption, and keeps the best feasible candidate. Ties within
//! [`TIE_TOLERANCE`] go to the lowest type id.
//!
//! An LP optimum is frequently not unique: budget beyond what the chosen
//! best response needs can be parked on any type without changing the
//! auditor's utility. Every solver therefore runs a second LP that keeps the
//! optimal utility and spends as little budget as possible, which makes the
//! returned coverage canonical. Types that cannot occur (`kappa = 0`) are
//! neither candidates nor constrained against, since the attacker cannot
//! trigger them.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::arrival::FutureEstimate;
use crate::error::{Error, Result};
use crate::lp::{self, LinearProgram, LpOutcome};
use crate::types::{
    auditor_expected_utility, AlertTypeId, PayoffStructure, SchemeEntry, SignalingScheme,
    TypePayoff,
};

/// Candidates whose auditor utilities differ by at most this are tied.
pub const TIE_TOLERANCE: f64 = 1e-9;

/// Relative slacks on the optimal utility when minimizing spend, tightest
/// first. A looser one is used only if rounding makes the tighter infeasible.
const SPEND_SLACKS: [f64; 3] = [1e-13, 1e-11, 1e-9];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumSolution {
    /// Marginal audit probability per type.
    pub coverage: Vec<f64>,
    pub best_type: AlertTypeId,
    pub auditor_utility: f64,
    pub attacker_utility: f64,
    /// Budget allotted to each type.
    pub budget_split: Vec<f64>,
    /// Present for signaling solutions only.
    pub scheme: Option<SignalingScheme>,
}

/// Per-unit warning loss `P * lambda * C` for every type.
pub fn warn_cost_weights(payoffs: &PayoffStructure, estimates: &FutureEstimate) -> Vec<f64> {
    payoffs
        .types()
        .iter()
        .zip(&estimates.types)
        .map(|(p, e)| p.warn_cost(e.lambda))
        .collect()
}

/// Stackelberg equilibrium without signaling for the alert at hand, with
/// coverage bought at `kappa` per unit of budget.
pub fn solve_online_sse(
    payoffs: &PayoffStructure,
    estimates: &FutureEstimate,
    budget: f64,
) -> Result<EquilibriumSolution> {
    check_inputs(payoffs, estimates, budget)?;
    solve_sse(payoffs, &estimates.kappas(), budget)
}

/// Offline Stackelberg equilibrium: coverage of type `t` is
/// `min(1, B_t / (V_t * d_t))` for the realized cycle counts `d`. Types with
/// no alerts cannot be attacked.
pub fn solve_offline_sse(
    payoffs: &PayoffStructure,
    realized_counts: &[u32],
    budget: f64,
) -> Result<EquilibriumSolution> {
    if realized_counts.len() != payoffs.len() {
        return Err(Error::InvalidConfig(alloc::format!(
            "{} realized counts for {} types",
            realized_counts.len(),
            payoffs.len()
        )));
    }
    check_budget(budget)?;
    let kappas: Vec<f64> = realized_counts
        .iter()
        .zip(payoffs.types())
        .map(|(&d, p)| {
            if d == 0 {
                0.0
            } else {
                1.0 / (p.audit_cost * f64::from(d))
            }
        })
        .collect();
    solve_sse(payoffs, &kappas, budget)
}

/// Optimal joint signaling and audit policy (with usability cost) for the
/// alert at hand.
///
/// Variables per type are the four joint probabilities
/// `(p1, q1, p0, q0)`; the budget share of a type is recovered as its
/// coverage `p1 + p0` divided by `kappa`.
pub fn solve_ossp(
    payoffs: &PayoffStructure,
    estimates: &FutureEstimate,
    budget: f64,
) -> Result<EquilibriumSolution> {
    check_inputs(payoffs, estimates, budget)?;
    let kappas = estimates.kappas();
    let weights = warn_cost_weights(payoffs, estimates);
    let game = Game::new(payoffs, &kappas);

    let (t, value) = best_candidate(&game, |t| game.ossp_program(t, &weights, budget), |_| 0.0)?;
    let x = min_spend(game.ossp_program(t, &weights, budget), value, game.ossp_spend())?;

    let n = payoffs.len();
    let mut entries: Vec<SchemeEntry> = (0..n)
        .map(|i| {
            let [p1, q1, p0] = [x[4 * i], x[4 * i + 1], x[4 * i + 2]].map(|v| clean(v).clamp(0.0, 1.0));
            // Closure holds only up to rounding in the LP; restore it exactly.
            let mass = p1 + q1 + p0;
            if mass > 1.0 {
                SchemeEntry {
                    p1: p1 / mass,
                    q1: q1 / mass,
                    p0: p0 / mass,
                    q0: 0.0,
                }
            } else {
                SchemeEntry {
                    p1,
                    q1,
                    p0,
                    q0: 1.0 - mass,
                }
            }
        })
        .collect();
    // Warnings on a type the attacker avoids only cost usability; fold that
    // mass into the silent branch. Feasibility and utility are preserved.
    for (i, e) in entries.iter_mut().enumerate() {
        if i != t.0 {
            *e = SchemeEntry {
                p1: 0.0,
                q1: 0.0,
                p0: e.p0 + e.p1,
                q0: e.q0 + e.q1,
            };
        }
    }
    let budget_split = entries
        .iter()
        .zip(&kappas)
        .map(|(e, &k)| if k > 0.0 { e.coverage() / k } else { 0.0 })
        .collect();
    let scheme = SignalingScheme::new(entries, budget_split)?;

    let attacker_utility = game
        .candidates()
        .map(|c| {
            let e = scheme.entry(c);
            let p = &payoffs[c];
            e.p0 * p.u_ac + e.q0 * p.u_au
        })
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(EquilibriumSolution {
        coverage: scheme.coverage(),
        best_type: t,
        auditor_utility: auditor_expected_utility(&scheme, payoffs, t, &weights),
        attacker_utility,
        budget_split: scheme.budget_split().to_vec(),
        scheme: Some(scheme),
    })
}

/// Whether the payoffs of the attacked type guarantee that an optimal policy
/// never audits a silent alert:
/// `0 >= (u_dc - w) / (u_du - w) >= u_ac / u_au` with `w` the warning cost.
pub fn no_silent_audit_condition(payoff: &TypePayoff, warn_cost: f64) -> Result<bool> {
    let denom = payoff.u_du - warn_cost;
    if denom == 0.0 || payoff.u_au == 0.0 {
        return Err(Error::DegenerateDenominator);
    }
    let ratio = (payoff.u_dc - warn_cost) / denom;
    Ok(0.0 >= ratio && ratio >= payoff.u_ac / payoff.u_au)
}

fn solve_sse(payoffs: &PayoffStructure, kappas: &[f64], budget: f64) -> Result<EquilibriumSolution> {
    let game = Game::new(payoffs, kappas);
    let (t, value) = best_candidate(&game, |t| game.sse_program(t, budget), |t| payoffs[t].u_du)?;

    let split: Vec<f64> = min_spend(game.sse_program(t, budget), value, vec![1.0; payoffs.len()])?
        .into_iter()
        .map(clean)
        .collect();
    let coverage: Vec<f64> = split
        .iter()
        .zip(kappas)
        .map(|(b, k)| (b * k).clamp(0.0, 1.0))
        .collect();
    let attacker_utility = game
        .candidates()
        .map(|c| payoffs[c].attacker_utility_at(coverage[c.0]))
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(EquilibriumSolution {
        auditor_utility: payoffs[t].auditor_utility_at(coverage[t.0]),
        attacker_utility,
        coverage,
        best_type: t,
        budget_split: split,
        scheme: None,
    })
}

struct Game<'a> {
    payoffs: &'a PayoffStructure,
    kappas: &'a [f64],
}

impl<'a> Game<'a> {
    fn new(payoffs: &'a PayoffStructure, kappas: &'a [f64]) -> Self {
        Self { payoffs, kappas }
    }

    fn active(&self, t: usize) -> bool {
        self.kappas[t] > 0.0
    }

    fn candidates(&self) -> impl Iterator<Item = AlertTypeId> + '_ {
        self.payoffs.ids().filter(|t| self.active(t.0))
    }

    /// Variables: budget share per type.
    fn sse_program(&self, t: AlertTypeId, budget: f64) -> LinearProgram {
        let n = self.payoffs.len();
        let p = self.payoffs.types();
        let k = self.kappas;
        let mut lp = LinearProgram::new(n);
        lp.objective[t.0] = k[t.0] * (p[t.0].u_dc - p[t.0].u_du);
        // Attacker utility of type i at share B_i is u_au + k_i (u_ac - u_au) B_i.
        let slope = |i: usize| k[i] * (p[i].u_ac - p[i].u_au);
        for other in (0..n).filter(|&i| i != t.0 && self.active(i)) {
            let mut row = vec![0.0; n];
            row[t.0] = -slope(t.0);
            row[other] = slope(other);
            lp.add_le(row, p[t.0].u_au - p[other].u_au);
        }
        lp.add_le(vec![1.0; n], budget);
        for (i, ki) in k.iter().enumerate().take(n) {
            let cap = if self.active(i) { (1.0 / ki).min(budget) } else { 0.0 };
            lp.set_bounds(i, 0.0, cap);
        }
        lp
    }

    /// Variables: `(p1, q1, p0, q0)` per type, laid out contiguously.
    fn ossp_program(&self, t: AlertTypeId, weights: &[f64], budget: f64) -> LinearProgram {
        let n = self.payoffs.len();
        let p = self.payoffs.types();
        let (p1, q1, p0, q0) = (|i| 4 * i, |i| 4 * i + 1, |i| 4 * i + 2, |i| 4 * i + 3);
        let mut lp = LinearProgram::new(4 * n);

        lp.objective[p0(t.0)] = p[t.0].u_dc;
        lp.objective[q0(t.0)] = p[t.0].u_du;
        for (i, &w) in weights.iter().enumerate() {
            lp.objective[p1(i)] += w;
            lp.objective[q1(i)] += w;
        }

        // The silent branch of `t` is at least as attractive as any other's.
        for other in (0..n).filter(|&i| i != t.0 && self.active(i)) {
            let mut row = vec![0.0; 4 * n];
            row[p0(t.0)] = -p[t.0].u_ac;
            row[q0(t.0)] = -p[t.0].u_au;
            row[p0(other)] = p[other].u_ac;
            row[q0(other)] = p[other].u_au;
            lp.add_le(row, 0.0);
        }
        let mut spend = vec![0.0; 4 * n];
        for i in 0..n {
            // A warned attacker prefers to quit.
            let mut row = vec![0.0; 4 * n];
            row[p1(i)] = p[i].u_ac;
            row[q1(i)] = p[i].u_au;
            lp.add_le(row, 0.0);

            let mut closure = vec![0.0; 4 * n];
            closure[4 * i..4 * i + 4].iter_mut().for_each(|c| *c = 1.0);
            lp.add_eq(closure, 1.0);

            if self.active(i) {
                spend[p1(i)] = 1.0 / self.kappas[i];
                spend[p0(i)] = 1.0 / self.kappas[i];
            } else {
                lp.set_bounds(p1(i), 0.0, 0.0);
                lp.set_bounds(p0(i), 0.0, 0.0);
            }
        }
        lp.add_le(spend, budget);
        lp
    }

    fn ossp_spend(&self) -> Vec<f64> {
        let n = self.payoffs.len();
        let mut spend = vec![0.0; 4 * n];
        for i in (0..n).filter(|&i| self.active(i)) {
            spend[4 * i] = 1.0 / self.kappas[i];
            spend[4 * i + 2] = 1.0 / self.kappas[i];
        }
        spend
    }
}

/// Solves every candidate program and returns the best type together with its
/// raw LP objective. `offset` is the constant part of the auditor's utility
/// that the LP objective omits.
fn best_candidate(
    game: &Game<'_>,
    program: impl Fn(AlertTypeId) -> LinearProgram,
    offset: impl Fn(AlertTypeId) -> f64,
) -> Result<(AlertTypeId, f64)> {
    let mut best: Option<(AlertTypeId, f64, f64)> = None;
    for t in game.candidates() {
        if let Some(sol) = solve_checked(&program(t))? {
            let utility = sol.objective + offset(t);
            if best.is_none_or(|(_, _, u)| utility > u + TIE_TOLERANCE) {
                best = Some((t, sol.objective, utility));
            }
        }
    }
    best.map(|(t, raw, _)| (t, raw)).ok_or(Error::NoFeasibleType)
}

/// Minimizes `spend·x` over the optimal face of `lp`, whose optimum is
/// `value`.
fn min_spend(lp: LinearProgram, value: f64, spend: Vec<f64>) -> Result<Vec<f64>> {
    for slack in SPEND_SLACKS {
        let mut pinned = lp.clone();
        let floor = value - slack * value.abs().max(1.0);
        pinned.add_le(lp.objective.iter().map(|c| -c).collect(), -floor);
        pinned.objective = spend.iter().map(|c| -c).collect();
        if let Some(sol) = solve_checked(&pinned)? {
            return Ok(sol.x);
        }
    }
    Err(Error::NoFeasibleType)
}

fn solve_checked(lp: &LinearProgram) -> Result<Option<lp::LpSolution>> {
    match lp::solve(lp)? {
        LpOutcome::Optimal(sol) => Ok(Some(sol)),
        LpOutcome::Infeasible => Ok(None),
        LpOutcome::Unbounded => Err(Error::Unbounded),
    }
}

fn clean(v: f64) -> f64 {
    if v.abs() < 1e-12 {
        0.0
    } else {
        v
    }
}

fn check_budget(budget: f64) -> Result<()> {
    if !(budget.is_finite() && budget >= 0.0) {
        return Err(Error::InvalidConfig("budget must be finite and non-negative".into()));
    }
    Ok(())
}

fn check_inputs(payoffs: &PayoffStructure, estimates: &FutureEstimate, budget: f64) -> Result<()> {
    check_budget(budget)?;
    if estimates.len() != payoffs.len() {
        return Err(Error::InvalidConfig(alloc::format!(
            "{} estimates for {} types",
            estimates.len(),
            payoffs.len()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::EPSILON;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn zero_budget_sse_leaves_everything_uncovered() {
        let p = fixtures::reference_payoffs();
        let est = FutureEstimate::from_lambdas(&[10.0; 7], &p);
        let s = solve_online_sse(&p, &est, 0.0).unwrap();
        assert!(s.coverage.iter().all(|&c| c == 0.0));
        assert_eq!(s.best_type, AlertTypeId(6));
        assert_eq!(s.attacker_utility, 800.0);
        assert_eq!(s.auditor_utility, -2000.0);
    }

    #[test]
    fn single_type_saturates_at_full_coverage() {
        let p = PayoffStructure::new(vec![fixtures::reference_payoffs().types()[0]]).unwrap();
        let est = FutureEstimate::from_kappas(&[1.0], &[0.5]);
        let s = solve_online_sse(&p, &est, 5.0).unwrap();
        assert!(close(s.coverage[0], 1.0, 1e-9));
        assert!(close(s.auditor_utility, 100.0, 1e-9));
        assert!(close(s.attacker_utility, -2000.0, 1e-9));
        // Only the budget needed for full coverage is spent.
        assert!(close(s.budget_split[0], 2.0, 1e-9));
    }

    #[test]
    fn two_type_sse_equalizes_attacker_utility() {
        let p = fixtures::two_type_payoffs(0.186, -1.0);
        let est = FutureEstimate::from_kappas(&[3.0, 3.0], &[0.5, 0.5]);
        let s = solve_online_sse(&p, &est, 1.0).unwrap();
        // 5 - 15a = 4 - 10b with a + b = 0.5.
        assert!(close(s.coverage[0], 0.24, 1e-9));
        assert!(close(s.coverage[1], 0.26, 1e-9));
        assert_eq!(s.best_type, AlertTypeId(1));
        assert!(close(s.auditor_utility, -3.44, 1e-9));
        assert!(close(s.attacker_utility, 1.4, 1e-9));
    }

    #[test]
    fn two_type_ossp_warns_on_best_type_only() {
        let p = fixtures::two_type_payoffs(0.186, -1.0);
        let est = FutureEstimate::from_kappas(&[3.0, 3.0], &[0.5, 0.5]);
        let s = solve_ossp(&p, &est, 1.0).unwrap();
        let scheme = s.scheme.as_ref().unwrap();
        let b = scheme.entry(AlertTypeId(1));
        assert_eq!(s.best_type, AlertTypeId(1));
        assert!(close(b.p1, 0.26, 1e-9));
        assert!(close(b.q1, 0.39, 1e-9));
        assert!(b.p0.abs() < EPSILON);
        assert!(close(b.q0, 0.35, 1e-9));
        assert!(close(s.auditor_utility, -1.75 - 0.65 * 0.558, 1e-9));
        assert!(close(s.attacker_utility, 1.4, 1e-9));
        let a = scheme.entry(AlertTypeId(0));
        assert_eq!((a.p1, a.q1), (0.0, 0.0));
    }

    #[test]
    fn zero_budget_ossp_is_the_silent_corner() {
        let p = fixtures::reference_payoffs();
        let est = FutureEstimate::from_lambdas(&[10.0; 7], &p);
        let s = solve_ossp(&p, &est, 0.0).unwrap();
        for e in s.scheme.unwrap().entries() {
            assert_eq!(*e, SchemeEntry::silent(0.0));
        }
        assert_eq!(s.best_type, AlertTypeId(6));
        assert_eq!(s.auditor_utility, -2000.0);
    }

    #[test]
    fn offline_single_alert_is_fully_covered() {
        let p = PayoffStructure::new(vec![fixtures::reference_payoffs().types()[0]]).unwrap();
        let s = solve_offline_sse(&p, &[1], 1.0).unwrap();
        assert!(close(s.coverage[0], 1.0, 1e-9));
        assert!(close(s.auditor_utility, 100.0, 1e-9));
    }

    #[test]
    fn offline_excludes_types_without_alerts() {
        let p = fixtures::reference_payoffs();
        let s = solve_offline_sse(&p, &[100, 0, 0, 0, 0, 0, 0], 10.0).unwrap();
        assert_eq!(s.best_type, AlertTypeId(0));
        assert!(close(s.coverage[0], 0.1, 1e-9));
    }

    #[test]
    fn no_feasible_type_without_any_arrivals() {
        let p = fixtures::two_type_payoffs(0.186, -1.0);
        let est = FutureEstimate::from_lambdas(&[0.0, 0.0], &p);
        assert_eq!(solve_ossp(&p, &est, 1.0), Err(Error::NoFeasibleType));
        assert_eq!(solve_online_sse(&p, &est, 1.0), Err(Error::NoFeasibleType));
    }

    #[test]
    fn negative_budget_is_rejected() {
        let p = fixtures::two_type_payoffs(0.186, -1.0);
        let est = FutureEstimate::from_lambdas(&[1.0, 1.0], &p);
        assert!(matches!(
            solve_online_sse(&p, &est, -1.0),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn no_silent_audit_condition_examples() {
        let p = fixtures::reference_payoffs();
        assert!(no_silent_audit_condition(&p.types()[0], 0.0).unwrap());
        assert!(!no_silent_audit_condition(&p.types()[0], -1e12).unwrap());
        let boundary = TypePayoff {
            u_dc: 0.0,
            u_du: -1.0,
            u_ac: -1.0,
            u_au: 1.0,
            audit_cost: 1.0,
            quit_prob: 0.0,
            quit_loss: 0.0,
        };
        assert!(no_silent_audit_condition(&boundary, 0.0).unwrap());
        assert_eq!(
            no_silent_audit_condition(&p.types()[0], -400.0),
            Err(Error::DegenerateDenominator)
        );
    }
}
