//! Brute-force cross-checks for the solvers.
//!
//! Nothing here calls the simplex code. Grid searches evaluate the game
//! directly: enumerate candidate policies, compute the attacker's best
//! response and the auditor's payoff, keep the best feasible point. The vertex
//! enumerator checks the LP solver by solving every square subsystem of the
//! active constraints.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::arrival::FutureEstimate;
use crate::equilibrium::{self, no_silent_audit_condition, warn_cost_weights, EquilibriumSolution};
use crate::error::{Error, Result};
use crate::lp::LinearProgram;
use crate::rng;
use crate::types::{AlertTypeId, PayoffStructure, SchemeEntry, TypePayoff};
use crate::EPSILON;

/// Largest type table the grid searches accept.
pub const MAX_GRID_TYPES: usize = 3;

/// Tolerance for utilities in the theorem checks.
pub const UTILITY_TOLERANCE: f64 = 1e-6;

/// Slack for constraint checks on grid points.
const GRID_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridMode {
    /// Only the attacked type may warn.
    Shortcut,
    /// Every type may warn. Quadratically more points; meant for two types
    /// at a coarse step.
    Exhaustive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSolution {
    pub entries: Vec<SchemeEntry>,
    pub best_type: AlertTypeId,
    pub auditor_utility: f64,
    pub attacker_utility: f64,
}

/// One grid point for one type, with the quantities the search needs.
#[derive(Clone, Copy)]
struct Candidate {
    entry: SchemeEntry,
    spend: f64,
    attacker: f64,
    auditor: f64,
    warn_cost: f64,
}

/// Best signaling policy on a grid of step `step` over coverage and the
/// warn/audit split. Every constraint is evaluated on the point itself.
pub fn grid_best_scheme(
    payoffs: &PayoffStructure,
    estimates: &FutureEstimate,
    budget: f64,
    step: f64,
    mode: GridMode,
) -> Result<GridSolution> {
    check_grid(payoffs, estimates, step)?;
    let n = payoffs.len();
    let kappas = estimates.kappas();
    let weights = warn_cost_weights(payoffs, estimates);
    let warned = |i| candidates(&payoffs.types()[i], kappas[i], weights[i], step, true);
    let silent = |i| candidates(&payoffs.types()[i], kappas[i], weights[i], step, false);

    let mut best: Option<GridSolution> = None;
    match mode {
        GridMode::Shortcut => {
            for t in (0..n).filter(|&t| kappas[t] > 0.0) {
                let lists: Vec<Vec<Candidate>> =
                    (0..n).map(|i| if i == t { warned(i) } else { silent(i) }).collect();
                search(&lists, &kappas, budget, &mut best);
            }
        }
        GridMode::Exhaustive => {
            let lists: Vec<Vec<Candidate>> = (0..n).map(warned).collect();
            search(&lists, &kappas, budget, &mut best);
        }
    }
    best.ok_or(Error::NoFeasibleType)
}

/// Best no-signaling policy on a coverage grid of step `step`.
pub fn grid_best_sse(
    payoffs: &PayoffStructure,
    estimates: &FutureEstimate,
    budget: f64,
    step: f64,
) -> Result<GridSolution> {
    check_grid(payoffs, estimates, step)?;
    let kappas = estimates.kappas();
    let lists: Vec<Vec<Candidate>> = payoffs
        .types()
        .iter()
        .zip(&kappas)
        .map(|(p, &k)| candidates(p, k, 0.0, step, false))
        .collect();
    let mut best = None;
    search(&lists, &kappas, budget, &mut best);
    best.ok_or(Error::NoFeasibleType)
}

/// Largest objective coefficient of the signaling program: a bound on how
/// much the auditor's utility moves per unit change of any one variable.
pub fn ossp_lipschitz(payoffs: &PayoffStructure, estimates: &FutureEstimate) -> f64 {
    payoffs
        .types()
        .iter()
        .zip(warn_cost_weights(payoffs, estimates))
        .map(|(p, w)| p.u_dc.abs().max(p.u_du.abs()).max(w.abs()))
        .fold(0.0, f64::max)
}

/// Largest slope of the auditor's no-signaling utility in coverage.
pub fn sse_lipschitz(payoffs: &PayoffStructure) -> f64 {
    payoffs
        .types()
        .iter()
        .map(|p| p.u_dc - p.u_du)
        .fold(0.0, f64::max)
}

/// Admissible gap between a grid optimum and the exact optimum.
pub fn grid_tolerance(lipschitz: f64, step: f64, dimension: usize) -> f64 {
    lipschitz * step * dimension as f64
}

fn check_grid(payoffs: &PayoffStructure, estimates: &FutureEstimate, step: f64) -> Result<()> {
    if payoffs.len() > MAX_GRID_TYPES {
        return Err(Error::TooManyTypes {
            max: MAX_GRID_TYPES,
            got: payoffs.len(),
        });
    }
    if estimates.len() != payoffs.len() {
        return Err(Error::InvalidConfig(format!(
            "{} estimates for {} types",
            estimates.len(),
            payoffs.len()
        )));
    }
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::InvalidConfig(format!("grid step {step} outside (0, 1]")));
    }
    Ok(())
}

fn grid(step: f64) -> Vec<f64> {
    let n = libm::round(1.0 / step) as usize;
    (0..=n).map(|k| (k as f64 / n as f64).min(1.0)).collect()
}

fn candidates(p: &TypePayoff, kappa: f64, w: f64, step: f64, warn: bool) -> Vec<Candidate> {
    let levels = grid(step);
    let mut out = Vec::new();
    for &theta in &levels {
        if kappa <= 0.0 && theta > 0.0 {
            break;
        }
        let spend = if theta > 0.0 { theta / kappa } else { 0.0 };
        let p1_levels: &[f64] = if warn { &levels } else { &[0.0] };
        for &p1 in p1_levels.iter().take_while(|&&p1| p1 <= theta + GRID_SLACK) {
            for &q1 in p1_levels.iter().take_while(|&&q1| q1 <= 1.0 - theta + GRID_SLACK) {
                // A warned attacker must prefer to quit.
                if p1 * p.u_ac + q1 * p.u_au > GRID_SLACK {
                    break;
                }
                let entry = SchemeEntry {
                    p1,
                    q1,
                    p0: (theta - p1).max(0.0),
                    q0: (1.0 - theta - q1).max(0.0),
                };
                out.push(Candidate {
                    entry,
                    spend,
                    attacker: entry.p0 * p.u_ac + entry.q0 * p.u_au,
                    auditor: entry.p0 * p.u_dc + entry.q0 * p.u_du,
                    warn_cost: (p1 + q1) * w,
                });
            }
        }
    }
    out
}

fn search(lists: &[Vec<Candidate>], kappas: &[f64], budget: f64, best: &mut Option<GridSolution>) {
    let mut chosen: Vec<Candidate> = Vec::with_capacity(lists.len());
    descend(lists, kappas, budget, 0.0, &mut chosen, best);
}

fn descend(
    lists: &[Vec<Candidate>],
    kappas: &[f64],
    budget: f64,
    spent: f64,
    chosen: &mut Vec<Candidate>,
    best: &mut Option<GridSolution>,
) {
    let depth = chosen.len();
    if depth == lists.len() {
        evaluate(chosen, kappas, best);
        return;
    }
    for c in &lists[depth] {
        if spent + c.spend > budget + GRID_SLACK {
            continue;
        }
        chosen.push(*c);
        descend(lists, kappas, budget, spent + c.spend, chosen, best);
        chosen.pop();
    }
}

/// Attacker best-responds among types that can occur; ties go the auditor's
/// way.
fn evaluate(chosen: &[Candidate], kappas: &[f64], best: &mut Option<GridSolution>) {
    let active = || (0..chosen.len()).filter(|&i| kappas[i] > 0.0);
    let Some(top) = active().map(|i| chosen[i].attacker).reduce(f64::max) else {
        return;
    };
    let warn_total: f64 = chosen.iter().map(|c| c.warn_cost).sum();
    let mut pick: Option<(usize, f64)> = None;
    for i in active().filter(|&i| chosen[i].attacker >= top - GRID_SLACK) {
        let u = chosen[i].auditor + warn_total;
        if pick.is_none_or(|(_, v)| u > v) {
            pick = Some((i, u));
        }
    }
    let (t, utility) = pick.expect("top is attained");
    if best.as_ref().is_none_or(|b| utility > b.auditor_utility + GRID_SLACK) {
        *best = Some(GridSolution {
            entries: chosen.iter().map(|c| c.entry).collect(),
            best_type: AlertTypeId(t),
            auditor_utility: utility,
            attacker_utility: top,
        });
    }
}

/// Maximum of `lp` over its vertices, or `None` when no vertex is feasible.
///
/// Every choice of `n` linearly independent constraints from the inequality
/// rows and finite bounds (equality rows are always active) is solved
/// exactly and kept if feasible. Assumes the feasible region is bounded;
/// cost grows combinatorially, so keep `n` and the row count small.
pub fn enumerate_vertices_max(lp: &LinearProgram) -> Option<(f64, Vec<f64>)> {
    let n = lp.num_vars();
    let mut planes: Vec<(Vec<f64>, f64)> = Vec::new();
    for (row, &b) in lp.le_matrix.iter().zip(&lp.le_rhs) {
        planes.push((row.clone(), b));
    }
    for (j, &(lo, hi)) in lp.bounds.iter().enumerate() {
        let mut unit = vec![0.0; n];
        unit[j] = 1.0;
        if lo.is_finite() {
            planes.push((unit.clone(), lo));
        }
        if hi.is_finite() && hi != lo {
            planes.push((unit, hi));
        }
    }
    let fixed: Vec<(Vec<f64>, f64)> = lp
        .eq_matrix
        .iter()
        .cloned()
        .zip(lp.eq_rhs.iter().copied())
        .collect();
    let free = n.saturating_sub(fixed.len());

    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut pick = Vec::with_capacity(free);
    combinations(planes.len(), free, 0, &mut pick, &mut |idx| {
        let mut a: Vec<Vec<f64>> = fixed.iter().map(|(r, _)| r.clone()).collect();
        let mut b: Vec<f64> = fixed.iter().map(|(_, v)| *v).collect();
        for &k in idx {
            a.push(planes[k].0.clone());
            b.push(planes[k].1);
        }
        let Some(x) = solve_square(a, b) else { return };
        let scale = 1.0 + x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if lp.max_violation(&x) > 1e-9 * scale {
            return;
        }
        let value = lp.objective_value(&x);
        if best.as_ref().is_none_or(|(v, _)| value > *v) {
            best = Some((value, x));
        }
    });
    best
}

fn combinations(
    total: usize,
    k: usize,
    start: usize,
    pick: &mut Vec<usize>,
    visit: &mut impl FnMut(&[usize]),
) {
    if pick.len() == k {
        visit(pick);
        return;
    }
    for i in start..total {
        if total - i < k - pick.len() {
            break;
        }
        pick.push(i);
        combinations(total, k, i + 1, pick, visit);
        pick.pop();
    }
}

/// Gaussian elimination with partial pivoting; `None` if `a` is singular or
/// not square.
fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    if a.iter().any(|r| r.len() != n) {
        return None;
    }
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-10 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        let (top, rest) = a.split_at_mut(col + 1);
        let pivot = &top[col];
        for (row, r) in rest.iter_mut().zip(col + 1..) {
            let f = row[col] / pivot[col];
            if f != 0.0 {
                for (x, y) in row[col..].iter_mut().zip(&pivot[col..]) {
                    *x -= f * y;
                }
                b[r] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

/// A randomly drawn game state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub payoffs: Vec<TypePayoff>,
    pub lambdas: Vec<f64>,
    pub budget: f64,
}

impl Instance {
    pub fn payoff_structure(&self) -> Result<PayoffStructure> {
        PayoffStructure::new(self.payoffs.clone())
    }

    pub fn estimates(&self) -> Result<FutureEstimate> {
        Ok(FutureEstimate::from_lambdas(&self.lambdas, &self.payoff_structure()?))
    }
}

/// Instance `index` of the suite seeded by `seed`: one to three types with
/// sign-valid payoffs, forecasts in `[0, 8)` and budgets in `[0, 3)`.
pub fn random_instance(seed: u64, index: u64) -> Instance {
    let mut r = rng::substream(seed, rng::ORACLE, index);
    let n = r.random_range(1..=MAX_GRID_TYPES);
    let payoffs = (0..n)
        .map(|_| TypePayoff {
            u_dc: r.random_range(0.0..10.0),
            u_du: -r.random_range(0.5..10.0),
            u_ac: -r.random_range(0.5..10.0),
            u_au: r.random_range(0.5..10.0),
            audit_cost: r.random_range(0.5..2.0),
            quit_prob: r.random_range(0.0..1.0),
            quit_loss: -r.random_range(0.0..5.0),
        })
        .collect();
    let lambdas = (0..n).map(|_| r.random_range(0.0..8.0)).collect();
    Instance {
        payoffs,
        lambdas,
        budget: r.random_range(0.0..3.0),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    /// Only the attacked type is ever warned.
    WarnOnlyBestType,
    /// Signaling leaves marginal coverage unchanged.
    CoverageEquality,
    /// Signaling never hurts the auditor.
    NeverWorse,
    /// Under the no-silent-audit condition silent alerts go unaudited.
    NoSilentAudit,
    /// Warning is pointless when a missed attack costs less than a warning.
    NoBenefitWhenWarningCostly,
    /// The attacker is indifferent to the auditor's use of signaling.
    AttackerUtilityEquality,
    /// Every covered type is exactly as attractive as the attacked one.
    BestResponseTightness,
    /// The returned scheme satisfies every constraint and attains the
    /// reported utility.
    SchemeConsistency,
}

impl Property {
    pub const ALL: [Property; 8] = [
        Property::WarnOnlyBestType,
        Property::CoverageEquality,
        Property::NeverWorse,
        Property::NoSilentAudit,
        Property::NoBenefitWhenWarningCostly,
        Property::AttackerUtilityEquality,
        Property::BestResponseTightness,
        Property::SchemeConsistency,
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub index: u64,
    pub property: Property,
    pub detail: String,
    pub instance: Instance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyTally {
    pub property: Property,
    pub checked: usize,
    pub violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub instances: usize,
    /// Instances where no type can occur, so there is nothing to check.
    pub skipped: usize,
    pub tallies: Vec<PropertyTally>,
    pub violations: Vec<Violation>,
    /// Largest per-type coverage gap between the two solvers.
    pub max_coverage_gap: f64,
}

impl VerifyReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn tally(&self, property: Property) -> &PropertyTally {
        self.tallies
            .iter()
            .find(|t| t.property == property)
            .expect("every property is tallied")
    }
}

/// Outcome of checking one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceCheck {
    pub index: u64,
    pub instance: Instance,
    /// `None` when the instance was skipped.
    pub checked: Option<Vec<(Property, Option<String>)>>,
    pub coverage_gap: f64,
}

/// Solves instance `index` with both solvers and tests every property.
/// Solver errors other than "no type can occur" are reported as
/// consistency violations.
pub fn check_instance(seed: u64, index: u64) -> InstanceCheck {
    let instance = random_instance(seed, index);
    let mut out = InstanceCheck {
        index,
        instance: instance.clone(),
        checked: None,
        coverage_gap: 0.0,
    };
    let (payoffs, estimates) = match (instance.payoff_structure(), instance.estimates()) {
        (Ok(p), Ok(e)) => (p, e),
        (Err(e), _) | (_, Err(e)) => {
            out.checked = Some(vec![(Property::SchemeConsistency, Some(format!("{e}")))]);
            return out;
        }
    };
    let solved = equilibrium::solve_ossp(&payoffs, &estimates, instance.budget).and_then(|o| {
        equilibrium::solve_online_sse(&payoffs, &estimates, instance.budget).map(|s| (o, s))
    });
    match solved {
        Ok((ossp, sse)) => {
            out.coverage_gap = ossp
                .coverage
                .iter()
                .zip(&sse.coverage)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            out.checked = Some(check_properties(&payoffs, &estimates, instance.budget, &ossp, &sse));
        }
        Err(Error::NoFeasibleType) => {}
        Err(e) => out.checked = Some(vec![(Property::SchemeConsistency, Some(format!("{e}")))]),
    }
    out
}

/// Folds per-instance results into a report.
pub fn collect_report(seed: u64, checks: impl IntoIterator<Item = InstanceCheck>) -> VerifyReport {
    let mut tallies: Vec<PropertyTally> = Property::ALL
        .iter()
        .map(|&property| PropertyTally {
            property,
            checked: 0,
            violations: 0,
        })
        .collect();
    let mut report = VerifyReport {
        seed,
        instances: 0,
        skipped: 0,
        tallies: Vec::new(),
        violations: Vec::new(),
        max_coverage_gap: 0.0,
    };
    for check in checks {
        report.instances += 1;
        report.max_coverage_gap = report.max_coverage_gap.max(check.coverage_gap);
        let Some(results) = check.checked else {
            report.skipped += 1;
            continue;
        };
        for (property, failure) in results {
            let tally = tallies
                .iter_mut()
                .find(|t| t.property == property)
                .expect("every property is tallied");
            tally.checked += 1;
            if let Some(detail) = failure {
                tally.violations += 1;
                report.violations.push(Violation {
                    index: check.index,
                    property,
                    detail,
                    instance: check.instance.clone(),
                });
            }
        }
    }
    report.tallies = tallies;
    report
}

/// Runs the property suite on `instances` random instances.
pub fn verify_theorems(instances: usize, seed: u64) -> VerifyReport {
    collect_report(seed, (0..instances as u64).map(|i| check_instance(seed, i)))
}

fn check_properties(
    payoffs: &PayoffStructure,
    estimates: &FutureEstimate,
    budget: f64,
    ossp: &EquilibriumSolution,
    sse: &EquilibriumSolution,
) -> Vec<(Property, Option<String>)> {
    let mut out = Vec::new();
    let weights = warn_cost_weights(payoffs, estimates);
    let kappas = estimates.kappas();
    let t = ossp.best_type;
    let Some(scheme) = ossp.scheme.as_ref() else {
        out.push((Property::SchemeConsistency, Some("no scheme returned".into())));
        return out;
    };
    let entries = scheme.entries();
    let bp = &payoffs[t];
    let w = weights[t.0];

    let stray = entries
        .iter()
        .enumerate()
        .filter(|&(i, e)| i != t.0 && (e.p1 > EPSILON || e.q1 > EPSILON))
        .map(|(i, _)| i)
        .next();
    out.push((
        Property::WarnOnlyBestType,
        stray.map(|i| format!("type {i} is warned but the best type is {t}")),
    ));

    let gap = ossp
        .coverage
        .iter()
        .zip(&sse.coverage)
        .enumerate()
        .find(|(_, (a, b))| (*a - *b).abs() > UTILITY_TOLERANCE);
    out.push((
        Property::CoverageEquality,
        gap.map(|(i, (a, b))| format!("type {i}: signaling coverage {a}, plain coverage {b}")),
    ));

    out.push((
        Property::NeverWorse,
        (ossp.auditor_utility < sse.auditor_utility - UTILITY_TOLERANCE).then(|| {
            format!(
                "signaling utility {} below plain utility {}",
                ossp.auditor_utility, sse.auditor_utility
            )
        }),
    ));

    // The no-silent-audit result presumes an attacker who still gains from
    // attacking silently; a deterred attacker leaves the auditor free to
    // audit silent alerts at no loss.
    if ossp.attacker_utility > EPSILON {
        if let Ok(true) = no_silent_audit_condition(bp, w) {
            let p0 = entries[t.0].p0;
            out.push((
                Property::NoSilentAudit,
                (p0 > EPSILON).then(|| format!("p0 = {p0} on best type {t}")),
            ));
        }
    }

    if bp.u_du > w {
        let gap = (ossp.auditor_utility - sse.auditor_utility).abs();
        let warned = entries.iter().any(|e| e.p1 > EPSILON || e.q1 > EPSILON);
        let failure = if gap > UTILITY_TOLERANCE {
            Some(format!("utilities differ by {gap}"))
        } else if warned {
            Some("scheme warns although warning costs more than a miss".into())
        } else {
            None
        };
        out.push((Property::NoBenefitWhenWarningCostly, failure));
    }

    let diff = (ossp.attacker_utility - sse.attacker_utility).abs();
    out.push((
        Property::AttackerUtilityEquality,
        (diff > UTILITY_TOLERANCE).then(|| {
            format!(
                "attacker utility {} with signaling, {} without",
                ossp.attacker_utility, sse.attacker_utility
            )
        }),
    ));

    let silent = |i: usize| entries[i].p0 * payoffs.types()[i].u_ac + entries[i].q0 * payoffs.types()[i].u_au;
    let mut slack = None;
    for i in (0..payoffs.len()).filter(|&i| kappas[i] > 0.0 && ossp.coverage[i] > EPSILON) {
        let g = (silent(t.0) - silent(i)).abs();
        if g > UTILITY_TOLERANCE {
            slack = Some(format!("signaling: type {i} trails best type {t} by {g}"));
        }
    }
    let ts = sse.best_type;
    for i in (0..payoffs.len()).filter(|&i| kappas[i] > 0.0 && sse.coverage[i] > EPSILON) {
        let a = payoffs.types()[i].attacker_utility_at(sse.coverage[i]);
        let g = (payoffs[ts].attacker_utility_at(sse.coverage[ts.0]) - a).abs();
        if g > UTILITY_TOLERANCE {
            slack = Some(format!("plain: type {i} trails best type {ts} by {g}"));
        }
    }
    out.push((Property::BestResponseTightness, slack));

    out.push((
        Property::SchemeConsistency,
        scheme_problem(payoffs, &kappas, &weights, budget, ossp),
    ));
    out
}

/// Direct feasibility and utility check of a signaling solution.
fn scheme_problem(
    payoffs: &PayoffStructure,
    kappas: &[f64],
    weights: &[f64],
    budget: f64,
    ossp: &EquilibriumSolution,
) -> Option<String> {
    let scheme = ossp.scheme.as_ref()?;
    let t = ossp.best_type.0;
    let tol = UTILITY_TOLERANCE;
    let mut spend = 0.0;
    let mut best_silent = f64::NEG_INFINITY;
    for (i, (e, p)) in scheme.entries().iter().zip(payoffs.types()).enumerate() {
        if [e.p1, e.q1, e.p0, e.q0].iter().any(|v| *v < -EPSILON) {
            return Some(format!("type {i}: negative probability"));
        }
        if (e.p1 + e.q1 + e.p0 + e.q0 - 1.0).abs() > tol {
            return Some(format!("type {i}: probabilities do not sum to one"));
        }
        if e.p1 * p.u_ac + e.q1 * p.u_au > tol {
            return Some(format!("type {i}: warned attacker does not quit"));
        }
        if kappas[i] > 0.0 {
            spend += e.coverage() / kappas[i];
            best_silent = best_silent.max(e.p0 * p.u_ac + e.q0 * p.u_au);
        } else if e.coverage() > EPSILON {
            return Some(format!("type {i}: coverage on a type that cannot occur"));
        }
    }
    if spend > budget + tol {
        return Some(format!("spends {spend} of {budget}"));
    }
    let e = scheme.entries()[t];
    let pt = &payoffs.types()[t];
    if e.p0 * pt.u_ac + e.q0 * pt.u_au < best_silent - tol {
        return Some("best type is not a best response".into());
    }
    let warn: f64 = scheme
        .entries()
        .iter()
        .zip(weights)
        .map(|(e, w)| e.warn_probability() * w)
        .sum();
    let utility = e.p0 * pt.u_dc + e.q0 * pt.u_du + warn;
    if (utility - ossp.auditor_utility).abs() > tol {
        return Some(format!(
            "reported utility {} but the scheme yields {utility}",
            ossp.auditor_utility
        ));
    }
    None
}
