//! Dense two-phase primal simplex.
//!
//! Problems here are small (a few dozen variables), so the solver keeps a full
//! tableau and pivots with Bland's rule, which cannot cycle. Phase one drives
//! artificial variables for `>=` and `=` rows to zero; phase two optimizes the
//! real objective over the feasible basis phase one leaves behind.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Feasibility tolerance on constraint residuals of returned solutions.
pub const LP_TOLERANCE: f64 = 1e-7;

const PIVOT_TOL: f64 = 1e-10;
const COST_TOL: f64 = 1e-10;
const PIVOT_LIMIT_FACTOR: usize = 50;

/// `maximize objective·x` subject to `le_matrix·x <= le_rhs`,
/// `eq_matrix·x = eq_rhs` and `lo <= x <= hi` per variable.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub le_matrix: Vec<Vec<f64>>,
    pub le_rhs: Vec<f64>,
    pub eq_matrix: Vec<Vec<f64>>,
    pub eq_rhs: Vec<f64>,
    /// `(lo, hi)`; `lo` must be finite, `hi` may be `f64::INFINITY`.
    pub bounds: Vec<(f64, f64)>,
}

impl LinearProgram {
    /// Program over `n` variables bounded to `[0, +inf)` with a zero objective.
    pub fn new(n: usize) -> Self {
        Self {
            objective: vec![0.0; n],
            le_matrix: Vec::new(),
            le_rhs: Vec::new(),
            eq_matrix: Vec::new(),
            eq_rhs: Vec::new(),
            bounds: vec![(0.0, f64::INFINITY); n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_le(&mut self, row: Vec<f64>, rhs: f64) {
        self.le_matrix.push(row);
        self.le_rhs.push(rhs);
    }

    pub fn add_eq(&mut self, row: Vec<f64>, rhs: f64) {
        self.eq_matrix.push(row);
        self.eq_rhs.push(rhs);
    }

    pub fn set_bounds(&mut self, var: usize, lo: f64, hi: f64) {
        self.bounds[var] = (lo, hi);
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        dot(&self.objective, x)
    }

    /// Largest violation of any constraint or bound at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let le = self
            .le_matrix
            .iter()
            .zip(&self.le_rhs)
            .map(|(row, &b)| dot(row, x) - b);
        let eq = self
            .eq_matrix
            .iter()
            .zip(&self.eq_rhs)
            .map(|(row, &b)| (dot(row, x) - b).abs());
        let bounds = self
            .bounds
            .iter()
            .zip(x)
            .map(|(&(lo, hi), &v)| (lo - v).max(v - hi));
        le.chain(eq).chain(bounds).fold(0.0, f64::max)
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        let check_rows = |rows: &[Vec<f64>], rhs: &[f64], what: &str| -> Result<()> {
            if rows.len() != rhs.len() {
                return Err(Error::MalformedProgram(format!(
                    "{what}: {} rows but {} right-hand sides",
                    rows.len(),
                    rhs.len()
                )));
            }
            if let Some(i) = rows.iter().position(|r| r.len() != n) {
                return Err(Error::MalformedProgram(format!(
                    "{what} row {i} has {} columns, expected {n}",
                    rows[i].len()
                )));
            }
            let finite = rows.iter().flatten().chain(rhs).all(|v| v.is_finite());
            if !finite {
                return Err(Error::MalformedProgram(format!("{what}: non-finite entry")));
            }
            Ok(())
        };
        check_rows(&self.le_matrix, &self.le_rhs, "inequality")?;
        check_rows(&self.eq_matrix, &self.eq_rhs, "equality")?;
        if self.bounds.len() != n {
            return Err(Error::MalformedProgram(format!(
                "{} bounds for {n} variables",
                self.bounds.len()
            )));
        }
        if self.objective.iter().any(|v| !v.is_finite()) {
            return Err(Error::MalformedProgram("non-finite objective".into()));
        }
        if self
            .bounds
            .iter()
            .any(|&(lo, hi)| !lo.is_finite() || hi.is_nan())
        {
            return Err(Error::MalformedProgram(
                "lower bounds must be finite".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    /// Reduced costs `c_j - z_j` of the structural and slack columns at the
    /// final basis, in the solver's internal column order. All are `<= 0` (up
    /// to tolerance) at a maximizing basis.
    pub reduced_costs: Vec<f64>,
    pub pivots: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn status(&self) -> LpStatus {
        match self {
            LpOutcome::Optimal(_) => LpStatus::Optimal,
            LpOutcome::Infeasible => LpStatus::Infeasible,
            LpOutcome::Unbounded => LpStatus::Unbounded,
        }
    }

    pub fn optimal(self) -> Option<LpSolution> {
        match self {
            LpOutcome::Optimal(s) => Some(s),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum RowKind {
    Le,
    Ge,
    Eq,
}

struct Tableau {
    rows: usize,
    width: usize,
    /// `rows + 1` rows of `width + 1` entries; the last row is the objective
    /// (reduced costs, then minus the objective value), the last column the rhs.
    cells: Vec<f64>,
    basis: Vec<usize>,
    pivots: usize,
    pivot_limit: usize,
}

impl Tableau {
    fn at(&self, r: usize, c: usize) -> f64 {
        self.cells[r * (self.width + 1) + c]
    }

    fn rhs(&self, r: usize) -> f64 {
        self.at(r, self.width)
    }

    fn cost(&self, c: usize) -> f64 {
        self.at(self.rows, c)
    }

    fn objective(&self) -> f64 {
        -self.at(self.rows, self.width)
    }

    fn pivot(&mut self, r: usize, e: usize) -> Result<()> {
        self.pivots += 1;
        if self.pivots > self.pivot_limit {
            return Err(Error::CycleLimit {
                limit: self.pivot_limit,
            });
        }
        let stride = self.width + 1;
        let inv = 1.0 / self.at(r, e);
        let (before, rest) = self.cells.split_at_mut(r * stride);
        let (pivot_row, after) = rest.split_at_mut(stride);
        for v in pivot_row.iter_mut() {
            *v *= inv;
        }
        pivot_row[e] = 1.0;
        let eliminate = |row: &mut [f64]| {
            let f = row[e];
            if f != 0.0 {
                for (v, p) in row.iter_mut().zip(pivot_row.iter()) {
                    *v -= f * p;
                }
                row[e] = 0.0;
            }
        };
        before.chunks_exact_mut(stride).for_each(eliminate);
        after.chunks_exact_mut(stride).for_each(eliminate);
        self.basis[r] = e;
        Ok(())
    }

    /// Runs Bland's-rule pivots until optimal. Columns at or beyond
    /// `enter_limit` never enter the basis. Returns `false` when unbounded.
    fn optimize(&mut self, enter_limit: usize) -> Result<bool> {
        loop {
            let Some(e) = (0..enter_limit).find(|&c| self.cost(c) > COST_TOL) else {
                return Ok(true);
            };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.rows {
                let a = self.at(r, e);
                if a <= PIVOT_TOL {
                    continue;
                }
                let ratio = self.rhs(r).max(0.0) / a;
                leave = match leave {
                    None => Some((r, ratio)),
                    Some((lr, lratio)) => {
                        let tie = (ratio - lratio).abs() <= 1e-12 * (1.0 + lratio.abs());
                        if ratio < lratio && !tie
                            || tie && self.basis[r] < self.basis[lr]
                        {
                            Some((r, ratio))
                        } else {
                            Some((lr, lratio))
                        }
                    }
                };
            }
            match leave {
                Some((r, _)) => self.pivot(r, e)?,
                None => return Ok(false),
            }
        }
    }

    fn remove_row(&mut self, r: usize) {
        let stride = self.width + 1;
        self.cells.drain(r * stride..(r + 1) * stride);
        self.basis.remove(r);
        self.rows -= 1;
    }

    fn set_objective(&mut self, costs: &[f64]) {
        let stride = self.width + 1;
        let obj = self.rows * stride;
        for c in 0..=self.width {
            self.cells[obj + c] = if c < costs.len() { costs[c] } else { 0.0 };
        }
        for r in 0..self.rows {
            let cb = costs.get(self.basis[r]).copied().unwrap_or(0.0);
            if cb != 0.0 {
                for c in 0..=self.width {
                    self.cells[obj + c] -= cb * self.cells[r * stride + c];
                }
            }
        }
    }
}

/// Solves `lp`, returning an optimal basic feasible solution when one exists.
pub fn solve(lp: &LinearProgram) -> Result<LpOutcome> {
    lp.validate()?;
    let n = lp.num_vars();

    // Shift x = lo + y so every variable has a zero lower bound.
    let lo: Vec<f64> = lp.bounds.iter().map(|b| b.0).collect();
    let mut rows: Vec<(Vec<f64>, f64, RowKind)> = Vec::new();
    for (row, &b) in lp.le_matrix.iter().zip(&lp.le_rhs) {
        rows.push((row.clone(), b - dot(row, &lo), RowKind::Le));
    }
    for (row, &b) in lp.eq_matrix.iter().zip(&lp.eq_rhs) {
        rows.push((row.clone(), b - dot(row, &lo), RowKind::Eq));
    }
    for (j, &(l, h)) in lp.bounds.iter().enumerate() {
        if h.is_finite() {
            if h < l {
                return Ok(LpOutcome::Infeasible);
            }
            let mut row = vec![0.0; n];
            row[j] = 1.0;
            rows.push((row, h - l, RowKind::Le));
        }
    }
    for (row, b, kind) in rows.iter_mut() {
        if *b < 0.0 {
            row.iter_mut().for_each(|v| *v = -*v);
            *b = -*b;
            *kind = match *kind {
                RowKind::Le => RowKind::Ge,
                RowKind::Ge => RowKind::Le,
                RowKind::Eq => RowKind::Eq,
            };
        }
    }

    let m = rows.len();
    let n_slack = rows.iter().filter(|r| r.2 != RowKind::Eq).count();
    let n_art = rows.iter().filter(|r| r.2 != RowKind::Le).count();
    let art_start = n + n_slack;
    let width = art_start + n_art;
    let stride = width + 1;

    let mut tab = Tableau {
        rows: m,
        width,
        cells: vec![0.0; (m + 1) * stride],
        basis: vec![0; m],
        pivots: 0,
        pivot_limit: PIVOT_LIMIT_FACTOR * (m + width),
    };
    let (mut slack, mut art) = (n, art_start);
    for (r, (row, b, kind)) in rows.iter().enumerate() {
        let base = r * stride;
        tab.cells[base..base + n].copy_from_slice(row);
        tab.cells[base + width] = *b;
        match kind {
            RowKind::Le => {
                tab.cells[base + slack] = 1.0;
                tab.basis[r] = slack;
                slack += 1;
            }
            RowKind::Ge => {
                tab.cells[base + slack] = -1.0;
                tab.cells[base + art] = 1.0;
                tab.basis[r] = art;
                slack += 1;
                art += 1;
            }
            RowKind::Eq => {
                tab.cells[base + art] = 1.0;
                tab.basis[r] = art;
                art += 1;
            }
        }
    }

    if n_art > 0 {
        let mut phase_one = vec![0.0; width];
        phase_one[art_start..].iter_mut().for_each(|c| *c = -1.0);
        tab.set_objective(&phase_one);
        // Phase one is bounded by zero, so it cannot report unbounded.
        tab.optimize(width)?;
        let scale = rows.iter().map(|r| r.1).fold(1.0, f64::max);
        if tab.objective() < -1e-9 * scale {
            return Ok(LpOutcome::Infeasible);
        }
        let mut r = 0;
        while r < tab.rows {
            if tab.basis[r] >= art_start {
                match (0..art_start).find(|&c| tab.at(r, c).abs() > 1e-9) {
                    Some(c) => tab.pivot(r, c)?,
                    None => {
                        tab.remove_row(r);
                        continue;
                    }
                }
            }
            r += 1;
        }
    }

    let mut costs = vec![0.0; width];
    costs[..n].copy_from_slice(&lp.objective);
    tab.set_objective(&costs);
    if !tab.optimize(art_start)? {
        return Ok(LpOutcome::Unbounded);
    }

    let mut x = lo;
    for r in 0..tab.rows {
        let c = tab.basis[r];
        if c < n {
            x[c] += tab.rhs(r).max(0.0);
        }
    }
    let reduced_costs = (0..art_start).map(|c| tab.cost(c)).collect();
    Ok(LpOutcome::Optimal(LpSolution {
        objective: lp.objective_value(&x),
        x,
        reduced_costs,
        pivots: tab.pivots,
    }))
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn optimal(lp: &LinearProgram) -> LpSolution {
        solve(lp).unwrap().optimal().expect("optimal")
    }

    #[test]
    fn single_upper_bound_row() {
        let mut lp = LinearProgram::new(1);
        lp.objective = vec![1.0];
        lp.add_le(vec![1.0], 3.0);
        let s = optimal(&lp);
        assert!((s.x[0] - 3.0).abs() < 1e-12);
        assert!((s.objective - 3.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_face_any_vertex() {
        let mut lp = LinearProgram::new(2);
        lp.objective = vec![1.0, 1.0];
        lp.add_le(vec![1.0, 1.0], 1.0);
        lp.set_bounds(0, 0.0, 1.0);
        lp.set_bounds(1, 0.0, 1.0);
        let s = optimal(&lp);
        assert!((s.objective - 1.0).abs() < 1e-12);
        assert!(lp.max_violation(&s.x) < LP_TOLERANCE);
    }

    #[test]
    fn contradictory_bounds_are_infeasible() {
        let mut lp = LinearProgram::new(1);
        lp.objective = vec![1.0];
        lp.add_le(vec![-1.0], -2.0);
        lp.add_le(vec![1.0], 1.0);
        assert_eq!(solve(&lp).unwrap(), LpOutcome::Infeasible);
    }

    #[test]
    fn unbounded_ray() {
        let mut lp = LinearProgram::new(2);
        lp.objective = vec![1.0, 0.0];
        lp.add_le(vec![-1.0, 1.0], 1.0);
        assert_eq!(solve(&lp).unwrap(), LpOutcome::Unbounded);
    }

    #[test]
    fn equality_rows_and_shifted_bounds() {
        // max 2x + y, x + y = 3, x in [1, 2], y >= 0.5
        let mut lp = LinearProgram::new(2);
        lp.objective = vec![2.0, 1.0];
        lp.add_eq(vec![1.0, 1.0], 3.0);
        lp.set_bounds(0, 1.0, 2.0);
        lp.set_bounds(1, 0.5, f64::INFINITY);
        let s = optimal(&lp);
        assert!((s.x[0] - 2.0).abs() < 1e-12);
        assert!((s.x[1] - 1.0).abs() < 1e-12);
        assert!(s.reduced_costs.iter().all(|&d| d <= LP_TOLERANCE));
    }

    #[test]
    fn redundant_equalities_are_dropped() {
        let mut lp = LinearProgram::new(2);
        lp.objective = vec![1.0, -1.0];
        lp.add_eq(vec![1.0, 1.0], 1.0);
        lp.add_eq(vec![2.0, 2.0], 2.0);
        let s = optimal(&lp);
        assert!((s.objective - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch_is_malformed() {
        let mut lp = LinearProgram::new(2);
        lp.add_le(vec![1.0], 1.0);
        assert!(matches!(solve(&lp), Err(Error::MalformedProgram(_))));
        let mut lp = LinearProgram::new(1);
        lp.le_rhs.push(1.0);
        assert!(matches!(solve(&lp), Err(Error::MalformedProgram(_))));
    }

    #[test]
    fn classic_degenerate_cycling_example() {
        // Beale's example cycles under the textbook largest-coefficient rule.
        let mut lp = LinearProgram::new(4);
        lp.objective = vec![0.75, -150.0, 0.02, -6.0];
        lp.add_le(vec![0.25, -60.0, -0.04, 9.0], 0.0);
        lp.add_le(vec![0.5, -90.0, -0.02, 3.0], 0.0);
        lp.add_le(vec![0.0, 0.0, 1.0, 0.0], 1.0);
        let s = optimal(&lp);
        assert!((s.objective - 0.05).abs() < 1e-9);
    }
}
