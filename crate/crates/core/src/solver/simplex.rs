//! Floating-point two-phase revised simplex over sparse columns.
//!
//! Pivot rules are fixed so identical inputs replay identical runs:
//! Dantzig pricing (most negative reduced cost, lowest column index on
//! ties), lowest-ratio leaving with lowest basic-index tie-breaking, and a
//! switch to Bland's rule after a run of degenerate pivots.
//!
//! A presolve pass fixes variables that any row combination forces to
//! zero: rows with zero right-hand side and one-signed coefficients, and
//! pairs of unit-coefficient rows where one support contains another at
//! equal right-hand sides (the surplus variables must vanish). This is
//! what collapses coupling programs with unit equality targets down to
//! their diagonal support.

use super::lu::Lu;
use super::{SolveResult, SolverOptions, Status};
use crate::error::{Error, Result};
use crate::lp::{LinearProgram, Relation, Sense};

const PIVOT_TOL: f64 = 1e-9;
const DRIVE_OUT_TOL: f64 = 1e-7;
const BLAND_TRIGGER: usize = 100;

pub fn solve_with_options(lp: &LinearProgram, opts: &SolverOptions) -> Result<SolveResult> {
    lp.validate()?;
    let mut fixed: Vec<Option<f64>> = vec![None; lp.num_vars];
    for &(j, v) in &lp.fixings {
        fixed[j] = Some(v);
    }
    if opts.presolve {
        implied_zeros(lp, &mut fixed);
    }

    let std = match standardize(lp, &fixed, opts.tol) {
        Ok(s) => s,
        Err(StandardizeOutcome::Infeasible) => {
            return Ok(infeasible_result(lp));
        }
    };

    let mut core = Core::new(std, opts);
    let status = core.run()?;
    if status != Status::Optimal {
        return Ok(SolveResult {
            status,
            objective: f64::NAN,
            primal: vec![],
            iterations: core.iterations,
            max_constraint_violation: f64::NAN,
            max_bound_violation: f64::NAN,
        });
    }

    // reconstruct the primal in the original variable space
    let mut x = vec![0.0; lp.num_vars];
    for (j, f) in fixed.iter().enumerate() {
        if let Some(v) = f {
            x[j] = *v;
        }
    }
    for (r, &col) in core.basis.iter().enumerate() {
        if col < core.nstruct {
            x[core.original_of[col]] = core.x_basic[r];
        }
    }

    let mut objective = lp.objective_offset;
    for &(j, v) in &lp.objective {
        objective += v * x[j];
    }

    let (max_constraint_violation, max_bound_violation) = residuals(lp, &x);
    if max_constraint_violation > opts.tol.max(1e-8) {
        return Err(Error::SolverFailure(format!(
            "residual {max_constraint_violation:.3e} above tolerance after optimal basis"
        )));
    }

    Ok(SolveResult {
        status: Status::Optimal,
        objective,
        primal: x,
        iterations: core.iterations,
        max_constraint_violation,
        max_bound_violation,
    })
}

fn infeasible_result(_lp: &LinearProgram) -> SolveResult {
    SolveResult {
        status: Status::Infeasible,
        objective: f64::NAN,
        primal: vec![],
        iterations: 0,
        max_constraint_violation: f64::NAN,
        max_bound_violation: f64::NAN,
    }
}

fn residuals(lp: &LinearProgram, x: &[f64]) -> (f64, f64) {
    let mut worst_row = 0.0f64;
    for row in &lp.rows {
        let mut lhs = 0.0;
        for &(j, v) in &row.coeffs {
            lhs += v * x[j];
        }
        let viol = match row.relation {
            Relation::Eq => (lhs - row.rhs).abs(),
            Relation::Le => (lhs - row.rhs).max(0.0),
        };
        worst_row = worst_row.max(viol);
    }
    let worst_bound = x.iter().fold(0.0f64, |acc, &v| acc.max(-v));
    (worst_row, worst_bound)
}

/// Fix variables that the rows force to zero. Two sound rules:
///
/// * a row `Σ aᵢxᵢ (= | ≤) 0` with every active coefficient positive (or an
///   equality with every coefficient negative) forces its support to zero;
/// * equality row `r` and row `s` (equality or ≤) with all coefficients
///   exactly 1, equal right-hand sides, and support(r) ⊂ support(s) force
///   the variables of `s` outside `r` to zero.
fn implied_zeros(lp: &LinearProgram, fixed: &mut [Option<f64>]) {
    for _pass in 0..3 {
        let mut changed = false;

        for row in &lp.rows {
            let mut rhs = row.rhs;
            let mut pos = 0usize;
            let mut neg = 0usize;
            let mut active = Vec::new();
            for &(j, v) in &row.coeffs {
                match fixed[j] {
                    Some(val) => rhs -= v * val,
                    None => {
                        if v > 0.0 {
                            pos += 1;
                        } else if v < 0.0 {
                            neg += 1;
                        }
                        active.push((j, v));
                    }
                }
            }
            if rhs != 0.0 || active.is_empty() {
                continue;
            }
            let forces = match row.relation {
                Relation::Eq => (pos > 0 && neg == 0) || (neg > 0 && pos == 0),
                Relation::Le => pos > 0 && neg == 0,
            };
            if forces {
                for (j, v) in active {
                    if v != 0.0 && fixed[j].is_none() {
                        fixed[j] = Some(0.0);
                        changed = true;
                    }
                }
            }
        }

        // unit-coefficient dominated-support rule
        struct UnitRow {
            support: Vec<usize>,
            rhs: f64,
            eq: bool,
        }
        let mut unit_rows = Vec::new();
        'rows: for row in &lp.rows {
            let mut rhs = row.rhs;
            let mut support = Vec::new();
            for &(j, v) in &row.coeffs {
                match fixed[j] {
                    Some(val) => rhs -= v * val,
                    None => {
                        if v != 1.0 {
                            continue 'rows;
                        }
                        support.push(j);
                    }
                }
            }
            support.sort_unstable();
            unit_rows.push(UnitRow {
                support,
                rhs,
                eq: row.relation == Relation::Eq,
            });
        }
        for r in &unit_rows {
            if !r.eq {
                continue;
            }
            for s in &unit_rows {
                if r.rhs != s.rhs || r.support.len() >= s.support.len() {
                    continue;
                }
                if !is_subset(&r.support, &s.support) {
                    continue;
                }
                // Σ_{s \ r} x = rhs_s − rhs_r = 0 (≤ 0 when s is a ≤ row)
                let mut it = r.support.iter().peekable();
                for &j in &s.support {
                    if it.peek() == Some(&&j) {
                        it.next();
                    } else if fixed[j].is_none() {
                        fixed[j] = Some(0.0);
                        changed = true;
                    }
                }
            }
        }

        if !changed {
            break;
        }
    }
}

fn is_subset(small: &[usize], big: &[usize]) -> bool {
    let mut it = big.iter();
    'outer: for &x in small {
        for &y in it.by_ref() {
            if y == x {
                continue 'outer;
            }
            if y > x {
                return false;
            }
        }
        return false;
    }
    true
}

enum StandardizeOutcome {
    Infeasible,
}

/// `min c·x  s.t.  A x = b, b ≥ 0, x ≥ 0` with slack columns appended and
/// per-row flags recording whether the slack can seed the basis.
struct Standardized {
    nstruct: usize,
    ncols: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<u32>,
    values: Vec<f64>,
    b: Vec<f64>,
    cost: Vec<f64>,
    /// Per row: slack column usable as the initial basic variable.
    seed: Vec<Option<usize>>,
    original_of: Vec<usize>,
}

fn standardize(
    lp: &LinearProgram,
    fixed: &[Option<f64>],
    tol: f64,
) -> std::result::Result<Standardized, StandardizeOutcome> {
    let mut compact_of = vec![usize::MAX; lp.num_vars];
    let mut original_of = Vec::new();
    for j in 0..lp.num_vars {
        if fixed[j].is_none() {
            compact_of[j] = original_of.len();
            original_of.push(j);
        }
    }
    let nstruct = original_of.len();

    struct KeptRow {
        coeffs: Vec<(usize, f64)>,
        le: bool,
        rhs: f64,
    }
    let mut kept = Vec::new();
    for row in &lp.rows {
        let mut rhs = row.rhs;
        let mut coeffs = Vec::with_capacity(row.coeffs.len());
        for &(j, v) in &row.coeffs {
            match fixed[j] {
                Some(val) => rhs -= v * val,
                None => {
                    if v != 0.0 {
                        coeffs.push((compact_of[j], v));
                    }
                }
            }
        }
        if coeffs.is_empty() {
            let violated = match row.relation {
                Relation::Eq => rhs.abs() > tol,
                Relation::Le => rhs < -tol,
            };
            if violated {
                return Err(StandardizeOutcome::Infeasible);
            }
            continue;
        }
        kept.push(KeptRow {
            coeffs,
            le: row.relation == Relation::Le,
            rhs,
        });
    }

    let m = kept.len();
    let num_slacks = kept.iter().filter(|r| r.le).count();
    let ncols = nstruct + num_slacks;

    // count entries per column, then fill
    let mut counts = vec![0usize; ncols];
    for row in &kept {
        for &(j, _) in &row.coeffs {
            counts[j] += 1;
        }
    }
    let mut slack_col = nstruct;
    let mut slack_of_row = vec![usize::MAX; m];
    for (i, row) in kept.iter().enumerate() {
        if row.le {
            counts[slack_col] = 1;
            slack_of_row[i] = slack_col;
            slack_col += 1;
        }
    }
    let mut col_ptr = vec![0usize; ncols + 1];
    for j in 0..ncols {
        col_ptr[j + 1] = col_ptr[j] + counts[j];
    }
    let nnz = col_ptr[ncols];
    let mut row_idx = vec![0u32; nnz];
    let mut values = vec![0.0f64; nnz];
    let mut cursor = col_ptr.clone();
    let mut b = vec![0.0; m];
    let mut seed = vec![None; m];

    for (i, row) in kept.iter().enumerate() {
        let negate = row.rhs < 0.0;
        let sign = if negate { -1.0 } else { 1.0 };
        b[i] = row.rhs * sign;
        for &(j, v) in &row.coeffs {
            row_idx[cursor[j]] = i as u32;
            values[cursor[j]] = v * sign;
            cursor[j] += 1;
        }
        if row.le {
            let sc = slack_of_row[i];
            row_idx[cursor[sc]] = i as u32;
            values[cursor[sc]] = sign;
            cursor[sc] += 1;
            if !negate {
                seed[i] = Some(sc);
            }
        }
    }

    let flip = match lp.sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };
    let mut cost = vec![0.0; ncols];
    for &(j, v) in &lp.objective {
        if fixed[j].is_none() {
            cost[compact_of[j]] = v * flip;
        }
    }

    Ok(Standardized {
        nstruct,
        ncols,
        col_ptr,
        row_idx,
        values,
        b,
        cost,
        seed,
        original_of,
    })
}

const ARTIFICIAL: usize = usize::MAX;

struct Core {
    m: usize,
    nstruct: usize,
    ncols: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<u32>,
    values: Vec<f64>,
    b: Vec<f64>,
    cost: Vec<f64>,
    original_of: Vec<usize>,
    /// Per row: basic column, or `ARTIFICIAL` marker + row encoded in
    /// `artificial_row`.
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    x_basic: Vec<f64>,
    iterations: usize,
    tol: f64,
    max_iter: usize,
}

impl Core {
    fn new(std: Standardized, opts: &SolverOptions) -> Core {
        let m = std.b.len();
        let mut basis = vec![ARTIFICIAL; m];
        let mut is_basic = vec![false; std.ncols];
        for i in 0..m {
            if let Some(sc) = std.seed[i] {
                basis[i] = sc;
                is_basic[sc] = true;
            }
        }
        Core {
            m,
            nstruct: std.nstruct,
            ncols: std.ncols,
            col_ptr: std.col_ptr,
            row_idx: std.row_idx,
            values: std.values,
            b: std.b,
            cost: std.cost,
            original_of: std.original_of,
            basis,
            is_basic,
            x_basic: vec![0.0; m],
            iterations: 0,
            tol: opts.tol,
            max_iter: opts.max_iter,
        }
    }

    #[inline]
    fn col_dot(&self, j: usize, y: &[f64]) -> f64 {
        let mut s = 0.0;
        for k in self.col_ptr[j]..self.col_ptr[j + 1] {
            s += self.values[k] * y[self.row_idx[k] as usize];
        }
        s
    }

    fn scatter_col(&self, j: usize, out: &mut [f64]) {
        for k in self.col_ptr[j]..self.col_ptr[j + 1] {
            out[self.row_idx[k] as usize] = self.values[k];
        }
    }

    fn factor_basis(&self) -> Result<Lu> {
        let m = self.m;
        let mut dense = vec![0.0; m * m];
        for (r, &col) in self.basis.iter().enumerate() {
            if col == ARTIFICIAL {
                dense[r * m + r] = 1.0;
            } else {
                for k in self.col_ptr[col]..self.col_ptr[col + 1] {
                    dense[r * m + self.row_idx[k] as usize] = self.values[k];
                }
            }
        }
        Lu::factor(dense, m, 1e-12)
            .ok_or_else(|| Error::SolverFailure("numerically singular basis".into()))
    }

    fn run(&mut self) -> Result<Status> {
        if self.m == 0 {
            // no rows left: x = 0 is optimal unless some cost is negative
            if self.cost.iter().any(|&c| c < -self.tol) {
                return Ok(Status::Unbounded);
            }
            return Ok(Status::Optimal);
        }

        if self.basis.iter().any(|&c| c == ARTIFICIAL) {
            match self.phase(true)? {
                PhaseEnd::Done => {}
                PhaseEnd::IterLimit => return Ok(Status::IterLimit),
                PhaseEnd::Unbounded => {
                    return Err(Error::SolverFailure(
                        "phase-1 objective reported unbounded".into(),
                    ))
                }
            }
            let infeas: f64 = self
                .basis
                .iter()
                .enumerate()
                .filter(|&(_, &c)| c == ARTIFICIAL)
                .map(|(r, _)| self.x_basic[r].max(0.0))
                .sum();
            if infeas > self.tol.max(1e-9) * 10.0 {
                return Ok(Status::Infeasible);
            }
            self.expel_artificials()?;
        }

        match self.phase(false)? {
            PhaseEnd::Done => Ok(Status::Optimal),
            PhaseEnd::IterLimit => Ok(Status::IterLimit),
            PhaseEnd::Unbounded => Ok(Status::Unbounded),
        }
    }

    fn phase_cost(&self, phase1: bool, col: usize) -> f64 {
        if phase1 {
            0.0
        } else {
            self.cost[col]
        }
    }

    fn phase(&mut self, phase1: bool) -> Result<PhaseEnd> {
        let mut bland = false;
        let mut degen_run = 0usize;
        loop {
            self.iterations += 1;
            if self.iterations > self.max_iter {
                return Ok(PhaseEnd::IterLimit);
            }
            let lu = self.factor_basis()?;

            let mut xb = self.b.clone();
            lu.solve(&mut xb);
            self.x_basic = xb;

            let mut y = vec![0.0; self.m];
            for (r, &col) in self.basis.iter().enumerate() {
                y[r] = if col == ARTIFICIAL {
                    if phase1 {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    self.phase_cost(phase1, col)
                };
            }
            lu.solve_t(&mut y);

            let mut entering = None;
            let mut best = -self.tol;
            for j in 0..self.ncols {
                if self.is_basic[j] {
                    continue;
                }
                let d = self.phase_cost(phase1, j) - self.col_dot(j, &y);
                if d < best {
                    entering = Some(j);
                    if bland {
                        break;
                    }
                    best = d;
                }
            }
            let Some(e) = entering else {
                return Ok(PhaseEnd::Done);
            };

            let mut w = vec![0.0; self.m];
            self.scatter_col(e, &mut w);
            lu.solve(&mut w);

            let mut leave: Option<usize> = None;
            let mut theta = f64::INFINITY;
            for i in 0..self.m {
                if w[i] > PIVOT_TOL {
                    let ratio = self.x_basic[i].max(0.0) / w[i];
                    let replace = match leave {
                        None => true,
                        Some(l) => {
                            ratio < theta - 1e-12
                                || (ratio <= theta + 1e-12
                                    && self.basis_order(i) < self.basis_order(l))
                        }
                    };
                    if replace {
                        theta = ratio.min(theta);
                        leave = Some(i);
                    }
                }
            }
            let Some(l) = leave else {
                return Ok(PhaseEnd::Unbounded);
            };

            if theta <= self.tol {
                degen_run += 1;
                if degen_run > BLAND_TRIGGER {
                    bland = true;
                }
            } else {
                degen_run = 0;
                bland = false;
            }

            let old = self.basis[l];
            if old != ARTIFICIAL {
                self.is_basic[old] = false;
            }
            self.basis[l] = e;
            self.is_basic[e] = true;
        }
    }

    /// Priority for the leaving tie-break: artificials leave first, then
    /// lower column indices.
    fn basis_order(&self, row: usize) -> usize {
        let c = self.basis[row];
        if c == ARTIFICIAL {
            row
        } else {
            self.ncols + c
        }
    }

    /// After phase 1: pivot every remaining artificial out of the basis,
    /// deleting rows whose equations turned out linearly dependent.
    fn expel_artificials(&mut self) -> Result<()> {
        let mut dead_rows = Vec::new();
        let art_rows: Vec<usize> = (0..self.m)
            .filter(|&r| self.basis[r] == ARTIFICIAL)
            .collect();
        if art_rows.is_empty() {
            return Ok(());
        }
        for r in art_rows {
            let lu = self.factor_basis()?;
            let mut e = vec![0.0; self.m];
            e[r] = 1.0;
            lu.solve_t(&mut e);
            let mut found = None;
            for j in 0..self.ncols {
                if self.is_basic[j] {
                    continue;
                }
                if self.col_dot(j, &e).abs() > DRIVE_OUT_TOL {
                    found = Some(j);
                    break;
                }
            }
            match found {
                Some(j) => {
                    self.basis[r] = j;
                    self.is_basic[j] = true;
                }
                None => dead_rows.push(r),
            }
        }
        if !dead_rows.is_empty() {
            self.delete_rows(&dead_rows);
        }
        Ok(())
    }

    fn delete_rows(&mut self, dead: &[usize]) {
        let mut keep = vec![true; self.m];
        for &r in dead {
            keep[r] = false;
        }
        let mut new_index = vec![u32::MAX; self.m];
        let mut next = 0u32;
        for i in 0..self.m {
            if keep[i] {
                new_index[i] = next;
                next += 1;
            }
        }
        let new_m = next as usize;

        let mut col_ptr = Vec::with_capacity(self.ncols + 1);
        let mut row_idx = Vec::with_capacity(self.row_idx.len());
        let mut values = Vec::with_capacity(self.values.len());
        col_ptr.push(0usize);
        for j in 0..self.ncols {
            for k in self.col_ptr[j]..self.col_ptr[j + 1] {
                let r = self.row_idx[k] as usize;
                if keep[r] {
                    row_idx.push(new_index[r]);
                    values.push(self.values[k]);
                }
            }
            col_ptr.push(row_idx.len());
        }
        self.col_ptr = col_ptr;
        self.row_idx = row_idx;
        self.values = values;
        self.b = (0..self.m).filter(|&i| keep[i]).map(|i| self.b[i]).collect();
        self.basis = (0..self.m)
            .filter(|&i| keep[i])
            .map(|i| self.basis[i])
            .collect();
        self.m = new_m;
        self.x_basic = vec![0.0; new_m];
    }
}

enum PhaseEnd {
    Done,
    IterLimit,
    Unbounded,
}
