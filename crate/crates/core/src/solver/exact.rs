//! Exact rational simplex with Bland's rule.
//!
//! Independent oracle for golden values: no floating point anywhere in the
//! pivoting path. The tableau is kept as integers over a common
//! denominator (integer-preserving Gauss–Jordan pivoting: entries stay
//! exact and division by the previous pivot is always exact), so the hot
//! loop runs on `BigInt`s without gcd normalization. Bland's rule
//! guarantees termination on the heavily degenerate coupling polytopes.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::Status;
use crate::error::{Error, Result};
use crate::lp::{LinearProgram, Relation, Sense};

/// Default cap on program nonzeros accepted by the exact path.
pub const DEFAULT_NNZ_CAP: usize = 200_000;

/// Outcome of an exact solve: the objective is an exact rational.
#[derive(Debug, Clone)]
pub struct ExactSolveResult {
    pub status: Status,
    pub objective: BigRational,
    pub primal: Vec<BigRational>,
    pub iterations: usize,
}

impl ExactSolveResult {
    pub fn objective_f64(&self) -> f64 {
        self.objective.to_f64().unwrap_or(f64::NAN)
    }
}

fn rat(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite coefficient")
}

/// Solve exactly with the default nonzero cap (or `CBD_EXACT_NNZ_CAP`).
pub fn solve_exact(lp: &LinearProgram) -> Result<ExactSolveResult> {
    let cap = std::env::var("CBD_EXACT_NNZ_CAP")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_NNZ_CAP);
    solve_exact_with_cap(lp, cap)
}

pub fn solve_exact_with_cap(lp: &LinearProgram, cap: usize) -> Result<ExactSolveResult> {
    lp.validate()?;
    let nnz = lp.nonzero_count();
    if nnz > cap {
        return Err(Error::CapExceeded { nonzeros: nnz, cap });
    }

    let mut fixed: Vec<Option<BigRational>> = vec![None; lp.num_vars];
    for &(j, v) in &lp.fixings {
        fixed[j] = Some(rat(v));
    }
    let mut compact_of = vec![usize::MAX; lp.num_vars];
    let mut original_of = Vec::new();
    for j in 0..lp.num_vars {
        if fixed[j].is_none() {
            compact_of[j] = original_of.len();
            original_of.push(j);
        }
    }
    let nstruct = original_of.len();

    // substitute fixings, add slacks, normalize rhs signs — all rational
    struct RatRow {
        coeffs: Vec<(usize, BigRational)>,
        le: bool,
        rhs: BigRational,
    }
    let mut kept: Vec<RatRow> = Vec::new();
    for row in &lp.rows {
        let mut rhs = rat(row.rhs);
        let mut coeffs = Vec::with_capacity(row.coeffs.len());
        for &(j, v) in &row.coeffs {
            match &fixed[j] {
                Some(val) => rhs -= rat(v) * val,
                None => coeffs.push((compact_of[j], rat(v))),
            }
        }
        if coeffs.is_empty() {
            let violated = match row.relation {
                Relation::Eq => !rhs.is_zero(),
                Relation::Le => rhs.is_negative(),
            };
            if violated {
                return Ok(ExactSolveResult {
                    status: Status::Infeasible,
                    objective: BigRational::zero(),
                    primal: vec![],
                    iterations: 0,
                });
            }
            continue;
        }
        kept.push(RatRow {
            coeffs,
            le: row.relation == Relation::Le,
            rhs,
        });
    }

    let m = kept.len();
    let nslack = kept.iter().filter(|r| r.le).count();
    let ncols = nstruct + nslack;

    // integerize: scale all rows by the lcm of coefficient denominators,
    // then substitute x = x''/S with S the lcm of scaled rhs denominators
    let mut d_a = BigInt::one();
    for row in &kept {
        for (_, c) in &row.coeffs {
            d_a = d_a.lcm(c.denom());
        }
    }
    let mut s_scale = BigInt::one();
    for row in &kept {
        let scaled = &row.rhs * BigRational::from(d_a.clone());
        s_scale = s_scale.lcm(scaled.denom());
    }

    let int_of = |c: &BigRational, scale: &BigInt| -> BigInt {
        let v = c * BigRational::from(scale.clone());
        debug_assert!(v.is_integer());
        v.to_integer()
    };

    let rhs_scale = &d_a * &s_scale;
    let mut tab: Vec<Vec<BigInt>> = Vec::with_capacity(m);
    let mut basis: Vec<usize> = Vec::with_capacity(m);
    let mut slack_next = nstruct;
    for row in &kept {
        let mut r = vec![BigInt::zero(); ncols + 1];
        let negate = row.rhs.is_negative();
        for (j, c) in &row.coeffs {
            let v = int_of(c, &d_a);
            r[*j] = if negate { -v } else { v };
        }
        let mut seed = ARTIFICIAL;
        if row.le {
            r[slack_next] = if negate { -BigInt::one() } else { BigInt::one() };
            if !negate {
                seed = slack_next;
            }
            slack_next += 1;
        }
        let rv = int_of(&row.rhs, &rhs_scale);
        r[ncols] = if negate { -rv } else { rv };
        debug_assert!(!r[ncols].is_negative());
        tab.push(r);
        basis.push(seed);
    }

    // phase-2 reduced-cost row (sense-normalized to minimize); only signs
    // are consumed, so any positive scaling works
    let flip = match lp.sense {
        Sense::Minimize => 1,
        Sense::Maximize => -1,
    };
    let mut d_c = BigInt::one();
    for &(_, v) in &lp.objective {
        d_c = d_c.lcm(rat(v).denom());
    }
    let mut cost2 = vec![BigInt::zero(); ncols + 1];
    for &(j, v) in &lp.objective {
        if fixed[j].is_none() {
            cost2[compact_of[j]] = int_of(&rat(v), &d_c) * flip;
        }
    }

    let mut t = Tableau {
        tab,
        cost2,
        cost1: vec![BigInt::zero(); ncols + 1],
        denom: BigInt::one(),
        basis,
        ncols,
        is_basic: vec![false; ncols],
        iterations: 0,
    };
    for &b in &t.basis {
        if b != ARTIFICIAL {
            t.is_basic[b] = true;
        }
    }

    let need_phase1 = t.basis.iter().any(|&b| b == ARTIFICIAL);
    if need_phase1 {
        for j in 0..=ncols {
            let mut s = BigInt::zero();
            for (r, &b) in t.basis.iter().enumerate() {
                if b == ARTIFICIAL {
                    s += &t.tab[r][j];
                }
            }
            t.cost1[j] = -s;
        }
        match t.run_phase(true)? {
            PhaseEnd::Done => {}
            PhaseEnd::IterLimit => return Ok(iter_limit(t.iterations)),
            PhaseEnd::Unbounded => {
                return Err(Error::SolverFailure(
                    "exact phase 1 reported unbounded".into(),
                ))
            }
        }
        let infeasible = t
            .basis
            .iter()
            .enumerate()
            .any(|(r, &b)| b == ARTIFICIAL && t.tab[r][ncols].is_positive());
        if infeasible {
            return Ok(ExactSolveResult {
                status: Status::Infeasible,
                objective: BigRational::zero(),
                primal: vec![],
                iterations: t.iterations,
            });
        }
        t.expel_artificials();
    }

    match t.run_phase(false)? {
        PhaseEnd::Done => {}
        PhaseEnd::IterLimit => return Ok(iter_limit(t.iterations)),
        PhaseEnd::Unbounded => {
            return Ok(ExactSolveResult {
                status: Status::Unbounded,
                objective: BigRational::zero(),
                primal: vec![],
                iterations: t.iterations,
            })
        }
    }

    // extract the primal: x = x''/S, fixings reinstated
    let mut x: Vec<BigRational> = vec![BigRational::zero(); lp.num_vars];
    for (j, f) in fixed.iter().enumerate() {
        if let Some(v) = f {
            x[j] = v.clone();
        }
    }
    let unscale = BigRational::new(BigInt::one(), s_scale.clone());
    for (r, &b) in t.basis.iter().enumerate() {
        if b != ARTIFICIAL && b < nstruct {
            let val = BigRational::new(t.tab[r][t.ncols].clone(), t.denom.clone());
            x[original_of[b]] = val * &unscale;
        }
    }

    let mut objective = rat(lp.objective_offset);
    for &(j, v) in &lp.objective {
        if !x[j].is_zero() {
            objective += rat(v) * &x[j];
        }
    }

    Ok(ExactSolveResult {
        status: Status::Optimal,
        objective,
        primal: x,
        iterations: t.iterations,
    })
}

fn iter_limit(iterations: usize) -> ExactSolveResult {
    ExactSolveResult {
        status: Status::IterLimit,
        objective: BigRational::zero(),
        primal: vec![],
        iterations,
    }
}

const ARTIFICIAL: usize = usize::MAX;
const MAX_EXACT_ITER: usize = 500_000;

struct Tableau {
    /// Constraint rows; entry `[ncols]` is the right-hand side.
    tab: Vec<Vec<BigInt>>,
    cost2: Vec<BigInt>,
    cost1: Vec<BigInt>,
    denom: BigInt,
    basis: Vec<usize>,
    ncols: usize,
    is_basic: Vec<bool>,
    iterations: usize,
}

enum PhaseEnd {
    Done,
    IterLimit,
    Unbounded,
}

impl Tableau {
    fn cost_row(&self, phase1: bool) -> &[BigInt] {
        if phase1 {
            &self.cost1
        } else {
            &self.cost2
        }
    }

    fn run_phase(&mut self, phase1: bool) -> Result<PhaseEnd> {
        loop {
            self.iterations += 1;
            if self.iterations > MAX_EXACT_ITER {
                return Ok(PhaseEnd::IterLimit);
            }

            // Bland entering: smallest nonbasic column with negative
            // reduced cost
            let mut entering = None;
            for j in 0..self.ncols {
                if !self.is_basic[j] && self.cost_row(phase1)[j].is_negative() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(e) = entering else {
                return Ok(PhaseEnd::Done);
            };

            // ratio test with exact cross-multiplied comparison; Bland
            // tie-break on the smallest basic variable index
            let mut leave: Option<usize> = None;
            for i in 0..self.tab.len() {
                if !self.tab[i][e].is_positive() {
                    continue;
                }
                let better = match leave {
                    None => true,
                    Some(l) => {
                        // compare rhs_i/a_i vs rhs_l/a_l
                        let lhs = &self.tab[i][self.ncols] * &self.tab[l][e];
                        let rhs = &self.tab[l][self.ncols] * &self.tab[i][e];
                        match lhs.cmp(&rhs) {
                            std::cmp::Ordering::Less => true,
                            std::cmp::Ordering::Greater => false,
                            std::cmp::Ordering::Equal => {
                                self.bland_id(i) < self.bland_id(l)
                            }
                        }
                    }
                };
                if better {
                    leave = Some(i);
                }
            }
            let Some(l) = leave else {
                return Ok(PhaseEnd::Unbounded);
            };

            self.pivot(l, e, phase1);
        }
    }

    fn bland_id(&self, row: usize) -> usize {
        let b = self.basis[row];
        if b == ARTIFICIAL {
            self.ncols + row
        } else {
            b
        }
    }

    fn pivot(&mut self, r: usize, c: usize, with_phase1: bool) {
        let p = self.tab[r][c].clone();
        debug_assert!(p.is_positive());
        let ncols = self.ncols;
        let d = self.denom.clone();

        let update = |row: &mut [BigInt], pivot_row: &[BigInt], p: &BigInt, d: &BigInt| {
            let f = row[c].clone();
            for j in 0..=ncols {
                let num = &row[j] * p - &f * &pivot_row[j];
                let (q, rem) = num.div_rem(d);
                debug_assert!(rem.is_zero(), "fraction-free pivot must divide exactly");
                let _ = rem;
                row[j] = q;
            }
        };

        let pivot_row = self.tab[r].clone();
        for i in 0..self.tab.len() {
            if i != r {
                update(&mut self.tab[i], &pivot_row, &p, &d);
            }
        }
        update(&mut self.cost2, &pivot_row, &p, &d);
        if with_phase1 {
            update(&mut self.cost1, &pivot_row, &p, &d);
        }

        let old = self.basis[r];
        if old != ARTIFICIAL {
            self.is_basic[old] = false;
        }
        self.basis[r] = c;
        self.is_basic[c] = true;
        self.denom = p;
    }

    /// Pivot every artificial still basic (at value zero) out of the
    /// basis; rows that admit no pivot are linearly dependent and dropped.
    fn expel_artificials(&mut self) {
        let mut r = 0;
        while r < self.tab.len() {
            if self.basis[r] != ARTIFICIAL {
                r += 1;
                continue;
            }
            debug_assert!(self.tab[r][self.ncols].is_zero());
            let mut found = None;
            for j in 0..self.ncols {
                if !self.is_basic[j] && !self.tab[r][j].is_zero() {
                    found = Some(j);
                    break;
                }
            }
            match found {
                Some(j) => {
                    if self.tab[r][j].is_negative() {
                        for v in self.tab[r].iter_mut() {
                            *v = -std::mem::take(v);
                        }
                    }
                    self.pivot(r, j, false);
                    r += 1;
                }
                None => {
                    self.tab.remove(r);
                    self.basis.remove(r);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{LinearProgram, Relation, Row, Sense};

    fn row(coeffs: Vec<(usize, f64)>, relation: Relation, rhs: f64) -> Row {
        Row {
            coeffs,
            relation,
            rhs,
        }
    }

    fn rational(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn exact_min_with_equality() {
        let lp = LinearProgram {
            num_vars: 1,
            sense: Sense::Minimize,
            objective: vec![(0, 1.0)],
            objective_offset: 0.0,
            rows: vec![row(vec![(0, 1.0)], Relation::Eq, 1.0)],
            fixings: vec![],
        };
        let r = solve_exact(&lp).unwrap();
        assert_eq!(r.status, Status::Optimal);
        assert_eq!(r.objective, rational(1, 1));
    }

    #[test]
    fn exact_max_with_fractional_bounds() {
        let lp = LinearProgram {
            num_vars: 2,
            sense: Sense::Maximize,
            objective: vec![(0, 1.0), (1, 1.0)],
            objective_offset: 0.0,
            rows: vec![
                row(vec![(0, 1.0)], Relation::Le, 0.5),
                row(vec![(1, 1.0)], Relation::Le, 0.5),
            ],
            fixings: vec![],
        };
        let r = solve_exact(&lp).unwrap();
        assert_eq!(r.status, Status::Optimal);
        assert_eq!(r.objective, rational(1, 1));
        assert_eq!(r.primal[0], rational(1, 2));
    }

    #[test]
    fn exact_detects_infeasible_and_unbounded() {
        let infeasible = LinearProgram {
            num_vars: 1,
            sense: Sense::Minimize,
            objective: vec![(0, 1.0)],
            objective_offset: 0.0,
            rows: vec![row(vec![(0, 1.0)], Relation::Eq, -2.0)],
            fixings: vec![],
        };
        assert_eq!(
            solve_exact(&infeasible).unwrap().status,
            Status::Infeasible
        );

        let unbounded = LinearProgram {
            num_vars: 1,
            sense: Sense::Maximize,
            objective: vec![(0, 1.0)],
            objective_offset: 0.0,
            rows: vec![row(vec![(0, -1.0)], Relation::Le, 1.0)],
            fixings: vec![],
        };
        assert_eq!(solve_exact(&unbounded).unwrap().status, Status::Unbounded);
    }

    #[test]
    fn exact_handles_degenerate_redundant_rows() {
        let lp = LinearProgram {
            num_vars: 2,
            sense: Sense::Minimize,
            objective: vec![(0, 1.0), (1, 2.0)],
            objective_offset: 0.0,
            rows: vec![
                row(vec![(0, 1.0), (1, 1.0)], Relation::Eq, 1.0),
                row(vec![(0, 1.0), (1, 1.0)], Relation::Eq, 1.0),
                row(vec![(0, 1.0), (1, -1.0)], Relation::Eq, 0.0),
            ],
            fixings: vec![],
        };
        let r = solve_exact(&lp).unwrap();
        assert_eq!(r.status, Status::Optimal);
        assert_eq!(r.objective, rational(3, 2));
    }

    #[test]
    fn exact_objective_is_dyadic_exact() {
        // minimize x + y st x + y = 0.1 + 0.2 (f64 arithmetic on dyadics)
        let rhs = 0.1f64 + 0.2f64;
        let lp = LinearProgram {
            num_vars: 2,
            sense: Sense::Minimize,
            objective: vec![(0, 1.0), (1, 1.0)],
            objective_offset: 0.0,
            rows: vec![row(vec![(0, 1.0), (1, 1.0)], Relation::Eq, rhs)],
            fixings: vec![],
        };
        let r = solve_exact(&lp).unwrap();
        assert_eq!(r.objective, BigRational::from_float(rhs).unwrap());
    }

    #[test]
    fn nnz_cap_is_enforced() {
        let lp = LinearProgram {
            num_vars: 3,
            sense: Sense::Minimize,
            objective: vec![(0, 1.0), (1, 1.0), (2, 1.0)],
            objective_offset: 0.0,
            rows: vec![row(
                vec![(0, 1.0), (1, 1.0), (2, 1.0)],
                Relation::Eq,
                1.0,
            )],
            fixings: vec![],
        };
        assert!(matches!(
            solve_exact_with_cap(&lp, 4),
            Err(Error::CapExceeded { nonzeros: 6, cap: 4 })
        ));
    }
}
