//! Builders for the five measure linear programs.
//!
//! All programs share the outcome-space variables `x_ω ≥ 0` indexed by an
//! [`OutcomeIndexer`]. Condition (A) rows equate coupling bunch marginals
//! with the observed bunch pmfs; condition (B) rows pin, per connection
//! context pair, the probability that the two coupling variables coincide.

use crate::error::{Error, Result};
use crate::lp::{LinearProgram, OutcomeIndexer, Relation, Row, Sense};
use crate::system::{bunch_marginal, max_equality_prob, variable_prob, System};

/// Right-hand side of a (B) row: the Fréchet bound of the pair, or 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EqualityTarget {
    Frechet,
    One,
}

/// Connection context pairs with their slots, ordered by content
/// declaration order, then lexicographically by context index pair.
fn pair_slots(sys: &System, idx: &OutcomeIndexer) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for qi in 0..sys.contents.len() {
        let holders: Vec<(usize, usize)> = (0..sys.contexts.len())
            .filter_map(|ci| idx.slot_of(ci, qi).map(|s| (ci, s)))
            .collect();
        for i in 0..holders.len() {
            for j in (i + 1)..holders.len() {
                out.push((qi, holders[i].1, holders[j].1));
            }
        }
    }
    out
}

fn pair_target(
    sys: &System,
    idx: &OutcomeIndexer,
    slot_a: usize,
    slot_b: usize,
    target: EqualityTarget,
) -> Result<f64> {
    match target {
        EqualityTarget::One => Ok(1.0),
        EqualityTarget::Frechet => {
            let (ca, qa) = idx.slot(slot_a);
            let (cb, _) = idx.slot(slot_b);
            let q = &sys.contents[qa];
            let pa = variable_prob(sys, q, &sys.contexts[ca].id)?;
            let pb = variable_prob(sys, q, &sys.contexts[cb].id)?;
            max_equality_prob(pa.clamp(0.0, 1.0), pb.clamp(0.0, 1.0))
        }
    }
}

/// Condition (A): for each context and atom, the coupling mass landing on
/// the atom equals the bunch pmf entry. Rows in context-then-atom order.
pub fn constraints_a(sys: &System, idx: &OutcomeIndexer) -> Vec<Row> {
    let mut rows = Vec::new();
    for (ci, ctx) in sys.contexts.iter().enumerate() {
        let atoms = ctx.pmf.len();
        let mut groups: Vec<Vec<(usize, f64)>> = vec![Vec::new(); atoms];
        for omega in 0..idx.num_outcomes() {
            groups[idx.context_atom(omega, ci)].push((omega, 1.0));
        }
        for (atom, coeffs) in groups.into_iter().enumerate() {
            rows.push(Row {
                coeffs,
                relation: Relation::Eq,
                rhs: ctx.pmf[atom],
            });
        }
    }
    rows
}

/// Condition (B): for each connection context pair, the probability that
/// the two coupling variables agree equals the target. Rows follow
/// [`crate::system::connection_pairs`] order.
pub fn constraints_b(
    sys: &System,
    idx: &OutcomeIndexer,
    target: EqualityTarget,
) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    for (_, sa, sb) in pair_slots(sys, idx) {
        let (ma, mb) = (idx.mask(sa), idx.mask(sb));
        let coeffs: Vec<(usize, f64)> = (0..idx.num_outcomes())
            .filter(|&omega| ((omega & ma) == 0) == ((omega & mb) == 0))
            .map(|omega| (omega, 1.0))
            .collect();
        rows.push(Row {
            coeffs,
            relation: Relation::Eq,
            rhs: pair_target(sys, idx, sa, sb, target)?,
        });
    }
    Ok(rows)
}

/// CNT₁ program: over couplings satisfying (A), minimize the total deficit
/// of the connection equality probabilities against their Fréchet bounds.
///
/// Encoded as `Σ m − max Σ Pr(equal)`: minimize `-Σ count_equal(ω)·x_ω`
/// with constant offset `Σ m`, so the reported optimum is CNT₁ itself.
pub fn lp_cnt1(sys: &System, idx: &OutcomeIndexer) -> Result<LinearProgram> {
    let pairs = pair_slots(sys, idx);
    let mut offset = 0.0;
    let mut counts = vec![0u32; idx.num_outcomes()];
    for &(_, sa, sb) in &pairs {
        offset += pair_target(sys, idx, sa, sb, EqualityTarget::Frechet)?;
        let (ma, mb) = (idx.mask(sa), idx.mask(sb));
        for (omega, c) in counts.iter_mut().enumerate() {
            if ((omega & ma) == 0) == ((omega & mb) == 0) {
                *c += 1;
            }
        }
    }
    let objective: Vec<(usize, f64)> = counts
        .iter()
        .enumerate()
        .filter(|&(_, &c)| c > 0)
        .map(|(omega, &c)| (omega, -(c as f64)))
        .collect();
    let lp = LinearProgram {
        num_vars: idx.num_outcomes(),
        sense: Sense::Minimize,
        objective,
        objective_offset: offset,
        rows: constraints_a(sys, idx),
        fixings: vec![],
    };
    Ok(lp)
}

fn combinations(k: usize, s: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(s);
    fn rec(start: usize, k: usize, s: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == s {
            out.push(cur.clone());
            return;
        }
        for p in start..k {
            cur.push(p);
            rec(p + 1, k, s, cur, out);
            cur.pop();
        }
    }
    rec(0, k, s, &mut cur, &mut out);
    out
}

/// CNT₂ᵐ program: over couplings satisfying (B) with Fréchet targets (plus
/// normalization), minimize the total atomic L₁ deviation of the size-m
/// bunch marginals from the observed ones. CNT₂ is the value at
/// m = max bunch size.
pub fn lp_cnt2_level(sys: &System, idx: &OutcomeIndexer, level: usize) -> Result<LinearProgram> {
    if level < 1 {
        return Err(Error::Domain("level must be at least 1".into()));
    }
    let nx = idx.num_outcomes();
    let mut rows = constraints_b(sys, idx, EqualityTarget::Frechet)?;
    rows.push(Row {
        coeffs: (0..nx).map(|omega| (omega, 1.0)).collect(),
        relation: Relation::Eq,
        rhs: 1.0,
    });

    let mut num_t = 0usize;
    let mut objective = Vec::new();
    for (ci, ctx) in sys.contexts.iter().enumerate() {
        let k = ctx.contents.len();
        let s = level.min(k);
        for positions in combinations(k, s) {
            let subset: Vec<&str> = positions.iter().map(|&p| ctx.contents[p].as_str()).collect();
            let target = bunch_marginal(sys, &ctx.id, &subset)?;
            let slots: Vec<usize> = positions
                .iter()
                .map(|&p| idx.context_slots(ci)[p])
                .collect();
            let mut groups: Vec<Vec<(usize, f64)>> = vec![Vec::new(); 1 << s];
            for omega in 0..nx {
                let mut atom = 0usize;
                for (j, &slot) in slots.iter().enumerate() {
                    atom |= idx.bit(omega, slot) << (s - 1 - j);
                }
                groups[atom].push((omega, 1.0));
            }
            for (atom, group) in groups.into_iter().enumerate() {
                let t_var = nx + num_t;
                num_t += 1;
                objective.push((t_var, 1.0));
                let mut plus = group.clone();
                plus.push((t_var, -1.0));
                rows.push(Row {
                    coeffs: plus,
                    relation: Relation::Le,
                    rhs: target[atom],
                });
                let mut minus: Vec<(usize, f64)> =
                    group.into_iter().map(|(j, v)| (j, -v)).collect();
                minus.push((t_var, -1.0));
                rows.push(Row {
                    coeffs: minus,
                    relation: Relation::Le,
                    rhs: -target[atom],
                });
            }
        }
    }

    Ok(LinearProgram {
        num_vars: nx + num_t,
        sense: Sense::Minimize,
        objective,
        objective_offset: 0.0,
        rows,
        fixings: vec![],
    })
}

/// CNT₃ program: minimal total variation of a signed measure satisfying
/// both (A) and (B), split as `s = u − v` with `u, v ≥ 0`. The optimum is
/// T; CNT₃ = T − 1. The normalization Σs = 1 is implied by any single
/// context's (A) rows.
pub fn lp_cnt3(sys: &System, idx: &OutcomeIndexer) -> Result<LinearProgram> {
    let nx = idx.num_outcomes();
    let signed = |row: Row| -> Row {
        let mut coeffs = Vec::with_capacity(row.coeffs.len() * 2);
        for &(omega, c) in &row.coeffs {
            coeffs.push((omega, c));
        }
        for &(omega, c) in &row.coeffs {
            coeffs.push((nx + omega, -c));
        }
        Row {
            coeffs,
            relation: row.relation,
            rhs: row.rhs,
        }
    };
    let mut rows: Vec<Row> = constraints_a(sys, idx).into_iter().map(signed).collect();
    rows.extend(
        constraints_b(sys, idx, EqualityTarget::Frechet)?
            .into_iter()
            .map(signed),
    );
    Ok(LinearProgram {
        num_vars: 2 * nx,
        sense: Sense::Minimize,
        objective: (0..2 * nx).map(|j| (j, 1.0)).collect(),
        objective_offset: 0.0,
        rows,
        fixings: vec![],
    })
}

/// Contextual-fraction program, reduced form: a subnormalized measure over
/// global assignments `g ∈ {0,1}^|Q|`, dominated atomwise by every bunch
/// pmf. The optimum is the maximal mass M; CNTF = 1 − M.
pub fn lp_cntf_reduced(sys: &System, cap: usize) -> Result<LinearProgram> {
    let nq = sys.contents.len();
    if nq > cap {
        return Err(Error::TooLarge { slots: nq, cap });
    }
    let ng = 1usize << nq;
    let mut rows = Vec::new();
    for ctx in &sys.contexts {
        let k = ctx.contents.len();
        let content_idx: Vec<usize> = ctx
            .contents
            .iter()
            .map(|q| sys.content_index(q).expect("validated content"))
            .collect();
        let mut groups: Vec<Vec<(usize, f64)>> = vec![Vec::new(); 1 << k];
        for g in 0..ng {
            let mut atom = 0usize;
            for (j, &qi) in content_idx.iter().enumerate() {
                atom |= ((g >> (nq - 1 - qi)) & 1) << (k - 1 - j);
            }
            groups[atom].push((g, 1.0));
        }
        for (atom, coeffs) in groups.into_iter().enumerate() {
            rows.push(Row {
                coeffs,
                relation: Relation::Le,
                rhs: ctx.pmf[atom],
            });
        }
    }
    Ok(LinearProgram {
        num_vars: ng,
        sense: Sense::Maximize,
        objective: (0..ng).map(|g| (g, 1.0)).collect(),
        objective_offset: 0.0,
        rows,
        fixings: vec![],
    })
}

/// Contextual-fraction program over the full outcome space: mass may only
/// sit on outcomes where every connection's slots agree; dominated by (A).
/// Must agree with [`lp_cntf_reduced`]; kept as an internal equivalence
/// oracle.
pub fn lp_cntf_full(sys: &System, idx: &OutcomeIndexer) -> Result<LinearProgram> {
    let nx = idx.num_outcomes();
    let mut connection_masks: Vec<Vec<usize>> = Vec::new();
    for qi in 0..sys.contents.len() {
        let masks: Vec<usize> = (0..sys.contexts.len())
            .filter_map(|ci| idx.slot_of(ci, qi).map(|s| idx.mask(s)))
            .collect();
        if masks.len() >= 2 {
            connection_masks.push(masks);
        }
    }
    let diagonal = |omega: usize| -> bool {
        connection_masks.iter().all(|masks| {
            let first = (omega & masks[0]) != 0;
            masks.iter().all(|&m| ((omega & m) != 0) == first)
        })
    };
    let fixings: Vec<(usize, f64)> = (0..nx)
        .filter(|&omega| !diagonal(omega))
        .map(|omega| (omega, 0.0))
        .collect();
    let rows = constraints_a(sys, idx)
        .into_iter()
        .map(|r| Row {
            relation: Relation::Le,
            ..r
        })
        .collect();
    Ok(LinearProgram {
        num_vars: nx,
        sense: Sense::Maximize,
        objective: (0..nx).map(|j| (j, 1.0)).collect(),
        objective_offset: 0.0,
        rows,
        fixings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{make_cyclic, make_hypercyclic, SystemShape};
    use crate::lp::{index_outcomes, DEFAULT_SLOT_CAP};

    fn uniform(k: usize) -> Vec<f64> {
        vec![1.0 / (1 << k) as f64; 1 << k]
    }

    fn hyper(k: usize, n: usize) -> crate::system::System {
        make_hypercyclic(SystemShape { order: k, rank: n }, &vec![uniform(k); n]).unwrap()
    }

    #[test]
    fn constraints_a_row_counts() {
        let c2 = make_cyclic(2, &[uniform(2), uniform(2)]).unwrap();
        let idx = index_outcomes(&c2, DEFAULT_SLOT_CAP).unwrap();
        assert_eq!(constraints_a(&c2, &idx).len(), 8);

        let h33 = hyper(3, 3);
        let idx = index_outcomes(&h33, DEFAULT_SLOT_CAP).unwrap();
        assert_eq!(constraints_a(&h33, &idx).len(), 24);
    }

    #[test]
    fn constraints_a_context_groups_sum_to_ones() {
        let sys = hyper(2, 3);
        let idx = index_outcomes(&sys, DEFAULT_SLOT_CAP).unwrap();
        let rows = constraints_a(&sys, &idx);
        let mut r = 0;
        for ctx in &sys.contexts {
            let mut coeff_sum = vec![0.0; idx.num_outcomes()];
            let mut rhs_sum = 0.0;
            for _ in 0..ctx.pmf.len() {
                for &(j, v) in &rows[r].coeffs {
                    coeff_sum[j] += v;
                }
                rhs_sum += rows[r].rhs;
                r += 1;
            }
            assert!(coeff_sum.iter().all(|&v| v == 1.0));
            assert!((rhs_sum - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn constraints_b_row_counts_and_rhs() {
        let h34 = hyper(3, 4);
        let idx = index_outcomes(&h34, DEFAULT_SLOT_CAP).unwrap();
        let rows = constraints_b(&h34, &idx, EqualityTarget::Frechet).unwrap();
        assert_eq!(rows.len(), 12);
        // consistently connected: every Fréchet target is 1
        assert!(rows.iter().all(|r| r.rhs == 1.0));

        let ones = constraints_b(&h34, &idx, EqualityTarget::One).unwrap();
        assert!(ones.iter().all(|r| r.rhs == 1.0));
    }

    #[test]
    fn constraints_b_frechet_rhs_tracks_marginals() {
        // c1 = (q1, q2) uniform; c2 = (q2, q1) with q1 as the low bit:
        // p(q1 in c2) = pmf[1] + pmf[3] = .6, p(q2 in c2) = pmf[2] + pmf[3] = .5
        let sys = make_cyclic(
            2,
            &[vec![0.25, 0.25, 0.25, 0.25], vec![0.2, 0.3, 0.2, 0.3]],
        )
        .unwrap();
        let idx = index_outcomes(&sys, DEFAULT_SLOT_CAP).unwrap();
        let rows = constraints_b(&sys, &idx, EqualityTarget::Frechet).unwrap();
        assert_eq!(rows.len(), 2);
        // q1: p = .5 vs .6 → 0.9; q2: p = .5 vs .5 → 1.0
        assert!((rows[0].rhs - 0.9).abs() < 1e-12);
        assert!((rows[1].rhs - 1.0).abs() < 1e-12);
    }

    #[test]
    fn count_formulas_hold_for_small_hypercyclic_shapes() {
        for k in 1..=3usize {
            for n in k.max(2)..=5 {
                let sys = hyper(k, n);
                let idx = index_outcomes(&sys, DEFAULT_SLOT_CAP).unwrap();
                assert_eq!(idx.num_slots(), k * n, "slots ({k},{n})");
                assert_eq!(
                    constraints_a(&sys, &idx).len(),
                    n * (1 << k),
                    "A rows ({k},{n})"
                );
                let b = constraints_b(&sys, &idx, EqualityTarget::Frechet).unwrap();
                assert_eq!(b.len(), n * k * (k - 1) / 2, "B rows ({k},{n})");
                // every B row covers exactly half the outcome space
                for row in &b {
                    assert_eq!(row.coeffs.len(), idx.num_outcomes() / 2);
                }
            }
        }
    }

    #[test]
    fn cnt1_objective_counts_equal_pairs() {
        let sys = make_cyclic(2, &[uniform(2), uniform(2)]).unwrap();
        let idx = index_outcomes(&sys, DEFAULT_SLOT_CAP).unwrap();
        let lp = lp_cnt1(&sys, &idx).unwrap();
        assert_eq!(lp.rows.len(), 8);
        assert_eq!(lp.objective_offset, 2.0);
        // ω = 0 (all zeros) has both pairs equal
        let c0 = lp.objective.iter().find(|&&(j, _)| j == 0).unwrap().1;
        assert_eq!(c0, -2.0);
        lp.validate().unwrap();
    }

    #[test]
    fn cnt2_level_sizes() {
        let sys = hyper(3, 3);
        let idx = index_outcomes(&sys, DEFAULT_SLOT_CAP).unwrap();
        // level 2: per context C(3,2) = 3 subsets × 4 atoms = 12 slacks
        let lp = lp_cnt2_level(&sys, &idx, 2).unwrap();
        let num_t = 3 * 12;
        assert_eq!(lp.num_vars, idx.num_outcomes() + num_t);
        // rows: 9 B + 1 normalization + 2 per slack
        assert_eq!(lp.rows.len(), 9 + 1 + 2 * num_t);
        lp.validate().unwrap();

        // level beyond the bunch size clamps to the full bunch
        let l9 = lp_cnt2_level(&sys, &idx, 9).unwrap();
        let full = lp_cnt2_level(&sys, &idx, 3).unwrap();
        assert_eq!(l9.num_vars, full.num_vars);
        assert_eq!(l9.rows.len(), full.rows.len());
    }

    #[test]
    fn cnt3_doubles_variables() {
        let sys = make_cyclic(2, &[uniform(2), uniform(2)]).unwrap();
        let idx = index_outcomes(&sys, DEFAULT_SLOT_CAP).unwrap();
        let lp = lp_cnt3(&sys, &idx).unwrap();
        assert_eq!(lp.num_vars, 32);
        assert_eq!(lp.rows.len(), 8 + 2);
        lp.validate().unwrap();
    }

    #[test]
    fn cntf_reduced_and_full_shapes() {
        let sys = hyper(3, 3);
        let idx = index_outcomes(&sys, DEFAULT_SLOT_CAP).unwrap();
        let red = lp_cntf_reduced(&sys, DEFAULT_SLOT_CAP).unwrap();
        assert_eq!(red.num_vars, 8);
        assert_eq!(red.rows.len(), 24);
        red.validate().unwrap();

        let full = lp_cntf_full(&sys, &idx).unwrap();
        assert_eq!(full.num_vars, 512);
        // diagonal outcomes: one per global assignment
        assert_eq!(full.fixings.len(), 512 - 8);
        full.validate().unwrap();
    }

    #[test]
    fn cntf_reduced_cap_is_on_contents() {
        let sys = hyper(2, 5);
        assert!(matches!(
            lp_cntf_reduced(&sys, 4),
            Err(Error::TooLarge { slots: 5, cap: 4 })
        ));
    }
}
