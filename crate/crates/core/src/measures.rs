//! The four contextuality measures, level detection, and the closed-form
//! cyclic criterion.

use crate::error::{Error, Result};
use crate::lp::{
    index_outcomes, lp_cnt1, lp_cnt2_level, lp_cnt3, lp_cntf_reduced, OutcomeIndexer,
    DEFAULT_SLOT_CAP,
};
use crate::solver::{solve_with_options, SolverOptions, Status};
use crate::system::{require_valid, variable_prob, System};

/// Knobs shared by all measure computations.
#[derive(Debug, Clone, Copy)]
pub struct MeasureConfig {
    /// Positivity threshold for classifying a measure as nonzero.
    pub tol: f64,
    /// Tolerance handed to the LP solver.
    pub solver_tol: f64,
    /// Cap on coupling slots (outcome space is 2^slots).
    pub slot_cap: usize,
    pub solver: SolverOptions,
}

impl Default for MeasureConfig {
    fn default() -> Self {
        let slot_cap = std::env::var("CBD_MAX_SLOTS")
            .ok()
            .and_then(|s| s.parse().ok())
            .unwrap_or(DEFAULT_SLOT_CAP);
        MeasureConfig {
            tol: 1e-7,
            solver_tol: 1e-9,
            slot_cap,
            solver: SolverOptions::default(),
        }
    }
}

impl MeasureConfig {
    fn options(&self) -> SolverOptions {
        SolverOptions {
            tol: self.solver_tol,
            ..self.solver
        }
    }
}

/// Per-solve diagnostics retained in a [`MeasureReport`].
#[derive(Debug, Clone, Default)]
pub struct Diagnostics {
    /// (label, iterations, max residual) per LP solved.
    pub solves: Vec<(String, usize, f64)>,
    /// Messages such as positivity disagreements between measures.
    pub notes: Vec<String>,
    /// False when the four measures disagree on positivity at `tol`.
    pub consistent: bool,
}

/// All measure values for one system.
#[derive(Debug, Clone)]
pub struct MeasureReport {
    pub cnt1: f64,
    pub cnt2: f64,
    pub cnt3: f64,
    pub cntf: f64,
    /// CNT₂ᵐ for m = 1..=max bunch size (index 0 = level 1).
    pub cnt2_by_level: Vec<f64>,
    /// Smallest level with CNT₂ᵐ above tolerance; `None` = noncontextual.
    pub level: Option<usize>,
    /// T = CNT₃ + 1.
    pub total_variation: f64,
    /// M = 1 − CNTF.
    pub mass: f64,
    pub contextual: bool,
    pub tol: f64,
    pub diagnostics: Diagnostics,
}

fn clamp_measure(value: f64, tol: f64, label: &str) -> Result<f64> {
    if value < -tol {
        return Err(Error::SolverFailure(format!(
            "{label} came out {value}, below -{tol}"
        )));
    }
    Ok(value.max(0.0))
}

fn run_lp(
    lp: &crate::lp::LinearProgram,
    cfg: &MeasureConfig,
    label: &str,
    diag: Option<&mut Diagnostics>,
) -> Result<f64> {
    let res = solve_with_options(lp, &cfg.options())?;
    if res.status != Status::Optimal {
        return Err(Error::SolverFailure(format!(
            "{label}: solver returned {:?}",
            res.status
        )));
    }
    if let Some(d) = diag {
        d.solves.push((
            label.to_string(),
            res.iterations,
            res.max_constraint_violation,
        ));
    }
    Ok(res.objective)
}

/// CNT₁: minimal total (B)-deficit over couplings satisfying (A).
pub fn cnt1(sys: &System) -> Result<f64> {
    cnt1_with(sys, &MeasureConfig::default())
}

pub fn cnt1_with(sys: &System, cfg: &MeasureConfig) -> Result<f64> {
    require_valid(sys)?;
    let idx = index_outcomes(sys, cfg.slot_cap)?;
    let lp = lp_cnt1(sys, &idx)?;
    clamp_measure(run_lp(&lp, cfg, "cnt1", None)?, cfg.tol, "cnt1")
}

/// CNT₂: minimal (A)-deviation over couplings satisfying (B), i.e. CNT₂ᵐ
/// at m = max bunch size.
pub fn cnt2(sys: &System) -> Result<f64> {
    cnt2_with(sys, &MeasureConfig::default())
}

pub fn cnt2_with(sys: &System, cfg: &MeasureConfig) -> Result<f64> {
    require_valid(sys)?;
    cnt2_at_level_with(sys, sys.max_bunch_size(), cfg)
}

/// CNT₂ᵐ at one level.
pub fn cnt2_at_level(sys: &System, level: usize) -> Result<f64> {
    cnt2_at_level_with(sys, level, &MeasureConfig::default())
}

pub fn cnt2_at_level_with(sys: &System, level: usize, cfg: &MeasureConfig) -> Result<f64> {
    require_valid(sys)?;
    if level < 1 || level > sys.max_bunch_size() {
        return Err(Error::Domain(format!(
            "level {level} outside 1..={}",
            sys.max_bunch_size()
        )));
    }
    let idx = index_outcomes(sys, cfg.slot_cap)?;
    let lp = lp_cnt2_level(sys, &idx, level)?;
    clamp_measure(
        run_lp(&lp, cfg, &format!("cnt2_l{level}"), None)?,
        cfg.tol,
        "cnt2",
    )
}

/// CNT₃: minimal total variation of a signed measure under (A) and (B),
/// minus 1.
pub fn cnt3(sys: &System) -> Result<f64> {
    cnt3_with(sys, &MeasureConfig::default())
}

pub fn cnt3_with(sys: &System, cfg: &MeasureConfig) -> Result<f64> {
    require_valid(sys)?;
    let idx = index_outcomes(sys, cfg.slot_cap)?;
    let lp = lp_cnt3(sys, &idx)?;
    clamp_measure(run_lp(&lp, cfg, "cnt3", None)? - 1.0, cfg.tol, "cnt3")
}

/// CNTF: 1 minus the maximal mass of a subnormalized diagonal measure
/// dominated by the bunch distributions.
pub fn cntf(sys: &System) -> Result<f64> {
    cntf_with(sys, &MeasureConfig::default())
}

pub fn cntf_with(sys: &System, cfg: &MeasureConfig) -> Result<f64> {
    require_valid(sys)?;
    let lp = lp_cntf_reduced(sys, cfg.slot_cap)?;
    clamp_measure(1.0 - run_lp(&lp, cfg, "cntf", None)?, cfg.tol, "cntf")
}

/// Smallest level at which CNT₂ᵐ exceeds `tol`, or `None`.
pub fn contextual_level(sys: &System, tol: f64) -> Result<Option<usize>> {
    let cfg = MeasureConfig {
        tol,
        ..MeasureConfig::default()
    };
    let report = all_measures_with(sys, &cfg)?;
    Ok(report.level)
}

/// Compute every measure, sharing one validation pass and outcome indexer.
pub fn all_measures(sys: &System) -> Result<MeasureReport> {
    all_measures_with(sys, &MeasureConfig::default())
}

pub fn all_measures_with(sys: &System, cfg: &MeasureConfig) -> Result<MeasureReport> {
    require_valid(sys)?;
    let idx = index_outcomes(sys, cfg.slot_cap)?;
    let mut diag = Diagnostics {
        consistent: true,
        ..Diagnostics::default()
    };

    let cnt1 = clamp_measure(
        run_lp(&lp_cnt1(sys, &idx)?, cfg, "cnt1", Some(&mut diag))?,
        cfg.tol,
        "cnt1",
    )?;

    let max_level = sys.max_bunch_size();
    let mut cnt2_by_level = Vec::with_capacity(max_level);
    for m in 1..=max_level {
        let lp = lp_cnt2_level(sys, &idx, m)?;
        let v = clamp_measure(
            run_lp(&lp, cfg, &format!("cnt2_l{m}"), Some(&mut diag))?,
            cfg.tol,
            "cnt2",
        )?;
        cnt2_by_level.push(v);
    }
    let cnt2 = *cnt2_by_level.last().expect("at least one level");
    let level = (1..=max_level).find(|&m| cnt2_by_level[m - 1] > cfg.tol);

    let cnt3 = clamp_measure(
        run_lp(&lp_cnt3(sys, &idx)?, cfg, "cnt3", Some(&mut diag))? - 1.0,
        cfg.tol,
        "cnt3",
    )?;

    let cntf = clamp_measure(
        1.0 - run_lp(&lp_cntf_reduced(sys, cfg.slot_cap)?, cfg, "cntf", Some(&mut diag))?,
        cfg.tol,
        "cntf",
    )?;

    let flags = [cnt1 > cfg.tol, cnt2 > cfg.tol, cnt3 > cfg.tol, cntf > cfg.tol];
    let contextual = flags.iter().any(|&f| f);
    if flags.iter().any(|&f| f != flags[0]) {
        diag.consistent = false;
        diag.notes.push(format!(
            "CONSISTENCY: positivity disagreement at tol {}: cnt1 {cnt1}, cnt2 {cnt2}, cnt3 {cnt3}, cntf {cntf}",
            cfg.tol
        ));
    }

    Ok(MeasureReport {
        cnt1,
        cnt2,
        cnt3,
        cntf,
        total_variation: cnt3 + 1.0,
        mass: 1.0 - cntf,
        cnt2_by_level,
        level,
        contextual,
        tol: cfg.tol,
        diagnostics: diag,
    })
}

/// True iff any of the four measures exceeds `tol`. Positivity
/// disagreements between the measures are recorded as a CONSISTENCY note
/// in the report's diagnostics.
pub fn is_contextual(sys: &System, tol: f64) -> Result<bool> {
    let cfg = MeasureConfig {
        tol,
        ..MeasureConfig::default()
    };
    Ok(all_measures_with(sys, &cfg)?.contextual)
}

/// The closed-form contextuality criterion for cyclic (order-2) systems.
///
/// With variables recoded to ±1, let `c_i` be the within-context product
/// expectation of context `i` and ICC the summed connection expectation
/// gaps. Then `Δ = s_odd(c) − (n − 2) − ICC`, where `s_odd` is the maximal
/// odd-negative signed sum, and the system is contextual iff Δ > 0.
pub fn cyclic_delta(sys: &System) -> Result<f64> {
    require_valid(sys)?;
    let n = sys.contexts.len();
    if n < 2 || sys.contents.len() != n {
        return Err(Error::NotCyclic(format!(
            "need rank >= 2 with equal content and context counts, got {} contents, {n} contexts",
            sys.contents.len()
        )));
    }
    for (i, ctx) in sys.contexts.iter().enumerate() {
        let expect = [
            sys.contents[i].clone(),
            sys.contents[(i + 1) % n].clone(),
        ];
        if ctx.contents != expect {
            return Err(Error::NotCyclic(format!(
                "context `{}` measures {:?}, expected {:?} in cyclic arrangement",
                ctx.id, ctx.contents, expect
            )));
        }
    }

    // c_i = E[σ_i σ_{i⊕1}] in context i: P(equal) − P(different)
    let mut corr = Vec::with_capacity(n);
    for ctx in &sys.contexts {
        let p = &ctx.pmf;
        corr.push((p[0] + p[3]) - (p[1] + p[2]));
    }

    // ICC: content q_j appears first in context j, second in context j⊖1
    let mut icc = 0.0;
    for j in 0..n {
        let q = &sys.contents[j];
        let first = variable_prob(sys, q, &sys.contexts[j].id)?;
        let prev = (j + n - 1) % n;
        let second = variable_prob(sys, q, &sys.contexts[prev].id)?;
        icc += (2.0 * first - 1.0 - (2.0 * second - 1.0)).abs();
    }

    let abs_sum: f64 = corr.iter().map(|c| c.abs()).sum();
    let negatives = corr.iter().filter(|&&c| c < 0.0).count();
    let s_odd = if negatives % 2 == 1 {
        abs_sum
    } else {
        let min_abs = corr.iter().map(|c| c.abs()).fold(f64::INFINITY, f64::min);
        abs_sum - 2.0 * min_abs
    };

    Ok(s_odd - (n as f64 - 2.0) - icc)
}
