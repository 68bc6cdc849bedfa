//! Outcome-space indexing and construction of the measure linear programs.

mod build;
mod indexer;
mod program;

pub use build::{
    constraints_a, constraints_b, lp_cnt1, lp_cnt2_level, lp_cnt3, lp_cntf_full,
    lp_cntf_reduced, EqualityTarget,
};
pub use indexer::{index_outcomes, OutcomeIndexer, DEFAULT_SLOT_CAP};
pub use program::{LinearProgram, Relation, Row, Sense};
