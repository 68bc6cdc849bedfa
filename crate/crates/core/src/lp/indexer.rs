//! Bijection between joint coupling outcomes and bit patterns.

use crate::error::{Error, Result};
use crate::system::System;

/// Default cap on the number of slots (coupling variables); 2^24 outcome
/// columns is the largest program the default configuration will build.
pub const DEFAULT_SLOT_CAP: usize = 24;

/// Assigns one bit slot to every `(context, content)` variable of a system.
///
/// Slots are ordered context by context (declaration order), contents in
/// bunch order within each context. Slot 0 is the most significant bit of
/// the outcome index `ω ∈ [0, 2^N)`.
#[derive(Debug, Clone)]
pub struct OutcomeIndexer {
    /// (context index, global content index) per slot.
    slots: Vec<(usize, usize)>,
    /// `context_slots[ci]` lists the slots of context `ci` in bunch order.
    context_slots: Vec<Vec<usize>>,
    num_slots: usize,
}

impl OutcomeIndexer {
    /// Total number of slots N.
    pub fn num_slots(&self) -> usize {
        self.num_slots
    }

    /// Number of outcomes 2^N.
    pub fn num_outcomes(&self) -> usize {
        1usize << self.num_slots
    }

    /// The `(context index, content index)` pair owning a slot.
    pub fn slot(&self, s: usize) -> (usize, usize) {
        self.slots[s]
    }

    /// Slot of content `q` (global index) within context `ci`, if measured.
    pub fn slot_of(&self, ci: usize, q: usize) -> Option<usize> {
        self.context_slots[ci]
            .iter()
            .copied()
            .find(|&s| self.slots[s].1 == q)
    }

    /// Slots of a context's bunch in bunch order.
    pub fn context_slots(&self, ci: usize) -> &[usize] {
        &self.context_slots[ci]
    }

    /// The value of `slot` in outcome `ω` (slot 0 = most significant bit).
    #[inline]
    pub fn bit(&self, omega: usize, slot: usize) -> usize {
        (omega >> (self.num_slots - 1 - slot)) & 1
    }

    /// Single-bit mask selecting `slot` within an outcome index.
    #[inline]
    pub fn mask(&self, slot: usize) -> usize {
        1usize << (self.num_slots - 1 - slot)
    }

    /// The bunch atom (first bunch content = most significant bit) that
    /// outcome `ω` induces in context `ci`.
    #[inline]
    pub fn context_atom(&self, omega: usize, ci: usize) -> usize {
        let slots = &self.context_slots[ci];
        let k = slots.len();
        let mut atom = 0usize;
        for (j, &s) in slots.iter().enumerate() {
            atom |= self.bit(omega, s) << (k - 1 - j);
        }
        atom
    }
}

/// Build the outcome indexer for a system, rejecting systems whose slot
/// count exceeds `cap`.
pub fn index_outcomes(sys: &System, cap: usize) -> Result<OutcomeIndexer> {
    let mut slots = Vec::new();
    let mut context_slots = Vec::with_capacity(sys.contexts.len());
    for (ci, c) in sys.contexts.iter().enumerate() {
        let mut mine = Vec::with_capacity(c.contents.len());
        for q in &c.contents {
            let qi = sys
                .content_index(q)
                .ok_or_else(|| Error::InvalidSystem(format!("unknown content `{q}`")))?;
            mine.push(slots.len());
            slots.push((ci, qi));
        }
        context_slots.push(mine);
    }
    let n = slots.len();
    if n > cap {
        return Err(Error::TooLarge { slots: n, cap });
    }
    Ok(OutcomeIndexer {
        slots,
        context_slots,
        num_slots: n,
    })
}
