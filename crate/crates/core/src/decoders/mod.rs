//! Decoding algorithms and optimality tests for convolutional codes.
//!
//! Every decoder reports how many Markov states it expanded so complexity
//! can be compared across algorithms. Messages are ordered
//! lexicographically by their per-time symbol indices; whenever two
//! candidates have exactly equal metrics the smaller one wins, so all exact
//! decoders return the same message.

use alloc::vec::Vec;

use crate::channel::{ReceivedSequence, SymbolMapper};
use crate::convcode::{ConvCode, Message, Trellis};
use crate::metrics::{negative_sll, PathMetric};
use crate::{Error, Result};

mod brute;
mod nll;
mod search;
mod sll;
mod suboptimal;
mod three_step;

pub use brute::{brute_force_ml, DEFAULT_MESSAGE_BUDGET};
pub use nll::{build_symbol_sets, nll_confirm, Boundary, ConditionA, NllParams};
pub use sll::{
    codeword_distance_bound, sll_augmented_viterbi, sphere_branch_lower_bound,
    whole_codeword_optimality_test,
};
pub use suboptimal::{suboptimal_decode, Strategy};
pub use three_step::{modified_viterbi, three_step_decode, ThreeStepReport};

/// Budget for symbol-alphabet enumerations done by decoders.
pub(crate) const ALPHABET_BUDGET: usize = 1 << 16;

/// Visited-state accounting of one decode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexityStats {
    /// Markov states expanded.
    pub visited_states: u64,
    /// Number of trellis time indices (`N + nu - 1`).
    pub time_span: usize,
    /// Message length `N`.
    pub message_len: usize,
}

impl ComplexityStats {
    /// Visited states per message symbol.
    pub fn normalized(&self) -> f64 {
        if self.message_len == 0 {
            return 0.0;
        }
        self.visited_states as f64 / self.message_len as f64
    }
}

/// Output of a decoder.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    pub message: Message,
    /// Negative SLL of the encoded message.
    pub metric: PathMetric,
    pub stats: ComplexityStats,
    /// True when the algorithm guarantees an ML output.
    pub certified_ml: bool,
}

/// Admissible source symbols per time index: either one confirmed symbol
/// or the whole alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolSetSequence {
    sets: Vec<Option<u32>>,
    alphabet: usize,
}

impl SymbolSetSequence {
    /// Every index admits the whole alphabet.
    pub fn full(len: usize, alphabet: usize) -> Self {
        SymbolSetSequence {
            sets: alloc::vec![None; len],
            alphabet,
        }
    }

    /// Every index is confirmed to the symbol of `msg`.
    pub fn singletons(msg: &Message, q: u32, alphabet: usize) -> Self {
        SymbolSetSequence {
            sets: msg.symbol_indices(q).into_iter().map(Some).collect(),
            alphabet,
        }
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn confirm(&mut self, d: usize, symbol: u32) {
        self.sets[d] = Some(symbol);
    }

    /// The confirmed symbol at `d`, if any.
    pub fn confirmed(&self, d: usize) -> Option<u32> {
        self.sets[d]
    }

    /// Size of `X[d]`.
    pub fn set_size(&self, d: usize) -> usize {
        if self.sets[d].is_some() {
            1
        } else {
            self.alphabet
        }
    }

    /// Whether `symbol` belongs to `X[d]`; indices outside the message only
    /// admit the zero symbol.
    #[inline]
    pub fn contains(&self, d: isize, symbol: usize) -> bool {
        if d < 0 || d as usize >= self.sets.len() {
            return symbol == 0;
        }
        self.sets[d as usize].is_none_or(|s| s as usize == symbol)
    }

    pub fn singleton_count(&self) -> usize {
        self.sets.iter().filter(|s| s.is_some()).count()
    }

    pub fn singleton_fraction(&self) -> f64 {
        if self.sets.is_empty() {
            return 0.0;
        }
        self.singleton_count() as f64 / self.sets.len() as f64
    }
}

pub(crate) fn check_rx(rx: &ReceivedSequence, trellis: &Trellis, mapper: &SymbolMapper) -> Result<()> {
    let code = trellis.code();
    if rx.n() != code.n() || rx.len() != trellis.span() {
        return Err(Error::contract(alloc::format!(
            "received sequence is {}x{}, trellis expects {}x{}",
            rx.len(),
            rx.n(),
            trellis.span(),
            code.n()
        )));
    }
    if mapper.q() != code.q() {
        return Err(Error::contract(alloc::format!(
            "symbol map has {} entries for GF({})",
            mapper.q(),
            code.q()
        )));
    }
    Ok(())
}

/// Real signal point of every Markov state, `n` reals per state.
pub(crate) fn state_points(code: &ConvCode, mapper: &SymbolMapper) -> Vec<f64> {
    let mut out = Vec::with_capacity(code.num_states() * code.n());
    for s in 0..code.num_states() {
        out.extend(code.output_symbol(s).into_iter().map(|v| mapper.map(v)));
    }
    out
}

pub(crate) fn finish(
    code: &ConvCode,
    rx: &ReceivedSequence,
    mapper: &SymbolMapper,
    message: Message,
    stats: ComplexityStats,
    certified_ml: bool,
) -> Result<DecodeResult> {
    let cw = code.encode(&message)?;
    let metric = negative_sll(rx, &cw, mapper)?;
    Ok(DecodeResult {
        message,
        metric,
        stats,
        certified_ml,
    })
}

/// Full Viterbi search: expands every reachable state, keeping for each the
/// best incoming path (ties to the lexicographically smaller message).
pub fn viterbi_decode(rx: &ReceivedSequence, trellis: &Trellis, mapper: &SymbolMapper) -> Result<DecodeResult> {
    check_rx(rx, trellis, mapper)?;
    let outcome = search::trellis_search(rx, trellis, mapper, &search::SearchOptions::default())?;
    let message = trellis.code().message_from_states(&outcome.states, trellis.message_len());
    finish(trellis.code(), rx, mapper, message, outcome.stats, true)
}

#[cfg(test)]
mod tests;
