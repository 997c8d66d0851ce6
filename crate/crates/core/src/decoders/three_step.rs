//! Suboptimal guess, NLL confirmation, then a Viterbi search restricted to
//! the unconfirmed symbols.

use super::nll::window_count;
use super::search::{trellis_search, SearchOptions};
use super::suboptimal::suboptimal_decode_with_stats;
use super::{build_symbol_sets, check_rx, finish, DecodeResult, NllParams, Strategy, SymbolSetSequence};
use crate::channel::{ReceivedSequence, SymbolMapper};
use crate::convcode::{Message, Trellis};
use crate::{Error, Result};

/// Viterbi search visiting a state only if all its source symbols lie in
/// the given sets.
pub fn modified_viterbi(
    rx: &ReceivedSequence,
    trellis: &Trellis,
    mapper: &SymbolMapper,
    sets: &SymbolSetSequence,
) -> Result<DecodeResult> {
    check_rx(rx, trellis, mapper)?;
    if sets.len() != trellis.message_len() {
        return Err(Error::contract(alloc::format!(
            "{} symbol sets for a message of length {}",
            sets.len(),
            trellis.message_len()
        )));
    }
    let opts = SearchOptions {
        allowed: Some(sets),
        ..SearchOptions::default()
    };
    let outcome = trellis_search(rx, trellis, mapper, &opts)?;
    let code = trellis.code();
    let message = code.message_from_states(&outcome.states, trellis.message_len());
    finish(code, rx, mapper, message, outcome.stats, true)
}

/// Everything produced by [`three_step_decode`].
#[derive(Debug, Clone, PartialEq)]
pub struct ThreeStepReport {
    /// Final ML decision; its stats are those of the restricted search.
    pub decode: DecodeResult,
    /// Output of the suboptimal decoder.
    pub guess: Message,
    pub sets: SymbolSetSequence,
    /// States expanded by the suboptimal decoder.
    pub step1_visited: u64,
    /// Confirmation windows evaluated.
    pub step2_windows: u64,
}

pub fn three_step_decode(
    rx: &ReceivedSequence,
    trellis: &Trellis,
    mapper: &SymbolMapper,
    params: &NllParams,
    strategy: Strategy,
) -> Result<ThreeStepReport> {
    let code = trellis.code();
    if params.nu() != code.nu() {
        return Err(Error::config(alloc::format!(
            "NLL parameters are for nu = {}, code has nu = {}",
            params.nu(),
            code.nu()
        )));
    }
    let (guess, step1) = suboptimal_decode_with_stats(rx, trellis, mapper, strategy)?;
    let sets = build_symbol_sets(rx, &guess, params, code, mapper)?;
    let decode = modified_viterbi(rx, trellis, mapper, &sets)?;
    Ok(ThreeStepReport {
        decode,
        guess,
        sets,
        step1_visited: step1.visited_states,
        step2_windows: window_count(trellis.message_len(), code.nu()),
    })
}
