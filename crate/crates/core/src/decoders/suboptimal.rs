//! Cheap non-ML decoders used to produce the initial guess.

use alloc::vec::Vec;

use super::search::{trellis_search, SearchOptions};
use super::{check_rx, state_points, ComplexityStats};
use crate::channel::{ReceivedSequence, SymbolMapper};
use crate::convcode::{Message, Trellis};
use crate::metrics::squared_distance;
use crate::{Error, Result};

/// Suboptimal decoding strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Pick each symbol greedily from the current branch metric given the
    /// symbols already decided. Needs `G[0]` of full row rank.
    #[default]
    DecisionFeedback,
    /// Breadth-first beam keeping the `L` best trellis states per index.
    List(usize),
}

/// Decodes without any optimality guarantee.
pub fn suboptimal_decode(
    rx: &ReceivedSequence,
    trellis: &Trellis,
    mapper: &SymbolMapper,
    strategy: Strategy,
) -> Result<Message> {
    suboptimal_decode_with_stats(rx, trellis, mapper, strategy).map(|(m, _)| m)
}

pub(crate) fn suboptimal_decode_with_stats(
    rx: &ReceivedSequence,
    trellis: &Trellis,
    mapper: &SymbolMapper,
    strategy: Strategy,
) -> Result<(Message, ComplexityStats)> {
    check_rx(rx, trellis, mapper)?;
    let code = trellis.code();
    let len = trellis.message_len();
    match strategy {
        Strategy::DecisionFeedback => {
            if !code.leading_tap_full_rank() {
                return Err(Error::config(
                    "decision feedback needs G[0] of full row rank; use the list strategy",
                ));
            }
            let points = state_points(code, mapper);
            let n = code.n();
            let mut state = 0usize;
            let mut indices = Vec::with_capacity(len);
            for d in 0..len {
                let mut best = (f64::INFINITY, 0usize, 0usize);
                for input in 0..code.input_alphabet() {
                    let next = code.next_state(state, input);
                    let bm = squared_distance(rx.at(d), &points[next * n..(next + 1) * n]);
                    if bm < best.0 {
                        best = (bm, input, next);
                    }
                }
                indices.push(best.1 as u32);
                state = best.2;
            }
            let stats = ComplexityStats {
                visited_states: len as u64,
                time_span: trellis.span(),
                message_len: len,
            };
            Ok((Message::from_symbol_indices(code.k(), code.q(), &indices), stats))
        }
        Strategy::List(width) => {
            if width == 0 {
                return Err(Error::config("list strategy needs L >= 1"));
            }
            let opts = SearchOptions {
                beam: Some(width),
                ..SearchOptions::default()
            };
            let outcome = trellis_search(rx, trellis, mapper, &opts)?;
            Ok((code.message_from_states(&outcome.states, len), outcome.stats))
        }
    }
}
