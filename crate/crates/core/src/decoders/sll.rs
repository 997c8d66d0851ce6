//! Sum-log-likelihood lower bounds: the sphere-decoder branch bound and the
//! whole-codeword distance bound.

use alloc::vec;

use super::search::{sequential_metric, trellis_search, SearchOptions};
use super::{check_rx, finish, state_points, DecodeResult};
use crate::channel::{ReceivedSequence, SymbolMapper};
use crate::convcode::{ConvCode, Message, Trellis};
use crate::metrics::{negative_sll, squared_distance, CompensatedSum, PathMetric};
use crate::{Error, Result};

/// Pair states allowed in the distance-bound search.
const PAIR_BUDGET: usize = 1 << 22;

/// `sum_{d=0}^{m} ||r[d] - g(y~[d])||^2` where `y~` is the output of the
/// partial message (symbols past its end are taken as zero). Every
/// completion of the prefix has a negative SLL at least this large. `m < 0`
/// gives the empty sum.
pub fn sphere_branch_lower_bound(
    rx: &ReceivedSequence,
    partial: &Message,
    m: isize,
    code: &ConvCode,
    mapper: &SymbolMapper,
) -> Result<PathMetric> {
    if m < 0 {
        return Ok(PathMetric(0.0));
    }
    let m = m as usize;
    if m >= rx.len() || rx.n() != code.n() || partial.k() != code.k() {
        return Err(Error::contract(alloc::format!(
            "prefix bound up to index {m} does not fit a {}x{} observation",
            rx.len(),
            rx.n()
        )));
    }
    let points = state_points(code, mapper);
    let n = code.n();
    let q = code.q();
    let mut state = 0usize;
    let mut acc = CompensatedSum::default();
    for d in 0..=m {
        state = code.next_state(state, partial.symbol_index(d as isize, q) as usize);
        acc.add(squared_distance(rx.at(d), &points[state * n..(state + 1) * n]));
    }
    Ok(PathMetric(acc.value()))
}

/// Viterbi search that skips every state whose best prefix metric (the
/// sphere branch bound of that prefix) strictly exceeds the metric of
/// `guess`. The ML path is never pruned, so the output stays exact.
pub fn sll_augmented_viterbi(
    rx: &ReceivedSequence,
    trellis: &Trellis,
    mapper: &SymbolMapper,
    guess: &Message,
) -> Result<DecodeResult> {
    check_rx(rx, trellis, mapper)?;
    let code = trellis.code();
    if guess.len() != trellis.message_len() || guess.k() != code.k() {
        return Err(Error::contract("guess does not match the trellis length"));
    }
    // the guess is compared in the same arithmetic as the survivors
    let points = state_points(code, mapper);
    let threshold = sequential_metric(rx, &code.state_indices(guess), &points, code.n());
    let opts = SearchOptions {
        prune_above: Some(threshold),
        ..SearchOptions::default()
    };
    let outcome = trellis_search(rx, trellis, mapper, &opts)?;
    let message = code.message_from_states(&outcome.states, trellis.message_len());
    finish(code, rx, mapper, message, outcome.stats, true)
}

/// Minimum of `sum_d ||g(y~[d]) - g(y[d])||^2` over pairs of distinct
/// codewords of messages of length `len`.
///
/// Runs a shortest-path search on the product trellis. Pairs are tracked
/// rather than distances to the zero codeword because a non-binary symbol
/// map need not be translation invariant.
pub fn codeword_distance_bound(code: &ConvCode, len: usize, mapper: &SymbolMapper) -> Result<f64> {
    if len == 0 {
        return Err(Error::contract("message length must be positive"));
    }
    if mapper.q() != code.q() {
        return Err(Error::contract("symbol map does not match the code field"));
    }
    let s = code.num_states();
    let pairs = s.checked_mul(s).filter(|&p| p <= PAIR_BUDGET).ok_or(Error::Budget {
        what: "pair-trellis states",
        required: (s as u128) * (s as u128),
        allowed: PAIR_BUDGET as u128,
    })?;
    let points = state_points(code, mapper);
    let n = code.n();
    let qk = code.input_alphabet();
    let dist = |a: usize, b: usize| squared_distance(&points[a * n..(a + 1) * n], &points[b * n..(b + 1) * n]);

    // cost[(flag * S + a) * S + b]; flag = messages already differ
    let mut cur = vec![f64::INFINITY; 2 * pairs];
    let mut next = vec![f64::INFINITY; 2 * pairs];
    for x in 0..qk {
        for y in 0..qk {
            let flag = usize::from(x != y);
            let slot = (flag * s + x) * s + y;
            cur[slot] = cur[slot].min(dist(x, y));
        }
    }
    let span = len + code.nu() - 1;
    for d in 1..span {
        let inputs = if d < len { qk } else { 1 };
        next.iter_mut().for_each(|c| *c = f64::INFINITY);
        for flag in 0..2 {
            for a in 0..s {
                for b in 0..s {
                    let base = cur[(flag * s + a) * s + b];
                    if !base.is_finite() {
                        continue;
                    }
                    for x in 0..inputs {
                        let na = code.next_state(a, x);
                        for y in 0..inputs {
                            let nb = code.next_state(b, y);
                            let nf = flag | usize::from(x != y);
                            let slot = (nf * s + na) * s + nb;
                            let c = base + dist(na, nb);
                            if c < next[slot] {
                                next[slot] = c;
                            }
                        }
                    }
                }
            }
        }
        core::mem::swap(&mut cur, &mut next);
    }
    let best = cur[pairs..].iter().copied().fold(f64::INFINITY, f64::min);
    Ok(best)
}

/// Certifies `guess` as ML when its negative SLL `S` satisfies
/// `S < (sqrt(D) - sqrt(S))^2`, i.e. `4 S < D`, where `D` is the codeword
/// distance bound. Any other codeword is at distance at least `sqrt(D)`
/// from the guess, hence at least `sqrt(D) - sqrt(S)` from `r`. A `false`
/// result is inconclusive.
pub fn whole_codeword_optimality_test(
    rx: &ReceivedSequence,
    guess: &Message,
    bound: f64,
    code: &ConvCode,
    mapper: &SymbolMapper,
) -> Result<bool> {
    let cw = code.encode(guess)?;
    let s = negative_sll(rx, &cw, mapper)?.value();
    Ok(4.0 * s < bound)
}
