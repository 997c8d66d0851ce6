//! Survivor-based trellis search shared by the Viterbi-family decoders.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use super::{state_points, ComplexityStats, SymbolSetSequence};
use crate::channel::{ReceivedSequence, SymbolMapper};
use crate::convcode::Trellis;
use crate::metrics::squared_distance;
use crate::{Error, Result};

const NONE: u32 = u32::MAX;

/// Restrictions applied on top of the plain Viterbi recursion.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct SearchOptions<'a> {
    /// Only states whose source symbols all lie in these sets are visited.
    pub allowed: Option<&'a SymbolSetSequence>,
    /// States whose survivor metric strictly exceeds this are not expanded.
    pub prune_above: Option<f64>,
    /// Keep at most this many states per time index (best metrics first).
    pub beam: Option<usize>,
}

pub(crate) struct SearchOutcome {
    pub states: Vec<usize>,
    pub stats: ComplexityStats,
}

struct Survivors {
    /// `back[d * S + s]`: predecessor of state `s` at time `d`.
    back: Vec<u32>,
    num_states: usize,
    input_alphabet: usize,
}

impl Survivors {
    #[inline]
    fn pred(&self, d: usize, s: usize) -> usize {
        self.back[d * self.num_states + s] as usize
    }

    /// Lexicographic comparison of the messages of the survivor paths
    /// ending in states `a` and `b` at time `d`.
    fn cmp_paths(&self, d: usize, a: usize, b: usize) -> Ordering {
        let (mut a, mut b, mut t) = (a, b, d);
        let mut first = Ordering::Equal;
        loop {
            if a == b {
                break;
            }
            // the paths differ at t; the earliest such t decides
            first = (a % self.input_alphabet).cmp(&(b % self.input_alphabet));
            if t == 0 {
                break;
            }
            a = self.pred(t, a);
            b = self.pred(t, b);
            t -= 1;
        }
        first
    }
}

#[inline]
fn state_allowed(trellis: &Trellis, sets: Option<&SymbolSetSequence>, d: usize, state: usize) -> bool {
    let Some(sets) = sets else {
        return true;
    };
    let code = trellis.code();
    let qk = code.input_alphabet();
    let mut s = state;
    for j in 0..code.nu() {
        if !sets.contains(d as isize - j as isize, s % qk) {
            return false;
        }
        s /= qk;
    }
    true
}

pub(crate) fn trellis_search(
    rx: &ReceivedSequence,
    trellis: &Trellis,
    mapper: &SymbolMapper,
    opts: &SearchOptions<'_>,
) -> Result<SearchOutcome> {
    let code = trellis.code();
    let points = state_points(code, mapper);
    let n = code.n();
    let num_states = code.num_states();
    let span = trellis.span();
    let point = |s: usize| &points[s * n..(s + 1) * n];

    let mut surv = Survivors {
        back: vec![NONE; span * num_states],
        num_states,
        input_alphabet: code.input_alphabet(),
    };
    let mut cur = vec![f64::INFINITY; num_states];
    let mut next = vec![f64::INFINITY; num_states];
    let mut live: Vec<usize> = Vec::with_capacity(num_states);
    let mut visited: u64 = 0;

    for edge in trellis.initial_edges() {
        if state_allowed(trellis, opts.allowed, 0, edge.next) {
            cur[edge.next] = squared_distance(rx.at(0), point(edge.next));
            surv.back[edge.next] = 0;
        }
    }

    for d in 0..span {
        live.clear();
        live.extend((0..num_states).filter(|&s| cur[s].is_finite()));
        if let Some(limit) = opts.prune_above {
            live.retain(|&s| cur[s] <= limit);
        }
        if let Some(width) = opts.beam {
            if live.len() > width {
                live.sort_by(|&a, &b| {
                    cur[a]
                        .partial_cmp(&cur[b])
                        .unwrap_or(Ordering::Equal)
                        .then_with(|| surv.cmp_paths(d, a, b))
                });
                live.truncate(width);
            }
        }
        if live.is_empty() {
            return Err(Error::contract(alloc::format!(
                "no admissible state left at time index {d}"
            )));
        }
        visited += live.len() as u64;
        if d + 1 == span {
            break;
        }

        next.iter_mut().for_each(|m| *m = f64::INFINITY);
        let r = rx.at(d + 1);
        let row = (d + 1) * num_states;
        for &s in &live {
            let base = cur[s];
            for edge in trellis.edges(d, s) {
                let t = edge.next;
                if !state_allowed(trellis, opts.allowed, d + 1, t) {
                    continue;
                }
                let cand = base + squared_distance(r, point(t));
                let better = if cand < next[t] {
                    true
                } else if cand == next[t] {
                    surv.cmp_paths(d, s, surv.back[row + t] as usize) == Ordering::Less
                } else {
                    false
                };
                if better {
                    next[t] = cand;
                    surv.back[row + t] = s as u32;
                }
            }
        }
        core::mem::swap(&mut cur, &mut next);
    }

    let last = span - 1;
    let mut best = live[0];
    for &s in &live[1..] {
        let ord = cur[s]
            .partial_cmp(&cur[best])
            .unwrap_or(Ordering::Equal)
            .then_with(|| surv.cmp_paths(last, s, best));
        if ord == Ordering::Less {
            best = s;
        }
    }

    let mut states = vec![0usize; span];
    states[last] = best;
    for t in (1..span).rev() {
        states[t - 1] = surv.pred(t, states[t]);
    }
    Ok(SearchOutcome {
        states,
        stats: ComplexityStats {
            visited_states: visited,
            time_span: span,
            message_len: trellis.message_len(),
        },
    })
}

/// Metric of a state path accumulated left to right, in the same order as
/// the survivor recursion so that equal paths give bit-identical sums.
pub(crate) fn sequential_metric(rx: &ReceivedSequence, states: &[usize], points: &[f64], n: usize) -> f64 {
    let mut acc = 0.0;
    for (d, &s) in states.iter().enumerate() {
        acc += squared_distance(rx.at(d), &points[s * n..(s + 1) * n]);
    }
    acc
}
