use alloc::vec;
use alloc::vec::Vec;

use super::{check_rx, finish, state_points, ComplexityStats, DecodeResult};
use crate::channel::{ReceivedSequence, SymbolMapper};
use crate::convcode::{ConvCode, Message, Trellis};
use crate::metrics::squared_distance;
use crate::{Error, Result};

/// Default cap on the number of enumerated messages.
pub const DEFAULT_MESSAGE_BUDGET: u128 = 1 << 20;

struct Enumeration<'a> {
    code: &'a ConvCode,
    rx: &'a ReceivedSequence,
    points: Vec<f64>,
    len: usize,
    prefix: Vec<u32>,
    best: Option<(f64, Vec<u32>)>,
    expanded: u64,
}

impl Enumeration<'_> {
    fn branch(&self, d: usize, state: usize) -> f64 {
        let n = self.code.n();
        squared_distance(self.rx.at(d), &self.points[state * n..(state + 1) * n])
    }

    /// Depth-first walk in increasing symbol order, so the first message
    /// reaching a metric is the lexicographically smallest one with it.
    fn walk(&mut self, d: usize, state: usize, acc: f64) {
        if d == self.len {
            let mut acc = acc;
            let mut s = state;
            for t in self.len..self.len + self.code.nu() - 1 {
                s = self.code.next_state(s, 0);
                acc += self.branch(t, s);
            }
            if self.best.as_ref().is_none_or(|(m, _)| acc < *m) {
                self.best = Some((acc, self.prefix.clone()));
            }
            return;
        }
        for input in 0..self.code.input_alphabet() {
            let next = self.code.next_state(state, input);
            self.expanded += 1;
            let acc2 = acc + self.branch(d, next);
            self.prefix.push(input as u32);
            self.walk(d + 1, next, acc2);
            self.prefix.pop();
        }
    }
}

/// Exhaustive ML decoding over all `q^(kN)` messages. The search refuses to
/// start when that count exceeds `budget`.
pub fn brute_force_ml(
    rx: &ReceivedSequence,
    code: &ConvCode,
    mapper: &SymbolMapper,
    len: usize,
    budget: u128,
) -> Result<DecodeResult> {
    let trellis = Trellis::new(code, len, usize::MAX)?;
    check_rx(rx, &trellis, mapper)?;
    let required = (code.input_alphabet() as u128)
        .checked_pow(len as u32)
        .unwrap_or(u128::MAX);
    if required > budget {
        return Err(Error::Budget {
            what: "brute-force message enumeration",
            required,
            allowed: budget,
        });
    }
    let mut e = Enumeration {
        code,
        rx,
        points: state_points(code, mapper),
        len,
        prefix: Vec::with_capacity(len),
        best: None,
        expanded: 0,
    };
    e.walk(0, 0, 0.0);
    let (_, indices) = e.best.unwrap_or((0.0, vec![0; len]));
    let message = Message::from_symbol_indices(code.k(), code.q(), &indices);
    let stats = ComplexityStats {
        visited_states: e.expanded,
        time_span: trellis.span(),
        message_len: len,
    };
    finish(code, rx, mapper, message, stats, true)
}
