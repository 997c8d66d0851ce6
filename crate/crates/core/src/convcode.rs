//! Convolutional codes over GF(q): generator matrices, encoding, the
//! Markov-state view and the trellis used by every decoder.
//!
//! Symbols are handled through integer indices. A `k`-dimensional source
//! symbol `[v_0, .., v_{k-1}]` has index `sum v_i q^i`; the same encoding is
//! used for `n`-dimensional codeword symbols. A Markov state at time `d` is
//! the window `[x[d-nu+1], .., x[d]]`; its index uses base `q^k` digits with
//! digit `j` holding the symbol index of `x[d-j]`, so the newest symbol is the
//! least significant digit.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::galois::{FieldElement, PrimeField};
use crate::{Error, Result};

/// Default cap on the number of Markov states `q^(k nu)`.
pub const DEFAULT_STATE_BUDGET: usize = 1 << 16;

/// A convolutional code `G(D) = G[0] + G[1] D + .. + G[nu-1] D^(nu-1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvCode {
    field: PrimeField,
    k: usize,
    n: usize,
    nu: usize,
    /// `taps[(l * k + i) * n + j]` is entry `(i, j)` of `G[l]`.
    taps: Vec<u32>,
    input_alphabet: usize,
    output_alphabet: usize,
    num_states: usize,
    state_outputs: Vec<u32>,
}

/// Source message: `N` symbols of dimension `k`, zero outside `[0, N)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Message {
    k: usize,
    values: Vec<u32>,
}

/// Encoded message: `N + nu - 1` symbols of dimension `n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Codeword {
    n: usize,
    values: Vec<u32>,
}

/// A Markov state, identified by its index (see the module docs).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MarkovState(pub usize);

fn checked_pow(base: usize, exp: usize) -> Option<usize> {
    let mut acc: usize = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

fn digits_to_index(values: &[u32], q: u32) -> u32 {
    values.iter().rev().fold(0u32, |acc, &v| acc * q + v)
}

fn index_to_digits(mut index: u32, q: u32, out: &mut [u32]) {
    for slot in out.iter_mut() {
        *slot = index % q;
        index /= q;
    }
}

impl Message {
    /// Builds a message from `N * k` row-major symbol values.
    pub fn new(k: usize, values: Vec<u32>) -> Result<Self> {
        if k == 0 || !values.len().is_multiple_of(k) {
            return Err(Error::contract(format!(
                "message of {} values is not a whole number of {k}-dimensional symbols",
                values.len()
            )));
        }
        Ok(Message { k, values })
    }

    /// Message built from per-time symbol indices in `[0, q^k)`.
    pub fn from_symbol_indices(k: usize, q: u32, indices: &[u32]) -> Self {
        let mut values = vec![0u32; indices.len() * k];
        for (chunk, &ix) in values.chunks_mut(k).zip(indices) {
            index_to_digits(ix, q, chunk);
        }
        Message { k, values }
    }

    /// The all-zero message of length `len`.
    pub fn zeros(k: usize, len: usize) -> Self {
        Message {
            k,
            values: vec![0; k * len],
        }
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of symbols `N`.
    #[inline]
    pub fn len(&self) -> usize {
        self.values.len() / self.k
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Symbol at time `d`; `None` outside `[0, N)` where the symbol is zero.
    pub fn symbol(&self, d: isize) -> Option<&[u32]> {
        if d < 0 || d as usize >= self.len() {
            return None;
        }
        let d = d as usize;
        Some(&self.values[d * self.k..(d + 1) * self.k])
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    /// Symbol index of `x[d]` (zero outside the message).
    pub fn symbol_index(&self, d: isize, q: u32) -> u32 {
        self.symbol(d).map_or(0, |s| digits_to_index(s, q))
    }

    pub fn symbol_indices(&self, q: u32) -> Vec<u32> {
        self.values
            .chunks(self.k)
            .map(|s| digits_to_index(s, q))
            .collect()
    }
}

impl Codeword {
    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of codeword symbols (`N + nu - 1`).
    #[inline]
    pub fn len(&self) -> usize {
        self.values.len() / self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Symbol `y[d]` as field values.
    pub fn symbol(&self, d: usize) -> &[u32] {
        &self.values[d * self.n..(d + 1) * self.n]
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn symbols(&self) -> impl Iterator<Item = &[u32]> {
        self.values.chunks(self.n)
    }

    /// Builds a codeword directly from row-major values.
    pub fn from_values(n: usize, values: Vec<u32>) -> Result<Self> {
        if n == 0 || !values.len().is_multiple_of(n) {
            return Err(Error::contract("codeword values are not a whole number of symbols"));
        }
        Ok(Codeword { n, values })
    }
}

impl ConvCode {
    /// Builds a code from `nu` matrices of size `k x n`, given row-major and
    /// concatenated (`G[0]` first). The generator is rejected unless it
    /// is delay-free and observable (see [`ConvCode::is_observable`]).
    pub fn new(field: PrimeField, k: usize, n: usize, nu: usize, taps: &[u32]) -> Result<Self> {
        Self::with_budget(field, k, n, nu, taps, DEFAULT_STATE_BUDGET)
    }

    pub fn with_budget(
        field: PrimeField,
        k: usize,
        n: usize,
        nu: usize,
        taps: &[u32],
        state_budget: usize,
    ) -> Result<Self> {
        let code = Self::build(field, k, n, nu, taps, state_budget)?;
        if !code.is_observable()? {
            return Err(Error::config(
                "generator is not observable: two messages differing at some index \
                 produce identical codewords over the following nu symbols",
            ));
        }
        Ok(code)
    }

    /// Binary rate-1/n code from octal generator polynomials, one per
    /// output stream. The most significant bit of each polynomial is the
    /// `G[0]` tap; `nu` is the longest polynomial length in bits.
    ///
    /// `from_octal(&[0o7, 0o5])` is the classic (7,5) code.
    pub fn from_octal(generators: &[u32]) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::config("octal generator list is empty"));
        }
        let nu = generators
            .iter()
            .map(|&g| 32 - g.leading_zeros() as usize)
            .max()
            .unwrap_or(0);
        if nu == 0 {
            return Err(Error::config("all octal generators are zero"));
        }
        let n = generators.len();
        let mut taps = vec![0u32; nu * n];
        for (j, &g) in generators.iter().enumerate() {
            for l in 0..nu {
                taps[l * n + j] = (g >> (nu - 1 - l)) & 1;
            }
        }
        Self::new(PrimeField::binary(), 1, n, nu, &taps)
    }

    fn build(
        field: PrimeField,
        k: usize,
        n: usize,
        nu: usize,
        taps: &[u32],
        state_budget: usize,
    ) -> Result<Self> {
        if k == 0 || n == 0 || nu == 0 {
            return Err(Error::config(format!(
                "code dimensions must be positive (k={k}, n={n}, nu={nu})"
            )));
        }
        if taps.len() != nu * k * n {
            return Err(Error::config(format!(
                "expected {} taps for nu={nu}, k={k}, n={n}, got {}",
                nu * k * n,
                taps.len()
            )));
        }
        let q = field.order();
        if let Some(&bad) = taps.iter().find(|&&t| t >= q) {
            return Err(Error::config(format!("tap value {bad} is not an element of GF({q})")));
        }
        if taps[..k * n].iter().all(|&t| t == 0) {
            return Err(Error::config("G[0] is all-zero; the encoder must be delay-free"));
        }
        let q_us = q as usize;
        let input_alphabet = checked_pow(q_us, k)
            .ok_or(Error::Budget { what: "input alphabet", required: u128::MAX, allowed: u32::MAX as u128 })?;
        let output_alphabet = checked_pow(q_us, n)
            .filter(|&a| a <= u32::MAX as usize)
            .ok_or(Error::Budget { what: "output alphabet", required: u128::MAX, allowed: u32::MAX as u128 })?;
        let num_states = checked_pow(input_alphabet, nu).filter(|&s| s <= state_budget).ok_or_else(|| {
            Error::Budget {
                what: "trellis states",
                required: (q as u128).saturating_pow((k * nu) as u32),
                allowed: state_budget as u128,
            }
        })?;
        let mut code = ConvCode {
            field,
            k,
            n,
            nu,
            taps: taps.to_vec(),
            input_alphabet,
            output_alphabet,
            num_states,
            state_outputs: Vec::new(),
        };
        code.state_outputs = (0..num_states).map(|s| code.compute_output(s)).collect();
        Ok(code)
    }

    fn compute_output(&self, state: usize) -> u32 {
        let q = self.field.order();
        let mut x = vec![0u32; self.k];
        let mut y = vec![0u32; self.n];
        let mut rest = state;
        for l in 0..self.nu {
            let digit = (rest % self.input_alphabet) as u32;
            rest /= self.input_alphabet;
            if digit == 0 {
                continue;
            }
            index_to_digits(digit, q, &mut x);
            for (i, &xi) in x.iter().enumerate() {
                if xi == 0 {
                    continue;
                }
                for (j, yj) in y.iter_mut().enumerate() {
                    let g = self.taps[(l * self.k + i) * self.n + j];
                    *yj = self.field.add_raw(*yj, self.field.mul_raw(xi, g));
                }
            }
        }
        digits_to_index(&y, q)
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.field.order()
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Coding memory: the number of tap matrices.
    #[inline]
    pub fn nu(&self) -> usize {
        self.nu
    }

    /// `q^k`, the number of distinct source symbols.
    #[inline]
    pub fn input_alphabet(&self) -> usize {
        self.input_alphabet
    }

    /// `q^n`, the number of distinct codeword symbols.
    #[inline]
    pub fn output_alphabet(&self) -> usize {
        self.output_alphabet
    }

    /// `q^(k nu)`.
    #[inline]
    pub fn num_states(&self) -> usize {
        self.num_states
    }

    /// Tap matrix `G[l]` entry `(i, j)`.
    pub fn tap(&self, l: usize, i: usize, j: usize) -> FieldElement {
        self.field.elem(self.taps[(l * self.k + i) * self.n + j])
    }

    /// Codeword symbol index emitted in the given state.
    #[inline]
    pub fn output_index(&self, state: usize) -> u32 {
        self.state_outputs[state]
    }

    pub fn output_symbol(&self, state: usize) -> Vec<u32> {
        let mut y = vec![0u32; self.n];
        index_to_digits(self.state_outputs[state], self.q(), &mut y);
        y
    }

    /// Field values of codeword symbol `index`.
    pub fn output_digits(&self, index: u32) -> Vec<u32> {
        let mut y = vec![0u32; self.n];
        index_to_digits(index, self.q(), &mut y);
        y
    }

    /// State reached from `state` when source symbol `input` arrives.
    #[inline]
    pub fn next_state(&self, state: usize, input: usize) -> usize {
        (state * self.input_alphabet + input) % self.num_states
    }

    /// Newest source symbol index of a state.
    #[inline]
    pub fn newest_input(&self, state: usize) -> usize {
        state % self.input_alphabet
    }

    /// Source symbol index of `x[d-j]` inside the state window at time `d`.
    #[inline]
    pub fn state_digit(&self, state: usize, j: usize) -> usize {
        let mut s = state;
        for _ in 0..j {
            s /= self.input_alphabet;
        }
        s % self.input_alphabet
    }

    /// The states that can precede `state`, one per possible oldest symbol.
    pub fn predecessors(&self, state: usize) -> impl Iterator<Item = usize> + '_ {
        let high = self.num_states / self.input_alphabet;
        let base = state / self.input_alphabet;
        (0..self.input_alphabet).map(move |b| base + b * high)
    }

    /// Window `[x[d-nu+1], .., x[d]]` of a state as a `k nu` field vector.
    pub fn state_window(&self, state: MarkovState) -> Vec<FieldElement> {
        let mut out = Vec::with_capacity(self.k * self.nu);
        let mut sym = vec![0u32; self.k];
        for j in (0..self.nu).rev() {
            index_to_digits(self.state_digit(state.0, j) as u32, self.q(), &mut sym);
            out.extend(sym.iter().map(|&v| self.field.elem(v)));
        }
        out
    }

    fn check_message(&self, msg: &Message) -> Result<()> {
        if msg.k() != self.k {
            return Err(Error::contract(format!(
                "message symbols have dimension {}, code expects k={}",
                msg.k(),
                self.k
            )));
        }
        let q = self.q();
        if let Some(&bad) = msg.values().iter().find(|&&v| v >= q) {
            return Err(Error::contract(format!("message value {bad} is not in GF({q})")));
        }
        Ok(())
    }

    /// `y[d] = sum_l x[d-l] G[l]` for `d` in `[0, N + nu - 1)`.
    pub fn encode(&self, msg: &Message) -> Result<Codeword> {
        self.check_message(msg)?;
        let states = self.state_indices(msg);
        let mut values = Vec::with_capacity(states.len() * self.n);
        for s in states {
            values.extend(self.output_symbol(s));
        }
        Ok(Codeword { n: self.n, values })
    }

    /// Markov states `u[d]` for `d` in `[0, N + nu - 1)`; zero elsewhere.
    pub fn state_sequence(&self, msg: &Message) -> Result<Vec<MarkovState>> {
        self.check_message(msg)?;
        Ok(self.state_indices(msg).into_iter().map(MarkovState).collect())
    }

    pub(crate) fn state_indices(&self, msg: &Message) -> Vec<usize> {
        let q = self.q();
        let span = msg.len() + self.nu - 1;
        let mut state = 0usize;
        (0..span)
            .map(|d| {
                let input = msg.symbol_index(d as isize, q) as usize;
                state = self.next_state(state, input);
                state
            })
            .collect()
    }

    /// Recovers the message carried by a state path over `[0, N)`.
    pub fn message_from_states(&self, states: &[usize], len: usize) -> Message {
        let indices: Vec<u32> = states[..len]
            .iter()
            .map(|&s| self.newest_input(s) as u32)
            .collect();
        Message::from_symbol_indices(self.k, self.q(), &indices)
    }

    /// Checks that two messages differing at an index `m` always yield
    /// codewords that differ somewhere in `[m, m + nu)`, whatever the
    /// symbols before and after `m`.
    ///
    /// The search runs on pairs of states: starting from every pair of
    /// windows and every pair of distinct inputs, it propagates the pairs
    /// whose outputs agree; the property fails iff some pair survives `nu`
    /// consecutive agreeing outputs.
    pub fn is_observable(&self) -> Result<bool> {
        let s = self.num_states;
        let pairs = (s as u128) * (s as u128);
        let allowed = 1u128 << 26;
        if pairs > allowed {
            return Err(Error::Budget {
                what: "observability check (state pairs)",
                required: pairs,
                allowed,
            });
        }
        let qk = self.input_alphabet;
        let mut layer = vec![false; s * s];
        // step 0: arbitrary windows, distinct newest inputs, equal outputs.
        for a in 0..s {
            for b in 0..s {
                if self.newest_input(a) != self.newest_input(b)
                    && self.state_outputs[a] == self.state_outputs[b]
                {
                    layer[a * s + b] = true;
                }
            }
        }
        for _ in 1..self.nu {
            if !layer.iter().any(|&v| v) {
                return Ok(true);
            }
            let mut next = vec![false; s * s];
            for (ix, _) in layer.iter().enumerate().filter(|(_, &v)| v) {
                let (a, b) = (ix / s, ix % s);
                for ia in 0..qk {
                    let na = self.next_state(a, ia);
                    for ib in 0..qk {
                        let nb = self.next_state(b, ib);
                        if self.state_outputs[na] == self.state_outputs[nb] {
                            next[na * s + nb] = true;
                        }
                    }
                }
            }
            layer = next;
        }
        Ok(!layer.iter().any(|&v| v))
    }

    /// Whether `G[0]` has full row rank `k` over GF(q).
    pub fn leading_tap_full_rank(&self) -> bool {
        let mut rows: Vec<Vec<u32>> = (0..self.k)
            .map(|i| self.taps[i * self.n..(i + 1) * self.n].to_vec())
            .collect();
        let f = self.field;
        let mut rank = 0;
        for col in 0..self.n {
            let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
                continue;
            };
            rows.swap(rank, pivot);
            let inv = f.elem(rows[rank][col]).inv().map(|e| e.value()).unwrap_or(0);
            for r in 0..rows.len() {
                if r != rank && rows[r][col] != 0 {
                    let factor = f.mul_raw(rows[r][col], inv);
                    for c in 0..self.n {
                        let sub = f.mul_raw(factor, rows[rank][c]);
                        rows[r][c] = f.sub_raw(rows[r][c], sub);
                    }
                }
            }
            rank += 1;
            if rank == self.k {
                break;
            }
        }
        rank == self.k
    }
}

/// Time-indexed view of a code for messages of length `N`.
///
/// Index `d` runs over `[0, N + nu - 1)`. A state is reachable at `d` when
/// every digit referring to a time outside `[0, N)` is zero; inputs at
/// times `d >= N` are forced to zero.
#[derive(Debug, Clone)]
pub struct Trellis {
    code: ConvCode,
    len: usize,
}

/// Labelled edge between consecutive trellis indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub input: usize,
    pub next: usize,
    pub output: u32,
}

impl Trellis {
    /// Builds the trellis; `state_budget` bounds `q^(k nu)`.
    pub fn new(code: &ConvCode, len: usize, state_budget: usize) -> Result<Self> {
        if code.num_states() > state_budget {
            return Err(Error::Budget {
                what: "trellis states",
                required: code.num_states() as u128,
                allowed: state_budget as u128,
            });
        }
        if len == 0 {
            return Err(Error::contract("trellis length must be positive"));
        }
        Ok(Trellis {
            code: code.clone(),
            len,
        })
    }

    #[inline]
    pub fn code(&self) -> &ConvCode {
        &self.code
    }

    /// Message length `N`.
    #[inline]
    pub fn message_len(&self) -> usize {
        self.len
    }

    /// Number of time indices `N + nu - 1`.
    #[inline]
    pub fn span(&self) -> usize {
        self.len + self.code.nu - 1
    }

    /// Whether `state` can occur at time `d`.
    pub fn is_reachable(&self, d: usize, state: usize) -> bool {
        let qk = self.code.input_alphabet;
        let mut s = state;
        for j in 0..self.code.nu {
            let t = d as isize - j as isize;
            if (t < 0 || t as usize >= self.len) && !s.is_multiple_of(qk) {
                return false;
            }
            s /= qk;
        }
        true
    }

    /// Reachable states at time `d` in increasing index order.
    pub fn states_at(&self, d: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.code.num_states).filter(move |&s| self.is_reachable(d, s))
    }

    /// Number of inputs allowed at time `d`.
    #[inline]
    pub fn inputs_at(&self, d: usize) -> usize {
        if d < self.len {
            self.code.input_alphabet
        } else {
            1
        }
    }

    /// Edges leaving `state` at time `d` towards time `d + 1`.
    pub fn edges(&self, d: usize, state: usize) -> impl Iterator<Item = Edge> + '_ {
        (0..self.inputs_at(d + 1)).map(move |input| {
            let next = self.code.next_state(state, input);
            Edge {
                input,
                next,
                output: self.code.output_index(next),
            }
        })
    }

    /// Edges into time 0 from the all-zero origin.
    pub fn initial_edges(&self) -> impl Iterator<Item = Edge> + '_ {
        (0..self.inputs_at(0)).map(move |input| Edge {
            input,
            next: input,
            output: self.code.output_index(input),
        })
    }
}
