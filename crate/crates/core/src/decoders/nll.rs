//! Neighbouring-log-likelihood optimality test.
//!
//! A candidate's source symbols on `[m, m + nu)` are certified as ML when the
//! candidate fits the observations well on the inner window
//! `[m - 2M nu, m + 2M nu)` and moderately on the two flanks of `nu` indices
//! on either side of it. Only observations in that window are read.

use alloc::vec::Vec;

use super::SymbolSetSequence;
use crate::channel::{signal_distances, ReceivedSequence, SymbolMapper};
use crate::convcode::{Codeword, ConvCode, Message};
use crate::metrics::branch_metric;
use crate::{Error, Result};

/// How the per-index residual is compared against `d_min^2 / 2 - xi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConditionA {
    /// `||r[d] - g(y[d])|| < d_min^2 / 2 - xi`.
    #[default]
    Literal,
    /// `||r[d] - g(y[d])||^2 < d_min^2 / 2 - xi`.
    Squared,
}

/// Treatment of window indices outside the observed span `[0, N + nu - 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Boundary {
    /// Every codeword is known to be zero-state outside the span, so those
    /// indices carry no likelihood difference and are skipped.
    #[default]
    KnownZero,
    /// The test fails whenever the window leaves the span.
    Clip,
}

/// Parameters of the test. Construction enforces `0 < xi < d_min^2 / 2`
/// and `M > nu d_max^2 / (3 xi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NllParams {
    xi: f64,
    big_m: usize,
    d_min2: f64,
    d_max2: f64,
    nu: usize,
    condition_a: ConditionA,
    boundary: Boundary,
}

impl NllParams {
    pub fn new(xi: f64, big_m: usize, d_min2: f64, d_max2: f64, nu: usize) -> Result<Self> {
        if !(d_min2 > 0.0) || !(d_max2 >= d_min2) || !d_max2.is_finite() {
            return Err(Error::config(alloc::format!(
                "need 0 < d_min^2 <= d_max^2 < inf, got {d_min2} and {d_max2}"
            )));
        }
        if nu == 0 {
            return Err(Error::config("nu must be positive"));
        }
        if !(xi > 0.0 && xi < d_min2 / 2.0) {
            return Err(Error::config(alloc::format!(
                "xi = {xi} must lie in (0, d_min^2/2 = {})",
                d_min2 / 2.0
            )));
        }
        let floor = nu as f64 * d_max2 / (3.0 * xi);
        if !(big_m as f64 > floor) {
            return Err(Error::config(alloc::format!("M = {big_m} must exceed nu*d_max^2/(3 xi) = {floor}")));
        }
        Ok(NllParams {
            xi,
            big_m,
            d_min2,
            d_max2,
            nu,
            condition_a: ConditionA::default(),
            boundary: Boundary::default(),
        })
    }

    /// `xi = d_min^2 / 4` and the smallest `M` whose flank budget
    /// `M xi - nu d_max^2` is at least `xi`.
    pub fn default_for(code: &ConvCode, mapper: &SymbolMapper) -> Result<Self> {
        let (d_min2, d_max2) = signal_distances(mapper, code.n(), super::ALPHABET_BUDGET)?;
        Self::with_xi(code, d_min2, d_max2, d_min2 / 4.0)
    }

    /// Parameters for a given `xi`, with `M` chosen as in [`Self::default_for`].
    pub fn with_xi(code: &ConvCode, d_min2: f64, d_max2: f64, xi: f64) -> Result<Self> {
        let nu = code.nu();
        let big_m = libm::ceil(nu as f64 * d_max2 / xi) as usize + 1;
        Self::new(xi, big_m, d_min2, d_max2, nu)
    }

    pub fn with_condition_a(mut self, mode: ConditionA) -> Self {
        self.condition_a = mode;
        self
    }

    pub fn with_boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn big_m(&self) -> usize {
        self.big_m
    }

    pub fn d_min2(&self) -> f64 {
        self.d_min2
    }

    pub fn d_max2(&self) -> f64 {
        self.d_max2
    }

    pub fn nu(&self) -> usize {
        self.nu
    }

    pub fn condition_a(&self) -> ConditionA {
        self.condition_a
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    /// Half-width `(2M + 1) nu` of the window read around `m`.
    pub fn reach(&self) -> usize {
        (2 * self.big_m + 1) * self.nu
    }

    #[inline]
    fn residual_ok(&self, e2: f64) -> bool {
        let t = self.d_min2 / 2.0 - self.xi;
        match self.condition_a {
            ConditionA::Literal => libm::sqrt(e2) < t,
            ConditionA::Squared => e2 < t,
        }
    }

    /// Flank condition on the in-span indices of one flank: each
    /// contributes `||e||^2 + d_max^2`, the total must stay within `M xi`.
    /// With all `nu` indices present this is `sum ||e||^2 <= M xi - nu d_max^2`.
    fn flank_ok(&self, e2: &[f64], from: isize, to: isize) -> bool {
        let lo = from.max(0) as usize;
        let hi = (to.max(0) as usize).min(e2.len());
        let mut sum = 0.0;
        for &v in e2.get(lo..hi).unwrap_or(&[]) {
            sum += v + self.d_max2;
        }
        sum <= self.big_m as f64 * self.xi
    }
}

fn check(rx: &ReceivedSequence, cw: &Codeword, mapper: &SymbolMapper) -> Result<()> {
    if rx.n() != cw.n() || rx.len() != cw.len() {
        return Err(Error::contract(alloc::format!(
            "received sequence is {}x{} but candidate is {}x{}",
            rx.len(),
            rx.n(),
            cw.len(),
            cw.n()
        )));
    }
    if cw.values().iter().any(|&v| v >= mapper.q()) {
        return Err(Error::contract("candidate symbol outside the symbol map"));
    }
    Ok(())
}

fn residuals(rx: &ReceivedSequence, cw: &Codeword, mapper: &SymbolMapper) -> Vec<f64> {
    (0..cw.len())
        .map(|d| branch_metric(rx.at(d), cw.symbol(d), mapper))
        .collect()
}

/// Window test at `m` on precomputed residuals; `bad_prefix[d]` counts the
/// indices before `d` failing the per-index condition.
fn window_ok(params: &NllParams, e2: &[f64], bad_prefix: &[u32], m: isize) -> bool {
    let len = e2.len() as isize;
    let nu = params.nu as isize;
    let inner = 2 * params.big_m as isize * nu;
    let outer = inner + nu;
    if params.boundary == Boundary::Clip && (m - outer < 0 || m + outer > len) {
        return false;
    }
    let lo = (m - inner).clamp(0, len) as usize;
    let hi = (m + inner).clamp(0, len) as usize;
    if bad_prefix[hi] != bad_prefix[lo] {
        return false;
    }
    params.flank_ok(e2, m - outer, m - inner) && params.flank_ok(e2, m + inner, m + outer)
}

fn bad_prefix(params: &NllParams, e2: &[f64]) -> Vec<u32> {
    let mut out = Vec::with_capacity(e2.len() + 1);
    let mut count = 0u32;
    out.push(0);
    for &v in e2 {
        count += u32::from(!params.residual_ok(v));
        out.push(count);
    }
    out
}

/// `true` certifies that the source symbols of `candidate` on `[m, m + nu)`
/// equal those of the ML message. `false` is inconclusive.
pub fn nll_confirm(
    rx: &ReceivedSequence,
    candidate: &Codeword,
    m: isize,
    params: &NllParams,
    mapper: &SymbolMapper,
) -> Result<bool> {
    check(rx, candidate, mapper)?;
    let e2 = residuals(rx, candidate, mapper);
    let bad = bad_prefix(params, &e2);
    Ok(window_ok(params, &e2, &bad, m))
}

/// Confirms guess symbols window by window: `X[d] = {guess[d]}` when some
/// `m` with `d` in `[m, m + nu)` passes [`nll_confirm`], otherwise the whole
/// alphabet. Residuals are computed once and the inner-window condition is
/// read from a running count, so the sweep is linear in `N`.
pub fn build_symbol_sets(
    rx: &ReceivedSequence,
    guess: &Message,
    params: &NllParams,
    code: &ConvCode,
    mapper: &SymbolMapper,
) -> Result<SymbolSetSequence> {
    let cw = code.encode(guess)?;
    check(rx, &cw, mapper)?;
    let e2 = residuals(rx, &cw, mapper);
    let bad = bad_prefix(params, &e2);
    let len = guess.len();
    let nu = code.nu() as isize;
    let indices = guess.symbol_indices(code.q());
    let mut sets = SymbolSetSequence::full(len, code.input_alphabet());
    for m in (1 - nu)..len as isize {
        if window_ok(params, &e2, &bad, m) {
            let lo = m.max(0) as usize;
            let hi = ((m + nu) as usize).min(len);
            for d in lo..hi {
                sets.confirm(d, indices[d]);
            }
        }
    }
    Ok(sets)
}

/// Number of windows examined by [`build_symbol_sets`] for a message of
/// length `len`.
pub(crate) fn window_count(len: usize, nu: usize) -> u64 {
    (len + nu - 1) as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::modulate;
    use alloc::vec;

    fn setup() -> (ConvCode, SymbolMapper) {
        (ConvCode::from_octal(&[0o7, 0o5]).unwrap(), SymbolMapper::pam(2))
    }

    #[test]
    fn default_parameters_75() {
        let (code, bpsk) = setup();
        let p = NllParams::default_for(&code, &bpsk).unwrap();
        assert_eq!((p.xi(), p.big_m(), p.d_min2(), p.d_max2()), (1.0, 25, 4.0, 8.0));
        assert_eq!(p.reach(), 153);
    }

    #[test]
    fn constraint_validation() {
        assert!(NllParams::new(2.0, 100, 4.0, 8.0, 3).is_err());
        assert!(NllParams::new(0.0, 100, 4.0, 8.0, 3).is_err());
        // nu d_max^2 / (3 xi) = 8 is not exceeded by M = 8
        assert!(NllParams::new(1.0, 8, 4.0, 8.0, 3).is_err());
        assert!(NllParams::new(1.0, 9, 4.0, 8.0, 3).is_ok());
    }

    #[test]
    fn noiseless_interior_and_clipping() {
        let (code, bpsk) = setup();
        let msg = Message::new(1, (0..400).map(|i| (i * 7 % 3 == 0) as u32).collect()).unwrap();
        let cw = code.encode(&msg).unwrap();
        let rx = modulate(&cw, &bpsk);
        let p = NllParams::default_for(&code, &bpsk).unwrap();
        assert!(nll_confirm(&rx, &cw, 200, &p, &bpsk).unwrap());
        let clip = p.with_boundary(Boundary::Clip);
        assert!(nll_confirm(&rx, &cw, 200, &clip, &bpsk).unwrap());
        assert!(!nll_confirm(&rx, &cw, 10, &clip, &bpsk).unwrap());
        assert!(nll_confirm(&rx, &cw, 10, &p, &bpsk).unwrap());

        let sets = build_symbol_sets(&rx, &msg, &clip, &code, &bpsk).unwrap();
        for d in 0..400 {
            let interior = d >= 153 && d + 153 < 400;
            if interior {
                assert!(sets.confirmed(d).is_some(), "index {d}");
            }
        }
        let sets = build_symbol_sets(&rx, &msg, &p, &code, &bpsk).unwrap();
        assert_eq!(sets.singleton_count(), 400);
    }

    #[test]
    fn one_bad_inner_index_fails() {
        let (code, bpsk) = setup();
        let msg = Message::zeros(1, 400);
        let cw = code.encode(&msg).unwrap();
        let mut samples = modulate(&cw, &bpsk).samples().to_vec();
        samples[2 * 220] = 0.0;
        let rx = ReceivedSequence::new(2, samples).unwrap();
        let p = NllParams::default_for(&code, &bpsk).unwrap();
        assert!(!nll_confirm(&rx, &cw, 200, &p, &bpsk).unwrap());
        // index 220 lies outside the window of m = 50
        assert!(nll_confirm(&rx, &cw, 50, &p, &bpsk).unwrap());
    }

    #[test]
    fn far_observation_confirms_nothing() {
        let (code, bpsk) = setup();
        let msg = Message::zeros(1, 64);
        let rx = ReceivedSequence::new(2, vec![-5.0; 2 * 66]).unwrap();
        let p = NllParams::default_for(&code, &bpsk).unwrap();
        let sets = build_symbol_sets(&rx, &msg, &p, &code, &bpsk).unwrap();
        assert_eq!(sets.singleton_count(), 0);
    }

    #[test]
    fn literal_and_squared_differ_below_one() {
        let (code, _) = setup();
        // threshold d_min^2/2 - xi = 0.5
        let p = NllParams::with_xi(&code, 4.0, 8.0, 1.5).unwrap();
        assert!(p.residual_ok(0.2));
        let lit = p.with_condition_a(ConditionA::Literal);
        let sq = p.with_condition_a(ConditionA::Squared);
        // ||e||^2 = 0.36: ||e|| = 0.6 fails literal, passes squared
        assert!(!lit.residual_ok(0.36));
        assert!(sq.residual_ok(0.36));
    }
}
