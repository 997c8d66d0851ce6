//! Maximum-likelihood sequence detection for first-order hidden Markov
//! systems with a finite state alphabet.
//!
//! A system is a Markov chain on states `0..S` that starts from state `0`
//! before time 0, a deterministic processed symbol `y(u)` per state and an
//! observation density `f(r | y)`. Everything is kept in the log domain;
//! forbidden transitions are `-inf`.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

mod decode;
mod gaussian;

pub use decode::{hmm_brute_force, hmm_negative_sll, hmm_nll_confirm, hmm_viterbi, HmmDecode};
pub use gaussian::{gaussian_conv_system, rho_for_xi, GaussianObservation};

/// Pair states allowed in the observability search.
const PAIR_BUDGET: usize = 1 << 20;

/// Observation model together with the two bounds used by the
/// neighbourhood test. For every `r` and processed symbols `y1`:
///
/// * `bound_lower(r, y1) <= log f(r|y1) - log f(r|y2)` for every `y2 != y1`;
/// * `bound_upper(r, y1) >= log f(r|y3) - log f(r|y2)` for every `y2 != y3`.
pub trait Observation {
    /// `log f(r | y)`.
    fn log_density(&self, r: &[f64], y: u32) -> f64;
    fn bound_lower(&self, r: &[f64], y: u32) -> f64;
    fn bound_upper(&self, r: &[f64], y: u32) -> f64;
}

/// Wraps an observation model and replaces its bounds by the exact
/// extreme log-ratios, found by enumerating the processed alphabet.
#[derive(Debug, Clone)]
pub struct ExactBounds<O> {
    inner: O,
    alphabet: u32,
}

impl<O: Observation> ExactBounds<O> {
    pub fn new(inner: O, alphabet: u32) -> Self {
        ExactBounds { inner, alphabet }
    }
}

impl<O: Observation> Observation for ExactBounds<O> {
    fn log_density(&self, r: &[f64], y: u32) -> f64 {
        self.inner.log_density(r, y)
    }

    fn bound_lower(&self, r: &[f64], y: u32) -> f64 {
        let own = self.inner.log_density(r, y);
        (0..self.alphabet)
            .filter(|&z| z != y)
            .map(|z| own - self.inner.log_density(r, z))
            .fold(f64::INFINITY, f64::min)
    }

    fn bound_upper(&self, r: &[f64], _y: u32) -> f64 {
        let logs: Vec<f64> = (0..self.alphabet).map(|z| self.inner.log_density(r, z)).collect();
        let mut best = f64::NEG_INFINITY;
        for (i, a) in logs.iter().enumerate() {
            for (j, b) in logs.iter().enumerate() {
                if i != j {
                    best = best.max(a - b);
                }
            }
        }
        best
    }
}

/// Checks both bound inequalities at one `(r, y1)` against every pair of
/// processed symbols; `tol` absorbs rounding.
pub fn bounds_hold<O: Observation + ?Sized>(obs: &O, alphabet: u32, r: &[f64], y1: u32, tol: f64) -> bool {
    let logs: Vec<f64> = (0..alphabet).map(|z| obs.log_density(r, z)).collect();
    let lower = obs.bound_lower(r, y1);
    let upper = obs.bound_upper(r, y1);
    for (y2, l2) in logs.iter().enumerate() {
        if y2 as u32 != y1 && lower > logs[y1 as usize] - l2 + tol {
            return false;
        }
        for (y3, l3) in logs.iter().enumerate() {
            if y2 != y3 && upper < l3 - l2 - tol {
                return false;
            }
        }
    }
    true
}

/// A hidden Markov system.
#[derive(Debug, Clone)]
pub struct HmmSystem<O> {
    num_states: usize,
    /// `log_trans[prev * S + next]`.
    log_trans: Vec<f64>,
    process: Vec<u32>,
    alphabet: u32,
    obs: O,
    nu: usize,
    terminated: bool,
    succ: Vec<Vec<usize>>,
}

impl<O: Observation> HmmSystem<O> {
    /// `log_trans` is row-major by previous state; every row must be a
    /// probability distribution. `process[u]` is the processed symbol of
    /// state `u`, an index below `alphabet`. With `terminated` the chain
    /// must return to state `0` right after the last observation.
    pub fn new(
        log_trans: Vec<f64>,
        process: Vec<u32>,
        alphabet: u32,
        obs: O,
        nu: usize,
        terminated: bool,
    ) -> Result<Self> {
        let s = process.len();
        if s == 0 || log_trans.len() != s * s {
            return Err(Error::config(alloc::format!(
                "transition table has {} entries for {s} states",
                log_trans.len()
            )));
        }
        if nu == 0 {
            return Err(Error::config("nu must be positive"));
        }
        if let Some(&bad) = process.iter().find(|&&y| y >= alphabet) {
            return Err(Error::config(alloc::format!("processed symbol {bad} outside alphabet {alphabet}")));
        }
        for (u, row) in log_trans.chunks(s).enumerate() {
            if row.iter().any(|v| v.is_nan() || *v == f64::INFINITY || *v > 1e-12) {
                return Err(Error::config(alloc::format!("row {u} holds an invalid log-probability")));
            }
            let total: f64 = row.iter().map(|&v| libm::exp(v)).sum();
            if libm::fabs(total - 1.0) > 1e-9 {
                return Err(Error::config(alloc::format!("transitions out of state {u} sum to {total}")));
            }
        }
        let succ = log_trans
            .chunks(s)
            .map(|row| (0..s).filter(|&t| row[t] > f64::NEG_INFINITY).collect())
            .collect();
        Ok(HmmSystem {
            num_states: s,
            log_trans,
            process,
            alphabet,
            obs,
            nu,
            terminated,
            succ,
        })
    }

    /// Builds the system from linear-domain probabilities.
    pub fn from_probabilities(
        trans: &[f64],
        process: Vec<u32>,
        alphabet: u32,
        obs: O,
        nu: usize,
        terminated: bool,
    ) -> Result<Self> {
        if trans.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
            return Err(Error::config("transition probabilities must lie in [0, 1]"));
        }
        let logs = trans
            .iter()
            .map(|&p| if p > 0.0 { libm::log(p) } else { f64::NEG_INFINITY })
            .collect();
        Self::new(logs, process, alphabet, obs, nu, terminated)
    }

    #[inline]
    pub fn num_states(&self) -> usize {
        self.num_states
    }

    #[inline]
    pub fn log_transition(&self, prev: usize, next: usize) -> f64 {
        self.log_trans[prev * self.num_states + next]
    }

    #[inline]
    pub fn processed(&self, u: usize) -> u32 {
        self.process[u]
    }

    pub fn alphabet(&self) -> u32 {
        self.alphabet
    }

    pub fn observation(&self) -> &O {
        &self.obs
    }

    pub fn nu(&self) -> usize {
        self.nu
    }

    pub fn terminated(&self) -> bool {
        self.terminated
    }

    /// Replaces the order used by the neighbourhood test.
    pub fn with_nu(mut self, nu: usize) -> Result<Self> {
        if nu == 0 {
            return Err(Error::config("nu must be positive"));
        }
        self.nu = nu;
        Ok(self)
    }

    pub(crate) fn successors(&self, u: usize) -> &[usize] {
        &self.succ[u]
    }

    /// Smallest order satisfying both the positivity of the `nu`-step
    /// transitions and observability, searched up to `cap`.
    pub fn shared_order(&self, cap: usize) -> Result<usize> {
        let h = homogeneity_order(self, cap)?;
        for nu in 1..=cap {
            if verify_observability(self, nu)? {
                return Ok(h.max(nu));
            }
        }
        Err(Error::config(alloc::format!("system is not observable within order {cap}")))
    }
}

/// Minimum ratio between two positive transition probabilities.
pub fn transition_ratio_bound<O: Observation>(sys: &HmmSystem<O>) -> Result<f64> {
    let finite = sys.log_trans.iter().copied().filter(|v| *v > f64::NEG_INFINITY);
    let (lo, hi) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if lo > hi {
        return Err(Error::contract("system has no positive transition"));
    }
    Ok(libm::exp(lo - hi))
}

/// Smallest `nu <= cap` whose `nu`-step transition matrix is strictly
/// positive. Chains that never get there (periodic or reducible ones) are
/// rejected.
pub fn homogeneity_order<O: Observation>(sys: &HmmSystem<O>, cap: usize) -> Result<usize> {
    let s = sys.num_states;
    let mut reach: Vec<bool> = sys.log_trans.iter().map(|v| *v > f64::NEG_INFINITY).collect();
    for nu in 1..=cap {
        if reach.iter().all(|&b| b) {
            return Ok(nu);
        }
        let mut next = vec![false; s * s];
        for a in 0..s {
            for b in 0..s {
                if reach[a * s + b] {
                    for &c in sys.successors(b) {
                        next[a * s + c] = true;
                    }
                }
            }
        }
        reach = next;
    }
    Err(Error::config(alloc::format!(
        "no power up to {cap} of the transition matrix is positive; the chain is not ergodic"
    )))
}

/// Whether two valid state paths that differ at some `d` always have
/// different processed symbols somewhere in `(d - nu, d + nu)`.
///
/// Searches the product automaton of state pairs with equal processed
/// symbols for a `2 nu - 1` long walk whose middle pair is split.
pub fn verify_observability<O: Observation>(sys: &HmmSystem<O>, nu: usize) -> Result<bool> {
    if nu == 0 {
        return Err(Error::config("nu must be positive"));
    }
    let s = sys.num_states;
    let pairs = s.checked_mul(s).filter(|&p| p <= PAIR_BUDGET).ok_or(Error::Budget {
        what: "observability pair states",
        required: (s as u128) * (s as u128),
        allowed: PAIR_BUDGET as u128,
    })?;
    let same = |a: usize, b: usize| sys.process[a] == sys.process[b];
    // fwd: end of an equal-output walk of `nu` pairs; bwd: start of one
    let mut fwd: Vec<bool> = (0..pairs).map(|p| same(p / s, p % s)).collect();
    let mut bwd = fwd.clone();
    for _ in 1..nu {
        let mut nf = vec![false; pairs];
        let mut nb = vec![false; pairs];
        for p in 0..pairs {
            let (a, b) = (p / s, p % s);
            if !same(a, b) {
                continue;
            }
            for &x in sys.successors(a) {
                for &y in sys.successors(b) {
                    if !same(x, y) {
                        continue;
                    }
                    let t = x * s + y;
                    if fwd[p] {
                        nf[t] = true;
                    }
                    if bwd[t] {
                        nb[p] = true;
                    }
                }
            }
        }
        fwd = nf;
        bwd = nb;
    }
    Ok(!(0..pairs).any(|p| p / s != p % s && fwd[p] && bwd[p]))
}
