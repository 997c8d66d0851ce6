//! Path metrics: the negative sum log-likelihood and the path-covering
//! predicate.

use alloc::format;
use alloc::vec::Vec;

use crate::channel::{ReceivedSequence, SymbolMapper};
use crate::convcode::Codeword;
use crate::{Error, Result};

/// Accumulated negative log-likelihood of a path. In the Gaussian case this
/// is a sum of squared distances and never negative.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct PathMetric(pub f64);

impl PathMetric {
    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

/// Neumaier compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::default();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Squared distance `||r - p||^2` between an observation and a signal point.
#[inline]
pub fn squared_distance(r: &[f64], point: &[f64]) -> f64 {
    r.iter().zip(point).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// `||r[d] - g(y[d])||^2` for one time index.
pub fn branch_metric(r_d: &[f64], y_d: &[u32], mapper: &SymbolMapper) -> f64 {
    debug_assert_eq!(r_d.len(), y_d.len());
    r_d.iter()
        .zip(y_d)
        .map(|(&r, &y)| {
            let e = r - mapper.map(y);
            e * e
        })
        .sum()
}

fn check_shapes(rx: &ReceivedSequence, cw: &Codeword) -> Result<()> {
    if rx.n() != cw.n() || rx.len() != cw.len() {
        return Err(Error::contract(format!(
            "received sequence is {}x{} but codeword is {}x{}",
            rx.len(),
            rx.n(),
            cw.len(),
            cw.n()
        )));
    }
    Ok(())
}

/// Negative sum log-likelihood over the transmitted span, accumulated with
/// compensated summation.
pub fn negative_sll(rx: &ReceivedSequence, cw: &Codeword, mapper: &SymbolMapper) -> Result<PathMetric> {
    negative_sll_range(rx, cw, mapper, 0, rx.len())
}

/// Same as [`negative_sll`] restricted to time indices `[from, to)`.
pub fn negative_sll_range(
    rx: &ReceivedSequence,
    cw: &Codeword,
    mapper: &SymbolMapper,
    from: usize,
    to: usize,
) -> Result<PathMetric> {
    check_shapes(rx, cw)?;
    if from > to || to > rx.len() {
        return Err(Error::contract(format!(
            "range [{from}, {to}) outside [0, {})",
            rx.len()
        )));
    }
    let acc: CompensatedSum = (from..to)
        .map(|d| branch_metric(rx.at(d), cw.symbol(d), mapper))
        .collect();
    Ok(PathMetric(acc.value()))
}

/// A state path together with its per-index log-likelihood terms
/// `log f(r[d] | y[d]) + log P(u[d] | u[d-1])`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredPath {
    pub states: Vec<usize>,
    pub log_likelihood: Vec<f64>,
}

impl ScoredPath {
    pub fn new(states: Vec<usize>, log_likelihood: Vec<f64>) -> Result<Self> {
        if states.len() != log_likelihood.len() {
            return Err(Error::contract("states and log-likelihood terms differ in length"));
        }
        Ok(ScoredPath {
            states,
            log_likelihood,
        })
    }

    /// Gaussian-channel path of a convolutional code. Transition terms are
    /// uniform and dropped; the observation term is `-||r - g(y)||^2 / 2`
    /// up to an SNR scale and constants, neither of which changes a
    /// covering decision.
    pub fn gaussian(
        states: Vec<usize>,
        rx: &ReceivedSequence,
        cw: &Codeword,
        mapper: &SymbolMapper,
    ) -> Result<Self> {
        check_shapes(rx, cw)?;
        if states.len() != cw.len() {
            return Err(Error::contract("state path and codeword differ in length"));
        }
        let log_likelihood = (0..cw.len())
            .map(|d| -0.5 * branch_metric(rx.at(d), cw.symbol(d), mapper))
            .collect();
        Ok(ScoredPath {
            states,
            log_likelihood,
        })
    }
}

/// Whether `a` covers `b` between `d1` and `d2`: both paths share their
/// states at `d1` and `d2` and the log-likelihood ratio of `b` against `a`
/// summed over `(d1, d2]` is strictly negative. `d1 = None` stands for the
/// common all-zero origin before time 0. A `true` result proves `b` is not
/// the ML path.
pub fn covers(a: &ScoredPath, b: &ScoredPath, d1: Option<usize>, d2: usize) -> Result<bool> {
    if d2 >= a.states.len() || d2 >= b.states.len() {
        return Err(Error::contract(format!("index {d2} beyond path length")));
    }
    let start = match d1 {
        Some(d1) => {
            if d1 >= d2 {
                return Err(Error::contract(format!("need d1 < d2, got {d1} >= {d2}")));
            }
            if a.states[d1] != b.states[d1] {
                return Err(Error::contract(format!("paths do not share their state at d1={d1}")));
            }
            d1 + 1
        }
        None => 0,
    };
    if a.states[d2] != b.states[d2] {
        return Err(Error::contract(format!("paths do not share their state at d2={d2}")));
    }
    let ratio: CompensatedSum = (start..=d2)
        .map(|d| b.log_likelihood[d] - a.log_likelihood[d])
        .collect();
    Ok(ratio.value() < 0.0)
}
