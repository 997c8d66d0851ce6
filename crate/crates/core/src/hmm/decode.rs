use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use super::{transition_ratio_bound, HmmSystem, Observation};
use crate::channel::ReceivedSequence;
use crate::decoders::{Boundary, ComplexityStats};
use crate::metrics::CompensatedSum;
use crate::{Error, Result};

const NONE: u32 = u32::MAX;

/// ML state sequence and search cost.
#[derive(Debug, Clone, PartialEq)]
pub struct HmmDecode {
    pub states: Vec<usize>,
    /// Negative SLL of `states`.
    pub metric: f64,
    pub stats: ComplexityStats,
}

#[inline]
fn step_cost<O: Observation>(sys: &HmmSystem<O>, rx: &ReceivedSequence, d: usize, prev: usize, u: usize) -> f64 {
    -(sys.log_transition(prev, u) + sys.obs.log_density(rx.at(d), sys.processed(u)))
}

#[inline]
fn exit_cost<O: Observation>(sys: &HmmSystem<O>, u: usize) -> f64 {
    if sys.terminated {
        -sys.log_transition(u, 0)
    } else {
        0.0
    }
}

/// `-sum_d [log f(r[d] | y(u[d])) + log P(u[d] | u[d-1])]` with `u[-1] = 0`,
/// plus the return to state `0` for terminated systems.
pub fn hmm_negative_sll<O: Observation>(sys: &HmmSystem<O>, rx: &ReceivedSequence, states: &[usize]) -> Result<f64> {
    if states.len() != rx.len() || states.is_empty() {
        return Err(Error::contract(alloc::format!(
            "{} states for {} observations",
            states.len(),
            rx.len()
        )));
    }
    if let Some(&bad) = states.iter().find(|&&u| u >= sys.num_states) {
        return Err(Error::contract(alloc::format!("state {bad} out of range")));
    }
    let mut acc = CompensatedSum::default();
    let mut prev = 0;
    for (d, &u) in states.iter().enumerate() {
        if sys.log_transition(prev, u) == f64::NEG_INFINITY {
            return Err(Error::contract(alloc::format!("transition {prev} -> {u} at index {d} is impossible")));
        }
        acc.add(step_cost(sys, rx, d, prev, u));
        prev = u;
    }
    let exit = exit_cost(sys, prev);
    if exit == f64::INFINITY {
        return Err(Error::contract("sequence cannot return to state 0"));
    }
    acc.add(exit);
    Ok(acc.value())
}

/// Survivor search over the state trellis. Exact ties go to the sequence
/// with the lexicographically smaller state indices.
pub fn hmm_viterbi<O: Observation>(sys: &HmmSystem<O>, rx: &ReceivedSequence) -> Result<HmmDecode> {
    let len = rx.len();
    if len == 0 {
        return Err(Error::contract("empty observation"));
    }
    let s = sys.num_states;
    let mut back = vec![NONE; len * s];
    let mut cur = vec![f64::INFINITY; s];
    let mut next = vec![f64::INFINITY; s];
    let mut visited = 0u64;
    for &u in sys.successors(0) {
        cur[u] = step_cost(sys, rx, 0, 0, u);
        back[u] = 0;
    }
    let cmp_paths = |back: &[u32], d: usize, a: usize, b: usize| {
        let (mut a, mut b, mut t) = (a, b, d);
        let mut first = Ordering::Equal;
        while a != b {
            first = a.cmp(&b);
            if t == 0 {
                break;
            }
            a = back[t * s + a] as usize;
            b = back[t * s + b] as usize;
            t -= 1;
        }
        first
    };
    for d in 1..len {
        next.iter_mut().for_each(|c| *c = f64::INFINITY);
        for p in 0..s {
            if !cur[p].is_finite() {
                continue;
            }
            visited += 1;
            for &u in sys.successors(p) {
                let cand = cur[p] + step_cost(sys, rx, d, p, u);
                let slot = d * s + u;
                let better = cand < next[u]
                    || (cand == next[u] && cmp_paths(&back, d - 1, p, back[slot] as usize) == Ordering::Less);
                if better {
                    next[u] = cand;
                    back[slot] = p as u32;
                }
            }
        }
        core::mem::swap(&mut cur, &mut next);
    }
    let mut best: Option<(f64, usize)> = None;
    for u in 0..s {
        if !cur[u].is_finite() {
            continue;
        }
        visited += 1;
        let total = cur[u] + exit_cost(sys, u);
        if !total.is_finite() {
            continue;
        }
        let take = match best {
            None => true,
            Some((m, b)) => total < m || (total == m && cmp_paths(&back, len - 1, u, b) == Ordering::Less),
        };
        if take {
            best = Some((total, u));
        }
    }
    let (_, last) = best.ok_or_else(|| Error::contract("no valid state sequence fits the observation"))?;
    let mut states = vec![0usize; len];
    states[len - 1] = last;
    for t in (1..len).rev() {
        states[t - 1] = back[t * s + states[t]] as usize;
    }
    let metric = hmm_negative_sll(sys, rx, &states)?;
    Ok(HmmDecode {
        states,
        metric,
        stats: ComplexityStats {
            visited_states: visited,
            time_span: len,
            message_len: len,
        },
    })
}

struct Walk<'a, O> {
    sys: &'a HmmSystem<O>,
    rx: &'a ReceivedSequence,
    path: Vec<usize>,
    best: Option<(f64, Vec<usize>)>,
}

impl<O: Observation> Walk<'_, O> {
    fn go(&mut self, d: usize, prev: usize, acc: f64) {
        if d == self.rx.len() {
            let total = acc + exit_cost(self.sys, prev);
            if total.is_finite() && self.best.as_ref().is_none_or(|(m, _)| total < *m) {
                self.best = Some((total, self.path.clone()));
            }
            return;
        }
        for &u in self.sys.successors(prev) {
            let next = acc + step_cost(self.sys, self.rx, d, prev, u);
            self.path.push(u);
            self.go(d + 1, u, next);
            self.path.pop();
        }
    }
}

/// Exhaustive search over every valid state sequence, in lexicographic
/// order so the smallest sequence wins exact ties. Refuses to start when
/// `S^N` exceeds `budget`.
pub fn hmm_brute_force<O: Observation>(sys: &HmmSystem<O>, rx: &ReceivedSequence, budget: u128) -> Result<HmmDecode> {
    let len = rx.len();
    if len == 0 {
        return Err(Error::contract("empty observation"));
    }
    let required = (sys.num_states as u128).checked_pow(len as u32).unwrap_or(u128::MAX);
    if required > budget {
        return Err(Error::Budget {
            what: "state sequence enumeration",
            required,
            allowed: budget,
        });
    }
    let mut walk = Walk {
        sys,
        rx,
        path: Vec::with_capacity(len),
        best: None,
    };
    walk.go(0, 0, 0.0);
    let (_, states) = walk
        .best
        .ok_or_else(|| Error::contract("no valid state sequence fits the observation"))?;
    let metric = hmm_negative_sll(sys, rx, &states)?;
    Ok(HmmDecode {
        states,
        metric,
        stats: ComplexityStats {
            visited_states: required.min(u64::MAX as u128) as u64,
            time_span: len,
            message_len: len,
        },
    })
}

/// Neighbourhood test on a candidate state sequence. `true` certifies that
/// the candidate's state at `m + nu - 1` is the ML state there; `false` is
/// inconclusive.
///
/// With `p` the transition ratio bound, every `d` in `[m - 2M nu, m + 2M nu)`
/// needs `L_l(r[d], y[d]) > 3 nu (rho - log p)`, and the `L_u` sums over
/// the right and left flanks of `nu` indices must not exceed
/// `3 M nu rho + (nu + 1) log p` and `3 M nu rho + nu log p`.
pub fn hmm_nll_confirm<O: Observation>(
    sys: &HmmSystem<O>,
    rx: &ReceivedSequence,
    candidate: &[usize],
    m: isize,
    rho: f64,
    big_m: usize,
    boundary: Boundary,
) -> Result<bool> {
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::config(alloc::format!("rho = {rho} must be positive")));
    }
    if big_m == 0 {
        return Err(Error::config("M must be positive"));
    }
    let len = rx.len() as isize;
    if candidate.len() != rx.len() {
        return Err(Error::contract("candidate and observation differ in length"));
    }
    let nu = sys.nu as isize;
    let target = m + nu - 1;
    if target < 0 || target >= len {
        return Err(Error::contract(alloc::format!("index {target} outside the observation")));
    }
    let log_p = libm::log(transition_ratio_bound(sys)?);
    let inner = 2 * big_m as isize * nu;
    let outer = inner + nu;
    if boundary == Boundary::Clip && (m - outer < 0 || m + outer > len) {
        return Ok(false);
    }
    let y = |d: isize| sys.processed(candidate[d as usize]);
    let r = |d: isize| rx.at(d as usize);
    let threshold = 3.0 * nu as f64 * (rho - log_p);
    for d in (m - inner).max(0)..(m + inner).min(len) {
        if !(sys.obs.bound_lower(r(d), y(d)) > threshold) {
            return Ok(false);
        }
    }
    let flank = |from: isize, to: isize| -> f64 {
        (from.max(0)..to.min(len)).map(|d| sys.obs.bound_upper(r(d), y(d))).sum()
    };
    let budget = 3.0 * big_m as f64 * nu as f64 * rho;
    let right_ok = flank(m + inner, m + outer) <= budget + (nu + 1) as f64 * log_p;
    let left_ok = flank(m - outer, m - inner) <= budget + nu as f64 * log_p;
    Ok(right_ok && left_ok)
}

#[cfg(test)]
mod tests {
    use super::super::{ExactBounds, HmmSystem, Observation};
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Scalar unit-variance Gaussian around a per-symbol level.
    #[derive(Debug, Clone)]
    struct Levels(Vec<f64>);

    impl Observation for Levels {
        fn log_density(&self, r: &[f64], y: u32) -> f64 {
            let e = r[0] - self.0[y as usize];
            -0.5 * e * e
        }
        fn bound_lower(&self, _: &[f64], _: u32) -> f64 {
            f64::NEG_INFINITY
        }
        fn bound_upper(&self, _: &[f64], _: u32) -> f64 {
            f64::INFINITY
        }
    }

    fn two_state() -> HmmSystem<ExactBounds<Levels>> {
        let obs = ExactBounds::new(Levels(vec![-1.0, 1.0]), 2);
        HmmSystem::from_probabilities(&[0.8, 0.2, 0.3, 0.7], vec![0, 1], 2, obs, 1, false).unwrap()
    }

    fn rx_of(values: &[f64]) -> ReceivedSequence {
        ReceivedSequence::new(1, values.to_vec()).unwrap()
    }

    #[test]
    fn negative_sll_by_hand() {
        let sys = two_state();
        let rx = rx_of(&[0.5]);
        // -(log 0.2 - 0.5 * 0.25)
        let v = hmm_negative_sll(&sys, &rx, &[1]).unwrap();
        assert!((v - (0.125 - libm::log(0.2))).abs() < 1e-12);
        let rx = rx_of(&[0.5, -0.5]);
        let v = hmm_negative_sll(&sys, &rx, &[1, 0]).unwrap();
        let expected = 0.125 - libm::log(0.2) + 0.125 - libm::log(0.3);
        assert!((v - expected).abs() < 1e-12);
    }

    #[test]
    fn impossible_transitions_rejected() {
        let obs = Levels(vec![0.0, 1.0]);
        let sys = HmmSystem::from_probabilities(&[0.0, 1.0, 1.0, 0.0], vec![0, 1], 2, obs, 1, false).unwrap();
        let rx = rx_of(&[0.0, 0.0, 0.0]);
        assert!(hmm_negative_sll(&sys, &rx, &[1, 1, 0]).is_err());
        // deterministic alternation is the only valid sequence
        assert_eq!(hmm_viterbi(&sys, &rx).unwrap().states, vec![1, 0, 1]);
        assert_eq!(hmm_brute_force(&sys, &rx, 1 << 10).unwrap().states, vec![1, 0, 1]);
    }

    #[test]
    fn single_observation_picks_best_state() {
        let sys = two_state();
        // state 1 has the better density, state 0 the better transition
        let out = hmm_brute_force(&sys, &rx_of(&[0.9]), 16).unwrap();
        let c0 = hmm_negative_sll(&sys, &rx_of(&[0.9]), &[0]).unwrap();
        let c1 = hmm_negative_sll(&sys, &rx_of(&[0.9]), &[1]).unwrap();
        assert_eq!(out.states, vec![if c1 < c0 { 1 } else { 0 }]);
    }

    #[test]
    fn viterbi_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let obs = ExactBounds::new(Levels(vec![0.0, 1.0, 2.0]), 3);
        let trans = [0.5, 0.25, 0.25, 0.0, 0.1, 0.1, 0.8, 0.0, 0.3, 0.3, 0.0, 0.4, 0.25, 0.25, 0.25, 0.25];
        let sys = HmmSystem::from_probabilities(&trans, vec![0, 1, 2, 1], 3, obs.clone(), 1, false).unwrap();
        let term = HmmSystem::from_probabilities(&trans, vec![0, 1, 2, 1], 3, obs, 1, true).unwrap();
        for _ in 0..200 {
            let len = rng.random_range(1..=6);
            let rx = rx_of(&(0..len).map(|_| rng.random_range(-1.0..3.0)).collect::<Vec<_>>());
            for s in [&sys, &term] {
                let v = hmm_viterbi(s, &rx).unwrap();
                let b = hmm_brute_force(s, &rx, 4096).unwrap();
                assert_eq!(v.states, b.states);
                assert!((v.metric - b.metric).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn brute_force_budget() {
        let sys = two_state();
        assert!(matches!(
            hmm_brute_force(&sys, &rx_of(&[0.0; 12]), 1 << 10),
            Err(Error::Budget { .. })
        ));
    }

    #[test]
    fn confirm_rejects_one_bad_inner_index() {
        // uniform transitions and levels -1, +1: L_l = 2 on clean samples,
        // L_u = 0 at r = 0
        let obs = ExactBounds::new(Levels(vec![-1.0, 1.0]), 2);
        let sys = HmmSystem::from_probabilities(&[0.5; 4], vec![0, 1], 2, obs, 1, false).unwrap();
        let truth = [0usize, 0, 1, 1, 0, 1, 0, 0];
        let clean: Vec<f64> = truth.iter().map(|&u| if u == 0 { -1.0 } else { 1.0 }).collect();
        let rho = 0.5;
        let mut flanks = clean.clone();
        flanks[1] = 0.0;
        flanks[6] = 0.0;
        assert!(hmm_nll_confirm(&sys, &rx_of(&flanks), &truth, 4, rho, 1, Boundary::Clip).unwrap());
        let mut bad = flanks.clone();
        bad[4] = 0.3;
        assert!(!hmm_nll_confirm(&sys, &rx_of(&bad), &truth, 4, rho, 1, Boundary::Clip).unwrap());
        // clean flanks carry too much weight
        assert!(!hmm_nll_confirm(&sys, &rx_of(&clean), &truth, 4, rho, 1, Boundary::Clip).unwrap());

        // m = 6: the right flank lies past the end
        let mut left = clean.clone();
        left[3] = 0.0;
        assert!(hmm_nll_confirm(&sys, &rx_of(&left), &truth, 6, rho, 1, Boundary::KnownZero).unwrap());
        assert!(!hmm_nll_confirm(&sys, &rx_of(&left), &truth, 6, rho, 1, Boundary::Clip).unwrap());
        assert!(hmm_nll_confirm(&sys, &rx_of(&left), &truth, 6, -1.0, 1, Boundary::Clip).is_err());
    }
}
