use alloc::vec;
use alloc::vec::Vec;

use proptest::prelude::{any, prop_assert, prop_assert_eq, proptest, ProptestConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::channel::{modulate, transmit, NoiseModel};
use crate::galois::PrimeField;

fn code75() -> ConvCode {
    ConvCode::from_octal(&[0o7, 0o5]).unwrap()
}

fn ternary() -> ConvCode {
    ConvCode::new(PrimeField::new(3).unwrap(), 1, 2, 2, &[1, 1, 1, 2]).unwrap()
}

fn random_message(code: &ConvCode, len: usize, rng: &mut ChaCha8Rng) -> Message {
    let values = (0..len * code.k()).map(|_| rng.random_range(0..code.q())).collect();
    Message::new(code.k(), values).unwrap()
}

fn noisy(code: &ConvCode, msg: &Message, mapper: &SymbolMapper, sigma2: f64, rng: &mut ChaCha8Rng) -> ReceivedSequence {
    let cw = code.encode(msg).unwrap();
    transmit(&modulate(&cw, mapper), &NoiseModel::from_sigma2(sigma2).unwrap(), rng)
}

#[test]
fn exact_decoders_match_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for (code, len) in [(code75(), 8), (ternary(), 5)] {
        let mapper = SymbolMapper::pam(code.q());
        let trellis = Trellis::new(&code, len, 1 << 16).unwrap();
        let params = NllParams::default_for(&code, &mapper).unwrap();
        for trial in 0..150 {
            let sigma2 = [1.0, 0.1, 0.01][trial % 3];
            let msg = random_message(&code, len, &mut rng);
            let rx = noisy(&code, &msg, &mapper, sigma2, &mut rng);
            let brute = brute_force_ml(&rx, &code, &mapper, len, DEFAULT_MESSAGE_BUDGET).unwrap();
            let vit = viterbi_decode(&rx, &trellis, &mapper).unwrap();
            let sll = sll_augmented_viterbi(&rx, &trellis, &mapper, &msg).unwrap();
            let three = three_step_decode(&rx, &trellis, &mapper, &params, Strategy::List(2)).unwrap();
            for out in [&vit, &sll, &three.decode] {
                assert_eq!(out.message, brute.message, "trial {trial}");
                assert!((out.metric.value() - brute.metric.value()).abs() < 1e-9);
                assert!(out.certified_ml);
            }
            assert!(sll.stats.visited_states <= vit.stats.visited_states);
        }
    }
}

#[test]
fn noiseless_decoding() {
    let code = code75();
    let mapper = SymbolMapper::pam(2);
    let msg = Message::new(1, vec![1, 0, 1, 1, 0, 0, 1]).unwrap();
    let trellis = Trellis::new(&code, 7, 1 << 16).unwrap();
    let rx = modulate(&code.encode(&msg).unwrap(), &mapper);
    let vit = viterbi_decode(&rx, &trellis, &mapper).unwrap();
    assert_eq!(vit.message, msg);
    assert_eq!(vit.metric.value(), 0.0);
    for strategy in [Strategy::DecisionFeedback, Strategy::List(1), Strategy::List(3)] {
        assert_eq!(suboptimal_decode(&rx, &trellis, &mapper, strategy).unwrap(), msg);
    }
    let params = NllParams::default_for(&code, &mapper).unwrap();
    let report = three_step_decode(&rx, &trellis, &mapper, &params, Strategy::DecisionFeedback).unwrap();
    assert_eq!(report.decode.message, msg);
    assert_eq!(report.decode.stats.visited_states, trellis.span() as u64);
    let one = brute_force_ml(&modulate(&code.encode(&Message::new(1, vec![1]).unwrap()).unwrap(), &mapper), &code, &mapper, 1, 16).unwrap();
    assert_eq!(one.message.values(), &[1]);
}

#[test]
fn exact_ties_pick_smallest_message() {
    // r = 0 is equidistant from every BPSK codeword
    let code = code75();
    let mapper = SymbolMapper::pam(2);
    let trellis = Trellis::new(&code, 6, 1 << 16).unwrap();
    let rx = ReceivedSequence::new(2, vec![0.0; 16]).unwrap();
    let zero = Message::zeros(1, 6);
    assert_eq!(brute_force_ml(&rx, &code, &mapper, 6, 1 << 10).unwrap().message, zero);
    assert_eq!(viterbi_decode(&rx, &trellis, &mapper).unwrap().message, zero);
    let guess = Message::new(1, vec![1; 6]).unwrap();
    assert_eq!(sll_augmented_viterbi(&rx, &trellis, &mapper, &guess).unwrap().message, zero);

    // halfway between 00 and 11 at the first index only
    let mut samples = modulate(&code.encode(&Message::zeros(1, 6)).unwrap(), &mapper).samples().to_vec();
    samples[0] = 0.0;
    samples[1] = 0.0;
    let rx = ReceivedSequence::new(2, samples).unwrap();
    assert_eq!(viterbi_decode(&rx, &trellis, &mapper).unwrap().message, zero);
}

#[test]
fn full_viterbi_visit_count() {
    let code = code75();
    let mapper = SymbolMapper::pam(2);
    let trellis = Trellis::new(&code, 100, 1 << 16).unwrap();
    let rx = modulate(&code.encode(&Message::zeros(1, 100)).unwrap(), &mapper);
    let vit = viterbi_decode(&rx, &trellis, &mapper).unwrap();
    assert_eq!(vit.stats.visited_states, 2 + 4 + 98 * 8 + 4 + 2);
    assert!((vit.stats.normalized() - 8.16).abs() / 8.16 < 0.05);
}

#[test]
fn budgets_are_enforced() {
    let code = code75();
    let mapper = SymbolMapper::pam(2);
    let rx = ReceivedSequence::new(2, vec![0.0; 2 * 32]).unwrap();
    assert!(matches!(
        brute_force_ml(&rx, &code, &mapper, 30, DEFAULT_MESSAGE_BUDGET),
        Err(Error::Budget { .. })
    ));
}

#[test]
fn modified_viterbi_degenerate_sets() {
    let code = code75();
    let mapper = SymbolMapper::pam(2);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let trellis = Trellis::new(&code, 20, 1 << 16).unwrap();
    let msg = random_message(&code, 20, &mut rng);
    let rx = noisy(&code, &msg, &mapper, 0.5, &mut rng);
    let vit = viterbi_decode(&rx, &trellis, &mapper).unwrap();
    let full = modified_viterbi(&rx, &trellis, &mapper, &SymbolSetSequence::full(20, 2)).unwrap();
    assert_eq!(full, vit);
    let single = modified_viterbi(&rx, &trellis, &mapper, &SymbolSetSequence::singletons(&msg, 2, 2)).unwrap();
    assert_eq!(single.message, msg);
    assert_eq!(single.stats.visited_states, trellis.span() as u64);
    assert!(modified_viterbi(&rx, &trellis, &mapper, &SymbolSetSequence::full(19, 2)).is_err());
}

#[test]
fn full_width_list_reproduces_viterbi() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for code in [code75(), ternary()] {
        let mapper = SymbolMapper::pam(code.q());
        let trellis = Trellis::new(&code, 40, 1 << 16).unwrap();
        for _ in 0..20 {
            let msg = random_message(&code, 40, &mut rng);
            let rx = noisy(&code, &msg, &mapper, 1.0, &mut rng);
            let vit = viterbi_decode(&rx, &trellis, &mapper).unwrap();
            let list = suboptimal_decode(&rx, &trellis, &mapper, Strategy::List(code.num_states())).unwrap();
            assert_eq!(list, vit.message);
        }
    }
}

#[test]
fn decision_feedback_needs_full_rank_leading_tap() {
    // G[0] = [1, 0; 0, 0] is rank one, the second input shows up one index later
    let code = ConvCode::new(PrimeField::binary(), 2, 2, 2, &[1, 0, 0, 0, 0, 0, 0, 1]).unwrap();
    let mapper = SymbolMapper::pam(2);
    let trellis = Trellis::new(&code, 4, 1 << 16).unwrap();
    let rx = ReceivedSequence::new(2, vec![0.0; 2 * 5]).unwrap();
    assert!(matches!(
        suboptimal_decode(&rx, &trellis, &mapper, Strategy::DecisionFeedback),
        Err(Error::Config(_))
    ));
    assert!(suboptimal_decode(&rx, &trellis, &mapper, Strategy::List(2)).is_ok());
    assert!(suboptimal_decode(&rx, &trellis, &mapper, Strategy::List(0)).is_err());
}

#[test]
fn sphere_bound_below_every_completion() {
    let code = code75();
    let mapper = SymbolMapper::pam(2);
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let len = 6;
    for _ in 0..10 {
        let msg = random_message(&code, len, &mut rng);
        let rx = noisy(&code, &msg, &mapper, 1.0, &mut rng);
        for m in 0..len as isize {
            let prefix = random_message(&code, m as usize + 1, &mut rng);
            let bound = sphere_branch_lower_bound(&rx, &prefix, m, &code, &mapper).unwrap().value();
            let free = len - m as usize - 1;
            for tail in 0u32..(1 << free) {
                let mut values = prefix.values().to_vec();
                values.extend((0..free).map(|i| (tail >> i) & 1));
                let cw = code.encode(&Message::new(1, values).unwrap()).unwrap();
                assert!(bound <= negative_sll(&rx, &cw, &mapper).unwrap().value() + 1e-12);
            }
        }
    }
}

#[test]
fn whole_codeword_test_is_sound() {
    let code = code75();
    let mapper = SymbolMapper::pam(2);
    let bound = codeword_distance_bound(&code, 8, &mapper).unwrap();
    let trellis = Trellis::new(&code, 8, 1 << 16).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let mut accepted = 0;
    for trial in 0..300 {
        let msg = random_message(&code, 8, &mut rng);
        let rx = noisy(&code, &msg, &mapper, [0.05, 0.3][trial % 2], &mut rng);
        let guess = suboptimal_decode(&rx, &trellis, &mapper, Strategy::DecisionFeedback).unwrap();
        if whole_codeword_optimality_test(&rx, &guess, bound, &code, &mapper).unwrap() {
            accepted += 1;
            let brute = brute_force_ml(&rx, &code, &mapper, 8, 1 << 10).unwrap();
            assert_eq!(brute.message, guess);
        }
    }
    assert!(accepted > 0);
}

/// States on the brute-force ML path must all be admitted by the sets.
fn ml_path_admitted(sets: &SymbolSetSequence, ml: &Message, code: &ConvCode) -> bool {
    (0..ml.len()).all(|d| sets.contains(d as isize, ml.symbol_index(d as isize, code.q()) as usize))
}

#[test]
fn nll_sets_never_exclude_ml_symbols() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for code in [code75(), ternary()] {
        let mapper = SymbolMapper::pam(code.q());
        let len = 6;
        let trellis = Trellis::new(&code, len, 1 << 16).unwrap();
        let (d_min2, d_max2) = crate::channel::signal_distances(&mapper, code.n(), 1 << 12).unwrap();
        for xi in [d_min2 / 4.0, 3.0 * d_min2 / 8.0] {
            for mode in [ConditionA::Literal, ConditionA::Squared] {
                let params = NllParams::with_xi(&code, d_min2, d_max2, xi).unwrap().with_condition_a(mode);
                for trial in 0..60 {
                    let msg = random_message(&code, len, &mut rng);
                    let rx = noisy(&code, &msg, &mapper, [1.0, 0.1, 0.01][trial % 3], &mut rng);
                    let brute = brute_force_ml(&rx, &code, &mapper, len, 1 << 16).unwrap();
                    let guess = suboptimal_decode(&rx, &trellis, &mapper, Strategy::List(2)).unwrap();
                    for candidate in [&msg, &guess] {
                        let sets = build_symbol_sets(&rx, candidate, &params, &code, &mapper).unwrap();
                        assert!(ml_path_admitted(&sets, &brute.message, &code));
                    }
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn symbol_sets_agree_with_single_window_test(seed in any::<u64>(), sigma2 in 0.01f64..0.6, squared in any::<bool>()) {
        let code = code75();
        let mapper = SymbolMapper::pam(2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let len = 120;
        let msg = random_message(&code, len, &mut rng);
        let rx = noisy(&code, &msg, &mapper, sigma2, &mut rng);
        let mode = if squared { ConditionA::Squared } else { ConditionA::Literal };
        let params = NllParams::new(1.0, 9, 4.0, 8.0, 3).unwrap().with_condition_a(mode);
        let params = if seed % 2 == 0 { params.with_boundary(Boundary::Clip) } else { params };
        let sets = build_symbol_sets(&rx, &msg, &params, &code, &mapper).unwrap();
        let cw = code.encode(&msg).unwrap();
        let passing: Vec<isize> = (-2..len as isize)
            .filter(|&m| nll_confirm(&rx, &cw, m, &params, &mapper).unwrap())
            .collect();
        for d in 0..len {
            let expected = passing.iter().any(|&m| m <= d as isize && (d as isize) < m + 3);
            prop_assert_eq!(sets.confirmed(d).is_some(), expected);
        }
    }

    #[test]
    fn visited_counts_within_bounds(seed in any::<u64>(), sigma2 in 0.0f64..2.0) {
        let code = code75();
        let mapper = SymbolMapper::pam(2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let len = 64;
        let trellis = Trellis::new(&code, len, 1 << 16).unwrap();
        let msg = random_message(&code, len, &mut rng);
        let rx = noisy(&code, &msg, &mapper, sigma2, &mut rng);
        let params = NllParams::default_for(&code, &mapper).unwrap();
        let report = three_step_decode(&rx, &trellis, &mapper, &params, Strategy::DecisionFeedback).unwrap();
        let vit = viterbi_decode(&rx, &trellis, &mapper).unwrap();
        let c = report.decode.stats.normalized();
        prop_assert!(c >= 1.0);
        prop_assert!(c <= 8.0 * (len + 2) as f64 / len as f64);
        prop_assert!(report.decode.stats.visited_states <= vit.stats.visited_states);
        prop_assert_eq!(report.decode.message, vit.message);
    }
}
