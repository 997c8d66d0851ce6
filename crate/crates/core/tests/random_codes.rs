//! Decoder agreement on randomly drawn codes, through the public API only.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use trellis_ml_core::channel::{modulate, transmit};
use trellis_ml_core::decoders::{
    brute_force_ml, modified_viterbi, sll_augmented_viterbi, three_step_decode, viterbi_decode, Strategy,
    DEFAULT_MESSAGE_BUDGET,
};
use trellis_ml_core::{ConvCode, Message, NllParams, NoiseModel, PrimeField, SymbolMapper, SymbolSetSequence, Trellis};

/// A random observable code over GF(q), or `None` if the draw was rejected.
fn random_code(q: u32, k: usize, n: usize, nu: usize, rng: &mut ChaCha8Rng) -> Option<ConvCode> {
    let taps: Vec<u32> = (0..nu * k * n).map(|_| rng.random_range(0..q)).collect();
    ConvCode::new(PrimeField::new(q).ok()?, k, n, nu, &taps).ok()
}

fn random_message(code: &ConvCode, len: usize, rng: &mut ChaCha8Rng) -> Message {
    let q = code.q();
    Message::new(code.k(), (0..len * code.k()).map(|_| rng.random_range(0..q)).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exact_decoders_agree(seed in any::<u64>(), q in prop::sample::select(vec![2u32, 3, 5]), nu in 1usize..4, snr in 0.3f64..30.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let code = random_code(q, 1, 2, nu, &mut rng);
        prop_assume!(code.is_some());
        let code = code.unwrap();
        let mapper = SymbolMapper::pam(q);
        let len = match q { 2 => 9, 3 => 6, _ => 4 };
        let msg = random_message(&code, len, &mut rng);
        let rx = transmit(&modulate(&code.encode(&msg).unwrap(), &mapper), &NoiseModel::from_snr(snr).unwrap(), &mut rng);
        let trellis = Trellis::new(&code, len, 1 << 16).unwrap();
        let brute = brute_force_ml(&rx, &code, &mapper, len, DEFAULT_MESSAGE_BUDGET).unwrap();
        let vit = viterbi_decode(&rx, &trellis, &mapper).unwrap();
        prop_assert_eq!(&vit.message, &brute.message);
        prop_assert!((vit.metric.value() - brute.metric.value()).abs() < 1e-9);
        let sll = sll_augmented_viterbi(&rx, &trellis, &mapper, &msg).unwrap();
        prop_assert_eq!(&sll.message, &brute.message);
        prop_assert!(sll.stats.visited_states <= vit.stats.visited_states);
        let params = NllParams::default_for(&code, &mapper).unwrap();
        let strategy = if code.leading_tap_full_rank() { Strategy::DecisionFeedback } else { Strategy::List(2) };
        let three = three_step_decode(&rx, &trellis, &mapper, &params, strategy).unwrap();
        prop_assert_eq!(&three.decode.message, &brute.message);
    }

    #[test]
    fn two_input_codes(seed in any::<u64>(), snr in 0.5f64..20.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let code = random_code(2, 2, 3, 2, &mut rng);
        prop_assume!(code.is_some());
        let code = code.unwrap();
        let mapper = SymbolMapper::pam(2);
        let len = 5;
        let msg = random_message(&code, len, &mut rng);
        let rx = transmit(&modulate(&code.encode(&msg).unwrap(), &mapper), &NoiseModel::from_snr(snr).unwrap(), &mut rng);
        let trellis = Trellis::new(&code, len, 1 << 16).unwrap();
        let brute = brute_force_ml(&rx, &code, &mapper, len, DEFAULT_MESSAGE_BUDGET).unwrap();
        prop_assert_eq!(&viterbi_decode(&rx, &trellis, &mapper).unwrap().message, &brute.message);
        // pinning the ML symbols changes nothing
        let sets = SymbolSetSequence::singletons(&brute.message, 2, code.input_alphabet());
        prop_assert_eq!(&modified_viterbi(&rx, &trellis, &mapper, &sets).unwrap().message, &brute.message);
    }

    #[test]
    fn encoding_is_linear(seed in any::<u64>(), q in prop::sample::select(vec![2u32, 3, 7])) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let code = random_code(q, 1, 2, 3, &mut rng);
        prop_assume!(code.is_some());
        let code = code.unwrap();
        let a = random_message(&code, 12, &mut rng);
        let b = random_message(&code, 12, &mut rng);
        let sum: Vec<u32> = a.values().iter().zip(b.values()).map(|(x, y)| (x + y) % q).collect();
        let ea = code.encode(&a).unwrap();
        let eb = code.encode(&b).unwrap();
        let esum = code.encode(&Message::new(1, sum).unwrap()).unwrap();
        let expected: Vec<u32> = ea.values().iter().zip(eb.values()).map(|(x, y)| (x + y) % q).collect();
        prop_assert_eq!(esum.values(), &expected[..]);
    }
}
