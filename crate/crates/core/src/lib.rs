//! Maximum-likelihood decoding of convolutional codes over GF(q) and
//! maximum-likelihood sequence detection for first-order hidden Markov
//! systems.
//!
//! Besides the classic Viterbi search, the crate implements neighborhood
//! optimality tests: a source symbol of a candidate message can be
//! certified as belonging to the ML message using only the channel
//! observations in a fixed-size window around it. Combining a cheap
//! suboptimal decoder, these tests and a Viterbi search restricted to the
//! unconfirmed symbols gives an exact ML decoder whose work per time unit
//! approaches one Markov state at high SNR.
//!
//! The crate is `no_std` and only needs `alloc`.
//!
//! Module map:
//!
//! * [`galois`]: prime-field arithmetic.
//! * [`convcode`]: generator matrices, encoding, Markov states and trellis.
//! * [`channel`]: symbol mapping, Gaussian noise, signal distances.
//! * [`metrics`]: squared-distance metrics and the path-covering predicate.
//! * [`decoders`]: Viterbi, brute force, sum-likelihood bounds, the
//!   neighborhood test and the three-step decoder.
//! * [`hmm`]: the generic hidden-Markov framework.

#![no_std]

extern crate alloc;

pub mod channel;
pub mod convcode;
pub mod decoders;
pub mod galois;
pub mod hmm;
pub mod metrics;

mod error;

pub use error::Error;

pub use channel::{NoiseModel, ReceivedSequence, SymbolMapper};
pub use convcode::{Codeword, ConvCode, Message, Trellis};
pub use decoders::{ComplexityStats, DecodeResult, NllParams, SymbolSetSequence};
pub use galois::{FieldElement, PrimeField};

/// Result alias used throughout the crate.
pub type Result<T, E = Error> = core::result::Result<T, E>;
