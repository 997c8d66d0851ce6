//! Simulation harness, configuration files, CSV output and the command-line
//! front end for [`trellis_ml_core`].

pub mod cli;
pub mod config;
pub mod csv;
pub mod experiments;

pub use cli::run;
pub use experiments::{
    complexity_sweep, opt_probability_sweep, run_sweep, run_trial, sll_inefficiency_sweep, Cell,
    DecoderKind, GuessMode, SweepKind, SweepResult, TrialConfig, TrialRecord,
};
