//! Monte Carlo harness: per-trial runs and the three sweeps.
//!
//! Trial `i` of a sweep draws its message and noise from a ChaCha8 stream
//! keyed by `(seed, i)`, so the same trial index sees the same message and
//! the same standard-normal draws in every cell; only the noise scale
//! changes with the SNR. Cells are therefore compared on matched seeds.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use trellis_ml_core::channel::{modulate, transmit};
use trellis_ml_core::decoders::{
    brute_force_ml, nll_confirm, sll_augmented_viterbi, sphere_branch_lower_bound, three_step_decode,
    viterbi_decode, Strategy, DEFAULT_MESSAGE_BUDGET,
};
use trellis_ml_core::metrics::negative_sll;
use trellis_ml_core::{ConvCode, Message, NllParams, NoiseModel, SymbolMapper, Trellis};

/// Message-space size up to which every trial is checked against brute force.
pub const ORACLE_LIMIT: u128 = 1 << 16;
const STATE_BUDGET: usize = 1 << 16;

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error("invalid sweep configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] trellis_ml_core::Error),
    #[error("{decoder} disagrees with the ML oracle at snr={snr}, N={len}, trial {trial}")]
    OracleMismatch {
        decoder: &'static str,
        snr: f64,
        len: usize,
        trial: u64,
    },
    #[error("worker pool: {0}")]
    Pool(String),
}

pub type Result<T, E = ExperimentError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DecoderKind {
    Viterbi,
    SllAugmented,
    ThreeStep,
}

impl DecoderKind {
    pub fn name(self) -> &'static str {
        match self {
            DecoderKind::Viterbi => "viterbi",
            DecoderKind::SllAugmented => "sll-augmented",
            DecoderKind::ThreeStep => "three-step",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "viterbi" => Some(DecoderKind::Viterbi),
            "sll-augmented" | "sll" => Some(DecoderKind::SllAugmented),
            "three-step" => Some(DecoderKind::ThreeStep),
            _ => None,
        }
    }
}

/// Where the guess given to the SLL-augmented search comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GuessMode {
    /// The transmitted message.
    #[default]
    Ideal,
    /// The output of the suboptimal decoder.
    Suboptimal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    SllInefficiency,
    OptProbability,
    Complexity,
}

impl SweepKind {
    pub fn name(self) -> &'static str {
        match self {
            SweepKind::SllInefficiency => "sll-ineff",
            SweepKind::OptProbability => "opt-prob",
            SweepKind::Complexity => "complexity",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "sll-ineff" => Some(SweepKind::SllInefficiency),
            "opt-prob" => Some(SweepKind::OptProbability),
            "complexity" => Some(SweepKind::Complexity),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrialConfig {
    pub code: ConvCode,
    pub mapper: SymbolMapper,
    /// Message lengths `N`.
    pub lens: Vec<usize>,
    /// SNR grid; `f64::INFINITY` gives a noiseless channel.
    pub snrs: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub decoders: Vec<DecoderKind>,
    pub nll: NllParams,
    pub strategy: Strategy,
    pub guess: GuessMode,
    /// Number of consecutive source symbols changed in the SLL test.
    pub perturbed: usize,
    /// Worker cap; `None` uses every core.
    pub threads: Option<usize>,
}

impl TrialConfig {
    /// Defaults: one trial, seed 0, full Viterbi plus the three-step decoder
    /// with default test parameters.
    pub fn new(code: ConvCode, mapper: SymbolMapper) -> Result<Self> {
        let nll = NllParams::default_for(&code, &mapper)?;
        Ok(TrialConfig {
            code,
            mapper,
            lens: vec![64],
            snrs: vec![4.0],
            trials: 1,
            seed: 0,
            decoders: vec![DecoderKind::Viterbi, DecoderKind::ThreeStep],
            nll,
            strategy: Strategy::default(),
            guess: GuessMode::default(),
            perturbed: 1,
            threads: None,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(ExperimentError::Config(m.to_string()));
        if self.trials == 0 {
            return fail("trials must be at least 1");
        }
        if self.lens.is_empty() || self.lens.contains(&0) {
            return fail("N grid must be nonempty and positive");
        }
        if self.snrs.is_empty() || self.snrs.iter().any(|s| !(*s > 0.0)) {
            return fail("snr grid must be nonempty and positive");
        }
        if self.perturbed == 0 {
            return fail("at least one symbol must be perturbed");
        }
        if self.threads == Some(0) {
            return fail("threads must be at least 1");
        }
        if self.nll.nu() != self.code.nu() {
            return fail("NLL parameters were built for another memory");
        }
        Ok(())
    }

    fn oracle_feasible(&self, len: usize) -> bool {
        (self.code.input_alphabet() as u128)
            .checked_pow(len as u32)
            .is_some_and(|c| c <= ORACLE_LIMIT)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecoderOutcome {
    pub kind: DecoderKind,
    pub message: Message,
    pub metric: f64,
    pub visited: u64,
    /// Visited states per message symbol.
    pub normalized: f64,
}

/// Everything measured in one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub snr: f64,
    pub len: usize,
    pub trial: u64,
    pub transmitted: Message,
    pub outcomes: Vec<DecoderOutcome>,
    /// Brute-force ML message and metric when the message space is small.
    pub oracle: Option<(Message, f64)>,
    /// Symbol errors of the suboptimal guess, when the three-step decoder ran.
    pub sub_symbol_errors: Option<usize>,
    /// Interior index drawn for the NLL test and its verdict on the
    /// transmitted codeword; `None` when `N` leaves no interior index.
    pub opt_m: Option<(usize, bool)>,
    /// Whether the sphere bound of the perturbed prefix exceeds the
    /// transmitted codeword's negative SLL.
    pub sll_accept: Option<bool>,
}

impl TrialRecord {
    pub fn outcome(&self, kind: DecoderKind) -> Option<&DecoderOutcome> {
        self.outcomes.iter().find(|o| o.kind == kind)
    }
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Interior indices `[(2M + 1) nu, N - (2M + 1) nu)` for the NLL test.
pub fn interior(params: &NllParams, len: usize) -> Option<std::ops::Range<usize>> {
    let reach = params.reach();
    (len > 2 * reach).then(|| reach..len - reach)
}

/// Runs one seeded trial at `(snr, len)`. Deterministic in
/// `(cfg.seed, trial)`.
pub fn run_trial(cfg: &TrialConfig, snr: f64, len: usize, trial: u64) -> Result<TrialRecord> {
    let code = &cfg.code;
    let mapper = &cfg.mapper;
    let q = code.q();
    let mut rng = trial_rng(cfg.seed, trial);
    let values = (0..len * code.k()).map(|_| rng.random_range(0..q)).collect();
    let transmitted = Message::new(code.k(), values)?;
    let cw = code.encode(&transmitted)?;
    let rx = transmit(&modulate(&cw, mapper), &NoiseModel::from_snr(snr)?, &mut rng);
    let trellis = Trellis::new(code, len, STATE_BUDGET)?;

    let mut outcomes = Vec::with_capacity(cfg.decoders.len());
    let mut sub_symbol_errors = None;
    for &kind in &cfg.decoders {
        let result = match kind {
            DecoderKind::Viterbi => viterbi_decode(&rx, &trellis, mapper)?,
            DecoderKind::SllAugmented => {
                let guess = match cfg.guess {
                    GuessMode::Ideal => transmitted.clone(),
                    GuessMode::Suboptimal => {
                        trellis_ml_core::decoders::suboptimal_decode(&rx, &trellis, mapper, cfg.strategy)?
                    }
                };
                sll_augmented_viterbi(&rx, &trellis, mapper, &guess)?
            }
            DecoderKind::ThreeStep => {
                let report = three_step_decode(&rx, &trellis, mapper, &cfg.nll, cfg.strategy)?;
                let tx = transmitted.symbol_indices(q);
                let errors = report
                    .guess
                    .symbol_indices(q)
                    .iter()
                    .zip(&tx)
                    .filter(|(a, b)| a != b)
                    .count();
                sub_symbol_errors = Some(errors);
                report.decode
            }
        };
        outcomes.push(DecoderOutcome {
            kind,
            normalized: result.stats.normalized(),
            visited: result.stats.visited_states,
            metric: result.metric.value(),
            message: result.message,
        });
    }

    let oracle = if cfg.oracle_feasible(len) {
        let b = brute_force_ml(&rx, code, mapper, len, DEFAULT_MESSAGE_BUDGET)?;
        Some((b.message, b.metric.value()))
    } else {
        None
    };

    let opt_m = match interior(&cfg.nll, len) {
        Some(range) => {
            let m = rng.random_range(range);
            Some((m, nll_confirm(&rx, &cw, m as isize, &cfg.nll, mapper)?))
        }
        None => None,
    };

    let sll_accept = {
        let nu = code.nu();
        let start = nu;
        let last = start + cfg.perturbed - 1;
        if last < len {
            let qk = code.input_alphabet() as u32;
            let mut idx = transmitted.symbol_indices(q);
            for v in &mut idx[start..=last] {
                *v = (*v + 1) % qk;
            }
            let perturbed = Message::from_symbol_indices(code.k(), q, &idx);
            let end = (last + nu - 1).min(rx.len() - 1);
            let lower = sphere_branch_lower_bound(&rx, &perturbed, end as isize, code, mapper)?.value();
            let actual = negative_sll(&rx, &cw, mapper)?.value();
            Some(lower > actual)
        } else {
            None
        }
    };

    Ok(TrialRecord {
        snr,
        len,
        trial,
        transmitted,
        outcomes,
        oracle,
        sub_symbol_errors,
        opt_m,
        sll_accept,
    })
}

/// Aggregates of one `(decoder, snr, N)` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub decoder: String,
    pub snr: f64,
    pub len: usize,
    pub trials: usize,
    /// Visited states per message symbol, per trial, in trial order.
    pub visited: Vec<f64>,
    /// `(agreements, checked trials)` against the ML reference.
    pub ml_matches: Option<(usize, usize)>,
    /// `(symbol errors, symbols)` of the suboptimal decoder.
    pub sub_symbol_errors: Option<(usize, usize)>,
    /// `(confirmed, tested)` NLL windows on the transmitted codeword.
    pub opt_m: Option<(usize, usize)>,
    /// `(accepted, tested)` SLL-test outcomes.
    pub sll_accept: Option<(usize, usize)>,
    /// Per-trial visited-state ratio against full Viterbi.
    pub ratio_to_viterbi: Vec<f64>,
}

fn rate(pair: Option<(usize, usize)>) -> Option<f64> {
    pair.and_then(|(a, b)| (b > 0).then(|| a as f64 / b as f64))
}

impl Cell {
    fn new(decoder: &str, snr: f64, len: usize, trials: usize) -> Self {
        Cell {
            decoder: decoder.to_string(),
            snr,
            len,
            trials,
            visited: Vec::new(),
            ml_matches: None,
            sub_symbol_errors: None,
            opt_m: None,
            sll_accept: None,
            ratio_to_viterbi: Vec::new(),
        }
    }

    pub fn mean_visited(&self) -> Option<f64> {
        if self.visited.is_empty() {
            return None;
        }
        Some(self.visited.iter().sum::<f64>() / self.visited.len() as f64)
    }

    /// Sample standard deviation.
    pub fn std_visited(&self) -> Option<f64> {
        let mean = self.mean_visited()?;
        let n = self.visited.len();
        if n < 2 {
            return Some(0.0);
        }
        let ss: f64 = self.visited.iter().map(|v| (v - mean) * (v - mean)).sum();
        Some((ss / (n - 1) as f64).sqrt())
    }

    pub fn median_visited(&self) -> Option<f64> {
        median(&self.visited)
    }

    pub fn max_visited(&self) -> Option<f64> {
        self.visited.iter().copied().reduce(f64::max)
    }

    pub fn ml_match_rate(&self) -> Option<f64> {
        rate(self.ml_matches)
    }

    pub fn sub_symbol_err(&self) -> Option<f64> {
        rate(self.sub_symbol_errors)
    }

    pub fn opt_m_rate(&self) -> Option<f64> {
        rate(self.opt_m)
    }

    pub fn sll_accept_rate(&self) -> Option<f64> {
        rate(self.sll_accept)
    }
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) })
}

/// Output of a sweep: one cell per `(decoder, snr, N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub kind: SweepKind,
    pub seed: u64,
    pub cells: Vec<Cell>,
}

impl SweepResult {
    pub fn cell(&self, decoder: &str, snr: f64, len: usize) -> Option<&Cell> {
        self.cells
            .iter()
            .find(|c| c.decoder == decoder && c.snr == snr && c.len == len)
    }
}

/// Runs every `(snr, N, trial)` combination, in parallel, and returns the
/// records grouped per `(snr, N)` in grid order.
fn run_grid(cfg: &TrialConfig) -> Result<Vec<((f64, usize), Vec<TrialRecord>)>> {
    cfg.validate()?;
    let jobs: Vec<(f64, usize, u64)> = cfg
        .snrs
        .iter()
        .flat_map(|&snr| {
            cfg.lens
                .iter()
                .flat_map(move |&len| (0..cfg.trials as u64).map(move |t| (snr, len, t)))
        })
        .collect();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cfg.threads {
        builder = builder.num_threads(t);
    }
    let pool = builder.build().map_err(|e| ExperimentError::Pool(e.to_string()))?;
    let records: Vec<TrialRecord> = pool.install(|| {
        jobs.par_iter()
            .map(|&(snr, len, t)| run_trial(cfg, snr, len, t))
            .collect::<Result<Vec<_>>>()
    })?;
    let mut grouped = Vec::new();
    let mut it = records.into_iter();
    for &snr in &cfg.snrs {
        for &len in &cfg.lens {
            grouped.push(((snr, len), it.by_ref().take(cfg.trials).collect()));
        }
    }
    Ok(grouped)
}

/// Agreement of `kind` with the brute-force oracle, or with full Viterbi
/// when the oracle is out of reach. An oracle disagreement is an error.
fn ml_check(records: &[TrialRecord], kind: DecoderKind) -> Result<Option<(usize, usize)>> {
    let mut agree = 0;
    let mut checked = 0;
    for rec in records {
        let Some(out) = rec.outcome(kind) else { continue };
        let reference = match (&rec.oracle, rec.outcome(DecoderKind::Viterbi)) {
            (Some((m, _)), _) => Some((m, true)),
            (None, Some(v)) if kind != DecoderKind::Viterbi => Some((&v.message, false)),
            _ => None,
        };
        let Some((reference, is_oracle)) = reference else { continue };
        checked += 1;
        if &out.message == reference {
            agree += 1;
        } else if is_oracle {
            return Err(ExperimentError::OracleMismatch {
                decoder: kind.name(),
                snr: rec.snr,
                len: rec.len,
                trial: rec.trial,
            });
        }
    }
    Ok((checked > 0).then_some((agree, checked)))
}

fn decoder_cell(kind: DecoderKind, snr: f64, len: usize, records: &[TrialRecord]) -> Result<Cell> {
    let mut cell = Cell::new(kind.name(), snr, len, records.len());
    cell.visited = records
        .iter()
        .filter_map(|r| r.outcome(kind).map(|o| o.normalized))
        .collect();
    cell.ml_matches = ml_check(records, kind)?;
    if kind != DecoderKind::Viterbi {
        cell.ratio_to_viterbi = records
            .iter()
            .filter_map(|r| {
                let own = r.outcome(kind)?.visited as f64;
                let full = r.outcome(DecoderKind::Viterbi)?.visited as f64;
                Some(own / full)
            })
            .collect();
    }
    Ok(cell)
}

fn with_decoders(cfg: &TrialConfig, kinds: &[DecoderKind]) -> TrialConfig {
    let mut cfg = cfg.clone();
    cfg.decoders = kinds.to_vec();
    cfg
}

/// SLL-test acceptance and pruning efficiency with an ideal guess: for every
/// cell, the rate at which the sphere bound of a prefix with
/// `cfg.perturbed` changed symbols exceeds the transmitted codeword's
/// negative SLL, and the visited-state ratio of the SLL-augmented search
/// against full Viterbi.
pub fn sll_inefficiency_sweep(cfg: &TrialConfig) -> Result<SweepResult> {
    let mut cfg = with_decoders(cfg, &[DecoderKind::Viterbi, DecoderKind::SllAugmented]);
    cfg.guess = GuessMode::Ideal;
    let mut cells = Vec::new();
    for ((snr, len), records) in run_grid(&cfg)? {
        cells.push(decoder_cell(DecoderKind::Viterbi, snr, len, &records)?);
        let mut sll = decoder_cell(DecoderKind::SllAugmented, snr, len, &records)?;
        let tested: Vec<bool> = records.iter().filter_map(|r| r.sll_accept).collect();
        if !tested.is_empty() {
            sll.sll_accept = Some((tested.iter().filter(|&&a| a).count(), tested.len()));
        }
        cells.push(sll);
    }
    Ok(SweepResult {
        kind: SweepKind::SllInefficiency,
        seed: cfg.seed,
        cells,
    })
}

/// Confirmation rate of the NLL test on the transmitted codeword at a
/// uniformly drawn interior index.
pub fn opt_probability_sweep(cfg: &TrialConfig) -> Result<SweepResult> {
    let cfg = with_decoders(cfg, &[]);
    for &len in &cfg.lens {
        if interior(&cfg.nll, len).is_none() {
            return Err(ExperimentError::Config(format!(
                "N = {len} leaves no interior index for a window reach of {}",
                cfg.nll.reach()
            )));
        }
    }
    let mut cells = Vec::new();
    for ((snr, len), records) in run_grid(&cfg)? {
        let mut cell = Cell::new("nll-test", snr, len, records.len());
        let hits = records.iter().filter(|r| matches!(r.opt_m, Some((_, true)))).count();
        cell.opt_m = Some((hits, records.len()));
        cells.push(cell);
    }
    Ok(SweepResult {
        kind: SweepKind::OptProbability,
        seed: cfg.seed,
        cells,
    })
}

/// Visited states of the three-step decoder against full Viterbi, with the
/// suboptimal decoder's symbol error rate.
pub fn complexity_sweep(cfg: &TrialConfig) -> Result<SweepResult> {
    let mut kinds = vec![DecoderKind::Viterbi, DecoderKind::ThreeStep];
    if cfg.decoders.contains(&DecoderKind::SllAugmented) {
        kinds.push(DecoderKind::SllAugmented);
    }
    let cfg = with_decoders(cfg, &kinds);
    let mut cells = Vec::new();
    for ((snr, len), records) in run_grid(&cfg)? {
        for &kind in &kinds {
            let mut cell = decoder_cell(kind, snr, len, &records)?;
            if kind == DecoderKind::ThreeStep {
                let errors: usize = records.iter().filter_map(|r| r.sub_symbol_errors).sum();
                cell.sub_symbol_errors = Some((errors, records.len() * len));
            }
            cells.push(cell);
        }
    }
    Ok(SweepResult {
        kind: SweepKind::Complexity,
        seed: cfg.seed,
        cells,
    })
}

pub fn run_sweep(kind: SweepKind, cfg: &TrialConfig) -> Result<SweepResult> {
    match kind {
        SweepKind::SllInefficiency => sll_inefficiency_sweep(cfg),
        SweepKind::OptProbability => opt_probability_sweep(cfg),
        SweepKind::Complexity => complexity_sweep(cfg),
    }
}
