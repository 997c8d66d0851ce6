//! Command-line front end.
//!
//! Exit status: 0 on success, 1 on usage or configuration errors, 2 on
//! runtime failures (contract violations, exceeded budgets, I/O).
//! Flags override values read from `--config`.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use trellis_ml_core::channel::signal_distances;
use trellis_ml_core::decoders::{
    brute_force_ml, sll_augmented_viterbi, suboptimal_decode, three_step_decode, viterbi_decode,
    Boundary, ConditionA, Strategy, DEFAULT_MESSAGE_BUDGET,
};
use trellis_ml_core::hmm::{hmm_viterbi, GaussianObservation, HmmSystem};
use trellis_ml_core::{ConvCode, Message, NllParams, PrimeField, ReceivedSequence, SymbolMapper, Trellis};

use crate::config::{parse_list, parse_matrix, ConfigFile};
use crate::csv;
use crate::experiments::{run_sweep, run_trial, DecoderKind, ExperimentError, GuessMode, SweepKind, TrialConfig};

const THREADS_ENV: &str = "TRELLIS_ML_THREADS";
const STATE_BUDGET: usize = 1 << 20;

#[derive(Debug)]
enum CliError {
    Usage(String),
    Runtime(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

impl From<trellis_ml_core::Error> for CliError {
    fn from(e: trellis_ml_core::Error) -> Self {
        match e {
            trellis_ml_core::Error::Config(_) => CliError::Usage(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<ExperimentError> for CliError {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::Config(_) | ExperimentError::Core(trellis_ml_core::Error::Config(_)) => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<crate::config::ConfigError> for CliError {
    fn from(e: crate::config::ConfigError) -> Self {
        CliError::Usage(e.to_string())
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

#[derive(Parser, Debug)]
#[command(name = "trellis-ml", version, about = "ML decoding of convolutional codes with neighborhood optimality tests")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Encode a message and print one codeword symbol per line.
    Encode {
        #[command(flatten)]
        code: CodeArgs,
        /// Comma-separated message values, k per time index.
        #[arg(long)]
        msg: Option<String>,
        /// Read newline-separated message values from a file.
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// Decode received samples.
    Decode {
        #[command(flatten)]
        code: CodeArgs,
        #[command(flatten)]
        nll: NllArgs,
        /// Comma-separated received samples, n per time index.
        #[arg(long, allow_hyphen_values = true)]
        rx: Option<String>,
        /// Read newline-separated samples from a file.
        #[arg(long)]
        file: Option<PathBuf>,
        /// viterbi, sll-augmented, three-step, brute or hmm-viterbi.
        #[arg(long, default_value = "viterbi")]
        decoder: String,
        /// decision-feedback or list:L.
        #[arg(long)]
        strategy: Option<String>,
    },
    /// Run one seeded trial and print its record.
    Simulate {
        #[command(flatten)]
        code: CodeArgs,
        #[command(flatten)]
        nll: NllArgs,
        #[command(flatten)]
        channel: ChannelArgs,
        #[arg(long)]
        len: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Trial index within the seed's stream family.
        #[arg(long, default_value_t = 0)]
        trial: u64,
        /// Comma-separated decoder names.
        #[arg(long)]
        decoder: Option<String>,
        #[arg(long)]
        strategy: Option<String>,
    },
    /// Run a Monte Carlo sweep and write CSV.
    Sweep {
        #[command(flatten)]
        code: CodeArgs,
        #[command(flatten)]
        nll: NllArgs,
        /// sll-ineff, opt-prob or complexity.
        #[arg(long)]
        kind: Option<String>,
        /// Comma-separated SNR grid.
        #[arg(long)]
        snr: Option<String>,
        /// Comma-separated message lengths.
        #[arg(long)]
        len: Option<String>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        decoder: Option<String>,
        /// ideal or suboptimal.
        #[arg(long)]
        guess: Option<String>,
        #[arg(long)]
        strategy: Option<String>,
        /// Source symbols changed in the SLL test.
        #[arg(long)]
        perturbed: Option<usize>,
        #[arg(long)]
        threads: Option<usize>,
        /// Output path; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug, Default)]
struct CodeArgs {
    /// Configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    q: Option<u32>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    nu: Option<usize>,
    /// Binary generators in octal, one per output, e.g. 7,5.
    #[arg(long)]
    octal: Option<String>,
    /// nu*k*n tap values, G[0] first, each k x n row-major.
    #[arg(long)]
    taps: Option<String>,
    /// `pam` or q comma-separated reals.
    #[arg(long)]
    map: Option<String>,
}

#[derive(Args, Debug, Default)]
struct NllArgs {
    #[arg(long)]
    xi: Option<f64>,
    #[arg(long = "big-m")]
    big_m: Option<usize>,
    /// literal or squared.
    #[arg(long = "condition-a")]
    condition_a: Option<String>,
    /// known-zero or clip.
    #[arg(long)]
    boundary: Option<String>,
}

#[derive(Args, Debug, Default)]
struct ChannelArgs {
    #[arg(long, conflicts_with = "sigma2")]
    snr: Option<f64>,
    #[arg(long)]
    sigma2: Option<f64>,
}

/// Parses `args` (program name first), runs the command and returns the
/// exit status. Diagnostics go to standard error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let status = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return status;
        }
    };
    match dispatch(cli.command) {
        Ok(out) => {
            print!("{out}");
            0
        }
        Err(e) => {
            match &e {
                CliError::Usage(m) | CliError::Runtime(m) => eprintln!("error: {m}"),
            }
            e.code()
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<ConfigFile> {
    match path {
        None => Ok(ConfigFile::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Runtime(format!("cannot read config {}: {e}", p.display())))?;
            Ok(ConfigFile::parse(&text)?)
        }
    }
}

fn flag_or<T: std::str::FromStr>(flag: Option<T>, file: &ConfigFile, key: &str) -> Result<Option<T>> {
    match flag {
        Some(v) => Ok(Some(v)),
        None => Ok(file.parsed(key)?),
    }
}

fn str_or<'a>(flag: &'a Option<String>, file: &'a ConfigFile, key: &str) -> Option<&'a str> {
    flag.as_deref().or_else(|| file.get(key))
}

fn list_arg<T: std::str::FromStr>(name: &str, s: &str) -> Result<Vec<T>> {
    parse_list(s).map_err(|e| usage(format!("--{name}: {e}")))
}

fn code_present(args: &CodeArgs, file: &ConfigFile) -> bool {
    args.q.is_some() || args.octal.is_some() || args.taps.is_some() || file.has_section("code")
}

fn resolve_code(args: &CodeArgs, file: &ConfigFile) -> Result<(ConvCode, SymbolMapper)> {
    let q: u32 = flag_or(args.q, file, "code.q")?.ok_or_else(|| usage("missing required option --q"))?;
    let k = flag_or(args.k, file, "code.k")?;
    let n = flag_or(args.n, file, "code.n")?;
    let nu = flag_or(args.nu, file, "code.nu")?;
    let code = if let Some(octal) = str_or(&args.octal, file, "code.octal") {
        if q != 2 {
            return Err(usage(format!("--octal describes binary codes but q = {q}")));
        }
        let gens = octal
            .split(',')
            .map(|t| u32::from_str_radix(t.trim(), 8).map_err(|_| usage(format!("--octal: `{}` is not octal", t.trim()))))
            .collect::<Result<Vec<_>>>()?;
        let code = ConvCode::from_octal(&gens)?;
        for (name, given, actual) in [("k", k, code.k()), ("n", n, code.n()), ("nu", nu, code.nu())] {
            if given.is_some_and(|g| g != actual) {
                return Err(usage(format!("--{name} disagrees with --octal, which implies {actual}")));
            }
        }
        code
    } else if let Some(taps) = str_or(&args.taps, file, "code.taps") {
        let taps: Vec<u32> = list_arg("taps", taps)?;
        let n = n.ok_or_else(|| usage("missing required option --n"))?;
        let nu = nu.ok_or_else(|| usage("missing required option --nu"))?;
        let field = PrimeField::new(q)?;
        ConvCode::new(field, k.unwrap_or(1), n, nu, &taps)?
    } else {
        return Err(usage("missing required option --octal or --taps"));
    };
    let mapper = match str_or(&args.map, file, "code.map") {
        None | Some("pam") => SymbolMapper::pam(q),
        Some(table) => {
            let mapper = SymbolMapper::from_table(list_arg("map", table)?)?;
            if mapper.q() != q {
                return Err(usage(format!("--map has {} entries but q = {q}", mapper.q())));
            }
            mapper
        }
    };
    Ok((code, mapper))
}

/// The code options, or the binary (7,5) code with BPSK when none are given.
fn resolve_code_or_default(args: &CodeArgs, file: &ConfigFile) -> Result<(ConvCode, SymbolMapper)> {
    if code_present(args, file) {
        resolve_code(args, file)
    } else {
        Ok((ConvCode::from_octal(&[0o7, 0o5])?, SymbolMapper::pam(2)))
    }
}

fn resolve_nll(args: &NllArgs, file: &ConfigFile, code: &ConvCode, mapper: &SymbolMapper) -> Result<NllParams> {
    let (d_min2, d_max2) = signal_distances(mapper, code.n(), STATE_BUDGET)?;
    let xi = flag_or(args.xi, file, "nll.xi")?;
    let big_m = flag_or(args.big_m, file, "nll.big_m")?;
    let mut params = match (xi, big_m) {
        (None, None) => NllParams::default_for(code, mapper)?,
        (Some(xi), None) => NllParams::with_xi(code, d_min2, d_max2, xi)?,
        (xi, Some(m)) => NllParams::new(xi.unwrap_or(d_min2 / 4.0), m, d_min2, d_max2, code.nu())?,
    };
    match str_or(&args.condition_a, file, "nll.condition_a") {
        None => {}
        Some("literal") => params = params.with_condition_a(ConditionA::Literal),
        Some("squared") => params = params.with_condition_a(ConditionA::Squared),
        Some(other) => return Err(usage(format!("--condition-a: unknown mode `{other}`"))),
    }
    match str_or(&args.boundary, file, "nll.boundary") {
        None => {}
        Some("known-zero") => params = params.with_boundary(Boundary::KnownZero),
        Some("clip") => params = params.with_boundary(Boundary::Clip),
        Some(other) => return Err(usage(format!("--boundary: unknown rule `{other}`"))),
    }
    Ok(params)
}

fn parse_strategy(s: Option<&str>) -> Result<Strategy> {
    match s {
        None | Some("decision-feedback") => Ok(Strategy::DecisionFeedback),
        Some(other) => {
            let width = other
                .strip_prefix("list:")
                .and_then(|w| w.parse().ok())
                .ok_or_else(|| usage(format!("--strategy: expected decision-feedback or list:L, got `{other}`")))?;
            Ok(Strategy::List(width))
        }
    }
}

fn parse_decoders(s: &str) -> Result<Vec<DecoderKind>> {
    s.split(',')
        .map(|d| DecoderKind::parse(d.trim()).ok_or_else(|| usage(format!("--decoder: unknown decoder `{}`", d.trim()))))
        .collect()
}

fn read_values<T: std::str::FromStr>(inline: &Option<String>, file: &Option<PathBuf>, flag: &str) -> Result<Vec<T>> {
    match (inline, file) {
        (Some(_), Some(_)) => Err(usage(format!("give either --{flag} or --file, not both"))),
        (Some(s), None) => list_arg(flag, s),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Runtime(format!("cannot read {}: {e}", path.display())))?;
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .map(|l| l.parse().map_err(|_| usage(format!("--file: cannot parse `{l}`"))))
                .collect()
        }
        (None, None) => Err(usage(format!("missing required option --{flag} or --file"))),
    }
}

fn join<T: ToString>(values: impl IntoIterator<Item = T>) -> String {
    values.into_iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

fn encode_cmd(code_args: &CodeArgs, msg: &Option<String>, file: &Option<PathBuf>) -> Result<String> {
    let cfg = load_config(code_args.config.as_deref())?;
    let (code, _) = resolve_code(code_args, &cfg)?;
    let values: Vec<u32> = read_values(msg, file, "msg")?;
    if !values.len().is_multiple_of(code.k()) {
        return Err(usage(format!("--msg has {} values, not a multiple of k = {}", values.len(), code.k())));
    }
    let msg = Message::new(code.k(), values)?;
    let cw = code.encode(&msg)?;
    let mut out = String::new();
    for sym in cw.symbols() {
        let _ = writeln!(out, "{}", join(sym));
    }
    Ok(out)
}

fn decode_cmd(
    code_args: &CodeArgs,
    nll: &NllArgs,
    rx: &Option<String>,
    file: &Option<PathBuf>,
    decoder: &str,
    strategy: &Option<String>,
) -> Result<String> {
    let cfg = load_config(code_args.config.as_deref())?;
    let samples: Vec<f64> = read_values(rx, file, "rx")?;
    if decoder == "hmm-viterbi" {
        return hmm_decode(&cfg, samples);
    }
    let (code, mapper) = resolve_code(code_args, &cfg)?;
    let n = code.n();
    if !samples.len().is_multiple_of(n) || samples.len() / n < code.nu() {
        return Err(CliError::Runtime(format!(
            "{} samples do not form N + nu - 1 symbols of n = {n} coordinates",
            samples.len()
        )));
    }
    let len = samples.len() / n + 1 - code.nu();
    let rx = ReceivedSequence::new(n, samples)?;
    let trellis = Trellis::new(&code, len, STATE_BUDGET)?;
    let strategy = parse_strategy(str_or(strategy, &cfg, "sweep.strategy"))?;
    let result = match decoder {
        "viterbi" => viterbi_decode(&rx, &trellis, &mapper)?,
        "brute" => brute_force_ml(&rx, &code, &mapper, len, DEFAULT_MESSAGE_BUDGET)?,
        "sll-augmented" => {
            let guess = suboptimal_decode(&rx, &trellis, &mapper, strategy)?;
            sll_augmented_viterbi(&rx, &trellis, &mapper, &guess)?
        }
        "three-step" => {
            let params = resolve_nll(nll, &cfg, &code, &mapper)?;
            three_step_decode(&rx, &trellis, &mapper, &params, strategy)?.decode
        }
        other => return Err(usage(format!("--decoder: unknown decoder `{other}`"))),
    };
    let mut out = String::new();
    let _ = writeln!(out, "message: {}", join(result.message.values()));
    let _ = writeln!(out, "metric: {}", csv::format_sig9(result.metric.value()));
    let _ = writeln!(out, "visited: {}", result.stats.visited_states);
    let _ = writeln!(out, "visited_per_t: {}", csv::format_sig9(result.stats.normalized()));
    Ok(out)
}

fn hmm_system(cfg: &ConfigFile) -> Result<HmmSystem<GaussianObservation>> {
    let need = |key: &str| cfg.get(key).ok_or_else(|| usage(format!("missing required key `{key}`")));
    let rows = parse_matrix(need("hmm.transitions")?).map_err(|e| usage(format!("`hmm.transitions`: {e}")))?;
    let process: Vec<u32> = cfg.list("hmm.process")?.ok_or_else(|| usage("missing required key `hmm.process`"))?;
    let points: Vec<f64> = cfg.list("hmm.points")?.ok_or_else(|| usage("missing required key `hmm.points`"))?;
    let dim: usize = cfg.parsed("hmm.dim")?.unwrap_or(1);
    let snr: f64 = cfg.parsed("hmm.snr")?.ok_or_else(|| usage("missing required key `hmm.snr`"))?;
    let nu: usize = cfg.parsed("hmm.nu")?.unwrap_or(1);
    let terminated: bool = cfg.parsed("hmm.terminated")?.unwrap_or(false);
    if dim == 0 || !points.len().is_multiple_of(dim) {
        return Err(usage("`hmm.points`: length is not a multiple of `hmm.dim`"));
    }
    let alphabet: u32 = cfg.parsed("hmm.alphabet")?.unwrap_or((points.len() / dim) as u32);
    if points.len() != alphabet as usize * dim {
        return Err(usage("`hmm.points`: expected `hmm.alphabet` points of `hmm.dim` reals"));
    }
    if !(snr > 0.0 && snr.is_finite()) {
        return Err(usage("`hmm.snr`: must be positive and finite"));
    }
    let (mut d_min2, mut d_max2) = (f64::INFINITY, 0.0f64);
    for a in 0..alphabet as usize {
        for b in a + 1..alphabet as usize {
            let d: f64 = (0..dim).map(|i| (points[a * dim + i] - points[b * dim + i]).powi(2)).sum();
            d_min2 = d_min2.min(d);
            d_max2 = d_max2.max(d);
        }
    }
    if !d_min2.is_finite() {
        d_min2 = 0.0;
    }
    let s = process.len();
    if rows.len() != s || rows.iter().any(|r| r.len() != s) {
        return Err(usage(format!("`hmm.transitions`: expected a {s} x {s} table")));
    }
    let flat: Vec<f64> = rows.into_iter().flatten().collect();
    let obs = GaussianObservation::new(points, dim, snr, d_min2, d_max2);
    Ok(HmmSystem::from_probabilities(&flat, process, alphabet, obs, nu, terminated)?)
}

fn hmm_decode(cfg: &ConfigFile, samples: Vec<f64>) -> Result<String> {
    let sys = hmm_system(cfg)?;
    let dim: usize = cfg.parsed("hmm.dim")?.unwrap_or(1);
    if samples.is_empty() || !samples.len().is_multiple_of(dim) {
        return Err(CliError::Runtime(format!("{} samples do not form observations of dimension {dim}", samples.len())));
    }
    let rx = ReceivedSequence::new(dim, samples)?;
    let dec = hmm_viterbi(&sys, &rx)?;
    let mut out = String::new();
    let _ = writeln!(out, "states: {}", join(&dec.states));
    let _ = writeln!(out, "metric: {}", csv::format_sig9(dec.metric));
    let _ = writeln!(out, "visited: {}", dec.stats.visited_states);
    Ok(out)
}

fn resolve_snr(channel: &ChannelArgs, cfg: &ConfigFile) -> Result<f64> {
    if let Some(snr) = channel.snr {
        return Ok(snr);
    }
    if let Some(s2) = channel.sigma2 {
        return Ok(1.0 / s2);
    }
    match (cfg.parsed::<f64>("channel.snr")?, cfg.parsed::<f64>("channel.sigma2")?) {
        (Some(_), Some(_)) => Err(usage("`channel.snr` and `channel.sigma2` are exclusive")),
        (Some(snr), None) => Ok(snr),
        (None, Some(s2)) => Ok(1.0 / s2),
        (None, None) => Ok(4.0),
    }
}

#[allow(clippy::too_many_arguments)]
fn simulate_cmd(
    code_args: &CodeArgs,
    nll: &NllArgs,
    channel: &ChannelArgs,
    len: Option<usize>,
    seed: Option<u64>,
    trial: u64,
    decoder: &Option<String>,
    strategy: &Option<String>,
) -> Result<String> {
    let cfg = load_config(code_args.config.as_deref())?;
    let (code, mapper) = resolve_code_or_default(code_args, &cfg)?;
    let params = resolve_nll(nll, &cfg, &code, &mapper)?;
    let snr = resolve_snr(channel, &cfg)?;
    let mut tc = TrialConfig::new(code, mapper)?;
    tc.nll = params;
    tc.snrs = vec![snr];
    if let Some(len) = len {
        tc.lens = vec![len];
    }
    tc.seed = flag_or(seed, &cfg, "channel.seed")?.unwrap_or(0);
    if let Some(d) = str_or(decoder, &cfg, "sweep.decoder") {
        tc.decoders = parse_decoders(d)?;
    }
    tc.strategy = parse_strategy(str_or(strategy, &cfg, "sweep.strategy"))?;
    tc.guess = GuessMode::Suboptimal;
    tc.validate()?;
    let rec = run_trial(&tc, snr, tc.lens[0], trial)?;
    let mut out = String::new();
    let _ = writeln!(out, "snr: {}", csv::format_sig9(snr));
    let _ = writeln!(out, "N: {}", rec.len);
    let _ = writeln!(out, "transmitted: {}", join(rec.transmitted.values()));
    for o in &rec.outcomes {
        let _ = writeln!(
            out,
            "{}: metric={} visited={} visited_per_t={} correct={}",
            o.kind.name(),
            csv::format_sig9(o.metric),
            o.visited,
            csv::format_sig9(o.normalized),
            o.message == rec.transmitted
        );
    }
    if let Some((m, metric)) = &rec.oracle {
        let _ = writeln!(out, "oracle: metric={} message={}", csv::format_sig9(*metric), join(m.values()));
    }
    if let Some(e) = rec.sub_symbol_errors {
        let _ = writeln!(out, "suboptimal_symbol_errors: {e}");
    }
    if let Some((m, ok)) = rec.opt_m {
        let _ = writeln!(out, "nll_test: m={m} confirmed={ok}");
    }
    if let Some(a) = rec.sll_accept {
        let _ = writeln!(out, "sll_test_accepts: {a}");
    }
    Ok(out)
}

fn threads(flag: Option<usize>, cfg: &ConfigFile) -> Result<Option<usize>> {
    if let Some(t) = flag_or(flag, cfg, "sweep.threads")? {
        return Ok(Some(t));
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| usage(format!("{THREADS_ENV}: cannot parse `{v}`"))),
        Err(_) => Ok(None),
    }
}

fn sweep_cmd(c: &Command) -> Result<String> {
    let Command::Sweep {
        code: code_args,
        nll,
        kind,
        snr,
        len,
        trials,
        seed,
        decoder,
        guess,
        strategy,
        perturbed,
        threads: thread_flag,
        out,
    } = c
    else {
        unreachable!("sweep_cmd called with another command")
    };
    let cfg = load_config(code_args.config.as_deref())?;
    let kind_name = str_or(kind, &cfg, "sweep.kind").ok_or_else(|| usage("missing required option --kind"))?;
    let kind = SweepKind::parse(kind_name).ok_or_else(|| usage(format!("--kind: unknown sweep `{kind_name}`")))?;
    let (code, mapper) = resolve_code_or_default(code_args, &cfg)?;
    let params = resolve_nll(nll, &cfg, &code, &mapper)?;
    let mut tc = TrialConfig::new(code, mapper)?;
    tc.nll = params;
    if let Some(s) = str_or(snr, &cfg, "sweep.snr") {
        tc.snrs = list_arg("snr", s)?;
    }
    tc.lens = match str_or(len, &cfg, "sweep.len") {
        Some(s) => list_arg("len", s)?,
        None if kind == SweepKind::OptProbability => vec![2048],
        None => vec![64],
    };
    tc.trials = flag_or(*trials, &cfg, "sweep.trials")?.unwrap_or(100);
    tc.seed = flag_or(*seed, &cfg, "sweep.seed")?.unwrap_or(0);
    if let Some(d) = str_or(decoder, &cfg, "sweep.decoder") {
        tc.decoders = parse_decoders(d)?;
    }
    tc.guess = match str_or(guess, &cfg, "sweep.guess") {
        None | Some("ideal") => GuessMode::Ideal,
        Some("suboptimal") => GuessMode::Suboptimal,
        Some(other) => return Err(usage(format!("--guess: unknown mode `{other}`"))),
    };
    tc.strategy = parse_strategy(str_or(strategy, &cfg, "sweep.strategy"))?;
    tc.perturbed = flag_or(*perturbed, &cfg, "sweep.perturbed")?.unwrap_or(1);
    tc.threads = threads(*thread_flag, &cfg)?;
    let result = run_sweep(kind, &tc)?;
    let text = csv::render(&result);
    match out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn dispatch(cmd: Command) -> Result<String> {
    match &cmd {
        Command::Encode { code, msg, file } => encode_cmd(code, msg, file),
        Command::Decode {
            code,
            nll,
            rx,
            file,
            decoder,
            strategy,
        } => decode_cmd(code, nll, rx, file, decoder, strategy),
        Command::Simulate {
            code,
            nll,
            channel,
            len,
            seed,
            trial,
            decoder,
            strategy,
        } => simulate_cmd(code, nll, channel, *len, *seed, *trial, decoder, strategy),
        Command::Sweep { .. } => sweep_cmd(&cmd),
    }
}
