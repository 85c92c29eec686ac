//! polarq: polar codes over prime fields from the command line.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 domain rejection
//! (non-mixing kernel, non-symmetric channel).
//!
//! Every file-writing command also writes `<output>.manifest.json`
//! describing the run; identical manifests reproduce byte-identical
//! outputs. Worker-count flags are excluded from the manifest because
//! results do not depend on them.

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use polarq::channel::{ChannelError, RNG_CONTRACT};
use polarq::construction::{
    construct_code, derive_seed, erasure_profile, load_code, save_code, ScoreMethod,
    SelectionTarget,
};
use polarq::decoder::codeword_posteriors;
use polarq::polarlab::polarization_stats;
use polarq::{
    check_mixing, decode_fast, encode_fast, ChannelKind, ChannelModel, CodeSpec, FieldMatrix,
    Kernel, PrimeModulus,
};
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "polarq",
    version,
    about = "Polar coding over prime fields with arbitrary mixing kernels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a kernel: invertibility and the mixing condition.
    KernelCheck(KernelCheckArgs),
    /// Build a code for a channel and write it with its index scores.
    Construct(ConstructArgs),
    /// Encode a message file into a codeword file.
    Encode(EncodeArgs),
    /// Decode a received-symbol file back into a message file.
    Decode(DecodeArgs),
    /// Monte-Carlo block-error simulation of a stored code.
    Simulate(SimulateArgs),
    /// Exact polarization sweep on the erasure channel.
    Polarize(PolarizeArgs),
}

#[derive(Args)]
struct KernelCheckArgs {
    /// Field size (prime).
    #[arg(long)]
    q: u64,
    /// Matrix literal, e.g. [[1,0],[1,1]].
    #[arg(long)]
    matrix: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Exact,
    Mc,
}

#[derive(Args)]
struct ConstructArgs {
    #[arg(long)]
    q: u64,
    /// Kernel matrix literal.
    #[arg(long)]
    kernel: String,
    /// Number of recursion levels; block length is k^t.
    #[arg(long)]
    t: u32,
    /// Channel spec: bec:<eps>, qsc:<p> or custom:<path>.
    #[arg(long)]
    channel: String,
    /// Target rate: keep the ceil(rate * n) best indices.
    #[arg(long, conflicts_with = "threshold")]
    rate: Option<f64>,
    /// Score threshold: keep every index scoring at or below it.
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long, value_enum)]
    method: MethodArg,
    /// Monte-Carlo trials (mc method only).
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: u64,
    /// Worker threads for Monte-Carlo scoring.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Output path for the code JSON.
    #[arg(long)]
    out: PathBuf,
    /// Output path for the scores CSV (default: <out>.scores.csv).
    #[arg(long)]
    scores: Option<PathBuf>,
}

#[derive(Args)]
struct EncodeArgs {
    #[arg(long)]
    code: PathBuf,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DecodeArgs {
    #[arg(long)]
    code: PathBuf,
    /// Channel the symbols were received from (defines the posteriors).
    #[arg(long)]
    channel: String,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    code: PathBuf,
    #[arg(long)]
    channel: String,
    #[arg(long)]
    trials: u64,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PolarizeArgs {
    #[arg(long)]
    q: u64,
    #[arg(long)]
    kernel: String,
    /// Must be an erasure channel bec:<eps>.
    #[arg(long)]
    channel: String,
    #[arg(long = "t-max")]
    t_max: u32,
    #[arg(long)]
    gamma: f64,
    #[arg(long, default_value_t = 0.1)]
    tau: f64,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct RunManifest {
    command: String,
    flags: BTreeMap<String, String>,
    seed: Option<u64>,
    versions: Versions,
    outputs: Vec<String>,
}

#[derive(Serialize)]
struct Versions {
    package: String,
    rng: String,
}

impl RunManifest {
    fn new(command: &str, seed: Option<u64>) -> Self {
        RunManifest {
            command: command.to_string(),
            flags: BTreeMap::new(),
            seed,
            versions: Versions {
                package: env!("CARGO_PKG_VERSION").to_string(),
                rng: RNG_CONTRACT.to_string(),
            },
            outputs: Vec::new(),
        }
    }

    fn flag(mut self, name: &str, value: impl ToString) -> Self {
        self.flags.insert(name.to_string(), value.to_string());
        self
    }

    fn write_beside(mut self, primary: &Path, outputs: &[&Path]) -> Result<()> {
        self.outputs = outputs.iter().map(|p| p.display().to_string()).collect();
        let mut text = serde_json::to_string_pretty(&self)?;
        text.push('\n');
        let path = manifest_path(primary);
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }
}

fn manifest_path(primary: &Path) -> PathBuf {
    let mut name = primary
        .file_name()
        .map(|n| n.to_os_string())
        .unwrap_or_default();
    name.push(".manifest.json");
    primary.with_file_name(name)
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(1);
        }
    }
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::KernelCheck(args) => cmd_kernel_check(args),
        Command::Construct(args) => cmd_construct(args),
        Command::Encode(args) => cmd_encode(args),
        Command::Decode(args) => cmd_decode(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Polarize(args) => cmd_polarize(args),
    }
}

fn parse_matrix(q: PrimeModulus, literal: &str) -> Result<FieldMatrix> {
    let rows: Vec<Vec<u64>> = serde_json::from_str(literal)
        .with_context(|| format!("matrix literal '{literal}' is not a [[..],[..]] array"))?;
    FieldMatrix::from_rows(&rows, q).map_err(|e| anyhow!(e))
}

fn parse_kernel(q: u64, literal: &str) -> Result<Kernel> {
    let q = PrimeModulus::new(q).map_err(|e| anyhow!(e))?;
    let matrix = parse_matrix(q, literal)?;
    Kernel::new(matrix, q).map_err(|e| anyhow!(e))
}

/// Parses a channel spec; returns the domain-rejection exit code for
/// asymmetric custom matrices instead of an error.
fn parse_channel(q: PrimeModulus, spec: &str) -> Result<std::result::Result<ChannelModel, i32>> {
    match ChannelModel::parse(q, spec) {
        Ok(ch) => Ok(Ok(ch)),
        Err(ChannelError::NotSymmetric) => {
            eprintln!("channel rejected: transition matrix is not symmetric");
            Ok(Err(2))
        }
        Err(e) => Err(anyhow!(e)),
    }
}

fn cmd_kernel_check(args: KernelCheckArgs) -> Result<i32> {
    let q = PrimeModulus::new(args.q).map_err(|e| anyhow!(e))?;
    let matrix = parse_matrix(q, &args.matrix)?;
    let report = check_mixing(&matrix, q).map_err(|e| anyhow!(e))?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(if report.mixing { 0 } else { 2 })
}

fn cmd_construct(args: ConstructArgs) -> Result<i32> {
    let kernel = parse_kernel(args.q, &args.kernel)?;
    let ch = match parse_channel(kernel.q(), &args.channel)? {
        Ok(ch) => ch,
        Err(code) => return Ok(code),
    };
    let target = match (args.rate, args.threshold) {
        (Some(rate), None) => SelectionTarget::Rate(rate),
        (None, Some(delta)) => SelectionTarget::Threshold(delta),
        _ => bail!("exactly one of --rate or --threshold is required"),
    };
    let method = match args.method {
        MethodArg::Exact => ScoreMethod::Exact,
        MethodArg::Mc => {
            let trials = args
                .trials
                .ok_or_else(|| anyhow!("--method mc requires --trials"))?;
            ScoreMethod::MonteCarlo { trials }
        }
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.threads)
        .build()?;
    let (code, scores) = pool
        .install(|| construct_code(&ch, &kernel, args.t, target, method, args.seed))
        .map_err(|e| anyhow!(e))?;

    save_code(&code, &args.out).map_err(|e| anyhow!(e))?;
    let scores_path = args
        .scores
        .clone()
        .unwrap_or_else(|| default_scores_path(&args.out));
    let mut csv = String::from("index,score,stderr\n");
    for s in &scores {
        match s.stderr {
            Some(err) => csv.push_str(&format!("{},{},{}\n", s.index, s.score, err)),
            None => csv.push_str(&format!("{},{},\n", s.index, s.score)),
        }
    }
    std::fs::write(&scores_path, csv)?;

    let mut manifest = RunManifest::new("construct", Some(args.seed))
        .flag("q", args.q)
        .flag("kernel", &args.kernel)
        .flag("t", args.t)
        .flag("channel", &args.channel)
        .flag(
            "method",
            match args.method {
                MethodArg::Exact => "exact",
                MethodArg::Mc => "mc",
            },
        );
    if let Some(rate) = args.rate {
        manifest = manifest.flag("rate", rate);
    }
    if let Some(delta) = args.threshold {
        manifest = manifest.flag("threshold", delta);
    }
    if let Some(trials) = args.trials {
        manifest = manifest.flag("trials", trials);
    }
    manifest.write_beside(&args.out, &[&args.out, &scores_path])?;

    eprintln!(
        "constructed n = {}, |S| = {}, rate = {}",
        code.n(),
        code.dimension(),
        code.rate()
    );
    Ok(0)
}

fn default_scores_path(out: &Path) -> PathBuf {
    let mut name = out
        .file_stem()
        .map(|n| n.to_os_string())
        .unwrap_or_default();
    name.push(".scores.csv");
    out.with_file_name(name)
}

fn read_symbols(path: &Path, q: u64) -> Result<Vec<u64>> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if line == "e" {
            out.push(q); // erasure mark
        } else {
            let v: u64 = line.parse().with_context(|| {
                format!("{}:{}: bad symbol '{line}'", path.display(), lineno + 1)
            })?;
            out.push(v);
        }
    }
    Ok(out)
}

fn write_symbols(path: &Path, symbols: &[u64], erasure: Option<u64>) -> Result<()> {
    let mut text = String::new();
    for &s in symbols {
        if Some(s) == erasure {
            text.push_str("e\n");
        } else {
            text.push_str(&format!("{s}\n"));
        }
    }
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn cmd_encode(args: EncodeArgs) -> Result<i32> {
    let code = load_code(&args.code).map_err(|e| anyhow!(e))?;
    let msg = read_symbols(&args.input, code.kernel().q().get())?;
    let ubar = code.extend_message(&msg).map_err(|e| anyhow!(e))?;
    let z = encode_fast(&ubar, code.kernel(), code.t()).map_err(|e| anyhow!(e))?;
    write_symbols(&args.out, &z, None)?;
    RunManifest::new("encode", None)
        .flag("code", args.code.display())
        .flag("in", args.input.display())
        .write_beside(&args.out, &[&args.out])?;
    Ok(0)
}

fn cmd_decode(args: DecodeArgs) -> Result<i32> {
    let code = load_code(&args.code).map_err(|e| anyhow!(e))?;
    let q = code.kernel().q();
    let ch = match parse_channel(q, &args.channel)? {
        Ok(ch) => ch,
        Err(exit) => return Ok(exit),
    };
    let received = read_symbols(&args.input, q.get())?;
    let post = ch.posteriors(&received).map_err(|e| anyhow!(e))?;
    let outcome = decode_fast(&post, &code).map_err(|e| anyhow!(e))?;
    if outcome.inconsistent {
        eprintln!("warning: conditioning contradicted the frozen values; output is best-effort");
    }
    write_symbols(&args.out, &code.restrict_message(&outcome.u_hat), None)?;
    RunManifest::new("decode", None)
        .flag("code", args.code.display())
        .flag("channel", &args.channel)
        .flag("in", args.input.display())
        .write_beside(&args.out, &[&args.out])?;
    Ok(0)
}

/// One simulation trial: seeded message draw, transmission, fast decoding.
fn simulate_trial(code: &CodeSpec, ch: &ChannelModel, master: u64, trial: u64) -> Result<bool> {
    let trial_seed = derive_seed(master, trial);
    let q = code.kernel().q().get();
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(derive_seed(trial_seed, 0));
    let msg: Vec<u64> = (0..code.dimension()).map(|_| rng.next_u64() % q).collect();
    let ubar = code.extend_message(&msg).map_err(|e| anyhow!(e))?;
    let post =
        codeword_posteriors(code, &ubar, ch, derive_seed(trial_seed, 1)).map_err(|e| anyhow!(e))?;
    let outcome = decode_fast(&post, code).map_err(|e| anyhow!(e))?;
    Ok(outcome.u_hat != ubar)
}

fn cmd_simulate(args: SimulateArgs) -> Result<i32> {
    let code = load_code(&args.code).map_err(|e| anyhow!(e))?;
    let ch = match parse_channel(code.kernel().q(), &args.channel)? {
        Ok(ch) => ch,
        Err(exit) => return Ok(exit),
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.threads)
        .build()?;
    let block_errors: u64 = pool.install(|| {
        (0..args.trials)
            .into_par_iter()
            .map(|trial| simulate_trial(&code, &ch, args.seed, trial).map(u64::from))
            .try_reduce(|| 0, |a, b| Ok(a + b))
    })?;

    let bler = block_errors as f64 / args.trials as f64;
    let entropy_bound = match ch.kind() {
        ChannelKind::Erasure { epsilon } => {
            let profile =
                erasure_profile(code.kernel(), *epsilon, code.t()).map_err(|e| anyhow!(e))?;
            let log_q = (code.kernel().q().get() as f64).log2();
            code.message_indices()
                .iter()
                .map(|&i| profile.values()[i])
                .sum::<f64>()
                * log_q
        }
        _ => f64::NAN,
    };
    let csv = format!(
        "trials,block_errors,bler,entropy_bound\n{},{},{},{}\n",
        args.trials, block_errors, bler, entropy_bound
    );

    match &args.out {
        Some(path) => {
            std::fs::write(path, csv)?;
            RunManifest::new("simulate", Some(args.seed))
                .flag("code", args.code.display())
                .flag("channel", &args.channel)
                .flag("trials", args.trials)
                .write_beside(path, &[path])?;
        }
        None => print!("{csv}"),
    }
    Ok(0)
}

fn cmd_polarize(args: PolarizeArgs) -> Result<i32> {
    let kernel = parse_kernel(args.q, &args.kernel)?;
    let ch = match parse_channel(kernel.q(), &args.channel)? {
        Ok(ch) => ch,
        Err(exit) => return Ok(exit),
    };
    let ChannelKind::Erasure { epsilon } = ch.kind() else {
        bail!("polarize requires an erasure channel (bec:<eps>)");
    };

    let profiles: Vec<_> = (1..=args.t_max)
        .map(|t| erasure_profile(&kernel, *epsilon, t))
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| anyhow!(e))?;
    let stats = polarization_stats(&profiles, args.gamma, args.tau);

    let mut csv = String::from("t,mean,fraction_tau,fraction_gamma_t,potential\n");
    for s in &stats {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            s.t, s.mean, s.fraction_tau, s.fraction_gamma_t, s.potential
        ));
    }
    match &args.out {
        Some(path) => {
            std::fs::write(path, &csv)?;
            RunManifest::new("polarize", None)
                .flag("q", args.q)
                .flag("kernel", &args.kernel)
                .flag("channel", &args.channel)
                .flag("t-max", args.t_max)
                .flag("gamma", args.gamma)
                .flag("tau", args.tau)
                .write_beside(path, &[path])?;
        }
        None => print!("{csv}"),
    }
    Ok(0)
}
