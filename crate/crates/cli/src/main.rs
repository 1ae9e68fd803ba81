//! `qft-tones`: synthesize test signals, detect notes/chords/DTMF keys with a
//! simulated QFT, inspect QFT circuits and run the verification suite.
//!
//! Exit codes: 0 success, 1 detection or verification failure, 2 usage error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use qft_tones::audio::{read_wav, resample, synth_dtmf, synth_tone, write_wav};
use qft_tones::detect::{run_pipeline, Measurement, Mode, PipelineConfig, PipelineOutput};
use qft_tones::qcore::circuit_to_unitary;
use qft_tones::qft::{build_qft_circuit, render_decomposition, QftCircuitSpec};
use qft_tones::verify;

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const MAX_UNITARY_QUBITS: usize = 10;
const MAX_LISTED_QUBITS: usize = 24;

#[derive(Parser, Debug)]
#[command(name = "qft-tones", version, about = "QFT-based tone, chord and DTMF detection")]
struct Cli {
    /// Seed for every random draw (shot sampling, verification inputs)
    #[arg(long, global = true, env = "QFT_TONES_SEED", default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a synthesized WAV file
    Synth(SynthArgs),
    /// Detect frequencies in one or more WAV files
    Detect(DetectArgs),
    /// Print a QFT circuit as a gate list, operator string or matrix
    Qft(QftArgs),
    /// Run the built-in verification checks
    Verify,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum SynthKind {
    Tone,
    Chord,
    Dtmf,
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[arg(value_enum)]
    kind: SynthKind,
    /// Tone frequency in Hz; repeat for chords
    #[arg(long = "freq")]
    freqs: Vec<f64>,
    /// Per-tone weight, one per --freq (default: equal weights)
    #[arg(long = "weight")]
    weights: Vec<f64>,
    /// Keypad symbol for dtmf
    #[arg(long)]
    key: Option<char>,
    #[arg(long, default_value_t = 44100)]
    rate: u32,
    #[arg(long, default_value_t = 1024)]
    samples: usize,
    /// Peak amplitude in [0, 1]
    #[arg(long, default_value_t = 1.0)]
    amplitude: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ModeArg {
    Note,
    Chord,
    Dtmf,
    Raw,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Note => Mode::Note,
            ModeArg::Chord => Mode::Chord,
            ModeArg::Dtmf => Mode::Dtmf,
            ModeArg::Raw => Mode::Raw,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Text,
    Json,
}

#[derive(Args, Debug)]
struct DetectArgs {
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    #[arg(long, short = 'n', default_value_t = 10)]
    n_qubits: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Note)]
    mode: ModeArg,
    /// Sample this many shots instead of using exact probabilities
    #[arg(long)]
    shots: Option<u64>,
    /// Number of peaks to report (default: 2 note, 3 chord, 2 dtmf, 8 raw)
    #[arg(long)]
    top_k: Option<usize>,
    /// Ignore the 0 Hz bin
    #[arg(long)]
    exclude_dc: bool,
    /// Zero-pad inputs shorter than 2^n samples
    #[arg(long)]
    zero_pad: bool,
    /// Resample to this rate before encoding
    #[arg(long)]
    resample: Option<u32>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the measurement histogram as TSV
    #[arg(long)]
    dump_histogram: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct QftArgs {
    #[arg(long, short = 'n')]
    n: usize,
    #[arg(long)]
    inverse: bool,
    /// Omit the final swap layer
    #[arg(long)]
    no_swaps: bool,
    /// Print the dense unitary
    #[arg(long, conflicts_with = "decompose")]
    unitary: bool,
    /// Print the operator string, last-applied gate first
    #[arg(long)]
    decompose: bool,
}

/// A rejected flag combination, reported with exit code 2.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::from(EXIT_FAILURE)
            }
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Synth(args) => cmd_synth(&args),
        Command::Detect(args) => cmd_detect(&args, cli.seed),
        Command::Qft(args) => cmd_qft(&args),
        Command::Verify => Ok(cmd_verify(cli.seed)),
    }
}

fn cmd_synth(args: &SynthArgs) -> Result<ExitCode> {
    let signal = match args.kind {
        SynthKind::Tone | SynthKind::Chord => {
            if args.key.is_some() {
                return Err(usage("--key only applies to dtmf"));
            }
            if args.freqs.is_empty() {
                return Err(usage("at least one --freq is required"));
            }
            if args.kind == SynthKind::Tone && args.freqs.len() != 1 {
                return Err(usage("tone takes exactly one --freq; use chord for several"));
            }
            let weights = if args.weights.is_empty() {
                vec![1.0; args.freqs.len()]
            } else if args.weights.len() == args.freqs.len() {
                args.weights.clone()
            } else {
                return Err(usage("give one --weight per --freq"));
            };
            let tones: Vec<(f64, f64)> = args.freqs.iter().copied().zip(weights).collect();
            synth_tone(&tones, args.rate, args.samples, args.amplitude)?
        }
        SynthKind::Dtmf => {
            if !args.freqs.is_empty() || !args.weights.is_empty() {
                return Err(usage("dtmf takes --key, not --freq/--weight"));
            }
            let key = args.key.ok_or_else(|| usage("dtmf requires --key"))?;
            let mut s = synth_dtmf(key, args.rate, args.samples)?;
            for v in &mut s.samples {
                *v *= args.amplitude;
            }
            s
        }
    };
    let bytes = write_wav(&signal)?;
    fs::write(&args.out, &bytes).with_context(|| format!("writing {}", args.out.display()))?;
    println!("wrote {} ({} bytes, {} samples at {} Hz)", args.out.display(), bytes.len(), signal.len(), signal.sample_rate);
    Ok(ExitCode::SUCCESS)
}

fn detect_one(path: &Path, args: &DetectArgs, config: &PipelineConfig) -> Result<PipelineOutput> {
    let bytes = fs::read(path).with_context(|| format!("read: {}", path.display()))?;
    let (mut signal, _) = read_wav(&bytes).with_context(|| format!("wav: {}", path.display()))?;
    if let Some(rate) = args.resample {
        signal = resample(&signal, rate).context("resample")?;
    }
    run_pipeline(&signal, config).with_context(|| format!("detect: {}", path.display()))
}

fn cmd_detect(args: &DetectArgs, seed: u64) -> Result<ExitCode> {
    if args.n_qubits == 0 || args.n_qubits > qft_tones::detect::MAX_QUBITS {
        return Err(usage(format!("--n-qubits must be in 1..={}", qft_tones::detect::MAX_QUBITS)));
    }
    if args.top_k == Some(0) {
        return Err(usage("--top-k must be at least 1"));
    }
    if args.shots == Some(0) {
        return Err(usage("--shots must be at least 1"));
    }
    if args.resample == Some(0) {
        return Err(usage("--resample must be positive"));
    }
    if args.dump_histogram.is_some() && args.inputs.len() > 1 {
        return Err(usage("--dump-histogram takes a single input"));
    }
    let mode: Mode = args.mode.into();
    if mode == Mode::Dtmf && args.top_k.is_some_and(|k| k < 2) {
        return Err(usage("dtmf mode needs --top-k >= 2"));
    }
    let config = PipelineConfig {
        n_qubits: args.n_qubits,
        mode,
        measurement: match args.shots {
            Some(count) => Measurement::Shots { count, seed },
            None => Measurement::Exact,
        },
        top_k: args.top_k,
        exclude_dc: args.exclude_dc,
        zero_pad: args.zero_pad,
    };

    let mut outputs = Vec::with_capacity(args.inputs.len());
    for path in &args.inputs {
        outputs.push((path, detect_one(path, args, &config)?));
    }

    if let Some(dump) = &args.dump_histogram {
        let tsv = outputs[0].1.histogram.to_tsv();
        fs::write(dump, tsv).with_context(|| format!("writing {}", dump.display()))?;
    }

    let single = outputs.len() == 1;
    match args.format {
        Format::Text => {
            for (path, out) in &outputs {
                if !single {
                    println!("== {} ==", path.display());
                }
                print!("{}", out.report.to_text());
            }
        }
        Format::Json => {
            if single {
                println!("{}", outputs[0].1.report.to_json());
            } else {
                let all: Vec<serde_json::Value> = outputs
                    .iter()
                    .map(|(p, o)| serde_json::json!({ "input": p.display().to_string(), "report": o.report }))
                    .collect();
                println!("{}", serde_json::to_string_pretty(&all)?);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_qft(args: &QftArgs) -> Result<ExitCode> {
    let max = if args.unitary { MAX_UNITARY_QUBITS } else { MAX_LISTED_QUBITS };
    if args.n == 0 || args.n > max {
        return Err(usage(format!("--n must be in 1..={max}")));
    }
    let spec = QftCircuitSpec { n_qubits: args.n, inverse: args.inverse, include_final_swaps: !args.no_swaps };
    let circuit = build_qft_circuit(spec)?;
    if args.decompose {
        println!("{}", render_decomposition(&circuit));
    } else if args.unitary {
        print!("{}", circuit_to_unitary(&circuit)?.to_aligned_string());
    } else {
        println!("# {spec}: {} gates", circuit.len());
        for gate in circuit.gates() {
            println!("{gate}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(seed: u64) -> ExitCode {
    let (results, elapsed) = verify::run_all(seed);
    let failed = results.iter().filter(|r| !r.passed).count();
    for r in &results {
        println!("{r}");
    }
    println!("{} of {} checks passed", results.len() - failed, results.len());
    eprintln!("verification took {:.2} s", elapsed.as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAILURE)
    }
}
