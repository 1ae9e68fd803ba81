//! Amplitude encoding, measurement and frequency decoding.
//!
//! A block of `2^n` samples is normalized into the amplitudes of an n-qubit
//! register, transformed by the QFT circuit, and measured. Bin `k` of the
//! lower half of the outcome distribution corresponds to
//! `k * sample_rate / 2^n` Hz.
//!
//! Shot sampling uses ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded with
//! `seed_from_u64(seed)`. Each shot draws one `u64`, keeps the top 53 bits as
//! `u = (x >> 11) * 2^-53`, and selects the first basis index whose
//! cumulative probability (summed in index order) exceeds `u * total`.

use std::collections::BTreeMap;
use std::fmt;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::audio::{DtmfKey, SampledSignal, DTMF_COLUMNS, DTMF_ROWS};
use crate::qcore::{apply_circuit, ComplexAmp, QuantumError, StateVector};
use crate::qft::{build_qft_circuit, QftCircuitSpec, QftError};

/// Relative tolerance when matching a peak to a DTMF tone.
pub const DTMF_TOLERANCE: f64 = 0.02;
/// Exact-mode weights must sum to 1 within this.
pub const HISTOGRAM_SUM_TOLERANCE: f64 = 1e-9;

const NOTE_NAMES: [&str; 12] = ["C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B"];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DetectError {
    #[error("encode: signal is identically zero and cannot be normalized")]
    ZeroSignal,
    #[error("encode: need {needed} samples for {n_qubits} qubits but only {available} are available")]
    TooFewSamples { needed: usize, available: usize, n_qubits: usize },
    #[error("encode: qubit count must be between 1 and {max}, got {n_qubits}")]
    BadQubitCount { n_qubits: usize, max: usize },
    #[error("encode: non-finite sample at index {0}")]
    NonFiniteSample(usize),
    #[error("measure: shot count must be at least 1")]
    NoShots,
    #[error("decode: histogram is empty")]
    EmptyHistogram,
    #[error("decode: top_k must be at least 1")]
    ZeroTopK,
    #[error("decode: histogram covers {hist} qubits but {requested} were requested")]
    QubitMismatch { hist: usize, requested: usize },
    #[error("note: frequency must be positive, got {0} Hz")]
    NonPositiveFrequency(f64),
    #[error("dtmf: {0}")]
    NoKey(String),
    #[error("transform: {0}")]
    Transform(#[from] QuantumError),
    #[error("transform: {0}")]
    Circuit(#[from] QftError),
}

pub type Result<T> = std::result::Result<T, DetectError>;

/// Upper bound on qubits accepted by the pipeline (2^24 amplitudes).
pub const MAX_QUBITS: usize = 24;

/// Normalized samples loaded into a register.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedRegister {
    pub state: StateVector,
    pub sample_rate: u32,
    pub n_samples: usize,
}

/// Normalizes the first `2^n` samples into an n-qubit state.
///
/// With `zero_pad` a short signal is extended with zeros; without it a short
/// signal is an error.
pub fn amplitude_encode(signal: &SampledSignal, n_qubits: usize, zero_pad: bool) -> Result<EncodedRegister> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS {
        return Err(DetectError::BadQubitCount { n_qubits, max: MAX_QUBITS });
    }
    let needed = 1usize << n_qubits;
    let available = signal.samples.len();
    if available < needed && !zero_pad {
        return Err(DetectError::TooFewSamples { needed, available, n_qubits });
    }
    let mut block: Vec<f64> = signal.samples.iter().take(needed).copied().collect();
    block.resize(needed, 0.0);
    if let Some(i) = block.iter().position(|v| !v.is_finite()) {
        return Err(DetectError::NonFiniteSample(i));
    }
    let norm = block.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(DetectError::ZeroSignal);
    }
    let amps = block.iter().map(|&v| ComplexAmp::new(v / norm, 0.0)).collect();
    Ok(EncodedRegister {
        state: StateVector::from_amplitudes(amps)?,
        sample_rate: signal.sample_rate,
        n_samples: needed,
    })
}

/// Applies the forward QFT (with final swaps) to an encoded register.
pub fn transform(register: &EncodedRegister) -> Result<StateVector> {
    let circuit = build_qft_circuit(QftCircuitSpec::forward(register.state.n_qubits()))?;
    Ok(apply_circuit(&register.state, &circuit)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum MeasurementMode {
    ExactProbabilities,
    ShotCounts { shots: u64, seed: u64 },
}

/// Outcome weights keyed by basis index: probabilities in exact mode, integer
/// counts in shot mode. Outcomes never observed are absent in shot mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementHistogram {
    pub n_qubits: usize,
    #[serde(flatten)]
    pub mode: MeasurementMode,
    pub entries: BTreeMap<usize, f64>,
}

impl MeasurementHistogram {
    pub fn weight(&self, index: usize) -> f64 {
        self.entries.get(&index).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.entries.values().sum()
    }

    /// Weights normalized to a probability distribution over all `2^n` outcomes.
    pub fn distribution(&self) -> Vec<f64> {
        let total = self.total();
        let mut out = vec![0.0; 1 << self.n_qubits];
        if total > 0.0 {
            for (&i, &w) in &self.entries {
                out[i] = w / total;
            }
        }
        out
    }

    /// Most heavily weighted outcome; ties go to the lower index.
    pub fn argmax(&self) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (&i, &w) in &self.entries {
            if best.map_or(true, |(_, bw)| w > bw) {
                best = Some((i, w));
            }
        }
        best.map(|b| b.0)
    }

    /// One `index<TAB>bitstring<TAB>weight` line per entry.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("index\tbitstring\tweight\n");
        for (&i, &w) in &self.entries {
            out.push_str(&format!("{i}\t{}\t{w:.12}\n", crate::qcore::bitstring(i, self.n_qubits)));
        }
        out
    }
}

/// Born-rule probabilities of every basis outcome.
pub fn measure_exact(state: &StateVector) -> MeasurementHistogram {
    MeasurementHistogram {
        n_qubits: state.n_qubits(),
        mode: MeasurementMode::ExactProbabilities,
        entries: state.probabilities().into_iter().enumerate().collect(),
    }
}

/// Draws `shots` independent outcomes with a seeded ChaCha8 generator.
pub fn sample_shots(state: &StateVector, shots: u64, seed: u64) -> Result<MeasurementHistogram> {
    if shots == 0 {
        return Err(DetectError::NoShots);
    }
    let probs = state.probabilities();
    let mut cumulative = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for p in &probs {
        acc += p;
        cumulative.push(acc);
    }
    let total = acc;
    // last index with nonzero probability, used when rounding pushes u past the end
    let last = probs.iter().rposition(|&p| p > 0.0).unwrap_or(0);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
    for _ in 0..shots {
        let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64) * total;
        let idx = cumulative.partition_point(|&c| c <= u).min(last);
        *counts.entry(idx).or_default() += 1;
    }
    Ok(MeasurementHistogram {
        n_qubits: state.n_qubits(),
        mode: MeasurementMode::ShotCounts { shots, seed },
        entries: counts.into_iter().map(|(i, c)| (i, c as f64)).collect(),
    })
}

/// Total-variation distance between two distributions of equal length.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// Nearest 12-TET note relative to A4 = 440 Hz.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NotePeak {
    pub name: String,
    pub octave: i32,
    pub cents: f64,
}

impl NotePeak {
    /// Name with octave, e.g. `A4` or `C#3`.
    pub fn label(&self) -> String {
        format!("{}{}", self.name, self.octave)
    }
}

impl fmt::Display for NotePeak {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({:+.1} cents)", self.label(), self.cents)
    }
}

pub fn map_note(freq: f64) -> Result<NotePeak> {
    if !(freq > 0.0) || !freq.is_finite() {
        return Err(DetectError::NonPositiveFrequency(freq));
    }
    let semitones = (12.0 * (freq / 440.0).log2()).round();
    let nearest = 440.0 * (semitones / 12.0).exp2();
    let midi = 69 + semitones as i64;
    Ok(NotePeak {
        name: NOTE_NAMES[midi.rem_euclid(12) as usize].to_string(),
        octave: (midi.div_euclid(12) - 1) as i32,
        cents: 1200.0 * (freq / nearest).log2(),
    })
}

fn nearest_tone(freq: f64, table: &[f64]) -> Option<usize> {
    table
        .iter()
        .enumerate()
        .map(|(i, &t)| (i, ((freq - t) / t).abs()))
        .filter(|&(_, rel)| rel <= DTMF_TOLERANCE)
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(i, _)| i)
}

/// Matches the two strongest peaks (first two entries) to one row tone and
/// one column tone within [`DTMF_TOLERANCE`].
pub fn decode_dtmf(peaks: &[f64]) -> Result<DtmfKey> {
    if peaks.len() < 2 {
        return Err(DetectError::NoKey(format!("need two peaks, got {}", peaks.len())));
    }
    let (a, b) = (peaks[0], peaks[1]);
    let rows = (nearest_tone(a, &DTMF_ROWS), nearest_tone(b, &DTMF_ROWS));
    let cols = (nearest_tone(a, &DTMF_COLUMNS), nearest_tone(b, &DTMF_COLUMNS));
    let (row, col) = match (rows, cols) {
        ((Some(r), None), (None, Some(c))) | ((None, Some(r)), (Some(c), None)) => (r, c),
        ((Some(_), Some(_)), _) => {
            return Err(DetectError::NoKey(format!("{a} Hz and {b} Hz are both row tones")));
        }
        (_, (Some(_), Some(_))) => {
            return Err(DetectError::NoKey(format!("{a} Hz and {b} Hz are both column tones")));
        }
        _ => {
            return Err(DetectError::NoKey(format!(
                "peaks {a} Hz and {b} Hz do not match one row tone {DTMF_ROWS:?} and one column tone {DTMF_COLUMNS:?} within {}%",
                DTMF_TOLERANCE * 100.0
            )));
        }
    };
    Ok(DtmfKey::at(row, col).expect("row and column come from the keypad tables"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub bin: usize,
    pub frequency_hz: f64,
    pub weight: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cents: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionReport {
    pub sample_rate: u32,
    pub n_qubits: usize,
    pub bin_resolution_hz: f64,
    pub peaks: Vec<Peak>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dtmf_key: Option<DtmfKey>,
}

impl DetectionReport {
    pub fn frequencies(&self) -> Vec<f64> {
        self.peaks.iter().map(|p| p.frequency_hz).collect()
    }

    /// Annotates each nonzero-frequency peak with its nearest note.
    pub fn annotate_notes(&mut self) {
        for p in &mut self.peaks {
            if let Ok(note) = map_note(p.frequency_hz) {
                p.note = Some(note.label());
                p.cents = Some(note.cents);
            }
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    /// Line-oriented `key: value` form.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("sample_rate: {}\n", self.sample_rate));
        out.push_str(&format!("n_qubits: {}\n", self.n_qubits));
        out.push_str(&format!("bin_resolution_hz: {}\n", self.bin_resolution_hz));
        for (rank, p) in self.peaks.iter().enumerate() {
            out.push_str(&format!(
                "peak {}: bin: {} frequency_hz: {} weight: {:.9}",
                rank + 1,
                p.bin,
                p.frequency_hz,
                p.weight
            ));
            if let (Some(note), Some(cents)) = (&p.note, p.cents) {
                out.push_str(&format!(" note: {note} cents: {cents:+.2}"));
            }
            out.push('\n');
        }
        if let Some(key) = self.dtmf_key {
            out.push_str(&format!("dtmf_key: {key}\n"));
        }
        out
    }
}

/// Ranks the lower half of the spectrum (bins `0 .. 2^(n-1)`) by weight and
/// converts the `top_k` strongest bins to Hz. Ties go to the lower bin; bins
/// with zero weight are never reported.
pub fn decode_frequencies(
    hist: &MeasurementHistogram,
    sample_rate: u32,
    n_qubits: usize,
    top_k: usize,
    exclude_dc: bool,
) -> Result<DetectionReport> {
    if top_k == 0 {
        return Err(DetectError::ZeroTopK);
    }
    if hist.entries.is_empty() {
        return Err(DetectError::EmptyHistogram);
    }
    if hist.n_qubits != n_qubits {
        return Err(DetectError::QubitMismatch { hist: hist.n_qubits, requested: n_qubits });
    }
    let size = 1usize << n_qubits;
    let half = size / 2;
    let first = usize::from(exclude_dc);
    let mut bins: Vec<(usize, f64)> =
        hist.entries.range(first..half.max(first)).map(|(&i, &w)| (i, w)).filter(|&(_, w)| w > 0.0).collect();
    // stable sort keeps ascending bin order among equal weights
    bins.sort_by(|a, b| b.1.total_cmp(&a.1));
    bins.truncate(top_k);

    let resolution = sample_rate as f64 / size as f64;
    let peaks = bins
        .into_iter()
        .map(|(bin, weight)| Peak {
            bin,
            frequency_hz: bin as f64 * sample_rate as f64 / size as f64,
            weight,
            note: None,
            cents: None,
        })
        .collect();
    Ok(DetectionReport { sample_rate, n_qubits, bin_resolution_hz: resolution, peaks, dtmf_key: None })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Note,
    Chord,
    Dtmf,
    Raw,
}

impl Mode {
    pub fn default_top_k(self) -> usize {
        match self {
            Mode::Note => 2,
            Mode::Chord => 3,
            Mode::Dtmf => 2,
            Mode::Raw => 8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measurement {
    Exact,
    Shots { count: u64, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PipelineConfig {
    pub n_qubits: usize,
    pub mode: Mode,
    pub measurement: Measurement,
    /// `None` uses the mode's default.
    pub top_k: Option<usize>,
    pub exclude_dc: bool,
    pub zero_pad: bool,
}

impl PipelineConfig {
    pub fn new(n_qubits: usize, mode: Mode) -> Self {
        Self { n_qubits, mode, measurement: Measurement::Exact, top_k: None, exclude_dc: false, zero_pad: false }
    }

    pub fn with_shots(self, count: u64, seed: u64) -> Self {
        Self { measurement: Measurement::Shots { count, seed }, ..self }
    }
}

/// Everything the pipeline produced, for callers that want the histogram too.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOutput {
    pub report: DetectionReport,
    pub histogram: MeasurementHistogram,
}

/// encode, QFT, measure, decode, interpret.
pub fn run_pipeline(signal: &SampledSignal, config: &PipelineConfig) -> Result<PipelineOutput> {
    let register = amplitude_encode(signal, config.n_qubits, config.zero_pad)?;
    let spectrum = transform(&register)?;
    let histogram = match config.measurement {
        Measurement::Exact => measure_exact(&spectrum),
        Measurement::Shots { count, seed } => sample_shots(&spectrum, count, seed)?,
    };
    let top_k = config.top_k.unwrap_or_else(|| config.mode.default_top_k());
    let mut report = decode_frequencies(&histogram, signal.sample_rate, config.n_qubits, top_k, config.exclude_dc)?;
    match config.mode {
        Mode::Note | Mode::Chord => report.annotate_notes(),
        Mode::Dtmf => report.dtmf_key = Some(decode_dtmf(&report.frequencies())?),
        Mode::Raw => {}
    }
    Ok(PipelineOutput { report, histogram })
}

pub fn detect_pipeline(signal: &SampledSignal, config: &PipelineConfig) -> Result<DetectionReport> {
    run_pipeline(signal, config).map(|o| o.report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::basis_state;

    fn sig(rate: u32, samples: &[f64]) -> SampledSignal {
        SampledSignal::new(rate, samples.to_vec()).unwrap()
    }

    #[test]
    fn encode_normalizes() {
        let reg = amplitude_encode(&sig(8000, &[1.0, 2.0, 0.0, 0.0]), 2, false).unwrap();
        let s5 = 5f64.sqrt();
        let want = [1.0 / s5, 2.0 / s5, 0.0, 0.0];
        for (a, w) in reg.state.amplitudes().iter().zip(want) {
            assert!((a.re - w).abs() < 1e-15 && a.im == 0.0);
        }
        assert_eq!(reg.n_samples, 4);

        let flat = amplitude_encode(&sig(8000, &[0.3; 4]), 2, false).unwrap();
        assert!(flat.state.amplitudes().iter().all(|a| (a.re - 0.5).abs() < 1e-15));
        assert!((flat.state.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn encode_uses_first_block_and_validates() {
        let reg = amplitude_encode(&sig(8000, &[3.0, 4.0, 100.0]), 1, false).unwrap();
        assert!((reg.state.amplitudes()[0].re - 0.6).abs() < 1e-15);
        assert_eq!(amplitude_encode(&sig(8000, &[0.0; 8]), 3, false), Err(DetectError::ZeroSignal));
        assert!(matches!(
            amplitude_encode(&sig(8000, &[1.0; 3]), 2, false),
            Err(DetectError::TooFewSamples { needed: 4, available: 3, .. })
        ));
        let padded = amplitude_encode(&sig(8000, &[1.0; 3]), 2, true).unwrap();
        assert_eq!(padded.state.amplitudes()[3].re, 0.0);
        assert!(matches!(amplitude_encode(&sig(8000, &[1.0; 4]), 0, false), Err(DetectError::BadQubitCount { .. })));
    }

    #[test]
    fn exact_measurement() {
        let qft2 = build_qft_circuit(QftCircuitSpec::forward(2)).unwrap();
        let out = apply_circuit(&basis_state(2, 1).unwrap(), &qft2).unwrap();
        let h = measure_exact(&out);
        for i in 0..4 {
            assert!((h.weight(i) - 0.25).abs() < 1e-12);
        }
        let b = measure_exact(&basis_state(3, 5).unwrap());
        assert_eq!(b.weight(5), 1.0);
        assert_eq!(b.argmax(), Some(5));
        assert!((b.total() - 1.0).abs() < HISTOGRAM_SUM_TOLERANCE);
    }

    #[test]
    fn shots_on_basis_state() {
        let h = sample_shots(&basis_state(3, 6).unwrap(), 500, 7).unwrap();
        assert_eq!(h.entries.len(), 1);
        assert_eq!(h.weight(6), 500.0);
        assert_eq!(sample_shots(&basis_state(1, 0).unwrap(), 0, 1), Err(DetectError::NoShots));
    }

    #[test]
    fn shots_are_seeded() {
        let s = apply_circuit(&basis_state(3, 3).unwrap(), &build_qft_circuit(QftCircuitSpec::forward(3)).unwrap())
            .unwrap();
        let a = sample_shots(&s, 1000, 42).unwrap();
        let b = sample_shots(&s, 1000, 42).unwrap();
        let c = sample_shots(&s, 1000, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.entries, c.entries);
        assert_eq!(a.total(), 1000.0);
        assert!(a.entries.values().all(|w| w.fract() == 0.0));
    }

    #[test]
    fn decoding_bins_to_hz() {
        let hist = MeasurementHistogram {
            n_qubits: 10,
            mode: MeasurementMode::ExactProbabilities,
            entries: [(10, 0.5), (11, 0.3), (3, 0.1), (700, 0.9)].into_iter().collect(),
        };
        let r = decode_frequencies(&hist, 44100, 10, 2, false).unwrap();
        assert_eq!(r.frequencies(), vec![430.6640625, 473.73046875]);
        assert_eq!(r.bin_resolution_hz, 44100.0 / 1024.0);

        let chord = MeasurementHistogram {
            n_qubits: 12,
            mode: MeasurementMode::ExactProbabilities,
            entries: [(12, 0.3), (16, 0.2), (41, 0.1)].into_iter().collect(),
        };
        let r = decode_frequencies(&chord, 44100, 12, 3, false).unwrap();
        assert_eq!(r.frequencies()[..2], [129.19921875, 172.265625]);
        assert!((r.frequencies()[2] - 441.43066406).abs() < 1e-8);

        let dc = MeasurementHistogram {
            n_qubits: 2,
            mode: MeasurementMode::ExactProbabilities,
            entries: [(0, 0.7), (1, 0.3)].into_iter().collect(),
        };
        assert_eq!(decode_frequencies(&dc, 8000, 2, 1, false).unwrap().frequencies(), vec![0.0]);
        assert_eq!(decode_frequencies(&dc, 8000, 2, 1, true).unwrap().frequencies(), vec![2000.0]);
        assert_eq!(decode_frequencies(&dc, 8000, 2, 0, false), Err(DetectError::ZeroTopK));
        let empty = MeasurementHistogram { entries: BTreeMap::new(), ..dc.clone() };
        assert_eq!(decode_frequencies(&empty, 8000, 2, 1, false), Err(DetectError::EmptyHistogram));
    }

    #[test]
    fn ties_prefer_lower_bin() {
        let hist = MeasurementHistogram {
            n_qubits: 3,
            mode: MeasurementMode::ExactProbabilities,
            entries: [(3, 0.25), (1, 0.25), (2, 0.25)].into_iter().collect(),
        };
        let r = decode_frequencies(&hist, 800, 3, 3, false).unwrap();
        assert_eq!(r.peaks.iter().map(|p| p.bin).collect::<Vec<_>>(), vec![1, 2, 3]);
    }

    #[test]
    fn notes() {
        let a4 = map_note(440.0).unwrap();
        assert_eq!((a4.label().as_str(), a4.cents), ("A4", 0.0));
        assert_eq!(map_note(130.81).unwrap().label(), "C3");
        assert_eq!(map_note(174.61).unwrap().label(), "F3");
        assert_eq!(map_note(27.5).unwrap().label(), "A0");
        assert_eq!(map_note(16.3516).unwrap().label(), "C0");
        assert_eq!(map_note(8.1758).unwrap().label(), "C-1");
        let flat = map_note(430.6640625).unwrap();
        assert_eq!(flat.label(), "A4");
        assert!((flat.cents - 1200.0 * (430.6640625f64 / 440.0).log2()).abs() < 1e-12);
        assert!(map_note(0.0).is_err());
        assert!(map_note(-3.0).is_err());
        for f in [20.0, 100.0, 333.3, 1000.0, 4186.0] {
            assert!(map_note(f).unwrap().cents.abs() <= 50.0);
        }
    }

    #[test]
    fn dtmf_lookup() {
        assert_eq!(decode_dtmf(&[695.3125, 1210.9375]).unwrap().symbol(), '1');
        assert_eq!(decode_dtmf(&[1210.9375, 695.3125]).unwrap().symbol(), '1');
        assert_eq!(decode_dtmf(&[941.0, 1336.0]).unwrap().symbol(), '0');
        let err = decode_dtmf(&[697.0, 770.0]).unwrap_err();
        assert!(err.to_string().contains("row tones"));
        assert!(decode_dtmf(&[1209.0, 1477.0]).is_err());
        assert!(decode_dtmf(&[500.0, 1209.0]).is_err());
        assert!(decode_dtmf(&[697.0]).is_err());
    }

    #[test]
    fn report_serialization_fields() {
        let mut report = DetectionReport {
            sample_rate: 8000,
            n_qubits: 10,
            bin_resolution_hz: 7.8125,
            peaks: vec![Peak { bin: 89, frequency_hz: 695.3125, weight: 0.4, note: None, cents: None }],
            dtmf_key: Some(DtmfKey::new('1').unwrap()),
        };
        let json: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
        assert_eq!(json["dtmf_key"], "1");
        assert_eq!(json["peaks"][0]["bin"], 89);
        assert_eq!(json["peaks"][0]["frequency_hz"], 695.3125);
        report.annotate_notes();
        let text = report.to_text();
        assert!(text.contains("dtmf_key: 1"));
        assert!(text.contains("frequency_hz: 695.3125"));
        assert!(text.contains("note: F5"));
        let back: DetectionReport = serde_json::from_str(&report.to_json()).unwrap();
        assert_eq!(back, report);
    }
}
