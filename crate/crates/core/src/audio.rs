//! WAV I/O, resampling and test-signal synthesis.

use std::f64::consts::TAU;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

const PCM_FORMAT: u16 = 1;
const PCM_SCALE: f64 = 32768.0;
/// Slack allowed on `|sample| <= 1`.
pub const SAMPLE_RANGE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WavError {
    #[error("malformed WAV header: {0}")]
    MalformedHeader(String),
    #[error("unsupported codec: format code {0} (only PCM = 1 is supported)")]
    UnsupportedCodec(u16),
    #[error("unsupported bit depth: {0} bits per sample (only 16 is supported)")]
    UnsupportedBitDepth(u16),
    #[error("unsupported channel count {0} (only mono and stereo are supported)")]
    UnsupportedChannels(u16),
    #[error("truncated data chunk: header declares {declared} bytes but {available} remain")]
    Truncated { declared: usize, available: usize },
    #[error("sample {index} = {value} is outside [-1, 1]; refusing to clip")]
    Clipping { index: usize, value: f64 },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthError {
    #[error("sample rate must be positive")]
    ZeroRate,
    #[error("{freq} Hz aliases at {rate} Hz sampling (Nyquist limit {} Hz)", *rate as f64 / 2.0)]
    Aliasing { freq: f64, rate: u32 },
    #[error("invalid frequency {0} Hz")]
    BadFrequency(f64),
    #[error("invalid amplitude {0} (must lie in [0, 1])")]
    BadAmplitude(f64),
    #[error("tone weights must be non-negative with a positive sum")]
    BadWeights,
    #[error("unknown DTMF key {0:?}")]
    UnknownKey(char),
}

/// Mono samples in `[-1, 1]` at a fixed rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledSignal {
    pub sample_rate: u32,
    pub samples: Vec<f64>,
}

impl SampledSignal {
    pub fn new(sample_rate: u32, samples: Vec<f64>) -> Result<Self, SynthError> {
        if sample_rate == 0 {
            return Err(SynthError::ZeroRate);
        }
        Ok(Self { sample_rate, samples })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn nyquist(&self) -> f64 {
        self.sample_rate as f64 / 2.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WavMeta {
    pub channels: u16,
    pub bits_per_sample: u16,
    pub sample_rate: u32,
    /// Size of the `data` chunk payload in bytes.
    pub data_length: u32,
}

fn u16_at(b: &[u8], at: usize) -> u16 {
    u16::from_le_bytes([b[at], b[at + 1]])
}

fn u32_at(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes([b[at], b[at + 1], b[at + 2], b[at + 3]])
}

/// Parses a RIFF/WAVE file holding 16-bit PCM in one or two channels.
///
/// Stereo is downmixed to the channel mean and samples are scaled by
/// `1/32768`. Unknown chunks are skipped wherever they appear.
pub fn read_wav(bytes: &[u8]) -> Result<(SampledSignal, WavMeta), WavError> {
    let malformed = |m: &str| WavError::MalformedHeader(m.to_string());
    if bytes.len() < 12 {
        return Err(malformed("file shorter than the 12-byte RIFF header"));
    }
    if &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(malformed("missing RIFF/WAVE signature"));
    }

    let mut fmt: Option<(u16, u16, u32, u16)> = None;
    let mut pos = 12;
    loop {
        if pos + 8 > bytes.len() {
            return Err(malformed(if fmt.is_none() { "no fmt chunk" } else { "no data chunk" }));
        }
        let id = &bytes[pos..pos + 4];
        let size = u32_at(bytes, pos + 4) as usize;
        let body = pos + 8;
        match id {
            b"fmt " => {
                if size < 16 || body + 16 > bytes.len() {
                    return Err(malformed("fmt chunk too short"));
                }
                fmt = Some((
                    u16_at(bytes, body),
                    u16_at(bytes, body + 2),
                    u32_at(bytes, body + 4),
                    u16_at(bytes, body + 14),
                ));
            }
            b"data" => {
                let (format, channels, sample_rate, bits) = fmt.ok_or_else(|| malformed("data chunk before fmt chunk"))?;
                if format != PCM_FORMAT {
                    return Err(WavError::UnsupportedCodec(format));
                }
                if bits != 16 {
                    return Err(WavError::UnsupportedBitDepth(bits));
                }
                if !(1..=2).contains(&channels) {
                    return Err(WavError::UnsupportedChannels(channels));
                }
                if sample_rate == 0 {
                    return Err(malformed("sample rate is zero"));
                }
                let available = bytes.len() - body;
                if size > available {
                    return Err(WavError::Truncated { declared: size, available });
                }
                let frame = 2 * channels as usize;
                if size % frame != 0 {
                    return Err(malformed("data length is not a whole number of frames"));
                }
                let samples = bytes[body..body + size]
                    .chunks_exact(frame)
                    .map(|f| {
                        let sum: f64 = f.chunks_exact(2).map(|s| i16::from_le_bytes([s[0], s[1]]) as f64).sum();
                        sum / channels as f64 / PCM_SCALE
                    })
                    .collect();
                let meta = WavMeta { channels, bits_per_sample: bits, sample_rate, data_length: size as u32 };
                return Ok((SampledSignal { sample_rate, samples }, meta));
            }
            _ => {}
        }
        // chunks are word aligned
        pos = body + size + (size & 1);
    }
}

/// Quantizes one sample to 16-bit PCM, rounding half away from zero.
/// `1.0` maps to `32767` and `-1.0` to `-32768`.
pub fn quantize(sample: f64) -> i16 {
    (sample * PCM_SCALE).round().clamp(-32768.0, 32767.0) as i16
}

/// Encodes `signal` as canonical 44-byte-header mono 16-bit PCM.
pub fn write_wav(signal: &SampledSignal) -> Result<Vec<u8>, WavError> {
    for (index, &value) in signal.samples.iter().enumerate() {
        if !value.is_finite() || value.abs() > 1.0 + SAMPLE_RANGE_TOLERANCE {
            return Err(WavError::Clipping { index, value });
        }
    }
    let data_len = (signal.samples.len() * 2) as u32;
    let mut out = Vec::with_capacity(44 + data_len as usize);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(36 + data_len).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&PCM_FORMAT.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&signal.sample_rate.to_le_bytes());
    out.extend_from_slice(&signal.sample_rate.saturating_mul(2).to_le_bytes());
    out.extend_from_slice(&2u16.to_le_bytes());
    out.extend_from_slice(&16u16.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&data_len.to_le_bytes());
    for &s in &signal.samples {
        out.extend_from_slice(&quantize(s).to_le_bytes());
    }
    Ok(out)
}

/// Weighted sum of sines: `amplitude * sum w_i sin(2 pi f_i t / rate) / sum w_i`.
/// Every frequency must lie below the Nyquist limit.
pub fn synth_tone(
    tones: &[(f64, f64)],
    sample_rate: u32,
    n_samples: usize,
    amplitude: f64,
) -> Result<SampledSignal, SynthError> {
    if sample_rate == 0 {
        return Err(SynthError::ZeroRate);
    }
    if !(0.0..=1.0).contains(&amplitude) {
        return Err(SynthError::BadAmplitude(amplitude));
    }
    let nyquist = sample_rate as f64 / 2.0;
    for &(freq, _) in tones {
        if !freq.is_finite() || freq < 0.0 {
            return Err(SynthError::BadFrequency(freq));
        }
        if freq >= nyquist {
            return Err(SynthError::Aliasing { freq, rate: sample_rate });
        }
    }
    let total: f64 = tones.iter().map(|t| t.1).sum();
    if tones.iter().any(|t| !(t.1 >= 0.0) || !t.1.is_finite()) || !(total > 0.0) {
        return Err(SynthError::BadWeights);
    }
    let rate = sample_rate as f64;
    let samples = (0..n_samples)
        .map(|t| {
            let mix: f64 = tones.iter().map(|&(f, w)| w * (TAU * f * t as f64 / rate).sin()).sum();
            amplitude * mix / total
        })
        .collect();
    Ok(SampledSignal { sample_rate, samples })
}

/// Row (low-group) DTMF frequencies in Hz.
pub const DTMF_ROWS: [f64; 4] = [697.0, 770.0, 852.0, 941.0];
/// Column (high-group) DTMF frequencies in Hz.
pub const DTMF_COLUMNS: [f64; 3] = [1209.0, 1336.0, 1477.0];
const KEYPAD: [[char; 3]; 4] = [['1', '2', '3'], ['4', '5', '6'], ['7', '8', '9'], ['*', '0', '#']];

/// A telephone keypad symbol: `0`-`9`, `*` or `#`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct DtmfKey(char);

impl DtmfKey {
    pub const ALL: [char; 12] = ['1', '2', '3', '4', '5', '6', '7', '8', '9', '*', '0', '#'];

    pub fn new(symbol: char) -> Result<Self, SynthError> {
        if Self::ALL.contains(&symbol) {
            Ok(Self(symbol))
        } else {
            Err(SynthError::UnknownKey(symbol))
        }
    }

    pub fn all() -> impl Iterator<Item = DtmfKey> {
        Self::ALL.into_iter().map(DtmfKey)
    }

    /// Key at keypad `(row, column)`.
    pub fn at(row: usize, column: usize) -> Option<Self> {
        KEYPAD.get(row).and_then(|r| r.get(column)).map(|&c| DtmfKey(c))
    }

    pub fn symbol(self) -> char {
        self.0
    }

    pub fn position(self) -> (usize, usize) {
        for (r, row) in KEYPAD.iter().enumerate() {
            if let Some(c) = row.iter().position(|&k| k == self.0) {
                return (r, c);
            }
        }
        unreachable!("DtmfKey is always a keypad symbol")
    }

    /// `(row, column)` tone frequencies in Hz.
    pub fn frequencies(self) -> (f64, f64) {
        let (r, c) = self.position();
        (DTMF_ROWS[r], DTMF_COLUMNS[c])
    }
}

impl fmt::Display for DtmfKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<DtmfKey> for String {
    fn from(k: DtmfKey) -> String {
        k.0.to_string()
    }
}

impl TryFrom<String> for DtmfKey {
    type Error = SynthError;

    fn try_from(s: String) -> Result<Self, SynthError> {
        let mut chars = s.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => DtmfKey::new(c),
            _ => Err(SynthError::UnknownKey(s.chars().next().unwrap_or('\0'))),
        }
    }
}

/// Equal-weight two-tone signal for `key` at full scale.
pub fn synth_dtmf(key: char, sample_rate: u32, n_samples: usize) -> Result<SampledSignal, SynthError> {
    let (row, col) = DtmfKey::new(key)?.frequencies();
    synth_tone(&[(row, 1.0), (col, 1.0)], sample_rate, n_samples, 1.0)
}

/// Linear-interpolation resampler with no anti-alias filter.
///
/// Output sample `i` sits at source position `i * source / target`; the
/// output has `floor(len * target / source)` samples.
pub fn resample(signal: &SampledSignal, target_rate: u32) -> Result<SampledSignal, SynthError> {
    if target_rate == 0 {
        return Err(SynthError::ZeroRate);
    }
    let source_rate = signal.sample_rate;
    if target_rate == source_rate {
        return Ok(signal.clone());
    }
    if target_rate < source_rate {
        log::warn!(
            "resampling {source_rate} Hz -> {target_rate} Hz without filtering: content above {} Hz will alias",
            target_rate as f64 / 2.0
        );
    }
    let len = signal.samples.len();
    let out_len = (len as u128 * target_rate as u128 / source_rate as u128) as usize;
    let step = source_rate as f64 / target_rate as f64;
    let samples = (0..out_len)
        .map(|i| {
            let pos = i as f64 * step;
            let idx = pos.floor() as usize;
            let frac = pos - idx as f64;
            let a = signal.samples[idx.min(len - 1)];
            let b = signal.samples[(idx + 1).min(len - 1)];
            a + (b - a) * frac
        })
        .collect();
    Ok(SampledSignal { sample_rate: target_rate, samples })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stereo_wav(rate: u32, frames: &[(i16, i16)], extra_chunk: bool) -> Vec<u8> {
        let data_len = (frames.len() * 4) as u32;
        let mut out = Vec::new();
        out.extend_from_slice(b"RIFF");
        out.extend_from_slice(&0u32.to_le_bytes());
        out.extend_from_slice(b"WAVE");
        out.extend_from_slice(b"fmt ");
        out.extend_from_slice(&16u32.to_le_bytes());
        out.extend_from_slice(&1u16.to_le_bytes());
        out.extend_from_slice(&2u16.to_le_bytes());
        out.extend_from_slice(&rate.to_le_bytes());
        out.extend_from_slice(&(rate * 4).to_le_bytes());
        out.extend_from_slice(&4u16.to_le_bytes());
        out.extend_from_slice(&16u16.to_le_bytes());
        if extra_chunk {
            out.extend_from_slice(b"LIST");
            out.extend_from_slice(&3u32.to_le_bytes());
            out.extend_from_slice(b"abc\0");
        }
        out.extend_from_slice(b"data");
        out.extend_from_slice(&data_len.to_le_bytes());
        for &(l, r) in frames {
            out.extend_from_slice(&l.to_le_bytes());
            out.extend_from_slice(&r.to_le_bytes());
        }
        out
    }

    #[test]
    fn header_layout() {
        let sig = SampledSignal::new(44100, vec![0.0; 1024]).unwrap();
        let bytes = write_wav(&sig).unwrap();
        assert_eq!(bytes.len(), 44 + 2048);
        let (_, meta) = read_wav(&bytes).unwrap();
        assert_eq!(meta, WavMeta { channels: 1, bits_per_sample: 16, sample_rate: 44100, data_length: 2048 });
        assert_eq!(write_wav(&SampledSignal::new(8000, vec![]).unwrap()).unwrap().len(), 44);
    }

    #[test]
    fn quantizer_extremes() {
        assert_eq!(quantize(1.0), 32767);
        assert_eq!(quantize(-1.0), -32768);
        assert_eq!(quantize(0.5 / 32768.0), 1);
        assert_eq!(quantize(-0.5 / 32768.0), -1);
        assert_eq!(quantize(0.0), 0);
    }

    #[test]
    fn write_refuses_to_clip() {
        let sig = SampledSignal::new(8000, vec![0.0, 1.5]).unwrap();
        assert_eq!(write_wav(&sig), Err(WavError::Clipping { index: 1, value: 1.5 }));
    }

    #[test]
    fn reader_errors_are_distinct() {
        assert!(matches!(read_wav(&[]), Err(WavError::MalformedHeader(_))));
        assert!(matches!(read_wav(b"RIFF\0\0\0\0WAVX"), Err(WavError::MalformedHeader(_))));

        let good = write_wav(&SampledSignal::new(8000, vec![0.25; 8]).unwrap()).unwrap();

        let mut float = good.clone();
        float[20] = 3;
        assert_eq!(read_wav(&float), Err(WavError::UnsupportedCodec(3)));

        let mut eight_bit = good.clone();
        eight_bit[34] = 8;
        assert_eq!(read_wav(&eight_bit), Err(WavError::UnsupportedBitDepth(8)));

        let mut six_ch = good.clone();
        six_ch[22] = 6;
        assert_eq!(read_wav(&six_ch), Err(WavError::UnsupportedChannels(6)));

        let truncated = &good[..good.len() - 3];
        assert!(matches!(read_wav(truncated), Err(WavError::Truncated { declared: 16, available: 13 })));

        assert!(matches!(read_wav(&good[..40]), Err(WavError::MalformedHeader(_))));
    }

    #[test]
    fn stereo_downmix_and_extra_chunks() {
        let bytes = stereo_wav(8000, &[(1000, 3000), (-32768, -32768)], true);
        let (sig, meta) = read_wav(&bytes).unwrap();
        assert_eq!(meta.channels, 2);
        assert_eq!(sig.samples, vec![2000.0 / 32768.0, -1.0]);
    }

    #[test]
    fn identical_channels_match_mono() {
        let tone = synth_tone(&[(440.0, 1.0)], 8000, 64, 0.8).unwrap();
        let mono = read_wav(&write_wav(&tone).unwrap()).unwrap().0;
        let frames: Vec<(i16, i16)> = tone.samples.iter().map(|&s| (quantize(s), quantize(s))).collect();
        let stereo = read_wav(&stereo_wav(8000, &frames, false)).unwrap().0;
        assert_eq!(mono, stereo);
    }

    #[test]
    fn tone_formula() {
        let sig = synth_tone(&[(440.0, 1.0)], 1764, 8, 1.0).unwrap();
        for (t, s) in sig.samples.iter().enumerate() {
            assert_eq!(*s, (TAU * 440.0 * t as f64 / 1764.0).sin());
        }
        // 8 * 440 / 1764 cycles
        assert!((8.0f64 * 440.0 / 1764.0 - 2.0).abs() < 0.01);
        let silent = synth_tone(&[(0.0, 1.0)], 8000, 16, 1.0).unwrap();
        assert!(silent.samples.iter().all(|&s| s == 0.0));
    }

    #[test]
    fn chord_is_weighted_mean() {
        let freqs = [130.81, 174.61, 440.0];
        let tones: Vec<(f64, f64)> = freqs.iter().map(|&f| (f, 1.0)).collect();
        let sig = synth_tone(&tones, 44100, 256, 1.0).unwrap();
        for (t, s) in sig.samples.iter().enumerate() {
            let expect: f64 = freqs.iter().map(|f| (TAU * f * t as f64 / 44100.0).sin()).sum::<f64>() / 3.0;
            assert!((s - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn synth_rejects_bad_input() {
        assert!(matches!(synth_tone(&[(5000.0, 1.0)], 8000, 8, 1.0), Err(SynthError::Aliasing { .. })));
        assert!(matches!(synth_tone(&[(4000.0, 1.0)], 8000, 8, 1.0), Err(SynthError::Aliasing { .. })));
        assert_eq!(synth_tone(&[(100.0, 1.0)], 8000, 8, 1.5), Err(SynthError::BadAmplitude(1.5)));
        assert_eq!(synth_tone(&[(100.0, 0.0)], 8000, 8, 1.0), Err(SynthError::BadWeights));
        assert_eq!(synth_tone(&[], 8000, 8, 1.0), Err(SynthError::BadWeights));
        assert_eq!(synth_dtmf('A', 8000, 8), Err(SynthError::UnknownKey('A')));
    }

    #[test]
    fn keypad_table() {
        assert_eq!(DtmfKey::new('1').unwrap().frequencies(), (697.0, 1209.0));
        assert_eq!(DtmfKey::new('0').unwrap().frequencies(), (941.0, 1336.0));
        assert_eq!(DtmfKey::new('#').unwrap().frequencies(), (941.0, 1477.0));
        assert_eq!(DtmfKey::new('*').unwrap().frequencies(), (941.0, 1209.0));
        assert_eq!(DtmfKey::at(2, 1).unwrap().symbol(), '8');
        assert_eq!(DtmfKey::all().count(), 12);
    }

    #[test]
    fn dtmf_is_two_tone() {
        let sig = synth_dtmf('1', 8000, 32).unwrap();
        for (t, s) in sig.samples.iter().enumerate() {
            let x = t as f64 / 8000.0;
            let expect = ((TAU * 697.0 * x).sin() + (TAU * 1209.0 * x).sin()) / 2.0;
            assert!((s - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn resample_cases() {
        let tone = synth_tone(&[(440.0, 1.0)], 44100, 1000, 0.5).unwrap();
        assert_eq!(resample(&tone, 44100).unwrap(), tone);

        let zeros = SampledSignal::new(1000, vec![0.0; 101]).unwrap();
        let half = resample(&zeros, 500).unwrap();
        assert_eq!(half.sample_rate, 500);
        assert_eq!(half.len(), 50);
        assert!(half.samples.iter().all(|&s| s == 0.0));

        let ramp = SampledSignal::new(2, vec![0.0, 1.0, 2.0]).unwrap();
        let up = resample(&ramp, 4).unwrap();
        assert_eq!(up.samples, vec![0.0, 0.5, 1.0, 1.5, 2.0, 2.0]);
        assert_eq!(resample(&ramp, 0), Err(SynthError::ZeroRate));
    }
}
