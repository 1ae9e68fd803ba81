//! Built-in verification checks.
//!
//! Each check measures an error against a fixed tolerance and reports it. The
//! classical [`crate::spectral`] transforms are the reference wherever a
//! quantum result is compared to a Fourier transform.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::audio::{read_wav, synth_dtmf, synth_tone, write_wav, DtmfKey, SampledSignal};
use crate::detect::{
    amplitude_encode, detect_pipeline, measure_exact, sample_shots, total_variation, transform, Mode,
    PipelineConfig,
};
use crate::qcore::{apply_circuit, basis_state, circuit_to_unitary, Circuit, Gate, StateVector};
use crate::qft::{
    build_qft_circuit, dft_matrix, fourier_state_decoder, prepare_fourier_state, FourierConvention, Normalization,
    QftCircuitSpec, Sign,
};
use crate::spectral::{dft, fft, sparse_factorization_check, ComplexSignal};

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub id: u32,
    pub name: &'static str,
    pub measured: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn below(id: u32, name: &'static str, measured: f64, tolerance: f64, detail: String) -> Self {
        Self { id, name, measured, tolerance, passed: measured < tolerance, detail }
    }
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {:>2}. {:<28} measured {:.3e} (tolerance {:.3e}) {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.measured,
            self.tolerance,
            self.detail
        )
    }
}

/// Max elementwise error between the unitary of `circuit` and the quantum-
/// convention DFT matrix of matching size.
pub fn qft_equivalence_error(circuit: &Circuit) -> f64 {
    let n = circuit.n_qubits();
    let Ok(u) = circuit_to_unitary(circuit) else { return f64::INFINITY };
    let Ok(f) = dft_matrix(1 << n, FourierConvention::QUANTUM) else { return f64::INFINITY };
    u.max_abs_diff(&f)
}

pub fn check_qft_dft_equivalence() -> CheckResult {
    let mut worst: f64 = 0.0;
    for n in 1..=8 {
        let circuit = build_qft_circuit(QftCircuitSpec::forward(n)).expect("n >= 1");
        worst = worst.max(qft_equivalence_error(&circuit));
    }
    CheckResult::below(1, "QFT/DFT equivalence", worst, 1e-10, "n = 1..8".into())
}

fn max_diff(got: &[Complex64], want: &[Complex64]) -> f64 {
    if got.len() != want.len() {
        return f64::INFINITY;
    }
    got.iter().zip(want).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn check_worked_examples() -> CheckResult {
    let qft = |n| build_qft_circuit(QftCircuitSpec::forward(n)).expect("n >= 1");
    let run = |n, j| apply_circuit(&basis_state(n, j).expect("valid"), &qft(n)).expect("valid circuit");
    let s = FRAC_1_SQRT_2;
    let plain_neg = FourierConvention::CLASSICAL_PLAIN;
    let real = |v: &[f64]| ComplexSignal::from_real(v).expect("finite");

    let errors = [
        max_diff(run(2, 1).amplitudes(), &[c(0.5, 0.0), c(0.0, 0.5), c(-0.5, 0.0), c(0.0, -0.5)]),
        max_diff(run(1, 0).amplitudes(), &[c(s, 0.0), c(s, 0.0)]),
        max_diff(run(1, 1).amplitudes(), &[c(s, 0.0), c(-s, 0.0)]),
        max_diff(dft(&real(&[1.0, 2.0]), plain_neg).values(), &[c(3.0, 0.0), c(-1.0, 0.0)]),
        max_diff(
            dft(&real(&[1.0, 2.0, 0.0, 0.0]), plain_neg).values(),
            &[c(3.0, 0.0), c(1.0, -2.0), c(-1.0, 0.0), c(1.0, 2.0)],
        ),
        fft(&real(&[0.0, 1.0, 0.0, 0.0]), plain_neg)
            .map(|y| max_diff(y.values(), &[c(1.0, 0.0), c(0.0, -1.0), c(-1.0, 0.0), c(0.0, 1.0)]))
            .unwrap_or(f64::INFINITY),
    ];
    let worst = errors.iter().copied().fold(0.0, f64::max);
    CheckResult::below(2, "worked examples", worst, 1e-12, "F4|01>, QFT|0>, QFT|1>, DFT, FFT".into())
}

pub fn check_inverse_roundtrip() -> CheckResult {
    let mut worst: f64 = 0.0;
    let mut detail = Vec::new();
    let mut argmax_ok = true;
    for (j, n) in [(6usize, 3usize), (10, 4), (20, 5)] {
        let decoded = prepare_fourier_state(j, n)
            .and_then(|s| Ok(apply_circuit(&s, &fourier_state_decoder(n)?)?))
            .expect("valid parameters");
        let hist = measure_exact(&decoded);
        argmax_ok &= hist.argmax() == Some(j);
        worst = worst.max(1.0 - hist.weight(j));
        detail.push(format!("|{}> p={:.6}", crate::qcore::bitstring(j, n), hist.weight(j)));
    }
    let mut r = CheckResult::below(3, "inverse-QFT roundtrip", worst, 1e-3, detail.join(", "));
    r.passed &= argmax_ok;
    r
}

fn exact_config(n_qubits: usize, mode: Mode) -> PipelineConfig {
    PipelineConfig::new(n_qubits, mode)
}

pub fn a440_signal() -> SampledSignal {
    synth_tone(&[(440.0, 1.0)], 44100, 1024, 1.0).expect("440 Hz is below Nyquist")
}

pub fn f_major_signal() -> SampledSignal {
    synth_tone(&[(130.81, 1.0), (174.61, 1.0), (440.0, 1.0)], 44100, 4096, 1.0).expect("below Nyquist")
}

fn set_error(got: &[f64], want: &[f64]) -> f64 {
    let mut got = got.to_vec();
    let mut want = want.to_vec();
    if got.len() != want.len() {
        return f64::INFINITY;
    }
    got.sort_by(f64::total_cmp);
    want.sort_by(f64::total_cmp);
    got.iter().zip(&want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

pub fn check_a440() -> CheckResult {
    let report = detect_pipeline(&a440_signal(), &exact_config(10, Mode::Note)).expect("pipeline");
    let freqs = report.frequencies();
    let err = set_error(&freqs, &[430.6640625, 473.73046875]);
    CheckResult::below(4, "A440 detection", err, 1e-9, format!("top-2 {freqs:?}"))
}

pub fn check_f_major() -> CheckResult {
    let report = detect_pipeline(&f_major_signal(), &exact_config(12, Mode::Chord)).expect("pipeline");
    let freqs = report.frequencies();
    let err = set_error(&freqs, &[129.19921875, 172.265625, 441.43066406]);
    let mut notes: Vec<String> = report.peaks.iter().filter_map(|p| p.note.clone()).collect();
    notes.sort();
    let notes_ok = notes == ["A4", "C3", "F3"];
    let one_bin = 44100.0 / 4096.0;
    let mut r = CheckResult {
        id: 5,
        name: "F-major chord",
        measured: err,
        tolerance: one_bin,
        passed: err <= one_bin,
        detail: format!("top-3 {freqs:?} notes {notes:?}"),
    };
    r.passed &= notes_ok;
    r
}

pub fn check_dtmf() -> CheckResult {
    let config = exact_config(10, Mode::Dtmf);
    let one = detect_pipeline(&synth_dtmf('1', 8000, 1024).expect("key"), &config).expect("pipeline");
    let err = set_error(&one.frequencies(), &[695.3125, 1210.9375]);
    let mut wrong = Vec::new();
    for key in DtmfKey::all() {
        let signal = synth_dtmf(key.symbol(), 8000, 1024).expect("key");
        match detect_pipeline(&signal, &config) {
            Ok(r) if r.dtmf_key == Some(key) => {}
            Ok(r) => wrong.push(format!("{key}->{:?}", r.dtmf_key.map(|k| k.symbol()))),
            Err(e) => wrong.push(format!("{key}: {e}")),
        }
    }
    let key_ok = one.dtmf_key.map(|k| k.symbol()) == Some('1') && wrong.is_empty();
    let detail = if wrong.is_empty() {
        format!("'1' top-2 {:?}; 12/12 keys decoded", one.frequencies())
    } else {
        format!("misdecoded: {}", wrong.join(", "))
    };
    let mut r = CheckResult::below(6, "DTMF decoding", err, 1e-9, detail);
    r.passed &= key_ok;
    r
}

/// Max difference between the quantum-path probabilities and the oracle
/// power spectrum `|FFT_unitary(x / |x|)|^2` for one real signal.
pub fn oracle_power_error(samples: &[f64]) -> f64 {
    let n = samples.len().trailing_zeros() as usize;
    let signal = SampledSignal { sample_rate: 1, samples: samples.to_vec() };
    let Ok(register) = amplitude_encode(&signal, n, false) else { return f64::INFINITY };
    let Ok(out) = transform(&register) else { return f64::INFINITY };
    let quantum = measure_exact(&out).distribution();

    let norm = samples.iter().map(|v| v * v).sum::<f64>().sqrt();
    let normalized: Vec<f64> = samples.iter().map(|v| v / norm).collect();
    let conv = FourierConvention::new(Sign::Positive, Normalization::Unitary);
    let Ok(spectrum) = ComplexSignal::from_real(&normalized).and_then(|x| fft(&x, conv)) else {
        return f64::INFINITY;
    };
    spectrum.power().iter().zip(&quantum).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

pub fn check_oracle_equivalence(seed: u64) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let n = rng.gen_range(1..=10);
        let samples: Vec<f64> = (0..1 << n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        worst = worst.max(oracle_power_error(&samples));
    }
    CheckResult::below(7, "oracle equivalence", worst, 1e-9, "100 random real signals, n <= 10".into())
}

pub fn check_sparse_factorization() -> CheckResult {
    let report = sparse_factorization_check();
    let passed = report.u2_u1_holds && report.u1_nonzeros == 8 && report.u2_nonzeros == 8;
    CheckResult {
        id: 8,
        name: "sparse factorization",
        measured: if report.u2_u1_holds { 0.0 } else { 1.0 },
        tolerance: 0.0,
        passed,
        detail: format!(
            "holding order {}; nonzeros U1={} U2={}",
            report.holding_order().unwrap_or("none"),
            report.u1_nonzeros,
            report.u2_nonzeros
        ),
    }
}

pub fn check_shot_sampling(seed: u64) -> CheckResult {
    let register = amplitude_encode(&a440_signal(), 10, false).expect("encode");
    let state = transform(&register).expect("transform");
    let exact = measure_exact(&state);
    let shots = sample_shots(&state, 8192, seed).expect("shots >= 1");
    let tv = total_variation(&shots.distribution(), &exact.distribution());
    let fold = |h: &crate::detect::MeasurementHistogram| {
        crate::detect::decode_frequencies(h, 44100, 10, 1, false).map(|r| r.peaks[0].bin).ok()
    };
    let argmax_ok = fold(&shots).is_some() && fold(&shots) == fold(&exact);
    let mut r = CheckResult::below(
        9,
        "shot sampling",
        tv,
        0.05,
        format!("8192 shots, seed {seed}, argmax bin {:?} vs exact {:?}", fold(&shots), fold(&exact)),
    );
    r.passed &= argmax_ok;
    r
}

fn random_circuit(rng: &mut ChaCha8Rng, n: usize, len: usize) -> Circuit {
    let mut gates = Vec::with_capacity(len);
    while gates.len() < len {
        let a = rng.gen_range(0..n);
        let theta = rng.gen_range(-std::f64::consts::TAU..std::f64::consts::TAU);
        let g = match rng.gen_range(0..5) {
            0 => Gate::H(a),
            1 => Gate::X(a),
            2 => Gate::Phase(a, theta),
            k if n > 1 => {
                let mut b = rng.gen_range(0..n - 1);
                if b >= a {
                    b += 1;
                }
                if k == 3 {
                    Gate::ControlledPhase { control: a, target: b, theta }
                } else {
                    Gate::Swap(a, b)
                }
            }
            _ => continue,
        };
        gates.push(g);
    }
    Circuit::from_gates(n, gates).expect("indices drawn in range")
}

fn random_state(rng: &mut ChaCha8Rng, n: usize) -> StateVector {
    let raw: Vec<Complex64> = (0..1 << n).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let norm = raw.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    StateVector::from_amplitudes(raw.into_iter().map(|a| a / norm).collect()).expect("normalized")
}

pub fn check_property_suites(seed: u64) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut failures = Vec::new();

    let mut norm_err: f64 = 0.0;
    for _ in 0..1000 {
        let n = rng.gen_range(1..=8);
        let len = rng.gen_range(0..=50);
        let circuit = random_circuit(&mut rng, n, len);
        let psi = random_state(&mut rng, n);
        match apply_circuit(&psi, &circuit) {
            Ok(out) => norm_err = norm_err.max((out.norm_sqr() - 1.0).abs()),
            Err(_) => norm_err = f64::INFINITY,
        }
    }
    if !(norm_err < 1e-9) {
        failures.push(format!("norm {norm_err:e}"));
    }

    for n in 1..=16 {
        let count = build_qft_circuit(QftCircuitSpec::forward(n)).map(|c| c.len()).unwrap_or(0);
        if count != n + n * (n - 1) / 2 + n / 2 {
            failures.push(format!("gate count n={n}"));
        }
    }

    let unitary = FourierConvention::new(Sign::Negative, Normalization::Unitary);
    let mut parseval: f64 = 0.0;
    let mut fold: f64 = 0.0;
    for k in 0..=12 {
        let len = 1usize << k;
        let x: Vec<Complex64> = (0..len).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let x = ComplexSignal::new(x).expect("finite");
        let y = fft(&x, unitary).expect("power of two");
        parseval = parseval.max((x.energy() - y.energy()).abs() / x.energy());

        let real: Vec<f64> = (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect();
        if k >= 1 && k <= 10 {
            let signal = SampledSignal { sample_rate: 1, samples: real };
            let dist = amplitude_encode(&signal, k, false)
                .and_then(|r| transform(&r))
                .map(|s| measure_exact(&s).distribution())
                .expect("encode");
            for b in 1..len / 2 {
                fold = fold.max((dist[b] - dist[len - b]).abs());
            }
        }
    }
    if !(parseval < 1e-9) {
        failures.push(format!("parseval {parseval:e}"));
    }
    if !(fold < 1e-9) {
        failures.push(format!("fold {fold:e}"));
    }

    let mut wav_err: f64 = 0.0;
    for _ in 0..100 {
        let len = rng.gen_range(0..300);
        let samples: Vec<f64> = (0..len).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let signal = SampledSignal { sample_rate: rng.gen_range(1..96000), samples };
        let back = write_wav(&signal).and_then(|b| read_wav(&b)).map(|(s, _)| s);
        match back {
            Ok(b) if b.sample_rate == signal.sample_rate && b.len() == signal.len() => {
                for (a, b) in signal.samples.iter().zip(&b.samples) {
                    wav_err = wav_err.max((a - b).abs());
                }
            }
            _ => wav_err = f64::INFINITY,
        }
    }
    if !(wav_err <= 1.0 / 32768.0) {
        failures.push(format!("wav {wav_err:e}"));
    }

    let worst = [norm_err, parseval, fold].into_iter().fold(0.0, f64::max);
    CheckResult {
        id: 10,
        name: "property suites",
        measured: worst,
        tolerance: 1e-9,
        passed: failures.is_empty(),
        detail: if failures.is_empty() {
            format!("norm, gate count, Parseval, fold, WAV (max err {wav_err:.2e})")
        } else {
            format!("failed: {}", failures.join(", "))
        },
    }
}

/// Runs every check in order and reports the elapsed time.
pub fn run_all(seed: u64) -> (Vec<CheckResult>, std::time::Duration) {
    let start = Instant::now();
    let results = vec![
        check_qft_dft_equivalence(),
        check_worked_examples(),
        check_inverse_roundtrip(),
        check_a440(),
        check_f_major(),
        check_dtmf(),
        check_oracle_equivalence(seed),
        check_sparse_factorization(),
        check_shot_sampling(seed),
        check_property_suites(seed),
    ];
    (results, start.elapsed())
}
