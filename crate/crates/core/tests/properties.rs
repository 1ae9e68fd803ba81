use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use proptest::prelude::*;

use qft_tones::audio::{read_wav, resample, synth_tone, write_wav, SampledSignal};
use qft_tones::detect::{
    amplitude_encode, detect_pipeline, measure_exact, sample_shots, total_variation, transform, Mode, PipelineConfig,
};
use qft_tones::qcore::{apply_circuit, Circuit, Gate, StateVector};
use qft_tones::qft::{build_qft_circuit, FourierConvention, Normalization, QftCircuitSpec, Sign};
use qft_tones::spectral::{dft, fft, inverse_dft, ComplexSignal};

fn gate_strategy(n: usize) -> impl Strategy<Value = Gate> {
    let angle = -TAU..TAU;
    let single = prop_oneof![
        (0..n).prop_map(Gate::H),
        (0..n).prop_map(Gate::X),
        ((0..n), angle.clone()).prop_map(|(q, t)| Gate::Phase(q, t)),
    ];
    if n < 2 {
        return single.boxed();
    }
    // second wire drawn from the other n - 1 qubits
    let pair = ((0..n), (0..n - 1)).prop_map(|(a, b)| (a, if b >= a { b + 1 } else { b }));
    prop_oneof![
        single,
        (pair.clone(), angle).prop_map(|((a, b), theta)| Gate::ControlledPhase { control: a, target: b, theta }),
        pair.prop_map(|(a, b)| Gate::Swap(a, b)),
    ]
    .boxed()
}

fn state_strategy(n: usize) -> impl Strategy<Value = StateVector> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << n).prop_filter_map("nonzero", |raw| {
        let norm = raw.iter().map(|(a, b)| a * a + b * b).sum::<f64>().sqrt();
        (norm > 1e-3).then(|| {
            StateVector::from_amplitudes(raw.into_iter().map(|(a, b)| Complex64::new(a / norm, b / norm)).collect())
                .unwrap()
        })
    })
}

fn complex_signal(max_log: u32) -> impl Strategy<Value = ComplexSignal> {
    (0..=max_log).prop_flat_map(|k| {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1usize << k)
            .prop_map(|v| ComplexSignal::new(v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect()).unwrap())
    })
}

fn circuit_and_state() -> impl Strategy<Value = (Circuit, StateVector)> {
    (1usize..=8).prop_flat_map(|n| {
        (prop::collection::vec(gate_strategy(n), 0..=50), state_strategy(n))
            .prop_map(move |(gates, s)| (Circuit::from_gates(n, gates).unwrap(), s))
    })
}

fn rel_err(a: &ComplexSignal, b: &ComplexSignal) -> f64 {
    let scale = b.values().iter().map(|v| v.norm()).fold(1.0, f64::max);
    a.max_abs_diff(b) / scale
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, ..ProptestConfig::default() })]

    #[test]
    fn random_circuits_preserve_norm((circuit, psi) in circuit_and_state()) {
        let out = apply_circuit(&psi, &circuit).unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn qft_then_inverse_is_identity(psi in (1usize..=10).prop_flat_map(state_strategy)) {
        let n = psi.n_qubits();
        let fwd = apply_circuit(&psi, &build_qft_circuit(QftCircuitSpec::forward(n)).unwrap()).unwrap();
        let back = apply_circuit(&fwd, &build_qft_circuit(QftCircuitSpec::inverse(n)).unwrap()).unwrap();
        prop_assert!(back.max_abs_diff(&psi) < 1e-9);
    }

    #[test]
    fn fft_matches_dft(x in complex_signal(10), negative in any::<bool>()) {
        let sign = if negative { Sign::Negative } else { Sign::Positive };
        let conv = FourierConvention::new(sign, Normalization::Plain);
        prop_assert!(rel_err(&fft(&x, conv).unwrap(), &dft(&x, conv)) < 1e-9);
    }

    #[test]
    fn parseval(x in complex_signal(12)) {
        let y = fft(&x, FourierConvention::new(Sign::Negative, Normalization::Unitary)).unwrap();
        prop_assert!((x.energy() - y.energy()).abs() <= 1e-9 * x.energy().max(1.0));
    }

    #[test]
    fn dft_sign_conjugation(x in complex_signal(7)) {
        let plus = FourierConvention::new(Sign::Positive, Normalization::Unitary);
        let minus = FourierConvention::new(Sign::Negative, Normalization::Unitary);
        let conj = |s: &ComplexSignal| ComplexSignal::new(s.values().iter().map(|v| v.conj()).collect()).unwrap();
        prop_assert!(rel_err(&dft(&x, plus), &conj(&dft(&conj(&x), minus))) < 1e-12);
    }

    #[test]
    fn dft_round_trip(x in complex_signal(8), which in 0usize..3) {
        let norm = [Normalization::Unitary, Normalization::Plain, Normalization::Inverse][which];
        let conv = FourierConvention::new(Sign::Negative, norm);
        prop_assert!(inverse_dft(&dft(&x, conv), conv).max_abs_diff(&x) < 1e-9);
    }

    #[test]
    fn wav_round_trip(samples in prop::collection::vec(-1.0f64..=1.0, 0..400), rate in 1u32..200_000) {
        let signal = SampledSignal::new(rate, samples).unwrap();
        let (back, meta) = read_wav(&write_wav(&signal).unwrap()).unwrap();
        prop_assert_eq!(back.sample_rate, rate);
        prop_assert_eq!(meta.data_length as usize, 2 * signal.len());
        for (a, b) in signal.samples.iter().zip(&back.samples) {
            prop_assert!((a - b).abs() <= 1.0 / 32768.0);
        }
    }

    #[test]
    fn real_input_spectrum_is_symmetric(n in 1usize..=10, seed in any::<u64>()) {
        let len = 1usize << n;
        let samples: Vec<f64> = (0..len).map(|i| ((i as f64 + 1.0) * (seed % 977 + 1) as f64 * 0.7071).sin()).collect();
        let signal = SampledSignal::new(8000, samples).unwrap();
        prop_assume!(signal.samples.iter().any(|&v| v != 0.0));
        let dist = measure_exact(&transform(&amplitude_encode(&signal, n, false).unwrap()).unwrap()).distribution();
        for k in 1..len / 2 {
            prop_assert!((dist[k] - dist[len - k]).abs() < 1e-9);
        }
    }

    #[test]
    fn bin_exact_tone_is_found_exactly(n in 3usize..=10, bin_frac in 0.05f64..0.95, rate in prop::sample::select(vec![8000u32, 22050, 44100])) {
        let size = 1usize << n;
        let bin = ((bin_frac * (size / 2) as f64) as usize).clamp(1, size / 2 - 1);
        let freq = bin as f64 * rate as f64 / size as f64;
        let signal = synth_tone(&[(freq, 1.0)], rate, size, 1.0).unwrap();
        let report = detect_pipeline(&signal, &PipelineConfig::new(n, Mode::Raw)).unwrap();
        prop_assert_eq!(report.peaks[0].frequency_hz, freq);
        prop_assert_eq!(report.peaks[0].bin, bin);
    }
}

#[test]
fn pure_tone_energy_concentrates() {
    let (rate, size) = (8000u32, 256usize);
    for bin in [1usize, 5, 17, 64, 100, 127] {
        let f = bin as f64 * rate as f64 / size as f64;
        let signal = synth_tone(&[(f, 1.0)], rate, size, 1.0).unwrap();
        let power = dft(&ComplexSignal::from_real(&signal.samples).unwrap(), FourierConvention::default()).power();
        let total: f64 = power.iter().sum();
        let share = (power[bin]) / (total - power[size - bin]);
        assert!(share > 0.99, "bin {bin}: {share}");
    }
}

#[test]
fn resampling_keeps_peak_position() {
    let tone = synth_tone(&[(440.0, 1.0)], 44100, 8192, 1.0).unwrap();
    let down = resample(&tone, 8820).unwrap();
    assert_eq!(down.len(), 8192 * 8820 / 44100);
    let peak_hz = |s: &SampledSignal, len: usize| {
        let x = ComplexSignal::from_real(&s.samples[..len]).unwrap();
        let p = dft(&x, FourierConvention::default()).power();
        let k = (0..len / 2).max_by(|&a, &b| p[a].total_cmp(&p[b])).unwrap();
        k as f64 * s.sample_rate as f64 / len as f64
    };
    let before = peak_hz(&tone, 1024);
    let after = peak_hz(&down, 1024);
    // both within one bin of 440 Hz at their own resolution
    assert!((before - 440.0).abs() <= 44100.0 / 1024.0);
    assert!((after - 440.0).abs() <= 8820.0 / 1024.0);
    assert!((after - 440.0).abs() < (before - 440.0).abs() + 1e-9);
}

#[test]
fn shot_histogram_converges() {
    let signal = synth_tone(&[(440.0, 1.0)], 44100, 1024, 1.0).unwrap();
    let state = transform(&amplitude_encode(&signal, 10, false).unwrap()).unwrap();
    let exact = measure_exact(&state);
    for seed in [0u64, 1, 2] {
        let shots = sample_shots(&state, 8192, seed).unwrap();
        assert_eq!(shots.total(), 8192.0);
        assert!(total_variation(&shots.distribution(), &exact.distribution()) < 0.05);
    }
}

#[test]
fn reports_are_deterministic() {
    let signal = synth_tone(&[(440.0, 1.0)], 44100, 1024, 1.0).unwrap();
    let config = PipelineConfig::new(10, Mode::Note).with_shots(4096, 99);
    let a = detect_pipeline(&signal, &config).unwrap();
    let b = detect_pipeline(&signal, &config).unwrap();
    assert_eq!(a.to_json(), b.to_json());
    assert_eq!(a.to_text(), b.to_text());
}

#[test]
fn controlled_phase_angles_follow_wire_distance() {
    let circuit = build_qft_circuit(QftCircuitSpec::forward(5)).unwrap();
    for g in circuit.gates() {
        if let Gate::ControlledPhase { control, target, theta } = *g {
            assert!(control > target);
            assert_eq!(theta, PI / f64::powi(2.0, (control - target) as i32));
        }
    }
}
