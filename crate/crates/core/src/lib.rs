//! State-vector simulation of the quantum Fourier transform and its use as a
//! spectral analyzer for audio: note, chord and DTMF detection.
//!
//! The crate is split into:
//!
//! * [`qcore`]: complex amplitudes, n-qubit state vectors, gates, circuits and
//!   dense unitary assembly.
//! * [`qft`]: QFT circuit construction, DFT matrices and Fourier conventions,
//!   Fourier-basis state preparation and operator-string rendering.
//! * [`spectral`]: a classical DFT/FFT used as an independent oracle.
//! * [`audio`]: WAV I/O, resampling and synthesis of tones, chords and DTMF.
//! * [`detect`]: amplitude encoding, measurement, frequency decoding and
//!   note/DTMF interpretation.
//! * [`verify`]: the built-in verification checks run by `qft-tones verify`.
//!
//! Bit ordering is global: qubit 0 is the most significant bit of a basis
//! index, so `|110>` is index 6.

pub mod audio;
pub mod detect;
pub mod qcore;
pub mod qft;
pub mod spectral;
pub mod verify;

pub use audio::{DtmfKey, SampledSignal, WavError, WavMeta};
pub use detect::{DetectError, DetectionReport, MeasurementHistogram, Mode};
pub use qcore::{Circuit, ComplexAmp, ComplexMatrix, Gate, QuantumError, StateVector, UnitaryMatrix};
pub use qft::{FourierConvention, Normalization, QftCircuitSpec, Sign};
pub use spectral::ComplexSignal;
