//! QFT circuits, DFT matrices and Fourier conventions.
//!
//! The quantum transform uses `omega = e^{+2 pi i / N}` with unitary
//! normalization. The classical DFT in [`crate::spectral`] defaults to
//! `omega = e^{-2 pi i / N}`; [`FourierConvention`] makes the choice explicit
//! wherever both appear.

use std::f64::consts::{PI, TAU};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qcore::{apply_circuit, Circuit, ComplexAmp, ComplexMatrix, Gate, QuantumError, StateVector};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QftError {
    #[error("transform size must be at least 1")]
    ZeroSize,
    #[error("a QFT needs at least one qubit")]
    NoQubits,
    #[error("Fourier index {index} is out of range for {n_qubits} qubits")]
    IndexOutOfRange { index: usize, n_qubits: usize },
    #[error("cannot parse operator string at {token:?}: {reason}")]
    Parse { token: String, reason: &'static str },
    #[error(transparent)]
    Quantum(#[from] QuantumError),
}

pub type Result<T> = std::result::Result<T, QftError>;

/// Sign of the exponent in `omega = e^{sign * 2 pi i / N}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Positive => 1.0,
            Sign::Negative => -1.0,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Positive => Sign::Negative,
            Sign::Negative => Sign::Positive,
        }
    }
}

/// Scale factor applied to a transform of size `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Normalization {
    /// `1 / sqrt(N)`
    Unitary,
    /// `1`
    Plain,
    /// `1 / N`
    Inverse,
}

impl Normalization {
    pub fn factor(self, n: usize) -> f64 {
        match self {
            Normalization::Unitary => 1.0 / (n as f64).sqrt(),
            Normalization::Plain => 1.0,
            Normalization::Inverse => 1.0 / n as f64,
        }
    }

    /// The normalization that undoes this one in a forward/inverse pair.
    pub fn partner(self) -> Normalization {
        match self {
            Normalization::Unitary => Normalization::Unitary,
            Normalization::Plain => Normalization::Inverse,
            Normalization::Inverse => Normalization::Plain,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FourierConvention {
    pub sign: Sign,
    pub normalization: Normalization,
}

impl FourierConvention {
    pub const fn new(sign: Sign, normalization: Normalization) -> Self {
        Self { sign, normalization }
    }

    /// Convention of the quantum transform: `e^{+2 pi i/N}`, `1/sqrt(N)`.
    pub const QUANTUM: FourierConvention = FourierConvention::new(Sign::Positive, Normalization::Unitary);

    /// Convention of the classical DFT worked examples: `e^{-2 pi i/N}`, no scaling.
    pub const CLASSICAL_PLAIN: FourierConvention = FourierConvention::new(Sign::Negative, Normalization::Plain);

    /// The convention whose transform inverts this one.
    pub fn inverse(self) -> Self {
        Self { sign: self.sign.flip(), normalization: self.normalization.partner() }
    }
}

impl Default for FourierConvention {
    fn default() -> Self {
        FourierConvention::new(Sign::Negative, Normalization::Unitary)
    }
}

/// `omega^k` for `omega = e^{sign * 2 pi i / n}`, reduced mod `n` first so
/// the angle stays in `[0, 2 pi)`.
pub(crate) fn root_power(n: usize, k: usize, sign: Sign) -> ComplexAmp {
    let k = k % n;
    // exact values at the quarter turns
    match (4 * k).checked_rem(n) {
        Some(0) => {
            let quarter = 4 * k / n;
            let (re, im) = [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)][quarter];
            return Complex64::new(re, sign.value() * im);
        }
        _ => {}
    }
    Complex64::from_polar(1.0, sign.value() * TAU * k as f64 / n as f64)
}

/// `[omega^0, omega^1, ..., omega^{n-1}]` with `omega = e^{sign * 2 pi i / n}`.
pub fn roots_of_unity(n: usize, sign: Sign) -> Result<Vec<ComplexAmp>> {
    if n == 0 {
        return Err(QftError::ZeroSize);
    }
    Ok((0..n).map(|k| root_power(n, k, sign)).collect())
}

/// The `size x size` DFT matrix: entry `(k, j)` is `factor * omega^{k j}`.
/// Only the unitary normalization yields a unitary matrix.
pub fn dft_matrix(size: usize, convention: FourierConvention) -> Result<ComplexMatrix> {
    if size == 0 {
        return Err(QftError::ZeroSize);
    }
    let factor = convention.normalization.factor(size);
    Ok(ComplexMatrix::from_fn(size, |k, j| root_power(size, k * j, convention.sign) * factor))
}

/// Parameters for [`build_qft_circuit`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QftCircuitSpec {
    pub n_qubits: usize,
    pub inverse: bool,
    pub include_final_swaps: bool,
}

impl QftCircuitSpec {
    pub fn forward(n_qubits: usize) -> Self {
        Self { n_qubits, inverse: false, include_final_swaps: true }
    }

    pub fn inverse(n_qubits: usize) -> Self {
        Self { n_qubits, inverse: true, include_final_swaps: true }
    }

    pub fn without_swaps(self) -> Self {
        Self { include_final_swaps: false, ..self }
    }

    /// `n` Hadamards, `n(n-1)/2` controlled phases and `floor(n/2)` swaps.
    pub fn gate_count(&self) -> usize {
        let n = self.n_qubits;
        let swaps = if self.include_final_swaps { n / 2 } else { 0 };
        n + n * (n.saturating_sub(1)) / 2 + swaps
    }
}

/// Builds the textbook QFT circuit.
///
/// For each qubit `q` from the most significant down: `H(q)`, then a
/// controlled phase of `pi / 2^(q' - q)` from every less significant qubit
/// `q'`. A final layer swaps `q` with `n - 1 - q`. With swaps the unitary is
/// `dft_matrix(2^n, +1, unitary)`. The inverse is the reversed circuit with
/// negated phases.
pub fn build_qft_circuit(spec: QftCircuitSpec) -> Result<Circuit> {
    let n = spec.n_qubits;
    if n == 0 {
        return Err(QftError::NoQubits);
    }
    let mut circuit = Circuit::new(n)?;
    for q in 0..n {
        circuit.push(Gate::H(q))?;
        for qp in q + 1..n {
            let theta = PI / (1u64 << (qp - q)) as f64;
            circuit.push(Gate::ControlledPhase { control: qp, target: q, theta })?;
        }
    }
    if spec.include_final_swaps {
        for q in 0..n / 2 {
            circuit.push(Gate::Swap(q, n - 1 - q))?;
        }
    }
    Ok(if spec.inverse { circuit.inverse() } else { circuit })
}

/// Circuit preparing the Fourier-basis state for `j` from `|0...0>`: a
/// Hadamard and then a phase of `2 pi j / 2^(n-q)` on each qubit `q`.
pub fn fourier_state_circuit(j: usize, n_qubits: usize) -> Result<Circuit> {
    if n_qubits == 0 {
        return Err(QftError::NoQubits);
    }
    if n_qubits >= usize::BITS as usize || j >= 1usize << n_qubits {
        return Err(QftError::IndexOutOfRange { index: j, n_qubits });
    }
    let mut circuit = Circuit::new(n_qubits)?;
    for q in 0..n_qubits {
        let period = (1u128 << (n_qubits - q)) as f64;
        // reduce j first so the angle stays small and exact for dyadic values
        let turns = (j % (1usize << (n_qubits - q))) as f64 / period;
        circuit.push(Gate::H(q))?;
        circuit.push(Gate::Phase(q, TAU * turns))?;
    }
    Ok(circuit)
}

/// The product state `2^{-n/2} (x)_q (|0> + e^{2 pi i j / 2^(n-q)} |1>)`.
///
/// Qubit 0 carries the finest phase `2 pi j / 2^n`. In this wire order the
/// state equals the swap-free QFT core applied to `|j>`, so the swap-free
/// inverse QFT ([`QftCircuitSpec::inverse`] with
/// [`QftCircuitSpec::without_swaps`]) maps it back to `|j>` exactly.
pub fn prepare_fourier_state(j: usize, n_qubits: usize) -> Result<StateVector> {
    let circuit = fourier_state_circuit(j, n_qubits)?;
    Ok(apply_circuit(&StateVector::basis(n_qubits, 0)?, &circuit)?)
}

/// Circuit that maps [`prepare_fourier_state`]`(j, n)` back to `|j>`.
pub fn fourier_state_decoder(n_qubits: usize) -> Result<Circuit> {
    build_qft_circuit(QftCircuitSpec::inverse(n_qubits).without_swaps())
}

/// Formats `theta / pi`, as a reduced dyadic fraction when exact.
fn format_pi_ratio(theta: f64) -> String {
    let ratio = theta / PI;
    if ratio == 0.0 {
        return "0".to_string();
    }
    for k in 0..=40u32 {
        let den = (1u64 << k) as f64;
        let num = ratio * den;
        if num.fract() == 0.0 && num.abs() < 9.0e15 {
            let num = num as i64;
            return if k == 0 { num.to_string() } else { format!("{num}/{}", 1u64 << k) };
        }
    }
    format!("{ratio:?}")
}

fn parse_pi_ratio(s: &str) -> Option<f64> {
    let ratio = match s.split_once('/') {
        Some((num, den)) => num.parse::<f64>().ok()? / den.parse::<f64>().ok()?,
        None => s.parse::<f64>().ok()?,
    };
    ratio.is_finite().then_some(ratio * PI)
}

fn render_gate(gate: &Gate) -> String {
    match *gate {
        Gate::H(q) => format!("H_{{{q}}}"),
        Gate::X(q) => format!("X_{{{q}}}"),
        Gate::Phase(q, theta) => format!("P_{{{q}}}^{{{}}}", format_pi_ratio(theta)),
        Gate::ControlledPhase { control, target, theta } => {
            format!("C_{{{control}}}(P_{{{target}}}^{{{}}})", format_pi_ratio(theta))
        }
        Gate::Swap(a, b) => format!("SWAP_{{{a},{b}}}"),
    }
}

/// Operator-product form of a circuit, last-applied gate leftmost.
///
/// Tokens are `H_{q}`, `X_{q}`, `P_{q}^{r}`, `C_{c}(P_{t}^{r})` and
/// `SWAP_{a,b}`, where `r = theta / pi`. An empty circuit renders as `I`.
pub fn render_decomposition(circuit: &Circuit) -> String {
    if circuit.is_empty() {
        return "I".to_string();
    }
    circuit.gates().iter().rev().map(render_gate).collect::<Vec<_>>().join(" ")
}

/// Parses the output of [`render_decomposition`] back into a circuit.
pub fn parse_decomposition(text: &str, n_qubits: usize) -> Result<Circuit> {
    let text = text.trim();
    let mut gates = Vec::new();
    if text != "I" {
        for token in text.split_whitespace() {
            gates.push(parse_gate(token)?);
        }
    }
    gates.reverse();
    Ok(Circuit::from_gates(n_qubits, gates)?)
}

fn parse_gate(token: &str) -> Result<Gate> {
    let err = |reason| QftError::Parse { token: token.to_string(), reason };
    let braced = |s: &str| -> Option<(String, String)> {
        let s = s.strip_prefix('{')?;
        let close = s.find('}')?;
        Some((s[..close].to_string(), s[close + 1..].to_string()))
    };
    let index = |s: &str| s.parse::<usize>().map_err(|_| err("bad qubit index"));
    let angle = |rest: &str| -> Result<f64> {
        let (r, tail) = rest.strip_prefix('^').and_then(braced).ok_or_else(|| err("missing angle"))?;
        if !tail.is_empty() {
            return Err(err("trailing characters"));
        }
        parse_pi_ratio(&r).ok_or_else(|| err("bad angle"))
    };

    if let Some(rest) = token.strip_prefix("SWAP_") {
        let (inner, tail) = braced(rest).ok_or_else(|| err("missing braces"))?;
        let (a, b) = inner.split_once(',').ok_or_else(|| err("expected two qubits"))?;
        if !tail.is_empty() {
            return Err(err("trailing characters"));
        }
        return Ok(Gate::Swap(index(a)?, index(b)?));
    }
    if let Some(rest) = token.strip_prefix("H_") {
        let (q, tail) = braced(rest).ok_or_else(|| err("missing braces"))?;
        if !tail.is_empty() {
            return Err(err("trailing characters"));
        }
        return Ok(Gate::H(index(&q)?));
    }
    if let Some(rest) = token.strip_prefix("X_") {
        let (q, tail) = braced(rest).ok_or_else(|| err("missing braces"))?;
        if !tail.is_empty() {
            return Err(err("trailing characters"));
        }
        return Ok(Gate::X(index(&q)?));
    }
    if let Some(rest) = token.strip_prefix("P_") {
        let (q, tail) = braced(rest).ok_or_else(|| err("missing braces"))?;
        return Ok(Gate::Phase(index(&q)?, angle(&tail)?));
    }
    if let Some(rest) = token.strip_prefix("C_") {
        let (c, tail) = braced(rest).ok_or_else(|| err("missing braces"))?;
        let inner = tail
            .strip_prefix("(P_")
            .and_then(|s| s.strip_suffix(')'))
            .ok_or_else(|| err("expected (P_{t}^{r})"))?;
        let (t, tail) = braced(inner).ok_or_else(|| err("missing braces"))?;
        return Ok(Gate::ControlledPhase { control: index(&c)?, target: index(&t)?, theta: angle(&tail)? });
    }
    Err(err("unknown gate"))
}

/// The 2-qubit relative-phase demonstration: the forward QFT applied to the
/// uniform state `(1,1,1,1)/2` and to the ramp `(1,-i,-1,i)/2`. The two inputs
/// have identical magnitudes; the outputs are `|00>` and `|01>`.
pub fn relative_phase_demo() -> Result<(StateVector, StateVector)> {
    let half = |re: f64, im: f64| Complex64::new(re / 2.0, im / 2.0);
    let uniform = StateVector::from_amplitudes(vec![half(1.0, 0.0); 4])?;
    let ramp = StateVector::from_amplitudes(vec![half(1.0, 0.0), half(0.0, -1.0), half(-1.0, 0.0), half(0.0, 1.0)])?;
    let qft = build_qft_circuit(QftCircuitSpec::forward(2))?;
    Ok((apply_circuit(&uniform, &qft)?, apply_circuit(&ramp, &qft)?))
}

impl fmt::Display for QftCircuitSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}QFT on {} qubits{}",
            if self.inverse { "inverse " } else { "" },
            self.n_qubits,
            if self.include_final_swaps { "" } else { " (no final swaps)" }
        )
    }
}
