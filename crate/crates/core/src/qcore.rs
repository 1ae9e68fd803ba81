//! Complex amplitudes, n-qubit state vectors, gates and circuits.
//!
//! Qubit 0 is the most significant bit of the basis index. On an n-qubit
//! register qubit `q` therefore toggles index bit `n - 1 - q`, and gates are
//! applied by pairing amplitudes at stride `2^(n-1-q)` rather than by
//! multiplying with an embedded `2^n x 2^n` matrix.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

/// A single complex amplitude or matrix entry.
pub type ComplexAmp = Complex64;

/// Allowed drift of the squared norm across a single gate.
pub const GATE_NORM_TOLERANCE: f64 = 1e-12;
/// Allowed deviation of the squared norm from 1 for any stored state.
pub const STATE_NORM_TOLERANCE: f64 = 1e-9;
/// Allowed max-elementwise deviation of `U^dagger U` from the identity.
pub const UNITARY_TOLERANCE: f64 = 1e-9;
/// Largest register for which [`circuit_to_unitary`] builds a dense matrix.
pub const MAX_DENSE_QUBITS: usize = 12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuantumError {
    #[error("a register needs at least one qubit")]
    NoQubits,
    #[error("qubit {qubit} is out of range for a {n_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },
    #[error("invalid gate {gate}: {reason}")]
    InvalidGate { gate: String, reason: &'static str },
    #[error("basis index {index} is out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("amplitude count {0} is not a power of two >= 2")]
    BadLength(usize),
    #[error("non-finite amplitude at index {0}")]
    NonFinite(usize),
    #[error("state is not normalized: squared norm {norm_sqr}")]
    NotNormalized { norm_sqr: f64 },
    #[error("gate {gate} changed the squared norm by {drift:e}")]
    NormDrift { gate: String, drift: f64 },
    #[error("state has {state} qubits but circuit has {circuit}")]
    QubitCountMismatch { state: usize, circuit: usize },
    #[error("{n_qubits} qubits is too large for a dense unitary (max {max})")]
    TooLargeForDense { n_qubits: usize, max: usize },
    #[error("matrix is not unitary: max |U^dagger U - I| = {max_error:e}")]
    NotUnitary { max_error: f64 },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
}

pub type Result<T> = std::result::Result<T, QuantumError>;

fn check_finite(amps: &[ComplexAmp]) -> Result<()> {
    match amps.iter().position(|a| !a.re.is_finite() || !a.im.is_finite()) {
        Some(i) => Err(QuantumError::NonFinite(i)),
        None => Ok(()),
    }
}

fn norm_sqr(amps: &[ComplexAmp]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum()
}

/// Number of qubits for a register of `len` amplitudes, if `len` is a power
/// of two of at least 2.
pub fn qubits_for_len(len: usize) -> Option<usize> {
    if len >= 2 && len.is_power_of_two() {
        Some(len.trailing_zeros() as usize)
    } else {
        None
    }
}

/// Renders `index` as an MSB-first bitstring of width `n_qubits`.
pub fn bitstring(index: usize, n_qubits: usize) -> String {
    (0..n_qubits)
        .map(|q| if index >> (n_qubits - 1 - q) & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// A normalized n-qubit state: `2^n` amplitudes with unit norm.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<ComplexAmp>,
}

impl StateVector {
    /// Wraps `amps` as a state. The length must be `2^n` with `n >= 1`, every
    /// entry finite and the squared norm within [`STATE_NORM_TOLERANCE`] of 1.
    pub fn from_amplitudes(amps: Vec<ComplexAmp>) -> Result<Self> {
        let n_qubits = qubits_for_len(amps.len()).ok_or(QuantumError::BadLength(amps.len()))?;
        check_finite(&amps)?;
        let ns = norm_sqr(&amps);
        if (ns - 1.0).abs() >= STATE_NORM_TOLERANCE {
            return Err(QuantumError::NotNormalized { norm_sqr: ns });
        }
        Ok(Self { n_qubits, amps })
    }

    /// The computational basis state `|index>`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        if n_qubits == 0 {
            return Err(QuantumError::NoQubits);
        }
        if n_qubits >= usize::BITS as usize {
            return Err(QuantumError::TooLargeForDense { n_qubits, max: usize::BITS as usize - 1 });
        }
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(QuantumError::IndexOutOfRange { index, dim });
        }
        let mut amps = vec![ComplexAmp::new(0.0, 0.0); dim];
        amps[index] = ComplexAmp::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[ComplexAmp] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<ComplexAmp> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amps)
    }

    /// Born-rule probabilities `|a_i|^2`.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Index of the most probable outcome; ties go to the lower index.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        let mut best_p = f64::NEG_INFINITY;
        for (i, a) in self.amps.iter().enumerate() {
            let p = a.norm_sqr();
            if p > best_p {
                best = i;
                best_p = p;
            }
        }
        best
    }

    /// Max elementwise distance between two states of equal size.
    pub fn max_abs_diff(&self, other: &StateVector) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl fmt::Display for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, a) in self.amps.iter().enumerate() {
            if a.norm_sqr() == 0.0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({:.6}{:+.6}i)|{}>", a.re, a.im, bitstring(i, self.n_qubits))?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Builds `|index>` on `n` qubits.
pub fn basis_state(n: usize, index: usize) -> Result<StateVector> {
    StateVector::basis(n, index)
}

/// The gate set used by QFT circuits. Angles are in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    H(usize),
    X(usize),
    /// `diag(1, e^{i theta})` on one qubit.
    Phase(usize, f64),
    /// Multiplies the `|11>` component of `(control, target)` by `e^{i theta}`.
    ControlledPhase { control: usize, target: usize, theta: f64 },
    Swap(usize, usize),
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::H(q) | Gate::X(q) | Gate::Phase(q, _) => vec![q],
            Gate::ControlledPhase { control, target, .. } => vec![control, target],
            Gate::Swap(a, b) => vec![a, b],
        }
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        for q in self.qubits() {
            if q >= n_qubits {
                return Err(QuantumError::QubitOutOfRange { qubit: q, n_qubits });
            }
        }
        match *self {
            Gate::Phase(_, theta) | Gate::ControlledPhase { theta, .. } if !theta.is_finite() => {
                Err(QuantumError::InvalidGate { gate: self.to_string(), reason: "angle is not finite" })
            }
            Gate::ControlledPhase { control, target, .. } if control == target => {
                Err(QuantumError::InvalidGate { gate: self.to_string(), reason: "control equals target" })
            }
            Gate::Swap(a, b) if a == b => {
                Err(QuantumError::InvalidGate { gate: self.to_string(), reason: "swap of a qubit with itself" })
            }
            _ => Ok(()),
        }
    }

    /// The inverse gate. H, X and SWAP are self-inverse; phases are negated.
    pub fn inverse(&self) -> Gate {
        match *self {
            Gate::Phase(q, theta) => Gate::Phase(q, -theta),
            Gate::ControlledPhase { control, target, theta } => {
                Gate::ControlledPhase { control, target, theta: -theta }
            }
            g => g,
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::H(q) => write!(f, "H({q})"),
            Gate::X(q) => write!(f, "X({q})"),
            Gate::Phase(q, theta) => write!(f, "P({q}, {theta})"),
            Gate::ControlledPhase { control, target, theta } => {
                write!(f, "CP({control}, {target}, {theta})")
            }
            Gate::Swap(a, b) => write!(f, "SWAP({a}, {b})"),
        }
    }
}

/// Applies `gate` to `amps` in place. Indices must already be validated.
fn apply_in_place(amps: &mut [ComplexAmp], n_qubits: usize, gate: &Gate) {
    let bit = |q: usize| 1usize << (n_qubits - 1 - q);
    match *gate {
        Gate::H(q) => {
            let stride = bit(q);
            for i in 0..amps.len() {
                if i & stride == 0 {
                    let a = amps[i];
                    let b = amps[i | stride];
                    amps[i] = (a + b) * FRAC_1_SQRT_2;
                    amps[i | stride] = (a - b) * FRAC_1_SQRT_2;
                }
            }
        }
        Gate::X(q) => {
            let stride = bit(q);
            for i in 0..amps.len() {
                if i & stride == 0 {
                    amps.swap(i, i | stride);
                }
            }
        }
        Gate::Phase(q, theta) => {
            let mask = bit(q);
            let w = ComplexAmp::from_polar(1.0, theta);
            for (i, a) in amps.iter_mut().enumerate() {
                if i & mask != 0 {
                    *a *= w;
                }
            }
        }
        Gate::ControlledPhase { control, target, theta } => {
            let mask = bit(control) | bit(target);
            let w = ComplexAmp::from_polar(1.0, theta);
            for (i, a) in amps.iter_mut().enumerate() {
                if i & mask == mask {
                    *a *= w;
                }
            }
        }
        Gate::Swap(a, b) => {
            let (ma, mb) = (bit(a), bit(b));
            for i in 0..amps.len() {
                // visit each (a=1, b=0) index once and swap with its (a=0, b=1) partner
                if i & ma != 0 && i & mb == 0 {
                    amps.swap(i, (i & !ma) | mb);
                }
            }
        }
    }
}

/// Applies a single gate. The squared norm may drift by at most
/// [`GATE_NORM_TOLERANCE`].
pub fn apply_gate(state: &StateVector, gate: &Gate) -> Result<StateVector> {
    gate.validate(state.n_qubits)?;
    let mut amps = state.amps.clone();
    apply_checked(&mut amps, state.n_qubits, gate)?;
    Ok(StateVector { n_qubits: state.n_qubits, amps })
}

fn apply_checked(amps: &mut [ComplexAmp], n_qubits: usize, gate: &Gate) -> Result<()> {
    let before = norm_sqr(amps);
    apply_in_place(amps, n_qubits, gate);
    check_finite(amps)?;
    let drift = (norm_sqr(amps) - before).abs();
    if drift >= GATE_NORM_TOLERANCE {
        return Err(QuantumError::NormDrift { gate: gate.to_string(), drift });
    }
    Ok(())
}

/// An ordered gate list over a fixed register. The first gate in the list is
/// the first applied to the state.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 {
            return Err(QuantumError::NoQubits);
        }
        Ok(Self { n_qubits, gates: Vec::new() })
    }

    pub fn from_gates(n_qubits: usize, gates: Vec<Gate>) -> Result<Self> {
        let mut c = Self::new(n_qubits)?;
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, gate: Gate) -> Result<&mut Self> {
        gate.validate(self.n_qubits)?;
        self.gates.push(gate);
        Ok(self)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// The inverse circuit: reversed order, each gate inverted.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            n_qubits: self.n_qubits,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
        }
    }
}

/// Runs every gate of `circuit` on `state` in list order.
pub fn apply_circuit(state: &StateVector, circuit: &Circuit) -> Result<StateVector> {
    if state.n_qubits != circuit.n_qubits {
        return Err(QuantumError::QubitCountMismatch { state: state.n_qubits, circuit: circuit.n_qubits });
    }
    let mut amps = state.amps.clone();
    for gate in &circuit.gates {
        apply_checked(&mut amps, circuit.n_qubits, gate)?;
    }
    let ns = norm_sqr(&amps);
    if (ns - 1.0).abs() >= STATE_NORM_TOLERANCE {
        return Err(QuantumError::NotNormalized { norm_sqr: ns });
    }
    Ok(StateVector { n_qubits: state.n_qubits, amps })
}

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<ComplexAmp>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![ComplexAmp::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = ComplexAmp::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from `dim` rows of `dim` entries each.
    pub fn from_rows(rows: Vec<Vec<ComplexAmp>>) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(QuantumError::DimensionMismatch { left: dim, right: row.len() });
            }
            data.extend(row);
        }
        Ok(Self { dim, data })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> ComplexAmp) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                data.push(f(r, c));
            }
        }
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> ComplexAmp {
        self.data[row * self.dim + col]
    }

    pub fn row(&self, row: usize) -> &[ComplexAmp] {
        &self.data[row * self.dim..(row + 1) * self.dim]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self.get(c, r).conj())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|x| x * s).collect() }
    }

    pub fn mul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.dim != other.dim {
            return Err(QuantumError::DimensionMismatch { left: self.dim, right: other.dim });
        }
        let n = self.dim;
        let mut out = Self::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self.data[r * n + k];
                if a == ComplexAmp::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..n {
                    out.data[r * n + c] += a * other.data[k * n + c];
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[ComplexAmp]) -> Result<Vec<ComplexAmp>> {
        if v.len() != self.dim {
            return Err(QuantumError::DimensionMismatch { left: self.dim, right: v.len() });
        }
        Ok((0..self.dim)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// Largest elementwise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        if self.dim != other.dim {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Max elementwise deviation of `self^dagger self` from the identity.
    pub fn unitarity_error(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let mut acc = ComplexAmp::new(0.0, 0.0);
                for k in 0..n {
                    acc += self.data[k * n + i].conj() * self.data[k * n + j];
                }
                let expect = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((acc - expect).norm());
            }
        }
        worst
    }

    /// Renders with `a+bi` entries at 6 decimals in aligned columns.
    pub fn to_aligned_string(&self) -> String {
        let cells: Vec<String> = self
            .data
            .iter()
            .map(|z| {
                // avoid printing "-0.000000"
                let re = if z.re.abs() < 5e-7 { 0.0 } else { z.re };
                let im = if z.im.abs() < 5e-7 { 0.0 } else { z.im };
                format!("{re:.6}{im:+.6}i")
            })
            .collect();
        let width = cells.iter().map(String::len).max().unwrap_or(0);
        let mut out = String::new();
        for r in 0..self.dim {
            let line: Vec<String> = cells[r * self.dim..(r + 1) * self.dim]
                .iter()
                .map(|c| format!("{c:>width$}"))
                .collect();
            out.push_str(&line.join("  "));
            out.push('\n');
        }
        out
    }
}

/// A [`ComplexMatrix`] verified to satisfy `U^dagger U = I` within
/// [`UNITARY_TOLERANCE`].
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix(ComplexMatrix);

impl UnitaryMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let max_error = m.unitarity_error();
        if !(max_error < UNITARY_TOLERANCE) {
            return Err(QuantumError::NotUnitary { max_error });
        }
        Ok(Self(m))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }
}

impl std::ops::Deref for UnitaryMatrix {
    type Target = ComplexMatrix;

    fn deref(&self) -> &ComplexMatrix {
        &self.0
    }
}

/// Dense unitary of `circuit`; column `j` is the circuit applied to `|j>`.
pub fn circuit_to_unitary(circuit: &Circuit) -> Result<UnitaryMatrix> {
    let n = circuit.n_qubits;
    if n > MAX_DENSE_QUBITS {
        return Err(QuantumError::TooLargeForDense { n_qubits: n, max: MAX_DENSE_QUBITS });
    }
    let dim = 1usize << n;
    let mut m = ComplexMatrix::zeros(dim);
    for col in 0..dim {
        let out = apply_circuit(&StateVector::basis(n, col)?, circuit)?;
        for (row, a) in out.amps.iter().enumerate() {
            m.data[row * dim + col] = *a;
        }
    }
    UnitaryMatrix::new(m)
}
