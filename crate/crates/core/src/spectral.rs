//! Classical DFT and radix-2 FFT.
//!
//! This module is the ground truth for the quantum path and deliberately
//! shares no transform code with [`crate::qcore`] or [`crate::qft`]; only the
//! [`FourierConvention`] descriptor is common.

use std::f64::consts::TAU;

use num_complex::Complex64;
use thiserror::Error;

use crate::qft::{FourierConvention, Normalization, Sign};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("signal must have at least one sample")]
    Empty,
    #[error("non-finite sample at index {0}")]
    NonFinite(usize),
    #[error("FFT length {0} is not a power of two; zero-pad the signal to the next power of two")]
    NotPowerOfTwo(usize),
}

pub type Result<T> = std::result::Result<T, SpectralError>;

/// A finite, non-empty complex sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSignal(Vec<Complex64>);

impl ComplexSignal {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        if values.is_empty() {
            return Err(SpectralError::Empty);
        }
        if let Some(i) = values.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(SpectralError::NonFinite(i));
        }
        Ok(Self(values))
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn values(&self) -> &[Complex64] {
        &self.0
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn energy(&self) -> f64 {
        self.0.iter().map(|v| v.norm_sqr()).sum()
    }

    /// `|c_k|^2` for every bin.
    pub fn power(&self) -> Vec<f64> {
        self.0.iter().map(|v| v.norm_sqr()).collect()
    }

    pub fn max_abs_diff(&self, other: &ComplexSignal) -> f64 {
        if self.len() != other.len() {
            return f64::INFINITY;
        }
        self.0.iter().zip(&other.0).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

fn twiddle(n: usize, k: usize, sign: Sign) -> Complex64 {
    let k = k % n;
    let s = match sign {
        Sign::Positive => 1.0,
        Sign::Negative => -1.0,
    };
    if (4 * k) % n == 0 {
        return match 4 * k / n {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, s),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -s),
        };
    }
    Complex64::from_polar(1.0, s * TAU * k as f64 / n as f64)
}

fn factor(normalization: Normalization, n: usize) -> f64 {
    match normalization {
        Normalization::Unitary => 1.0 / (n as f64).sqrt(),
        Normalization::Plain => 1.0,
        Normalization::Inverse => 1.0 / n as f64,
    }
}

/// Direct `O(N^2)` evaluation of `c_k = factor * sum_j x_j omega^{j k}`.
pub fn dft(x: &ComplexSignal, convention: FourierConvention) -> ComplexSignal {
    let n = x.len();
    let scale = factor(convention.normalization, n);
    let out = (0..n)
        .map(|k| {
            x.0.iter()
                .enumerate()
                .map(|(j, v)| v * twiddle(n, j * k % n, convention.sign))
                .sum::<Complex64>()
                * scale
        })
        .collect();
    ComplexSignal(out)
}

/// Inverse of [`dft`] under the same `forward` convention: conjugate root and
/// the partner normalization, so `inverse_dft(dft(x, c), c) == x`.
pub fn inverse_dft(c: &ComplexSignal, forward: FourierConvention) -> ComplexSignal {
    dft(c, forward.inverse())
}

/// Iterative radix-2 decimation-in-time FFT. Lengths that are not a power of
/// two are rejected rather than padded.
pub fn fft(x: &ComplexSignal, convention: FourierConvention) -> Result<ComplexSignal> {
    let n = x.len();
    if !n.is_power_of_two() {
        return Err(SpectralError::NotPowerOfTwo(n));
    }
    let mut buf = x.0.clone();
    let bits = n.trailing_zeros();
    if bits > 0 {
        for i in 0..n {
            let j = i.reverse_bits() >> (usize::BITS - bits);
            if j > i {
                buf.swap(i, j);
            }
        }
    }

    let table: Vec<Complex64> = (0..n / 2).map(|k| twiddle(n, k, convention.sign)).collect();
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let step = n / len;
        for start in (0..n).step_by(len) {
            for k in 0..half {
                let w = table[k * step];
                let a = buf[start + k];
                let b = buf[start + k + half] * w;
                buf[start + k] = a + b;
                buf[start + k + half] = a - b;
            }
        }
        len <<= 1;
    }

    let scale = factor(convention.normalization, n);
    if scale != 1.0 {
        for v in &mut buf {
            *v *= scale;
        }
    }
    Ok(ComplexSignal(buf))
}

/// A Gaussian integer `re + im i`, for exact small-matrix products.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GaussianInt {
    pub re: i64,
    pub im: i64,
}

impl GaussianInt {
    pub const ZERO: GaussianInt = GaussianInt { re: 0, im: 0 };
    pub const ONE: GaussianInt = GaussianInt { re: 1, im: 0 };
    pub const I: GaussianInt = GaussianInt { re: 0, im: 1 };

    pub const fn new(re: i64, im: i64) -> Self {
        Self { re, im }
    }

    /// `i^k` for any integer `k`.
    pub fn i_pow(k: i64) -> Self {
        [Self::new(1, 0), Self::new(0, 1), Self::new(-1, 0), Self::new(0, -1)][k.rem_euclid(4) as usize]
    }

    pub fn add(self, o: Self) -> Self {
        Self::new(self.re + o.re, self.im + o.im)
    }

    pub fn mul(self, o: Self) -> Self {
        Self::new(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.re as f64, self.im as f64)
    }
}

pub type GaussMatrix4 = [[GaussianInt; 4]; 4];

fn gauss_mul(a: &GaussMatrix4, b: &GaussMatrix4) -> GaussMatrix4 {
    let mut out = [[GaussianInt::ZERO; 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            out[r][c] = (0..4).fold(GaussianInt::ZERO, |acc, k| acc.add(a[r][k].mul(b[k][c])));
        }
    }
    out
}

fn nonzeros(m: &GaussMatrix4) -> usize {
    m.iter().flatten().filter(|v| **v != GaussianInt::ZERO).count()
}

/// Outcome of [`sparse_factorization_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct FactorizationReport {
    /// Left factor as printed: `[[1,0,1,0],[0,1,0,1],[1,0,i^2,0],[0,1,0,i^2]]`.
    pub u1: GaussMatrix4,
    /// Right factor as printed: `[[1,1,0,0],[0,0,1,i],[1,i^2,0,0],[0,0,1,i^3]]`.
    pub u2: GaussMatrix4,
    /// Unnormalized `F_4` with `omega = i`.
    pub f4: GaussMatrix4,
    pub u1_nonzeros: usize,
    pub u2_nonzeros: usize,
    /// Whether `U1 * U2 == F4`.
    pub u1_u2_holds: bool,
    /// Whether `U2 * U1 == F4`.
    pub u2_u1_holds: bool,
}

impl FactorizationReport {
    pub fn passed(&self) -> bool {
        self.u1_u2_holds || self.u2_u1_holds
    }

    pub fn holding_order(&self) -> Option<&'static str> {
        match (self.u2_u1_holds, self.u1_u2_holds) {
            (true, true) => Some("U1*U2 and U2*U1"),
            (true, false) => Some("U2*U1"),
            (false, true) => Some("U1*U2"),
            (false, false) => None,
        }
    }
}

/// Multiplies the two sparse 4x4 FFT factors in both orders using exact
/// Gaussian-integer arithmetic and reports which order reproduces `F_4`.
pub fn sparse_factorization_check() -> FactorizationReport {
    let o = GaussianInt::ZERO;
    let l = GaussianInt::ONE;
    let ip = GaussianInt::i_pow;
    let u1 = [[l, o, l, o], [o, l, o, l], [l, o, ip(2), o], [o, l, o, ip(2)]];
    let u2 = [[l, l, o, o], [o, o, l, ip(1)], [l, ip(2), o, o], [o, o, l, ip(3)]];
    let mut f4 = [[o; 4]; 4];
    for (k, row) in f4.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = ip((k * j) as i64);
        }
    }
    FactorizationReport {
        u1,
        u2,
        f4,
        u1_nonzeros: nonzeros(&u1),
        u2_nonzeros: nonzeros(&u2),
        u1_u2_holds: gauss_mul(&u1, &u2) == f4,
        u2_u1_holds: gauss_mul(&u2, &u1) == f4,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::ComplexMatrix;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sig(v: &[(f64, f64)]) -> ComplexSignal {
        ComplexSignal::new(v.iter().map(|&(r, i)| c(r, i)).collect()).unwrap()
    }

    fn plain(sign: Sign) -> FourierConvention {
        FourierConvention::new(sign, Normalization::Plain)
    }

    #[test]
    fn worked_dft_examples() {
        let out = dft(&ComplexSignal::from_real(&[1.0, 2.0]).unwrap(), FourierConvention::CLASSICAL_PLAIN);
        assert!(out.max_abs_diff(&sig(&[(3.0, 0.0), (-1.0, 0.0)])) < 1e-12);

        let out = dft(&ComplexSignal::from_real(&[1.0, 2.0, 0.0, 0.0]).unwrap(), FourierConvention::CLASSICAL_PLAIN);
        assert!(out.max_abs_diff(&sig(&[(3.0, 0.0), (1.0, -2.0), (-1.0, 0.0), (1.0, 2.0)])) < 1e-12);
    }

    #[test]
    fn impulse_gives_flat_spectrum() {
        let x = sig(&[(2.5, -1.0), (0.0, 0.0), (0.0, 0.0), (0.0, 0.0), (0.0, 0.0)]);
        for v in dft(&x, plain(Sign::Negative)).values() {
            assert!((v - c(2.5, -1.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn fft_examples() {
        let out = fft(&ComplexSignal::from_real(&[0.0, 1.0, 0.0, 0.0]).unwrap(), plain(Sign::Negative)).unwrap();
        assert!(out.max_abs_diff(&sig(&[(1.0, 0.0), (0.0, -1.0), (-1.0, 0.0), (0.0, 1.0)])) < 1e-12);
        let out = fft(&ComplexSignal::from_real(&[1.0; 4]).unwrap(), plain(Sign::Negative)).unwrap();
        assert!(out.max_abs_diff(&sig(&[(4.0, 0.0), (0.0, 0.0), (0.0, 0.0), (0.0, 0.0)])) < 1e-12);
        let one = ComplexSignal::from_real(&[7.0]).unwrap();
        assert_eq!(fft(&one, plain(Sign::Negative)).unwrap(), one);
    }

    #[test]
    fn fft_rejects_odd_lengths() {
        let x = ComplexSignal::from_real(&[1.0, 2.0, 3.0]).unwrap();
        let err = fft(&x, FourierConvention::default()).unwrap_err();
        assert_eq!(err, SpectralError::NotPowerOfTwo(3));
        assert!(err.to_string().contains("zero-pad"));
    }

    #[test]
    fn signal_validation() {
        assert_eq!(ComplexSignal::new(vec![]), Err(SpectralError::Empty));
        assert_eq!(ComplexSignal::from_real(&[0.0, f64::INFINITY]), Err(SpectralError::NonFinite(1)));
    }

    #[test]
    fn inverse_examples() {
        let x = ComplexSignal::from_real(&[1.0, 2.0, 0.0, 0.0]).unwrap();
        let conv = FourierConvention::CLASSICAL_PLAIN;
        assert!(inverse_dft(&dft(&x, conv), conv).max_abs_diff(&x) < 1e-12);
        // forward plain => the inverse carries 1/N
        let back = inverse_dft(&ComplexSignal::from_real(&[4.0, 0.0, 0.0, 0.0]).unwrap(), conv);
        assert!(back.max_abs_diff(&ComplexSignal::from_real(&[1.0; 4]).unwrap()) < 1e-12);
    }

    #[test]
    fn sparse_factors() {
        let report = sparse_factorization_check();
        assert!(report.u2_u1_holds);
        assert!(!report.u1_u2_holds);
        assert_eq!(report.holding_order(), Some("U2*U1"));
        assert_eq!((report.u1_nonzeros, report.u2_nonzeros), (8, 8));
        let f4 = ComplexMatrix::from_fn(4, |r, c| report.f4[r][c].to_complex()).scale(0.5);
        assert!(f4.unitarity_error() < 1e-15);
    }

    #[test]
    fn gaussian_powers() {
        assert_eq!(GaussianInt::i_pow(-1), GaussianInt::new(0, -1));
        assert_eq!(GaussianInt::I.mul(GaussianInt::I), GaussianInt::new(-1, 0));
    }
}
