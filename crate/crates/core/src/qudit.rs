//! Generalized qudit operators and canonical states in arbitrary dimension.

use std::fmt;

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::tensor::{Matrix, State};

/// Qudit dimension `d ≥ 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct QuditDim(usize);

impl QuditDim {
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension(d));
        }
        Ok(Self(d))
    }

    pub fn get(self) -> usize {
        self.0
    }

    pub fn is_even(self) -> bool {
        self.0.is_multiple_of(2)
    }
}

impl TryFrom<usize> for QuditDim {
    type Error = Error;

    fn try_from(d: usize) -> Result<Self> {
        Self::new(d)
    }
}

impl From<QuditDim> for usize {
    fn from(d: QuditDim) -> usize {
        d.0
    }
}

impl fmt::Display for QuditDim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Which square root of ω enters `Y`. The two choices differ by an overall sign of `Y`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RootBranch {
    /// `ω^{1/2} = e^{iπ/d}`
    #[default]
    Principal,
    /// `ω^{1/2} = −e^{iπ/d}`
    Opposite,
}

/// `e^{iπ·k/d}`, reduced mod `2d` before evaluation.
pub fn half_root_power<T: Real>(d: QuditDim, k: i64) -> Complex<T> {
    let two_d = 2 * d.get() as i64;
    let k = k.rem_euclid(two_d);
    Complex::from_polar(T::one(), T::PI() * T::lit(k as f64) / T::from_count(d.get()))
}

/// `ω^k` with `ω = e^{2πi/d}`.
pub fn omega_power<T: Real>(d: QuditDim, k: i64) -> Complex<T> {
    half_root_power(d, 2 * k)
}

/// Shift `X = Σ_n |n+1 mod d⟩⟨n|`.
pub fn shift_x<T: Real>(d: QuditDim) -> Matrix<T> {
    let d = d.get();
    Matrix::from_fn(d, d, |r, c| {
        if r == (c + 1) % d {
            Complex::one()
        } else {
            Complex::zero()
        }
    })
}

/// Clock `Z = diag(1, ω, …, ω^{d−1})`.
pub fn clock_z<T: Real>(d: QuditDim) -> Matrix<T> {
    let phases: Vec<Complex<T>> = (0..d.get()).map(|k| omega_power(d, k as i64)).collect();
    Matrix::diagonal(&phases)
}

/// `Y = ω^{−1/2}(Σ_{n<d−1} |n+1⟩⟨n| − |0⟩⟨d−1|)` with the principal root.
pub fn y_op<T: Real>(d: QuditDim) -> Matrix<T> {
    y_op_with_branch(d, RootBranch::Principal)
}

pub fn y_op_with_branch<T: Real>(d: QuditDim, branch: RootBranch) -> Matrix<T> {
    let mut pref = half_root_power::<T>(d, -1);
    if branch == RootBranch::Opposite {
        pref = -pref;
    }
    let n = d.get();
    Matrix::from_fn(n, n, |r, c| {
        if c == n - 1 && r == 0 {
            -pref
        } else if r == c + 1 {
            pref
        } else {
            Complex::zero()
        }
    })
}

/// `(1/√d) Σ_n |n⟩^{⊗N}`
pub fn ghz_state<T: Real>(d: QuditDim, n_parties: usize) -> Result<State<T>> {
    if n_parties == 0 {
        return Err(Error::InvalidParameter("GHZ state needs at least one party".into()));
    }
    let dims = vec![d.get(); n_parties];
    let total: usize = dims.iter().product();
    let mut amps = vec![Complex::zero(); total];
    // |n n … n⟩ sits at n·(1 + d + d² + …)
    let step: usize = (0..n_parties).map(|k| d.get().pow(k as u32)).sum();
    for n in 0..d.get() {
        amps[n * step] = Complex::one();
    }
    State::normalized(dims, amps)
}

/// Uniform superposition of all single-excitation kets of `n_qubits` qubits.
pub fn w_state<T: Real>(n_qubits: usize) -> Result<State<T>> {
    if n_qubits < 2 {
        return Err(Error::InvalidParameter(format!(
            "W state needs at least 2 qubits, got {n_qubits}"
        )));
    }
    let dims = vec![2; n_qubits];
    let mut amps = vec![Complex::zero(); 1 << n_qubits];
    for k in 0..n_qubits {
        amps[1 << k] = Complex::one();
    }
    State::normalized(dims, amps)
}

/// Uniform superposition `(1/√d) Σ_n |n⟩` of a single qudit.
pub fn uniform_state<T: Real>(d: QuditDim) -> State<T> {
    ghz_state(d, 1).expect("one party")
}
