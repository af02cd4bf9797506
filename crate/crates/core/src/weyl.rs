//! Symbolic generalized-Pauli words with exact phase bookkeeping.

use std::fmt;
use std::ops::Mul;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qudit::{clock_z, half_root_power, shift_x, QuditDim};
use crate::scalar::Real;
use crate::tensor::{kron_all, multi_index, Matrix};

/// `e^{iπ·half_phase/d} · ⊗_i X^{x_i} Z^{z_i}`.
///
/// The phase lives in `Z_{2d}` so that half-integer powers of ω are exact.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WeylWord {
    d: QuditDim,
    half_phase: u32,
    x: Vec<u32>,
    z: Vec<u32>,
}

impl WeylWord {
    pub fn identity(d: QuditDim, n_sites: usize) -> Self {
        Self {
            d,
            half_phase: 0,
            x: vec![0; n_sites],
            z: vec![0; n_sites],
        }
    }

    /// Exponents are reduced mod `d` (phase mod `2d`).
    pub fn new(d: QuditDim, half_phase: i64, x: &[i64], z: &[i64]) -> Result<Self> {
        if x.len() != z.len() {
            return Err(Error::LengthMismatch {
                what: "z exponents",
                expected: x.len(),
                found: z.len(),
            });
        }
        let m = d.get() as i64;
        Ok(Self {
            d,
            half_phase: half_phase.rem_euclid(2 * m) as u32,
            x: x.iter().map(|e| e.rem_euclid(m) as u32).collect(),
            z: z.iter().map(|e| e.rem_euclid(m) as u32).collect(),
        })
    }

    /// `X^{x_i} Z^{z_i}` on one site, identity elsewhere.
    pub fn single_site(d: QuditDim, n_sites: usize, site: usize, x: u32, z: u32) -> Result<Self> {
        if site >= n_sites {
            return Err(Error::SiteOutOfRange { site, n_sites });
        }
        let mut w = Self::identity(d, n_sites);
        w.x[site] = x % d.get() as u32;
        w.z[site] = z % d.get() as u32;
        Ok(w)
    }

    /// `X^k` on every site.
    pub fn uniform_shift(d: QuditDim, n_sites: usize, k: u32) -> Self {
        let mut w = Self::identity(d, n_sites);
        w.x.fill(k % d.get() as u32);
        w
    }

    /// Pure clock word `Z^{z_1} ⊗ … ⊗ Z^{z_N}` with trivial phase.
    pub fn clock(d: QuditDim, z: &[u32]) -> Self {
        let m = d.get() as u32;
        Self {
            d,
            half_phase: 0,
            x: vec![0; z.len()],
            z: z.iter().map(|e| e % m).collect(),
        }
    }

    pub fn dim(&self) -> QuditDim {
        self.d
    }

    pub fn n_sites(&self) -> usize {
        self.x.len()
    }

    pub fn half_phase(&self) -> u32 {
        self.half_phase
    }

    pub fn x_exps(&self) -> &[u32] {
        &self.x
    }

    pub fn z_exps(&self) -> &[u32] {
        &self.z
    }

    pub fn is_identity(&self) -> bool {
        self.half_phase == 0 && self.x.iter().chain(&self.z).all(|&e| e == 0)
    }

    /// The word with its phase dropped; used for phase-insensitive membership.
    pub fn support_key(&self) -> (Vec<u32>, Vec<u32>) {
        (self.x.clone(), self.z.clone())
    }

    pub fn without_phase(&self) -> Self {
        Self {
            half_phase: 0,
            ..self.clone()
        }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.d != other.d {
            return Err(Error::DimensionMismatch {
                expected: self.d.get(),
                found: other.d.get(),
            });
        }
        if self.n_sites() != other.n_sites() {
            return Err(Error::LengthMismatch {
                what: "word sites",
                expected: self.n_sites(),
                found: other.n_sites(),
            });
        }
        Ok(())
    }

    /// Group product. Moving `Z^b` past `X^c` costs `ω^{bc}` per site.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let m = self.d.get() as u64;
        let cross: u64 = self
            .z
            .iter()
            .zip(&other.x)
            .map(|(&b, &c)| (b as u64 * c as u64) % m)
            .sum();
        let hp = (self.half_phase as u64 + other.half_phase as u64 + 2 * cross) % (2 * m);
        Ok(Self {
            d: self.d,
            half_phase: hp as u32,
            x: add_mod(&self.x, &other.x, m as u32),
            z: add_mod(&self.z, &other.z, m as u32),
        })
    }

    pub fn inverse(&self) -> Self {
        // (X^x Z^z)^{-1} = Z^{-z} X^{-x} = ω^{zx} X^{-x} Z^{-z}
        let m = self.d.get() as u64;
        let cross: u64 = self
            .z
            .iter()
            .zip(&self.x)
            .map(|(&z, &x)| (z as u64 * x as u64) % m)
            .sum();
        let hp = (2 * m - self.half_phase as u64 % (2 * m) + 2 * cross) % (2 * m);
        let neg = |v: &[u32]| v.iter().map(|&e| ((m as u32) - e) % m as u32).collect();
        Self {
            d: self.d,
            half_phase: hp as u32,
            x: neg(&self.x),
            z: neg(&self.z),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::identity(self.d, self.n_sites());
        for _ in 0..n {
            acc = acc.try_mul(self).expect("compatible with itself");
        }
        acc
    }

    /// `g·h·g⁻¹`
    pub fn conjugate(&self, h: &Self) -> Result<Self> {
        self.try_mul(h)?.try_mul(&self.inverse())
    }

    /// Symplectic form; words commute iff it vanishes mod d.
    pub fn commutes_with(&self, other: &Self) -> bool {
        let m = self.d.get() as i64;
        let s: i64 = (0..self.n_sites())
            .map(|i| self.z[i] as i64 * other.x[i] as i64 - self.x[i] as i64 * other.z[i] as i64)
            .sum();
        s.rem_euclid(m) == 0
    }

    pub fn phase<T: Real>(&self) -> Complex<T> {
        half_root_power(self.d, self.half_phase as i64)
    }

    /// `X^{x_i} Z^{z_i}` on one site.
    pub fn site_matrix<T: Real>(&self, site: usize) -> Matrix<T> {
        let x = shift_x::<T>(self.d).pow(self.x[site]).expect("square");
        let z = clock_z::<T>(self.d).pow(self.z[site]).expect("square");
        &x * &z
    }

    /// `w|ψ⟩` without forming the matrix: `X^x Z^z |k⟩ = ω^{z·k} |k + x⟩`.
    pub fn apply<T: Real>(&self, amps: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        let m = self.d.get();
        let dims = vec![m; self.n_sites()];
        let total: usize = dims.iter().product();
        if amps.len() != total {
            return Err(Error::DimensionMismatch {
                expected: total,
                found: amps.len(),
            });
        }
        let roots: Vec<Complex<T>> = (0..m).map(|k| half_root_power(self.d, 2 * k as i64)).collect();
        let phase = self.phase::<T>();
        let mut out = vec![Complex::new(T::zero(), T::zero()); total];
        for (k, a) in amps.iter().enumerate() {
            let levels = multi_index(&dims, k);
            let mut e = 0usize;
            let mut target = 0usize;
            for (i, &l) in levels.iter().enumerate() {
                e += self.z[i] as usize * l;
                target = target * m + (l + self.x[i] as usize) % m;
            }
            out[target] = *a * roots[e % m] * phase;
        }
        Ok(out)
    }

    pub fn to_matrix<T: Real>(&self) -> Matrix<T> {
        let factors: Vec<Matrix<T>> = (0..self.n_sites()).map(|i| self.site_matrix(i)).collect();
        kron_all(&factors).scale(self.phase())
    }
}

fn add_mod(a: &[u32], b: &[u32], m: u32) -> Vec<u32> {
    a.iter().zip(b).map(|(&x, &y)| (x + y) % m).collect()
}

impl Mul for &WeylWord {
    type Output = WeylWord;

    fn mul(self, rhs: &WeylWord) -> WeylWord {
        self.try_mul(rhs).expect("incompatible Weyl words")
    }
}

/// Free-function form of [`WeylWord::to_matrix`].
pub fn weyl_to_matrix<T: Real>(w: &WeylWord) -> Matrix<T> {
    w.to_matrix()
}

impl fmt::Display for WeylWord {
    /// `ω^{h/2}·X1Z1^2·X2…`; identity prints as `I`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for i in 0..self.n_sites() {
            for (sym, e) in [("X", self.x[i]), ("Z", self.z[i])] {
                match e {
                    0 => {}
                    1 => parts.push(format!("{sym}{}", i + 1)),
                    e => parts.push(format!("{sym}{}^{e}", i + 1)),
                }
            }
        }
        if self.half_phase != 0 {
            write!(f, "w^({}/2)", self.half_phase)?;
            if !parts.is_empty() {
                write!(f, "·")?;
            }
        }
        if parts.is_empty() && self.half_phase == 0 {
            return write!(f, "I");
        }
        write!(f, "{}", parts.join(""))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dim(d: usize) -> QuditDim {
        QuditDim::new(d).unwrap()
    }

    #[test]
    fn identity_word_is_identity_matrix() {
        let w = WeylWord::identity(dim(3), 2);
        assert!(w.to_matrix::<f64>().max_abs_diff(&Matrix::identity(9)) < 1e-15);
        assert_eq!(w.to_string(), "I");
    }

    #[test]
    fn xz_word_is_product() {
        let d = dim(3);
        let w = WeylWord::new(d, 0, &[1], &[1]).unwrap();
        let xz = &shift_x::<f64>(d) * &clock_z::<f64>(d);
        assert!(w.to_matrix::<f64>().max_abs_diff(&xz) < 1e-15);
    }

    #[test]
    fn reordering_z_past_x_costs_omega() {
        let d = dim(3);
        let z = WeylWord::new(d, 0, &[0], &[1]).unwrap();
        let x = WeylWord::new(d, 0, &[1], &[0]).unwrap();
        let zx = &z * &x;
        assert_eq!(zx.half_phase(), 2);
        assert_eq!(zx.x_exps(), &[1]);
        assert_eq!(zx.z_exps(), &[1]);
    }

    #[test]
    fn inverse_gives_identity() {
        let w = WeylWord::new(dim(5), 3, &[1, 4, 2], &[3, 0, 2]).unwrap();
        assert!((&w * &w.inverse()).is_identity());
        assert!((&w.inverse() * &w).is_identity());
    }

    fn word_strategy(d: usize, n: usize) -> impl Strategy<Value = WeylWord> {
        (
            0..(2 * d as i64),
            prop::collection::vec(0..d as i64, n),
            prop::collection::vec(0..d as i64, n),
        )
            .prop_map(move |(h, x, z)| WeylWord::new(QuditDim::new(d).unwrap(), h, &x, &z).unwrap())
    }

    fn words(n_words: usize) -> impl Strategy<Value = Vec<WeylWord>> {
        (2usize..=5, 1usize..=2).prop_flat_map(move |(d, n)| prop::collection::vec(word_strategy(d, n), n_words))
    }

    proptest! {
        #[test]
        fn to_matrix_is_homomorphism(ws in words(2)) {
            let (a, b) = (&ws[0], &ws[1]);
            let lhs = (a * b).to_matrix::<f64>();
            let rhs = &a.to_matrix::<f64>() * &b.to_matrix::<f64>();
            prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
        }

        #[test]
        fn apply_matches_matrix(ws in words(1), seed in 0u64..1000) {
            let w = &ws[0];
            let n: usize = (0..w.n_sites()).map(|_| w.dim().get()).product();
            let v: Vec<Complex<f64>> = (0..n).map(|k| Complex::new((k as f64 + seed as f64).sin(), (k as f64).cos())).collect();
            let dense = w.to_matrix::<f64>().apply(&v).unwrap();
            let fast = w.apply(&v).unwrap();
            for (a, b) in dense.iter().zip(&fast) {
                prop_assert!((a - b).norm() < 1e-12);
            }
        }

        #[test]
        fn multiplication_is_associative(ws in words(3)) {
            let (a, b, c) = (&ws[0], &ws[1], &ws[2]);
            prop_assert_eq!(&(a * b) * c, a * &(b * c));
        }

        #[test]
        fn commutation_matches_matrices(ws in words(2)) {
            let (a, b) = (&ws[0], &ws[1]);
            let comm = a.to_matrix::<f64>().commutator(&b.to_matrix::<f64>()).unwrap();
            prop_assert_eq!(a.commutes_with(b), comm.frobenius_norm() < 1e-10);
        }
    }
}
