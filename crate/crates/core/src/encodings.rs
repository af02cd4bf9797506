//! Logical encodings, lifting of logical states and operators, and
//! tensor-product resolutions of logical operators on the code subspace.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::io::{amps_from_pairs, amps_to_pairs};
use crate::qudit::{clock_z, omega_power, shift_x, y_op_with_branch, QuditDim, RootBranch};
use crate::tensor::{inner, kron_all, norm_sqr, Expectation};
use crate::weyl::WeylWord;
use crate::{ComplexMatrix, StateVector, C64};

const ORTHO_TOL: f64 = 1e-12;

/// Physical realization of a logical basis: `|i⟩_L ↦ basis_states[i]`.
#[derive(Clone, Debug, PartialEq)]
pub struct LogicalEncoding {
    basis_states: Vec<StateVector>,
    physical_dims: Vec<usize>,
}

impl LogicalEncoding {
    /// Requires mutually orthonormal states over identical physical dims.
    pub fn new(basis_states: Vec<StateVector>) -> Result<Self> {
        let first = basis_states
            .first()
            .ok_or_else(|| invalid("encoding needs at least one basis state"))?;
        let physical_dims = first.dims().to_vec();
        for s in &basis_states {
            if s.dims() != physical_dims.as_slice() {
                return Err(Error::DimensionMismatch {
                    expected: first.total_dim(),
                    found: s.total_dim(),
                });
            }
        }
        for (i, a) in basis_states.iter().enumerate() {
            for (j, b) in basis_states.iter().enumerate() {
                let g = a.inner(b);
                let want = if i == j { C64::one() } else { C64::zero() };
                if (g - want).norm() > ORTHO_TOL {
                    return Err(invalid(format!(
                        "encoding basis states {i} and {j} are not orthonormal (overlap {g})"
                    )));
                }
            }
        }
        Ok(Self {
            basis_states,
            physical_dims,
        })
    }

    pub fn d_logical(&self) -> usize {
        self.basis_states.len()
    }

    pub fn physical_dims(&self) -> &[usize] {
        &self.physical_dims
    }

    pub fn physical_dim(&self) -> usize {
        self.physical_dims.iter().product()
    }

    pub fn basis_states(&self) -> &[StateVector] {
        &self.basis_states
    }

    /// Encoding of a pair of logical systems: `|i j⟩_L ↦ enc_i ⊗ enc'_j`.
    pub fn product(&self, other: &Self) -> Self {
        let basis_states = self
            .basis_states
            .iter()
            .flat_map(|a| other.basis_states.iter().map(move |b| a.tensor(b)))
            .collect();
        let mut physical_dims = self.physical_dims.clone();
        physical_dims.extend_from_slice(&other.physical_dims);
        Self {
            basis_states,
            physical_dims,
        }
    }

    /// `Σ_i c_i |enc_i⟩` for a normalized logical amplitude vector.
    pub fn lift_state(&self, logical: &[C64]) -> Result<StateVector> {
        if logical.len() != self.d_logical() {
            return Err(Error::LengthMismatch {
                what: "logical amplitudes",
                expected: self.d_logical(),
                found: logical.len(),
            });
        }
        let n = norm_sqr(logical);
        if (n - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized(n));
        }
        let mut amps = vec![C64::zero(); self.physical_dim()];
        for (c, s) in logical.iter().zip(&self.basis_states) {
            for (a, b) in amps.iter_mut().zip(s.amplitudes()) {
                *a += c * b;
            }
        }
        StateVector::normalized(self.physical_dims.clone(), amps)
    }

    /// Lift of the uniform logical superposition `(1/√d_L) Σ_i |i⟩_L`.
    pub fn lift_uniform(&self) -> StateVector {
        let c = C64::from(1.0 / (self.d_logical() as f64).sqrt());
        self.lift_state(&vec![c; self.d_logical()])
            .expect("uniform amplitudes are normalized")
    }

    /// `Σ_ij a_ij |enc_i⟩⟨enc_j|`, zero on the complement of the code subspace.
    pub fn lift_operator(&self, a_logical: &ComplexMatrix) -> Result<ComplexMatrix> {
        let d = self.d_logical();
        if a_logical.rows() != d || a_logical.cols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: a_logical.rows(),
            });
        }
        let n = self.physical_dim();
        let mut out = ComplexMatrix::zeros(n, n);
        for i in 0..d {
            for j in 0..d {
                let a = a_logical[(i, j)];
                if a.is_zero() {
                    continue;
                }
                let ket = self.basis_states[i].amplitudes();
                let bra = self.basis_states[j].amplitudes();
                for r in 0..n {
                    if ket[r].is_zero() {
                        continue;
                    }
                    let s = a * ket[r];
                    for c in 0..n {
                        out[(r, c)] += s * bra[c].conj();
                    }
                }
            }
        }
        Ok(out)
    }

    /// Projector onto the code subspace.
    pub fn code_projector(&self) -> ComplexMatrix {
        self.lift_operator(&ComplexMatrix::identity(self.d_logical()))
            .expect("identity has logical size")
    }

    /// `⟨enc_i| op |enc_j⟩` as a `d_L × d_L` matrix.
    pub fn code_matrix_elements(&self, op: &ComplexMatrix) -> Result<ComplexMatrix> {
        let images = self
            .basis_states
            .iter()
            .map(|s| s.apply(op))
            .collect::<Result<Vec<_>>>()?;
        let d = self.d_logical();
        Ok(ComplexMatrix::from_fn(d, d, |i, j| {
            inner(self.basis_states[i].amplitudes(), &images[j])
        }))
    }

    pub fn to_doc(&self) -> EncodingDoc {
        EncodingDoc {
            d_logical: self.d_logical(),
            physical_dims: self.physical_dims.clone(),
            basis_states: self
                .basis_states
                .iter()
                .map(|s| amps_to_pairs(s.amplitudes()))
                .collect(),
        }
    }

    pub fn from_doc(doc: &EncodingDoc) -> Result<Self> {
        if doc.basis_states.len() != doc.d_logical {
            return Err(Error::LengthMismatch {
                what: "basis_states",
                expected: doc.d_logical,
                found: doc.basis_states.len(),
            });
        }
        let states = doc
            .basis_states
            .iter()
            .map(|pairs| StateVector::new(doc.physical_dims.clone(), amps_from_pairs(pairs)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(states)
    }
}

/// JSON form of an encoding.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EncodingDoc {
    pub d_logical: usize,
    pub physical_dims: Vec<usize>,
    pub basis_states: Vec<Vec<[f64; 2]>>,
}

/// `|i⟩_L ↦ |i⟩^{⊗N}`
pub fn repetition_encoding(d: QuditDim, n_copies: usize) -> Result<LogicalEncoding> {
    if n_copies == 0 {
        return Err(invalid("repetition encoding needs at least one copy"));
    }
    let dims = vec![d.get(); n_copies];
    let states = (0..d.get())
        .map(|i| StateVector::basis(&dims, &vec![i; n_copies]))
        .collect::<Result<Vec<_>>>()?;
    LogicalEncoding::new(states)
}

/// Logical qutrit on three qubits: `|0⟩_L = |001⟩, |1⟩_L = |010⟩, |2⟩_L = |100⟩`.
pub fn w_type_encoding() -> LogicalEncoding {
    let dims = [2, 2, 2];
    let states = [[0, 0, 1], [0, 1, 0], [1, 0, 0]]
        .iter()
        .map(|l| StateVector::basis(&dims, l).expect("valid ket"))
        .collect();
    LogicalEncoding::new(states).expect("distinct kets are orthonormal")
}

/// Single logical basis state `|0⟩_L = (|01⟩ − |10⟩)/√2`. Combine copies
/// with [`LogicalEncoding::product`].
pub fn singlet_encoding() -> LogicalEncoding {
    let r = C64::from(std::f64::consts::FRAC_1_SQRT_2);
    let s = StateVector::new(vec![2, 2], vec![C64::zero(), r, -r, C64::zero()]).expect("normalized");
    LogicalEncoding::new(vec![s]).expect("single state")
}

/// Shift `X_L` on a `d`-level logical system.
pub fn logical_shift(d: QuditDim) -> ComplexMatrix {
    shift_x(d)
}

/// One tensor-product term `prefactor · ⊗_α site_ops[α]` with its mixture weight.
#[derive(Clone, Debug)]
pub struct ResolutionTerm {
    pub weight: f64,
    pub prefactor: C64,
    pub site_ops: Vec<ComplexMatrix>,
    pub label: String,
}

impl ResolutionTerm {
    pub fn tensor(&self) -> ComplexMatrix {
        kron_all(&self.site_ops).scale(self.prefactor)
    }
}

/// Weighted family of tensor-product terms that agree with a logical operator
/// on the code subspace.
#[derive(Clone, Debug)]
pub struct OperatorResolution {
    d: QuditDim,
    terms: Vec<ResolutionTerm>,
}

impl OperatorResolution {
    /// Weights must lie in `[0, 1]` and sum to one.
    pub fn new(d: QuditDim, terms: Vec<ResolutionTerm>) -> Result<Self> {
        let r = Self { d, terms };
        r.check_weights()?;
        Ok(r)
    }

    fn check_weights(&self) -> Result<()> {
        if self.terms.is_empty() {
            return Err(invalid("resolution has no terms"));
        }
        if let Some(t) = self.terms.iter().find(|t| !(0.0..=1.0).contains(&t.weight)) {
            return Err(invalid(format!("weight {} outside [0, 1]", t.weight)));
        }
        let total: f64 = self.terms.iter().map(|t| t.weight).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(invalid(format!("weights sum to {total}, not 1")));
        }
        Ok(())
    }

    fn uniform(d: QuditDim, mut terms: Vec<ResolutionTerm>) -> Self {
        let w = 1.0 / terms.len() as f64;
        for t in &mut terms {
            t.weight = w;
        }
        Self { d, terms }
    }

    pub fn dim(&self) -> QuditDim {
        self.d
    }

    pub fn terms(&self) -> &[ResolutionTerm] {
        &self.terms
    }

    pub fn weights(&self) -> Vec<f64> {
        self.terms.iter().map(|t| t.weight).collect()
    }

    /// Same terms, new weights.
    pub fn with_weights(&self, weights: &[f64]) -> Result<Self> {
        if weights.len() != self.terms.len() {
            return Err(Error::LengthMismatch {
                what: "weights",
                expected: self.terms.len(),
                found: weights.len(),
            });
        }
        let terms = self
            .terms
            .iter()
            .zip(weights)
            .map(|(t, &w)| ResolutionTerm {
                weight: w,
                ..t.clone()
            })
            .collect();
        Self::new(self.d, terms)
    }

    /// `Σ_k w_k T_k`
    pub fn operator(&self) -> ComplexMatrix {
        let mut it = self.terms.iter();
        let first = it.next().expect("non-empty");
        it.fold(first.tensor().scale(C64::from(first.weight)), |acc, t| {
            &acc + &t.tensor().scale(C64::from(t.weight))
        })
    }

    /// Largest deviation, over all terms and all nonzero logical entries, between
    /// `⟨enc_i| T_k |enc_j⟩` and `(A_L)_ij`.
    pub fn max_code_deviation(&self, enc: &LogicalEncoding, a_logical: &ComplexMatrix) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for t in &self.terms {
            let m = enc.code_matrix_elements(&t.tensor())?;
            for i in 0..enc.d_logical() {
                for j in 0..enc.d_logical() {
                    let a = a_logical[(i, j)];
                    if a.norm() > 0.0 {
                        worst = worst.max((m[(i, j)] - a).norm());
                    }
                }
            }
        }
        Ok(worst)
    }
}

/// All single-term resolutions `⊗_α X Z^{k_α}` of `X_L` for the `n_sites`-fold
/// repetition encoding, one per `k` with `Σ_α k_α ≡ 0 (mod d)`, in lexicographic
/// order of `k`. Weights are uniform.
pub fn resolve_shift(d: QuditDim, n_sites: usize) -> Result<OperatorResolution> {
    let words = shift_resolution_words(d, n_sites)?;
    let terms = words
        .iter()
        .map(|w| ResolutionTerm {
            weight: 0.0,
            prefactor: w.phase(),
            site_ops: (0..n_sites).map(|i| w.site_matrix(i)).collect(),
            label: w.to_string(),
        })
        .collect();
    Ok(OperatorResolution::uniform(d, terms))
}

/// Symbolic form of [`resolve_shift`].
pub fn shift_resolution_words(d: QuditDim, n_sites: usize) -> Result<Vec<WeylWord>> {
    if n_sites == 0 {
        return Err(invalid("resolution needs at least one site"));
    }
    let m = d.get();
    let mut words = Vec::new();
    let count = m.pow(n_sites as u32 - 1);
    for idx in 0..count {
        // free exponents k_1..k_{N-1}; the last one closes the sum
        let mut ks = crate::tensor::multi_index(&vec![m; n_sites - 1], idx);
        let s: usize = ks.iter().sum();
        ks.push((m - s % m) % m);
        let x = vec![1i64; n_sites];
        let z: Vec<i64> = ks.iter().map(|&k| k as i64).collect();
        words.push(WeylWord::new(d, 0, &x, &z)?);
    }
    Ok(words)
}

/// Which product stands in the fourth slot of the tripartite X/Y family.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FourthTerm {
    /// `ω Y₁Y₂X₃`, consistent with the GHZ eigenvalue relations.
    #[default]
    Yyx,
    /// `ω Y₁Y₂Y₃`, the alternative reading.
    Yyy,
}

/// Site pattern of one tripartite X/Y product.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum XyPattern {
    Xxx,
    Xyy,
    Yxy,
    Yyx,
    Yyy,
}

impl XyPattern {
    pub fn family(fourth: FourthTerm) -> [XyPattern; 4] {
        let last = match fourth {
            FourthTerm::Yyx => XyPattern::Yyx,
            FourthTerm::Yyy => XyPattern::Yyy,
        };
        [XyPattern::Xxx, XyPattern::Xyy, XyPattern::Yxy, last]
    }

    /// `true` for each site carrying `Y`.
    pub fn y_sites(self) -> [bool; 3] {
        match self {
            XyPattern::Xxx => [false, false, false],
            XyPattern::Xyy => [false, true, true],
            XyPattern::Yxy => [true, false, true],
            XyPattern::Yyx => [true, true, false],
            XyPattern::Yyy => [true, true, true],
        }
    }

    /// Exponent of ω in the scalar prefactor.
    pub fn omega_exponent(self) -> i64 {
        match self {
            XyPattern::Xxx => 0,
            _ => 1,
        }
    }

    pub fn label(self, power: u32) -> String {
        let body: String = self
            .y_sites()
            .iter()
            .enumerate()
            .map(|(i, &y)| format!("{}{}", if y { "Y" } else { "X" }, i + 1))
            .collect();
        let body = if self.omega_exponent() == 0 {
            body
        } else {
            format!("w{body}")
        };
        if power == 1 {
            body
        } else {
            format!("({body})^{power}")
        }
    }

    /// `(ω^e A₁B₂C₃)^power` as site factors and prefactor.
    pub fn term(self, d: QuditDim, power: u32, branch: RootBranch) -> (C64, Vec<ComplexMatrix>) {
        let x = shift_x::<f64>(d).pow(power).expect("square");
        let y = y_op_with_branch::<f64>(d, branch).pow(power).expect("square");
        let ops = self
            .y_sites()
            .iter()
            .map(|&is_y| if is_y { y.clone() } else { x.clone() })
            .collect();
        (omega_power(d, self.omega_exponent() * power as i64), ops)
    }

    pub fn matrix(self, d: QuditDim, power: u32, branch: RootBranch) -> ComplexMatrix {
        let (pref, ops) = self.term(d, power, branch);
        kron_all(&ops).scale(pref)
    }
}

/// `{X₁X₂X₃, ωX₁Y₂Y₃, ωY₁X₂Y₃, ωY₁Y₂X₃}` raised to `power`, uniform weights.
pub fn resolve_shift_xy(
    d: QuditDim,
    power: u32,
    fourth: FourthTerm,
    branch: RootBranch,
) -> Result<OperatorResolution> {
    if power == 0 {
        return Err(invalid("power must be positive"));
    }
    let terms = XyPattern::family(fourth)
        .iter()
        .map(|p| {
            let (prefactor, site_ops) = p.term(d, power, branch);
            ResolutionTerm {
                weight: 0.0,
                prefactor,
                site_ops,
                label: p.label(power),
            }
        })
        .collect();
    Ok(OperatorResolution::uniform(d, terms))
}

/// Bloch-sphere parametrization of an SU(2) rotation by polar angle `theta`
/// about an equatorial axis at azimuth `phi`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Su2Rotation {
    pub theta: f64,
    pub phi: f64,
}

impl Su2Rotation {
    pub const IDENTITY: Self = Self { theta: 0.0, phi: 0.0 };

    /// Columns give the rotated basis in terms of the original one.
    pub fn matrix(self) -> [[C64; 2]; 2] {
        let (c, s) = ((self.theta / 2.0).cos(), (self.theta / 2.0).sin());
        let e = C64::from_polar(1.0, self.phi);
        [[C64::from(c), -e.conj() * s], [e * s, C64::from(c)]]
    }
}

/// Two completions of `lift(A_L)` that agree on the code subspace but differ on
/// its complement: `O₁` adds `λ_k|u_k⟩⟨u_k|` for two orthonormal complement
/// vectors `u_k`, `O₂` adds `μ_k|u'_k⟩⟨u'_k|` for the rotated pair `u'_k`.
pub fn build_noncommuting_extensions(
    enc: &LogicalEncoding,
    a_logical: &ComplexMatrix,
    lambdas: [f64; 2],
    mus: [f64; 2],
    rotation: Su2Rotation,
) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let complement = complement_basis(enc, 2)?;
    let base = enc.lift_operator(a_logical)?;
    let u = rotation.matrix();
    let rotated: Vec<Vec<C64>> = (0..2)
        .map(|k| {
            complement[0]
                .iter()
                .zip(&complement[1])
                .map(|(a, b)| u[0][k] * a + u[1][k] * b)
                .collect()
        })
        .collect();
    let with_projectors = |vectors: &[Vec<C64>], weights: [f64; 2]| {
        vectors.iter().zip(weights).fold(base.clone(), |acc, (v, w)| {
            &acc + &ComplexMatrix::outer(v, v).scale(C64::from(w))
        })
    };
    Ok((
        with_projectors(&complement, lambdas),
        with_projectors(&rotated, mus),
    ))
}

/// First `count` orthonormal vectors orthogonal to the code subspace, from
/// Gram–Schmidt over computational kets.
pub fn complement_basis(enc: &LogicalEncoding, count: usize) -> Result<Vec<Vec<C64>>> {
    let n = enc.physical_dim();
    let available = n - enc.d_logical();
    if available < count {
        return Err(Error::ComplementTooSmall {
            available,
            required: count,
        });
    }
    let mut span: Vec<Vec<C64>> = enc
        .basis_states()
        .iter()
        .map(|s| s.amplitudes().to_vec())
        .collect();
    let mut found = Vec::new();
    for k in 0..n {
        if found.len() == count {
            break;
        }
        let mut v = vec![C64::zero(); n];
        v[k] = C64::one();
        // two passes of modified Gram–Schmidt
        for _ in 0..2 {
            for b in &span {
                let p = inner(b, &v);
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= p * bi;
                }
            }
        }
        let nrm = norm_sqr(&v).sqrt();
        if nrm > 1e-8 {
            v.iter_mut().for_each(|z| *z /= nrm);
            span.push(v.clone());
            found.push(v);
        }
    }
    Ok(found)
}

/// Phase-aligned logical amplitudes `(1/√d) Σ_i |i⟩`.
pub fn uniform_logical(d: usize) -> Vec<C64> {
    vec![C64::from(1.0 / (d as f64).sqrt()); d]
}

/// Logical expectation `⟨ψ_L|A_L|ψ_L⟩` through the physical lift.
pub fn lifted_expectation(enc: &LogicalEncoding, logical: &[C64], a_logical: &ComplexMatrix) -> Result<C64> {
    let s = enc.lift_state(logical)?;
    s.expect(&enc.lift_operator(a_logical)?)
}

/// `Z^k` on one qudit, exposed for callers that assemble resolutions by hand.
pub fn clock_power(d: QuditDim, k: u32) -> ComplexMatrix {
    clock_z::<f64>(d).pow(k).expect("square")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qudit::{ghz_state, w_state};
    use crate::tensor::DensityMatrix;
    use proptest::prelude::*;

    fn dim(d: usize) -> QuditDim {
        QuditDim::new(d).unwrap()
    }

    fn close(a: &StateVector, b: &StateVector) -> bool {
        (a.fidelity(b) - 1.0).abs() < 1e-12 && (a.inner(b) - C64::one()).norm() < 1e-12
    }

    #[test]
    fn repetition_lifts() {
        let e = repetition_encoding(dim(3), 2).unwrap();
        let phi = e.lift_uniform();
        let r = 1.0 / 3f64.sqrt();
        for i in 0..3 {
            assert!((phi.amplitudes()[4 * i].re - r).abs() < 1e-15);
        }
        let e3 = repetition_encoding(dim(3), 3).unwrap();
        assert!(close(&e3.lift_uniform(), &ghz_state(dim(3), 3).unwrap()));
        let e1 = repetition_encoding(dim(2), 1).unwrap();
        assert_eq!(e1.code_projector(), ComplexMatrix::identity(2));
        assert!(repetition_encoding(dim(2), 0).is_err());
    }

    #[test]
    fn basis_amplitude_lifts_to_basis_state() {
        let e = repetition_encoding(dim(4), 3).unwrap();
        let mut amps = vec![C64::zero(); 4];
        amps[0] = C64::one();
        assert_eq!(e.lift_state(&amps).unwrap(), e.basis_states()[0]);
        assert!(matches!(
            e.lift_state(&[C64::one(), C64::one(), C64::zero(), C64::zero()]),
            Err(Error::NotNormalized(_))
        ));
        assert!(e.lift_state(&[C64::one()]).is_err());
    }

    #[test]
    fn w_type_lifts_to_w_state() {
        let e = w_type_encoding();
        assert_eq!(e.d_logical(), 3);
        assert!(close(&e.lift_uniform(), &w_state(3).unwrap()));
    }

    #[test]
    fn w_type_basis_is_locally_nonorthogonal() {
        let e = w_type_encoding();
        let r0 = e.basis_states()[0].to_density().partial_trace(&[0]).unwrap();
        let r1 = e.basis_states()[1].to_density().partial_trace(&[0]).unwrap();
        // both reduced states are |0⟩⟨0| on the first qubit
        let overlap = r0.expect(r1.matrix()).unwrap().re;
        assert!(overlap > 0.5);
    }

    #[test]
    fn singlet_pair_lift() {
        let s = singlet_encoding();
        let pair = s.product(&s);
        let lifted = pair.lift_state(&[C64::one()]).unwrap();
        let expect = s.basis_states()[0].tensor(&s.basis_states()[0]);
        assert!(close(&lifted, &expect));
        assert_eq!(pair.physical_dims(), &[2, 2, 2, 2]);
    }

    #[test]
    fn lift_operator_matrix_element() {
        let d = dim(3);
        let e = repetition_encoding(d, 2).unwrap();
        let xl = e.lift_operator(&logical_shift(d)).unwrap();
        // ⟨11|·|00⟩
        assert_eq!(xl[(4, 0)], C64::one());
        let v = e.lift_uniform().expect(&xl).unwrap();
        assert!((v - C64::one()).norm() < 1e-12);
    }

    #[test]
    fn lift_of_identity_is_code_projector() {
        let e = repetition_encoding(dim(3), 2).unwrap();
        let p = e.code_projector();
        assert!((&p * &p).max_abs_diff(&p) < 1e-15);
        assert!((p.trace().re - 3.0).abs() < 1e-15);
    }

    #[test]
    fn two_qutrit_resolutions_match_listing() {
        let d = dim(3);
        let words = shift_resolution_words(d, 2).unwrap();
        let labels: Vec<String> = words.iter().map(|w| w.to_string()).collect();
        assert_eq!(labels, vec!["X1X2", "X1Z1X2Z2^2", "X1Z1^2X2Z2"]);
        let r = resolve_shift(d, 2).unwrap();
        let enc = repetition_encoding(d, 2).unwrap();
        assert!(r.max_code_deviation(&enc, &logical_shift(d)).unwrap() < 1e-10);
    }

    #[test]
    fn three_qutrit_family_contains_pair() {
        let labels: Vec<String> = shift_resolution_words(dim(3), 3)
            .unwrap()
            .iter()
            .map(|w| w.to_string())
            .collect();
        assert!(labels.contains(&"X1X2X3".to_string()));
        assert!(labels.contains(&"X1Z1X2Z2X3Z3".to_string()));
        assert_eq!(labels.len(), 9);
    }

    #[test]
    fn every_shift_term_maps_code_basis_forward() {
        for d in 2..=5 {
            for n in 1..=3 {
                let dd = dim(d);
                let enc = repetition_encoding(dd, n).unwrap();
                let res = resolve_shift(dd, n).unwrap();
                assert_eq!(res.terms().len(), d.pow(n as u32 - 1));
                for t in res.terms() {
                    let m = enc.code_matrix_elements(&t.tensor()).unwrap();
                    for i in 0..d {
                        assert!((m[((i + 1) % d, i)] - C64::one()).norm() < 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn xy_family_agrees_with_shift_on_code() {
        let d = dim(4);
        let enc = repetition_encoding(d, 3).unwrap();
        let g = ghz_state::<f64>(d, 3).unwrap();
        for power in 1..=3 {
            let res = resolve_shift_xy(d, power, FourthTerm::Yyx, RootBranch::Principal).unwrap();
            let target = logical_shift(d).pow(power).unwrap();
            assert!(res.max_code_deviation(&enc, &target).unwrap() < 1e-10);
            for t in res.terms() {
                let out = g.apply(&t.tensor()).unwrap();
                let diff: f64 = out.iter().zip(g.amplitudes()).map(|(a, b)| (a - b).norm_sqr()).sum();
                assert!(diff.sqrt() < 1e-12, "{} does not stabilize GHZ", t.label);
            }
        }
    }

    #[test]
    fn yyy_variant_does_not_stabilize() {
        let d = dim(4);
        let g = ghz_state::<f64>(d, 3).unwrap();
        let v = g.expect(&XyPattern::Yyy.matrix(d, 1, RootBranch::Principal)).unwrap();
        assert!((v - C64::one()).norm() > 0.1);
    }

    #[test]
    fn weights_are_validated() {
        let r = resolve_shift(dim(3), 2).unwrap();
        assert!(r.with_weights(&[0.5, 0.5, 0.0]).is_ok());
        assert!(r.with_weights(&[0.5, 0.6, -0.1]).is_err());
        assert!(r.with_weights(&[0.5, 0.4, 0.0]).is_err());
        assert!(r.with_weights(&[1.0]).is_err());
    }

    #[test]
    fn extensions_agree_on_code_and_do_not_commute() {
        let d = dim(3);
        let enc = repetition_encoding(d, 2).unwrap();
        let rot = Su2Rotation {
            theta: std::f64::consts::FRAC_PI_2,
            phi: 0.0,
        };
        let (o1, o2) =
            build_noncommuting_extensions(&enc, &logical_shift(d), [1.0, 2.0], [3.0, 4.0], rot).unwrap();
        let psi = enc.lift_uniform();
        let diff: Vec<C64> = psi
            .apply(&o1)
            .unwrap()
            .iter()
            .zip(psi.apply(&o2).unwrap())
            .map(|(a, b)| a - b)
            .collect();
        assert!(norm_sqr(&diff).sqrt() < 1e-12);
        assert!(o1.commutator(&o2).unwrap().frobenius_norm() > 0.1);
    }

    #[test]
    fn degenerate_extension_parameters_coincide() {
        let d = dim(2);
        let enc = repetition_encoding(d, 2).unwrap();
        let (o1, o2) = build_noncommuting_extensions(
            &enc,
            &logical_shift(d),
            [1.0, 2.0],
            [1.0, 2.0],
            Su2Rotation::IDENTITY,
        )
        .unwrap();
        assert!(o1.max_abs_diff(&o2) < 1e-15);
    }

    #[test]
    fn extension_needs_room() {
        let enc = repetition_encoding(dim(3), 1).unwrap();
        let r = build_noncommuting_extensions(
            &enc,
            &logical_shift(dim(3)),
            [1.0, 2.0],
            [3.0, 4.0],
            Su2Rotation::IDENTITY,
        );
        assert!(matches!(r, Err(Error::ComplementTooSmall { available: 0, required: 2 })));
    }

    #[test]
    fn encoding_json_round_trip() {
        let e = w_type_encoding();
        let json = serde_json::to_string(&e.to_doc()).unwrap();
        let back: EncodingDoc = serde_json::from_str(&json).unwrap();
        assert_eq!(LogicalEncoding::from_doc(&back).unwrap(), e);
    }

    #[test]
    fn non_orthogonal_basis_rejected() {
        let a = StateVector::basis(&[2], &[0]).unwrap();
        let b = StateVector::normalized(vec![2], vec![C64::one(), C64::one()]).unwrap();
        assert!(LogicalEncoding::new(vec![a, b]).is_err());
    }

    #[test]
    fn mixed_state_of_code_space() {
        let e = repetition_encoding(dim(2), 2).unwrap();
        let rho = DensityMatrix::mixture(&[(0.5, e.basis_states()[0].clone()), (0.5, e.basis_states()[1].clone())])
            .unwrap();
        let xl = e.lift_operator(&logical_shift(dim(2))).unwrap();
        assert!(rho.expect(&xl).unwrap().norm() < 1e-15);
    }

    fn logical_state(d: usize) -> impl Strategy<Value = Vec<C64>> {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), d).prop_filter_map("nonzero", |v| {
            let amps: Vec<C64> = v.into_iter().map(|(a, b)| C64::new(a, b)).collect();
            let n = norm_sqr(&amps).sqrt();
            (n > 1e-3).then(|| amps.into_iter().map(|z| z / n).collect())
        })
    }

    proptest! {
        #[test]
        fn reciprocity_identity(
            (d, n, amps, ops) in (2usize..=4, 1usize..=3).prop_flat_map(|(d, n)| {
                (Just(d), Just(n), logical_state(d), prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), d * d))
            })
        ) {
            let dd = dim(d);
            let enc = repetition_encoding(dd, n).unwrap();
            let a = ComplexMatrix::from_row_major(d, d, ops.into_iter().map(|(r, i)| C64::new(r, i)).collect()).unwrap();
            let physical = lifted_expectation(&enc, &amps, &a).unwrap();
            let logical = crate::tensor::State::new(vec![d], amps.clone()).unwrap().expect(&a).unwrap();
            prop_assert!((physical - logical).norm() < 1e-10);
        }

        #[test]
        fn convex_mixture_of_resolutions_keeps_expectation(raw in prop::collection::vec(0.0f64..1.0, 3)) {
            let total: f64 = raw.iter().sum();
            prop_assume!(total > 1e-6);
            let w: Vec<f64> = raw.iter().map(|x| x / total).collect();
            let d = dim(3);
            let enc = repetition_encoding(d, 2).unwrap();
            let r = resolve_shift(d, 2).unwrap().with_weights(&w).unwrap();
            let v = enc.lift_uniform().expect(&r.operator()).unwrap();
            prop_assert!((v - C64::one()).norm() < 1e-10);
        }
    }
}
