//! Truncated-Fock computations for the two-mode squeezed vacuum: quadratures,
//! the Duan–Simon sum, and the same sum seen through the projection onto the
//! diagonal kets `|nn⟩ ≡ |n⟩_L`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::tensor::{embed_local, flat_index, inner, LocalSum};
use crate::{ComplexMatrix, StateVector, C64};

/// Tail weight above which truncation is reported.
pub const TRUNCATION_WARN: f64 = 1e-12;
/// Separable states satisfy `V(O⁻) + V(O⁺) ≥ 2`.
pub const DUAN_SIMON_BOUND: f64 = 2.0;

/// Fock space `{|0⟩, …, |n_max⟩}` per mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct FockCutoff(usize);

impl FockCutoff {
    pub fn new(n_max: usize) -> Result<Self> {
        if n_max < 2 {
            return Err(invalid(format!("Fock cutoff must be at least 2, got {n_max}")));
        }
        Ok(Self(n_max))
    }

    pub fn n_max(self) -> usize {
        self.0
    }

    /// Single-mode dimension `n_max + 1`.
    pub fn levels(self) -> usize {
        self.0 + 1
    }
}

impl Default for FockCutoff {
    fn default() -> Self {
        Self(60)
    }
}

impl TryFrom<usize> for FockCutoff {
    type Error = crate::Error;
    fn try_from(n: usize) -> Result<Self> {
        Self::new(n)
    }
}

impl From<FockCutoff> for usize {
    fn from(c: FockCutoff) -> usize {
        c.0
    }
}

/// Squeezing strength `g ≥ 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct SqueezingParameter(f64);

impl SqueezingParameter {
    pub fn new(g: f64) -> Result<Self> {
        if !(g.is_finite() && g >= 0.0) {
            return Err(invalid(format!("squeezing parameter must be finite and non-negative, got {g}")));
        }
        Ok(Self(g))
    }

    pub fn get(self) -> f64 {
        self.0
    }

    pub fn lambda(self) -> f64 {
        self.0.tanh()
    }
}

impl TryFrom<f64> for SqueezingParameter {
    type Error = crate::Error;
    fn try_from(g: f64) -> Result<Self> {
        Self::new(g)
    }
}

impl From<SqueezingParameter> for f64 {
    fn from(g: SqueezingParameter) -> f64 {
        g.0
    }
}

/// `a|n⟩ = √n |n−1⟩` on the truncated mode.
pub fn annihilation(cutoff: FockCutoff) -> ComplexMatrix {
    let n = cutoff.levels();
    ComplexMatrix::from_fn(n, n, |r, c| {
        if c == r + 1 {
            C64::from((c as f64).sqrt())
        } else {
            C64::zero()
        }
    })
}

/// `a†a`
pub fn number_operator(cutoff: FockCutoff) -> ComplexMatrix {
    let diag: Vec<C64> = (0..cutoff.levels()).map(|k| C64::from(k as f64)).collect();
    ComplexMatrix::diagonal(&diag)
}

/// `X^θ = (a e^{iθ} + a† e^{−iθ})/√2`
pub fn quadrature(theta: f64, cutoff: FockCutoff) -> ComplexMatrix {
    let a = annihilation(cutoff);
    let e = C64::from_polar(FRAC_1_SQRT_2, theta);
    &a.scale(e) + &a.adjoint().scale(e.conj())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// `O^±(θ₁,θ₂) = X₁^{θ₁} ± X₂^{θ₂}` applied mode by mode.
pub fn pm_local(theta1: f64, theta2: f64, sign: Sign, cutoff: FockCutoff) -> LocalSum<f64> {
    let dims = [cutoff.levels(); 2];
    LocalSum::new(&dims)
        .with_term(C64::from(1.0), 0, quadrature(theta1, cutoff))
        .and_then(|s| s.with_term(C64::from(sign.value()), 1, quadrature(theta2, cutoff)))
        .expect("quadratures match the mode dimension")
}

/// Dense `O^±(θ₁,θ₂)` on the two-mode space, `(n_max+1)²` square.
pub fn pm_operator(theta1: f64, theta2: f64, sign: Sign, cutoff: FockCutoff) -> Result<ComplexMatrix> {
    let dims = [cutoff.levels(); 2];
    let x1 = embed_local(&quadrature(theta1, cutoff), 0, &dims)?;
    let x2 = embed_local(&quadrature(theta2, cutoff), 1, &dims)?;
    Ok(&x1 + &x2.scale(C64::from(sign.value())))
}

/// `cosh 2g ± sinh 2g cos(θ₁+θ₂)`
pub fn analytic_pm_variance(g: SqueezingParameter, theta1: f64, theta2: f64, sign: Sign) -> f64 {
    let g2 = 2.0 * g.get();
    g2.cosh() + sign.value() * g2.sinh() * (theta1 + theta2).cos()
}

/// State together with the weight its truncation dropped.
#[derive(Clone, Debug)]
pub struct Truncated {
    pub state: StateVector,
    pub discarded_weight: f64,
}

fn geometric_amplitudes(g: SqueezingParameter, cutoff: FockCutoff) -> (Vec<f64>, f64) {
    let lambda = g.lambda();
    let amps: Vec<f64> = (0..cutoff.levels())
        .map(|n| (1.0 - lambda * lambda).sqrt() * lambda.powi(n as i32))
        .collect();
    let discarded = lambda.powi(2 * cutoff.levels() as i32);
    if discarded > TRUNCATION_WARN {
        log::warn!(
            "Fock cutoff {} drops weight {discarded:.3e} at g = {}",
            cutoff.n_max(),
            g.get()
        );
    }
    (amps, discarded)
}

/// `√(1−λ²) Σ_n λⁿ |nn⟩`, `λ = tanh g`, renormalized after truncation.
pub fn tms_state(g: SqueezingParameter, cutoff: FockCutoff) -> Result<Truncated> {
    let (diag, discarded_weight) = geometric_amplitudes(g, cutoff);
    let dims = vec![cutoff.levels(); 2];
    let mut amps = vec![C64::zero(); cutoff.levels() * cutoff.levels()];
    for (n, c) in diag.iter().enumerate() {
        amps[flat_index(&dims, &[n, n])?] = C64::from(*c);
    }
    Ok(Truncated {
        state: StateVector::normalized(dims, amps)?,
        discarded_weight,
    })
}

/// `(1/cosh r) Σ_n (tanh r)ⁿ |n⟩_L` on a single logical mode, renormalized.
pub fn logical_cv_state(r: SqueezingParameter, cutoff: FockCutoff) -> Result<Truncated> {
    let (diag, discarded_weight) = geometric_amplitudes(r, cutoff);
    Ok(Truncated {
        state: StateVector::normalized(vec![cutoff.levels()], diag.into_iter().map(C64::from).collect())?,
        discarded_weight,
    })
}

/// `⟨a₁†a₁ + a₂†a₂⟩`
pub fn mean_photon(state: &StateVector, cutoff: FockCutoff) -> Result<f64> {
    let n = number_operator(cutoff);
    let total = LocalSum::new(&[cutoff.levels(); 2])
        .with_term(C64::from(1.0), 0, n.clone())?
        .with_term(C64::from(1.0), 1, n)?;
    Ok(total.expectation(state)?.re)
}

/// Variance of `O^±(θ₁,θ₂)` on a two-mode state.
pub fn pm_variance(state: &StateVector, theta1: f64, theta2: f64, sign: Sign, cutoff: FockCutoff) -> Result<f64> {
    pm_local(theta1, theta2, sign, cutoff).variance(state)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DuanSimon {
    pub sum: f64,
    pub separable_bound: f64,
    pub analytic: f64,
}

/// `V(O⁻(0,0)) + V(O⁺(π/2,π/2))` on the squeezed vacuum, with `2e^{−2g}`.
pub fn duan_simon_sum(g: SqueezingParameter, cutoff: FockCutoff) -> Result<DuanSimon> {
    let s = tms_state(g, cutoff)?.state;
    let sum = pm_variance(&s, 0.0, 0.0, Sign::Minus, cutoff)? + pm_variance(&s, FRAC_PI_2, FRAC_PI_2, Sign::Plus, cutoff)?;
    Ok(DuanSimon {
        sum,
        separable_bound: DUAN_SIMON_BOUND,
        analytic: 2.0 * (-2.0 * g.get()).exp(),
    })
}

/// Flat indices of the diagonal kets `|nn⟩`.
pub fn diagonal_indices(cutoff: FockCutoff) -> Vec<usize> {
    let l = cutoff.levels();
    (0..l).map(|n| n * l + n).collect()
}

/// `Π = Σ_n |nn⟩⟨nn|` as a dense two-mode matrix.
pub fn diagonal_projector(cutoff: FockCutoff) -> ComplexMatrix {
    let total = cutoff.levels() * cutoff.levels();
    let mut diag = vec![C64::zero(); total];
    for i in diagonal_indices(cutoff) {
        diag[i] = C64::from(1.0);
    }
    ComplexMatrix::diagonal(&diag)
}

/// `ΠO_pΠ` restricted to the diagonal kets, i.e. written in the logical basis
/// `|n⟩_L ≡ |nn⟩`. Each block is `(n_max+1)` square.
#[derive(Clone, Debug)]
pub struct ProjectedOps {
    /// `Π(X₁^φ + X₂^φ)Π`
    pub first_plus: ComplexMatrix,
    /// `Π(X₁^φ − X₂^φ)Π`
    pub first_minus: ComplexMatrix,
    /// `Π(X₁^φ + X₂^φ)²Π`
    pub second_plus: ComplexMatrix,
    /// `Π(X₁^φ − X₂^φ)²Π`
    pub second_minus: ComplexMatrix,
}

/// Matrix elements `⟨mm|O|nn⟩` and `⟨mm|O²|nn⟩ = ⟨O mm|O nn⟩` for Hermitian `O`.
fn project(op: &LocalSum<f64>, cutoff: FockCutoff) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let idx = diagonal_indices(cutoff);
    let total = cutoff.levels() * cutoff.levels();
    let images: Vec<Vec<C64>> = idx
        .iter()
        .map(|&i| {
            let mut e = vec![C64::zero(); total];
            e[i] = C64::from(1.0);
            op.apply(&e)
        })
        .collect::<Result<_>>()?;
    let l = idx.len();
    let first = ComplexMatrix::from_fn(l, l, |m, n| images[n][idx[m]]);
    let second = ComplexMatrix::from_fn(l, l, |m, n| inner(&images[m], &images[n]));
    Ok((first, second))
}

/// Projected first and second moments of `X₁^φ ± X₂^φ` (same angle on both modes).
pub fn projected_ops(phi: f64, cutoff: FockCutoff) -> Result<ProjectedOps> {
    let (first_plus, second_plus) = project(&pm_local(phi, phi, Sign::Plus, cutoff), cutoff)?;
    let (first_minus, second_minus) = project(&pm_local(phi, phi, Sign::Minus, cutoff), cutoff)?;
    Ok(ProjectedOps {
        first_plus,
        first_minus,
        second_plus,
        second_minus,
    })
}

fn logical_variance(first: &ComplexMatrix, second: &ComplexMatrix, s: &StateVector) -> Result<f64> {
    let m1 = inner(s.amplitudes(), &first.apply(s.amplitudes())?).re;
    let m2 = inner(s.amplitudes(), &second.apply(s.amplitudes())?).re;
    Ok(m2 - m1 * m1)
}

/// `⟨O_p^{2−}(0)⟩ − ⟨O_p^{1−}(0)⟩² + ⟨O_p^{2+}(π/2)⟩ − ⟨O_p^{1+}(π/2)⟩²`
/// on the logical image of the squeezed vacuum.
pub fn logical_coherence_sum(r: SqueezingParameter, cutoff: FockCutoff) -> Result<f64> {
    let s = logical_cv_state(r, cutoff)?.state;
    let at0 = projected_ops(0.0, cutoff)?;
    let at90 = projected_ops(FRAC_PI_2, cutoff)?;
    Ok(logical_variance(&at0.first_minus, &at0.second_minus, &s)?
        + logical_variance(&at90.first_plus, &at90.second_plus, &s)?)
}

/// Summary for one squeezing value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub g: f64,
    pub n_max: usize,
    pub duan_simon_sum: f64,
    pub analytic_value: f64,
    pub mean_photon: f64,
    pub truncation_weight_discarded: f64,
    pub separable_bound: f64,
    /// Duan–Simon detection: the sum falls strictly below 2.
    pub below_separable_bound: bool,
}

pub fn cv_report(g: SqueezingParameter, cutoff: FockCutoff) -> Result<CvReport> {
    let tms = tms_state(g, cutoff)?;
    let ds = duan_simon_sum(g, cutoff)?;
    Ok(CvReport {
        g: g.get(),
        n_max: cutoff.n_max(),
        duan_simon_sum: ds.sum,
        analytic_value: ds.analytic,
        mean_photon: mean_photon(&tms.state, cutoff)?,
        truncation_weight_discarded: tms.discarded_weight,
        separable_bound: DUAN_SIMON_BOUND,
        below_separable_bound: ds.sum < DUAN_SIMON_BOUND,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariancePoint {
    pub theta1: f64,
    pub theta2: f64,
    pub sign: Sign,
    pub variance: f64,
    pub analytic: f64,
    pub abs_error: f64,
}

/// Variances of `O^±` over an `n × n` grid of angles in `[0, π]²`.
pub fn variance_grid(g: SqueezingParameter, cutoff: FockCutoff, n_angles: usize) -> Result<Vec<VariancePoint>> {
    if n_angles < 2 {
        return Err(invalid("angle grid needs at least 2 points per axis"));
    }
    let s = tms_state(g, cutoff)?.state;
    let angles: Vec<f64> = (0..n_angles)
        .map(|k| std::f64::consts::PI * k as f64 / (n_angles - 1) as f64)
        .collect();
    let mut out = Vec::new();
    for &t1 in &angles {
        for &t2 in &angles {
            for sign in [Sign::Plus, Sign::Minus] {
                let variance = pm_variance(&s, t1, t2, sign, cutoff)?;
                let analytic = analytic_pm_variance(g, t1, t2, sign);
                out.push(VariancePoint {
                    theta1: t1,
                    theta2: t2,
                    sign,
                    variance,
                    analytic,
                    abs_error: (variance - analytic).abs(),
                });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::variance;

    fn cut(n: usize) -> FockCutoff {
        FockCutoff::new(n).unwrap()
    }

    fn sq(g: f64) -> SqueezingParameter {
        SqueezingParameter::new(g).unwrap()
    }

    #[test]
    fn parameter_validation() {
        assert!(FockCutoff::new(1).is_err());
        assert_eq!(FockCutoff::default().n_max(), 60);
        assert!(SqueezingParameter::new(-0.1).is_err());
        assert!(SqueezingParameter::new(f64::NAN).is_err());
    }

    #[test]
    fn ladder_operator() {
        let c = cut(6);
        let a = annihilation(c);
        assert_eq!(a[(0, 1)], C64::from(1.0));
        let comm = a.commutator(&a.adjoint()).unwrap();
        for i in 0..c.n_max() {
            for j in 0..c.n_max() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((comm[(i, j)] - C64::from(want)).norm() < 1e-12);
            }
        }
        let n = &a.adjoint() * &a;
        assert!(n.max_abs_diff(&number_operator(c)) < 1e-12);
    }

    #[test]
    fn quadrature_properties() {
        let c = cut(8);
        let x0 = quadrature(0.0, c);
        let xp = quadrature(FRAC_PI_2, c);
        assert!(x0.is_hermitian(1e-12) && xp.is_hermitian(1e-12));
        // (a e^{iθ} + h.c.)/√2 at θ = π/2 is −p, so the conjugate pair is (X^{π/2}, X⁰)
        let comm = xp.commutator(&x0).unwrap();
        for i in 0..c.n_max() {
            assert!((comm[(i, i)] - C64::new(0.0, 1.0)).norm() < 1e-12);
        }
        let vac = StateVector::basis(&[c.levels()], &[0]).unwrap();
        assert!((variance(&vac, &x0).unwrap() - 0.5).abs() < 1e-12);
        let flipped = quadrature(0.3 + std::f64::consts::PI, c);
        assert!(flipped.max_abs_diff(&quadrature(0.3, c).scale(C64::from(-1.0))) < 1e-12);
    }

    #[test]
    fn tms_structure() {
        let c = cut(20);
        let t = tms_state(sq(0.0), c).unwrap();
        assert!((t.state.amplitudes()[0] - C64::from(1.0)).norm() < 1e-15);
        let t = tms_state(sq(0.4), c).unwrap();
        let a = t.state.amplitudes();
        let l = c.levels();
        assert!((a[l + 1].re / a[0].re - 0.4f64.tanh()).abs() < 1e-14);
        assert!(a[1].is_zero());
    }

    #[test]
    fn dense_and_local_operators_agree() {
        let c = cut(5);
        let dense = pm_operator(0.3, 1.1, Sign::Minus, c).unwrap();
        let local = pm_local(0.3, 1.1, Sign::Minus, c).to_matrix().unwrap();
        assert!(dense.max_abs_diff(&local) < 1e-14);
        assert!(dense.is_hermitian(1e-12));
        let vac = StateVector::basis(&[c.levels(); 2], &[0, 0]).unwrap();
        assert!((variance(&vac, &pm_operator(0.0, 0.0, Sign::Minus, c).unwrap()).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn projector_properties() {
        let c = cut(4);
        let p = diagonal_projector(c);
        assert!((&p * &p).max_abs_diff(&p) < 1e-15);
        let rank: f64 = p.trace().re;
        assert_eq!(rank as usize, c.levels());
        let ket01 = StateVector::basis(&[c.levels(); 2], &[0, 1]).unwrap();
        assert!(p.apply(ket01.amplitudes()).unwrap().iter().all(|z| z.is_zero()));
        let tms = tms_state(sq(0.3), c).unwrap().state;
        let projected = p.apply(tms.amplitudes()).unwrap();
        assert!(projected.iter().zip(tms.amplitudes()).all(|(a, b)| (a - b).norm() < 1e-15));
    }

    #[test]
    fn projected_ops_match_dense_construction() {
        let c = cut(4);
        let p = diagonal_projector(c);
        let idx = diagonal_indices(c);
        for phi in [0.0, 0.7, FRAC_PI_2] {
            let ops = projected_ops(phi, c).unwrap();
            for (sign, first, second) in [
                (Sign::Plus, &ops.first_plus, &ops.second_plus),
                (Sign::Minus, &ops.first_minus, &ops.second_minus),
            ] {
                let o = pm_operator(phi, phi, sign, c).unwrap();
                let po = &(&p * &o) * &p;
                let po2 = &(&p * &(&o * &o)) * &p;
                for (m, &im) in idx.iter().enumerate() {
                    for (n, &in_) in idx.iter().enumerate() {
                        assert!((first[(m, n)] - po[(im, in_)]).norm() < 1e-12);
                        assert!((second[(m, n)] - po2[(im, in_)]).norm() < 1e-12);
                    }
                }
                assert!(first.is_hermitian(1e-12) && second.is_hermitian(1e-12));
            }
        }
    }

    #[test]
    fn first_minus_vanishes_at_zero_angle() {
        let ops = projected_ops(0.0, cut(10)).unwrap();
        assert!(ops.first_minus.frobenius_norm() < 1e-14);
        assert!(ops.first_plus.frobenius_norm() < 1e-14);
    }

    #[test]
    fn logical_state_matches_tms_diagonal() {
        let c = cut(30);
        let l = logical_cv_state(sq(0.5), c).unwrap().state;
        let t = tms_state(sq(0.5), c).unwrap().state;
        for (n, i) in diagonal_indices(c).into_iter().enumerate() {
            assert_eq!(l.amplitudes()[n], t.amplitudes()[i]);
        }
        assert!((l.norm_sqr() - 1.0).abs() < 1e-12);
        let vac = logical_cv_state(sq(0.0), c).unwrap().state;
        assert_eq!(vac.amplitudes()[0], C64::from(1.0));
    }

    #[test]
    fn small_cutoff_warns_through_discarded_weight() {
        let t = tms_state(sq(1.5), cut(5)).unwrap();
        assert!(t.discarded_weight > TRUNCATION_WARN);
    }

    #[test]
    fn vacuum_saturates_duan_simon() {
        let ds = duan_simon_sum(sq(0.0), cut(10)).unwrap();
        assert!((ds.sum - 2.0).abs() < 1e-12);
        assert_eq!(ds.separable_bound, 2.0);
        assert!((logical_coherence_sum(sq(0.0), cut(10)).unwrap() - 2.0).abs() < 1e-12);
    }
}
