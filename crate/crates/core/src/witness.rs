//! Witness inequalities built from logical coherence conditions, their
//! evaluation on pure or mixed states, and a numerical oracle for the maximum
//! over product states.

use nalgebra::DMatrix;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::encodings::{resolve_shift, FourthTerm, OperatorResolution, XyPattern};
use crate::error::{invalid, Error, Result};
use crate::qudit::{shift_x, QuditDim, RootBranch};
use crate::tensor::{multi_index, Expectation};
use crate::weyl::WeylWord;
use crate::{ComplexMatrix, C64};

/// How the combined sum `s = Σ c_t ⟨O_t⟩^{p_t}` is turned into a real value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// `|s| > bound`
    AbsGt,
    /// `s + s* > bound`
    RealPlusCcGt,
}

impl Comparison {
    pub fn reduce(self, s: C64) -> f64 {
        match self {
            Comparison::AbsGt => s.norm(),
            Comparison::RealPlusCcGt => 2.0 * s.re,
        }
    }
}

#[derive(Clone, Debug)]
pub struct WitnessTerm {
    pub coefficient: C64,
    pub operator: ComplexMatrix,
    /// Applied to the expectation value, not to the operator.
    pub power: u32,
    pub label: String,
}

#[derive(Clone, Debug)]
pub struct WitnessSpec {
    pub label: String,
    pub dims: Vec<usize>,
    pub terms: Vec<WitnessTerm>,
    pub bound: f64,
    pub comparison: Comparison,
    pub weights: Vec<f64>,
}

/// Outcome of evaluating a witness; `violated` iff `value > bound`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub witness_label: String,
    pub state_label: String,
    pub value: f64,
    pub bound: f64,
    pub violated: bool,
    pub weights_used: Vec<f64>,
}

impl WitnessSpec {
    pub fn new(
        label: impl Into<String>,
        dims: Vec<usize>,
        terms: Vec<WitnessTerm>,
        bound: f64,
        comparison: Comparison,
        weights: Vec<f64>,
    ) -> Result<Self> {
        let total: usize = dims.iter().product();
        if terms.is_empty() {
            return Err(invalid("witness has no terms"));
        }
        for t in &terms {
            if t.operator.rows() != total || !t.operator.is_square() {
                return Err(Error::DimensionMismatch {
                    expected: total,
                    found: t.operator.rows(),
                });
            }
            if t.power == 0 {
                return Err(invalid(format!("term {} has power 0", t.label)));
            }
        }
        if bound.is_nan() || bound < 0.0 {
            return Err(invalid(format!("bound must be non-negative, got {bound}")));
        }
        Ok(Self {
            label: label.into(),
            dims,
            terms,
            bound,
            comparison,
            weights,
        })
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// `⟨O_t⟩` for every term.
    pub fn term_expectations<S: Expectation<f64> + ?Sized>(&self, state: &S) -> Result<Vec<C64>> {
        self.terms.iter().map(|t| state.expect(&t.operator)).collect()
    }

    fn combine(&self, expectations: &[C64]) -> C64 {
        self.terms
            .iter()
            .zip(expectations)
            .map(|(t, e)| t.coefficient * e.powu(t.power))
            .sum()
    }

    pub fn value<S: Expectation<f64> + ?Sized>(&self, state: &S) -> Result<f64> {
        Ok(self.comparison.reduce(self.combine(&self.term_expectations(state)?)))
    }

    pub fn evaluate<S: Expectation<f64> + ?Sized>(&self, state: &S, state_label: &str) -> Result<WitnessReport> {
        let value = self.value(state)?;
        Ok(WitnessReport {
            witness_label: self.label.clone(),
            state_label: state_label.to_string(),
            value,
            bound: self.bound,
            violated: value > self.bound,
            weights_used: self.weights.clone(),
        })
    }

    /// Same terms, different bound.
    pub fn with_bound(mut self, bound: f64) -> Self {
        self.bound = bound;
        self
    }
}

fn check_c(c: f64, lo: f64, hi: f64) -> Result<()> {
    if !(lo..hi).contains(&c) {
        return Err(invalid(format!("c = {c} outside [{lo}, {hi})")));
    }
    Ok(())
}

fn word_term(w: &WeylWord) -> WitnessTerm {
    WitnessTerm {
        coefficient: C64::from(1.0),
        operator: w.to_matrix(),
        power: 1,
        label: w.to_string(),
    }
}

fn words(d: usize, spec: &[(&[i64], &[i64])]) -> Vec<WeylWord> {
    let d = QuditDim::new(d).expect("valid dimension");
    spec.iter()
        .map(|(x, z)| WeylWord::new(d, 0, x, z).expect("matching lengths"))
        .collect()
}

/// `|⟨X_L⟩| > c` on a single `d`-level system, `c ∈ [0, 1)`.
pub fn coherence_witness(d: QuditDim, c: f64) -> Result<WitnessSpec> {
    check_c(c, 0.0, 1.0)?;
    let term = WitnessTerm {
        coefficient: C64::from(1.0),
        operator: shift_x(d),
        power: 1,
        label: "X_L".into(),
    };
    WitnessSpec::new("coherence |<X_L>| > c", vec![d.get()], vec![term], c, Comparison::AbsGt, vec![1.0])
}

/// `Σ_a c_a ⟨X_L^a⟩^{b_a}` compared against `c`. With `RealPlusCcGt` and
/// `c_0 = 0, c_{a>0} = 1` this is the all-powers coherence condition.
pub fn general_coherence_witness(
    d: QuditDim,
    coeffs: &[f64],
    powers: &[u32],
    c: f64,
    comparison: Comparison,
) -> Result<WitnessSpec> {
    for (what, len) in [("coefficients", coeffs.len()), ("powers", powers.len())] {
        if len != d.get() {
            return Err(Error::LengthMismatch {
                what,
                expected: d.get(),
                found: len,
            });
        }
    }
    let x = shift_x::<f64>(d);
    let terms = (0..d.get())
        .map(|a| WitnessTerm {
            coefficient: C64::from(coeffs[a]),
            operator: x.pow(a as u32).expect("square"),
            power: powers[a],
            label: format!("X_L^{a}"),
        })
        .collect();
    WitnessSpec::new("coherence sum_a c_a <X_L^a>^b_a", vec![d.get()], terms, c, comparison, coeffs.to_vec())
}

/// `Σ_{n=1}^{d−1} ⟨X_L^n⟩ + c.c. > c`, maximal value `2(d−1)`.
pub fn all_powers_coherence_witness(d: QuditDim, c: f64) -> Result<WitnessSpec> {
    let mut coeffs = vec![1.0; d.get()];
    coeffs[0] = 0.0;
    let spec = general_coherence_witness(d, &coeffs, &vec![1; d.get()], c, Comparison::RealPlusCcGt)?;
    Ok(WitnessSpec {
        label: "coherence sum_n <X_L^n> + c.c. > c".into(),
        ..spec
    })
}

/// `|⟨Σ_k w_k T_k⟩| > c` for an operator resolution of `X_L`.
pub fn resolution_witness(res: &OperatorResolution, weights: &[f64], c: f64) -> Result<WitnessSpec> {
    let res = res.with_weights(weights)?;
    let first = &res.terms()[0];
    let dims = first.site_ops.iter().map(|m| m.rows()).collect();
    let label = res
        .terms()
        .iter()
        .filter(|t| t.weight != 0.0)
        .map(|t| format!("{}*{}", t.weight, t.label))
        .collect::<Vec<_>>()
        .join(" + ");
    let terms = res
        .terms()
        .iter()
        .map(|t| WitnessTerm {
            coefficient: C64::from(t.weight),
            operator: t.tensor(),
            power: 1,
            label: t.label.clone(),
        })
        .collect();
    WitnessSpec::new(format!("|<{label}>| > c"), dims, terms, c, Comparison::AbsGt, weights.to_vec())
}

fn pair_witness(label: &str, d: usize, ws: Vec<WeylWord>, c: f64) -> Result<WitnessSpec> {
    check_c(c, 0.5, 1.0)?;
    let dims = vec![d; ws[0].n_sites()];
    let terms = ws.iter().map(word_term).collect();
    WitnessSpec::new(label, dims, terms, 2.0 * c, Comparison::AbsGt, vec![0.5, 0.5])
}

fn two_qutrit_words() -> Vec<WeylWord> {
    words(3, &[(&[1, 1], &[0, 0]), (&[1, 1], &[1, 2])])
}

fn three_qutrit_words() -> Vec<WeylWord> {
    words(3, &[(&[1, 1, 1], &[0, 0, 0]), (&[1, 1, 1], &[1, 1, 1])])
}

/// `|⟨X₁X₂ + X₁Z₁X₂Z₂²⟩| > 2c` on two qutrits, `c ∈ [1/2, 1)`.
pub fn two_qutrit_entanglement_witness(c: f64) -> Result<WitnessSpec> {
    pair_witness("|<X1X2 + X1Z1X2Z2^2>| > 2c", 3, two_qutrit_words(), c)
}

/// `|⟨X₁X₂X₃ + X₁Z₁X₂Z₂X₃Z₃⟩| > 2c` on three qutrits, `c ∈ [1/2, 1)`.
pub fn three_qutrit_entanglement_witness(c: f64) -> Result<WitnessSpec> {
    pair_witness("|<X1X2X3 + X1Z1X2Z2X3Z3>| > 2c", 3, three_qutrit_words(), c)
}

/// Which family of single-term correlation conditions to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CorrelationSet {
    /// `X₁X₂` and `X₁Z₁X₂Z₂²`
    TwoQutrit,
    /// `X₁X₂X₃` and `X₁Z₁X₂Z₂X₃Z₃`
    ThreeQutrit,
    /// The four X/Y products on three `d`-level sites, each raised to `power`.
    Tripartite {
        d: QuditDim,
        power: u32,
        fourth: FourthTerm,
        branch: RootBranch,
    },
}

/// One `|⟨T⟩| > c` condition per product; joint detection requires all of them.
pub fn basis_correlation_pair(set: CorrelationSet, c: f64) -> Result<Vec<WitnessSpec>> {
    check_c(c, 0.0, 1.0)?;
    let single = |t: WitnessTerm, dims: Vec<usize>, k: usize, n: usize| {
        let mut weights = vec![0.0; n];
        weights[k] = 1.0;
        WitnessSpec::new(format!("|<{}>| > c", t.label), dims, vec![t], c, Comparison::AbsGt, weights)
    };
    match set {
        CorrelationSet::TwoQutrit | CorrelationSet::ThreeQutrit => {
            let ws = if set == CorrelationSet::TwoQutrit {
                two_qutrit_words()
            } else {
                three_qutrit_words()
            };
            let n = ws.len();
            ws.iter()
                .enumerate()
                .map(|(k, w)| single(word_term(w), vec![3; w.n_sites()], k, n))
                .collect()
        }
        CorrelationSet::Tripartite {
            d,
            power,
            fourth,
            branch,
        } => XyPattern::family(fourth)
            .iter()
            .enumerate()
            .map(|(k, p)| {
                let t = WitnessTerm {
                    coefficient: C64::from(1.0),
                    operator: p.matrix(d, power, branch),
                    power: 1,
                    label: p.label(power),
                };
                single(t, vec![d.get(); 3], k, 4)
            })
            .collect(),
    }
}

/// All conditions violated at once.
pub fn joint_verdict(reports: &[WitnessReport]) -> bool {
    !reports.is_empty() && reports.iter().all(|r| r.violated)
}

/// `|⟨X₁X₂X₃ + ωX₁Y₂Y₃ + ωY₁X₂Y₃ + ωY₁Y₂X₃⟩| > 4c`; `c = 3/4` gives bound 3.
pub fn ghz_tripartite_witness(d: QuditDim, c: f64, fourth: FourthTerm, branch: RootBranch) -> Result<WitnessSpec> {
    if c.is_nan() || c < 0.0 {
        return Err(invalid(format!("c must be non-negative, got {c}")));
    }
    let family = XyPattern::family(fourth);
    let terms = family
        .iter()
        .map(|p| WitnessTerm {
            coefficient: C64::from(1.0),
            operator: p.matrix(d, 1, branch),
            power: 1,
            label: p.label(1),
        })
        .collect();
    let label = format!(
        "|<{}>| > 4c",
        family.iter().map(|p| p.label(1)).collect::<Vec<_>>().join(" + ")
    );
    WitnessSpec::new(label, vec![d.get(); 3], terms, 4.0 * c, Comparison::AbsGt, vec![0.25; 4])
}

/// Published LHV bound of the all-powers tripartite inequality, `3d/4 − 1`.
pub fn slk_paper_bound(d: QuditDim) -> f64 {
    0.75 * d.get() as f64 - 1.0
}

/// `(1/4) Σ_{n=1}^{d−1} ⟨Σ_patterns (term)^n⟩ + c.c. > c`.
pub fn slk_witness(d: QuditDim, c: f64, fourth: FourthTerm, branch: RootBranch) -> Result<WitnessSpec> {
    let mut terms = Vec::new();
    for n in 1..d.get() as u32 {
        for p in XyPattern::family(fourth) {
            terms.push(WitnessTerm {
                coefficient: C64::from(0.25),
                operator: p.matrix(d, n, branch),
                power: 1,
                label: p.label(n),
            });
        }
    }
    WitnessSpec::new(
        "(1/4) sum_n <(X1X2X3)^n + (wX1Y2Y3)^n + (wY1X2Y3)^n + (wY1Y2X3)^n> + c.c. > c",
        vec![d.get(); 3],
        terms,
        c,
        Comparison::RealPlusCcGt,
        vec![0.25; 4],
    )
}

/// Default two-qutrit resolution used by the weighted CLI path.
pub fn two_qutrit_resolution() -> OperatorResolution {
    resolve_shift(QuditDim::new(3).expect("3 is valid"), 2).expect("two sites")
}

/// Local-ascent settings for [`separable_bound_estimate`].
const MAX_SWEEPS: usize = 500;
const SWEEP_TOL: f64 = 1e-12;

/// Largest witness value found over pure product states.
///
/// Each start draws Gaussian random unit vectors per site from a stream
/// derived from `(seed, start)`, then runs block-coordinate ascent: with the
/// other sites fixed, every term is a quadratic form `v†A_t v`, the objective
/// is linearized around the current point and the site vector is replaced by
/// the top eigenvector of the resulting Hermitian matrix whenever that
/// improves the value. Sweeps stop once they gain less than `1e-12`.
/// The result is nondecreasing in `n_starts` for a fixed seed.
pub fn separable_bound_estimate(spec: &WitnessSpec, n_starts: usize, seed: u64) -> Result<f64> {
    if n_starts == 0 {
        return Err(invalid("need at least one start"));
    }
    let ctx = ProductContext::new(spec);
    let best = (0..n_starts)
        .into_par_iter()
        .map(|start| ctx.ascend(&ctx.random_start(seed, start as u64)))
        .reduce(|| f64::NEG_INFINITY, f64::max);
    Ok(best)
}

/// Value of `spec` on the product state `⊗ sites[i]`.
pub fn product_value(spec: &WitnessSpec, sites: &[Vec<C64>]) -> Result<f64> {
    if sites.len() != spec.dims.len() || sites.iter().zip(&spec.dims).any(|(v, &d)| v.len() != d) {
        return Err(invalid("product factors do not match witness dims"));
    }
    Ok(ProductContext::new(spec).value(sites))
}

struct ProductContext<'a> {
    spec: &'a WitnessSpec,
    digits: Vec<Vec<usize>>,
}

impl<'a> ProductContext<'a> {
    fn new(spec: &'a WitnessSpec) -> Self {
        let digits = (0..spec.total_dim()).map(|i| multi_index(&spec.dims, i)).collect();
        Self { spec, digits }
    }

    fn random_start(&self, seed: u64, start: u64) -> Vec<Vec<C64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(start);
        self.spec
            .dims
            .iter()
            .map(|&d| {
                let v: Vec<C64> = (0..d)
                    .map(|_| C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
                    .collect();
                normalize(v)
            })
            .collect()
    }

    /// `Π_{i≠skip} v_i[r_i]` for every flat index `r`.
    fn partial_product(&self, sites: &[Vec<C64>], skip: Option<usize>) -> Vec<C64> {
        self.digits
            .iter()
            .map(|dig| {
                dig.iter()
                    .enumerate()
                    .filter(|&(i, _)| Some(i) != skip)
                    .map(|(i, &r)| sites[i][r])
                    .product()
            })
            .collect()
    }

    fn expectations(&self, sites: &[Vec<C64>]) -> Vec<C64> {
        let psi = self.partial_product(sites, None);
        self.spec
            .terms
            .iter()
            .map(|t| {
                let mut acc = C64::zero();
                for (r, pr) in psi.iter().enumerate() {
                    if pr.is_zero() {
                        continue;
                    }
                    let row: C64 = (0..psi.len()).map(|c| t.operator[(r, c)] * psi[c]).sum();
                    acc += pr.conj() * row;
                }
                acc
            })
            .collect()
    }

    fn value(&self, sites: &[Vec<C64>]) -> f64 {
        self.spec.comparison.reduce(self.spec.combine(&self.expectations(sites)))
    }

    /// `A_t` with `⟨ψ|O_t|ψ⟩ = v_k† A_t v_k`.
    fn reduced(&self, sites: &[Vec<C64>], k: usize) -> Vec<DMatrix<C64>> {
        let u = self.partial_product(sites, Some(k));
        let dk = self.spec.dims[k];
        self.spec
            .terms
            .iter()
            .map(|t| {
                let mut a = DMatrix::<C64>::zeros(dk, dk);
                for (r, ur) in u.iter().enumerate() {
                    let ur = ur.conj();
                    let rk = self.digits[r][k];
                    for (c, uc) in u.iter().enumerate() {
                        let o = t.operator[(r, c)];
                        if !o.is_zero() {
                            a[(rk, self.digits[c][k])] += ur * o * uc;
                        }
                    }
                }
                a
            })
            .collect()
    }

    fn site_step(&self, sites: &[Vec<C64>], k: usize) -> Vec<C64> {
        let a = self.reduced(sites, k);
        let v = &sites[k];
        let vk = nalgebra::DVector::from_column_slice(v);
        let e: Vec<C64> = a.iter().map(|m| vk.dotc(&(m * &vk))).collect();
        let s = self.spec.combine(&e);
        let rot = match self.spec.comparison {
            Comparison::AbsGt if s.norm() > 0.0 => (s / s.norm()).conj(),
            _ => C64::from(1.0),
        };
        let dk = v.len();
        let mut g = DMatrix::<C64>::zeros(dk, dk);
        for ((t, m), et) in self.spec.terms.iter().zip(&a).zip(&e) {
            let slope = t.coefficient * C64::from(t.power as f64) * et.powu(t.power - 1);
            g += m * (rot * slope);
        }
        let h = (&g + g.adjoint()) * C64::from(0.5);
        let eig = h.symmetric_eigen();
        let top = eig
            .eigenvalues
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.total_cmp(y.1))
            .map(|(i, _)| i)
            .expect("non-empty");
        eig.eigenvectors.column(top).iter().copied().collect()
    }

    fn ascend(&self, start: &[Vec<C64>]) -> f64 {
        let mut sites = start.to_vec();
        let mut val = self.value(&sites);
        for _ in 0..MAX_SWEEPS {
            let before = val;
            for k in 0..sites.len() {
                let candidate = self.site_step(&sites, k);
                let old = std::mem::replace(&mut sites[k], candidate);
                let new_val = self.value(&sites);
                if new_val > val {
                    val = new_val;
                } else {
                    sites[k] = old;
                }
            }
            if val - before < SWEEP_TOL {
                break;
            }
        }
        val
    }
}

fn normalize(mut v: Vec<C64>) -> Vec<C64> {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|z| *z /= n);
    v
}
