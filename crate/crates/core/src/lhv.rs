//! Exhaustive local-hidden-variable analysis of the tripartite X/Y
//! inequalities: each party answers `ω^{x_α}` to X and `ω^{y_α}` to Y, and
//! every deterministic assignment is enumerated.
//!
//! Convex mixtures cannot beat the best deterministic assignment, so the
//! enumerated maximum is the LHV maximum.

use std::f64::consts::PI;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::encodings::{FourthTerm, XyPattern};
use crate::error::{Error, Result};
use crate::qudit::{ghz_state, QuditDim, RootBranch};
use crate::witness::{ghz_tripartite_witness, slk_paper_bound, slk_witness};
use crate::C64;

const PARTIES: usize = 3;
/// Largest assignment space the maximizers will enumerate (`d ≤ 8`).
pub const MAX_ENUMERATION: u64 = 262_144;
/// Largest assignment space the feasibility searches will enumerate (`d ≤ 12`).
pub const MAX_FEASIBILITY_ENUMERATION: u64 = 2_985_984;
const TIE_TOL: f64 = 1e-12;

/// Deterministic outcomes: party `α` answers `ω^{x_α}` to X and `ω^{y_α}` to Y.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LhvAssignment {
    pub d: usize,
    pub x: Vec<u32>,
    pub y: Vec<u32>,
}

impl LhvAssignment {
    /// Assignment number `idx` in lexicographic order of `(x‖y)`.
    pub fn from_index(d: usize, idx: u64) -> Self {
        let mut digits = [0u32; 2 * PARTIES];
        let mut rest = idx;
        for slot in digits.iter_mut().rev() {
            *slot = (rest % d as u64) as u32;
            rest /= d as u64;
        }
        Self {
            d,
            x: digits[..PARTIES].to_vec(),
            y: digits[PARTIES..].to_vec(),
        }
    }

    /// `(x‖y)` as one vector.
    pub fn concat(&self) -> Vec<u32> {
        self.x.iter().chain(&self.y).copied().collect()
    }

    /// Exponent of ω for one X/Y product, `ω^{e}·Π_α ω^{x_α or y_α}`.
    pub fn exponent(&self, pattern: XyPattern, power: u32) -> u64 {
        let sites = pattern.y_sites();
        let base: u64 = (0..PARTIES)
            .map(|a| if sites[a] { self.y[a] } else { self.x[a] } as u64)
            .sum::<u64>()
            + pattern.omega_exponent() as u64;
        (base * power as u64) % self.d as u64
    }

    pub fn exponents(&self, fourth: FourthTerm, power: u32) -> [u64; 4] {
        XyPattern::family(fourth).map(|p| self.exponent(p, power))
    }
}

impl fmt::Display for LhvAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x={:?} y={:?}", self.x, self.y)
    }
}

fn omega(d: usize, e: u64) -> C64 {
    C64::from_polar(1.0, 2.0 * PI * e as f64 / d as f64)
}

/// Sum `Σ_t ω^{e_t}` with exponents summed in sorted order, so equal
/// multisets give bit-identical results.
fn omega_sum(d: usize, mut exps: [u64; 4]) -> C64 {
    exps.sort_unstable();
    exps.iter().map(|&e| omega(d, e)).sum()
}

/// Which real number an assignment is scored by.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LhvObjective {
    /// `|ω^{e₀} + ω^{e₁} + ω^{e₂} + ω^{e₃}|`
    TripartiteModulus,
    /// `Re(ω^{e₀} + ω^{e₁} + ω^{e₂} + ω^{e₃})`
    TripartiteRealPart,
    /// `(1/4) Σ_{n=1}^{d−1} Σ_t ω^{n e_t} + c.c.`
    Slk,
}

impl LhvObjective {
    pub fn score(self, a: &LhvAssignment, fourth: FourthTerm) -> f64 {
        let d = a.d;
        match self {
            LhvObjective::TripartiteModulus => omega_sum(d, a.exponents(fourth, 1)).norm(),
            LhvObjective::TripartiteRealPart => omega_sum(d, a.exponents(fourth, 1)).re,
            LhvObjective::Slk => {
                let s: C64 = (1..d as u32)
                    .map(|n| omega_sum(d, a.exponents(fourth, n)))
                    .sum();
                2.0 * (0.25 * s).re
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LhvMaximum {
    pub max_value: f64,
    pub argmax: LhvAssignment,
    pub assignments: u64,
}

fn space_size(d: QuditDim, cap: u64) -> Result<u64> {
    let size = (d.get() as u64).pow(2 * PARTIES as u32);
    if size > cap {
        return Err(Error::EnumerationTooLarge { size, cap });
    }
    Ok(size)
}

/// Exact maximum over all `d⁶` assignments; ties go to the lexicographically
/// smallest `(x‖y)`. The parallel reduction is partition-independent.
pub fn lhv_max(d: QuditDim, objective: LhvObjective, fourth: FourthTerm) -> Result<LhvMaximum> {
    let size = space_size(d, MAX_ENUMERATION)?;
    let dd = d.get();
    let better = |a: (f64, u64), b: (f64, u64)| {
        if a.0 > b.0 + TIE_TOL || ((a.0 - b.0).abs() <= TIE_TOL && a.1 < b.1) {
            a
        } else {
            b
        }
    };
    let (max_value, idx) = (0..size)
        .into_par_iter()
        .map(|i| (objective.score(&LhvAssignment::from_index(dd, i), fourth), i))
        .reduce(|| (f64::NEG_INFINITY, u64::MAX), better);
    Ok(LhvMaximum {
        max_value,
        argmax: LhvAssignment::from_index(dd, idx),
        assignments: size,
    })
}

/// Modulus maximum of the four-term tripartite sum.
pub fn lhv_max_tripartite(d: QuditDim, fourth: FourthTerm) -> Result<LhvMaximum> {
    lhv_max(d, LhvObjective::TripartiteModulus, fourth)
}

/// Real-part maximum of the four-term tripartite sum.
pub fn lhv_max_tripartite_real(d: QuditDim, fourth: FourthTerm) -> Result<LhvMaximum> {
    lhv_max(d, LhvObjective::TripartiteRealPart, fourth)
}

/// Maximum of the all-powers tripartite expression.
pub fn lhv_max_slk(d: QuditDim, fourth: FourthTerm) -> Result<LhvMaximum> {
    lhv_max(d, LhvObjective::Slk, fourth)
}

/// `Σ_j coeffs_j v_j + constant ≡ 0 (mod modulus)` over `v = (x‖y)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Congruence {
    pub coeffs: Vec<i64>,
    pub constant: i64,
    pub modulus: i64,
}

impl Congruence {
    pub fn holds(&self, v: &[u32]) -> bool {
        let s: i64 = self.coeffs.iter().zip(v).map(|(c, &x)| c * x as i64).sum::<i64>() + self.constant;
        s.rem_euclid(self.modulus) == 0
    }
}

impl fmt::Display for Congruence {
    /// Groups uniform x- and y-coefficients: `6+4(y1+y2+y3) ≡ 0 mod 4`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.constant != 0 {
            parts.push(self.constant.to_string());
        }
        for (name, block) in [("x", &self.coeffs[..PARTIES]), ("y", &self.coeffs[PARTIES..])] {
            if block.iter().all(|&c| c == 0) {
                continue;
            }
            if block.iter().all(|&c| c == block[0]) {
                let vars = (1..=PARTIES).map(|i| format!("{name}{i}")).collect::<Vec<_>>().join("+");
                let c = block[0];
                parts.push(if c == 1 { format!("({vars})") } else { format!("{c}({vars})") });
            } else {
                for (i, &c) in block.iter().enumerate() {
                    match c {
                        0 => {}
                        1 => parts.push(format!("{name}{}", i + 1)),
                        c => parts.push(format!("{c}{name}{}", i + 1)),
                    }
                }
            }
        }
        if parts.is_empty() {
            parts.push("0".into());
        }
        write!(f, "{} ≡ 0 mod {}", parts.join("+"), self.modulus)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceSystem {
    pub equations: Vec<Congruence>,
}

impl CongruenceSystem {
    /// `ω`-exponent of `(term)^power` vanishing mod `d`, one equation per term.
    pub fn tripartite(d: QuditDim, power: u32, fourth: FourthTerm) -> Self {
        let n = power as i64;
        let equations = XyPattern::family(fourth)
            .iter()
            .map(|p| {
                let ys = p.y_sites();
                let mut coeffs = vec![0i64; 2 * PARTIES];
                for a in 0..PARTIES {
                    coeffs[if ys[a] { PARTIES + a } else { a }] = n;
                }
                Congruence {
                    coeffs,
                    constant: n * p.omega_exponent(),
                    modulus: d.get() as i64,
                }
            })
            .collect();
        Self { equations }
    }

    pub fn satisfied_count(&self, a: &LhvAssignment) -> usize {
        let v = a.concat();
        self.equations.iter().filter(|e| e.holds(&v)).count()
    }

    /// Sum of all equations after the first, minus the first as many times as
    /// it takes to cancel a uniform x-coefficient (when that is possible).
    pub fn reduced(&self) -> Congruence {
        let first = &self.equations[0];
        let m = first.modulus;
        let mut coeffs = vec![0i64; 2 * PARTIES];
        let mut constant = 0;
        for e in &self.equations[1..] {
            for (c, ec) in coeffs.iter_mut().zip(&e.coeffs) {
                *c += ec;
            }
            constant += e.constant;
        }
        let fx = &first.coeffs[..PARTIES];
        let sx = &coeffs[..PARTIES];
        if fx.iter().all(|&c| c == fx[0] && c != 0) && sx.iter().all(|&c| c == sx[0]) && sx[0] % fx[0] == 0 {
            let k = sx[0] / fx[0];
            for (c, fc) in coeffs.iter_mut().zip(&first.coeffs) {
                *c -= k * fc;
            }
            constant -= k * first.constant;
        }
        Congruence {
            coeffs,
            constant,
            modulus: m,
        }
    }
}

/// Result of an exhaustive congruence search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Feasibility {
    pub d: usize,
    pub power: u32,
    pub feasible: bool,
    pub max_satisfiable: usize,
    pub witness_assignment: Option<LhvAssignment>,
    pub assignments: u64,
}

fn search(d: QuditDim, system: &CongruenceSystem, power: u32) -> Result<Feasibility> {
    let size = space_size(d, MAX_FEASIBILITY_ENUMERATION)?;
    let dd = d.get();
    let full = system.equations.len();
    let (best, first_full) = (0..size)
        .into_par_iter()
        .map(|i| {
            let k = system.satisfied_count(&LhvAssignment::from_index(dd, i));
            (k, if k == full { i } else { u64::MAX })
        })
        .reduce(|| (0, u64::MAX), |a, b| (a.0.max(b.0), a.1.min(b.1)));
    Ok(Feasibility {
        d: dd,
        power,
        feasible: best == full,
        max_satisfiable: best,
        witness_assignment: (first_full != u64::MAX).then(|| LhvAssignment::from_index(dd, first_full)),
        assignments: size,
    })
}

/// Whether all four unit-power congruences hold at once, and how many can.
pub fn hardy_feasibility(d: QuditDim, fourth: FourthTerm) -> Result<Feasibility> {
    search(d, &CongruenceSystem::tripartite(d, 1, fourth), 1)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HigherPowerFeasibility {
    #[serde(flatten)]
    pub search: Feasibility,
    /// Consequence of the system obtained by adding equations.
    pub contradiction_equation: String,
    /// Whether that consequence alone has a solution.
    pub reduced_feasible: bool,
}

/// Same search for the `power`-th powers of the four products.
pub fn higher_power_feasibility(d: QuditDim, power: u32, fourth: FourthTerm) -> Result<HigherPowerFeasibility> {
    let system = CongruenceSystem::tripartite(d, power, fourth);
    let search = search(d, &system, power)?;
    let reduced = system.reduced();
    let dd = d.get();
    let reduced_feasible = (0..(dd as u64).pow(2 * PARTIES as u32))
        .any(|i| reduced.holds(&LhvAssignment::from_index(dd, i).concat()));
    Ok(HigherPowerFeasibility {
        search,
        contradiction_equation: reduced.to_string(),
        reduced_feasible,
    })
}

/// Which inequality an [`LhvReport`] describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Inequality {
    /// Four-term tripartite sum, published LHV bound 3.
    Tripartite,
    /// All-powers sum, published LHV bound `3d/4 − 1` for even d.
    Slk,
}

/// Enumerated LHV maximum beside the published bound and the GHZ value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LhvReport {
    pub d: usize,
    pub inequality: Inequality,
    pub lhv_max: f64,
    pub paper_bound: f64,
    pub quantum_value: f64,
    pub argmax_assignment: LhvAssignment,
    pub feasible: bool,
    pub max_satisfiable: usize,
    /// Real-part maximum; only differs from `lhv_max` for the modulus form.
    pub lhv_real_part_max: f64,
    pub matches_paper_bound: bool,
    pub quantum_exceeds_lhv: bool,
    pub fourth_term: FourthTerm,
}

/// Full comparison for one inequality at dimension `d`.
pub fn lhv_report(d: QuditDim, inequality: Inequality, fourth: FourthTerm, branch: RootBranch) -> Result<LhvReport> {
    let ghz = ghz_state::<f64>(d, 3)?;
    let (best, real, paper_bound, quantum_value) = match inequality {
        Inequality::Tripartite => {
            let w = ghz_tripartite_witness(d, 0.75, fourth, branch)?;
            (
                lhv_max_tripartite(d, fourth)?,
                lhv_max_tripartite_real(d, fourth)?.max_value,
                3.0,
                w.value(&ghz)?,
            )
        }
        Inequality::Slk => {
            let w = slk_witness(d, slk_paper_bound(d), fourth, branch)?;
            let m = lhv_max_slk(d, fourth)?;
            let v = m.max_value;
            (m, v, slk_paper_bound(d), w.value(&ghz)?)
        }
    };
    let hardy = hardy_feasibility(d, fourth)?;
    Ok(LhvReport {
        d: d.get(),
        inequality,
        lhv_max: best.max_value,
        paper_bound,
        quantum_value,
        argmax_assignment: best.argmax,
        feasible: hardy.feasible,
        max_satisfiable: hardy.max_satisfiable,
        lhv_real_part_max: real,
        matches_paper_bound: (best.max_value - paper_bound).abs() < 1e-9,
        quantum_exceeds_lhv: quantum_value > best.max_value + 1e-9,
        fourth_term: fourth,
    })
}
