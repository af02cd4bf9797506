//! The five correlation tables as executable records: every row carries its
//! weights, admissible range of `c`, condition and correlation type, and is
//! evaluated afresh on its canonical state.

use nalgebra::DMatrix;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::encodings::{
    repetition_encoding, singlet_encoding, uniform_logical, w_type_encoding, FourthTerm, LogicalEncoding,
};
use crate::error::{invalid, Result};
use crate::qudit::{ghz_state, w_state, QuditDim, RootBranch};
use crate::witness::{
    basis_correlation_pair, ghz_tripartite_witness, slk_paper_bound, slk_witness, three_qutrit_entanglement_witness,
    two_qutrit_entanglement_witness, CorrelationSet, WitnessSpec,
};
use crate::{DensityMatrix, StateVector, C64};

/// Admissible values of `c` for a row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CRange {
    /// `lo ≤ c < hi`
    HalfOpen { lo: f64, hi: f64 },
    Fixed { value: f64 },
}

impl CRange {
    pub fn contains(&self, c: f64) -> bool {
        match *self {
            CRange::HalfOpen { lo, hi } => (lo..hi).contains(&c),
            CRange::Fixed { value } => c == value,
        }
    }

    /// `c` used for the verdict: the override when it is admissible, else the
    /// midpoint of a half-open range or the fixed value.
    pub fn pick(&self, c: Option<f64>) -> Result<f64> {
        match (self, c) {
            (CRange::Fixed { value }, _) => Ok(*value),
            (r, Some(c)) if r.contains(c) => Ok(c),
            (r, Some(c)) => Err(invalid(format!("c = {c} outside {}", r.text()))),
            (CRange::HalfOpen { lo, hi }, None) => Ok(0.5 * (lo + hi)),
        }
    }

    pub fn text(&self) -> String {
        match *self {
            CRange::HalfOpen { lo, hi } => format!("{lo} <= c < {hi}"),
            CRange::Fixed { value } => format!("c = {value}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub row: usize,
    pub weights: Vec<f64>,
    pub c_range: Option<CRange>,
    pub condition: String,
    pub correlation: String,
    pub state: String,
    /// Witness value, or for the encoding table the fidelity between the
    /// lifted logical state and the independently built physical state.
    pub value: f64,
    pub c_eval: Option<f64>,
    pub bound: Option<f64>,
    pub verdict: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub id: u8,
    pub title: String,
    pub rows: Vec<TableRow>,
}

/// Row fields that do not depend on evaluation, for structural comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RowStructure {
    pub weights: Vec<f64>,
    pub c_range: Option<CRange>,
    pub condition: String,
    pub correlation: String,
}

impl Table {
    pub fn structure(&self) -> Vec<RowStructure> {
        self.rows
            .iter()
            .map(|r| RowStructure {
                weights: r.weights.clone(),
                c_range: r.c_range.clone(),
                condition: r.condition.clone(),
                correlation: r.correlation.clone(),
            })
            .collect()
    }
}

pub const TABLE_IDS: [u8; 5] = [1, 2, 3, 4, 5];

/// Builds and evaluates table `id`. `c` overrides the evaluation point of
/// every row with a range (it must lie inside that range).
pub fn table(id: u8, c: Option<f64>) -> Result<Table> {
    match id {
        1 => encoding_table(),
        2 => pair_table(2, c),
        3 => pair_table(3, c),
        4 => tripartite_table(c),
        5 => slk_table(c),
        _ => Err(invalid(format!("unknown table id {id}; expected 1-5"))),
    }
}

const HALF_TO_ONE: CRange = CRange::HalfOpen { lo: 0.5, hi: 1.0 };
const ZERO_TO_ONE: CRange = CRange::HalfOpen { lo: 0.0, hi: 1.0 };

fn dim(d: usize) -> QuditDim {
    QuditDim::new(d).expect("table dimensions are valid")
}

#[allow(clippy::too_many_arguments)]
fn witness_row(
    row: usize,
    weights: Vec<f64>,
    range: CRange,
    c: Option<f64>,
    build: impl Fn(f64) -> Result<WitnessSpec>,
    condition: &str,
    correlation: &str,
    state: &StateVector,
    state_label: &str,
) -> Result<TableRow> {
    let c_eval = range.pick(c)?;
    let spec = build(c_eval)?;
    let r = spec.evaluate(state, state_label)?;
    Ok(TableRow {
        row,
        weights,
        c_range: Some(range),
        condition: condition.into(),
        correlation: correlation.into(),
        state: state_label.into(),
        value: r.value,
        c_eval: Some(c_eval),
        bound: Some(r.bound),
        verdict: r.violated,
    })
}

fn unit_weights(k: usize, n: usize) -> Vec<f64> {
    let mut w = vec![0.0; n];
    w[k] = 1.0;
    w
}

fn pair_table(id: u8, c: Option<f64>) -> Result<Table> {
    type Builder = fn(f64) -> Result<WitnessSpec>;
    let (n_sites, set, n_weights, entangled, words, title): (usize, _, usize, Builder, _, _) =
        if id == 2 {
            (
                2,
                CorrelationSet::TwoQutrit,
                3,
                two_qutrit_entanglement_witness,
                ["X1X2", "(X1Z1)(X2Z2^2)"],
                "two-qutrit conditions from the logical coherence witness",
            )
        } else {
            (
                3,
                CorrelationSet::ThreeQutrit,
                2,
                three_qutrit_entanglement_witness,
                ["X1X2X3", "(X1Z1)(X2Z2)(X3Z3)"],
                "three-qutrit conditions from the logical coherence witness",
            )
        };
    let state = repetition_encoding(dim(3), n_sites)?.lift_uniform();
    let label = format!("lifted uniform logical qutrit, {n_sites} qutrits");
    let mut half = vec![0.0; n_weights];
    half[0] = 0.5;
    half[1] = 0.5;
    let mut rows = vec![witness_row(
        1,
        half,
        HALF_TO_ONE,
        c,
        entangled,
        &format!("|<{} + {}>| > 2c", words[0], words[1]),
        "Entanglement",
        &state,
        &label,
    )?];
    for (k, word) in words.iter().enumerate() {
        rows.push(witness_row(
            k + 2,
            unit_weights(k, n_weights),
            ZERO_TO_ONE,
            c,
            |c| Ok(basis_correlation_pair(set, c)?.remove(k)),
            &format!("|<{word}>| > c"),
            "Correlation in bases B1 and B2",
            &state,
            &label,
        )?);
    }
    Ok(Table {
        id,
        title: title.into(),
        rows,
    })
}

fn tripartite_table(c: Option<f64>) -> Result<Table> {
    let d = dim(4);
    let ghz = ghz_state(d, 3)?;
    let label = "three-ququart GHZ";
    let (fourth, branch) = (FourthTerm::Yyx, RootBranch::Principal);
    let mut rows = vec![witness_row(
        1,
        vec![0.25; 4],
        CRange::Fixed { value: 0.75 },
        c,
        |c| ghz_tripartite_witness(d, c, fourth, branch),
        "|<X1X2X3 + wX1Y2Y3 + wY1X2Y3 + wY1Y2X3>| > 4c",
        "Nonlocality",
        &ghz,
        label,
    )?];
    let set = CorrelationSet::Tripartite {
        d,
        power: 1,
        fourth,
        branch,
    };
    let specs = basis_correlation_pair(set, 0.5)?;
    for (k, s) in specs.iter().enumerate() {
        let name = s.terms[0].label.clone();
        rows.push(witness_row(
            k + 2,
            unit_weights(k, 4),
            ZERO_TO_ONE,
            c,
            |c| Ok(basis_correlation_pair(set, c)?.remove(k)),
            &format!("|<{name}>| > c"),
            "Correlation in bases B1, B2, B3 and B4",
            &ghz,
            label,
        )?);
    }
    Ok(Table {
        id: 4,
        title: "tripartite X/Y conditions at d = 4".into(),
        rows,
    })
}

fn slk_table(c: Option<f64>) -> Result<Table> {
    let d = dim(4);
    let ghz = ghz_state(d, 3)?;
    let label = "three-ququart GHZ";
    let (fourth, branch) = (FourthTerm::Yyx, RootBranch::Principal);
    let mut rows = vec![witness_row(
        1,
        vec![0.25; 4],
        CRange::Fixed { value: slk_paper_bound(d) },
        c,
        |c| slk_witness(d, c, fourth, branch),
        "(1/4) sum_n <(X1X2X3)^n + (wX1Y2Y3)^n + (wY1X2Y3)^n + (wY1Y2X3)^n> + c.c. > c",
        "Nonlocality",
        &ghz,
        label,
    )?];
    // each single-term row must hold for every power i = 1..d-1
    let names = ["X1X2X3", "wX1Y2Y3", "wY1X2Y3", "wY1Y2X3"];
    for (k, name) in names.iter().enumerate() {
        let c_eval = ZERO_TO_ONE.pick(c)?;
        let mut worst = f64::INFINITY;
        for i in 1..d.get() as u32 {
            let set = CorrelationSet::Tripartite {
                d,
                power: i,
                fourth,
                branch,
            };
            let spec = basis_correlation_pair(set, c_eval)?.remove(k);
            worst = worst.min(spec.value(&ghz)?);
        }
        rows.push(TableRow {
            row: k + 2,
            weights: unit_weights(k, 4),
            c_range: Some(ZERO_TO_ONE),
            condition: format!("|<({name})^i>| > c for i = 1..d-1"),
            correlation: "Correlation in bases B1(i), B2(i), B3(i) and B4(i)".into(),
            state: label.into(),
            value: worst,
            c_eval: Some(c_eval),
            bound: Some(c_eval),
            verdict: worst > c_eval,
        });
    }
    Ok(Table {
        id: 5,
        title: "all-powers tripartite conditions at d = 4".into(),
        rows,
    })
}

fn purity(rho: &DensityMatrix) -> f64 {
    let m = rho.matrix();
    (m * m).trace().re
}

fn reduced_purity(s: &StateVector, keep: &[usize]) -> Result<f64> {
    Ok(purity(&s.to_density().partial_trace(keep)?))
}

/// Every bipartition leaves a mixed reduced state.
fn genuinely_entangled(s: &StateVector) -> Result<bool> {
    let n = s.dims().len();
    for mask in 1..(1u32 << (n - 1)) {
        let keep: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        if reduced_purity(s, &keep)? > 1.0 - 1e-9 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Two-qubit state with a partial transpose of negative determinant.
fn two_qubit_entangled(rho: &DensityMatrix) -> bool {
    let m = rho.matrix();
    let pt = DMatrix::<C64>::from_fn(4, 4, |r, c| {
        let (a, b) = (r / 2, r % 2);
        let (a2, b2) = (c / 2, c % 2);
        m[(a * 2 + b2, a2 * 2 + b)]
    });
    pt.determinant().re < -1e-12
}

fn is_diagonal(rho: &DensityMatrix) -> bool {
    let m = rho.matrix();
    (0..m.rows()).all(|r| (0..m.cols()).all(|c| r == c || m[(r, c)].norm() < 1e-12))
}

fn superposition(dims: &[usize], terms: &[(f64, Vec<usize>)]) -> Result<StateVector> {
    let total: usize = dims.iter().product();
    let mut amps = vec![C64::zero(); total];
    for (c, levels) in terms {
        let b = StateVector::basis(dims, levels)?;
        for (a, x) in amps.iter_mut().zip(b.amplitudes()) {
            *a += x * c;
        }
    }
    StateVector::normalized(dims.to_vec(), amps)
}

fn encoding_row(
    row: usize,
    condition: &str,
    correlation: &str,
    state: &str,
    lifted: &StateVector,
    expected: &StateVector,
    verdict: bool,
) -> TableRow {
    TableRow {
        row,
        weights: vec![],
        c_range: None,
        condition: condition.into(),
        correlation: correlation.into(),
        state: state.into(),
        value: lifted.fidelity(expected),
        c_eval: None,
        bound: None,
        verdict,
    }
}

fn encoding_table() -> Result<Table> {
    let mut rows = Vec::new();

    let (d, n) = (3, 4);
    let enc = repetition_encoding(dim(d), n)?;
    let lifted = enc.lift_uniform();
    let ghz = superposition(&[d; 4], &(0..d).map(|i| (1.0, vec![i; n])).collect::<Vec<_>>())?;
    rows.push(encoding_row(
        1,
        "|i>_L = |i>^(xN)",
        "Genuine N-party entanglement",
        "uniform logical qudit, d = 3, N = 4",
        &lifted,
        &ghz,
        genuinely_entangled(&lifted)?,
    ));

    let (lam, mu): ([f64; 3], [f64; 3]) = ([0.5, 0.3, 0.2], [0.6, 0.4, 0.0]);
    let pair = repetition_encoding(dim(3), 2)?.product(&repetition_encoding(dim(3), 2)?);
    let logical: Vec<C64> = lam
        .iter()
        .flat_map(|l| mu.iter().map(move |m| C64::from((l * m).sqrt())))
        .collect();
    let lifted = pair.lift_state(&logical)?;
    let left = superposition(&[3, 3], &lam.iter().enumerate().map(|(i, l)| (l.sqrt(), vec![i, i])).collect::<Vec<_>>())?;
    let right = superposition(&[3, 3], &mu.iter().enumerate().map(|(j, m)| (m.sqrt(), vec![j, j])).collect::<Vec<_>>())?;
    let expected = left.tensor(&right);
    let biseparable = reduced_purity(&lifted, &[0, 1])? > 1.0 - 1e-9
        && reduced_purity(&lifted, &[0])? < 1.0 - 1e-9
        && reduced_purity(&lifted, &[2])? < 1.0 - 1e-9;
    rows.push(encoding_row(
        2,
        "|i>_L = |i>^(xN), |j>_L = |j>^(xM)",
        "Biseparable state",
        "product of two logical qutrits, N = M = 2",
        &lifted,
        &expected,
        biseparable,
    ));

    let lifted = repetition_encoding(dim(3), 3)?.lift_uniform();
    let ghz3 = ghz_state(dim(3), 3)?;
    let ghz_like = genuinely_entangled(&lifted)? && is_diagonal(&lifted.to_density().partial_trace(&[0, 1])?);
    rows.push(encoding_row(
        3,
        "|i>_L = |iii>",
        "Three-qutrit GHZ entanglement",
        "uniform logical qutrit",
        &lifted,
        &ghz3,
        ghz_like,
    ));

    let enc: LogicalEncoding = w_type_encoding();
    let lifted = enc.lift_state(&uniform_logical(3))?;
    let w = w_state(3)?;
    let w_like = genuinely_entangled(&lifted)? && two_qubit_entangled(&lifted.to_density().partial_trace(&[0, 1])?);
    rows.push(encoding_row(
        4,
        "|0>_L = |001>, |1>_L = |010>, |2>_L = |100>",
        "Three-qubit W state",
        "uniform logical qutrit",
        &lifted,
        &w,
        w_like,
    ));

    let enc = singlet_encoding().product(&singlet_encoding());
    let lifted = enc.lift_state(&[C64::from(1.0)])?;
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let singlet = superposition(&[2, 2], &[(r, vec![0, 1]), (-r, vec![1, 0])])?;
    let expected = singlet.tensor(&singlet);
    let biseparable = reduced_purity(&lifted, &[0, 1])? > 1.0 - 1e-9 && reduced_purity(&lifted, &[0])? < 1.0 - 1e-9;
    rows.push(encoding_row(
        5,
        "|0>_L = (|01> - |10>)/sqrt(2)",
        "Biseparable",
        "|00>_L",
        &lifted,
        &expected,
        biseparable,
    ));

    Ok(Table {
        id: 1,
        title: "logical coherence and physical correlations under different encodings".into(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_counts() {
        for (id, n) in [(1, 5), (2, 3), (3, 3), (4, 5), (5, 5)] {
            assert_eq!(table(id, None).unwrap().rows.len(), n, "table {id}");
        }
        assert!(table(6, None).is_err());
    }

    #[test]
    fn every_row_holds_on_its_canonical_state() {
        for id in TABLE_IDS {
            for r in table(id, None).unwrap().rows {
                assert!(r.verdict, "table {id} row {}: {r:?}", r.row);
            }
        }
    }

    #[test]
    fn encoding_rows_reproduce_physical_states() {
        for r in table(1, None).unwrap().rows {
            assert!((r.value - 1.0).abs() < 1e-12, "{r:?}");
        }
    }

    #[test]
    fn witness_values() {
        let t2 = table(2, None).unwrap();
        assert!((t2.rows[0].value - 2.0).abs() < 1e-12);
        assert_eq!(t2.rows[0].weights, vec![0.5, 0.5, 0.0]);
        assert_eq!(t2.rows[0].c_eval, Some(0.75));
        let t4 = table(4, None).unwrap();
        assert!((t4.rows[0].value - 4.0).abs() < 1e-10);
        assert_eq!(t4.rows[0].bound, Some(3.0));
        assert_eq!(t4.rows[4].weights, vec![0.0, 0.0, 0.0, 1.0]);
        let t5 = table(5, None).unwrap();
        assert!((t5.rows[0].value - 6.0).abs() < 1e-10);
        assert_eq!(t5.rows[0].bound, Some(2.0));
    }

    #[test]
    fn c_override() {
        let t = table(2, Some(0.99)).unwrap();
        assert_eq!(t.rows[0].c_eval, Some(0.99));
        assert!(table(2, Some(0.2)).is_err());
        let t4 = table(4, Some(0.9)).unwrap();
        assert_eq!(t4.rows[0].c_eval, Some(0.75));
    }

    #[test]
    fn detectors_reject_counterexamples() {
        let product = StateVector::basis(&[2, 2, 2], &[0, 0, 1]).unwrap();
        assert!(!genuinely_entangled(&product).unwrap());
        let ghz2 = ghz_state::<f64>(dim(2), 3).unwrap();
        assert!(!two_qubit_entangled(&ghz2.to_density().partial_trace(&[0, 1]).unwrap()));
    }
}
