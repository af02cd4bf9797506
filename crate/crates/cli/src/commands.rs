use std::fs;

use anyhow::anyhow;
use serde::Serialize;

use qwl_core::cv::{self, FockCutoff, SqueezingParameter};
use qwl_core::encodings::{repetition_encoding, uniform_logical, FourthTerm};
use qwl_core::io::StateDoc;
use qwl_core::lhv::{self, Feasibility, HigherPowerFeasibility, Inequality};
use qwl_core::stabilizer::{
    clock_subgroup, homomorphism_check, is_normal, logical_group, physical_group, CheckOutcome,
};
use qwl_core::tables::{self, CRange};
use qwl_core::witness::{
    self, basis_correlation_pair, joint_verdict, CorrelationSet, WitnessReport, WitnessSpec,
};
use qwl_core::{ghz_state, DensityMatrix, Error, Expectation, QuditDim, RootBranch, StateVector};

use crate::output::Report;
use crate::{BranchArg, CvTarget, FourthArg, LhvTarget, Params, StabilizerAction, WitnessTarget};

/// Exit code 2 for bad input, 1 for everything that fails afterwards.
#[derive(Debug)]
pub enum Failure {
    Usage(anyhow::Error),
    Compute(anyhow::Error),
}

impl Failure {
    pub fn usage(msg: impl Into<String>) -> Self {
        Failure::Usage(anyhow!(msg.into()))
    }

    pub fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Compute(_) => 1,
        }
    }

    pub fn message(&self) -> String {
        match self {
            Failure::Usage(e) | Failure::Compute(e) => format!("{e:#}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_)
            | Error::InvalidDimension(_)
            | Error::EnumerationTooLarge { .. }
            | Error::ComplementTooSmall { .. }
            | Error::LengthMismatch { .. } => Failure::Usage(e.into()),
            other => Failure::Compute(other.into()),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Compute(e)
    }
}

type Outcome = Result<Report, Failure>;

fn dim(d: usize) -> Result<QuditDim, Failure> {
    Ok(QuditDim::new(d)?)
}

fn fourth(p: &Params) -> FourthTerm {
    match p.fourth {
        FourthArg::Yyx => FourthTerm::Yyx,
        FourthArg::Yyy => FourthTerm::Yyy,
    }
}

fn branch(p: &Params) -> RootBranch {
    match p.branch {
        BranchArg::Principal => RootBranch::Principal,
        BranchArg::Opposite => RootBranch::Opposite,
    }
}

fn require_d(p: &Params, fixed: usize, what: &str) -> Result<(), Failure> {
    match p.d {
        Some(d) if d != fixed => Err(Failure::usage(format!("{what} is defined for d = {fixed} only"))),
        _ => Ok(()),
    }
}

/// State named on the command line, checked against the witness dims.
fn load_state(p: &Params, dims: &[usize], canonical: StateVector) -> Result<(Box<dyn Expectation<f64>>, String), Failure> {
    let name = p.state.as_deref().unwrap_or("uniform");
    let state: Box<dyn Expectation<f64>> = match name {
        "uniform" | "canonical" => Box::new(canonical),
        "basis0" => Box::new(StateVector::basis(dims, &vec![0; dims.len()])?),
        "mixed" => Box::new(DensityMatrix::maximally_mixed(dims)),
        "ghz" => {
            if dims.iter().any(|&d| d != dims[0]) {
                return Err(Failure::usage("ghz state needs equal local dimensions"));
            }
            Box::new(ghz_state(dim(dims[0])?, dims.len())?)
        }
        path => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::usage(format!("cannot read state file {path}: {e}")))?;
            let doc: StateDoc = serde_json::from_str(&text)
                .map_err(|e| Failure::usage(format!("state file {path} is not a state document: {e}")))?;
            let s = doc.to_state().map_err(|e| Failure::usage(format!("state file {path}: {e}")))?;
            if s.dims() != dims {
                return Err(Failure::usage(format!(
                    "state file {path} has dims {:?}, witness expects {dims:?}",
                    s.dims()
                )));
            }
            Box::new(s)
        }
    };
    Ok((state, name.to_string()))
}

fn evaluate(spec: &WitnessSpec, p: &Params, canonical: StateVector) -> Result<WitnessReport, Failure> {
    let (state, label) = load_state(p, &spec.dims, canonical)?;
    Ok(spec.evaluate(state.as_ref(), &label)?)
}

fn lifted_uniform(d: usize, n: usize) -> Result<StateVector, Failure> {
    Ok(repetition_encoding(dim(d)?, n)?.lift_uniform())
}

#[derive(Serialize)]
struct PairReport {
    reports: Vec<WitnessReport>,
    joint_verdict: bool,
}

#[derive(Serialize)]
struct SeparableReport {
    witness_label: String,
    product_state_max: f64,
    starts: usize,
    seed: u64,
    entangled_state_value: f64,
}

pub fn witness(target: WitnessTarget, p: &Params) -> Outcome {
    let report = match target {
        WitnessTarget::Coherence => {
            let d = dim(p.d.unwrap_or(3))?;
            let spec = witness::coherence_witness(d, p.c.unwrap_or(0.9))?;
            let canonical = StateVector::new(vec![d.get()], uniform_logical(d.get()))?;
            evaluate(&spec, p, canonical)?
        }
        WitnessTarget::TwoQutrit => {
            require_d(p, 3, "two-qutrit witness")?;
            let c = p.c.unwrap_or(0.5);
            let spec = match &p.weights {
                Some(w) => witness::resolution_witness(&witness::two_qutrit_resolution(), w, c)?,
                None => witness::two_qutrit_entanglement_witness(c)?,
            };
            evaluate(&spec, p, lifted_uniform(3, 2)?)?
        }
        WitnessTarget::ThreeQutrit => {
            require_d(p, 3, "three-qutrit witness")?;
            let spec = witness::three_qutrit_entanglement_witness(p.c.unwrap_or(0.5))?;
            evaluate(&spec, p, lifted_uniform(3, 3)?)?
        }
        WitnessTarget::GhzTripartite => {
            let d = dim(p.d.unwrap_or(4))?;
            let spec = witness::ghz_tripartite_witness(d, p.c.unwrap_or(0.75), fourth(p), branch(p))?;
            evaluate(&spec, p, ghz_state(d, 3)?)?
        }
        WitnessTarget::Slk => {
            let d = dim(p.d.unwrap_or(4))?;
            let c = p.c.unwrap_or_else(|| witness::slk_paper_bound(d));
            let spec = witness::slk_witness(d, c, fourth(p), branch(p))?;
            evaluate(&spec, p, ghz_state(d, 3)?)?
        }
        WitnessTarget::BasisPair => return basis_pair(p),
        WitnessTarget::SeparableBound => return separable(p),
    };
    Report::single(report).map_err(Failure::from)
}

fn basis_pair(p: &Params) -> Outcome {
    let c = p.c.unwrap_or(0.5);
    let (set, canonical) = match (p.power, p.n.unwrap_or(2)) {
        (Some(power), _) => {
            let d = dim(p.d.unwrap_or(4))?;
            let set = CorrelationSet::Tripartite {
                d,
                power,
                fourth: fourth(p),
                branch: branch(p),
            };
            (set, ghz_state(d, 3)?)
        }
        (None, n @ (2 | 3)) => {
            require_d(p, 3, "two- and three-qutrit pairs")?;
            let set = if n == 2 {
                CorrelationSet::TwoQutrit
            } else {
                CorrelationSet::ThreeQutrit
            };
            (set, lifted_uniform(3, n)?)
        }
        (None, n) => return Err(Failure::usage(format!("basis-pair needs --n 2 or 3 (or --power), got {n}"))),
    };
    if matches!(set, CorrelationSet::Tripartite { power: 0, .. }) {
        return Err(Failure::usage("--power must be positive"));
    }
    let specs = basis_correlation_pair(set, c)?;
    let reports = specs
        .iter()
        .map(|s| evaluate(s, p, canonical.clone()))
        .collect::<Result<Vec<_>, _>>()?;
    let joint = joint_verdict(&reports);
    Report::with_rows(
        PairReport {
            reports,
            joint_verdict: joint,
        },
        "reports",
    )
    .map_err(Failure::from)
}

fn separable(p: &Params) -> Outcome {
    let n = p.n.unwrap_or(2);
    require_d(p, 3, "separable-bound")?;
    let spec = match n {
        2 => witness::two_qutrit_entanglement_witness(0.5)?,
        3 => witness::three_qutrit_entanglement_witness(0.5)?,
        _ => return Err(Failure::usage(format!("separable-bound needs --n 2 or 3, got {n}"))),
    };
    let starts = p.starts.unwrap_or(10_000);
    let best = witness::separable_bound_estimate(&spec, starts, p.seed)?;
    Report::single(SeparableReport {
        witness_label: spec.label.clone(),
        product_state_max: best,
        starts,
        seed: p.seed,
        entangled_state_value: spec.value(&lifted_uniform(3, n)?)?,
    })
    .map_err(Failure::from)
}

#[derive(Serialize)]
struct HardyReport {
    #[serde(flatten)]
    search: Feasibility,
    paper_claim: Option<&'static str>,
}

#[derive(Serialize)]
struct HigherPowerReport {
    #[serde(flatten)]
    result: HigherPowerFeasibility,
    paper_claim: Option<&'static str>,
}

pub fn lhv(target: LhvTarget, p: &Params) -> Outcome {
    let d = dim(p.d.unwrap_or(4))?;
    match target {
        LhvTarget::MaxTripartite | LhvTarget::MaxSlk => {
            let ineq = if matches!(target, LhvTarget::MaxTripartite) {
                Inequality::Tripartite
            } else {
                Inequality::Slk
            };
            Ok(Report::single(lhv::lhv_report(d, ineq, fourth(p), branch(p))?)?)
        }
        LhvTarget::Hardy => {
            let search = lhv::hardy_feasibility(d, fourth(p))?;
            let paper_claim = d.is_even().then_some("infeasible; at most three of four congruences hold");
            Ok(Report::single(HardyReport { search, paper_claim })?)
        }
        LhvTarget::HigherPower => {
            let power = p.power.unwrap_or(2);
            if power == 0 {
                return Err(Failure::usage("--power must be positive"));
            }
            let result = lhv::higher_power_feasibility(d, power, fourth(p))?;
            let paper_claim = (d.get() == 4 && matches!(power, 2 | 3)).then_some("infeasible");
            Ok(Report::single(HigherPowerReport { result, paper_claim })?)
        }
    }
}

#[derive(Serialize)]
struct TableCsvRow {
    row: usize,
    weights: String,
    c_range: String,
    condition: String,
    correlation: String,
    state: String,
    value: f64,
    c_eval: Option<f64>,
    bound: Option<f64>,
    verdict: bool,
}

#[derive(Serialize)]
struct TableDoc {
    id: u8,
    title: String,
    rows: Vec<TableCsvRow>,
}

pub fn tables(id: u8, p: &Params) -> Outcome {
    let t = tables::table(id, p.c)?;
    if p.format != crate::output::Format::Json {
        let rows = t
            .rows
            .iter()
            .map(|r| TableCsvRow {
                row: r.row,
                weights: r.weights.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(";"),
                c_range: r.c_range.as_ref().map(CRange::text).unwrap_or_default(),
                condition: r.condition.clone(),
                correlation: r.correlation.clone(),
                state: r.state.clone(),
                value: r.value,
                c_eval: r.c_eval,
                bound: r.bound,
                verdict: r.verdict,
            })
            .collect();
        return Ok(Report::with_rows(
            TableDoc {
                id: t.id,
                title: t.title,
                rows,
            },
            "rows",
        )?);
    }
    Ok(Report::with_rows(t, "rows")?)
}

#[derive(Serialize)]
struct LogicalCoherenceReport {
    g: f64,
    n_max: usize,
    logical_coherence_sum: f64,
    duan_simon_sum: f64,
    difference: f64,
    separable_bound: f64,
    below_separable_bound: bool,
}

#[derive(Serialize)]
struct GridReport {
    g: f64,
    n_max: usize,
    max_abs_error: f64,
    points: Vec<cv::VariancePoint>,
}

pub fn cv(target: CvTarget, p: &Params) -> Outcome {
    let g = SqueezingParameter::new(p.g.unwrap_or(0.5))?;
    let cutoff = match p.nmax {
        Some(n) => FockCutoff::new(n)?,
        None => FockCutoff::default(),
    };
    match target {
        CvTarget::DuanSimon => Ok(Report::single(cv::cv_report(g, cutoff)?)?),
        CvTarget::VarianceGrid => {
            let points = cv::variance_grid(g, cutoff, p.n.unwrap_or(5))?;
            let max_abs_error = points.iter().map(|x| x.abs_error).fold(0.0, f64::max);
            Ok(Report::with_rows(
                GridReport {
                    g: g.get(),
                    n_max: cutoff.n_max(),
                    max_abs_error,
                    points,
                },
                "points",
            )?)
        }
        CvTarget::LogicalCoherence => {
            let l = cv::logical_coherence_sum(g, cutoff)?;
            let ds = cv::duan_simon_sum(g, cutoff)?;
            Ok(Report::single(LogicalCoherenceReport {
                g: g.get(),
                n_max: cutoff.n_max(),
                logical_coherence_sum: l,
                duan_simon_sum: ds.sum,
                difference: (l - ds.sum).abs(),
                separable_bound: ds.separable_bound,
                below_separable_bound: l < ds.separable_bound,
            })?)
        }
    }
}

/// Largest `d^N` the stabilizer command will build.
const MAX_GROUP_ORDER: usize = 4096;

#[derive(Serialize)]
struct StabilizerReport {
    d: usize,
    n_sites: usize,
    group_order: usize,
    subgroup_order: usize,
    exhaustive: bool,
    corrupted_labels: bool,
    stabilizes_ghz: bool,
    max_stabilizer_residual: f64,
    subgroup_normal: bool,
    checks: Vec<CheckOutcome>,
    all_passed: bool,
}

pub fn stabilizer(action: StabilizerAction, p: &Params) -> Outcome {
    let d = dim(p.d.unwrap_or(3))?;
    let n = p.n.unwrap_or(2);
    if n < 2 {
        return Err(Failure::usage("stabilizer groups need --n of at least 2"));
    }
    let order = (d.get() as u128).pow(n as u32);
    if order > MAX_GROUP_ORDER as u128 {
        return Err(Failure::usage(format!("group order d^n = {order} exceeds {MAX_GROUP_ORDER}")));
    }
    let mut grp = physical_group(d, n)?;
    if matches!(action, StabilizerAction::Export) {
        return Ok(Report::with_rows(grp.to_doc(), "elements")?);
    }
    let h = clock_subgroup(d, n)?;
    if p.corrupt {
        // first element of coset 0 against first element of coset 1
        grp = grp.with_swapped_labels(0, h.len());
    }
    let residual = grp.max_stabilizer_residual(&ghz_state(d, n)?)?;
    let normal = is_normal(&h, &grp);
    let hom = homomorphism_check(&grp, &logical_group(d))?;
    let checks: Vec<CheckOutcome> = hom.checks().into_iter().cloned().collect();
    let stabilizes = residual < 1e-12;
    let all_passed = stabilizes && normal && hom.all_passed();
    Ok(Report::with_rows(
        StabilizerReport {
            d: d.get(),
            n_sites: n,
            group_order: grp.len(),
            subgroup_order: h.len(),
            exhaustive: hom.exhaustive,
            corrupted_labels: p.corrupt,
            stabilizes_ghz: stabilizes,
            max_stabilizer_residual: residual,
            subgroup_normal: normal,
            checks,
            all_passed,
        },
        "checks",
    )?)
}
