//! Stabilizer groups of the logical uniform state and of the physical GHZ
//! state, their coset structure over the pure-clock subgroup, and the
//! homomorphism onto the logical group.
//!
//! Membership is phase-insensitive: words are compared by their X and Z
//! exponent vectors only.

use std::collections::{BTreeSet, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::qudit::QuditDim;
use crate::tensor::{multi_index, norm_sqr};
use crate::weyl::WeylWord;
use crate::StateVector;

/// Above this many elements, pairwise checks are sampled.
pub const EXHAUSTIVE_ELEMENT_CAP: usize = 625;
/// Number of sampled pairs for large groups.
pub const SAMPLED_PAIRS: usize = 100_000;
const MAX_LISTED_VIOLATIONS: usize = 10;

type Key = (Vec<u32>, Vec<u32>);

/// Finite group of Weyl words, each tagged with the `k` of its coset `(X₁…X_N)^k H_N`.
#[derive(Clone, Debug)]
pub struct StabilizerGroup {
    d: QuditDim,
    n_sites: usize,
    elements: Vec<WeylWord>,
    coset_labels: Vec<usize>,
    index: HashMap<Key, usize>,
}

impl StabilizerGroup {
    fn from_parts(d: QuditDim, n_sites: usize, elements: Vec<WeylWord>, coset_labels: Vec<usize>) -> Self {
        let index = elements
            .iter()
            .enumerate()
            .map(|(i, w)| (w.support_key(), i))
            .collect();
        Self {
            d,
            n_sites,
            elements,
            coset_labels,
            index,
        }
    }

    pub fn dim(&self) -> QuditDim {
        self.d
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn elements(&self) -> &[WeylWord] {
        &self.elements
    }

    pub fn coset_labels(&self) -> &[usize] {
        &self.coset_labels
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, w: &WeylWord) -> bool {
        self.index.contains_key(&w.support_key())
    }

    pub fn position(&self, w: &WeylWord) -> Option<usize> {
        self.index.get(&w.support_key()).copied()
    }

    pub fn label_of(&self, w: &WeylWord) -> Option<usize> {
        self.position(w).map(|i| self.coset_labels[i])
    }

    /// Elements carrying coset label 0.
    pub fn kernel(&self) -> Vec<&WeylWord> {
        self.elements
            .iter()
            .zip(&self.coset_labels)
            .filter(|(_, &k)| k == 0)
            .map(|(w, _)| w)
            .collect()
    }

    /// Copy with the coset labels of elements `a` and `b` exchanged.
    pub fn with_swapped_labels(&self, a: usize, b: usize) -> Self {
        let mut g = self.clone();
        g.coset_labels.swap(a, b);
        g
    }

    /// Closure under multiplication, checked phase-insensitively.
    pub fn is_closed(&self) -> bool {
        self.pairs(0)
            .all(|(i, j)| self.contains(&(&self.elements[i] * &self.elements[j])))
    }

    /// Largest `‖g|ψ⟩ − |ψ⟩‖` over all elements.
    pub fn max_stabilizer_residual(&self, state: &StateVector) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for w in &self.elements {
            let out = w.apply(state.amplitudes())?;
            let diff: Vec<_> = out.iter().zip(state.amplitudes()).map(|(a, b)| a - b).collect();
            worst = worst.max(norm_sqr(&diff).sqrt());
        }
        Ok(worst)
    }

    /// Element pairs for pairwise checks: all of them for groups within
    /// [`EXHAUSTIVE_ELEMENT_CAP`], otherwise a seeded sample.
    fn pairs(&self, seed: u64) -> Box<dyn Iterator<Item = (usize, usize)> + '_> {
        let n = self.elements.len();
        if n <= EXHAUSTIVE_ELEMENT_CAP {
            Box::new((0..n).flat_map(move |i| (0..n).map(move |j| (i, j))))
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Box::new((0..SAMPLED_PAIRS).map(move |_| (rng.gen_range(0..n), rng.gen_range(0..n))))
        }
    }

    pub fn is_exhaustive(&self) -> bool {
        self.elements.len() <= EXHAUSTIVE_ELEMENT_CAP
    }

    pub fn to_doc(&self) -> GroupDoc {
        GroupDoc {
            d: self.d.get(),
            n_sites: self.n_sites,
            order: self.elements.len(),
            elements: self
                .elements
                .iter()
                .zip(&self.coset_labels)
                .map(|(w, &k)| GroupElementDoc {
                    word: w.to_string(),
                    half_phase: w.half_phase(),
                    x: w.x_exps().to_vec(),
                    z: w.z_exps().to_vec(),
                    coset_label: k,
                })
                .collect(),
        }
    }
}

/// JSON export of a group.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupDoc {
    pub d: usize,
    pub n_sites: usize,
    pub order: usize,
    pub elements: Vec<GroupElementDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupElementDoc {
    pub word: String,
    pub half_phase: u32,
    pub x: Vec<u32>,
    pub z: Vec<u32>,
    pub coset_label: usize,
}

/// `{I, X_L, …, X_L^{d−1}}` on a single logical qudit.
pub fn logical_group(d: QuditDim) -> StabilizerGroup {
    let elements = (0..d.get() as u32).map(|k| WeylWord::uniform_shift(d, 1, k)).collect();
    StabilizerGroup::from_parts(d, 1, elements, (0..d.get()).collect())
}

/// `H_N`: clock words `Z^{x_1}…Z^{x_N}` with `Σ x_i ≡ 0 (mod d)`.
pub fn clock_subgroup(d: QuditDim, n_sites: usize) -> Result<StabilizerGroup> {
    if n_sites < 1 {
        return Err(invalid("need at least one site"));
    }
    let elements = clock_exponents(d, n_sites)
        .into_iter()
        .map(|z| WeylWord::clock(d, &z))
        .collect::<Vec<_>>();
    let labels = vec![0; elements.len()];
    Ok(StabilizerGroup::from_parts(d, n_sites, elements, labels))
}

fn clock_exponents(d: QuditDim, n_sites: usize) -> Vec<Vec<u32>> {
    let m = d.get();
    let free = vec![m; n_sites - 1];
    let count: usize = free.iter().product();
    (0..count)
        .map(|idx| {
            let mut z: Vec<u32> = multi_index(&free, idx).into_iter().map(|e| e as u32).collect();
            let s: u32 = z.iter().sum();
            z.push((m as u32 - s % m as u32) % m as u32);
            z
        })
        .collect()
}

/// `G_N = ∪_k (X₁…X_N)^k H_N`, the stabilizer group of the `N`-party GHZ state.
pub fn physical_group(d: QuditDim, n_sites: usize) -> Result<StabilizerGroup> {
    if n_sites < 2 {
        return Err(invalid(format!("physical group needs at least 2 sites, got {n_sites}")));
    }
    let h = clock_subgroup(d, n_sites)?;
    let mut elements = Vec::with_capacity(d.get() * h.len());
    let mut labels = Vec::with_capacity(elements.capacity());
    for k in 0..d.get() {
        let shift = WeylWord::uniform_shift(d, n_sites, k as u32);
        for z in h.elements() {
            elements.push(&shift * z);
            labels.push(k);
        }
    }
    Ok(StabilizerGroup::from_parts(d, n_sites, elements, labels))
}

/// `g h g⁻¹ ∈ sub` for all `g ∈ grp`, `h ∈ sub` (sampled for large groups).
/// Returns `false` when `sub` is not contained in `grp`.
pub fn is_normal(sub: &StabilizerGroup, grp: &StabilizerGroup) -> bool {
    if !sub.elements().iter().all(|h| grp.contains(h)) {
        return false;
    }
    let total = sub.len() * grp.len();
    if total <= EXHAUSTIVE_ELEMENT_CAP * EXHAUSTIVE_ELEMENT_CAP {
        grp.elements().iter().all(|g| {
            sub.elements()
                .iter()
                .all(|h| g.conjugate(h).map(|c| sub.contains(&c)).unwrap_or(false))
        })
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        (0..SAMPLED_PAIRS).all(|_| {
            let g = &grp.elements()[rng.gen_range(0..grp.len())];
            let h = &sub.elements()[rng.gen_range(0..sub.len())];
            g.conjugate(h).map(|c| sub.contains(&c)).unwrap_or(false)
        })
    }
}

/// Outcome of one homomorphism check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub checked: usize,
    pub violations: Vec<String>,
}

impl CheckOutcome {
    fn new(name: &str) -> Self {
        Self {
            name: name.to_string(),
            passed: true,
            checked: 0,
            violations: Vec::new(),
        }
    }

    fn record(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.passed = false;
            if self.violations.len() < MAX_LISTED_VIOLATIONS {
                self.violations.push(msg());
            }
        }
    }
}

/// Results of the four checks on the coset-label map `G_N → G_L`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomomorphismReport {
    pub d: usize,
    pub n_sites: usize,
    pub exhaustive: bool,
    pub well_defined: CheckOutcome,
    pub additive: CheckOutcome,
    pub kernel: CheckOutcome,
    pub image: CheckOutcome,
}

impl HomomorphismReport {
    pub fn all_passed(&self) -> bool {
        self.checks().iter().all(|c| c.passed)
    }

    pub fn checks(&self) -> [&CheckOutcome; 4] {
        [&self.well_defined, &self.additive, &self.kernel, &self.image]
    }
}

/// Checks that the coset labels of `grp` define a homomorphism onto `logical`:
/// (a) labels are constant on cosets of `H_N`, (b) labels add under
/// multiplication, (c) the kernel is exactly `H_N`, (d) every logical power is hit.
pub fn homomorphism_check(grp: &StabilizerGroup, logical: &StabilizerGroup) -> Result<HomomorphismReport> {
    let d = grp.dim().get();
    let h = clock_subgroup(grp.dim(), grp.n_sites())?;
    let in_h = |w: &WeylWord| h.contains(w);

    let mut well_defined = CheckOutcome::new("well-defined");
    let mut additive = CheckOutcome::new("additive");
    for (i, j) in grp.pairs(0x0ddba11) {
        let (a, b) = (&grp.elements()[i], &grp.elements()[j]);
        let (la, lb) = (grp.coset_labels()[i], grp.coset_labels()[j]);
        let same_coset = in_h(&(&a.inverse() * b));
        well_defined.record(!same_coset || la == lb, || {
            format!("{a} and {b} share a coset but carry labels {la} and {lb}")
        });
        let prod = a * b;
        match grp.label_of(&prod) {
            Some(lp) => additive.record(lp == (la + lb) % d, || {
                format!("label({a}·{b}) = {lp}, expected {la}+{lb} mod {d}")
            }),
            None => additive.record(false, || format!("{a}·{b} = {prod} is not in the group")),
        }
    }

    let mut kernel = CheckOutcome::new("kernel");
    let kernel_keys: BTreeSet<Key> = grp.kernel().iter().map(|w| w.support_key()).collect();
    let h_keys: BTreeSet<Key> = h.elements().iter().map(|w| w.support_key()).collect();
    for w in h.elements() {
        kernel.record(kernel_keys.contains(&w.support_key()), || {
            format!("{w} ∈ H_N is not mapped to the identity")
        });
    }
    for w in grp.kernel() {
        kernel.record(h_keys.contains(&w.support_key()), || {
            format!("{w} is mapped to the identity but is not in H_N")
        });
    }

    let mut image = CheckOutcome::new("image");
    let hit: BTreeSet<usize> = grp.coset_labels().iter().copied().collect();
    for k in 0..logical.len() {
        image.record(hit.contains(&k), || format!("X_L^{k} is not in the image"));
    }
    image.record(hit.iter().all(|&k| k < logical.len()), || {
        format!("labels {hit:?} exceed the logical group order {}", logical.len())
    });

    Ok(HomomorphismReport {
        d,
        n_sites: grp.n_sites(),
        exhaustive: grp.is_exhaustive(),
        well_defined,
        additive,
        kernel,
        image,
    })
}
