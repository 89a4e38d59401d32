//! PMC and MM* diagnosis: test sets, syndromes, distinguishability of fault
//! sets and g-extra diagnosability.
//!
//! Under PMC every ordered adjacent pair `(u, v)` is a test: a fault-free `u`
//! reports 1 exactly when `v` is faulty. Under MM* every vertex `w` compares
//! each unordered pair of its neighbors: a fault-free `w` reports 0 exactly
//! when both are fault-free. Outcomes of faulty testers are unconstrained.

mod search;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Refusal, Result};
use crate::structure::MaskCube;
use crate::topology::CrossedCube;
use crate::vertex_set::VertexSet;

pub use search::{
    best_witness_pair, extra_diagnosability, is_g_extra_t_diagnosable, structural_lower_bound, witness_pairs,
    Diagnosability, DiagnosabilityVerdict, LowerBound,
};

/// Default cap on fault-set pairs examined by exhaustive searches.
pub const DEFAULT_PAIR_BUDGET: u64 = 2_000_000_000;

/// Largest dimension for which whole syndromes are materialized.
pub const MAX_SYNDROME_DIMENSION: u32 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DiagnosisModel {
    #[serde(rename = "pmc")]
    Pmc,
    #[serde(rename = "mm")]
    MmStar,
}

impl fmt::Display for DiagnosisModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DiagnosisModel::Pmc => "pmc",
            DiagnosisModel::MmStar => "mm",
        })
    }
}

impl FromStr for DiagnosisModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pmc" => Ok(DiagnosisModel::Pmc),
            "mm" | "mm*" | "mmstar" => Ok(DiagnosisModel::MmStar),
            other => Err(Error::InvalidArgument(format!("unknown model {other:?}"))),
        }
    }
}

/// One test (PMC) or comparison (MM*). Comparisons store `first < second`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Test {
    Pmc { tester: u32, tested: u32 },
    Mm { comparator: u32, first: u32, second: u32 },
}

impl Test {
    /// The vertex whose fault status decides whether the outcome is forced.
    pub fn examiner(self) -> u32 {
        match self {
            Test::Pmc { tester, .. } => tester,
            Test::Mm { comparator, .. } => comparator,
        }
    }

    /// Outcome a fault-free examiner must report under `faults`, or `None`
    /// when the examiner is faulty.
    pub fn forced_outcome(self, faults: &VertexSet) -> Option<bool> {
        if faults.contains_label(self.examiner()) {
            return None;
        }
        Some(match self {
            Test::Pmc { tested, .. } => faults.contains_label(tested),
            Test::Mm { first, second, .. } => faults.contains_label(first) || faults.contains_label(second),
        })
    }

    fn stream_id(self) -> u64 {
        match self {
            Test::Pmc { tester, tested } => (tester as u64) << 20 | tested as u64,
            Test::Mm { comparator, first, second } => {
                1 << 62 | (comparator as u64) << 40 | (first as u64) << 20 | second as u64
            }
        }
    }
}

/// Every test of `model` on `cube`, in increasing order.
pub fn tests(cube: &CrossedCube, model: DiagnosisModel) -> Vec<Test> {
    let mut out = Vec::new();
    for w in 0..cube.vertex_count() as u32 {
        let mut nbrs: Vec<u32> = cube.neighbor_labels(w).collect();
        nbrs.sort_unstable();
        match model {
            DiagnosisModel::Pmc => {
                out.extend(nbrs.iter().map(|&v| Test::Pmc { tester: w, tested: v }));
            }
            DiagnosisModel::MmStar => {
                for (i, &a) in nbrs.iter().enumerate() {
                    for &b in &nbrs[i + 1..] {
                        out.push(Test::Mm { comparator: w, first: a, second: b });
                    }
                }
            }
        }
    }
    out
}

fn test_count(cube: &CrossedCube, model: DiagnosisModel) -> u128 {
    let n = cube.n() as u128;
    let per_vertex = match model {
        DiagnosisModel::Pmc => n,
        DiagnosisModel::MmStar => n * n.saturating_sub(1) / 2,
    };
    per_vertex * cube.vertex_count() as u128
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Syndrome {
    pub model: DiagnosisModel,
    pub outcomes: BTreeMap<Test, bool>,
}

impl Syndrome {
    pub fn ones(&self) -> usize {
        self.outcomes.values().filter(|&&b| b).count()
    }
}

fn check_syndrome_size(cube: &CrossedCube) -> Result<()> {
    if cube.n() > MAX_SYNDROME_DIMENSION {
        return Err(Error::InvalidArgument(format!(
            "syndromes are materialized only for n <= {MAX_SYNDROME_DIMENSION}"
        )));
    }
    Ok(())
}

/// A syndrome consistent with `faults`. Faulty examiners answer with a
/// pseudorandom bit determined by `(seed, test)`.
pub fn generate_syndrome(
    cube: &CrossedCube,
    faults: &VertexSet,
    model: DiagnosisModel,
    seed: u64,
) -> Result<Syndrome> {
    check_syndrome_size(cube)?;
    faults.check_universe(cube.dim())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let outcomes = tests(cube, model)
        .into_iter()
        .map(|t| {
            let bit = t.forced_outcome(faults).unwrap_or_else(|| {
                rng.set_stream(t.stream_id());
                rng.set_word_pos(0);
                rng.next_u32() & 1 == 1
            });
            (t, bit)
        })
        .collect();
    Ok(Syndrome { model, outcomes })
}

/// Whether `faults` could have produced `syndrome`. The syndrome must cover
/// exactly the model's tests.
pub fn syndrome_compatible(cube: &CrossedCube, faults: &VertexSet, syndrome: &Syndrome) -> Result<bool> {
    faults.check_universe(cube.dim())?;
    let expected = test_count(cube, syndrome.model);
    if syndrome.outcomes.len() as u128 != expected {
        return Err(Error::InvalidArgument(format!(
            "syndrome has {} outcomes, the {} test set has {expected}",
            syndrome.outcomes.len(),
            syndrome.model
        )));
    }
    for (&t, &bit) in &syndrome.outcomes {
        let valid = match (t, syndrome.model) {
            (Test::Pmc { tester, tested }, DiagnosisModel::Pmc) => cube.is_adjacent(
                cube.vertex(tester)?,
                cube.vertex(tested)?,
            ),
            (Test::Mm { comparator, first, second }, DiagnosisModel::MmStar) => {
                let w = cube.vertex(comparator)?;
                first < second
                    && cube.is_adjacent(w, cube.vertex(first)?)
                    && cube.is_adjacent(w, cube.vertex(second)?)
            }
            _ => false,
        };
        if !valid {
            return Err(Error::InvalidArgument(format!("{t:?} is not a {} test", syndrome.model)));
        }
        if t.forced_outcome(faults).is_some_and(|forced| forced != bit) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn check_pair(cube: &CrossedCube, f1: &VertexSet, f2: &VertexSet) -> Result<()> {
    f1.check_universe(cube.dim())?;
    f2.check_universe(cube.dim())?;
    if f1 == f2 {
        return Err(Error::IdenticalFaultSets);
    }
    Ok(())
}

/// Decides distinguishability from syndrome semantics alone: outcomes of
/// different tests are independent, so a common syndrome exists iff no test
/// is forced to different values by the two sets. The candidate common
/// syndrome is then checked against both sets explicitly.
pub fn oracle_distinguishable(
    cube: &CrossedCube,
    f1: &VertexSet,
    f2: &VertexSet,
    model: DiagnosisModel,
    budget: u64,
) -> Result<bool> {
    check_pair(cube, f1, f2)?;
    check_syndrome_size(cube)?;
    let needed = test_count(cube, model);
    if needed > budget as u128 {
        return Err(Error::BudgetExceeded(Refusal { needed, budget, lower: 0, upper: None }));
    }
    let mut outcomes = BTreeMap::new();
    for t in tests(cube, model) {
        let bit = match (t.forced_outcome(f1), t.forced_outcome(f2)) {
            (Some(a), Some(b)) if a != b => return Ok(true),
            (Some(a), _) | (None, Some(a)) => a,
            (None, None) => false,
        };
        outcomes.insert(t, bit);
    }
    let common = Syndrome { model, outcomes };
    let shared = syndrome_compatible(cube, f1, &common)? && syndrome_compatible(cube, f2, &common)?;
    Ok(!shared)
}

/// Some fault-free vertex is adjacent to a vertex of `F1 △ F2`.
pub fn pmc_distinguishable(cube: &CrossedCube, f1: &VertexSet, f2: &VertexSet) -> Result<bool> {
    check_pair(cube, f1, f2)?;
    let outside = f1.union(f2).complement();
    let diff = f1.symmetric_difference(f2);
    let escapes = diff.labels().any(|v| cube.neighbor_labels(v).any(|w| outside.contains_label(w)));
    Ok(escapes)
}

/// Some fault-free `w` satisfies one of: `w` has a fault-free neighbor and a
/// neighbor in `F1 △ F2`; `w` has two neighbors in `F1 \ F2`; `w` has two
/// neighbors in `F2 \ F1`.
pub fn mm_distinguishable(cube: &CrossedCube, f1: &VertexSet, f2: &VertexSet) -> Result<bool> {
    check_pair(cube, f1, f2)?;
    let union = f1.union(f2);
    let only1 = f1.difference(f2);
    let only2 = f2.difference(f1);
    for w in union.complement().labels() {
        let (mut free, mut in1, mut in2) = (0, 0, 0);
        for v in cube.neighbor_labels(w) {
            if only1.contains_label(v) {
                in1 += 1;
            } else if only2.contains_label(v) {
                in2 += 1;
            } else if !union.contains_label(v) {
                free += 1;
            }
        }
        if (free > 0 && in1 + in2 > 0) || in1 >= 2 || in2 >= 2 {
            return Ok(true);
        }
    }
    Ok(false)
}

pub fn distinguishable(
    cube: &CrossedCube,
    f1: &VertexSet,
    f2: &VertexSet,
    model: DiagnosisModel,
) -> Result<bool> {
    match model {
        DiagnosisModel::Pmc => pmc_distinguishable(cube, f1, f2),
        DiagnosisModel::MmStar => mm_distinguishable(cube, f1, f2),
    }
}

/// Word-wide forms of the two predicates for `n <= 6`. Callers guarantee
/// `f1 != f2`.
pub mod mask {
    use super::DiagnosisModel;
    use crate::structure::MaskCube;

    #[inline]
    pub fn pmc_distinguishable(kernel: &MaskCube, f1: u64, f2: u64) -> bool {
        let outside = kernel.full() & !(f1 | f2);
        kernel.adjacent_to(f1 ^ f2) & outside != 0
    }

    #[inline]
    pub fn mm_distinguishable(kernel: &MaskCube, f1: u64, f2: u64) -> bool {
        let outside = kernel.full() & !(f1 | f2);
        let (only1, only2) = (f1 & !f2, f2 & !f1);
        let diff = only1 | only2;
        if kernel.adjacent_to(diff) & outside == 0 {
            return false;
        }
        let mut rest = outside;
        while rest != 0 {
            let w = rest.trailing_zeros();
            rest &= rest - 1;
            let nb = kernel.neighbors(w);
            if (nb & outside != 0 && nb & diff != 0)
                || (nb & only1).count_ones() >= 2
                || (nb & only2).count_ones() >= 2
            {
                return true;
            }
        }
        false
    }

    #[inline]
    pub fn distinguishable(kernel: &MaskCube, f1: u64, f2: u64, model: DiagnosisModel) -> bool {
        match model {
            DiagnosisModel::Pmc => pmc_distinguishable(kernel, f1, f2),
            DiagnosisModel::MmStar => mm_distinguishable(kernel, f1, f2),
        }
    }
}

/// Two distinct fault sets, reported with binary labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaultPair {
    pub first: VertexSet,
    pub second: VertexSet,
}

#[derive(Debug, Clone, Serialize)]
pub struct FaultPairReport {
    pub first: Vec<String>,
    pub second: Vec<String>,
    pub first_size: usize,
    pub second_size: usize,
}

impl FaultPair {
    pub fn max_len(&self) -> usize {
        self.first.len().max(self.second.len())
    }

    pub fn report(&self) -> FaultPairReport {
        FaultPairReport {
            first: self.first.to_binary_labels(),
            second: self.second.to_binary_labels(),
            first_size: self.first.len(),
            second_size: self.second.len(),
        }
    }

    pub(crate) fn from_masks(kernel: &MaskCube, cube: &CrossedCube, f1: u64, f2: u64) -> Self {
        debug_assert_eq!(kernel.n(), cube.n());
        FaultPair { first: VertexSet::from_mask(cube.dim(), f1), second: VertexSet::from_mask(cube.dim(), f2) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extremal::witness_bundle;

    fn cube(n: u32) -> CrossedCube {
        CrossedCube::new(n).unwrap()
    }

    #[test]
    fn test_counts() {
        let c = cube(4);
        assert_eq!(tests(&c, DiagnosisModel::Pmc).len(), 64);
        assert_eq!(tests(&c, DiagnosisModel::MmStar).len(), 96);
    }

    #[test]
    fn fault_free_syndromes_are_zero() {
        let c = cube(3);
        let none = VertexSet::empty(c.dim());
        for model in [DiagnosisModel::Pmc, DiagnosisModel::MmStar] {
            let s = generate_syndrome(&c, &none, model, 7).unwrap();
            assert_eq!(s.ones(), 0);
            assert!(syndrome_compatible(&c, &none, &s).unwrap());
        }
    }

    #[test]
    fn any_one_excludes_empty_fault_set_under_pmc() {
        let c = cube(3);
        let f = VertexSet::from_labels(c.dim(), [5]).unwrap();
        let s = generate_syndrome(&c, &f, DiagnosisModel::Pmc, 1).unwrap();
        assert!(s.ones() > 0);
        assert!(!syndrome_compatible(&c, &VertexSet::empty(c.dim()), &s).unwrap());
    }

    #[test]
    fn adversary_is_reproducible() {
        let c = cube(4);
        let f = VertexSet::from_labels(c.dim(), [0, 3, 9]).unwrap();
        let a = generate_syndrome(&c, &f, DiagnosisModel::MmStar, 42).unwrap();
        let b = generate_syndrome(&c, &f, DiagnosisModel::MmStar, 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn identical_sets_refused() {
        let c = cube(3);
        let f = VertexSet::from_labels(c.dim(), [1]).unwrap();
        assert!(matches!(pmc_distinguishable(&c, &f, &f), Err(Error::IdenticalFaultSets)));
        assert!(matches!(mm_distinguishable(&c, &f, &f), Err(Error::IdenticalFaultSets)));
    }

    #[test]
    fn singleton_against_empty_is_distinguishable() {
        for n in 1..=5 {
            let c = cube(n);
            let none = VertexSet::empty(c.dim());
            let one = VertexSet::from_labels(c.dim(), [0]).unwrap();
            assert!(pmc_distinguishable(&c, &one, &none).unwrap());
            if n >= 2 {
                assert!(mm_distinguishable(&c, &one, &none).unwrap());
            }
        }
    }

    #[test]
    fn witness_pair_is_indistinguishable() {
        for n in 4..=6 {
            let b = witness_bundle(crate::topology::Dimension::new(n).unwrap()).unwrap();
            let c = cube(n);
            assert!(!pmc_distinguishable(&c, &b.f1, &b.f2).unwrap());
            assert!(!mm_distinguishable(&c, &b.f1, &b.f2).unwrap());
            let k = MaskCube::new(&c).unwrap();
            let (m1, m2) = (b.f1.to_mask().unwrap(), b.f2.to_mask().unwrap());
            assert!(!mask::pmc_distinguishable(&k, m1, m2));
            assert!(!mask::mm_distinguishable(&k, m1, m2));
        }
    }

    #[test]
    fn mask_predicates_match_set_predicates() {
        let c = cube(3);
        let k = MaskCube::new(&c).unwrap();
        for f1 in 0u64..256 {
            for f2 in (0u64..256).step_by(7) {
                if f1 == f2 {
                    continue;
                }
                let (a, b) = (VertexSet::from_mask(c.dim(), f1), VertexSet::from_mask(c.dim(), f2));
                assert_eq!(mask::pmc_distinguishable(&k, f1, f2), pmc_distinguishable(&c, &a, &b).unwrap());
                assert_eq!(mask::mm_distinguishable(&k, f1, f2), mm_distinguishable(&c, &a, &b).unwrap());
            }
        }
    }

    #[test]
    fn model_names_round_trip() {
        for m in [DiagnosisModel::Pmc, DiagnosisModel::MmStar] {
            assert_eq!(m.to_string().parse::<DiagnosisModel>().unwrap(), m);
        }
        assert!("xyz".parse::<DiagnosisModel>().is_err());
    }
}
