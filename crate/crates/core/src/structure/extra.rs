//! Exact g-extra connectivity and census of minimum g-extra cuts by
//! exhaustive subset enumeration on the word-wide kernel.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::connectivity::{connectivity, DEFAULT_FLOW_BUDGET};
use super::mask::{MaskCube, MAX_MASK_DIMENSION};
use super::ComponentProfile;
use crate::combin::{binomial, SubsetRange};
use crate::error::{Error, Refusal, Result};
use crate::extremal;
use crate::sweep::{self, Checkpoint, FirstHit, SweepControl, SweepPlan, Tally};
use crate::topology::CrossedCube;
use crate::vertex_set::VertexSet;

/// Default cap on subsets enumerated by one search.
pub const DEFAULT_SUBSET_BUDGET: u64 = 1_000_000_000;

/// Upper bound on `C(2^n, g + 1)` for the neighborhood scan used to seed
/// upper bounds.
const SEED_SCAN_LIMIT: u128 = 2_000_000;

#[derive(Debug, Clone)]
pub struct ExtraConnectivity {
    pub g: u32,
    pub value: usize,
    /// A minimum g-extra cut, lowest colex rank among those found by the sweep.
    pub witness: VertexSet,
    /// Sizes below this were skipped because no vertex cut is that small.
    pub lower_bound: usize,
    /// Size of the construction-based cut used to bound the search, if any.
    pub upper_bound: Option<usize>,
    pub subsets_examined: u128,
}

/// Smallest known g-extra cut from explicit constructions: the
/// neighborhood of `A` for `g = 3`, and neighborhoods of connected
/// `(g + 1)`-sets when that scan is small.
pub fn construction_upper_bound(cube: &CrossedCube, g: u32) -> Option<VertexSet> {
    let mut best: Option<VertexSet> = None;
    let mut offer = |cut: VertexSet| {
        if best.as_ref().is_none_or(|b| cut.len() < b.len()) {
            best = Some(cut);
        }
    };
    if g == 3 && cube.n() >= 4 {
        if let Ok(bundle) = extremal::witness_bundle(cube.dim()) {
            offer(bundle.na);
        }
    }
    if let Ok(kernel) = MaskCube::new(cube) {
        let universe = kernel.vertex_count();
        if g < universe && binomial(universe as u64, g as u64 + 1) <= SEED_SCAN_LIMIT {
            let mut best_mask: Option<u64> = None;
            for s in SubsetRange::new(universe, g + 1, 0, u64::MAX) {
                if !kernel.is_connected(s) {
                    continue;
                }
                let cut = kernel.neighborhood(s);
                if best_mask.is_none_or(|b| cut.count_ones() < b.count_ones()) && kernel.is_extra_cut(cut, g) {
                    best_mask = Some(cut);
                }
            }
            if let Some(m) = best_mask {
                offer(VertexSet::from_mask(cube.dim(), m));
            }
        }
    }
    best
}

fn refuse(needed: u128, budget: u64, lower: usize, upper: Option<usize>) -> Error {
    Error::BudgetExceeded(Refusal {
        needed,
        budget,
        lower: lower as u64,
        upper: upper.map(|u| u as u64),
    })
}

/// `kappa~^(g)(CQ_n)` with a witness cut.
///
/// Sizes below `kappa(CQ_n)` are skipped and sizes from the construction bound
/// upward are not searched: if nothing smaller exists, the construction is
/// minimum. Sizes are searched in increasing order while the running subset
/// count stays within `budget`; otherwise the search is refused with the
/// bracket established so far.
pub fn extra_connectivity(cube: &CrossedCube, g: u32, budget: u64) -> Result<ExtraConnectivity> {
    let lower = match connectivity(cube, DEFAULT_FLOW_BUDGET) {
        Ok(k) => k.value,
        Err(_) => 1,
    };
    let upper_cut = construction_upper_bound(cube, g);
    let upper = upper_cut.as_ref().map(|c| c.len());
    let count = cube.vertex_count();
    // Two components of order >= g + 1 must survive.
    let largest_cut = count.checked_sub(2 * (g as usize + 1));
    let Some(largest_cut) = largest_cut else {
        return Err(Error::InvalidArgument(format!("CQ_{} has no {g}-extra cut", cube.n())));
    };
    let search_end = upper.map_or(largest_cut, |u| u.saturating_sub(1).min(largest_cut));

    let kernel = match MaskCube::new(cube) {
        Ok(k) => k,
        Err(_) => {
            let needed = (lower..=search_end.max(lower))
                .fold(0u128, |acc, k| acc.saturating_add(binomial(count as u64, k as u64)));
            return Err(refuse(needed.max(budget as u128 + 1), budget, lower, upper));
        }
    };

    let mut examined: u128 = 0;
    for size in lower..=search_end {
        let subsets = binomial(count as u64, size as u64);
        if examined + subsets > budget as u128 {
            let needed = (size..=search_end)
                .fold(examined, |acc, k| acc.saturating_add(binomial(count as u64, k as u64)));
            return Err(refuse(needed, budget, size, upper));
        }
        let plan = SweepPlan::new(kernel.vertex_count(), size as u32);
        let done = sweep::run_until(
            Checkpoint::<FirstHit>::start(plan),
            SweepControl::default(),
            |t, rank, mask| {
                if kernel.is_extra_cut(mask, g) {
                    t.record(rank, mask);
                }
            },
            |_| {},
            |t| t.hit.is_some(),
        );
        examined += done.visited() as u128;
        if let Some((_, mask)) = done.tally.hit {
            return Ok(ExtraConnectivity {
                g,
                value: size,
                witness: VertexSet::from_mask(cube.dim(), mask),
                lower_bound: lower,
                upper_bound: upper,
                subsets_examined: examined,
            });
        }
    }
    match upper_cut {
        Some(witness) if witness.len() <= largest_cut => Ok(ExtraConnectivity {
            g,
            value: witness.len(),
            witness,
            lower_bound: lower,
            upper_bound: upper,
            subsets_examined: examined,
        }),
        _ => Err(Error::InvalidArgument(format!("CQ_{} has no {g}-extra cut", cube.n()))),
    }
}

/// Lazily yields every g-extra cut of exactly `cut_size` vertices with its
/// profile, in colex order.
pub fn enumerate_min_extra_cuts(
    cube: &CrossedCube,
    g: u32,
    cut_size: usize,
    budget: u64,
) -> Result<impl Iterator<Item = (VertexSet, ComponentProfile)>> {
    let kernel = MaskCube::new(cube)?;
    let count = kernel.vertex_count();
    if cut_size > count as usize {
        return Err(Error::InvalidArgument(format!("cut size {cut_size} exceeds 2^{}", cube.n())));
    }
    let total = binomial(count as u64, cut_size as u64);
    if total > budget as u128 {
        return Err(refuse(total, budget, 0, None));
    }
    let dim = cube.dim();
    Ok(SubsetRange::new(count, cut_size as u32, 0, u64::MAX).filter_map(move |m| {
        if kernel.is_extra_cut(m, g) {
            Some((VertexSet::from_mask(dim, m), kernel.profile(m)))
        } else {
            None
        }
    }))
}

/// Running totals of a cut census; serializable for checkpoints.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutCensusTally {
    pub cuts: u64,
    /// Cuts leaving exactly two components, one of order `g + 1`.
    pub tight: u64,
    pub histogram: BTreeMap<String, u64>,
    pub first: FirstHit,
}

impl Tally for CutCensusTally {
    fn merge(&mut self, other: Self) {
        self.cuts += other.cuts;
        self.tight += other.tight;
        for (k, v) in other.histogram {
            *self.histogram.entry(k).or_default() += v;
        }
        self.first.merge(other.first);
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MinCutCensus {
    pub n: u32,
    pub g: u32,
    pub size: usize,
    pub total_subsets: u64,
    pub cuts: u64,
    pub tight: u64,
    pub profile_histogram: BTreeMap<String, u64>,
    pub first_cut: Option<Vec<String>>,
}

pub fn census_plan(cube: &CrossedCube, size: usize, budget: u64) -> Result<SweepPlan> {
    if cube.n() > MAX_MASK_DIMENSION {
        return Err(refuse(u128::MAX, budget, 0, None));
    }
    let count = cube.vertex_count() as u32;
    if size > count as usize {
        return Err(Error::InvalidArgument(format!("cut size {size} exceeds 2^{}", cube.n())));
    }
    let total = binomial(count as u64, size as u64);
    if total > budget as u128 {
        return Err(refuse(total, budget, 0, None));
    }
    Ok(SweepPlan::new(count, size as u32))
}

/// Continues a census sweep from `checkpoint`.
pub fn continue_census<B: FnMut(&Checkpoint<CutCensusTally>)>(
    cube: &CrossedCube,
    g: u32,
    checkpoint: Checkpoint<CutCensusTally>,
    control: SweepControl,
    on_batch: B,
) -> Result<Checkpoint<CutCensusTally>> {
    let kernel = MaskCube::new(cube)?;
    Ok(sweep::run(
        checkpoint,
        control,
        |t: &mut CutCensusTally, rank, mask| {
            if kernel.is_extra_cut(mask, g) {
                let profile = kernel.profile(mask);
                t.cuts += 1;
                if profile.is_two_with_one_of_order(g + 1) {
                    t.tight += 1;
                }
                *t.histogram.entry(profile.to_string()).or_default() += 1;
                t.first.record(rank, mask);
            }
        },
        on_batch,
    ))
}

impl MinCutCensus {
    pub fn from_checkpoint(cube: &CrossedCube, g: u32, cp: &Checkpoint<CutCensusTally>) -> Self {
        MinCutCensus {
            n: cube.n(),
            g,
            size: cp.plan.size as usize,
            total_subsets: cp.plan.total,
            cuts: cp.tally.cuts,
            tight: cp.tally.tight,
            profile_histogram: cp.tally.histogram.clone(),
            first_cut: cp
                .tally
                .first
                .hit
                .map(|(_, m)| VertexSet::from_mask(cube.dim(), m).to_binary_labels()),
        }
    }
}

/// Every g-extra cut of `size` vertices, tallied by component profile.
pub fn min_cut_census(cube: &CrossedCube, g: u32, size: usize, budget: u64) -> Result<MinCutCensus> {
    let plan = census_plan(cube, size, budget)?;
    let cp = continue_census(cube, g, Checkpoint::start(plan), SweepControl::default(), |_| {})?;
    Ok(MinCutCensus::from_checkpoint(cube, g, &cp))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::is_g_extra_cut;

    #[test]
    fn zero_extra_connectivity_is_connectivity() {
        for n in 2..=5 {
            let cube = CrossedCube::new(n).unwrap();
            let r = extra_connectivity(&cube, 0, DEFAULT_SUBSET_BUDGET).unwrap();
            assert_eq!(r.value, n as usize);
            assert!(is_g_extra_cut(&cube, &r.witness, 0).unwrap());
        }
    }

    #[test]
    fn cq4_three_extra_connectivity_at_most_six() {
        let cube = CrossedCube::new(4).unwrap();
        let r = extra_connectivity(&cube, 3, DEFAULT_SUBSET_BUDGET).unwrap();
        assert!(r.value <= 6);
        assert_eq!(r.witness.len(), r.value);
        assert!(is_g_extra_cut(&cube, &r.witness, 3).unwrap());
    }

    #[test]
    fn refusal_reports_bracket() {
        let cube = CrossedCube::new(5).unwrap();
        match extra_connectivity(&cube, 3, 1000) {
            Err(Error::BudgetExceeded(r)) => {
                assert_eq!(r.lower, 5);
                assert_eq!(r.upper, Some(11));
            }
            other => panic!("expected refusal, got {other:?}"),
        }
    }

    #[test]
    fn no_cut_below_connectivity() {
        let cube = CrossedCube::new(4).unwrap();
        assert_eq!(enumerate_min_extra_cuts(&cube, 0, 3, u64::MAX).unwrap().count(), 0);
    }

    #[test]
    fn enumeration_and_census_agree() {
        let cube = CrossedCube::new(4).unwrap();
        let listed: Vec<_> = enumerate_min_extra_cuts(&cube, 3, 6, u64::MAX).unwrap().collect();
        let census = min_cut_census(&cube, 3, 6, u64::MAX).unwrap();
        assert_eq!(listed.len() as u64, census.cuts);
        let exceptional = VertexSet::from_binary(cube.dim(), extremal::CQ4_EXCEPTIONAL).unwrap();
        assert!(listed.iter().any(|(f, _)| *f == exceptional));
    }
}
