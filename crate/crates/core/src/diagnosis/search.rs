//! g-extra t-diagnosability: explicit indistinguishable pairs, exhaustive pair
//! sweeps for small cubes and structural brackets otherwise.

use rayon::prelude::*;
use serde::Serialize;

use super::{distinguishable, mask, DiagnosisModel, FaultPair, FaultPairReport};
use crate::combin::{binomial, subsets_in_range, SubsetRange};
use crate::error::{Error, Refusal, Result};
use crate::extremal;
use crate::structure::extra::{extra_connectivity, DEFAULT_SUBSET_BUDGET};
use crate::structure::{is_g_extra_faulty_set, MaskCube};
use crate::topology::CrossedCube;
use crate::vertex_set::VertexSet;

const SEED_SCAN_LIMIT: u128 = 2_000_000;

fn halves(cube: &CrossedCube) -> Option<FaultPair> {
    let n = cube.n();
    if n < 2 {
        return None;
    }
    let top = 1u32 << (n - 1);
    let low = VertexSet::from_labels(cube.dim(), 0..top).ok()?;
    Some(FaultPair { second: low.complement(), first: low })
}

/// Indistinguishable pairs of g-extra faulty sets built from explicit
/// structure, in construction order. Every returned pair is checked.
///
/// Candidates: `(N(A), A ∪ N(A))` for the 3-path `A`; the two half cubes;
/// `(∅, V)`; and for `n <= 6` the pair `(N(S), S ∪ N(S))` for the connected
/// `(g + 1)`-set `S` with the smallest neighborhood.
pub fn witness_pairs(cube: &CrossedCube, g: u32, model: DiagnosisModel) -> Result<Vec<FaultPair>> {
    let mut candidates = Vec::new();
    if cube.n() >= 4 {
        let b = extremal::witness_bundle(cube.dim())?;
        candidates.push(FaultPair { first: b.f1, second: b.f2 });
    }
    if let Ok(kernel) = MaskCube::new(cube) {
        let universe = kernel.vertex_count();
        if g < universe && binomial(universe as u64, g as u64 + 1) <= SEED_SCAN_LIMIT {
            let mut best: Option<(u64, u64)> = None;
            for s in SubsetRange::new(universe, g + 1, 0, u64::MAX) {
                let nbr = kernel.neighborhood(s);
                if nbr == 0 || !kernel.is_connected(s) || !kernel.is_extra_faulty_set(nbr, g) {
                    continue;
                }
                if best.is_none_or(|(_, b)| nbr.count_ones() < b.count_ones()) {
                    best = Some((s, nbr));
                }
            }
            if let Some((s, nbr)) = best {
                candidates.push(FaultPair::from_masks(&kernel, cube, nbr, nbr | s));
            }
        }
    }
    candidates.extend(halves(cube));
    candidates.push(FaultPair { first: VertexSet::empty(cube.dim()), second: VertexSet::full(cube.dim()) });

    let mut out = Vec::new();
    for pair in candidates {
        if pair.first != pair.second
            && is_g_extra_faulty_set(cube, &pair.first, g)?
            && is_g_extra_faulty_set(cube, &pair.second, g)?
            && !distinguishable(cube, &pair.first, &pair.second, model)?
        {
            out.push(pair);
        }
    }
    Ok(out)
}

/// The explicit pair with the smallest larger set; earliest wins ties.
pub fn best_witness_pair(pairs: &[FaultPair]) -> Option<&FaultPair> {
    pairs.iter().min_by_key(|p| p.max_len())
}

/// Lower bound on the g-extra diagnosability given a lower bound
/// `extra_lower` on `kappa~^(g)` (`None` when no g-extra cut exists).
///
/// For an indistinguishable pair with common part `C`, fault-free part `W`
/// and `W` nonempty: under PMC no edge joins `W` to `F1 △ F2`, so `C` is a
/// g-extra cut and the larger set has at least `kappa~ + g + 1` vertices.
/// Under MM*, if `W` has no vertex isolated in `CQ_n - (F1 ∪ F2)` the same
/// holds; if every vertex of `W` is isolated, the perfect matching bounds
/// the isolated vertices by `|F1 ∪ F2|`, so the larger set has at least
/// `2^(n-2)` vertices; otherwise `C` separates the non-isolated part of `W`
/// and is a g-extra cut, leaving at least `kappa~ + 1`. If `W` is empty the
/// larger set has at least `2^(n-1)` vertices.
pub fn structural_lower_bound(n: u32, g: u32, model: DiagnosisModel, extra_lower: Option<usize>) -> usize {
    let half = (1usize << n) / 2;
    let quarter = (1usize << n) / 4;
    let via_cut = |extra: usize| match model {
        DiagnosisModel::Pmc => extra + g as usize,
        DiagnosisModel::MmStar => extra,
    };
    let mut bound = half.saturating_sub(1);
    if model == DiagnosisModel::MmStar {
        bound = bound.min(quarter.saturating_sub(1));
    }
    if let Some(k) = extra_lower {
        bound = bound.min(via_cut(k));
    }
    bound
}

#[derive(Debug, Clone, Serialize)]
pub struct LowerBound {
    pub value: usize,
    pub basis: String,
}

#[derive(Debug, Clone)]
pub struct DiagnosabilityVerdict {
    pub diagnosable: bool,
    pub witness: Option<FaultPair>,
    pub pairs_checked: u64,
    pub faulty_sets: u64,
}

struct PairSweep {
    /// Smallest-max-size indistinguishable pair, earliest in sweep order.
    hit: Option<FaultPair>,
    pairs_checked: u64,
    faulty_sets: u64,
}

fn faulty_buckets(kernel: &MaskCube, g: u32, max_size: u32) -> Vec<Vec<u64>> {
    (0..=max_size.min(kernel.vertex_count()))
        .map(|k| {
            SubsetRange::new(kernel.vertex_count(), k, 0, u64::MAX)
                .filter(|&m| kernel.is_extra_faulty_set(m, g))
                .collect()
        })
        .collect()
}

fn pair_total(buckets: &[Vec<u64>]) -> u128 {
    let mut before = 0u128;
    let mut total = 0u128;
    for b in buckets {
        let len = b.len() as u128;
        total += len * before + len * len.saturating_sub(1) / 2;
        before += len;
    }
    total
}

/// Sweeps pairs `F1 != F2` of g-extra faulty sets with `max(|F1|, |F2|)`
/// increasing, stopping at the first size that has an indistinguishable pair.
fn sweep_pairs(
    cube: &CrossedCube,
    kernel: &MaskCube,
    g: u32,
    model: DiagnosisModel,
    max_size: u32,
    budget: u64,
) -> std::result::Result<PairSweep, u128> {
    let sets = subsets_in_range(kernel.vertex_count() as u64, 0..=max_size as u64);
    if sets > budget as u128 {
        return Err(sets.saturating_mul(sets) / 2);
    }
    let buckets = faulty_buckets(kernel, g, max_size);
    let total = pair_total(&buckets);
    if total > budget as u128 {
        return Err(total);
    }
    let faulty_sets = buckets.iter().map(|b| b.len() as u64).sum();
    let mut earlier: Vec<u64> = Vec::new();
    let mut checked = 0u64;
    for bucket in &buckets {
        let hit = bucket.par_iter().enumerate().find_map_first(|(i, &f1)| {
            earlier
                .iter()
                .chain(&bucket[..i])
                .find(|&&f2| !mask::distinguishable(kernel, f1, f2, model))
                .map(|&f2| (i, f2, f1))
        });
        match hit {
            Some((i, f2, f1)) => {
                checked += (i as u64) * earlier.len() as u64 + (i as u64) * (i as u64).saturating_sub(1) / 2;
                let offset = earlier
                    .iter()
                    .chain(&bucket[..i])
                    .position(|&m| m == f2)
                    .expect("witness drawn from the scanned range");
                checked += offset as u64 + 1;
                return Ok(PairSweep {
                    hit: Some(FaultPair::from_masks(kernel, cube, f2, f1)),
                    pairs_checked: checked,
                    faulty_sets,
                });
            }
            None => {
                let len = bucket.len() as u64;
                checked += len * earlier.len() as u64 + len * len.saturating_sub(1) / 2;
                earlier.extend_from_slice(bucket);
            }
        }
    }
    Ok(PairSweep { hit: None, pairs_checked: checked, faulty_sets })
}

fn no_pairs(cube: &CrossedCube, g: u32) -> Error {
    Error::InvalidArgument(format!("CQ_{} has fewer than two {g}-extra faulty sets", cube.n()))
}

/// Whether every pair of distinct g-extra faulty sets of size at most `t`
/// is distinguishable. Explicit pairs are tried first; otherwise all pairs
/// are swept (`n <= 6` and within `budget`).
pub fn is_g_extra_t_diagnosable(
    cube: &CrossedCube,
    g: u32,
    t: usize,
    model: DiagnosisModel,
    budget: u64,
) -> Result<DiagnosabilityVerdict> {
    let seeds = witness_pairs(cube, g, model)?;
    if let Some(p) = seeds.iter().find(|p| p.max_len() <= t) {
        return Ok(DiagnosabilityVerdict { diagnosable: false, witness: Some(p.clone()), pairs_checked: 0, faulty_sets: 0 });
    }
    let upper = best_witness_pair(&seeds).map(|p| p.max_len() as u64 - 1);
    let kernel = MaskCube::new(cube).map_err(|_| {
        Error::BudgetExceeded(Refusal { needed: u128::MAX, budget, lower: 0, upper })
    })?;
    let max_size = t.min(kernel.vertex_count() as usize) as u32;
    match sweep_pairs(cube, &kernel, g, model, max_size, budget) {
        Ok(sweep) => Ok(DiagnosabilityVerdict {
            diagnosable: sweep.hit.is_none(),
            witness: sweep.hit,
            pairs_checked: sweep.pairs_checked,
            faulty_sets: sweep.faulty_sets,
        }),
        Err(needed) => Err(Error::BudgetExceeded(Refusal { needed, budget, lower: 0, upper })),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Diagnosability {
    pub n: u32,
    pub g: u32,
    pub model: DiagnosisModel,
    /// Set when the bracket is closed.
    pub exact: Option<usize>,
    pub lower: LowerBound,
    pub upper: usize,
    pub upper_witness: FaultPairReport,
    pub exhaustive: bool,
    pub pairs_checked: u64,
}

/// The g-extra diagnosability `t~_g`, exact when the pair sweep fits in
/// `pair_budget`, otherwise a bracket. `known_extra` supplies `kappa~^(g)`
/// when already computed; without it the value is searched for within the
/// default subset budget and the best established lower bound is used.
pub fn extra_diagnosability(
    cube: &CrossedCube,
    g: u32,
    model: DiagnosisModel,
    pair_budget: u64,
    known_extra: Option<usize>,
) -> Result<Diagnosability> {
    let seeds = witness_pairs(cube, g, model)?;
    let best = best_witness_pair(&seeds).cloned().ok_or_else(|| no_pairs(cube, g))?;
    let upper = best.max_len() - 1;
    let report = |exact: Option<usize>, lower: LowerBound, upper: usize, witness: &FaultPair, pairs, exhaustive| {
        Diagnosability {
            n: cube.n(),
            g,
            model,
            exact,
            lower,
            upper,
            upper_witness: witness.report(),
            exhaustive,
            pairs_checked: pairs,
        }
    };

    if let Ok(kernel) = MaskCube::new(cube) {
        if let Ok(sweep) = sweep_pairs(cube, &kernel, g, model, upper as u32, pair_budget) {
            let (value, witness) = match sweep.hit {
                Some(p) => (p.max_len() - 1, p),
                None => (upper, best),
            };
            let lower = LowerBound { value, basis: "exhaustive pair sweep".into() };
            return Ok(report(Some(value), lower, value, &witness, sweep.pairs_checked, true));
        }
    }

    let (extra, basis) = match known_extra {
        Some(k) => (Some(k), format!("kappa~^({g}) = {k} (supplied)")),
        None => match extra_connectivity(cube, g, DEFAULT_SUBSET_BUDGET) {
            Ok(r) => (Some(r.value), format!("kappa~^({g}) = {} (exhaustive)", r.value)),
            Err(Error::BudgetExceeded(r)) => {
                (Some(r.lower as usize), format!("kappa~^({g}) >= {} (partial search)", r.lower))
            }
            Err(Error::InvalidArgument(_)) => (None, format!("no {g}-extra cut")),
            Err(e) => return Err(e),
        },
    };
    let value = structural_lower_bound(cube.n(), g, model, extra).min(upper);
    let lower = LowerBound { value, basis: format!("structural bound from {basis}") };
    let exact = (value == upper).then_some(value);
    Ok(report(exact, lower, upper, &best, 0, false))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn witness_pairs_are_sorted_and_valid() {
        let cube = CrossedCube::new(5).unwrap();
        let pairs = witness_pairs(&cube, 3, DiagnosisModel::Pmc).unwrap();
        assert_eq!(pairs[0].max_len(), 4 * 5 - 5);
        assert_eq!(best_witness_pair(&pairs).unwrap().max_len(), 4 * 5 - 5);
    }

    #[test]
    fn bundle_pair_refutes_t_equal_4n_minus_5() {
        let cube = CrossedCube::new(4).unwrap();
        let v = is_g_extra_t_diagnosable(&cube, 3, 11, DiagnosisModel::Pmc, u64::MAX).unwrap();
        assert!(!v.diagnosable);
        let b = extremal::witness_bundle(cube.dim()).unwrap();
        assert_eq!(v.witness, Some(FaultPair { first: b.f1, second: b.f2 }));
    }

    #[test]
    fn t_zero_is_diagnosable() {
        let cube = CrossedCube::new(4).unwrap();
        for model in [DiagnosisModel::Pmc, DiagnosisModel::MmStar] {
            let v = is_g_extra_t_diagnosable(&cube, 3, 0, model, u64::MAX).unwrap();
            assert!(v.diagnosable);
        }
    }

    #[test]
    fn structural_bounds() {
        assert_eq!(structural_lower_bound(5, 3, DiagnosisModel::Pmc, Some(11)), 14);
        assert_eq!(structural_lower_bound(5, 3, DiagnosisModel::MmStar, Some(11)), 7);
        assert_eq!(structural_lower_bound(4, 0, DiagnosisModel::Pmc, Some(4)), 4);
    }

    #[test]
    fn pair_totals() {
        let b = vec![vec![1], vec![2, 3], vec![4, 5, 6]];
        assert_eq!(pair_total(&b), 15);
    }

    #[test]
    fn classical_diagnosability_at_n4_matches_bounds() {
        let cube = CrossedCube::new(4).unwrap();
        let d = extra_diagnosability(&cube, 0, DiagnosisModel::Pmc, u64::MAX, None).unwrap();
        assert!(d.exhaustive);
        let exact = d.exact.unwrap();
        assert!(exact >= structural_lower_bound(4, 0, DiagnosisModel::Pmc, Some(4)));
        assert!(exact <= d.upper);
    }
}
