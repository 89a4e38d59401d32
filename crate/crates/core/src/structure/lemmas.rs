//! Classification of `CQ_n - F` against the known component-structure
//! statements for fault sets of a given size range.
//!
//! Each statement lists conditions as a disjunction. A condition fixes the
//! number of components and names the shapes (or orders) some of them must
//! have; the remaining component is unconstrained. Matching is by profile only.

use std::fmt;

use serde::{Deserialize, Serialize};

use std::collections::BTreeMap;

use super::mask::MaskCube;
use super::{profile, ComponentProfile, ComponentShape};
use crate::combin::binomial;
use crate::error::{Error, Refusal, Result};
use crate::sweep::{self, Checkpoint, SweepControl, SweepPlan, Tally};
use crate::topology::CrossedCube;
use crate::vertex_set::VertexSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Requirement {
    Shape(ComponentShape),
    Order(u32),
}

impl Requirement {
    fn accepts(self, shape: ComponentShape) -> bool {
        match self {
            Requirement::Shape(s) => s == shape,
            Requirement::Order(k) => shape.order() == k,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Condition {
    pub label: &'static str,
    pub components: usize,
    pub required: &'static [Requirement],
}

impl Condition {
    pub fn matches(&self, profile: &ComponentProfile) -> bool {
        profile.component_count == self.components && assign(self.required, &profile.shapes, 0)
    }
}

// Backtracking assignment of requirements to distinct components.
fn assign(required: &[Requirement], shapes: &[ComponentShape], used: u64) -> bool {
    let Some((first, rest)) = required.split_first() else {
        return true;
    };
    shapes.iter().enumerate().any(|(i, &s)| {
        used >> i & 1 == 0 && first.accepts(s) && assign(rest, shapes, used | 1 << i)
    })
}

use ComponentShape::{IsolatedVertex as Iso, Path2, Path3, Star13, K2};
use Requirement::{Order, Shape};

const CONNECTED: Condition = Condition { label: "connected", components: 1, required: &[] };
const TWO_ONE_K2: Condition =
    Condition { label: "two components, one K2", components: 2, required: &[Shape(K2)] };
const TWO_ONE_ISOLATED: Condition =
    Condition { label: "two components, one isolated vertex", components: 2, required: &[Shape(Iso)] };
const TWO_ONE_PATH2: Condition =
    Condition { label: "two components, one 2-path", components: 2, required: &[Shape(Path2)] };
const TWO_ONE_PATH3: Condition =
    Condition { label: "two components, one 3-path", components: 2, required: &[Shape(Path3)] };
const TWO_ONE_STAR: Condition =
    Condition { label: "two components, one K1,3", components: 2, required: &[Shape(Star13)] };
const THREE_TWO_ISOLATED: Condition = Condition {
    label: "three components, two isolated vertices",
    components: 3,
    required: &[Shape(Iso), Shape(Iso)],
};
const FOUR_THREE_ISOLATED: Condition = Condition {
    label: "four components, three isolated vertices",
    components: 4,
    required: &[Shape(Iso), Shape(Iso), Shape(Iso)],
};
const THREE_ISOLATED_K2: Condition = Condition {
    label: "three components, one isolated vertex and one K2",
    components: 3,
    required: &[Shape(Iso), Shape(K2)],
};
const THREE_ISOLATED_PATH2: Condition = Condition {
    label: "three components, one isolated vertex and one 2-path",
    components: 3,
    required: &[Shape(Iso), Shape(Path2)],
};
const TWO_OF_ORDER_5: Condition =
    Condition { label: "two components of order 5", components: 2, required: &[Order(5), Order(5)] };

/// The classification statements, named by the fault-set sizes they cover.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum LemmaId {
    /// `n >= 3`, `n <= |F| <= 2n - 3`.
    UpTo2nMinus3,
    /// `n >= 5`, `2n - 2 <= |F| <= 3n - 6`.
    UpTo3nMinus6,
    /// `n = 5`, `|F| = 10`.
    Cq5Size10,
    /// `n >= 5`, `3n - 5 <= |F| <= 4n - 10`.
    UpTo4nMinus10,
    /// `n = 4`, `|F| = 6`.
    Cq4Size6,
    /// `n >= 6`, `3n - 4 <= |F| <= 4n - 9`.
    UpTo4nMinus9,
}

impl LemmaId {
    pub const ALL: [LemmaId; 6] = [
        LemmaId::Cq4Size6,
        LemmaId::Cq5Size10,
        LemmaId::UpTo2nMinus3,
        LemmaId::UpTo3nMinus6,
        LemmaId::UpTo4nMinus10,
        LemmaId::UpTo4nMinus9,
    ];

    pub fn applies(self, n: u32, size: usize) -> bool {
        let (n, s) = (n as i64, size as i64);
        match self {
            LemmaId::UpTo2nMinus3 => n >= 3 && n <= s && s <= 2 * n - 3,
            LemmaId::UpTo3nMinus6 => n >= 5 && 2 * n - 2 <= s && s <= 3 * n - 6,
            LemmaId::Cq5Size10 => n == 5 && s == 10,
            LemmaId::UpTo4nMinus10 => n >= 5 && 3 * n - 5 <= s && s <= 4 * n - 10,
            LemmaId::Cq4Size6 => n == 4 && s == 6,
            LemmaId::UpTo4nMinus9 => n >= 6 && 3 * n - 4 <= s && s <= 4 * n - 9,
        }
    }

    /// The first applicable statement, exact-size statements taking precedence.
    pub fn for_size(n: u32, size: usize) -> Option<LemmaId> {
        LemmaId::ALL.into_iter().find(|l| l.applies(n, size))
    }

    pub fn conditions(self) -> &'static [Condition] {
        const SEVEN: [Condition; 7] = [
            CONNECTED,
            TWO_ONE_K2,
            TWO_ONE_PATH2,
            TWO_ONE_ISOLATED,
            THREE_TWO_ISOLATED,
            FOUR_THREE_ISOLATED,
            THREE_ISOLATED_K2,
        ];
        match self {
            LemmaId::UpTo2nMinus3 => &[CONNECTED, TWO_ONE_ISOLATED],
            LemmaId::UpTo3nMinus6 => &[CONNECTED, TWO_ONE_K2, TWO_ONE_ISOLATED, THREE_TWO_ISOLATED],
            LemmaId::Cq5Size10 | LemmaId::UpTo4nMinus10 => &SEVEN,
            LemmaId::Cq4Size6 => &[CONNECTED, TWO_ONE_K2, TWO_ONE_ISOLATED, THREE_TWO_ISOLATED, TWO_OF_ORDER_5],
            LemmaId::UpTo4nMinus9 => &[
                CONNECTED,
                TWO_ONE_K2,
                TWO_ONE_STAR,
                TWO_ONE_PATH2,
                TWO_ONE_PATH3,
                TWO_ONE_ISOLATED,
                THREE_TWO_ISOLATED,
                FOUR_THREE_ISOLATED,
                THREE_ISOLATED_K2,
                THREE_ISOLATED_PATH2,
            ],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LemmaId::UpTo2nMinus3 => "n<=|F|<=2n-3",
            LemmaId::UpTo3nMinus6 => "2n-2<=|F|<=3n-6",
            LemmaId::Cq5Size10 => "CQ5,|F|=10",
            LemmaId::UpTo4nMinus10 => "3n-5<=|F|<=4n-10",
            LemmaId::Cq4Size6 => "CQ4,|F|=6",
            LemmaId::UpTo4nMinus9 => "3n-4<=|F|<=4n-9",
        }
    }

    /// Condition matched by `profile`: matches are 1-based positions in
    /// [`Self::conditions`].
    pub fn match_profile(self, profile: &ComponentProfile) -> ConditionMatch {
        let hits: Vec<usize> = self
            .conditions()
            .iter()
            .enumerate()
            .filter(|(_, c)| c.matches(profile))
            .map(|(i, _)| i + 1)
            .collect();
        match hits.as_slice() {
            [] => ConditionMatch::Violation,
            [one] => ConditionMatch::Condition(*one),
            _ => ConditionMatch::Ambiguous(hits),
        }
    }
}

impl fmt::Display for LemmaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConditionMatch {
    Condition(usize),
    /// No listed condition holds.
    Violation,
    /// More than one condition holds; treated as a classification error.
    Ambiguous(Vec<usize>),
}

impl ConditionMatch {
    pub fn is_violation(&self) -> bool {
        !matches!(self, ConditionMatch::Condition(_))
    }
}

#[derive(Debug, Clone)]
pub struct LemmaVerdict {
    pub lemma: LemmaId,
    pub condition: ConditionMatch,
    pub profile: ComponentProfile,
    /// Present exactly when the verdict is a violation.
    pub witness: Option<(VertexSet, ComponentProfile)>,
}

impl LemmaVerdict {
    pub fn condition_label(&self) -> Option<&'static str> {
        match self.condition {
            ConditionMatch::Condition(i) => Some(self.lemma.conditions()[i - 1].label),
            _ => None,
        }
    }
}

/// Classifies `CQ_n - F` against the statement covering `|F|`.
pub fn classify_lemma(cube: &CrossedCube, faults: &VertexSet) -> Result<LemmaVerdict> {
    let lemma = LemmaId::for_size(cube.n(), faults.len())
        .ok_or(Error::NotApplicable { n: cube.n(), size: faults.len() })?;
    classify_against(cube, faults, lemma)
}

/// Classifies against a chosen statement, which must cover `(n, |F|)`.
pub fn classify_against(cube: &CrossedCube, faults: &VertexSet, lemma: LemmaId) -> Result<LemmaVerdict> {
    if !lemma.applies(cube.n(), faults.len()) {
        return Err(Error::NotApplicable { n: cube.n(), size: faults.len() });
    }
    let profile = profile(cube, faults)?;
    let condition = lemma.match_profile(&profile);
    let witness = condition.is_violation().then(|| (faults.clone(), profile.clone()));
    Ok(LemmaVerdict { lemma, condition, profile, witness })
}

/// Violations retained per sweep, lowest colex rank first.
pub const MAX_RECORDED_VIOLATIONS: usize = 32;

/// Running totals of a classification sweep; serializable for checkpoints.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaTally {
    /// Subsets matched by each condition, keyed by 1-based index.
    pub conditions: BTreeMap<usize, u64>,
    pub violations: u64,
    pub ambiguous: u64,
    /// `(rank, mask)` of the lowest-ranked violations or ambiguous matches.
    pub recorded: Vec<(u64, u64)>,
}

impl LemmaTally {
    fn record(&mut self, rank: u64, mask: u64) {
        self.recorded.push((rank, mask));
        if self.recorded.len() > 2 * MAX_RECORDED_VIOLATIONS {
            self.trim();
        }
    }

    fn trim(&mut self) {
        self.recorded.sort_unstable();
        self.recorded.truncate(MAX_RECORDED_VIOLATIONS);
    }
}

impl Tally for LemmaTally {
    fn merge(&mut self, other: Self) {
        for (k, v) in other.conditions {
            *self.conditions.entry(k).or_default() += v;
        }
        self.violations += other.violations;
        self.ambiguous += other.ambiguous;
        self.recorded.extend(other.recorded);
        self.trim();
    }
}

/// Plan for classifying every `size`-subset of `CQ_n`.
pub fn sweep_plan(cube: &CrossedCube, size: usize, budget: u64) -> Result<(LemmaId, SweepPlan)> {
    let lemma = LemmaId::for_size(cube.n(), size).ok_or(Error::NotApplicable { n: cube.n(), size })?;
    let kernel = MaskCube::new(cube)?;
    let total = binomial(kernel.vertex_count() as u64, size as u64);
    if total > budget as u128 {
        return Err(Error::BudgetExceeded(Refusal { needed: total, budget, lower: 0, upper: None }));
    }
    Ok((lemma, SweepPlan::new(kernel.vertex_count(), size as u32)))
}

/// Continues a classification sweep from `checkpoint`.
pub fn continue_sweep<B: FnMut(&Checkpoint<LemmaTally>)>(
    cube: &CrossedCube,
    lemma: LemmaId,
    checkpoint: Checkpoint<LemmaTally>,
    control: SweepControl,
    on_batch: B,
) -> Result<Checkpoint<LemmaTally>> {
    let kernel = MaskCube::new(cube)?;
    let connected_index = lemma
        .conditions()
        .iter()
        .position(|c| c.components == 1 && c.required.is_empty())
        .map(|i| i + 1);
    Ok(sweep::run(
        checkpoint,
        control,
        |t: &mut LemmaTally, rank, mask| {
            let alive = kernel.full() & !mask;
            if let (Some(i), true) = (connected_index, alive != 0 && kernel.is_connected(alive)) {
                *t.conditions.entry(i).or_default() += 1;
                return;
            }
            match lemma.match_profile(&kernel.profile(mask)) {
                ConditionMatch::Condition(i) => *t.conditions.entry(i).or_default() += 1,
                ConditionMatch::Violation => {
                    t.violations += 1;
                    t.record(rank, mask);
                }
                ConditionMatch::Ambiguous(_) => {
                    t.ambiguous += 1;
                    t.record(rank, mask);
                }
            }
        },
        on_batch,
    ))
}

#[derive(Debug, Clone, Serialize)]
pub struct RecordedViolation {
    pub rank: u64,
    pub faults: Vec<String>,
    pub profile: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaSweepReport {
    pub n: u32,
    pub size: usize,
    pub lemma: String,
    pub total_subsets: u64,
    pub visited: u64,
    pub complete: bool,
    /// Counts keyed by `"index: label"`.
    pub condition_histogram: BTreeMap<String, u64>,
    pub violation_count: u64,
    pub ambiguous_count: u64,
    pub violations: Vec<RecordedViolation>,
}

impl LemmaSweepReport {
    pub fn from_checkpoint(cube: &CrossedCube, lemma: LemmaId, cp: &Checkpoint<LemmaTally>) -> Self {
        let kernel = MaskCube::new(cube).expect("sweep ran on a mask-sized cube");
        let condition_histogram = lemma
            .conditions()
            .iter()
            .enumerate()
            .map(|(i, c)| (format!("{}: {}", i + 1, c.label), cp.tally.conditions.get(&(i + 1)).copied().unwrap_or(0)))
            .collect();
        let violations = cp
            .tally
            .recorded
            .iter()
            .map(|&(rank, mask)| RecordedViolation {
                rank,
                faults: VertexSet::from_mask(cube.dim(), mask).to_binary_labels(),
                profile: kernel.profile(mask).to_string(),
            })
            .collect();
        LemmaSweepReport {
            n: cube.n(),
            size: cp.plan.size as usize,
            lemma: lemma.name().to_string(),
            total_subsets: cp.plan.total,
            visited: cp.visited(),
            complete: cp.is_complete(),
            condition_histogram,
            violation_count: cp.tally.violations,
            ambiguous_count: cp.tally.ambiguous,
            violations,
        }
    }

    pub fn is_clean(&self) -> bool {
        self.complete && self.violation_count == 0 && self.ambiguous_count == 0
    }
}

/// Classifies every `size`-subset of `CQ_n` (`n <= 6`).
pub fn sweep_lemma(cube: &CrossedCube, size: usize, budget: u64) -> Result<LemmaSweepReport> {
    let (lemma, plan) = sweep_plan(cube, size, budget)?;
    let cp = continue_sweep(cube, lemma, Checkpoint::start(plan), SweepControl::default(), |_| {})?;
    Ok(LemmaSweepReport::from_checkpoint(cube, lemma, &cp))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::Dimension;

    #[test]
    fn applicability_ranges() {
        assert_eq!(LemmaId::for_size(4, 6), Some(LemmaId::Cq4Size6));
        assert_eq!(LemmaId::for_size(5, 10), Some(LemmaId::Cq5Size10));
        assert_eq!(LemmaId::for_size(5, 7), Some(LemmaId::UpTo2nMinus3));
        assert_eq!(LemmaId::for_size(5, 8), Some(LemmaId::UpTo3nMinus6));
        assert_eq!(LemmaId::for_size(6, 15), Some(LemmaId::UpTo4nMinus9));
        assert_eq!(LemmaId::for_size(6, 14), Some(LemmaId::UpTo4nMinus10));
        assert_eq!(LemmaId::for_size(5, 3), None);
        assert_eq!(LemmaId::for_size(4, 7), None);
    }

    #[test]
    fn exceptional_cut_is_two_order_five() {
        let cube = CrossedCube::new(4).unwrap();
        let f = VertexSet::from_binary(cube.dim(), ["0100", "0111", "0011", "1000", "1110", "1011"]).unwrap();
        let v = classify_lemma(&cube, &f).unwrap();
        assert_eq!(v.condition, ConditionMatch::Condition(5));
        assert_eq!(v.condition_label(), Some("two components of order 5"));
        assert!(v.witness.is_none());
    }

    #[test]
    fn connected_remainder_is_condition_one() {
        let cube = CrossedCube::new(5).unwrap();
        let f = VertexSet::from_labels(cube.dim(), 0..10).unwrap();
        let v = classify_lemma(&cube, &f).unwrap();
        if v.profile.is_connected() {
            assert_eq!(v.condition, ConditionMatch::Condition(1));
        }
        let g = VertexSet::from_labels(cube.dim(), [1, 2, 4, 8, 16, 3, 5, 6, 9, 10]).unwrap();
        let v = classify_lemma(&cube, &g).unwrap();
        assert!(!v.condition.is_violation(), "{:?}", v.profile);
    }

    #[test]
    fn violations_carry_a_witness() {
        let p = ComponentProfile::from_shapes(vec![ComponentShape::Path3, ComponentShape::Other(20)]);
        assert_eq!(LemmaId::Cq5Size10.match_profile(&p), ConditionMatch::Violation);
        let cube = CrossedCube::new(4).unwrap();
        assert!(matches!(
            classify_lemma(&cube, &VertexSet::empty(Dimension::new(4).unwrap())),
            Err(Error::NotApplicable { .. })
        ));
    }

    #[test]
    fn ambiguous_profiles_are_reported() {
        let p = ComponentProfile::from_shapes(vec![ComponentShape::IsolatedVertex, ComponentShape::K2]);
        assert_eq!(LemmaId::Cq5Size10.match_profile(&p), ConditionMatch::Ambiguous(vec![2, 4]));
    }
}
