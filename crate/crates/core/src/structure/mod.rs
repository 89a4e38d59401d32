//! Component structure of `CQ_n - F`: flood fill, component shapes,
//! g-extra predicates, exact (extra-)connectivity and lemma classification.

pub mod connectivity;
pub mod extra;
pub mod lemmas;
pub mod mask;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::topology::CrossedCube;
use crate::vertex_set::VertexSet;

pub use connectivity::{connectivity, Connectivity};
pub use extra::{
    enumerate_min_extra_cuts, extra_connectivity, min_cut_census, ExtraConnectivity, MinCutCensus,
};
pub use lemmas::{classify_lemma, sweep_lemma, ConditionMatch, LemmaId, LemmaSweepReport, LemmaVerdict};
pub use mask::MaskCube;

/// Shape of a small connected component. A `Path2` has three vertices and a
/// `Path3` four; everything without a dedicated variant is `Other(order)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ComponentShape {
    IsolatedVertex,
    K2,
    Path2,
    Path3,
    Star13,
    Other(u32),
}

impl ComponentShape {
    pub fn order(self) -> u32 {
        match self {
            ComponentShape::IsolatedVertex => 1,
            ComponentShape::K2 => 2,
            ComponentShape::Path2 => 3,
            ComponentShape::Path3 | ComponentShape::Star13 => 4,
            ComponentShape::Other(k) => k,
        }
    }
}

impl fmt::Display for ComponentShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComponentShape::IsolatedVertex => f.write_str("isolated vertex"),
            ComponentShape::K2 => f.write_str("K2"),
            ComponentShape::Path2 => f.write_str("2-path"),
            ComponentShape::Path3 => f.write_str("3-path"),
            ComponentShape::Star13 => f.write_str("K1,3"),
            ComponentShape::Other(k) => write!(f, "order {k}"),
        }
    }
}

/// Multiset of component shapes of `CQ_n - F`, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ComponentProfile {
    pub shapes: Vec<ComponentShape>,
    pub component_count: usize,
    pub max_order: u32,
}

impl ComponentProfile {
    pub fn from_shapes(mut shapes: Vec<ComponentShape>) -> Self {
        shapes.sort_unstable();
        let max_order = shapes.iter().map(|s| s.order()).max().unwrap_or(0);
        ComponentProfile { component_count: shapes.len(), shapes, max_order }
    }

    pub fn total_order(&self) -> u64 {
        self.shapes.iter().map(|s| s.order() as u64).sum()
    }

    pub fn is_connected(&self) -> bool {
        self.component_count == 1
    }

    pub fn count(&self, shape: ComponentShape) -> usize {
        self.shapes.iter().filter(|&&s| s == shape).count()
    }

    /// Exactly two components, one of them of order `order`.
    pub fn is_two_with_one_of_order(&self, order: u32) -> bool {
        self.component_count == 2 && self.shapes.iter().any(|s| s.order() == order)
    }
}

impl fmt::Display for ComponentProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, s) in self.shapes.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{s}")?;
        }
        f.write_str("]")
    }
}

/// Components of `CQ_n - faults`, each a maximal connected set, ordered by
/// minimum label.
pub fn components(cube: &CrossedCube, faults: &VertexSet) -> Result<Vec<VertexSet>> {
    faults.check_universe(cube.dim())?;
    if let Ok(kernel) = MaskCube::new(cube) {
        let mask = faults.to_mask().unwrap_or(0);
        return Ok(kernel
            .components(kernel.full() & !mask)
            .into_iter()
            .map(|c| VertexSet::from_mask(cube.dim(), c))
            .collect());
    }
    Ok(components_of_alive(cube, &faults.complement()))
}

/// Flood fill over an arbitrary surviving set, for any dimension.
pub(crate) fn components_of_alive(cube: &CrossedCube, alive: &VertexSet) -> Vec<VertexSet> {
    let mut seen = VertexSet::empty(cube.dim());
    let mut out = Vec::new();
    let mut stack = Vec::new();
    for start in alive.labels() {
        if seen.contains_label(start) {
            continue;
        }
        let mut comp = VertexSet::empty(cube.dim());
        seen.insert_label(start);
        stack.push(start);
        while let Some(u) = stack.pop() {
            comp.insert_label(u);
            for v in cube.neighbor_labels(u) {
                if alive.contains_label(v) && !seen.contains_label(v) {
                    seen.insert_label(v);
                    stack.push(v);
                }
            }
        }
        out.push(comp);
    }
    out
}

pub(crate) fn is_connected_set(cube: &CrossedCube, set: &VertexSet) -> bool {
    !set.is_empty() && components_of_alive(cube, set).len() == 1
}

/// Shape of a connected vertex set, by order and induced degree sequence.
pub fn classify_shape(cube: &CrossedCube, comp: &VertexSet) -> Result<ComponentShape> {
    comp.check_universe(cube.dim())?;
    if !is_connected_set(cube, comp) {
        return Err(Error::Disconnected { n: cube.n() });
    }
    let degrees: Vec<usize> = comp
        .labels()
        .map(|u| cube.neighbor_labels(u).filter(|&v| comp.contains_label(v)).count())
        .collect();
    let edges: usize = degrees.iter().sum::<usize>() / 2;
    let max_degree = degrees.iter().copied().max().unwrap_or(0);
    Ok(match (degrees.len(), edges, max_degree) {
        (1, _, _) => ComponentShape::IsolatedVertex,
        (2, _, _) => ComponentShape::K2,
        (3, 2, _) => ComponentShape::Path2,
        (3, _, _) => {
            log::warn!("triangle found in CQ_{}: {:?}", cube.n(), comp);
            ComponentShape::Other(3)
        }
        (4, 3, 2) => ComponentShape::Path3,
        (4, 3, 3) => ComponentShape::Star13,
        (k, _, _) => ComponentShape::Other(k as u32),
    })
}

/// Profile of `CQ_n - faults`.
pub fn profile(cube: &CrossedCube, faults: &VertexSet) -> Result<ComponentProfile> {
    let comps = components(cube, faults)?;
    let shapes = comps
        .iter()
        .map(|c| classify_shape(cube, c))
        .collect::<Result<Vec<_>>>()?;
    Ok(ComponentProfile::from_shapes(shapes))
}

/// Every component of `CQ_n - F` has at least `g + 1` vertices. Vacuously
/// true when `F` is the whole vertex set.
pub fn is_g_extra_faulty_set(cube: &CrossedCube, faults: &VertexSet, g: u32) -> Result<bool> {
    Ok(components(cube, faults)?.iter().all(|c| c.len() > g as usize))
}

/// `CQ_n - F` is disconnected and every component has at least `g + 1`
/// vertices. Removing every vertex leaves nothing to disconnect, so `F = V`
/// is not a cut.
pub fn is_g_extra_cut(cube: &CrossedCube, faults: &VertexSet, g: u32) -> Result<bool> {
    let comps = components(cube, faults)?;
    Ok(comps.len() >= 2 && comps.iter().all(|c| c.len() > g as usize))
}

/// Number of odd-order components of `CQ_n - S`.
pub fn odd_components(cube: &CrossedCube, set: &VertexSet) -> Result<usize> {
    Ok(components(cube, set)?.iter().filter(|c| c.len() % 2 == 1).count())
}
