//! The crossed cube `CQ_n`.
//!
//! Two constructions are provided. The flat rule decides adjacency of two
//! labels directly from their bit patterns and is the canonical oracle. The
//! recursive construction doubles `CQ_{n-1}` and joins the halves with the
//! cross-edge matching; it is materialized only to cross-validate the flat
//! rule, which it must reproduce edge for edge.
//!
//! Bit `i` of a label is coordinate `v_i`, so bit 0 is the least significant.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vertex_set::VertexSet;

pub const MAX_DIMENSION: u32 = 30;

/// Largest dimension for which the recursive construction is materialized.
pub const MAX_RECURSIVE_DIMENSION: u32 = 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Dimension(u32);

impl Dimension {
    pub fn new(n: u32) -> Result<Self> {
        if (1..=MAX_DIMENSION).contains(&n) {
            Ok(Dimension(n))
        } else {
            Err(Error::InvalidDimension(n))
        }
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn vertex_count(self) -> usize {
        1usize << self.0
    }

    #[inline]
    pub fn edge_count(self) -> usize {
        self.0 as usize * (1usize << (self.0 - 1))
    }

    /// The dimension of each half of the decomposition along bit `n - 1`.
    pub fn lower(self) -> Option<Dimension> {
        (self.0 > 1).then(|| Dimension(self.0 - 1))
    }
}

impl TryFrom<u32> for Dimension {
    type Error = Error;
    fn try_from(n: u32) -> Result<Self> {
        Dimension::new(n)
    }
}

impl From<Dimension> for u32 {
    fn from(d: Dimension) -> u32 {
        d.0
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vertex(u32);

impl Vertex {
    pub fn new(label: u32, n: Dimension) -> Result<Self> {
        if (label as u64) < (1u64 << n.get()) {
            Ok(Vertex(label))
        } else {
            Err(Error::VertexOutOfRange { label: label as u64, n: n.get() })
        }
    }

    /// Wraps a label without range checking; callers guarantee `label < 2^n`.
    #[inline]
    pub(crate) fn from_raw(label: u32) -> Self {
        Vertex(label)
    }

    #[inline]
    pub fn label(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn bit(self, i: u32) -> bool {
        (self.0 >> i) & 1 == 1
    }

    /// MSB-first binary rendering, e.g. vertex 4 of `CQ_4` is `"0100"`.
    pub fn to_binary(self, n: Dimension) -> String {
        format!("{:0width$b}", self.0, width = n.get() as usize)
    }

    pub fn parse_binary(s: &str, n: Dimension) -> Result<Self> {
        if s.len() != n.get() as usize || !s.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(Error::InvalidArgument(format!(
                "{s:?} is not an {n}-bit binary label"
            )));
        }
        let label = u32::from_str_radix(s, 2)
            .map_err(|e| Error::InvalidArgument(format!("{s:?}: {e}")))?;
        Vertex::new(label, n)
    }
}

/// The pair relation on 2-bit strings `u1 u0`:
/// `R = {(00,00), (10,10), (01,11), (11,01)}`.
///
/// Arguments are the 2-bit values with bit 1 as the first character, so `01`
/// is `1` and `11` is `3`.
pub fn pair_related(a: u8, b: u8) -> bool {
    debug_assert!(a < 4 && b < 4);
    matches!((a, b), (0b00, 0b00) | (0b10, 0b10) | (0b01, 0b11) | (0b11, 0b01))
}

#[inline]
fn block(x: u32, i: u32) -> u8 {
    ((x >> (2 * i)) & 0b11) as u8
}

/// Checks the twisted low-order condition shared by every adjacency clause:
/// for a split position `l` (with `l = n` meaning the top clause),
/// `u_{l-1} != v_{l-1}`, `u_{l-2} = v_{l-2}` when `l` is even, and the 2-bit
/// blocks `0 <= i < floor((l-1)/2)` are pair related.
fn split_condition(u: u32, v: u32, l: u32) -> bool {
    if (u >> (l - 1)) & 1 == (v >> (l - 1)) & 1 {
        return false;
    }
    if l.is_multiple_of(2) && (u >> (l - 2)) & 1 != (v >> (l - 2)) & 1 {
        return false;
    }
    (0..(l - 1) / 2).all(|i| pair_related(block(u, i), block(v, i)))
}

/// Adjacency in `CQ_n` decided directly from the two labels.
pub fn is_adjacent_flat(u: Vertex, v: Vertex, n: Dimension) -> Result<bool> {
    let n = n.get();
    for x in [u, v] {
        if (x.0 as u64) >= (1u64 << n) {
            return Err(Error::VertexOutOfRange { label: x.0 as u64, n });
        }
    }
    let (u, v) = (u.0, v.0);
    // Clause 1: 1 <= l <= n-1 with equal prefix above l.
    for l in 1..n {
        if u >> l == v >> l && split_condition(u, v, l) {
            return Ok(true);
        }
    }
    // Clause 2: the top bit differs.
    Ok(split_condition(u, v, n))
}

/// The unique neighbor of `u` whose highest differing bit is `l - 1`.
#[inline]
fn split_partner(u: u32, l: u32) -> u32 {
    let mut v = u ^ (1 << (l - 1));
    for i in 0..(l - 1) / 2 {
        // (01,11) and (11,01) flip the upper bit of the block; 00 and 10 stay put.
        if (u >> (2 * i)) & 1 == 1 {
            v ^= 1 << (2 * i + 1);
        }
    }
    v
}

/// The cross-edge partner of `u` in `CQ_n`: the neighbor across bit `n - 1`.
pub fn cross_partner(u: Vertex, n: Dimension) -> Result<Vertex> {
    if n.get() < 2 {
        return Err(Error::InvalidArgument("cross edges need n >= 2".into()));
    }
    if (u.0 as u64) >= (1u64 << n.get()) {
        return Err(Error::VertexOutOfRange { label: u.0 as u64, n: n.get() });
    }
    Ok(Vertex(split_partner(u.0, n.get())))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Construction {
    FlatRule,
    Recursive,
}

/// The perfect matching between `CQ_n^0` and `CQ_n^1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossEdgeMatching {
    pub pairs: Vec<(Vertex, Vertex)>,
}

impl CrossEdgeMatching {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// True when every label of `CQ_n` is covered exactly once.
    pub fn is_perfect(&self, n: Dimension) -> bool {
        let mut seen = vec![false; n.vertex_count()];
        for &(a, b) in &self.pairs {
            for x in [a, b] {
                let slot = &mut seen[x.0 as usize];
                if *slot {
                    return false;
                }
                *slot = true;
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// An immutable crossed cube.
#[derive(Debug, Clone)]
pub struct CrossedCube {
    dim: Dimension,
    construction: Construction,
    // Sorted neighbor lists; only kept for the recursive construction.
    adjacency: Option<Vec<Vec<u32>>>,
}

impl CrossedCube {
    /// A cube whose adjacency is computed on demand by the flat rule.
    pub fn new(n: u32) -> Result<Self> {
        Ok(CrossedCube { dim: Dimension::new(n)?, construction: Construction::FlatRule, adjacency: None })
    }

    pub fn flat(dim: Dimension) -> Self {
        CrossedCube { dim, construction: Construction::FlatRule, adjacency: None }
    }

    /// Builds `CQ_n` by recursive doubling and validates it against the flat
    /// rule. Any disagreement is reported as a construction error.
    pub fn recursive(dim: Dimension) -> Result<Self> {
        let edges = build_recursive(dim)?;
        let mut adjacency = vec![Vec::with_capacity(dim.get() as usize); dim.vertex_count()];
        for &(u, v) in &edges {
            adjacency[u as usize].push(v);
            adjacency[v as usize].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        let cube = CrossedCube { dim, construction: Construction::Recursive, adjacency: Some(adjacency) };
        let flat = CrossedCube::flat(dim);
        if cube.edges() != flat.edges() {
            return Err(Error::ConstructionMismatch {
                n: dim.get(),
                detail: "recursive edge set differs from the flat rule".into(),
            });
        }
        Ok(cube)
    }

    #[inline]
    pub fn dim(&self) -> Dimension {
        self.dim
    }

    #[inline]
    pub fn n(&self) -> u32 {
        self.dim.get()
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.dim.vertex_count()
    }

    pub fn construction(&self) -> Construction {
        self.construction
    }

    pub fn vertex(&self, label: u32) -> Result<Vertex> {
        Vertex::new(label, self.dim)
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> {
        (0..self.vertex_count() as u32).map(Vertex)
    }

    /// Neighbor labels of `u`, in increasing split position `l = 1..=n`.
    ///
    /// Allocation free; the hot paths use this rather than [`Self::neighbors`].
    #[inline]
    pub fn neighbor_labels(&self, u: u32) -> impl Iterator<Item = u32> + '_ {
        debug_assert!((u as usize) < self.vertex_count());
        let n = self.dim.get();
        let cached = self.adjacency.as_ref().map(|a| a[u as usize].as_slice());
        let (a, b) = match cached {
            Some(list) => (Some(list.iter().copied()), None),
            None => (None, Some((1..=n).map(move |l| split_partner(u, l)))),
        };
        a.into_iter().flatten().chain(b.into_iter().flatten())
    }

    pub fn neighbors(&self, u: Vertex) -> VertexSet {
        let mut set = VertexSet::empty(self.dim);
        for v in self.neighbor_labels(u.0) {
            set.insert_label(v);
        }
        set
    }

    pub fn is_adjacent(&self, u: Vertex, v: Vertex) -> bool {
        match &self.adjacency {
            Some(adj) => adj[u.0 as usize].binary_search(&v.0).is_ok(),
            None => is_adjacent_flat(u, v, self.dim).unwrap_or(false),
        }
    }

    /// All edges `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut edges = Vec::with_capacity(self.dim.edge_count());
        for u in 0..self.vertex_count() as u32 {
            for v in self.neighbor_labels(u) {
                if u < v {
                    edges.push((u, v));
                }
            }
        }
        edges.sort_unstable();
        edges
    }

    /// `N(S)`: vertices outside `set` adjacent to some member of it.
    pub fn neighborhood(&self, set: &VertexSet) -> VertexSet {
        let mut out = VertexSet::empty(self.dim);
        for u in set.labels() {
            for v in self.neighbor_labels(u) {
                out.insert_label(v);
            }
        }
        out.difference_with(set);
        out
    }

    pub fn cross_edges(&self) -> CrossEdgeMatching {
        let n = self.dim.get();
        if n < 2 {
            return CrossEdgeMatching { pairs: Vec::new() };
        }
        let half = 1u32 << (n - 1);
        let pairs = (0..half)
            .map(|u| (Vertex(u), Vertex(split_partner(u, n))))
            .collect();
        CrossEdgeMatching { pairs }
    }

    /// Splits along bit `n - 1` into the two copies of `CQ_{n-1}` and the
    /// matching between them. Each half is validated against the flat rule
    /// at dimension `n - 1` after dropping the top bit.
    pub fn decompose(&self) -> Result<(CrossedCube, CrossedCube, CrossEdgeMatching)> {
        let lower = self
            .dim
            .lower()
            .ok_or_else(|| Error::InvalidArgument("decomposition needs n >= 2".into()))?;
        let n = self.dim.get();
        let half = 1u32 << (n - 1);
        let expected = CrossedCube::flat(lower).edges();
        for (offset, name) in [(0, "CQ_n^0"), (half, "CQ_n^1")] {
            let mut induced = Vec::new();
            for u in offset..offset + half {
                for v in self.neighbor_labels(u) {
                    if u < v && (offset..offset + half).contains(&v) {
                        induced.push((u - offset, v - offset));
                    }
                }
            }
            induced.sort_unstable();
            if induced != expected {
                return Err(Error::ConstructionMismatch {
                    n,
                    detail: format!("{name} is not a copy of CQ_{}", n - 1),
                });
            }
        }
        let matching = self.cross_edges();
        Ok((CrossedCube::flat(lower), CrossedCube::flat(lower), matching))
    }
}

/// The cross-edge rule between `0u'` and `1v'`: `u_{n-2} = v_{n-2}` when `n`
/// is even, and every low 2-bit block pair lies in `R`.
fn recursive_cross_rule(u: u32, v: u32, n: u32) -> bool {
    const R: [(u8, u8); 4] = [(0b00, 0b00), (0b10, 0b10), (0b01, 0b11), (0b11, 0b01)];
    if n.is_multiple_of(2) && (u >> (n - 2)) & 1 != (v >> (n - 2)) & 1 {
        return false;
    }
    (0..(n - 1) / 2).all(|i| R.contains(&(block(u, i), block(v, i))))
}

/// Adjacency by the recursive definition: labels sharing the top bit are
/// adjacent iff they are adjacent in `CQ_{n-1}`; otherwise the cross rule
/// decides. Cheap enough to sample at dimensions where materializing the
/// recursive edge set is not worthwhile.
pub fn is_adjacent_recursive(u: Vertex, v: Vertex, n: Dimension) -> bool {
    let (mut u, mut v, mut n) = (u.0, v.0, n.get());
    loop {
        if n == 1 {
            return u != v;
        }
        let top = 1u32 << (n - 1);
        if (u & top) != (v & top) {
            return recursive_cross_rule(u & !top, v & !top, n);
        }
        u &= !top;
        v &= !top;
        n -= 1;
    }
}

/// Edge set of `CQ_n` built by recursive doubling: two relabeled copies of
/// `CQ_{n-1}` plus the cross-edge matching found by scanning label pairs
/// against the cross rule. Edges are `(u, v)` with `u < v`, sorted.
pub fn build_recursive(dim: Dimension) -> Result<Vec<(u32, u32)>> {
    if dim.get() > MAX_RECURSIVE_DIMENSION {
        return Err(Error::InvalidArgument(format!(
            "recursive construction is limited to n <= {MAX_RECURSIVE_DIMENSION}"
        )));
    }
    let mut edges = vec![(0u32, 1u32)];
    for n in 2..=dim.get() {
        let half = 1u32 << (n - 1);
        let mut next = Vec::with_capacity(edges.len() * 2 + half as usize);
        next.extend(edges.iter().copied());
        next.extend(edges.iter().map(|&(u, v)| (u | half, v | half)));
        for u in 0..half {
            let mut found = 0;
            for v in 0..half {
                if recursive_cross_rule(u, v, n) {
                    next.push((u, v | half));
                    found += 1;
                }
            }
            if found != 1 {
                return Err(Error::ConstructionMismatch {
                    n,
                    detail: format!("vertex {u} has {found} cross partners"),
                });
            }
        }
        next.sort_unstable();
        edges = next;
    }
    Ok(edges)
}

/// Plain edge list, one `u v` decimal pair per line with `u < v`.
pub fn export_edge_list(cube: &CrossedCube) -> String {
    let mut out = String::new();
    for (u, v) in cube.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

/// DOT-style undirected graph with MSB-first binary labels.
pub fn export_dot(cube: &CrossedCube) -> String {
    let n = cube.dim();
    let mut out = format!("graph CQ{} {{\n", n.get());
    for v in cube.vertices() {
        out.push_str(&format!("  {} [label=\"{}\"];\n", v.label(), v.to_binary(n)));
    }
    for (u, v) in cube.edges() {
        out.push_str(&format!("  {u} -- {v};\n"));
    }
    out.push_str("}\n");
    out
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct GraphDescriptor {
    pub n: u32,
    pub vertices: Vec<String>,
    pub edges: Vec<(u32, u32)>,
}

/// `{n, vertices, edges}` with vertices rendered as binary labels.
pub fn descriptor(cube: &CrossedCube) -> GraphDescriptor {
    let n = cube.dim();
    GraphDescriptor {
        n: n.get(),
        vertices: cube.vertices().map(|v| v.to_binary(n)).collect(),
        edges: cube.edges(),
    }
}

/// True when no three vertices are mutually adjacent.
pub fn is_triangle_free(cube: &CrossedCube) -> bool {
    for u in 0..cube.vertex_count() as u32 {
        let nbrs: BTreeSet<u32> = cube.neighbor_labels(u).collect();
        for &v in &nbrs {
            if v > u && cube.neighbor_labels(v).any(|w| w > v && nbrs.contains(&w)) {
                return false;
            }
        }
    }
    true
}
