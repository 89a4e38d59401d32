use std::fmt;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::topology::{Dimension, Vertex};

/// A set of vertices of `CQ_n`, stored as a bit vector of length `2^n`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VertexSet {
    dim: Dimension,
    bits: FixedBitSet,
}

impl VertexSet {
    pub fn empty(dim: Dimension) -> Self {
        VertexSet { dim, bits: FixedBitSet::with_capacity(dim.vertex_count()) }
    }

    pub fn full(dim: Dimension) -> Self {
        let mut bits = FixedBitSet::with_capacity(dim.vertex_count());
        bits.insert_range(..);
        VertexSet { dim, bits }
    }

    pub fn from_labels<I: IntoIterator<Item = u32>>(dim: Dimension, labels: I) -> Result<Self> {
        let mut set = VertexSet::empty(dim);
        for label in labels {
            set.insert(Vertex::new(label, dim)?);
        }
        Ok(set)
    }

    /// Parses MSB-first binary labels such as `"0100"`.
    pub fn from_binary<'a, I: IntoIterator<Item = &'a str>>(dim: Dimension, labels: I) -> Result<Self> {
        let mut set = VertexSet::empty(dim);
        for s in labels {
            set.insert(Vertex::parse_binary(s, dim)?);
        }
        Ok(set)
    }

    /// Bit `i` of `mask` is label `i`; only valid for `n <= 6`.
    pub fn from_mask(dim: Dimension, mask: u64) -> Self {
        debug_assert!(dim.get() <= 6);
        let mut set = VertexSet::empty(dim);
        let mut m = mask;
        while m != 0 {
            set.bits.insert(m.trailing_zeros() as usize);
            m &= m - 1;
        }
        set
    }

    /// The set as a word, for `n <= 6`.
    pub fn to_mask(&self) -> Option<u64> {
        (self.dim.get() <= 6).then(|| self.labels().fold(0u64, |m, l| m | (1u64 << l)))
    }

    #[inline]
    pub fn dim(&self) -> Dimension {
        self.dim
    }

    #[inline]
    pub fn insert(&mut self, v: Vertex) {
        self.bits.insert(v.label() as usize);
    }

    #[inline]
    pub(crate) fn insert_label(&mut self, label: u32) {
        self.bits.insert(label as usize);
    }

    pub fn remove(&mut self, v: Vertex) {
        self.bits.set(v.label() as usize, false);
    }

    #[inline]
    pub fn contains(&self, v: Vertex) -> bool {
        self.bits.contains(v.label() as usize)
    }

    #[inline]
    pub fn contains_label(&self, label: u32) -> bool {
        self.bits.contains(label as usize)
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    /// Labels in increasing order.
    pub fn labels(&self) -> impl Iterator<Item = u32> + '_ {
        self.bits.ones().map(|i| i as u32)
    }

    pub fn iter(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.labels().map(Vertex::from_raw)
    }

    pub fn min_label(&self) -> Option<u32> {
        self.bits.minimum().map(|i| i as u32)
    }

    pub fn check_universe(&self, dim: Dimension) -> Result<()> {
        if self.dim == dim {
            Ok(())
        } else {
            Err(Error::UniverseMismatch {
                n: dim.get(),
                expected: dim.vertex_count(),
                found: self.dim.vertex_count(),
            })
        }
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        let mut out = self.clone();
        out.bits.union_with(&other.bits);
        out
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        let mut out = self.clone();
        out.bits.intersect_with(&other.bits);
        out
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        let mut out = self.clone();
        out.bits.difference_with(&other.bits);
        out
    }

    pub fn symmetric_difference(&self, other: &VertexSet) -> VertexSet {
        let mut out = self.clone();
        out.bits.symmetric_difference_with(&other.bits);
        out
    }

    pub fn union_with(&mut self, other: &VertexSet) {
        self.bits.union_with(&other.bits);
    }

    pub fn difference_with(&mut self, other: &VertexSet) {
        self.bits.difference_with(&other.bits);
    }

    pub fn complement(&self) -> VertexSet {
        let mut out = self.clone();
        out.bits.toggle_range(..);
        out
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.bits.is_subset(&other.bits)
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.bits.is_disjoint(&other.bits)
    }

    /// MSB-first binary renderings of the members.
    pub fn to_binary_labels(&self) -> Vec<String> {
        self.iter().map(|v| v.to_binary(self.dim)).collect()
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.to_binary_labels()).finish()
    }
}
