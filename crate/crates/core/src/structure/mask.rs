//! Word-wide kernel for `n <= 6`: vertex sets are `u64` masks and neighbor
//! sets of whole masks come from per-byte lookup tables.

use smallvec::SmallVec;

use super::{ComponentProfile, ComponentShape};
use crate::error::{Error, Result};
use crate::topology::CrossedCube;

pub const MAX_MASK_DIMENSION: u32 = 6;

pub type Components = SmallVec<[u64; 8]>;

#[derive(Debug, Clone)]
pub struct MaskCube {
    n: u32,
    full: u64,
    nbr: Vec<u64>,
    // tables[j][b] = union of the neighbor masks of the set bits of byte j.
    tables: Vec<[u64; 256]>,
}

impl MaskCube {
    pub fn new(cube: &CrossedCube) -> Result<Self> {
        let n = cube.n();
        if n > MAX_MASK_DIMENSION {
            return Err(Error::InvalidArgument(format!(
                "word-wide kernel supports n <= {MAX_MASK_DIMENSION}, got {n}"
            )));
        }
        let count = cube.vertex_count();
        let full = if count == 64 { u64::MAX } else { (1u64 << count) - 1 };
        let nbr: Vec<u64> = (0..count as u32)
            .map(|u| cube.neighbor_labels(u).fold(0u64, |m, v| m | (1u64 << v)))
            .collect();
        let tables = (0..count.div_ceil(8))
            .map(|j| {
                let mut t = [0u64; 256];
                for b in 1..256usize {
                    let low = b.trailing_zeros() as usize;
                    let bit = 8 * j + low;
                    let own = if bit < count { nbr[bit] } else { 0 };
                    t[b] = t[b & (b - 1)] | own;
                }
                t
            })
            .collect();
        Ok(MaskCube { n, full, nbr, tables })
    }

    #[inline]
    pub fn n(&self) -> u32 {
        self.n
    }

    #[inline]
    pub fn full(&self) -> u64 {
        self.full
    }

    #[inline]
    pub fn vertex_count(&self) -> u32 {
        1 << self.n
    }

    #[inline]
    pub fn neighbors(&self, v: u32) -> u64 {
        self.nbr[v as usize]
    }

    /// Union of the neighbor sets of the members of `set` (may overlap `set`).
    #[inline]
    pub fn adjacent_to(&self, set: u64) -> u64 {
        let mut out = 0;
        let mut s = set;
        let mut j = 0;
        while s != 0 {
            out |= self.tables[j][(s & 0xff) as usize];
            s >>= 8;
            j += 1;
        }
        out
    }

    /// `N(S)` excluding `S` itself.
    #[inline]
    pub fn neighborhood(&self, set: u64) -> u64 {
        self.adjacent_to(set) & !set
    }

    /// The component of `alive` containing the lowest set bit of `seed`.
    #[inline]
    pub fn component_of(&self, alive: u64, seed: u64) -> u64 {
        let mut comp = seed & seed.wrapping_neg();
        let mut frontier = comp;
        while frontier != 0 {
            frontier = self.adjacent_to(frontier) & alive & !comp;
            comp |= frontier;
        }
        comp
    }

    #[inline]
    pub fn is_connected(&self, alive: u64) -> bool {
        alive != 0 && self.component_of(alive, alive) == alive
    }

    /// Components of the subgraph induced by `alive`, ordered by minimum label.
    pub fn components(&self, alive: u64) -> Components {
        let mut out = Components::new();
        let mut rest = alive;
        while rest != 0 {
            let comp = self.component_of(rest, rest);
            out.push(comp);
            rest &= !comp;
        }
        out
    }

    /// Component count of `CQ_n - faults`, stopping early once it exceeds `cap`.
    pub fn count_components(&self, alive: u64, cap: usize) -> usize {
        let mut count = 0;
        let mut rest = alive;
        while rest != 0 && count <= cap {
            rest &= !self.component_of(rest, rest);
            count += 1;
        }
        count
    }

    #[inline]
    pub fn induced_edges(&self, set: u64) -> u32 {
        let mut total = 0;
        let mut s = set;
        while s != 0 {
            let v = s.trailing_zeros();
            total += (self.nbr[v as usize] & set).count_ones();
            s &= s - 1;
        }
        total / 2
    }

    /// Shape of a connected set.
    pub fn shape(&self, comp: u64) -> ComponentShape {
        let order = comp.count_ones();
        match order {
            1 => ComponentShape::IsolatedVertex,
            2 => ComponentShape::K2,
            3 => match self.induced_edges(comp) {
                2 => ComponentShape::Path2,
                _ => ComponentShape::Other(3),
            },
            4 => {
                let mut max_degree = 0;
                let mut s = comp;
                while s != 0 {
                    let v = s.trailing_zeros();
                    max_degree = max_degree.max((self.nbr[v as usize] & comp).count_ones());
                    s &= s - 1;
                }
                match (self.induced_edges(comp), max_degree) {
                    (3, 2) => ComponentShape::Path3,
                    (3, 3) => ComponentShape::Star13,
                    _ => ComponentShape::Other(4),
                }
            }
            k => ComponentShape::Other(k),
        }
    }

    /// Profile of `CQ_n - faults`.
    pub fn profile(&self, faults: u64) -> ComponentProfile {
        let comps = self.components(self.full & !faults);
        ComponentProfile::from_shapes(comps.iter().map(|&c| self.shape(c)).collect())
    }

    /// Every component of `CQ_n - faults` has at least `g + 1` vertices.
    #[inline]
    pub fn is_extra_faulty_set(&self, faults: u64, g: u32) -> bool {
        let mut rest = self.full & !faults;
        while rest != 0 {
            let comp = self.component_of(rest, rest);
            if comp.count_ones() <= g {
                return false;
            }
            rest &= !comp;
        }
        true
    }

    /// `CQ_n - faults` is disconnected and every component has at least `g + 1` vertices.
    #[inline]
    pub fn is_extra_cut(&self, faults: u64, g: u32) -> bool {
        let alive = self.full & !faults;
        if alive == 0 {
            return false;
        }
        let first = self.component_of(alive, alive);
        if first == alive || first.count_ones() <= g {
            return false;
        }
        self.is_extra_faulty_set(faults | first, g)
    }

    pub fn odd_components(&self, faults: u64) -> usize {
        self.components(self.full & !faults).iter().filter(|c| c.count_ones() % 2 == 1).count()
    }
}
