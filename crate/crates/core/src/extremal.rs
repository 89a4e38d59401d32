//! Explicit extremal constructions.
//!
//! `A = {0..0000, 0..0100, 0..0110, 0..0111}` induces a 3-path whose
//! neighborhood has `4n - 9` vertices and leaves the rest of the cube
//! connected. `N(A)` is therefore a 3-extra cut, and `(N(A), A ∪ N(A))` is a
//! pair of 3-extra faulty sets no PMC or MM* syndrome can tell apart.
//! Every constructor checks its claims before returning.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::structure::{self, components, ComponentProfile, ComponentShape};
use crate::topology::{CrossedCube, Dimension};
use crate::vertex_set::VertexSet;

pub const A_LABELS: [u32; 4] = [0b0000, 0b0100, 0b0110, 0b0111];

/// The six-vertex 3-extra cut of `CQ_4` leaving two components of order 5.
pub const CQ4_EXCEPTIONAL: [&str; 6] = ["0100", "0111", "0011", "1000", "1110", "1011"];
pub const CQ4_EXCEPTIONAL_SIDES: [[&str; 5]; 2] = [
    ["0001", "0000", "0010", "0110", "1010"],
    ["0101", "1111", "1001", "1101", "1100"],
];

fn fail(n: Dimension, detail: impl Into<String>) -> Error {
    Error::WitnessFailure { n: n.get(), detail: detail.into() }
}

/// The 3-path `A` shifted into the copy of `CQ_4` selected by `prefix`
/// (the bits above position 3).
pub fn translated_a(n: Dimension, prefix: u32) -> Result<VertexSet> {
    if n.get() < 4 {
        return Err(Error::InvalidArgument("A needs n >= 4".into()));
    }
    if (prefix as u64) >= 1u64 << (n.get() - 4) {
        return Err(Error::InvalidArgument(format!("prefix {prefix} out of range for n = {n}")));
    }
    VertexSet::from_labels(n, A_LABELS.iter().map(|&a| (prefix << 4) | a))
}

pub fn build_a(n: Dimension) -> Result<VertexSet> {
    translated_a(n, 0)
}

#[derive(Debug, Clone)]
pub struct WitnessBundle {
    pub n: Dimension,
    pub a: VertexSet,
    pub na: VertexSet,
    /// `N(A)`.
    pub f1: VertexSet,
    /// `A ∪ N(A)`.
    pub f2: VertexSet,
}

/// Builds and validates the bundle: `A` is a 3-path, `|N(A)| = 4n - 9`,
/// `CQ_n - (A ∪ N(A))` is connected and `N(A)` is a 3-extra cut.
pub fn witness_bundle(n: Dimension) -> Result<WitnessBundle> {
    let cube = CrossedCube::flat(n);
    let a = build_a(n)?;
    if structure::classify_shape(&cube, &a)? != ComponentShape::Path3 {
        return Err(fail(n, "A does not induce a 3-path"));
    }
    let na = cube.neighborhood(&a);
    let expected = 4 * n.get() as usize - 9;
    if na.len() != expected {
        return Err(fail(n, format!("|N(A)| = {}, expected {expected}", na.len())));
    }
    let f2 = a.union(&na);
    let rest = f2.complement();
    if !structure::is_connected_set(&cube, &rest) {
        return Err(fail(n, "CQ_n - (A ∪ N(A)) is disconnected"));
    }
    if !structure::is_g_extra_cut(&cube, &na, 3)? {
        return Err(fail(n, "N(A) is not a 3-extra cut"));
    }
    Ok(WitnessBundle { n, a, f1: na.clone(), na, f2 })
}

/// The exceptional `CQ_4` cut, with its two order-5 sides checked.
pub fn cq4_exceptional_cut() -> Result<(VertexSet, ComponentProfile)> {
    let n = Dimension::new(4)?;
    let cube = CrossedCube::flat(n);
    let cut = VertexSet::from_binary(n, CQ4_EXCEPTIONAL)?;
    let comps = components(&cube, &cut)?;
    let sides = CQ4_EXCEPTIONAL_SIDES
        .iter()
        .map(|s| VertexSet::from_binary(n, s.iter().copied()))
        .collect::<Result<Vec<_>>>()?;
    if comps != sides {
        return Err(fail(n, format!("unexpected components {comps:?}")));
    }
    if !structure::is_g_extra_cut(&cube, &cut, 3)? {
        return Err(fail(n, "exceptional set is not a 3-extra cut"));
    }
    let profile = structure::profile(&cube, &cut)?;
    Ok((cut, profile))
}

#[derive(Debug, Clone, Serialize)]
pub struct BundleReport {
    pub n: u32,
    pub a: Vec<String>,
    pub na: Vec<String>,
    pub f1: Vec<String>,
    pub f2: Vec<String>,
    pub na_size: usize,
    pub f2_size: usize,
}

impl WitnessBundle {
    pub fn report(&self) -> BundleReport {
        BundleReport {
            n: self.n.get(),
            a: self.a.to_binary_labels(),
            na: self.na.to_binary_labels(),
            f1: self.f1.to_binary_labels(),
            f2: self.f2.to_binary_labels(),
            na_size: self.na.len(),
            f2_size: self.f2.len(),
        }
    }
}
