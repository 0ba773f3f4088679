//! Colorings of triples, vertex sets, simple graphs and color censuses.

mod coloring;
mod graph;

use alloc::vec::Vec;
use core::fmt;

pub use coloring::{Backing, PackedColors, TripleColoring, MAX_COLORS, MAX_VERTICES};
pub use graph::SimpleGraph;

use crate::math::choose3;

pub type Vertex = u32;

/// A color in `[0, l)` of the owning coloring.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(transparent))]
pub struct ColorId(pub u8);

impl ColorId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for ColorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("vertex {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: Vertex, n: u32 },
    #[error("vertex {vertex} repeated")]
    RepeatedVertex { vertex: Vertex },
    #[error("vertex ids must be strictly increasing")]
    NotSorted,
    #[error("{colors} colors requested, supported range is 1..={max}")]
    ColorCount { colors: u32, max: u32 },
    #[error("{n} vertices requested, supported range is 3..={max}")]
    VertexCount { n: u64, max: u32 },
    #[error("color {color} out of range for {colors} colors")]
    ColorOutOfRange { color: u32, colors: u32 },
    #[error("explicit payload holds {got} colors, expected {expected}")]
    PayloadLength { expected: u64, got: u64 },
    #[error("explicit storage of {triples} triples is not addressable")]
    TooLarge { triples: u64 },
}

/// Sorted, duplicate-free vertex ids.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(transparent))]
pub struct VertexSet(Vec<Vertex>);

impl VertexSet {
    pub fn new() -> Self {
        VertexSet(Vec::new())
    }

    /// Takes ids that must already be strictly increasing.
    pub fn from_sorted(ids: Vec<Vertex>) -> Result<Self, ModelError> {
        if ids.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ModelError::NotSorted);
        }
        Ok(VertexSet(ids))
    }

    pub fn from_unsorted(mut ids: Vec<Vertex>) -> Self {
        ids.sort_unstable();
        ids.dedup();
        VertexSet(ids)
    }

    /// `{start, .., end - 1}`.
    pub fn range(start: Vertex, end: Vertex) -> Self {
        VertexSet((start..end).collect())
    }

    pub fn as_slice(&self) -> &[Vertex] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<Vertex> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.0.iter().copied()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        let (mut a, mut b) = (self.0.iter().peekable(), other.0.iter().peekable());
        while let (Some(&&x), Some(&&y)) = (a.peek(), b.peek()) {
            match x.cmp(&y) {
                core::cmp::Ordering::Less => {
                    a.next();
                }
                core::cmp::Ordering::Greater => {
                    b.next();
                }
                core::cmp::Ordering::Equal => return false,
            }
        }
        true
    }

    /// Keeps the first `len` (smallest) ids.
    pub fn truncate(&mut self, len: usize) {
        self.0.truncate(len);
    }

    pub fn max(&self) -> Option<Vertex> {
        self.0.last().copied()
    }

    /// Set union.
    pub fn union(&self, other: &VertexSet) -> VertexSet {
        let mut ids = Vec::with_capacity(self.len() + other.len());
        ids.extend_from_slice(&self.0);
        ids.extend_from_slice(&other.0);
        VertexSet::from_unsorted(ids)
    }
}

impl FromIterator<Vertex> for VertexSet {
    fn from_iter<I: IntoIterator<Item = Vertex>>(iter: I) -> Self {
        VertexSet::from_unsorted(iter.into_iter().collect())
    }
}

/// Per-color triple counts over a vertex subset.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ColorCensus {
    pub counts: Vec<u64>,
    pub total: u64,
}

impl ColorCensus {
    /// The most frequent color; ties go to the smallest id.
    pub fn majority(&self) -> (ColorId, u64) {
        let mut best = (ColorId(0), 0u64);
        for (c, &count) in self.counts.iter().enumerate() {
            if count > best.1 {
                best = (ColorId(c as u8), count);
            }
        }
        best
    }

    pub fn fraction(&self, color: ColorId) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        self.counts[color.index()] as f64 / self.total as f64
    }
}

/// Counts the triples of `subset` in each color.
pub fn color_census(coloring: &TripleColoring, subset: &VertexSet) -> Result<ColorCensus, ModelError> {
    if let Some(v) = subset.max() {
        if v >= coloring.n_vertices() {
            return Err(ModelError::VertexOutOfRange { vertex: v, n: coloring.n_vertices() });
        }
    }
    let mut counts = alloc::vec![0u64; coloring.n_colors() as usize];
    let s = subset.as_slice();
    for c in 2..s.len() {
        for b in 1..c {
            for a in 0..b {
                counts[coloring.color_sorted(s[a], s[b], s[c]).index()] += 1;
            }
        }
    }
    Ok(ColorCensus { counts, total: choose3(s.len() as u64) })
}
