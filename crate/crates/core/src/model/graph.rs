use alloc::vec;
use alloc::vec::Vec;

use super::VertexSet;

/// Undirected simple graph over a vertex universe, stored as bitset rows.
///
/// Vertices are addressed by their local index into the universe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleGraph {
    universe: VertexSet,
    words: usize,
    rows: Vec<u64>,
    edge_count: u64,
}

impl SimpleGraph {
    pub fn empty(universe: VertexSet) -> Self {
        let n = universe.len();
        let words = n.div_ceil(64);
        SimpleGraph { universe, words, rows: vec![0; n * words], edge_count: 0 }
    }

    pub fn complete(universe: VertexSet) -> Self {
        let mut g = Self::empty(universe);
        let n = g.order();
        for u in 0..n {
            let row = &mut g.rows[u * g.words..(u + 1) * g.words];
            for (w, word) in row.iter_mut().enumerate() {
                let lo = w * 64;
                let hi = (lo + 64).min(n);
                *word = if hi - lo == 64 { u64::MAX } else { (1u64 << (hi - lo)) - 1 };
            }
            row[u / 64] &= !(1u64 << (u % 64));
        }
        g.edge_count = (n as u64) * (n.saturating_sub(1) as u64) / 2;
        g
    }

    /// Builds a graph from local-index edges; duplicates and loops are ignored.
    pub fn from_edges(universe: VertexSet, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut g = Self::empty(universe);
        for (u, v) in edges {
            if u != v {
                g.add_edge(u, v);
            }
        }
        g
    }

    pub fn universe(&self) -> &VertexSet {
        &self.universe
    }

    pub fn order(&self) -> usize {
        self.universe.len()
    }

    pub fn edge_count(&self) -> u64 {
        self.edge_count
    }

    /// Number of `u64` words per adjacency row.
    pub fn row_words(&self) -> usize {
        self.words
    }

    #[inline]
    pub fn row(&self, u: usize) -> &[u64] {
        &self.rows[u * self.words..(u + 1) * self.words]
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.rows[u * self.words + v / 64] >> (v % 64) & 1 == 1
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u != v, "loops are not allowed");
        if !self.has_edge(u, v) {
            self.rows[u * self.words + v / 64] |= 1 << (v % 64);
            self.rows[v * self.words + u / 64] |= 1 << (u % 64);
            self.edge_count += 1;
        }
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) {
        if self.has_edge(u, v) {
            self.rows[u * self.words + v / 64] &= !(1 << (v % 64));
            self.rows[v * self.words + u / 64] &= !(1 << (u % 64));
            self.edge_count -= 1;
        }
    }

    pub fn degree(&self, u: usize) -> u32 {
        self.row(u).iter().map(|w| w.count_ones()).sum()
    }

    /// Calls `f(u, v)` for every edge with `u < v`, in lexicographic order.
    pub fn for_each_edge(&self, mut f: impl FnMut(usize, usize)) {
        for u in 0..self.order() {
            self.for_each_upper_neighbor(u, |v| f(u, v));
        }
    }

    /// Calls `f(v)` for every neighbor `v > u`.
    #[inline]
    pub fn for_each_upper_neighbor(&self, u: usize, mut f: impl FnMut(usize)) {
        let row = self.row(u);
        let first = (u + 1) / 64;
        for (w, &word) in row.iter().enumerate().skip(first) {
            let mut bits = if w == first { word & (u64::MAX << ((u + 1) % 64)) } else { word };
            while bits != 0 {
                let b = bits.trailing_zeros() as usize;
                f(w * 64 + b);
                bits &= bits - 1;
            }
        }
    }

    /// Keeps exactly the edges for which `keep(u, v)` (with `u < v`) is true.
    pub fn retain_edges(&mut self, mut keep: impl FnMut(usize, usize) -> bool) {
        let n = self.order();
        for u in 0..n {
            let first = (u + 1) / 64;
            for w in first..self.words {
                let word = self.rows[u * self.words + w];
                let mut bits = if w == first { word & (u64::MAX << ((u + 1) % 64)) } else { word };
                while bits != 0 {
                    let b = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    let v = w * 64 + b;
                    if !keep(u, v) {
                        self.remove_edge(u, v);
                    }
                }
            }
        }
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count as usize);
        self.for_each_edge(|u, v| out.push((u, v)));
        out
    }

    /// Whether every edge of `self` is an edge of `other` on the same universe.
    pub fn is_subgraph_of(&self, other: &SimpleGraph) -> bool {
        self.universe == other.universe
            && self.rows.iter().zip(&other.rows).all(|(a, b)| a & !b == 0)
    }

    /// Approximate heap footprint of the adjacency rows.
    pub fn adjacency_bytes(&self) -> u64 {
        self.rows.len() as u64 * 8
    }
}
