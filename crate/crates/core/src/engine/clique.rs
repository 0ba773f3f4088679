use alloc::vec;
use alloc::vec::Vec;

use crate::model::{ColorId, VertexSet};

/// The pair coloring `chi(a, b)` on round indices `1 <= a < b <= order`.
///
/// Entries are stored column by column (`b` ascending), so growing the order by one
/// appends the colors `chi(1, b), .., chi(b - 1, b)`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PairColorMatrix {
    order: usize,
    entries: Vec<ColorId>,
}

impl PairColorMatrix {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a matrix of `order` from `f(a, b)` for every `a < b`.
    pub fn from_fn(order: usize, mut f: impl FnMut(usize, usize) -> ColorId) -> Self {
        let mut m = Self::new();
        for b in 1..=order {
            let column: Vec<ColorId> = (1..b).map(|a| f(a, b)).collect();
            m.push_column(&column);
        }
        m
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Adds index `order + 1` with `column[a - 1] = chi(a, order + 1)`.
    pub fn push_column(&mut self, column: &[ColorId]) {
        assert_eq!(column.len(), self.order, "column must cover every earlier index");
        self.entries.extend_from_slice(column);
        self.order += 1;
    }

    /// `chi(a, b)` for `1 <= a < b <= order` (arguments may come in either order).
    pub fn get(&self, a: usize, b: usize) -> ColorId {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        assert!(a >= 1 && b <= self.order && a < b, "pair ({a}, {b}) outside the matrix");
        self.entries[(b - 1) * (b - 2) / 2 + (a - 1)]
    }

    pub fn colors_used(&self) -> usize {
        self.entries.iter().map(|c| c.index() + 1).max().unwrap_or(0)
    }
}

/// The lexicographically least set of `size` indices whose pairs all share one color.
///
/// Exact branch-and-bound over candidate bitsets: once two indices are chosen the color
/// is fixed and candidates are restricted to indices joined to every chosen one in it.
pub fn find_mono_clique(chi: &PairColorMatrix, size: usize) -> Option<VertexSet> {
    let order = chi.order();
    if size == 0 || size > order {
        return None;
    }
    if size == 1 {
        return Some(VertexSet::from_unsorted(vec![1]));
    }
    let colors = chi.colors_used();
    let words = (order + 1).div_ceil(64);
    // adjacency[c][v] = indices u with chi(u, v) = c, as a bitset over 1..=order
    let mut adjacency = vec![vec![vec![0u64; words]; order + 1]; colors];
    for b in 2..=order {
        for a in 1..b {
            let c = chi.get(a, b).index();
            adjacency[c][a][b / 64] |= 1 << (b % 64);
            adjacency[c][b][a / 64] |= 1 << (a % 64);
        }
    }

    let mut chosen = Vec::with_capacity(size);
    for first in 1..=(order - size + 1) {
        chosen.push(first);
        for second in (first + 1)..=(order - size + 2) {
            let c = chi.get(first, second).index();
            chosen.push(second);
            let mut cand: Vec<u64> = adjacency[c][first]
                .iter()
                .zip(&adjacency[c][second])
                .map(|(x, y)| x & y)
                .collect();
            clear_upto(&mut cand, second);
            if extend(&adjacency[c], &mut chosen, &mut cand, size) {
                return Some(VertexSet::from_unsorted(chosen.iter().map(|&v| v as u32).collect()));
            }
            chosen.pop();
        }
        chosen.pop();
    }
    None
}

fn clear_upto(bits: &mut [u64], v: usize) {
    for (w, word) in bits.iter_mut().enumerate() {
        let lo = w * 64;
        if lo + 64 <= v + 1 {
            *word = 0;
        } else if lo <= v {
            *word &= u64::MAX << (v + 1 - lo);
        }
    }
}

fn extend(adj: &[Vec<u64>], chosen: &mut Vec<usize>, cand: &mut [u64], size: usize) -> bool {
    if chosen.len() == size {
        return true;
    }
    let available: u32 = cand.iter().map(|w| w.count_ones()).sum();
    if (available as usize) < size - chosen.len() {
        return false;
    }
    let members: Vec<usize> = cand
        .iter()
        .enumerate()
        .flat_map(|(w, &word)| (0..64).filter(move |b| word >> b & 1 == 1).map(move |b| w * 64 + b))
        .collect();
    for v in members {
        let mut next: Vec<u64> = cand.iter().zip(&adj[v]).map(|(x, y)| x & y).collect();
        clear_upto(&mut next, v);
        chosen.push(v);
        if extend(adj, chosen, &mut next, size) {
            return true;
        }
        chosen.pop();
    }
    false
}
