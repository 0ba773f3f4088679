//! Complete bipartite extraction from dense bipartite hosts and dense graphs.
//!
//! Both operations are Kővári–Sós–Turán double-counting arguments made constructive:
//!
//! * [`kst_bipartite`]: a host with parts `A`, `B` and at least `|A||B|/l` edges contains
//!   `K_{a,b}` with `a = floor(|A|/l)` vertices of `A` and `b >= ceil(2^-|A| |B|)` elements of `B`.
//!   Found exactly with a superset-sum transform over neighborhood signatures.
//! * [`kst_dense`]: a graph of order `n` with `eps n^2` edges and `t < eps n` contains `t`
//!   vertices whose common neighborhood has at least `ceil(eps^t n) - t` vertices.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use crate::gen::{CounterStream, STREAM_RESTART};
use crate::math::{binomial, ceil_density_power, ceil_shift};
use crate::model::{SimpleGraph, Vertex, VertexSet};

/// Widest neighborhood signature a bipartite host may carry.
pub const MAX_SIGNATURE_WIDTH: u32 = 30;
/// Exhaustive dense search is chosen when `C(n, t)` is at most this.
pub const EXHAUSTIVE_SUBSET_BUDGET: u128 = 1_000_000;
pub const DEFAULT_RESTARTS: u32 = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "snake_case"))]
pub enum HostKind {
    Bipartite,
    DenseGraph,
}

/// A complete bipartite certificate.
///
/// For bipartite hosts `a_side` holds vertex ids of `A` and `b_side` indices into `B`.
/// For dense graphs both sides hold vertex ids of the graph's universe.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BicliqueWitness {
    pub a_side: Vec<u32>,
    pub b_side: Vec<u32>,
    pub host_kind: HostKind,
    /// The size `b_side` is guaranteed to reach.
    pub guarantee: u64,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum LemmaError {
    #[error("precondition violated: {0}")]
    PreconditionViolated(Precondition),
    #[error("search returned {} common neighbors, below the guarantee {guarantee}", best.b_side.len())]
    SearchBudgetExceeded { best: Box<BicliqueWitness>, guarantee: u64 },
    #[error("signature width {width} exceeds {max}", max = MAX_SIGNATURE_WIDTH)]
    SignatureTooWide { width: u32 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
pub enum Precondition {
    #[error("host has {edges} edges, fewer than |A||B|/l = {a_len}*{b_len}/{colors}")]
    EdgeDeficit { edges: u64, a_len: u64, b_len: u64, colors: u32 },
    #[error("floor(|A|/l) = 0 for |A| = {a_len}, l = {colors}")]
    EmptySide { a_len: u64, colors: u32 },
    #[error("t = {t} is not below eps*n = {edges}/{order}")]
    TooDense { t: u64, edges: u64, order: u64 },
    #[error("t must be at least 1")]
    ZeroT,
}

/// Counts of `B`-elements per exact neighborhood signature over `A`.
#[derive(Clone, Debug)]
pub struct SignatureHistogram {
    width: u32,
    counts: Vec<u64>,
}

impl SignatureHistogram {
    pub fn new(width: u32) -> Result<Self, LemmaError> {
        if width > MAX_SIGNATURE_WIDTH {
            return Err(LemmaError::SignatureTooWide { width });
        }
        Ok(SignatureHistogram { width, counts: vec![0; 1usize << width] })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    #[inline]
    pub fn add(&mut self, signature: u32) {
        self.counts[signature as usize] += 1;
    }

    pub fn add_many(&mut self, signature: u32, n: u64) {
        self.counts[signature as usize] += n;
    }

    /// Number of elements recorded.
    pub fn elements(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Number of (A-vertex, B-element) adjacencies recorded.
    pub fn adjacencies(&self) -> u64 {
        self.counts.iter().enumerate().map(|(s, &c)| c * (s as u32).count_ones() as u64).sum()
    }

    /// `out[m]` = number of elements whose signature contains `m`.
    pub fn superset_sums(&self) -> Vec<u64> {
        let mut sums = self.counts.clone();
        for bit in 0..self.width {
            let step = 1usize << bit;
            for chunk in sums.chunks_exact_mut(step * 2) {
                let (without, with) = chunk.split_at_mut(step);
                for (z, o) in without.iter_mut().zip(with.iter()) {
                    *z += *o;
                }
            }
        }
        sums
    }

    /// The `size`-subset of `A` (as a bitmask) covered by the most elements, with that count.
    ///
    /// Ties go to the lexicographically smallest subset.
    pub fn best_subset(&self, size: u32) -> (u32, u64) {
        assert!(size <= self.width, "subset larger than the signature width");
        let sums = self.superset_sums();
        if size == 0 {
            return (0, sums[0]);
        }
        let mut best_mask = 0u32;
        let mut best = None::<u64>;
        let mut mask: u64 = (1u64 << size) - 1;
        let limit = 1u64 << self.width;
        while mask < limit {
            let count = sums[mask as usize];
            let better = match best {
                None => true,
                Some(b) => count > b || (count == b && lex_less(mask as u32, best_mask)),
            };
            if better {
                best = Some(count);
                best_mask = mask as u32;
            }
            // next mask with the same popcount (Gosper)
            let c = mask & mask.wrapping_neg();
            let r = mask + c;
            mask = (((r ^ mask) >> 2) / c) | r;
        }
        (best_mask, best.unwrap_or(0))
    }
}

/// Whether the index set `x` is lexicographically smaller than `y` (same size).
#[inline]
fn lex_less(x: u32, y: u32) -> bool {
    let diff = x ^ y;
    diff != 0 && x & (diff & diff.wrapping_neg()) != 0
}

/// A bipartite graph given by, for each element of `B`, its neighborhood in `A` as a bitmask.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteHost {
    side_a: VertexSet,
    signatures: Vec<u32>,
    edge_count: u64,
}

impl BipartiteHost {
    /// `signatures[b]` has bit `x` set when `b` is adjacent to the `x`-th vertex of `side_a`.
    pub fn new(side_a: VertexSet, signatures: Vec<u32>) -> Result<Self, LemmaError> {
        let width = side_a.len() as u32;
        if width > MAX_SIGNATURE_WIDTH {
            return Err(LemmaError::SignatureTooWide { width });
        }
        let mask = if width == 32 { u32::MAX } else { (1u32 << width) - 1 };
        let signatures: Vec<u32> = signatures.into_iter().map(|s| s & mask).collect();
        let edge_count = signatures.iter().map(|s| s.count_ones() as u64).sum();
        Ok(BipartiteHost { side_a, signatures, edge_count })
    }

    pub fn side_a(&self) -> &VertexSet {
        &self.side_a
    }

    pub fn side_b_size(&self) -> u64 {
        self.signatures.len() as u64
    }

    pub fn signatures(&self) -> &[u32] {
        &self.signatures
    }

    pub fn edge_count(&self) -> u64 {
        self.edge_count
    }

    pub fn has_edge(&self, a_index: usize, b: usize) -> bool {
        self.signatures[b] >> a_index & 1 == 1
    }

    /// Checks every `a_side x b_side` pair by enumeration.
    pub fn verify(&self, witness: &BicliqueWitness) -> bool {
        let a_idx: Option<Vec<usize>> = witness
            .a_side
            .iter()
            .map(|v| self.side_a.as_slice().binary_search(v).ok())
            .collect();
        let Some(a_idx) = a_idx else { return false };
        witness.b_side.iter().all(|&b| {
            (b as usize) < self.signatures.len() && a_idx.iter().all(|&a| self.has_edge(a, b as usize))
        })
    }
}

/// Complete bipartite subgraph with `floor(|A|/l)` vertices of `A` in a host with at least
/// `|A||B|/l` edges.
///
/// Among all subsets of that size, the returned one has the most common neighbors in `B`
/// (ties: lexicographically smallest), so `b_side` is at least `ceil(2^-|A| |B|)`.
pub fn kst_bipartite(host: &BipartiteHost, colors: u32) -> Result<BicliqueWitness, LemmaError> {
    let a_len = host.side_a.len() as u64;
    let b_len = host.side_b_size();
    if host.edge_count * (colors as u64) < a_len * b_len {
        return Err(LemmaError::PreconditionViolated(Precondition::EdgeDeficit {
            edges: host.edge_count,
            a_len,
            b_len,
            colors,
        }));
    }
    let a = (a_len / colors as u64) as u32;
    if a == 0 {
        return Err(LemmaError::PreconditionViolated(Precondition::EmptySide { a_len, colors }));
    }
    let mut hist = SignatureHistogram::new(a_len as u32)?;
    for &s in &host.signatures {
        hist.add(s);
    }
    let (mask, count) = hist.best_subset(a);
    let a_side = mask_members(mask).map(|x| host.side_a.as_slice()[x]).collect();
    let b_side: Vec<u32> = (0..b_len as u32)
        .filter(|&b| host.signatures[b as usize] & mask == mask)
        .collect();
    debug_assert_eq!(b_side.len() as u64, count);
    let guarantee = ceil_shift(b_len, a_len as u32);
    debug_assert!(count >= guarantee);
    Ok(BicliqueWitness { a_side, b_side, host_kind: HostKind::Bipartite, guarantee })
}

pub(crate) fn mask_members(mask: u32) -> impl Iterator<Item = usize> {
    (0..32).filter(move |x| mask >> x & 1 == 1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchMode {
    /// Every `t`-subset, exact optimum.
    Exhaustive,
    /// Greedy growth of `U` from `restarts` starting vertices.
    Greedy { restarts: u32, seed: u64 },
}

impl SearchMode {
    /// Exhaustive when `C(n, t)` fits the subset budget, otherwise greedy with default restarts.
    pub fn auto(order: usize, t: usize, seed: u64) -> Self {
        if binomial(order as u64, t as u64) <= EXHAUSTIVE_SUBSET_BUDGET {
            SearchMode::Exhaustive
        } else {
            SearchMode::Greedy { restarts: DEFAULT_RESTARTS, seed }
        }
    }
}

/// `ceil(eps^t n) - t` with `eps = e / n^2`, floored at zero.
pub fn dense_guarantee(edges: u64, order: u64, t: u64) -> u64 {
    ceil_density_power(edges, order, t as u32).saturating_sub(t)
}

/// Result of a common-neighborhood search, in local indices of the graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct CommonNeighborhood {
    pub u: Vec<usize>,
    pub w: Vec<usize>,
}

/// `t` vertices of `g` whose common neighborhood is large, and that neighborhood.
///
/// Exhaustive mode returns the maximum (lexicographically smallest `U` on ties).
pub fn kst_dense(g: &SimpleGraph, t: usize, mode: SearchMode) -> Result<BicliqueWitness, LemmaError> {
    if t == 0 {
        return Err(LemmaError::PreconditionViolated(Precondition::ZeroT));
    }
    let order = g.order() as u64;
    // t < eps n  <=>  t n < e
    if (t as u128) * (order as u128) >= g.edge_count() as u128 {
        return Err(LemmaError::PreconditionViolated(Precondition::TooDense {
            t: t as u64,
            edges: g.edge_count(),
            order,
        }));
    }
    let guarantee = dense_guarantee(g.edge_count(), order, t as u64);
    let found = search_common_neighborhood(g, t, mode);
    let ids = g.universe().as_slice();
    let witness = BicliqueWitness {
        a_side: found.u.iter().map(|&x| ids[x]).collect(),
        b_side: found.w.iter().map(|&x| ids[x]).collect(),
        host_kind: HostKind::DenseGraph,
        guarantee,
    };
    if (witness.b_side.len() as u64) < guarantee {
        // only reachable for greedy search; exhaustive search always meets the bound
        return Err(LemmaError::SearchBudgetExceeded { best: Box::new(witness), guarantee });
    }
    Ok(witness)
}

/// Checks that `a_side` and `b_side` are disjoint and completely joined in `g`.
pub fn verify_dense_witness(g: &SimpleGraph, witness: &BicliqueWitness) -> bool {
    let ids = g.universe().as_slice();
    let local = |v: &Vertex| ids.binary_search(v).ok();
    let (Some(a), Some(b)) = (
        witness.a_side.iter().map(local).collect::<Option<Vec<_>>>(),
        witness.b_side.iter().map(local).collect::<Option<Vec<_>>>(),
    ) else {
        return false;
    };
    a.iter().all(|&x| !b.contains(&x)) && a.iter().all(|&x| b.iter().all(|&y| g.has_edge(x, y)))
}

pub(crate) fn search_common_neighborhood(g: &SimpleGraph, t: usize, mode: SearchMode) -> CommonNeighborhood {
    let n = g.order();
    if t == 0 || t > n {
        return CommonNeighborhood { u: Vec::new(), w: Vec::new() };
    }
    match mode {
        SearchMode::Exhaustive => exhaustive(g, t),
        SearchMode::Greedy { restarts, seed } => greedy(g, t, restarts.max(1), seed),
    }
}

fn bits_members(bits: &[u64]) -> Vec<usize> {
    let mut out = Vec::new();
    for (w, &word) in bits.iter().enumerate() {
        let mut b = word;
        while b != 0 {
            out.push(w * 64 + b.trailing_zeros() as usize);
            b &= b - 1;
        }
    }
    out
}

fn popcount(bits: &[u64]) -> u64 {
    bits.iter().map(|w| w.count_ones() as u64).sum()
}

fn and_count(a: &[u64], b: &[u64]) -> u64 {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones() as u64).sum()
}

fn exhaustive(g: &SimpleGraph, t: usize) -> CommonNeighborhood {
    struct Search<'a> {
        g: &'a SimpleGraph,
        t: usize,
        chosen: Vec<usize>,
        best_u: Vec<usize>,
        best_bits: Vec<u64>,
        best_count: Option<u64>,
        scratch: Vec<Vec<u64>>,
    }

    impl Search<'_> {
        // Subsets are visited in lexicographic order; a branch is cut when its running
        // neighborhood cannot strictly beat the best found so far.
        fn descend(&mut self, start: usize, depth: usize) {
            let n = self.g.order();
            for v in start..=(n - (self.t - depth)) {
                let row = self.g.row(v);
                let mut next = core::mem::take(&mut self.scratch[depth]);
                if depth == 0 {
                    next.copy_from_slice(row);
                } else {
                    for ((dst, a), b) in next.iter_mut().zip(&self.scratch[depth - 1]).zip(row) {
                        *dst = a & b;
                    }
                }
                let count = popcount(&next);
                let viable = self.best_count.is_none_or(|b| count > b);
                if viable {
                    self.chosen.push(v);
                    if depth + 1 == self.t {
                        self.best_count = Some(count);
                        self.best_u.clone_from(&self.chosen);
                        self.best_bits.copy_from_slice(&next);
                        self.scratch[depth] = next;
                    } else {
                        self.scratch[depth] = next;
                        self.descend(v + 1, depth + 1);
                    }
                    self.chosen.pop();
                } else {
                    self.scratch[depth] = next;
                }
            }
        }
    }

    let words = g.row_words();
    let mut s = Search {
        g,
        t,
        chosen: Vec::with_capacity(t),
        best_u: Vec::new(),
        best_bits: vec![0; words],
        best_count: None,
        scratch: vec![vec![0; words]; t],
    };
    s.descend(0, 0);
    CommonNeighborhood { w: bits_members(&s.best_bits), u: s.best_u }
}

fn greedy(g: &SimpleGraph, t: usize, restarts: u32, seed: u64) -> CommonNeighborhood {
    let n = g.order();
    let stream = CounterStream::new(seed, STREAM_RESTART);
    let mut best: Option<(u64, Vec<usize>, Vec<u64>)> = None;
    for r in 0..restarts {
        let start = if r == 0 {
            // smallest vertex of maximum degree
            (0..n).max_by_key(|&v| (g.degree(v), core::cmp::Reverse(v))).unwrap()
        } else {
            stream.below(r as u64, n as u64) as usize
        };
        let mut u = vec![start];
        let mut cur = g.row(start).to_vec();
        while u.len() < t {
            let mut pick = None::<(u64, usize)>;
            for v in 0..n {
                if u.contains(&v) {
                    continue;
                }
                let c = and_count(&cur, g.row(v));
                if pick.is_none_or(|(bc, _)| c > bc) {
                    pick = Some((c, v));
                }
            }
            let (_, v) = pick.unwrap();
            for (dst, b) in cur.iter_mut().zip(g.row(v)) {
                *dst &= b;
            }
            u.push(v);
        }
        u.sort_unstable();
        let count = popcount(&cur);
        if best.as_ref().is_none_or(|(bc, _, _)| count > *bc) {
            best = Some((count, u, cur));
        }
    }
    let (_, u, bits) = best.unwrap();
    CommonNeighborhood { u, w: bits_members(&bits) }
}
