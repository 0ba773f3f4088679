//! Round-based extraction of a monochromatic complete `d`-partite 3-uniform hypergraph.
//!
//! After round `i` the state holds disjoint parts `V_1 .. V_i`, a reservoir `S`, and a pair
//! coloring `chi` on `1..=i` such that for `a < b <= i` every triple in `V_a x V_b x V_c`
//! (`b < c <= i`) and every triple in `V_a x V_b x S` has color `chi(a, b)`.
//!
//! Round `i + 1` refines each part once against a shrinking work graph on `S`
//! ([`refine_step`]) and then splits a new part and a new reservoir off the final work graph
//! ([`close_round`]). A monochromatic `(d-1)`-clique `Q` of `chi` then yields the embedding
//! `{V_q : q in Q}` plus `n` reservoir vertices.

mod clique;
mod verify;

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

pub use clique::{find_mono_clique, PairColorMatrix};
pub use verify::{check_round_invariant, verify_embedding, EmbeddingCheck, Violation};

use crate::lemmas::{
    kst_dense, mask_members, search_common_neighborhood, LemmaError, SearchMode, SignatureHistogram,
    MAX_SIGNATURE_WIDTH,
};
use crate::math::{ceil_shift, reservoir_bound, scheduled_part_size, sqrt_log2};
use crate::model::{ColorId, SimpleGraph, TripleColoring, Vertex, VertexSet};

pub const DEFAULT_RESERVOIR_CAP: usize = 65_536;
pub const DEFAULT_ADAPTIVE_ROUNDS: usize = 32;
/// Upper limit on `l * 2^|part|` histogram cells per refine step.
const MAX_HISTOGRAM_CELLS: u64 = 1 << 26;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "lowercase"))]
pub enum Mode {
    /// Part sizes `floor(l^-i sqrt(log2 N))`, every bound checked, fail fast.
    Strict,
    /// Part sizes from the request, stop as soon as `chi` holds a monochromatic `(d-1)`-clique.
    Adaptive,
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExtractionRequest {
    pub d: usize,
    pub n: usize,
    pub mode: Mode,
    /// Strict: the number of rounds `r`. Adaptive: the most rounds attempted.
    pub r_cap: usize,
    pub reservoir_cap: usize,
    /// Adaptive only: size of each new part (default `n`); parts later shrink toward `n`.
    pub initial_part_size: Option<usize>,
    /// Seed for greedy restarts in large dense searches.
    pub search_seed: u64,
    /// Re-check the round invariant by enumeration after every round.
    pub check_invariants: bool,
}

impl ExtractionRequest {
    pub fn adaptive(d: usize, n: usize) -> Self {
        ExtractionRequest {
            d,
            n,
            mode: Mode::Adaptive,
            r_cap: DEFAULT_ADAPTIVE_ROUNDS.max(d.saturating_sub(1)),
            reservoir_cap: DEFAULT_RESERVOIR_CAP,
            initial_part_size: None,
            search_seed: 0,
            check_invariants: false,
        }
    }

    /// Strict request running exactly `rounds` rounds (an upper bound on `r_2(d-1; l)`).
    pub fn strict(d: usize, n: usize, rounds: usize) -> Self {
        ExtractionRequest { mode: Mode::Strict, r_cap: rounds, ..Self::adaptive(d, n) }
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        if self.d < 3 {
            return Err(EngineErrorKind::InvalidRequest("d must be at least 3").into());
        }
        if self.n == 0 {
            return Err(EngineErrorKind::InvalidRequest("n must be at least 1").into());
        }
        if self.r_cap < self.d - 1 {
            return Err(EngineErrorKind::InvalidRequest("r_cap must be at least d - 1").into());
        }
        if self.reservoir_cap < self.n {
            return Err(EngineErrorKind::InvalidRequest("reservoir_cap must be at least n").into());
        }
        if self.initial_part_size.is_some_and(|s| s < self.n) {
            return Err(EngineErrorKind::InvalidRequest("initial_part_size must be at least n").into());
        }
        Ok(())
    }

    fn adaptive_part_size(&self) -> usize {
        self.initial_part_size.unwrap_or(self.n)
    }
}

/// A monochromatic `K_d^3(n)`: `d` disjoint `n`-sets whose crossing triples all have `color`.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MultipartiteEmbedding {
    pub parts: Vec<VertexSet>,
    pub color: ColorId,
}

impl MultipartiteEmbedding {
    pub fn vertices(&self) -> VertexSet {
        self.parts.iter().flat_map(|p| p.iter()).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "lowercase"))]
pub enum SearchKind {
    Exhaustive,
    Greedy,
}

/// One refine step: part `step` of round `round` refined against the work graph.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StepRecord {
    pub round: usize,
    pub step: usize,
    pub color: ColorId,
    /// Triples of the chosen color among (part vertex, work-graph edge) pairs.
    pub color_count: u64,
    pub part_size_before: usize,
    pub part_size_after: usize,
    pub edges_before: u64,
    pub edges_after: u64,
    pub reservoir_size: usize,
    /// Strict mode: the edge count the step was required to keep.
    pub edge_bound: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CloseRecord {
    pub t: usize,
    pub common_neighbors: usize,
    pub search: SearchKind,
}

/// State after round `round` completed.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RoundRecord {
    pub round: usize,
    pub part_sizes: Vec<usize>,
    pub reservoir_size: usize,
    /// Strict mode: `N^(1/4 + 2^-round)`, the reservoir size the round was required to keep.
    pub reservoir_bound: Option<f64>,
    pub steps: Vec<StepRecord>,
    pub close: Option<CloseRecord>,
}

#[derive(Clone, Debug, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExtractionTrace {
    pub rounds: Vec<RoundRecord>,
    pub achieved_n: usize,
    pub achieved_rounds: usize,
    /// `s / sqrt(log2 N)` for the final vertex count `s = d n`.
    pub achieved_c: f64,
    pub peak_graph_bytes: u64,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum EngineErrorKind {
    #[error("invalid request: {0}")]
    InvalidRequest(&'static str),
    #[error("operation out of order: {0}")]
    InvalidState(&'static str),
    #[error("{quantity} floors to zero")]
    StrictSizeUnderflow { quantity: &'static str },
    #[error("log2 N = {log2_n} is below the required {required}")]
    NotEnoughVertices { log2_n: f64, required: f64 },
    #[error("reservoir exhausted: needed {needed}, found {available}")]
    ReservoirExhausted { needed: usize, available: usize },
    #[error("no monochromatic {size}-clique after {rounds} rounds")]
    CliqueNotFound { size: usize, rounds: usize },
    #[error("strict bound missed at {what}: got {got}, required {bound}")]
    StrictBoundMissed { what: &'static str, got: f64, bound: f64 },
    #[error(transparent)]
    Lemma(#[from] LemmaError),
    #[error("internal error, produced structure failed verification: {0:?}")]
    Internal(Violation),
}

/// An engine failure, with the trace up to the failure point when one exists.
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
#[error("{kind}")]
pub struct EngineError {
    pub kind: EngineErrorKind,
    pub trace: Option<Box<ExtractionTrace>>,
}

impl From<EngineErrorKind> for EngineError {
    fn from(kind: EngineErrorKind) -> Self {
        EngineError { kind, trace: None }
    }
}

/// Live state of an extraction run.
#[derive(Clone, Debug)]
pub struct PartitionState {
    /// Completed rounds `i`.
    pub round: usize,
    /// `V_1 .. V_i`; during round `i + 1` the first `step` parts are already refined.
    pub parts: Vec<VertexSet>,
    /// `S_i`.
    pub reservoir: VertexSet,
    pub chi: PairColorMatrix,
    /// `chi(h, i + 1)` for `h <= step`, chosen during the current round.
    pub pending: Vec<ColorId>,
    /// `G_{step, i}` on `S_i`; `None` stands for the complete graph `G_{0, i}`.
    pub work_graph: Option<SimpleGraph>,
    pub step: usize,
    pub request: ExtractionRequest,
    pub trace: ExtractionTrace,
    n_vertices: u32,
    colors: u32,
    current_steps: Vec<StepRecord>,
}

impl PartitionState {
    fn fail(&self, kind: EngineErrorKind) -> EngineError {
        EngineError { kind, trace: Some(Box::new(self.trace.clone())) }
    }

    fn record_graph(&mut self, g: &SimpleGraph) {
        self.trace.peak_graph_bytes = self.trace.peak_graph_bytes.max(g.adjacency_bytes());
    }

    /// `G_{step, i}`, materializing the complete graph when needed.
    pub fn current_graph(&self) -> SimpleGraph {
        self.work_graph.clone().unwrap_or_else(|| SimpleGraph::complete(self.reservoir.clone()))
    }
}

fn strict_size(n_vertices: u32, colors: u32, round: usize, quantity: &'static str) -> Result<usize, EngineError> {
    match scheduled_part_size(n_vertices as u64, colors, round as u32) {
        0 => Err(EngineErrorKind::StrictSizeUnderflow { quantity }.into()),
        s => Ok(s as usize),
    }
}

fn at_least(got: f64, bound: f64) -> bool {
    got >= bound * (1.0 - 1e-12)
}

/// Round 1: `V_1` is the first part-size vertices, the reservoir the rest (capped).
pub fn init_round(coloring: &TripleColoring, req: &ExtractionRequest) -> Result<PartitionState, EngineError> {
    req.validate()?;
    let n_vertices = coloring.n_vertices();
    let colors = coloring.n_colors();
    let size = match req.mode {
        Mode::Strict => strict_size(n_vertices, colors, 1, "part size l^-1 sqrt(log2 N)")?,
        Mode::Adaptive => req.adaptive_part_size(),
    };
    if size >= n_vertices as usize {
        return Err(EngineErrorKind::ReservoirExhausted { needed: size + 1, available: n_vertices as usize }.into());
    }
    let part = VertexSet::range(0, size as Vertex);
    let mut reservoir = VertexSet::range(size as Vertex, n_vertices);
    reservoir.truncate(req.reservoir_cap);
    let mut state = PartitionState {
        round: 1,
        parts: vec![part],
        reservoir,
        chi: PairColorMatrix::new(),
        pending: Vec::new(),
        work_graph: None,
        step: 0,
        request: req.clone(),
        trace: ExtractionTrace::default(),
        n_vertices,
        colors,
        current_steps: Vec::new(),
    };
    state.chi.push_column(&[]);
    let bound = (req.mode == Mode::Strict).then(|| reservoir_bound(n_vertices as u64, 1));
    if let Some(b) = bound {
        if !at_least(state.reservoir.len() as f64, b) {
            return Err(state.fail(EngineErrorKind::StrictBoundMissed {
                what: "reservoir after round 1",
                got: state.reservoir.len() as f64,
                bound: b,
            }));
        }
    }
    state.trace.rounds.push(RoundRecord {
        round: 1,
        part_sizes: vec![size],
        reservoir_size: state.reservoir.len(),
        reservoir_bound: bound,
        steps: Vec::new(),
        close: None,
    });
    Ok(state)
}

/// Refines part `step + 1` against the work graph: picks the majority color over
/// (part vertex, edge) triples, keeps the best sub-part, and keeps only the edges that
/// form that color with every vertex of the sub-part.
pub fn refine_step(mut state: PartitionState, coloring: &TripleColoring) -> Result<PartitionState, EngineError> {
    if state.step >= state.round {
        return Err(state.fail(EngineErrorKind::InvalidState("all parts of this round are refined")));
    }
    let j = state.step;
    let round = state.round;
    let colors = state.colors as usize;
    let part = state.parts[j].clone();
    let width = part.len() as u32;
    if width > MAX_SIGNATURE_WIDTH || (colors as u64) << width > MAX_HISTOGRAM_CELLS {
        return Err(state.fail(LemmaError::SignatureTooWide { width }.into()));
    }
    let mut graph = match state.work_graph.take() {
        Some(g) => g,
        None => SimpleGraph::complete(state.reservoir.clone()),
    };
    state.record_graph(&graph);
    let edges_before = graph.edge_count();
    if edges_before == 0 {
        return Err(state.fail(EngineErrorKind::ReservoirExhausted { needed: 1, available: 0 }));
    }

    let mut hists: Vec<SignatureHistogram> = (0..colors)
        .map(|_| SignatureHistogram::new(width))
        .collect::<Result<_, _>>()
        .map_err(|e| state.fail(e.into()))?;
    {
        let ids = graph.universe().as_slice();
        let a_ids = part.as_slice();
        let mut sig = [0u32; crate::model::MAX_COLORS as usize];
        graph.for_each_edge(|u, v| {
            let (w, w2) = (ids[u], ids[v]);
            for (x, &a) in a_ids.iter().enumerate() {
                sig[coloring.color_unordered(a, w, w2).index()] |= 1 << x;
            }
            for (c, s) in sig.iter_mut().take(colors).enumerate() {
                if *s != 0 {
                    hists[c].add(*s);
                    *s = 0;
                }
            }
        });
    }
    let mut color = ColorId(0);
    let mut color_count = 0u64;
    for (c, h) in hists.iter().enumerate() {
        let count = h.adjacencies();
        if count > color_count {
            color = ColorId(c as u8);
            color_count = count;
        }
    }

    let target = match state.request.mode {
        Mode::Strict => {
            let s = part.len() / colors;
            if s == 0 {
                return Err(state.fail(EngineErrorKind::StrictSizeUnderflow { quantity: "refined part size |V|/l" }));
            }
            s
        }
        Mode::Adaptive => state.request.n.max(part.len() / colors).min(part.len()),
    };
    let (mask, kept) = hists[color.index()].best_subset(target as u32);
    drop(hists);
    let refined: Vec<Vertex> = mask_members(mask).map(|x| part.as_slice()[x]).collect();

    if state.request.mode == Mode::Strict {
        let lemma = ceil_shift(edges_before, width);
        if kept < lemma {
            return Err(state.fail(EngineErrorKind::StrictBoundMissed {
                what: "bipartite lemma in refine step",
                got: kept as f64,
                bound: lemma as f64,
            }));
        }
    }

    {
        let ids = graph.universe().as_slice().to_vec();
        graph.retain_edges(|u, v| {
            let (w, w2) = (ids[u], ids[v]);
            refined.iter().all(|&a| coloring.color_unordered(a, w, w2) == color)
        });
    }
    debug_assert_eq!(graph.edge_count(), kept);

    let edge_bound = (state.request.mode == Mode::Strict).then(|| {
        let s = state.reservoir.len() as f64;
        let exponent = -2.0 - (j as f64 + 1.0) * sqrt_log2(state.n_vertices as u64) / libm::pow(colors as f64, round as f64);
        libm::exp2(exponent) * s * s
    });
    if let Some(b) = edge_bound {
        if !at_least(graph.edge_count() as f64, b) {
            return Err(state.fail(EngineErrorKind::StrictBoundMissed {
                what: "work graph edges after refine step",
                got: graph.edge_count() as f64,
                bound: b,
            }));
        }
    }

    state.current_steps.push(StepRecord {
        round: round + 1,
        step: j + 1,
        color,
        color_count,
        part_size_before: part.len(),
        part_size_after: refined.len(),
        edges_before,
        edges_after: graph.edge_count(),
        reservoir_size: state.reservoir.len(),
        edge_bound,
    });
    state.parts[j] = VertexSet::from_sorted(refined).expect("mask members are increasing");
    state.pending.push(color);
    state.work_graph = Some(graph);
    state.step += 1;
    Ok(state)
}

/// Ends round `i + 1`: a new part `U` and reservoir `W` (the common neighborhood of `U`)
/// are taken from the final work graph.
pub fn close_round(mut state: PartitionState, coloring: &TripleColoring) -> Result<PartitionState, EngineError> {
    if state.step != state.round {
        return Err(state.fail(EngineErrorKind::InvalidState("close_round before every part was refined")));
    }
    let next = state.round + 1;
    let graph = state.work_graph.take().expect("a refined round has a work graph");
    let order = graph.order();
    let (t, bound) = match state.request.mode {
        Mode::Strict => (
            strict_size(state.n_vertices, state.colors, next, "part size l^-(i+1) sqrt(log2 N)")
                .map_err(|e| state.fail(e.kind))?,
            Some(reservoir_bound(state.n_vertices as u64, next as u32)),
        ),
        Mode::Adaptive => (state.request.adaptive_part_size(), None),
    };
    let mode = SearchMode::auto(order, t, state.request.search_seed);
    let search = match mode {
        SearchMode::Exhaustive => SearchKind::Exhaustive,
        SearchMode::Greedy { .. } => SearchKind::Greedy,
    };
    let ids = graph.universe().as_slice();
    let (u, w): (Vec<Vertex>, Vec<Vertex>) = match state.request.mode {
        Mode::Strict => match kst_dense(&graph, t, mode) {
            Ok(wit) => (wit.a_side, wit.b_side),
            Err(LemmaError::SearchBudgetExceeded { best, guarantee }) => {
                return Err(state.fail(EngineErrorKind::StrictBoundMissed {
                    what: "dense lemma in close_round",
                    got: best.b_side.len() as f64,
                    bound: guarantee as f64,
                }))
            }
            Err(e) => return Err(state.fail(e.into())),
        },
        Mode::Adaptive => {
            let found = search_common_neighborhood(&graph, t, mode);
            (found.u.iter().map(|&x| ids[x]).collect(), found.w.iter().map(|&x| ids[x]).collect())
        }
    };
    if u.len() < t || w.len() < state.request.n {
        return Err(state.fail(EngineErrorKind::ReservoirExhausted { needed: state.request.n, available: w.len() }));
    }
    if let Some(b) = bound {
        if !at_least(w.len() as f64, b) {
            return Err(state.fail(EngineErrorKind::StrictBoundMissed {
                what: "reservoir after close_round",
                got: w.len() as f64,
                bound: b,
            }));
        }
    }
    let common = w.len();
    let mut reservoir = VertexSet::from_sorted(w).expect("common neighborhood is sorted");
    reservoir.truncate(state.request.reservoir_cap);

    let pending = core::mem::take(&mut state.pending);
    state.chi.push_column(&pending);
    state.parts.push(VertexSet::from_sorted(u).expect("U is sorted"));
    state.reservoir = reservoir;
    state.round = next;
    state.step = 0;
    let steps = core::mem::take(&mut state.current_steps);
    state.trace.rounds.push(RoundRecord {
        round: next,
        part_sizes: state.parts.iter().map(|p| p.len()).collect(),
        reservoir_size: state.reservoir.len(),
        reservoir_bound: bound,
        steps,
        close: Some(CloseRecord { t, common_neighbors: common, search }),
    });
    if state.request.check_invariants {
        if let Err(v) = check_round_invariant(coloring, &state) {
            return Err(state.fail(EngineErrorKind::Internal(v)));
        }
    }
    Ok(state)
}

/// Runs one full round (every refine step, then the close).
pub fn run_round(mut state: PartitionState, coloring: &TripleColoring) -> Result<PartitionState, EngineError> {
    while state.step < state.round {
        state = refine_step(state, coloring)?;
    }
    close_round(state, coloring)
}

fn assemble(state: &PartitionState, clique: &VertexSet) -> MultipartiteEmbedding {
    let n = state.request.n;
    let idx = clique.as_slice();
    let color = state.chi.get(idx[0] as usize, idx[1] as usize);
    let mut parts: Vec<VertexSet> = idx
        .iter()
        .map(|&q| {
            let mut p = state.parts[q as usize - 1].clone();
            p.truncate(n);
            p
        })
        .collect();
    let mut last = state.reservoir.clone();
    last.truncate(n);
    parts.push(last);
    MultipartiteEmbedding { parts, color }
}

/// Builds a monochromatic `K_d^3(n)` in `coloring`, verified before it is returned.
pub fn extract_multipartite(
    coloring: &TripleColoring,
    req: &ExtractionRequest,
) -> Result<(MultipartiteEmbedding, ExtractionTrace), EngineError> {
    req.validate()?;
    let colors = coloring.n_colors();
    let log2_n = libm::log2(coloring.n_vertices() as f64);
    if req.mode == Mode::Strict {
        let required = libm::pow(colors as f64, 2.0 * req.r_cap as f64) * (req.n * req.n) as f64;
        if log2_n < required {
            return Err(EngineErrorKind::NotEnoughVertices { log2_n, required }.into());
        }
        strict_size(coloring.n_vertices(), colors, req.r_cap, "final part size l^-r sqrt(log2 N)")?;
    }
    let clique_size = req.d - 1;
    let mut state = init_round(coloring, req)?;
    loop {
        let done = match req.mode {
            Mode::Strict => state.round >= req.r_cap,
            Mode::Adaptive => state.reservoir.len() >= req.n && find_mono_clique(&state.chi, clique_size).is_some(),
        };
        if done {
            let Some(q) = find_mono_clique(&state.chi, clique_size) else {
                return Err(state.fail(EngineErrorKind::CliqueNotFound { size: clique_size, rounds: state.round }));
            };
            if state.reservoir.len() < req.n {
                return Err(state.fail(EngineErrorKind::ReservoirExhausted {
                    needed: req.n,
                    available: state.reservoir.len(),
                }));
            }
            let emb = assemble(&state, &q);
            let check = verify_embedding(coloring, &emb);
            if let Some(v) = check.violation {
                return Err(state.fail(EngineErrorKind::Internal(v)));
            }
            let mut trace = state.trace;
            trace.achieved_n = req.n;
            trace.achieved_rounds = state.round;
            trace.achieved_c = (req.d * req.n) as f64 / libm::sqrt(log2_n);
            return Ok((emb, trace));
        }
        if state.round >= req.r_cap {
            return Err(state.fail(EngineErrorKind::CliqueNotFound { size: clique_size, rounds: state.round }));
        }
        state = run_round(state, coloring)?;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::GeneratorSpec;

    fn constant(n: u32) -> TripleColoring {
        TripleColoring::constant(n, 2, ColorId(0)).unwrap()
    }

    #[test]
    fn init_round_strict_sizes() {
        let c = constant(1 << 16);
        let s = init_round(&c, &ExtractionRequest::strict(3, 1, 2)).unwrap();
        assert_eq!(s.parts[0].len(), 2);
        assert_eq!(s.reservoir.len(), (1 << 16) - 2);
    }

    #[test]
    fn init_round_strict_underflow() {
        let c = TripleColoring::constant(8, 8, ColorId(0)).unwrap();
        let err = init_round(&c, &ExtractionRequest::strict(3, 1, 2)).unwrap_err();
        assert!(matches!(err.kind, EngineErrorKind::StrictSizeUnderflow { .. }));
    }

    #[test]
    fn init_round_adaptive_sizes() {
        let c = constant(64);
        let s = init_round(&c, &ExtractionRequest::adaptive(3, 4)).unwrap();
        assert_eq!(s.parts[0].len(), 4);
        assert_eq!(s.reservoir.len(), 60);
    }

    #[test]
    fn reservoir_cap_keeps_smallest() {
        let c = constant(100);
        let mut req = ExtractionRequest::adaptive(3, 2);
        req.reservoir_cap = 10;
        let s = init_round(&c, &req).unwrap();
        assert_eq!(s.reservoir, VertexSet::range(2, 12));
    }

    #[test]
    fn refine_on_constant_keeps_every_edge() {
        let c = constant(40);
        let mut req = ExtractionRequest::adaptive(3, 2);
        req.initial_part_size = Some(4);
        let s = init_round(&c, &req).unwrap();
        let s = refine_step(s, &c).unwrap();
        let g = s.work_graph.as_ref().unwrap();
        assert_eq!(g.edge_count(), 36 * 35 / 2);
        assert_eq!(s.parts[0].len(), 2);
        assert_eq!(s.pending, vec![ColorId(0)]);
        let step = &s.current_steps[0];
        assert_eq!(step.color_count, 4 * 630);
    }

    #[test]
    fn operations_out_of_order() {
        let c = constant(40);
        let s = init_round(&c, &ExtractionRequest::adaptive(3, 2)).unwrap();
        assert!(matches!(close_round(s.clone(), &c).unwrap_err().kind, EngineErrorKind::InvalidState(_)));
        let s = refine_step(s, &c).unwrap();
        assert!(matches!(refine_step(s, &c).unwrap_err().kind, EngineErrorKind::InvalidState(_)));
    }

    #[test]
    fn close_on_constant_takes_rest_of_reservoir() {
        let c = constant(40);
        let s = init_round(&c, &ExtractionRequest::adaptive(3, 2)).unwrap();
        let s = run_round(s, &c).unwrap();
        assert_eq!(s.parts[1], VertexSet::range(2, 4));
        assert_eq!(s.reservoir, VertexSet::range(4, 40));
        assert_eq!(s.chi.get(1, 2), ColorId(0));
        assert_eq!(check_round_invariant(&c, &s), Ok(2 * 2 * 36));
    }

    #[test]
    fn adaptive_constant_extraction() {
        let c = constant(32);
        let (emb, trace) = extract_multipartite(&c, &ExtractionRequest::adaptive(3, 2)).unwrap();
        assert_eq!(emb.color, ColorId(0));
        assert_eq!(emb.parts.len(), 3);
        assert!(verify_embedding(&c, &emb).valid);
        assert_eq!(trace.achieved_rounds, 2);
    }

    #[test]
    fn adaptive_seeded_extraction_verifies() {
        let c = TripleColoring::implicit(64, 2, GeneratorSpec::uniform(42)).unwrap();
        let mut req = ExtractionRequest::adaptive(3, 1);
        req.check_invariants = true;
        let (emb, _) = extract_multipartite(&c, &req).unwrap();
        let check = verify_embedding(&c, &emb);
        assert!(check.valid);
        assert_eq!(check.triples_checked, 1);
    }

    #[test]
    fn strict_needs_enough_vertices() {
        let c = constant(1 << 15);
        let err = extract_multipartite(&c, &ExtractionRequest::strict(3, 1, 2)).unwrap_err();
        assert!(matches!(err.kind, EngineErrorKind::NotEnoughVertices { .. }));
    }

    #[test]
    fn adaptive_failure_carries_trace() {
        let c = TripleColoring::implicit(40, 2, GeneratorSpec::uniform(3)).unwrap();
        let mut req = ExtractionRequest::adaptive(3, 6);
        req.r_cap = 4;
        let err = extract_multipartite(&c, &req).unwrap_err();
        assert!(err.trace.is_some());
        assert!(!err.trace.unwrap().rounds.is_empty());
    }

    #[test]
    fn invalid_requests() {
        let c = constant(10);
        assert!(extract_multipartite(&c, &ExtractionRequest::adaptive(2, 1)).is_err());
        assert!(extract_multipartite(&c, &ExtractionRequest::adaptive(3, 0)).is_err());
        let mut req = ExtractionRequest::adaptive(5, 1);
        req.r_cap = 3;
        assert!(extract_multipartite(&c, &req).is_err());
    }

    #[test]
    fn verify_reports_first_violation_in_colex_order() {
        let c = constant(12);
        let bad = c.with_recolored([9, 5, 1], ColorId(1)).unwrap().with_recolored([2, 6, 10], ColorId(1)).unwrap();
        let emb = MultipartiteEmbedding {
            parts: vec![VertexSet::range(0, 4), VertexSet::range(4, 8), VertexSet::range(8, 12)],
            color: ColorId(0),
        };
        let check = verify_embedding(&bad, &emb);
        assert!(!check.valid);
        assert_eq!(check.triples_checked, 64);
        assert_eq!(
            check.violation,
            Some(Violation::WrongColor { triple: [1, 5, 9], color: ColorId(1), expected: ColorId(0) })
        );
    }

    #[test]
    fn verify_counts_crossing_triples() {
        let c = constant(8);
        let emb = MultipartiteEmbedding {
            parts: (0..4).map(|p| VertexSet::range(2 * p, 2 * p + 2)).collect(),
            color: ColorId(0),
        };
        let check = verify_embedding(&c, &emb);
        assert!(check.valid);
        assert_eq!(check.triples_checked, 32);
    }

    #[test]
    fn verify_structural_failures() {
        let c = constant(8);
        let overlap = MultipartiteEmbedding {
            parts: vec![VertexSet::range(0, 2), VertexSet::range(1, 3), VertexSet::range(4, 6)],
            color: ColorId(0),
        };
        assert_eq!(verify_embedding(&c, &overlap).violation, Some(Violation::PartsOverlap { vertex: 1 }));
        let uneven = MultipartiteEmbedding {
            parts: vec![VertexSet::range(0, 2), VertexSet::range(2, 3), VertexSet::range(4, 6)],
            color: ColorId(0),
        };
        assert!(matches!(verify_embedding(&c, &uneven).violation, Some(Violation::PartSize { part: 1, .. })));
        let outside = MultipartiteEmbedding {
            parts: vec![VertexSet::range(0, 1), VertexSet::range(2, 3), VertexSet::range(8, 9)],
            color: ColorId(0),
        };
        assert_eq!(verify_embedding(&c, &outside).violation, Some(Violation::VertexOutOfRange { vertex: 8 }));
    }
}
