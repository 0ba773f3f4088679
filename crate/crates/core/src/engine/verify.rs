use alloc::vec::Vec;

use super::{MultipartiteEmbedding, PartitionState};
use crate::math::triple_rank;
use crate::model::{ColorId, TripleColoring, Vertex, VertexSet};

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(tag = "kind", rename_all = "snake_case"))]
pub enum Violation {
    VertexOutOfRange { vertex: Vertex },
    PartSize { part: usize, size: usize, expected: usize },
    PartsOverlap { vertex: Vertex },
    WrongColor { triple: [Vertex; 3], color: ColorId, expected: ColorId },
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EmbeddingCheck {
    pub valid: bool,
    pub triples_checked: u64,
    /// First violation; color violations are reported in colex order of the triple.
    pub violation: Option<Violation>,
}

fn structural_check(n_vertices: u32, parts: &[VertexSet], size: Option<usize>) -> Option<Violation> {
    let expected = size.unwrap_or_else(|| parts.first().map_or(0, |p| p.len()));
    for (i, p) in parts.iter().enumerate() {
        if p.len() != expected {
            return Some(Violation::PartSize { part: i, size: p.len(), expected });
        }
        if let Some(v) = p.max().filter(|&v| v >= n_vertices) {
            return Some(Violation::VertexOutOfRange { vertex: v });
        }
    }
    let mut all: Vec<Vertex> = parts.iter().flat_map(|p| p.iter()).collect();
    all.sort_unstable();
    all.windows(2).find(|w| w[0] == w[1]).map(|w| Violation::PartsOverlap { vertex: w[0] })
}

/// Checks that `emb` is a monochromatic `K_d^3(n)`: disjoint parts of equal size and every
/// triple meeting three distinct parts colored `emb.color`.
pub fn verify_embedding(coloring: &TripleColoring, emb: &MultipartiteEmbedding) -> EmbeddingCheck {
    if let Some(v) = structural_check(coloring.n_vertices(), &emb.parts, None) {
        return EmbeddingCheck { valid: false, triples_checked: 0, violation: Some(v) };
    }
    let mut checked = 0u64;
    let mut worst: Option<(u64, [Vertex; 3], ColorId)> = None;
    let d = emb.parts.len();
    for p in 0..d {
        for q in (p + 1)..d {
            for r in (q + 1)..d {
                for x in emb.parts[p].iter() {
                    for y in emb.parts[q].iter() {
                        for z in emb.parts[r].iter() {
                            checked += 1;
                            let c = coloring.color_unordered(x, y, z);
                            if c != emb.color {
                                let mut t = [x, y, z];
                                t.sort_unstable();
                                let rank = triple_rank(t[0], t[1], t[2]);
                                if worst.is_none_or(|(r0, _, _)| rank < r0) {
                                    worst = Some((rank, t, c));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    EmbeddingCheck {
        valid: worst.is_none(),
        triples_checked: checked,
        violation: worst.map(|(_, triple, color)| Violation::WrongColor { triple, color, expected: emb.color }),
    }
}

/// Enumerates the round invariant of a state between rounds: for all `a < b <= i`, every triple
/// in `V_a x V_b x V_c` (`b < c <= i`) and in `V_a x V_b x S` has color `chi(a, b)`.
///
/// Returns the number of triples checked, or the first violation found.
pub fn check_round_invariant(coloring: &TripleColoring, state: &PartitionState) -> Result<u64, Violation> {
    assert_eq!(state.step, 0, "the round invariant is only defined between rounds");
    let parts = &state.parts;
    let mut all = parts.clone();
    all.push(state.reservoir.clone());
    let mut seen: Vec<Vertex> = all.iter().flat_map(|p| p.iter()).collect();
    seen.sort_unstable();
    if let Some(w) = seen.windows(2).find(|w| w[0] == w[1]) {
        return Err(Violation::PartsOverlap { vertex: w[0] });
    }
    let i = state.round;
    let mut checked = 0u64;
    for a in 1..=i {
        for b in (a + 1)..=i {
            let expected = state.chi.get(a, b);
            let third = ((b + 1)..=i).map(|c| &parts[c - 1]).chain(core::iter::once(&state.reservoir));
            for set in third {
                for x in parts[a - 1].iter() {
                    for y in parts[b - 1].iter() {
                        for z in set.iter() {
                            checked += 1;
                            let color = coloring.color_unordered(x, y, z);
                            if color != expected {
                                let mut triple = [x, y, z];
                                triple.sort_unstable();
                                return Err(Violation::WrongColor { triple, color, expected });
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(checked)
}
