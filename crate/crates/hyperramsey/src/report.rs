//! JSON run reports and standalone witness files.

use std::path::{Path, PathBuf};

use hyperramsey_core::engine::{verify_embedding, ExtractionTrace, MultipartiteEmbedding, Violation};
use hyperramsey_core::gen::GeneratorSpec;
use hyperramsey_core::model::{color_census, ColorCensus, ColorId, TripleColoring, VertexSet};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::format::{read_coloring, FormatError};

/// Where the coloring of a run came from; enough to rebuild it offline.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum ColoringSource {
    File { path: PathBuf },
    Generator { n_vertices: u32, colors: u32, spec: GeneratorSpec },
}

impl ColoringSource {
    pub fn load(&self) -> Result<TripleColoring, FormatError> {
        match self {
            ColoringSource::File { path } => read_coloring(path),
            ColoringSource::Generator { n_vertices, colors, spec } => {
                Ok(TripleColoring::implicit(*n_vertices, *colors, *spec)?)
            }
        }
    }
}

/// A claim that can be re-checked against a coloring without re-running the search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// `parts` are disjoint, equally sized, and every crossing triple has `color`.
    Multipartite { coloring: ColoringSource, color: ColorId, parts: Vec<Vec<u32>> },
    /// `majority_color` covers `majority_count` triples of `subset`, at least `(1 - epsilon)`
    /// of them. `parts`, when present, is the monochromatic embedding the subset came from.
    AlmostMono {
        coloring: ColoringSource,
        epsilon: f64,
        subset: Vec<u32>,
        majority_color: ColorId,
        majority_count: u64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        parts: Option<Vec<Vec<u32>>>,
    },
}

impl Witness {
    pub fn coloring(&self) -> &ColoringSource {
        match self {
            Witness::Multipartite { coloring, .. } | Witness::AlmostMono { coloring, .. } => coloring,
        }
    }

    pub fn multipartite(coloring: ColoringSource, emb: &MultipartiteEmbedding) -> Self {
        Witness::Multipartite {
            coloring,
            color: emb.color,
            parts: emb.parts.iter().map(|p| p.as_slice().to_vec()).collect(),
        }
    }

    /// Reads a witness file, or the `witness` field of a run report.
    pub fn read(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let value: Value = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        let value = match value.get("witness") {
            Some(Value::Null) => return Err(format!("{}: report carries no witness", path.display())),
            Some(w) => w.clone(),
            None => value,
        };
        serde_json::from_value(value).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, to_json(self))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WitnessCheck {
    pub valid: bool,
    pub triples_checked: u64,
    pub problem: Option<String>,
    /// The offending triple for color violations.
    pub triple: Option<[u32; 3]>,
}

impl WitnessCheck {
    fn fail(problem: String, triple: Option<[u32; 3]>, triples_checked: u64) -> Self {
        WitnessCheck { valid: false, triples_checked, problem: Some(problem), triple }
    }
}

fn embedding_from(color: ColorId, parts: &[Vec<u32>]) -> MultipartiteEmbedding {
    MultipartiteEmbedding { parts: parts.iter().map(|p| VertexSet::from_unsorted(p.clone())).collect(), color }
}

fn check_embedding(coloring: &TripleColoring, emb: &MultipartiteEmbedding) -> WitnessCheck {
    let check = verify_embedding(coloring, emb);
    match check.violation {
        None => WitnessCheck { valid: true, triples_checked: check.triples_checked, problem: None, triple: None },
        Some(Violation::WrongColor { triple, color, expected }) => WitnessCheck::fail(
            format!("triple {triple:?} has color {} but the witness claims {}", color.0, expected.0),
            Some(triple),
            check.triples_checked,
        ),
        Some(v) => WitnessCheck::fail(format!("{v:?}"), None, check.triples_checked),
    }
}

fn sorted_set(ids: &[u32], n: u32) -> Result<VertexSet, String> {
    let set = VertexSet::from_sorted(ids.to_vec()).map_err(|e| format!("subset: {e}"))?;
    match set.max() {
        Some(v) if v >= n => Err(format!("subset vertex {v} out of range for {n} vertices")),
        _ => Ok(set),
    }
}

/// Re-checks `witness` against `coloring` by enumeration.
pub fn check_witness(witness: &Witness, coloring: &TripleColoring) -> WitnessCheck {
    match witness {
        Witness::Multipartite { color, parts, .. } => check_embedding(coloring, &embedding_from(*color, parts)),
        Witness::AlmostMono { epsilon, subset, majority_color, majority_count, parts, .. } => {
            let set = match sorted_set(subset, coloring.n_vertices()) {
                Ok(s) => s,
                Err(e) => return WitnessCheck::fail(e, None, 0),
            };
            if majority_color.0 as u32 >= coloring.n_colors() {
                return WitnessCheck::fail(format!("color {} out of range", majority_color.0), None, 0);
            }
            let census = color_census(coloring, &set).expect("subset checked against N");
            let count = census.counts[majority_color.index()];
            if count != *majority_count {
                let triple = first_triple_not(coloring, &set, *majority_color);
                return WitnessCheck::fail(
                    format!("color {} covers {count} triples, the witness claims {majority_count}", majority_color.0),
                    triple,
                    census.total,
                );
            }
            if (count as f64) < (1.0 - epsilon) * census.total as f64 - 1e-9 * census.total as f64 {
                return WitnessCheck::fail(
                    format!("density {count}/{} is below 1 - {epsilon}", census.total),
                    None,
                    census.total,
                );
            }
            let mut checked = census.total;
            if let Some(parts) = parts {
                let emb = embedding_from(*majority_color, parts);
                if emb.vertices() != set {
                    return WitnessCheck::fail("parts do not cover the subset".into(), None, checked);
                }
                let inner = check_embedding(coloring, &emb);
                checked += inner.triples_checked;
                if !inner.valid {
                    return WitnessCheck { triples_checked: checked, ..inner };
                }
            }
            WitnessCheck { valid: true, triples_checked: checked, problem: None, triple: None }
        }
    }
}

fn first_triple_not(coloring: &TripleColoring, set: &VertexSet, color: ColorId) -> Option<[u32; 3]> {
    let s = set.as_slice();
    for c in 2..s.len() {
        for b in 1..c {
            for a in 0..b {
                if coloring.color_sorted(s[a], s[b], s[c]) != color {
                    return Some([s[a], s[b], s[c]]);
                }
            }
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Outcome {
    Success,
    Failure { kind: String, message: String },
}

/// Everything a run produced. Fields serialize in declaration order.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub command: Vec<String>,
    pub config: Value,
    pub outcome: Outcome,
    pub witness: Option<Witness>,
    pub result: Option<Value>,
    pub census: Option<ColorCensus>,
    pub trace: Option<ExtractionTrace>,
    pub wall_time_secs: f64,
    pub peak_memory_bytes: Option<u64>,
}

impl RunReport {
    pub fn new(command: Vec<String>, config: Value) -> Self {
        RunReport {
            command,
            config,
            outcome: Outcome::Success,
            witness: None,
            result: None,
            census: None,
            trace: None,
            wall_time_secs: 0.0,
            peak_memory_bytes: None,
        }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

/// Peak resident set size of this process, where the platform reports it.
pub fn peak_memory_bytes() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    let kb: u64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb * 1024)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn source() -> ColoringSource {
        ColoringSource::Generator { n_vertices: 12, colors: 2, spec: GeneratorSpec::constant(ColorId(1)) }
    }

    #[test]
    fn witness_json_round_trip() {
        let w = Witness::Multipartite { coloring: source(), color: ColorId(1), parts: vec![vec![0, 1], vec![2, 3], vec![5, 9]] };
        let text = to_json(&w);
        assert!(text.contains("\"kind\": \"multipartite\""));
        assert!(text.contains("\"source\": \"generator\""));
        let back: Witness = serde_json::from_str(&text).unwrap();
        assert_eq!(back, w);
    }

    #[test]
    fn checks_multipartite_claims() {
        let c = source().load().unwrap();
        let good = Witness::Multipartite { coloring: source(), color: ColorId(1), parts: vec![vec![0], vec![4], vec![7]] };
        assert!(check_witness(&good, &c).valid);
        let flipped = c.with_recolored([0, 4, 7], ColorId(0)).unwrap();
        let check = check_witness(&good, &flipped);
        assert!(!check.valid);
        assert_eq!(check.triple, Some([0, 4, 7]));
        let overlap = Witness::Multipartite { coloring: source(), color: ColorId(1), parts: vec![vec![0], vec![0], vec![7]] };
        assert!(!check_witness(&overlap, &c).valid);
    }

    #[test]
    fn checks_almost_mono_claims() {
        let c = source().load().unwrap();
        let w = Witness::AlmostMono {
            coloring: source(),
            epsilon: 0.1,
            subset: vec![1, 2, 3, 4, 5],
            majority_color: ColorId(1),
            majority_count: 10,
            parts: None,
        };
        assert!(check_witness(&w, &c).valid);
        let flipped = c.with_recolored([2, 3, 5], ColorId(0)).unwrap();
        let check = check_witness(&w, &flipped);
        assert!(!check.valid);
        assert_eq!(check.triple, Some([2, 3, 5]));
        let unsorted = Witness::AlmostMono {
            coloring: source(),
            epsilon: 0.1,
            subset: vec![3, 1, 2],
            majority_color: ColorId(1),
            majority_count: 1,
            parts: None,
        };
        assert!(!check_witness(&unsorted, &c).valid);
    }
}
