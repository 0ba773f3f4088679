//! Constructive extraction of monochromatic structure from colorings of triples.
//!
//! Given an ℓ-coloring of the 3-element subsets of `{0, .., N-1}`, this crate finds
//!
//! * a monochromatic complete `d`-partite 3-uniform hypergraph `K_d^3(n)`, built by a
//!   round-based refinement of vertex parts and a shrinking reservoir ([`engine`]);
//! * an almost-monochromatic vertex subset, obtained as the union of such a `K_d^3(n)`
//!   with `d` chosen from the requested tolerance ([`almost_mono`]).
//!
//! The two Kővári–Sós–Turán style extraction lemmas used by the engine live in
//! [`lemmas`]; brute-force ground truth (exhaustive subset search, tiny graph Ramsey
//! numbers) lives in [`oracle`].
//!
//! The crate is `no_std` and only needs `alloc`. File formats, reports and the command
//! line front end live in the `hyperramsey` crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod almost_mono;
pub mod engine;
pub mod experiment;
pub mod gen;
pub mod lemmas;
pub mod math;
pub mod model;
pub mod oracle;

pub use almost_mono::{almost_mono_subset, choose_d, AlmostMonoResult};
pub use engine::{
    extract_multipartite, find_mono_clique, verify_embedding, ExtractionRequest, ExtractionTrace,
    Mode, MultipartiteEmbedding,
};
pub use gen::{GeneratorKind, GeneratorSpec};
pub use model::{color_census, ColorCensus, ColorId, SimpleGraph, TripleColoring, VertexSet};
