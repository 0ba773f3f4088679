//! Almost-monochromatic subsets from monochromatic complete multipartite hypergraphs.
//!
//! A monochromatic `K_d^3(n)` has `C(d,3) n^3` crossing triples out of `C(dn,3)`, a fraction
//! above `1 - 3/d`. So taking `d = max(3, ceil(3/eps))` and returning the union of the parts
//! gives a set where one color covers at least a `1 - eps` fraction of the triples.

use crate::engine::{
    extract_multipartite, EngineError, EngineErrorKind, ExtractionRequest, ExtractionTrace, Mode,
    MultipartiteEmbedding,
};
use crate::math::scheduled_part_size;
use crate::model::{color_census, ColorCensus, ColorId, TripleColoring, VertexSet};
use crate::oracle::R2Table;

/// Largest part size tried by the adaptive pipeline.
pub const DEFAULT_MAX_PART_SIZE: usize = 16;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum AlmostMonoError {
    #[error("epsilon must lie in (0, 1], got {0}")]
    EpsilonOutOfRange(f64),
    #[error("strict round count r_2({k}; {colors}) has no usable bound")]
    RoundsUnavailable { k: u32, colors: u32 },
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// How the returned subset was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "snake_case"))]
pub enum Route {
    /// Union of a monochromatic `K_d^3(n)` with `d = choose_d(eps)`; density follows from `d`.
    Multipartite,
    /// `choose_d(eps)` exceeds `N`: union of a `K_{d'}^3(1)` with `d' < d`, accepted only
    /// after its census reaches `1 - eps`.
    CensusFallback,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AlmostMonoResult {
    pub subset: VertexSet,
    pub majority_color: ColorId,
    pub census: ColorCensus,
    pub epsilon: f64,
    pub achieved_density: f64,
    /// Number of parts and part size of the underlying embedding.
    pub d: usize,
    pub n: usize,
    /// `|subset| / sqrt(log2 N)`.
    pub achieved_c: f64,
    pub route: Route,
    pub embedding: MultipartiteEmbedding,
    pub trace: ExtractionTrace,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlmostMonoOptions {
    /// Adaptive: part sizes are tried from this value down to 1.
    pub max_part_size: usize,
    /// Exact Ramsey values for the strict round count; missing entries use `l^(k l)`.
    pub r2_table: R2Table,
    pub search_seed: u64,
    pub check_invariants: bool,
}

impl Default for AlmostMonoOptions {
    fn default() -> Self {
        AlmostMonoOptions {
            max_part_size: DEFAULT_MAX_PART_SIZE,
            r2_table: R2Table::new(),
            search_seed: 0,
            check_invariants: false,
        }
    }
}

/// `max(3, ceil(3 / eps))`; values of `eps` above 1 give 3.
pub fn choose_d(epsilon: f64) -> Result<usize, AlmostMonoError> {
    if !(epsilon > 0.0) || epsilon.is_nan() {
        return Err(AlmostMonoError::EpsilonOutOfRange(epsilon));
    }
    let x = 3.0 / epsilon;
    // 3 / 0.3 is 10.000000000000002 in binary
    let r = libm::round(x);
    let d = if libm::fabs(x - r) < 1e-9 { r } else { libm::ceil(x) };
    Ok((d as usize).max(3))
}

/// Strict part size `floor(l^-r sqrt(log2 N))` with `r` the bound on `r_2(d-1; l)`.
pub fn strict_parameters(
    coloring: &TripleColoring,
    d: usize,
    table: &R2Table,
) -> Result<(usize, usize), AlmostMonoError> {
    let colors = coloring.n_colors();
    let k = (d - 1) as u32;
    let bound = table.upper_bound(k, colors);
    if bound.saturated || bound.value > u32::MAX as u64 {
        return Err(AlmostMonoError::RoundsUnavailable { k, colors });
    }
    let rounds = (bound.value as usize).max(d - 1);
    let n = scheduled_part_size(coloring.n_vertices() as u64, colors, rounds as u32) as usize;
    Ok((rounds, n))
}

pub fn almost_mono_subset(
    coloring: &TripleColoring,
    epsilon: f64,
    mode: Mode,
    options: &AlmostMonoOptions,
) -> Result<AlmostMonoResult, AlmostMonoError> {
    let d = choose_d(epsilon)?;
    let n_vertices = coloring.n_vertices() as usize;
    if d > n_vertices {
        return census_fallback(coloring, epsilon, mode, options);
    }
    match mode {
        Mode::Strict => {
            let (rounds, n) = strict_parameters(coloring, d, &options.r2_table)?;
            if n == 0 {
                return Err(EngineError::from(EngineErrorKind::StrictSizeUnderflow {
                    quantity: "part size l^-r sqrt(log2 N)",
                })
                .into());
            }
            let req = request(ExtractionRequest::strict(d, n, rounds), options);
            let (emb, trace) = extract_multipartite(coloring, &req)?;
            Ok(finish(coloring, epsilon, emb, trace, Route::Multipartite))
        }
        Mode::Adaptive => {
            let top = options.max_part_size.min(n_vertices / d).max(1);
            let mut last_err = None;
            for n in (1..=top).rev() {
                let req = request(ExtractionRequest::adaptive(d, n), options);
                match extract_multipartite(coloring, &req) {
                    Ok((emb, trace)) => return Ok(finish(coloring, epsilon, emb, trace, Route::Multipartite)),
                    Err(e) => last_err = Some(e),
                }
            }
            Err(last_err.expect("at least one part size is tried").into())
        }
    }
}

fn request(mut req: ExtractionRequest, options: &AlmostMonoOptions) -> ExtractionRequest {
    req.search_seed = options.search_seed;
    req.check_invariants = options.check_invariants;
    req
}

fn census_fallback(
    coloring: &TripleColoring,
    epsilon: f64,
    mode: Mode,
    options: &AlmostMonoOptions,
) -> Result<AlmostMonoResult, AlmostMonoError> {
    let mut last_err = None;
    for d in (3..=coloring.n_vertices() as usize).rev() {
        let base = match mode {
            Mode::Strict => ExtractionRequest::strict(d, 1, d - 1),
            Mode::Adaptive => ExtractionRequest::adaptive(d, 1),
        };
        match extract_multipartite(coloring, &request(base, options)) {
            Ok((emb, trace)) => {
                let result = finish(coloring, epsilon, emb, trace, Route::CensusFallback);
                if meets_threshold(&result.census, epsilon) {
                    return Ok(result);
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err
        .unwrap_or_else(|| EngineErrorKind::CliqueNotFound { size: 2, rounds: 0 }.into())
        .into())
}

/// `counts[majority] >= (1 - eps) total`.
pub fn meets_threshold(census: &ColorCensus, epsilon: f64) -> bool {
    let (_, count) = census.majority();
    count as f64 >= (1.0 - epsilon) * census.total as f64 - 1e-9 * census.total as f64
}

fn finish(
    coloring: &TripleColoring,
    epsilon: f64,
    embedding: MultipartiteEmbedding,
    trace: ExtractionTrace,
    route: Route,
) -> AlmostMonoResult {
    let subset = embedding.vertices();
    let census = color_census(coloring, &subset).expect("embedding vertices lie in range");
    let (majority_color, count) = census.majority();
    let achieved_density = if census.total == 0 { 1.0 } else { count as f64 / census.total as f64 };
    let log2_n = libm::log2(coloring.n_vertices() as f64);
    AlmostMonoResult {
        achieved_c: subset.len() as f64 / libm::sqrt(log2_n),
        d: embedding.parts.len(),
        n: embedding.parts.first().map_or(0, |p| p.len()),
        subset,
        majority_color,
        census,
        epsilon,
        achieved_density,
        route,
        embedding,
        trace,
    }
}

impl AlmostMonoError {
    pub fn trace(&self) -> Option<&ExtractionTrace> {
        match self {
            AlmostMonoError::Engine(e) => e.trace.as_deref(),
            _ => None,
        }
    }

    pub fn into_engine(self) -> Option<EngineError> {
        match self {
            AlmostMonoError::Engine(e) => Some(e),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::GeneratorSpec;
    use crate::math::{binomial, choose3};

    #[test]
    fn choose_d_examples() {
        assert_eq!(choose_d(1.0).unwrap(), 3);
        assert_eq!(choose_d(0.5).unwrap(), 6);
        assert_eq!(choose_d(0.3).unwrap(), 10);
        assert_eq!(choose_d(0.1).unwrap(), 30);
        assert_eq!(choose_d(0.7).unwrap(), 5);
        assert_eq!(choose_d(2.0).unwrap(), 3);
        assert!(choose_d(0.0).is_err());
        assert!(choose_d(-0.5).is_err());
        assert!(choose_d(f64::NAN).is_err());
    }

    #[test]
    fn choose_d_is_least_sufficient() {
        // d >= 3/eps, and d - 1 < 3/eps unless d is the floor of 3
        for k in 1..=200 {
            let eps = k as f64 / 200.0;
            let d = choose_d(eps).unwrap();
            assert!(1.0 - 3.0 / d as f64 >= 1.0 - eps - 1e-12);
            if d > 3 {
                assert!(1.0 - 3.0 / ((d - 1) as f64) < 1.0 - eps + 1e-12);
            }
        }
    }

    #[test]
    fn constant_coloring_small_n_falls_back() {
        let c = TripleColoring::constant(20, 2, ColorId(0)).unwrap();
        let r = almost_mono_subset(&c, 0.1, Mode::Adaptive, &AlmostMonoOptions::default()).unwrap();
        assert_eq!(r.achieved_density, 1.0);
        assert_eq!(r.route, Route::CensusFallback);
        assert_eq!(r.subset.len(), 20);
    }

    #[test]
    fn half_epsilon_gives_six_parts() {
        let c = TripleColoring::constant(64, 2, ColorId(1)).unwrap();
        let r = almost_mono_subset(&c, 0.5, Mode::Adaptive, &AlmostMonoOptions::default()).unwrap();
        assert_eq!(r.d, 6);
        assert_eq!(r.subset.len(), 6 * r.n);
        assert_eq!(r.majority_color, ColorId(1));
        assert!(r.achieved_density > 0.5);
    }

    #[test]
    fn census_recount_matches() {
        let c = TripleColoring::implicit(256, 2, GeneratorSpec::uniform(7)).unwrap();
        let r = almost_mono_subset(&c, 1.0, Mode::Adaptive, &AlmostMonoOptions::default()).unwrap();
        assert_eq!(r.d, 3);
        let again = color_census(&c, &r.subset).unwrap();
        assert_eq!(again, r.census);
        let (_, count) = again.majority();
        assert_eq!(r.achieved_density, count as f64 / again.total as f64);
        // crossing triples alone already reach the guarantee
        let crossing = binomial(3, 3) as u64 * (r.n as u64).pow(3);
        assert!(count >= crossing);
        assert_eq!(again.total, choose3(3 * r.n as u64));
    }

    #[test]
    fn strict_parameters_use_table() {
        let c = TripleColoring::constant(1 << 16, 2, ColorId(0)).unwrap();
        let mut table = R2Table::new();
        assert_eq!(strict_parameters(&c, 3, &table).unwrap(), (2, 1));
        // d = 4 needs r_2(3; 2): 64 from the formula, 6 once the table knows it
        assert_eq!(strict_parameters(&c, 4, &table).unwrap(), (64, 0));
        table.insert(3, 2, 6);
        assert_eq!(strict_parameters(&c, 4, &table).unwrap(), (6, 0));
    }

    #[test]
    fn strict_underflow_is_reported() {
        let c = TripleColoring::constant(1 << 10, 2, ColorId(0)).unwrap();
        let err = almost_mono_subset(&c, 0.75, Mode::Strict, &AlmostMonoOptions::default()).unwrap_err();
        assert!(matches!(
            err,
            AlmostMonoError::Engine(EngineError { kind: EngineErrorKind::StrictSizeUnderflow { .. }, .. })
        ));
    }
}
