//! Discrepancy of random subsets: how far any color fraction strays from `1/l`.

use alloc::vec::Vec;

use crate::gen::{CounterStream, STREAM_SAMPLE};
use crate::model::{color_census, ColorId, ModelError, TripleColoring, Vertex, VertexSet};

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DiscrepancyReport {
    pub subset_size: usize,
    pub samples: u64,
    /// Largest `|count_c / C(k,3) - 1/l|` over samples and colors.
    pub max_deviation: f64,
    pub mean_deviation: f64,
    pub worst_sample: u64,
    pub worst_color: ColorId,
    pub worst_subset: VertexSet,
}

/// Sample `index` of the stream: a uniformly random `size`-subset of `0..n` (Floyd's algorithm).
pub fn sample_subset(seed: u64, index: u64, n: u32, size: usize) -> VertexSet {
    let mut cursor = CounterStream::new(seed, STREAM_SAMPLE).cursor(index);
    let mut chosen: Vec<Vertex> = Vec::with_capacity(size);
    for j in (n as usize - size)..n as usize {
        let t = cursor.next_below(j as u64 + 1) as Vertex;
        if chosen.contains(&t) {
            chosen.push(j as Vertex);
        } else {
            chosen.push(t);
        }
    }
    VertexSet::from_unsorted(chosen)
}

/// Draws `samples` subsets of `subset_size` vertices with [`sample_subset`] and measures the
/// color fractions of their triples.
pub fn discrepancy(
    coloring: &TripleColoring,
    subset_size: usize,
    samples: u64,
    seed: u64,
) -> Result<DiscrepancyReport, ModelError> {
    if subset_size < 3 || subset_size > coloring.n_vertices() as usize {
        return Err(ModelError::VertexCount { n: subset_size as u64, max: coloring.n_vertices() });
    }
    let uniform = 1.0 / coloring.n_colors() as f64;
    let mut report = DiscrepancyReport {
        subset_size,
        samples,
        max_deviation: 0.0,
        mean_deviation: 0.0,
        worst_sample: 0,
        worst_color: ColorId(0),
        worst_subset: VertexSet::new(),
    };
    let mut sum = 0.0;
    for index in 0..samples {
        let subset = sample_subset(seed, index, coloring.n_vertices(), subset_size);
        let census = color_census(coloring, &subset)?;
        let (color, dev) = census
            .counts
            .iter()
            .enumerate()
            .map(|(c, &k)| (c, libm::fabs(k as f64 / census.total as f64 - uniform)))
            .fold((0, -1.0), |best, x| if x.1 > best.1 { x } else { best });
        sum += dev;
        if dev > report.max_deviation || index == 0 {
            report.max_deviation = dev;
            report.worst_sample = index;
            report.worst_color = ColorId(color as u8);
            report.worst_subset = subset;
        }
    }
    if samples > 0 {
        report.mean_deviation = sum / samples as f64;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::GeneratorSpec;

    #[test]
    fn samples_are_distinct_sets_in_range() {
        for index in 0..200 {
            let s = sample_subset(3, index, 40, 12);
            assert_eq!(s.len(), 12);
            assert!(s.max().unwrap() < 40);
        }
        assert_eq!(sample_subset(3, 5, 40, 12), sample_subset(3, 5, 40, 12));
        assert_ne!(sample_subset(3, 5, 40, 12), sample_subset(3, 6, 40, 12));
        assert_eq!(sample_subset(1, 0, 10, 10).as_slice(), &[0, 1, 2, 3, 4, 5, 6, 7, 8, 9]);
    }

    #[test]
    fn sampling_is_roughly_uniform_over_vertices() {
        let mut hits = [0u32; 20];
        for index in 0..4000 {
            for v in sample_subset(11, index, 20, 5).iter() {
                hits[v as usize] += 1;
            }
        }
        // expectation 1000 each, sd about 27
        assert!(hits.iter().all(|&h| (850..1150).contains(&h)), "{hits:?}");
    }

    #[test]
    fn constant_coloring_has_maximal_discrepancy() {
        let c = TripleColoring::constant(30, 2, ColorId(1)).unwrap();
        let r = discrepancy(&c, 6, 10, 0).unwrap();
        assert_eq!(r.max_deviation, 0.5);
    }

    #[test]
    fn uniform_coloring_is_balanced() {
        let c = TripleColoring::implicit(300, 2, GeneratorSpec::uniform(9)).unwrap();
        let r = discrepancy(&c, 24, 500, 9).unwrap();
        assert!(r.max_deviation <= 0.1, "{}", r.max_deviation);
        assert!(r.mean_deviation < r.max_deviation);
    }

    #[test]
    fn rejects_bad_sizes() {
        let c = TripleColoring::constant(10, 2, ColorId(0)).unwrap();
        assert!(discrepancy(&c, 2, 1, 0).is_err());
        assert!(discrepancy(&c, 11, 1, 0).is_err());
    }
}
