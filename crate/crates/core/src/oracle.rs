//! Exhaustive ground truth for small instances.
//!
//! * [`brute_max_almost_mono`] / [`brute_max_almost_mono_gray`]: the largest subset with a color
//!   covering at least `(1 - eps) C(s,3)` of its triples, by two independent enumerations.
//! * [`r2_exact_small`]: graph Ramsey numbers `r_2(k; l)` by enumerating every coloring.
//! * [`R2Table`]: exact values established by `r2_exact_small`, falling back to `l^(k l)`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::engine::{find_mono_clique, PairColorMatrix};
use crate::math::choose3;
use crate::model::{ColorCensus, ColorId, TripleColoring, Vertex, VertexSet};

/// Elapsed-time source for budgets; `no_std` callers can pass [`NoClock`].
pub trait Clock {
    fn elapsed_secs(&self) -> f64;
}

pub struct NoClock;

impl Clock for NoClock {
    fn elapsed_secs(&self) -> f64 {
        0.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OracleBudget {
    /// Most subsets (or colorings) examined.
    pub max_subsets: u64,
    pub time_limit_secs: Option<f64>,
}

impl OracleBudget {
    pub fn subsets(max_subsets: u64) -> Self {
        OracleBudget { max_subsets, time_limit_secs: None }
    }
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget { max_subsets: 1 << 26, time_limit_secs: None }
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error("budget exceeded after {examined} items")]
    BudgetExceeded { examined: u64 },
    #[error("time limit exceeded after {examined} items")]
    TimeExceeded { examined: u64 },
    #[error("{n} vertices is beyond exhaustive reach (limit {max})")]
    TooLarge { n: u32, max: u32 },
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
}

struct Meter<'a> {
    budget: OracleBudget,
    clock: &'a dyn Clock,
    examined: u64,
}

impl Meter<'_> {
    fn tick(&mut self) -> Result<(), OracleError> {
        self.examined += 1;
        if self.examined > self.budget.max_subsets {
            return Err(OracleError::BudgetExceeded { examined: self.examined - 1 });
        }
        if self.examined % 4096 == 0 {
            if let Some(limit) = self.budget.time_limit_secs {
                if self.clock.elapsed_secs() > limit {
                    return Err(OracleError::TimeExceeded { examined: self.examined });
                }
            }
        }
        Ok(())
    }
}

/// Largest almost-monochromatic subset with its (lexicographically least) witness.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AlmostMonoWitness {
    pub size: usize,
    pub subset: VertexSet,
    pub census: ColorCensus,
    pub examined: u64,
}

/// Exhaustive search is limited to this many vertices (subsets are `u32` masks).
pub const MAX_BRUTE_VERTICES: u32 = 24;

fn qualifies(census_counts: &[u64], total: u64, epsilon: f64) -> bool {
    let need = (1.0 - epsilon) * total as f64;
    census_counts.iter().any(|&c| c as f64 >= need - 1e-9 * (total as f64).max(1.0))
}

fn triple_table(coloring: &TripleColoring) -> Vec<u8> {
    let n = coloring.n_vertices() as usize;
    let mut table = vec![0u8; n * n * n];
    for k in 2..n {
        for j in 1..k {
            for i in 0..j {
                let c = coloring.color_sorted(i as u32, j as u32, k as u32).0;
                for (a, b, d) in [(i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)] {
                    table[(a * n + b) * n + d] = c;
                }
            }
        }
    }
    table
}

fn mask_census(table: &[u8], n: usize, colors: usize, mask: u32) -> ColorCensus {
    let members: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
    let mut counts = vec![0u64; colors];
    for c in 2..members.len() {
        for b in 1..c {
            for a in 0..b {
                counts[table[(members[a] * n + members[b]) * n + members[c]] as usize] += 1;
            }
        }
    }
    ColorCensus { counts, total: choose3(members.len() as u64) }
}

fn mask_to_set(mask: u32) -> VertexSet {
    (0..32u32).filter(|v| mask >> v & 1 == 1).collect()
}

fn check_brute_args(coloring: &TripleColoring, epsilon: f64) -> Result<(), OracleError> {
    if coloring.n_vertices() > MAX_BRUTE_VERTICES {
        return Err(OracleError::TooLarge { n: coloring.n_vertices(), max: MAX_BRUTE_VERTICES });
    }
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(OracleError::InvalidArgument("epsilon must lie in [0, 1]"));
    }
    Ok(())
}

/// Sizes are tried from `N` down; within a size, subsets in lexicographic order. The first
/// qualifying subset is the answer, since an `s`-set of density `δ` always contains an
/// `(s-1)`-set of density at least `δ`.
pub fn brute_max_almost_mono(
    coloring: &TripleColoring,
    epsilon: f64,
    budget: OracleBudget,
    clock: &dyn Clock,
) -> Result<AlmostMonoWitness, OracleError> {
    check_brute_args(coloring, epsilon)?;
    let n = coloring.n_vertices() as usize;
    let colors = coloring.n_colors() as usize;
    let table = triple_table(coloring);
    let mut meter = Meter { budget, clock, examined: 0 };
    for size in (3..=n).rev() {
        let mut combo: Vec<usize> = (0..size).collect();
        loop {
            meter.tick()?;
            let mask = combo.iter().fold(0u32, |m, &v| m | 1 << v);
            let census = mask_census(&table, n, colors, mask);
            if qualifies(&census.counts, census.total, epsilon) {
                return Ok(AlmostMonoWitness { size, subset: mask_to_set(mask), census, examined: meter.examined });
            }
            let Some(i) = (0..size).rev().find(|&i| combo[i] < n - size + i) else { break };
            combo[i] += 1;
            for x in (i + 1)..size {
                combo[x] = combo[x - 1] + 1;
            }
        }
    }
    unreachable!("a single triple always qualifies")
}

/// Independent route: walks all `2^N` subsets in reflected Gray-code order, maintaining the
/// census incrementally as one vertex enters or leaves.
pub fn brute_max_almost_mono_gray(
    coloring: &TripleColoring,
    epsilon: f64,
    budget: OracleBudget,
    clock: &dyn Clock,
) -> Result<AlmostMonoWitness, OracleError> {
    check_brute_args(coloring, epsilon)?;
    let n = coloring.n_vertices() as usize;
    let colors = coloring.n_colors() as usize;
    let mut counts = vec![0u64; colors];
    let mut mask = 0u32;
    let mut meter = Meter { budget, clock, examined: 0 };
    let mut best: Option<(usize, u32)> = None;
    for step in 1u64..(1u64 << n) {
        meter.tick()?;
        let v = step.trailing_zeros() as Vertex;
        let entering = mask >> v & 1 == 0;
        let others: Vec<Vertex> = (0..n as Vertex).filter(|&x| x != v && mask >> x & 1 == 1).collect();
        for (ix, &x) in others.iter().enumerate() {
            for &y in &others[ix + 1..] {
                let c = coloring.color_unordered(v, x, y).index();
                if entering {
                    counts[c] += 1;
                } else {
                    counts[c] -= 1;
                }
            }
        }
        mask ^= 1 << v;
        let size = mask.count_ones() as usize;
        if size < 3 || !qualifies(&counts, choose3(size as u64), epsilon) {
            continue;
        }
        let better = match best {
            None => true,
            Some((bs, bm)) => size > bs || (size == bs && lex_less(mask, bm)),
        };
        if better {
            best = Some((size, mask));
        }
    }
    let (size, mask) = best.expect("a single triple always qualifies");
    let table = triple_table(coloring);
    let census = mask_census(&table, n, colors, mask);
    Ok(AlmostMonoWitness { size, subset: mask_to_set(mask), census, examined: meter.examined })
}

fn lex_less(x: u32, y: u32) -> bool {
    let diff = x ^ y;
    diff != 0 && x & (diff & diff.wrapping_neg()) != 0
}

/// Bound on `r_2(k; l)` with its provenance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct R2Bound {
    pub value: u64,
    /// The value is the exact Ramsey number.
    pub exact: bool,
    /// The formula overflowed and `value` is `u64::MAX`.
    pub saturated: bool,
}

/// Exact values established by exhaustive enumeration.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct R2Table {
    entries: BTreeMap<(u32, u32), u64>,
}

impl R2Table {
    pub fn new() -> Self {
        Self::default()
    }

    /// Table holding every entry small enough to establish within `budget`, currently `(3, 2)`.
    pub fn computed(budget: OracleBudget, clock: &dyn Clock) -> Result<Self, OracleError> {
        let mut table = Self::new();
        let exact = r2_exact_small(3, 2, budget, clock)?;
        table.insert(3, 2, exact.value);
        Ok(table)
    }

    /// Records a value produced by [`r2_exact_small`] (or read back from a table file).
    pub fn insert(&mut self, k: u32, colors: u32, value: u64) {
        self.entries.insert((k, colors), value);
    }

    pub fn get(&self, k: u32, colors: u32) -> Option<u64> {
        self.entries.get(&(k, colors)).copied()
    }

    pub fn entries(&self) -> impl Iterator<Item = (u32, u32, u64)> + '_ {
        self.entries.iter().map(|(&(k, l), &v)| (k, l, v))
    }

    pub fn upper_bound(&self, k: u32, colors: u32) -> R2Bound {
        r2_upper_bound(self, k, colors)
    }
}

/// Upper bound on `r_2(k; l)`: the exact table value when known, else `l^(k l)`.
///
/// `k <= 2` and `l = 1` are exact without a table (`r_2(k; 1) = k`, `r_2(2; l) = 2`).
pub fn r2_upper_bound(table: &R2Table, k: u32, colors: u32) -> R2Bound {
    let exact = |value| R2Bound { value, exact: true, saturated: false };
    if k <= 2 || colors <= 1 {
        return exact(k.max(1) as u64);
    }
    if let Some(v) = table.get(k, colors) {
        return exact(v);
    }
    let exponent = k.saturating_mul(colors);
    match (colors as u64).checked_pow(exponent) {
        Some(value) => R2Bound { value, exact: false, saturated: false },
        None => R2Bound { value: u64::MAX, exact: false, saturated: true },
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct R2Exact {
    pub value: u64,
    /// A coloring of the pairs of `value - 1` indices without a monochromatic `k`-clique.
    pub witness: PairColorMatrix,
    pub colorings_checked: u64,
}

/// The least `m` such that every `l`-coloring of the pairs of `m` points has a monochromatic
/// `k`-clique, by enumerating colorings of `K_k, K_{k+1}, ..` in turn.
///
/// Colorings are enumerated with the color of the pair `(1, 2)` fixed to 0; permuting
/// colors maps every other coloring onto one of these.
pub fn r2_exact_small(k: u32, colors: u32, budget: OracleBudget, clock: &dyn Clock) -> Result<R2Exact, OracleError> {
    if k == 0 || colors == 0 || colors > 16 {
        return Err(OracleError::InvalidArgument("need k >= 1 and 1 <= l <= 16"));
    }
    let k = k as usize;
    let mut meter = Meter { budget, clock, examined: 0 };
    let mut witness = PairColorMatrix::from_fn(k - 1, |_, _| ColorId(0));
    let mut m = k;
    loop {
        let pairs = m * (m - 1) / 2;
        let mut digits = vec![0u8; pairs];
        let mut found_free = None;
        'colorings: loop {
            meter.tick()?;
            let chi = PairColorMatrix::from_fn(m, |a, b| ColorId(digits[(b - 1) * (b - 2) / 2 + (a - 1)]));
            if find_mono_clique(&chi, k).is_none() {
                found_free = Some(chi);
                break;
            }
            // odometer over digits 1.., digit 0 (the pair (1,2)) stays 0
            let mut pos = 1;
            loop {
                if pos >= pairs {
                    break 'colorings;
                }
                digits[pos] += 1;
                if (digits[pos] as u32) < colors {
                    break;
                }
                digits[pos] = 0;
                pos += 1;
            }
        }
        match found_free {
            Some(chi) => {
                witness = chi;
                m += 1;
            }
            None => {
                return Ok(R2Exact { value: m as u64, witness, colorings_checked: meter.examined });
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::GeneratorSpec;

    fn budget() -> OracleBudget {
        OracleBudget::default()
    }

    #[test]
    fn constant_coloring_is_fully_monochromatic() {
        let c = TripleColoring::constant(6, 2, ColorId(0)).unwrap();
        let w = brute_max_almost_mono(&c, 0.0, budget(), &NoClock).unwrap();
        assert_eq!(w.size, 6);
        assert_eq!(w.census.counts, vec![20, 0]);
    }

    #[test]
    fn any_coloring_has_a_monochromatic_triple() {
        for seed in 0..20 {
            let c = TripleColoring::implicit(7, 3, GeneratorSpec::uniform(seed)).unwrap();
            let w = brute_max_almost_mono(&c, 0.0, budget(), &NoClock).unwrap();
            assert!(w.size >= 3);
        }
    }

    #[test]
    fn two_enumerations_agree() {
        for seed in 0..30 {
            let c = TripleColoring::implicit(9, 2, GeneratorSpec::uniform(seed)).unwrap();
            for eps in [0.0, 0.2, 0.45] {
                let a = brute_max_almost_mono(&c, eps, budget(), &NoClock).unwrap();
                let b = brute_max_almost_mono_gray(&c, eps, budget(), &NoClock).unwrap();
                assert_eq!((a.size, &a.subset, &a.census), (b.size, &b.subset, &b.census), "seed {seed} eps {eps}");
            }
        }
    }

    #[test]
    fn monotone_in_epsilon() {
        for seed in 0..10 {
            let c = TripleColoring::implicit(8, 2, GeneratorSpec::blockmix(seed, 2)).unwrap();
            let mut last = 0;
            for eps in [0.0, 0.1, 0.25, 0.5, 0.75, 1.0] {
                let w = brute_max_almost_mono(&c, eps, budget(), &NoClock).unwrap();
                assert!(w.size >= last);
                last = w.size;
            }
            assert_eq!(last, 8);
        }
    }

    #[test]
    fn budget_is_enforced() {
        let c = TripleColoring::implicit(12, 2, GeneratorSpec::uniform(1)).unwrap();
        assert!(matches!(
            brute_max_almost_mono_gray(&c, 0.0, OracleBudget::subsets(100), &NoClock),
            Err(OracleError::BudgetExceeded { .. })
        ));
        let big = TripleColoring::constant(30, 2, ColorId(0)).unwrap();
        assert!(matches!(brute_max_almost_mono(&big, 0.0, budget(), &NoClock), Err(OracleError::TooLarge { .. })));
    }

    #[test]
    fn time_limit_is_enforced() {
        struct Late;
        impl Clock for Late {
            fn elapsed_secs(&self) -> f64 {
                1e9
            }
        }
        let c = TripleColoring::implicit(14, 2, GeneratorSpec::uniform(1)).unwrap();
        let b = OracleBudget { max_subsets: u64::MAX, time_limit_secs: Some(1.0) };
        assert!(matches!(brute_max_almost_mono_gray(&c, 0.0, b, &Late), Err(OracleError::TimeExceeded { .. })));
    }

    #[test]
    fn r2_trivial_values() {
        let t = R2Table::new();
        for l in 1..5 {
            assert_eq!(r2_upper_bound(&t, 2, l).value, 2);
        }
        assert_eq!(r2_exact_small(2, 3, budget(), &NoClock).unwrap().value, 2);
        assert_eq!(r2_exact_small(1, 3, budget(), &NoClock).unwrap().value, 1);
        assert_eq!(r2_exact_small(4, 1, budget(), &NoClock).unwrap().value, 4);
    }

    #[test]
    fn r2_formula_and_saturation() {
        let t = R2Table::new();
        assert_eq!(r2_upper_bound(&t, 5, 2), R2Bound { value: 1024, exact: false, saturated: false });
        assert_eq!(r2_upper_bound(&t, 3, 2).value, 64);
        assert!(r2_upper_bound(&t, 40, 16).saturated);
    }

    #[test]
    fn r2_three_three_exceeds_small_budget() {
        assert!(matches!(
            r2_exact_small(3, 3, OracleBudget::subsets(10_000), &NoClock),
            Err(OracleError::BudgetExceeded { .. })
        ));
    }
}
