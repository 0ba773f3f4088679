//! Small integer and floating point helpers shared across modules.

/// `C(n, k)` as `u128`, saturating at `u128::MAX`.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step.
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

#[inline]
pub fn choose2(n: u64) -> u64 {
    if n < 2 {
        0
    } else {
        n * (n - 1) / 2
    }
}

#[inline]
pub fn choose3(n: u64) -> u64 {
    if n < 3 {
        0
    } else {
        // n(n-1)(n-2) overflows u64 for n around 2^21; go through u128.
        ((n as u128 * (n - 1) as u128 * (n - 2) as u128) / 6) as u64
    }
}

/// Colex rank of the sorted triple `i < j < k`: `C(k,3) + C(j,2) + i`.
#[inline]
pub fn triple_rank(i: u32, j: u32, k: u32) -> u64 {
    debug_assert!(i < j && j < k);
    choose3(k as u64) + choose2(j as u64) + i as u64
}

/// Inverse of [`triple_rank`].
pub fn triple_unrank(rank: u64) -> (u32, u32, u32) {
    // largest k with C(k,3) <= rank
    let mut k = libm::cbrt(6.0 * rank as f64) as u64 + 2;
    while choose3(k) > rank {
        k -= 1;
    }
    while choose3(k + 1) <= rank {
        k += 1;
    }
    let rest = rank - choose3(k);
    let mut j = libm::sqrt(2.0 * rest as f64) as u64 + 1;
    while choose2(j) > rest {
        j -= 1;
    }
    while choose2(j + 1) <= rest {
        j += 1;
    }
    let i = rest - choose2(j);
    (i as u32, j as u32, k as u32)
}

/// Number of bits needed to store values in `[0, bound)`; 0 when `bound <= 1`.
#[inline]
pub fn ceil_log2(bound: u64) -> u32 {
    if bound <= 1 {
        0
    } else {
        64 - (bound - 1).leading_zeros()
    }
}

/// `sqrt(log2(n))`.
pub fn sqrt_log2(n: u64) -> f64 {
    libm::sqrt(libm::log2(n as f64))
}

/// `floor(sqrt(log2 n) / l^power)`, the part-size schedule of the strict procedure.
pub fn scheduled_part_size(n: u64, colors: u32, power: u32) -> u64 {
    let denom = libm::pow(colors as f64, power as f64);
    let x = sqrt_log2(n) / denom;
    // guard against 3.9999999 style representation error on exact values
    let rounded = libm::round(x);
    if libm::fabs(x - rounded) < 1e-9 {
        rounded as u64
    } else {
        libm::floor(x) as u64
    }
}

/// `n^(1/4 + 2^-i)`, the reservoir lower bound after round `i`.
pub fn reservoir_bound(n: u64, round: u32) -> f64 {
    let exponent = 0.25 + libm::pow(2.0, -(round as f64));
    libm::exp2(libm::log2(n as f64) * exponent)
}

/// `ceil(e^t / n^(2t-1))`, i.e. `ceil(eps^t * n)` for `eps = e / n^2`.
pub fn ceil_density_power(edges: u64, n: u64, t: u32) -> u64 {
    if n == 0 {
        return 0;
    }
    if t == 0 {
        return n;
    }
    let num = (edges as u128).checked_pow(t);
    let den = (n as u128).checked_pow(2 * t - 1);
    match (num, den) {
        (Some(num), Some(den)) => num.div_ceil(den) as u64,
        _ => {
            let eps = edges as f64 / (n as f64 * n as f64);
            libm::ceil(libm::pow(eps, t as f64) * n as f64) as u64
        }
    }
}

/// `ceil(count / 2^width)`.
#[inline]
pub fn ceil_shift(count: u64, width: u32) -> u64 {
    if width >= 64 {
        return u64::from(count > 0);
    }
    let unit = 1u64 << width;
    count.div_ceil(unit)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_small_values() {
        assert_eq!(binomial(5, 3), 10);
        assert_eq!(binomial(32, 3), 4960);
        assert_eq!(binomial(50, 3), 19600);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(choose3(50), 19600);
        assert_eq!(choose2(6), 15);
    }

    #[test]
    fn rank_round_trips_for_all_triples_below_twenty() {
        let mut expected = 0u64;
        // colex order: k outermost, then j, then i
        for k in 2..20u32 {
            for j in 1..k {
                for i in 0..j {
                    assert_eq!(triple_rank(i, j, k), expected);
                    assert_eq!(triple_unrank(expected), (i, j, k));
                    expected += 1;
                }
            }
        }
        assert_eq!(expected, choose3(20));
    }

    #[test]
    fn unrank_large_ranks() {
        let n = 1u32 << 21;
        let r = triple_rank(n - 3, n - 2, n - 1);
        assert_eq!(triple_unrank(r), (n - 3, n - 2, n - 1));
        assert_eq!(triple_unrank(choose3(n as u64) - 1), (n - 3, n - 2, n - 1));
    }

    #[test]
    fn schedule_values() {
        assert_eq!(scheduled_part_size(1 << 16, 2, 1), 2);
        assert_eq!(scheduled_part_size(1 << 16, 2, 2), 1);
        assert_eq!(scheduled_part_size(8, 8, 1), 0);
        assert_eq!(reservoir_bound(1 << 16, 1), 4096.0);
        assert_eq!(reservoir_bound(1 << 16, 2), 256.0);
    }

    #[test]
    fn density_power() {
        // eps = 1/4, t = 3, n = 64 -> 1
        assert_eq!(ceil_density_power(1024, 64, 3), 1);
        // K6: e = 15, eps^2 * 6 = 225/1296*6
        assert_eq!(ceil_density_power(15, 6, 2), 2);
        assert_eq!(ceil_shift(1024, 10), 1);
        assert_eq!(ceil_shift(4, 2), 1);
        assert_eq!(ceil_shift(5, 2), 2);
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(3), 2);
        assert_eq!(ceil_log2(16), 4);
        assert_eq!(ceil_log2(1), 0);
    }
}
