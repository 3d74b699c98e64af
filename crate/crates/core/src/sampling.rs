//! Deterministic quasi-random points (Halton sequence).

const PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

/// Radical inverse of `index` in `base`.
pub fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut x = 0.0;
    while index > 0 {
        x += (index % base) as f64 * f;
        index /= base;
        f *= inv;
    }
    x
}

/// `count` Halton points mapped into the given boxes. The seed offsets the
/// starting index, so distinct seeds give disjoint stretches of the sequence.
pub fn halton_points(bounds: &[(f64, f64)], count: usize, seed: u64) -> Vec<Vec<f64>> {
    assert!(bounds.len() <= PRIMES.len(), "at most {} dimensions", PRIMES.len());
    let start = 1 + seed.wrapping_mul(count as u64 + 1);
    (0..count as u64)
        .map(|i| {
            bounds
                .iter()
                .zip(PRIMES)
                .map(|(&(lo, hi), base)| lo + (hi - lo) * radical_inverse(start + i, base))
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radical_inverse_base_two() {
        let v: Vec<f64> = (1..=4).map(|i| radical_inverse(i, 2)).collect();
        assert_eq!(v, vec![0.5, 0.25, 0.75, 0.125]);
    }

    #[test]
    fn points_stay_in_bounds_and_are_deterministic() {
        let b = [(0.1, 3.0), (-1.0, 1.0), (0.0, 0.5)];
        let a = halton_points(&b, 100, 7);
        assert_eq!(a, halton_points(&b, 100, 7));
        assert_ne!(a, halton_points(&b, 100, 8));
        for p in &a {
            for (x, (lo, hi)) in p.iter().zip(b) {
                assert!(*x >= lo && *x < hi);
            }
        }
    }
}
