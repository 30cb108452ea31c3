//! Seeded random inputs for the projection and truncation suites.

use orlicz_core::{Atom, Log2Value, SimpleFunction};
use rand::Rng;

/// One to six atoms with coefficients in `[2^-4, 2^4]` and multiplicities
/// up to 3, filling a random fraction of `[0, 1]`.
pub fn random_simple_function<R: Rng>(rng: &mut R) -> SimpleFunction {
    let n = rng.random_range(1..=6);
    let raw: Vec<(f64, f64, u64)> =
        (0..n).map(|_| (rng.random_range(-4.0..4.0), rng.random_range(0.01..1.0), rng.random_range(1..=3))).collect();
    let fill: f64 = rng.random_range(0.1..1.0);
    let total: f64 = raw.iter().map(|r| r.1 * r.2 as f64).sum();
    let atoms = raw
        .iter()
        .map(|&(c, w, m)| Atom::new(Log2Value::pow2(c), Log2Value::pow2((fill * w / total).log2())).with_mult(m))
        .collect();
    SimpleFunction::new(atoms).expect("measures fill at most the unit interval")
}

/// A random partition of `0..n` into consecutive groups.
pub fn random_groups<R: Rng>(rng: &mut R, n: usize) -> Vec<Vec<usize>> {
    let mut groups = Vec::new();
    let mut start = 0;
    while start < n {
        let len = rng.random_range(1..=n - start);
        groups.push((start..start + len).collect());
        start += len;
    }
    groups
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn seeded_inputs_are_reproducible() {
        let a = random_simple_function(&mut ChaCha8Rng::seed_from_u64(7));
        let b = random_simple_function(&mut ChaCha8Rng::seed_from_u64(7));
        assert_eq!(a, b);
        assert!(a.total_measure() <= Log2Value::ONE);
    }

    #[test]
    fn groups_partition() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..8 {
            let g = random_groups(&mut rng, n);
            let flat: Vec<usize> = g.concat();
            assert_eq!(flat, (0..n).collect::<Vec<_>>());
        }
    }
}
