//! Seeded synthetic data for benchmarks and end-to-end tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::types::{RowDataset, Value};

/// Features `0..3` drive a binary class through their parity (10% label
/// noise); features `3..6` are noisy copies of `0..3`; everything else is
/// independent noise. With `density < 1` each cell is non-zero with that
/// probability. The class is the last column.
pub fn generate(seed: u64, m: usize, n: usize, cardinality: u32, density: f64) -> RowDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ncols = n + 1;
    let mut values = Vec::with_capacity(m * ncols);
    let mut row: Vec<Value> = vec![0; ncols];
    for _ in 0..m {
        for v in row.iter_mut().take(n) {
            *v = draw(&mut rng, cardinality, density);
        }
        for k in 3..n.min(6) {
            if rng.random_bool(0.8) {
                row[k] = row[k - 3];
            }
        }
        let parity = row.iter().take(n.min(3)).sum::<Value>() % 2;
        row[n] = if rng.random_bool(0.1) { 1 - parity } else { parity };
        values.extend_from_slice(&row);
    }
    RowDataset::from_flat(values, ncols, n).expect("generator emits well-formed rows")
}

fn draw(rng: &mut ChaCha8Rng, cardinality: u32, density: f64) -> Value {
    if density >= 1.0 {
        rng.random_range(0..cardinality)
    } else if rng.random_bool(density) {
        rng.random_range(1..cardinality)
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_shaped() {
        let a = generate(7, 100, 10, 4, 1.0);
        assert_eq!(a, generate(7, 100, 10, 4, 1.0));
        assert_eq!((a.m(), a.n(), a.class_index()), (100, 10, 10));
        assert!(a.cardinalities()[..10].iter().all(|&c| c <= 4));
        assert_eq!(a.cardinalities()[10], 2);
    }

    #[test]
    fn density_controls_non_zeros() {
        let d = generate(8, 2000, 20, 3, 0.05);
        let nz = (6..20)
            .map(|k| d.column(k).iter().filter(|&&v| v != 0).count())
            .sum::<usize>();
        let frac = nz as f64 / (14.0 * 2000.0);
        assert!((0.03..0.07).contains(&frac), "{frac}");
    }
}
