//! Shared fixtures for the averaging benchmarks.

use hlmax_core::{RadiusGrid, SampledFunction, UniformGrid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Uniform noise in `[-1, 1)` on a `side`-per-axis unit-spacing grid.
pub fn noise(dim: usize, side: usize, seed: u64) -> SampledFunction {
    let grid = UniformGrid::new(dim, &vec![0.0; dim], 1.0, &vec![side; dim]).expect("valid grid");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..grid.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    SampledFunction::new(grid, values).expect("matching length")
}

/// Radii `1, 2, ..., count` in grid units.
pub fn unit_radii(count: usize) -> RadiusGrid {
    RadiusGrid::multiples_of(1.0, count, false).expect("positive radii")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_reproducible() {
        let a = noise(1, 64, 3);
        assert_eq!(a.values(), noise(1, 64, 3).values());
        assert!(a.values().iter().all(|v| (-1.0..1.0).contains(v)));
        assert_eq!(noise(2, 8, 0).grid().len(), 64);
        assert_eq!(unit_radii(4).radii(), &[1.0, 2.0, 3.0, 4.0]);
    }
}
