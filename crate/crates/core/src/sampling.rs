//! Seeded sampling of interior chart points.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::jet::{ImmersionSpec, BOUNDARY_MARGIN};

/// Uniform points in the domain box, inset slightly past the standard
/// boundary margin so every sample passes the interior check. Deterministic
/// for a fixed seed.
pub fn sample_points(spec: &ImmersionSpec, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            spec.domain
                .iter()
                .map(|(lo, hi)| {
                    let inset = 1.5 * BOUNDARY_MARGIN * (hi - lo);
                    rng.gen_range(lo + inset..hi - inset)
                })
                .collect()
        })
        .collect()
}
