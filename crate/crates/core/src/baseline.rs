//! Uniform random keypoint selection, the comparison floor for evaluations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cloud::ColoredPointCloud;
use crate::detector::KeypointSet;
use crate::error::{Error, Result};

/// Draws `count` distinct indices uniformly (partial Fisher-Yates on a
/// ChaCha8 stream seeded with `seed`), returned ascending.
pub fn detect_random(cloud: &ColoredPointCloud, count: usize, seed: u64) -> Result<KeypointSet> {
    let n = cloud.len();
    if count == 0 || count > n {
        return Err(Error::CountOutOfRange { count, len: n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // a stream of its own, apart from noise and transform draws
    rng.set_stream(2);
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..count {
        let j = rng.random_range(i..n);
        pool.swap(i, j);
    }
    pool.truncate(count);
    pool.sort_unstable();
    Ok(KeypointSet {
        indices: pool,
        params: None,
    })
}
