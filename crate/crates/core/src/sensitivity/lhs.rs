use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ParameterRanges;

/// Latin hypercube sample: `n` rows, one column per range.
///
/// Each column places exactly one point in each of `n` equal strata, with
/// uniform jitter inside the stratum; strata are shuffled independently per
/// column. Columns are drawn in range order from a single seeded stream.
pub fn lhs_sample(ranges: &ParameterRanges, n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = ranges.len();
    let mut rows = vec![vec![0.0; k]; n];
    let mut strata: Vec<usize> = (0..n).collect();
    for (j, range) in ranges.iter().enumerate() {
        strata.sort_unstable();
        strata.shuffle(&mut rng);
        let width = range.high - range.low;
        for (row, &s) in rows.iter_mut().zip(&strata) {
            let u: f64 = rng.random();
            row[j] = range.low + width * (s as f64 + u) / n as f64;
        }
    }
    rows
}
