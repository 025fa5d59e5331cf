//! Fixtures shared by the kernel benchmarks.

use std::sync::Arc;

use lamptree::percolation::{extract_cluster, PercolationConfig};
use lamptree::tree::{build_ball, forward_subtree};
use lamptree::{KilledOperator, StreamRng};

/// Killed operator of the forward trap `B_r` in `T_d`.
pub fn trap_operator(d: u32, r: u32) -> KilledOperator {
    let ball = Arc::new(build_ball(d, r).expect("small ball"));
    KilledOperator::from_mask(&forward_subtree(&ball, r).expect("r fits"))
}

/// Root-cluster operator of the first draw on `B(o, radius)` whose cluster
/// has at least `min_size` vertices.
pub fn cluster_operator(d: u32, radius: u32, min_size: usize, seed: u64) -> KilledOperator {
    let ball = Arc::new(build_ball(d, radius).expect("small ball"));
    (0..)
        .find_map(|stream| {
            let config = PercolationConfig::sample(&ball, &mut StreamRng::new(seed, stream));
            extract_cluster(&config)
                .filter(|c| c.len() >= min_size)
                .map(|c| KilledOperator::from_cluster(&c).expect("nonempty"))
        })
        .expect("some draw is large enough")
}
