//! Bernoulli site percolation on tree balls.

use std::sync::Arc;

use rand::{Rng, RngCore};

use crate::error::{Error, Result};
use crate::rng::{McPlan, StreamRng, StreamTag};
use crate::stats::{Tally, DEFAULT_Z};
use crate::tree::{bounded_bfs_count, build_ball, TreeBall, Vertex};

/// Site parameter forced by the `Z_2` lamp group. Only at this value does the
/// mean of a product of open indicators over a set `A` equal `2^-|A|`.
pub const LAMP_PARAMETER: f64 = 0.5;

#[derive(Clone, Debug)]
pub struct PercolationConfig {
    ball: Arc<TreeBall>,
    open: Vec<bool>,
    p: f64,
    seed_record: StreamTag,
}

impl PercolationConfig {
    /// Fair coin per vertex, in breadth-first vertex order.
    pub fn sample(ball: &Arc<TreeBall>, rng: &mut StreamRng) -> Self {
        let mut config = Self {
            ball: ball.clone(),
            open: vec![false; ball.len()],
            p: LAMP_PARAMETER,
            seed_record: StreamTag::default(),
        };
        config.resample(rng);
        config
    }

    /// Sensitivity runs away from `p = 1/2`.
    pub fn sample_with_p(ball: &Arc<TreeBall>, p: f64, rng: &mut StreamRng) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter {
                name: "p",
                message: format!("site probability {p} outside [0, 1]"),
            });
        }
        let seed_record = rng.tag();
        let open = (0..ball.len()).map(|_| rng.gen_bool(p)).collect();
        Ok(Self {
            ball: ball.clone(),
            open,
            p,
            seed_record,
        })
    }

    /// Redraws every site at `p = 1/2` in place.
    ///
    /// Bits are taken 64 per `next_u64`, low bit first, so the first
    /// `|B(o, j)|` sites only depend on the stream position, not on the
    /// arena radius.
    pub fn resample(&mut self, rng: &mut StreamRng) {
        self.seed_record = rng.tag();
        self.p = LAMP_PARAMETER;
        for chunk in self.open.chunks_mut(64) {
            let word = rng.next_u64();
            for (i, site) in chunk.iter_mut().enumerate() {
                *site = (word >> i) & 1 == 1;
            }
        }
    }

    pub fn from_open(ball: &Arc<TreeBall>, open: Vec<bool>) -> Result<Self> {
        if open.len() != ball.len() {
            return Err(Error::InvalidParameter {
                name: "open",
                message: format!("{} sites for a ball of {}", open.len(), ball.len()),
            });
        }
        Ok(Self {
            ball: ball.clone(),
            open,
            p: LAMP_PARAMETER,
            seed_record: StreamTag::default(),
        })
    }

    pub fn all_open(ball: &Arc<TreeBall>) -> Self {
        Self::from_open(ball, vec![true; ball.len()]).expect("sized to ball")
    }

    pub fn all_closed(ball: &Arc<TreeBall>) -> Self {
        Self::from_open(ball, vec![false; ball.len()]).expect("sized to ball")
    }

    /// The event `E_r`: the forward trap `B_r` open, its outer boundary
    /// closed, every other site open. Needs an arena of radius at least `r + 1`.
    pub fn trap_event(ball: &Arc<TreeBall>, r: u32) -> Result<Self> {
        if ball.radius() < r + 1 {
            return Err(Error::InvalidParameter {
                name: "r",
                message: format!(
                    "trap of depth {r} needs arena radius {} (have {})",
                    r + 1,
                    ball.radius()
                ),
            });
        }
        let trap = crate::tree::forward_subtree(ball, r)?;
        let mut open = vec![true; ball.len()];
        for (v, site) in open.iter_mut().enumerate() {
            let outer_boundary = !trap.contains(v)
                && ball.neighbors(v).any(|w| trap.contains(w));
            if outer_boundary {
                *site = false;
            }
        }
        Self::from_open(ball, open)
    }

    pub fn ball(&self) -> &Arc<TreeBall> {
        &self.ball
    }

    pub fn is_open(&self, v: Vertex) -> bool {
        self.open[v]
    }

    pub fn open(&self) -> &[bool] {
        &self.open
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn seed_record(&self) -> StreamTag {
        self.seed_record
    }

    pub fn set_open(&mut self, v: Vertex, open: bool) {
        self.open[v] = open;
    }

    /// The same configuration seen on the smaller arena `B(o, radius)`.
    pub fn restrict(&self, radius: u32) -> Result<Self> {
        if radius > self.ball.radius() {
            return Err(Error::InvalidParameter {
                name: "radius",
                message: format!(
                    "cannot restrict radius {} to larger radius {radius}",
                    self.ball.radius()
                ),
            });
        }
        let ball = Arc::new(build_ball(self.ball.degree(), radius)?);
        let open = self.open[..ball.len()].to_vec();
        Ok(Self {
            ball,
            open,
            p: self.p,
            seed_record: self.seed_record,
        })
    }
}

/// The open cluster of a vertex as a standalone graph.
#[derive(Clone, Debug)]
pub struct ClusterGraph {
    ball: Arc<TreeBall>,
    /// Ambient indices in breadth-first order from the cluster root.
    vertices: Vec<Vertex>,
    offsets: Vec<usize>,
    adjacency: Vec<usize>,
    root: usize,
    truncated_at_boundary: bool,
}

impl ClusterGraph {
    pub fn ball(&self) -> &Arc<TreeBall> {
        &self.ball
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Position of the root in [`Self::vertices`] (always 0).
    pub fn root(&self) -> usize {
        self.root
    }

    /// Local neighbor indices of local vertex `i`.
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[self.offsets[i]..self.offsets[i + 1]]
    }

    /// Whether the cluster reaches `∂B(o, R)` and may continue outside the arena.
    pub fn truncated_at_boundary(&self) -> bool {
        self.truncated_at_boundary
    }
}

/// Root cluster `C_ω(o)`; `None` when the root is closed.
pub fn extract_cluster(config: &PercolationConfig) -> Option<ClusterGraph> {
    extract_cluster_at(config, 0, u32::MAX)
}

/// Open cluster of `start`, explored at most `max_dist` steps from it.
pub fn extract_cluster_at(
    config: &PercolationConfig,
    start: Vertex,
    max_dist: u32,
) -> Option<ClusterGraph> {
    if !config.is_open(start) {
        return None;
    }
    let ball = config.ball();
    let mut vertices = vec![start];
    let mut dist = vec![0u32];
    let mut local = std::collections::HashMap::new();
    local.insert(start, 0usize);
    let mut head = 0;
    while head < vertices.len() {
        let v = vertices[head];
        let dv = dist[head];
        head += 1;
        if dv == max_dist {
            continue;
        }
        for w in ball.neighbors(v) {
            if config.is_open(w) && !local.contains_key(&w) {
                local.insert(w, vertices.len());
                vertices.push(w);
                dist.push(dv + 1);
            }
        }
    }
    let mut offsets = Vec::with_capacity(vertices.len() + 1);
    let mut adjacency = Vec::new();
    offsets.push(0);
    let mut truncated = false;
    for &v in &vertices {
        truncated |= !ball.is_interior(v);
        adjacency.extend(ball.neighbors(v).filter_map(|w| local.get(&w).copied()));
        offsets.push(adjacency.len());
    }
    Some(ClusterGraph {
        ball: ball.clone(),
        vertices,
        offsets,
        adjacency,
        root: 0,
        truncated_at_boundary: truncated,
    })
}

/// `Z_j = |C ∩ ∂B(o, j)|` for `0 <= j <= R`, by ambient depth.
pub fn sphere_counts(cluster: &ClusterGraph) -> Vec<u64> {
    let ball = cluster.ball();
    let mut z = vec![0u64; ball.radius() as usize + 1];
    for &v in cluster.vertices() {
        z[ball.depth(v) as usize] += 1;
    }
    z
}

/// `|C_ω(v) ∩ B(v, r)|`, zero when `v` is closed. Refuses when `B(v, r)`
/// leaves the arena.
pub fn cluster_ball_count(config: &PercolationConfig, v: Vertex, r: u32) -> Result<usize> {
    let ball = config.ball();
    if !ball.ball_fits(v, r) {
        return Err(Error::InsufficientMargin {
            vertex: v,
            depth: ball.depth(v),
            radius: r,
            arena_radius: ball.radius(),
        });
    }
    if !config.is_open(v) {
        return Ok(0);
    }
    Ok(bounded_bfs_count(ball, v, r, |w| config.is_open(w)))
}

/// `a · b^r`, the dense-ball threshold.
pub fn density_threshold(b: u32, r: u32, a: f64) -> f64 {
    a * f64::from(b).powi(r as i32)
}

/// Monte Carlo frequency of `|C_ω(o) ∩ B(o, r)| >= a b^r` with a Wilson interval.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseBallEstimate {
    pub d: u32,
    pub r: u32,
    pub a: f64,
    pub tally: Tally,
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub z: f64,
    pub seed: u64,
}

pub fn dense_ball_probability(d: u32, r: u32, a: f64, plan: &McPlan) -> Result<DenseBallEstimate> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::InvalidParameter {
            name: "a",
            message: format!("density threshold must be positive, got {a}"),
        });
    }
    if plan.samples == 0 {
        return Err(Error::InvalidParameter {
            name: "samples",
            message: "need at least one sample".into(),
        });
    }
    let ball = Arc::new(build_ball(d, r)?);
    let threshold = density_threshold(d - 1, r, a);
    let tally = plan.run(Tally::default, |rng, _first, count, acc| {
        let mut config = PercolationConfig::all_closed(&ball);
        for _ in 0..count {
            config.resample(rng);
            let hit = config.is_open(0)
                && bounded_bfs_count(&ball, 0, r, |w| config.is_open(w)) as f64 >= threshold;
            acc.record(hit);
        }
    })?;
    let (ci_low, ci_high) = tally.wilson(DEFAULT_Z);
    Ok(DenseBallEstimate {
        d,
        r,
        a,
        tally,
        estimate: tally.frequency(),
        ci_low,
        ci_high,
        z: DEFAULT_Z,
        seed: plan.seed,
    })
}

/// Dense-ball indicator over the inner ball `B(o, R - r)`.
#[derive(Clone, Debug)]
pub struct WitnessSet {
    r: u32,
    a: f64,
    member: Vec<bool>,
}

impl WitnessSet {
    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    /// Membership of `v`; `None` outside the inner ball where the radius-`r`
    /// ball does not fit.
    pub fn contains(&self, v: Vertex) -> Option<bool> {
        self.member.get(v).copied()
    }

    /// Number of vertices where membership is defined.
    pub fn inner_len(&self) -> usize {
        self.member.len()
    }

    pub fn len(&self) -> usize {
        self.member.iter().filter(|&&m| m).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Witnesses inside `B(o, j)` for `j <= R - r`.
    pub fn count_within(&self, prefix: usize) -> usize {
        self.member[..prefix.min(self.member.len())]
            .iter()
            .filter(|&&m| m)
            .count()
    }
}

pub fn witness_set(config: &PercolationConfig, r: u32, a: f64) -> Result<WitnessSet> {
    let ball = config.ball();
    if ball.radius() < r {
        return Err(Error::InvalidParameter {
            name: "r",
            message: format!(
                "witness radius {r} exceeds arena radius {}",
                ball.radius()
            ),
        });
    }
    let threshold = density_threshold(ball.branching(), r, a);
    let inner = ball.ball_len(ball.radius() - r);
    let member = (0..inner)
        .map(|v| {
            config.is_open(v)
                && bounded_bfs_count(ball, v, r, |w| config.is_open(w)) as f64 >= threshold
        })
        .collect();
    Ok(WitnessSet { r, a, member })
}
