use std::ops::Range;
use std::sync::Arc;

use faer::Mat;

use crate::error::{Error, Result};
use crate::percolation::ClusterGraph;
use crate::tree::{SubtreeMask, TreeBall, Vertex};

const NONE: u32 = u32::MAX;

/// `P(x, y) = w · 1{x ~ y}` on a vertex set of a tree ball, `w = 1/d`
/// (or `-1/d` after [`KilledOperator::negated`]).
///
/// Local indices group vertices by connected component; each component is
/// laid out breadth-first from its first vertex, so reversing the local order
/// visits children before parents.
#[derive(Clone, Debug)]
pub struct KilledOperator {
    ball: Arc<TreeBall>,
    vertices: Vec<Vertex>,
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
    weight: f64,
    root: Option<usize>,
    component_starts: Vec<usize>,
    tree_parent: Vec<u32>,
}

impl KilledOperator {
    /// Induced operator on `vertices` (ambient indices, any order). When
    /// `root` is a member its component is laid out first, starting at it.
    pub fn from_vertices(
        ball: &Arc<TreeBall>,
        vertices: &[Vertex],
        root: Option<Vertex>,
    ) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::EmptyOperator);
        }
        let mut member = vec![false; ball.len()];
        for &v in vertices {
            member[v] = true;
        }
        let mut local = vec![NONE; ball.len()];
        let mut order: Vec<Vertex> = Vec::with_capacity(vertices.len());
        let mut tree_parent: Vec<u32> = Vec::with_capacity(vertices.len());
        let mut component_starts = Vec::new();
        let root = root.filter(|&r| member[r]);

        let mut sorted: Vec<Vertex> = vertices.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let seeds = root.into_iter().chain(sorted.iter().copied());
        for seed in seeds {
            if local[seed] != NONE {
                continue;
            }
            component_starts.push(order.len());
            local[seed] = order.len() as u32;
            order.push(seed);
            tree_parent.push(NONE);
            let mut head = order.len() - 1;
            while head < order.len() {
                let v = order[head];
                for w in ball.neighbors(v) {
                    if member[w] && local[w] == NONE {
                        local[w] = order.len() as u32;
                        order.push(w);
                        tree_parent.push(head as u32);
                    }
                }
                head += 1;
            }
        }
        component_starts.push(order.len());

        let mut offsets = Vec::with_capacity(order.len() + 1);
        let mut neighbors = Vec::new();
        offsets.push(0);
        for &v in &order {
            neighbors.extend(
                ball.neighbors(v)
                    .filter(|&w| member[w])
                    .map(|w| local[w] as usize),
            );
            offsets.push(neighbors.len());
        }
        Ok(Self {
            ball: ball.clone(),
            root: root.map(|r| local[r] as usize),
            vertices: order,
            offsets,
            neighbors,
            weight: 1.0 / f64::from(ball.degree()),
            component_starts,
            tree_parent,
        })
    }

    pub fn from_mask(mask: &SubtreeMask) -> Self {
        Self::from_vertices(mask.ball(), mask.order(), Some(mask.root()))
            .expect("masks are nonempty")
    }

    pub fn from_cluster(cluster: &ClusterGraph) -> Result<Self> {
        Self::from_vertices(
            cluster.ball(),
            cluster.vertices(),
            cluster.vertices().get(cluster.root()).copied(),
        )
    }

    /// `-P`: on a bipartite graph this is unitarily equivalent to `P`.
    pub fn negated(&self) -> Self {
        let mut out = self.clone();
        out.weight = -self.weight;
        out
    }

    pub fn ball(&self) -> &Arc<TreeBall> {
        &self.ball
    }

    pub fn dim(&self) -> usize {
        self.vertices.len()
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn degree(&self) -> u32 {
        self.ball.degree()
    }

    /// Ambient vertex of local index `i`.
    pub fn vertex(&self, i: usize) -> Vertex {
        self.vertices[i]
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    /// Local index of the designated root, when it is a member.
    pub fn root(&self) -> Option<usize> {
        self.root
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn components(&self) -> impl Iterator<Item = Range<usize>> + '_ {
        self.component_starts.windows(2).map(|w| w[0]..w[1])
    }

    pub fn component_count(&self) -> usize {
        self.component_starts.len() - 1
    }

    /// Parent of local vertex `i` in its component's breadth-first rooting.
    pub fn tree_parent(&self, i: usize) -> Option<usize> {
        match self.tree_parent[i] {
            NONE => None,
            p => Some(p as usize),
        }
    }

    /// `y = P x`.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (i, out) in y.iter_mut().enumerate() {
            let s: f64 = self.neighbors(i).iter().map(|&j| x[j]).sum();
            *out = self.weight * s;
        }
    }

    /// `y = P x` restricted to one component; `x` and `y` use offsets
    /// relative to `range.start`.
    pub fn apply_component(&self, range: &Range<usize>, x: &[f64], y: &mut [f64]) {
        let base = range.start;
        for (k, out) in y.iter_mut().enumerate() {
            let s: f64 = self
                .neighbors(base + k)
                .iter()
                .map(|&j| x[j - base])
                .sum();
            *out = self.weight * s;
        }
    }

    pub fn to_dense(&self) -> Mat<f64> {
        self.component_dense(&(0..self.dim()))
    }

    pub fn component_dense(&self, range: &Range<usize>) -> Mat<f64> {
        let n = range.len();
        let mut m = Mat::zeros(n, n);
        for i in range.clone() {
            for &j in self.neighbors(i) {
                m[(i - range.start, j - range.start)] = self.weight;
            }
        }
        m
    }

    /// Row sums of `|P|`: the number of member neighbors over `d`.
    pub fn max_row_sum(&self) -> f64 {
        (0..self.dim())
            .map(|i| self.neighbors(i).len() as f64 * self.weight.abs())
            .fold(0.0, f64::max)
    }

    /// `(x, y)` local pairs of each edge once.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.dim()).filter_map(move |i| self.tree_parent(i).map(|p| (p, i)))
    }
}
