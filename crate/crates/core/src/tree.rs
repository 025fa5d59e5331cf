//! Finite pieces of the `d`-regular tree.
//!
//! A [`TreeBall`] is the ball `B(o, R)` stored breadth-first: vertex 0 is the
//! root `o`, every sphere `∂B(o, j)` is a contiguous index range, and the
//! children of each vertex are contiguous. Because of that ordering the ball
//! `B(o, j)` is always the index prefix `0..ball_len(j)`, which the
//! percolation code relies on for coupling arenas of different radii.

use std::collections::VecDeque;
use std::ops::Range;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};

pub type Vertex = usize;

const NO_PARENT: u32 = u32::MAX;

/// Largest ball `build_ball` will allocate unless told otherwise.
pub const DEFAULT_VERTEX_BUDGET: usize = 50_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeBall {
    degree: u32,
    radius: u32,
    depth: Vec<u32>,
    parent: Vec<u32>,
    first_child: Vec<u32>,
    /// `level_start[j]` is the first index at depth `j`; one extra entry at the end.
    level_start: Vec<usize>,
}

/// `|B(o, radius)|` in `T_d`, or `None` on overflow.
pub fn ball_size(d: u32, radius: u32) -> Option<u128> {
    let mut total: u128 = 1;
    let mut sphere: u128 = 1;
    for j in 1..=radius {
        sphere = sphere.checked_mul(u128::from(if j == 1 { d } else { d - 1 }))?;
        total = total.checked_add(sphere)?;
    }
    Some(total)
}

/// Builds `B(o, radius)` in `T_d` with the default vertex budget.
pub fn build_ball(d: u32, radius: u32) -> Result<TreeBall> {
    TreeBall::with_budget(d, radius, DEFAULT_VERTEX_BUDGET)
}

impl TreeBall {
    pub fn with_budget(d: u32, radius: u32, budget: usize) -> Result<Self> {
        crate::check_degree(d)?;
        let size = ball_size(d, radius).unwrap_or(u128::MAX);
        if size > budget as u128 || size >= u128::from(NO_PARENT) {
            return Err(Error::BudgetExceeded {
                what: "tree ball vertex count",
                requested: size,
                limit: budget as u128,
            });
        }
        let size = size as usize;
        let mut depth = Vec::with_capacity(size);
        let mut parent = Vec::with_capacity(size);
        let mut first_child = vec![0u32; size];
        let mut level_start = Vec::with_capacity(radius as usize + 2);

        depth.push(0);
        parent.push(NO_PARENT);
        level_start.push(0);
        for j in 0..radius {
            let (lo, hi) = (level_start[j as usize], depth.len());
            level_start.push(hi);
            let fanout = if j == 0 { d } else { d - 1 };
            for v in lo..hi {
                first_child[v] = depth.len() as u32;
                for _ in 0..fanout {
                    depth.push(j + 1);
                    parent.push(v as u32);
                }
            }
        }
        level_start.push(depth.len());
        // leaves point one past the end; their child range is empty anyway
        let end = depth.len() as u32;
        for v in level_start[radius as usize]..depth.len() {
            first_child[v] = end;
        }
        debug_assert_eq!(depth.len(), size);
        Ok(Self {
            degree: d,
            radius,
            depth,
            parent,
            first_child,
            level_start,
        })
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// `b = d - 1`.
    pub fn branching(&self) -> u32 {
        self.degree - 1
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.depth.len()
    }

    pub fn is_empty(&self) -> bool {
        self.depth.is_empty()
    }

    pub fn root(&self) -> Vertex {
        0
    }

    pub fn depth(&self, v: Vertex) -> u32 {
        self.depth[v]
    }

    pub fn parent(&self, v: Vertex) -> Option<Vertex> {
        match self.parent[v] {
            NO_PARENT => None,
            p => Some(p as usize),
        }
    }

    pub fn child_count(&self, v: Vertex) -> u32 {
        let j = self.depth[v];
        if j >= self.radius {
            0
        } else if j == 0 {
            self.degree
        } else {
            self.degree - 1
        }
    }

    pub fn children(&self, v: Vertex) -> Range<Vertex> {
        let first = self.first_child[v] as usize;
        first..first + self.child_count(v) as usize
    }

    /// Parent first, then children in index order.
    pub fn neighbors(&self, v: Vertex) -> impl Iterator<Item = Vertex> + '_ {
        self.parent(v).into_iter().chain(self.children(v))
    }

    /// Indices of `∂B(o, j)`.
    pub fn sphere(&self, j: u32) -> Range<Vertex> {
        self.level_start[j as usize]..self.level_start[j as usize + 1]
    }

    /// `|B(o, j)|` for `j <= radius`; the ball is the index prefix of this length.
    pub fn ball_len(&self, j: u32) -> usize {
        self.level_start[j.min(self.radius) as usize + 1]
    }

    /// True when every neighbor of `v` in `T_d` is inside the arena.
    pub fn is_interior(&self, v: Vertex) -> bool {
        self.depth[v] < self.radius
    }

    /// Whether `B(v, r)` fits inside the arena.
    pub fn ball_fits(&self, v: Vertex, r: u32) -> bool {
        self.depth[v] + r <= self.radius
    }

    fn margin_error(&self, v: Vertex, r: u32) -> Error {
        Error::InsufficientMargin {
            vertex: v,
            depth: self.depth[v],
            radius: r,
            arena_radius: self.radius,
        }
    }

    /// Tree distance between two arena vertices.
    pub fn distance(&self, mut u: Vertex, mut v: Vertex) -> u32 {
        let mut dist = 0;
        while self.depth[u] > self.depth[v] {
            u = self.parent[u] as usize;
            dist += 1;
        }
        while self.depth[v] > self.depth[u] {
            v = self.parent[v] as usize;
            dist += 1;
        }
        while u != v {
            u = self.parent[u] as usize;
            v = self.parent[v] as usize;
            dist += 2;
        }
        dist
    }
}

/// A connected set of ball vertices with a designated root.
///
/// The rooting (parent pointers and rooted depths) is computed once at
/// construction; rooted distance is distance from the designated root
/// inside the mask.
#[derive(Clone, Debug)]
pub struct SubtreeMask {
    ball: Arc<TreeBall>,
    member: Vec<bool>,
    root: Vertex,
    count: usize,
    /// Members in breadth-first order from `root`.
    order: Vec<Vertex>,
    mask_parent: Vec<u32>,
    rooted_depth: Vec<u32>,
}

impl SubtreeMask {
    pub fn new(ball: Arc<TreeBall>, member: Vec<bool>, root: Vertex) -> Result<Self> {
        if member.len() != ball.len() {
            return Err(Error::InvalidParameter {
                name: "member",
                message: format!(
                    "mask has {} entries for a ball of {} vertices",
                    member.len(),
                    ball.len()
                ),
            });
        }
        if root >= member.len() || !member[root] {
            return Err(Error::NotAMember(root));
        }
        let count = member.iter().filter(|&&m| m).count();
        let mut mask_parent = vec![NO_PARENT; ball.len()];
        let mut rooted_depth = vec![0u32; ball.len()];
        let mut order = Vec::with_capacity(count);
        order.push(root);
        let mut head = 0;
        while head < order.len() {
            let v = order[head];
            head += 1;
            for w in ball.neighbors(v) {
                if member[w] && w != root && mask_parent[w] == NO_PARENT {
                    mask_parent[w] = v as u32;
                    rooted_depth[w] = rooted_depth[v] + 1;
                    order.push(w);
                }
            }
        }
        if order.len() != count {
            return Err(Error::Disconnected {
                reached: order.len(),
                members: count,
            });
        }
        Ok(Self {
            ball,
            member,
            root,
            count,
            order,
            mask_parent,
            rooted_depth,
        })
    }

    /// Mask with every vertex of the ball.
    pub fn full(ball: Arc<TreeBall>) -> Self {
        let member = vec![true; ball.len()];
        Self::new(ball, member, 0).expect("a ball is connected")
    }

    /// A path of `len` vertices hanging down from the root along first children.
    pub fn path(ball: Arc<TreeBall>, len: usize) -> Result<Self> {
        if len == 0 || len as u64 > u64::from(ball.radius()) + 1 {
            return Err(Error::InvalidParameter {
                name: "len",
                message: format!(
                    "path of {len} vertices does not fit a ball of radius {}",
                    ball.radius()
                ),
            });
        }
        let mut member = vec![false; ball.len()];
        let mut v = ball.root();
        member[v] = true;
        for _ in 1..len {
            v = ball.children(v).start;
            member[v] = true;
        }
        Self::new(ball, member, 0)
    }

    /// A connected mask grown from the root by repeatedly adding a uniformly
    /// chosen ambient neighbor of the current set, stopping at `target`
    /// vertices or when the arena is exhausted.
    pub fn random_growth<R: Rng + ?Sized>(
        ball: Arc<TreeBall>,
        target: usize,
        rng: &mut R,
    ) -> Self {
        let mut member = vec![false; ball.len()];
        let mut frontier: Vec<Vertex> = Vec::new();
        let mut in_frontier = vec![false; ball.len()];
        member[0] = true;
        let mut size = 1;
        for w in ball.neighbors(0) {
            frontier.push(w);
            in_frontier[w] = true;
        }
        while size < target && !frontier.is_empty() {
            let pick = rng.gen_range(0..frontier.len());
            let v = frontier.swap_remove(pick);
            member[v] = true;
            size += 1;
            for w in ball.neighbors(v) {
                if !member[w] && !in_frontier[w] {
                    in_frontier[w] = true;
                    frontier.push(w);
                }
            }
        }
        Self::new(ball, member, 0).expect("growth keeps the set connected")
    }

    pub fn ball(&self) -> &Arc<TreeBall> {
        &self.ball
    }

    pub fn root(&self) -> Vertex {
        self.root
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.member.get(v).copied().unwrap_or(false)
    }

    pub fn members(&self) -> &[bool] {
        &self.member
    }

    /// Members in breadth-first order from the designated root.
    pub fn order(&self) -> &[Vertex] {
        &self.order
    }

    pub fn mask_parent(&self, v: Vertex) -> Option<Vertex> {
        match self.mask_parent[v] {
            NO_PARENT => None,
            p => Some(p as usize),
        }
    }

    pub fn rooted_depth(&self, v: Vertex) -> u32 {
        self.rooted_depth[v]
    }

    /// Mask children of `v` under the current rooting.
    pub fn mask_children(&self, v: Vertex) -> impl Iterator<Item = Vertex> + '_ {
        let parent = self.mask_parent[v];
        self.ball
            .neighbors(v)
            .filter(move |&w| self.member[w] && w as u32 != parent && w != self.root)
    }

    /// Number of mask members adjacent to `v`.
    pub fn mask_degree(&self, v: Vertex) -> usize {
        self.ball.neighbors(v).filter(|&w| self.member[w]).count()
    }

    /// The same member set rooted at `root`.
    pub fn rerooted(&self, root: Vertex) -> Result<Self> {
        Self::new(self.ball.clone(), self.member.clone(), root)
    }

    /// Root used for the rooted shift: the member closest to the arena root
    /// that has a non-member neighbor in `T_d`, so that every vertex has at
    /// most `b` rooted children.
    ///
    /// Arena vertices on the boundary sphere always qualify because their
    /// outside neighbors are not in the mask.
    pub fn shift_root(&self) -> Vertex {
        let d = self.ball.degree() as usize;
        (0..self.ball.len())
            .find(|&v| {
                self.member[v] && (!self.ball.is_interior(v) || self.mask_degree(v) < d)
            })
            .expect("a finite subtree has a vertex of degree below d")
    }
}

/// `B_r`: the root and everything reachable from it in at most `r` steps
/// without passing through the excluded root neighbor `o⁻` (vertex 1).
pub fn forward_subtree(ball: &Arc<TreeBall>, r: u32) -> Result<SubtreeMask> {
    if r > ball.radius() {
        return Err(Error::InvalidParameter {
            name: "r",
            message: format!("trap depth {r} exceeds arena radius {}", ball.radius()),
        });
    }
    let excluded = excluded_root_neighbor(ball);
    let mut member = vec![false; ball.len()];
    member[0] = true;
    for v in 1..ball.ball_len(r) {
        let p = ball.parent(v).expect("non-root");
        member[v] = member[p] && v != excluded.unwrap_or(usize::MAX);
    }
    SubtreeMask::new(ball.clone(), member, 0)
}

/// The fixed neighbor `o⁻` excluded from forward subtrees.
pub fn excluded_root_neighbor(ball: &TreeBall) -> Option<Vertex> {
    (ball.radius() >= 1).then_some(1)
}

/// `|T ∩ B(v, r)|` for a mask `T`, counted inside the arena.
///
/// Refuses when `B(v, r)` leaves the arena instead of truncating.
pub fn ball_count(mask: &SubtreeMask, v: Vertex, r: u32) -> Result<usize> {
    if !mask.contains(v) {
        return Err(Error::NotAMember(v));
    }
    let ball = mask.ball();
    if !ball.ball_fits(v, r) {
        return Err(ball.margin_error(v, r));
    }
    Ok(bounded_bfs_count(ball, v, r, |w| mask.member[w]))
}

/// Counts vertices reachable from `start` through `allowed` vertices within
/// `r` steps. `start` is assumed allowed. No visited set is needed on a tree:
/// never stepping back to the vertex we came from is enough.
pub(crate) fn bounded_bfs_count(
    ball: &TreeBall,
    start: Vertex,
    r: u32,
    allowed: impl Fn(Vertex) -> bool,
) -> usize {
    let mut queue: VecDeque<(Vertex, Vertex, u32)> = VecDeque::new();
    queue.push_back((start, usize::MAX, 0));
    let mut count = 0;
    while let Some((v, from, dist)) = queue.pop_front() {
        count += 1;
        if dist == r {
            continue;
        }
        for w in ball.neighbors(v) {
            if w != from && allowed(w) {
                queue.push_back((w, v, dist + 1));
            }
        }
    }
    count
}

/// `D_k(x)`: members at rooted distance exactly `k` below `x`, indexed by
/// ambient vertex (zero for non-members).
pub fn descendant_counts(mask: &SubtreeMask, k: u32) -> Vec<u64> {
    descendant_profile(mask, k).pop().expect("k + 1 levels")
}

/// `D_0, ..., D_k` via `D_{j+1}(x) = Σ_children D_j(c)`, each level one
/// bottom-up pass over the breadth-first order.
pub fn descendant_profile(mask: &SubtreeMask, k: u32) -> Vec<Vec<u64>> {
    let n = mask.ball().len();
    let mut current = vec![0u64; n];
    for &v in mask.order() {
        current[v] = 1;
    }
    let mut levels = Vec::with_capacity(k as usize + 1);
    for _ in 0..k {
        let mut next = vec![0u64; n];
        for &v in mask.order().iter().rev() {
            if let Some(p) = mask.mask_parent(v) {
                next[p] += current[v];
            }
        }
        levels.push(std::mem::replace(&mut current, next));
    }
    levels.push(current);
    levels
}
