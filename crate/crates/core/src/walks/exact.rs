//! Exhaustive enumeration of closed walks from the root, grouped by range size.
//!
//! Walks are enumerated up to relabeling of children: at every vertex the
//! children already visited are the first few in visiting order, and stepping
//! to a fresh child carries the number of unvisited children as its
//! multiplicity. The visited set is a stack of vertices with undo on return.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;

use super::{ln_rational, EstimateMethod, ReturnProbEstimate};
use crate::error::{Error, Result};

/// Default limit on DFS nodes.
pub const DEFAULT_NODE_BUDGET: u64 = 2_000_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WalkBudget {
    pub max_nodes: u64,
}

impl Default for WalkBudget {
    fn default() -> Self {
        Self {
            max_nodes: DEFAULT_NODE_BUDGET,
        }
    }
}

struct Dfs {
    d: u64,
    b: u64,
    parent: Vec<usize>,
    depth: Vec<u32>,
    kids: Vec<Vec<usize>>,
    counts: Vec<u128>,
    nodes: u64,
    max_nodes: u64,
    exhausted: bool,
}

impl Dfs {
    fn capacity(&self, x: usize) -> u64 {
        if x == 0 {
            self.d
        } else {
            self.b
        }
    }

    fn walk(&mut self, x: usize, left: u32, weight: u128) {
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            self.exhausted = true;
            return;
        }
        if left == 0 {
            if x == 0 {
                self.counts[self.parent.len()] += weight;
            }
            return;
        }
        let depth = self.depth[x];
        if x != 0 {
            self.walk(self.parent[x], left - 1, weight);
        }
        if depth + 1 > left - 1 {
            return;
        }
        for i in 0..self.kids[x].len() {
            let c = self.kids[x][i];
            self.walk(c, left - 1, weight);
            if self.exhausted {
                return;
            }
        }
        let fresh = self.capacity(x) - self.kids[x].len() as u64;
        if fresh > 0 {
            let c = self.parent.len();
            self.parent.push(x);
            self.depth.push(depth + 1);
            self.kids.push(Vec::new());
            self.kids[x].push(c);
            self.walk(c, left - 1, weight * u128::from(fresh));
            self.kids[x].pop();
            self.kids.pop();
            self.depth.pop();
            self.parent.pop();
        }
    }
}

/// Number of closed walks of length `m` from the root of `T_d`, keyed by the
/// number of distinct vertices they visit.
pub fn walk_range_census(d: u32, m: u32, budget: WalkBudget) -> Result<BTreeMap<usize, BigUint>> {
    crate::check_degree(d)?;
    let mut census = BTreeMap::new();
    if m % 2 == 1 {
        return Ok(census);
    }
    // d^m must fit the u128 accumulators
    if f64::from(m) * f64::from(d).log2() >= 127.0 {
        return Err(Error::BudgetExceeded {
            what: "closed-walk count",
            requested: u128::MAX,
            limit: 1 << 127,
        });
    }
    let mut dfs = Dfs {
        d: u64::from(d),
        b: u64::from(d - 1),
        parent: vec![usize::MAX],
        depth: vec![0],
        kids: vec![Vec::new()],
        counts: vec![0; m as usize / 2 + 2],
        nodes: 0,
        max_nodes: budget.max_nodes,
        exhausted: false,
    };
    dfs.walk(0, m, 1);
    if dfs.exhausted {
        return Err(Error::BudgetExceeded {
            what: "walk enumeration nodes",
            requested: u128::from(dfs.nodes),
            limit: u128::from(budget.max_nodes),
        });
    }
    for (s, &c) in dfs.counts.iter().enumerate() {
        if c > 0 {
            census.insert(s, BigUint::from(c));
        }
    }
    Ok(census)
}

/// `Σ_s count(s) d^{-m} 2^{-s}` over a census.
pub fn census_probability(d: u32, m: u32, census: &BTreeMap<usize, BigUint>) -> BigRational {
    let mut total = BigRational::from_integer(BigInt::from(0));
    let dm = BigInt::from(d).pow(m);
    for (&s, count) in census {
        let den = &dm << s;
        total += BigRational::new(BigInt::from(count.clone()), den);
    }
    total
}

/// Exact `p_{2n}(e, e)`; `p_0 = 1` since no switch happens at time zero.
pub fn exact_return_prob(d: u32, n: u32, budget: WalkBudget) -> Result<ReturnProbEstimate> {
    crate::check_degree(d)?;
    let exact = if n == 0 {
        BigRational::from_integer(BigInt::from(1))
    } else {
        census_probability(d, 2 * n, &walk_range_census(d, 2 * n, budget)?)
    };
    let log_value = ln_rational(&exact);
    Ok(ReturnProbEstimate {
        d,
        n,
        value: log_value.exp(),
        log_value,
        std_error: 0.0,
        method: EstimateMethod::ExactWalkSum,
        samples: 0,
        seed: None,
        exact: Some(exact),
        ci: None,
    })
}
