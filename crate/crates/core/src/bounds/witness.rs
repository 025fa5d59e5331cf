//! Finite-dimensional rank form of the witness argument.
//!
//! Let `P` be the killed operator on the open vertices of `B(o, R_inner)` and
//! `W` the dense-ball witnesses among them. Deleting `W` is a compression of
//! codimension `|W|`, so by interlacing
//! `#{λ(P) >= E} <= #{λ(P - W) >= E} + |W|`, and the same for `-P`. When
//! every component left after deletion has top `|λ| < E`, the two-sided count
//! of `P` is therefore at most `2|W|`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::percolation::{witness_set, PercolationConfig};
use crate::rng::{McPlan, Merge};
use crate::spectral::{dense_eigenvalues, eigen_count_above, top_eigen_default, KilledOperator};
use crate::tree::{build_ball, Vertex};

#[derive(Clone, Debug, PartialEq)]
pub struct WitnessRow {
    pub sample_id: u64,
    pub open_inner: usize,
    pub witnesses: usize,
    /// `#{|λ| >= E}` for the inner-ball operator.
    pub count: usize,
    /// Largest top eigenvalue among post-deletion components (0 if none).
    pub max_component_eig: f64,
    /// Every post-deletion component has top `|λ| < E`.
    pub hypothesis_ok: bool,
    /// `!hypothesis_ok || count <= 2 |W|`.
    pub implication_ok: bool,
    /// Dense recount of `count`, when the operator was small enough.
    pub dense_count: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WitnessReport {
    pub d: u32,
    pub r_inner: u32,
    pub r_outer: u32,
    pub r: u32,
    pub a: f64,
    pub delta: f64,
    pub threshold: f64,
    pub rows: Vec<WitnessRow>,
}

impl WitnessReport {
    pub fn violations(&self) -> impl Iterator<Item = &WitnessRow> {
        self.rows.iter().filter(|r| !r.implication_ok)
    }

    pub fn hypothesis_count(&self) -> usize {
        self.rows.iter().filter(|r| r.hypothesis_ok).count()
    }

    pub fn dense_checks(&self) -> usize {
        self.rows.iter().filter(|r| r.dense_count.is_some()).count()
    }

    pub fn dense_mismatches(&self) -> impl Iterator<Item = &WitnessRow> {
        self.rows
            .iter()
            .filter(|r| r.dense_count.is_some_and(|c| c != r.count))
    }
}

#[derive(Default)]
struct Rows(Vec<WitnessRow>);

impl Merge for Rows {
    fn merge(&mut self, other: Self) {
        self.0.extend(other.0);
    }
}

/// Operators at most this large also get a dense recount.
pub const DENSE_CHECK_LIMIT: usize = 1000;

fn two_sided(op: &KilledOperator, e: f64) -> usize {
    eigen_count_above(op, e).count + eigen_count_above(&op.negated(), e).count
}

fn dense_two_sided(op: &KilledOperator, e: f64) -> usize {
    let shifted = eigen_count_above(op, e).shifted_threshold;
    dense_eigenvalues(&op.to_dense())
        .iter()
        .filter(|l| **l > shifted || -**l > shifted)
        .count()
}

/// Evaluates one configuration on the ball of radius `r_outer`.
pub fn witness_row(
    config: &PercolationConfig,
    r_inner: u32,
    r: u32,
    a: f64,
    e: f64,
    sample_id: u64,
) -> Result<WitnessRow> {
    let ball = config.ball();
    let witnesses = witness_set(config, r, a)?;
    let inner = ball.ball_len(r_inner);
    let open: Vec<Vertex> = (0..inner).filter(|&v| config.is_open(v)).collect();
    let mut row = WitnessRow {
        sample_id,
        open_inner: open.len(),
        witnesses: 0,
        count: 0,
        max_component_eig: 0.0,
        hypothesis_ok: true,
        implication_ok: true,
        dense_count: Some(0),
    };
    if open.is_empty() {
        return Ok(row);
    }
    let op = KilledOperator::from_vertices(ball, &open, Some(0))?;
    row.count = two_sided(&op, e);
    if op.dim() <= DENSE_CHECK_LIMIT {
        row.dense_count = Some(dense_two_sided(&op, e));
    } else {
        row.dense_count = None;
    }
    let kept: Vec<Vertex> = open
        .iter()
        .copied()
        .filter(|&v| witnesses.contains(v) != Some(true))
        .collect();
    row.witnesses = open.len() - kept.len();
    if !kept.is_empty() {
        let deleted = KilledOperator::from_vertices(ball, &kept, Some(0))?;
        row.hypothesis_ok = two_sided(&deleted, e) == 0;
        row.max_component_eig = top_eigen_default(&deleted)?.top_eigenvalue;
    }
    row.implication_ok = !row.hypothesis_ok || row.count <= 2 * row.witnesses;
    Ok(row)
}

/// Samples configurations on `B(o, r_outer)` and checks the rank implication
/// at `E = ρ_d (1 - δ)` on each.
pub fn witness_rank_experiment(
    d: u32,
    r_inner: u32,
    r_outer: u32,
    r: u32,
    a: f64,
    delta: f64,
    plan: &McPlan,
) -> Result<WitnessReport> {
    crate::check_degree(d)?;
    if r_outer < r_inner + r {
        return Err(Error::InsufficientMargin {
            vertex: 0,
            depth: r_inner,
            radius: r,
            arena_radius: r_outer,
        });
    }
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::InvalidParameter {
            name: "delta",
            message: format!("need 0 <= delta < 1, got {delta}"),
        });
    }
    let ball = Arc::new(build_ball(d, r_outer)?);
    let e = crate::rho(d) * (1.0 - delta);
    let rows = plan.run(Rows::default, |rng, first, count, acc| {
        let mut config = PercolationConfig::all_closed(&ball);
        for i in 0..count {
            config.resample(rng);
            let row = witness_row(&config, r_inner, r, a, e, first + i)
                .expect("margin checked before sampling");
            acc.0.push(row);
        }
    })?;
    let mut rows = rows.0;
    rows.sort_by_key(|r| r.sample_id);
    Ok(WitnessReport {
        d,
        r_inner,
        r_outer,
        r,
        a,
        delta,
        threshold: e,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_closed_is_trivial() {
        let ball = Arc::new(build_ball(3, 5).unwrap());
        let config = PercolationConfig::all_closed(&ball);
        let row = witness_row(&config, 3, 2, 0.9, 0.9, 0).unwrap();
        assert_eq!((row.witnesses, row.count), (0, 0));
        assert!(row.hypothesis_ok && row.implication_ok);
    }

    #[test]
    fn all_open_inner_ball_is_all_witnesses() {
        let ball = Arc::new(build_ball(3, 5).unwrap());
        let config = PercolationConfig::all_open(&ball);
        let row = witness_row(&config, 3, 2, 0.9, crate::rho(3) * 0.95, 0).unwrap();
        assert_eq!(row.witnesses, ball.ball_len(3));
        assert!(row.hypothesis_ok && row.implication_ok);
    }

    #[test]
    fn small_experiment_has_no_violations() {
        let rep = witness_rank_experiment(3, 4, 6, 2, 0.9, 0.05, &McPlan::new(200, 4)).unwrap();
        assert_eq!(rep.rows.len(), 200);
        assert_eq!(rep.violations().count(), 0);
        assert_eq!(rep.dense_mismatches().count(), 0);
        assert!(rep.hypothesis_count() > 0);
    }

    #[test]
    fn margin_is_enforced() {
        let err = witness_rank_experiment(3, 5, 6, 2, 0.9, 0.05, &McPlan::new(1, 0)).unwrap_err();
        assert!(matches!(err, Error::InsufficientMargin { .. }));
    }
}
