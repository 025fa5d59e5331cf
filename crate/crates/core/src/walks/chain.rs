//! Direct simulation of the switch–walk–switch chain from the identity.
//!
//! A run of `2n` steps is abandoned once the walker is farther from the root
//! than the steps it has left, which also keeps it inside the radius-`n`
//! arena.

use std::collections::HashSet;
use std::sync::Arc;

use rand::Rng;

use super::{EstimateMethod, ReturnProbEstimate};
use crate::error::{Error, Result};
use crate::rng::McPlan;
use crate::stats::{Tally, DEFAULT_Z};
use crate::tree::{build_ball, TreeBall, Vertex};

/// `(x, η)`: walker position and the set of lit lamps.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LamplighterState {
    pub position: Vertex,
    pub lamps: HashSet<Vertex>,
}

impl LamplighterState {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn is_identity(&self) -> bool {
        self.position == 0 && self.lamps.is_empty()
    }

    pub fn reset(&mut self) {
        self.position = 0;
        self.lamps.clear();
    }

    fn switch<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        if rng.gen::<bool>() {
            self.lamps.insert(self.position);
        } else {
            self.lamps.remove(&self.position);
        }
    }

    /// One step: resample the lamp here, move to a uniform neighbor, resample
    /// the lamp there. Returns `false` (leaving the state mid-step) when the
    /// move would leave `ball` or end more than `left - 1` from the root.
    pub fn sws_step<R: Rng + ?Sized>(&mut self, ball: &TreeBall, left: u32, rng: &mut R) -> bool {
        self.switch(rng);
        let x = self.position;
        let k = rng.gen_range(0..ball.degree()) as usize;
        let target = if x == 0 {
            Some(k + 1)
        } else if k == 0 {
            ball.parent(x)
        } else {
            let depth = ball.depth(x);
            if depth + 1 > left.saturating_sub(1) || depth == ball.radius() {
                None
            } else {
                Some(ball.children(x).start + k - 1)
            }
        };
        let Some(y) = target else {
            return false;
        };
        if ball.depth(y) > left - 1 {
            return false;
        }
        self.position = y;
        self.switch(rng);
        true
    }
}

pub fn chain_sim(d: u32, n: u32, plan: &McPlan) -> Result<ReturnProbEstimate> {
    crate::check_degree(d)?;
    if plan.samples == 0 {
        return Err(Error::InvalidParameter {
            name: "samples",
            message: "need at least one sample".into(),
        });
    }
    let ball = Arc::new(build_ball(d, n)?);
    let tally = plan.run(Tally::default, |rng, _first, count, acc| {
        let mut state = LamplighterState::identity();
        for _ in 0..count {
            state.reset();
            let mut alive = true;
            for t in 0..2 * n {
                if !state.sws_step(&ball, 2 * n - t, rng) {
                    alive = false;
                    break;
                }
            }
            acc.record(alive && state.is_identity());
        }
    })?;
    let value = tally.frequency();
    Ok(ReturnProbEstimate {
        d,
        n,
        value,
        log_value: value.ln(),
        std_error: tally.std_error(),
        method: EstimateMethod::ChainSim,
        samples: plan.samples,
        seed: Some(plan.seed),
        exact: None,
        ci: Some(tally.wilson(DEFAULT_Z)),
    })
}
