//! Policy-value evaluation.
//!
//! Values are always reported from the first player's point of view: `+1`
//! means the first player is winning, `-1` the second. This is the same
//! convention as the game outcome `c_win`.

mod heuristic;
mod network;
mod train;

use alloc::sync::Arc;
use alloc::vec::Vec;

use rand::RngCore;
use thiserror::Error;

use crate::game::BoardState;

pub use heuristic::{heuristic_evaluate, HeuristicEvaluator};
pub use network::{Gradients, NetworkConfig, PolicyValueNet};
pub use train::{
    sample_loss, self_play, softmax_visit_sample, train, train_step, Checkpoint, GameRecord,
    Learner, ReplayItem, ReplayQueue, TrainConfig, TurnRecord,
};

/// Upper bound for the inference dropout probability.
pub const MAX_DROPOUT: f32 = 0.95;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("input shape {got:?} does not match network input {expected:?}")]
    ShapeMismatch {
        expected: (usize, usize, usize),
        got: (usize, usize, usize),
    },
    #[error("empty training batch")]
    EmptyBatch,
    #[error("weight array has {got} values, expected {expected}")]
    WeightCount { expected: usize, got: usize },
}

/// Value in `[-1, 1]` and a probability vector over the action space.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalResult {
    pub value: f32,
    pub policy: Vec<f32>,
}

/// Anything that can score a position.
///
/// `p_drop` is the probability of zeroing each head unit for this call;
/// evaluators without droppable units ignore it. Implementations must be
/// deterministic when `p_drop == 0` and must not touch `rng` in that case.
pub trait Evaluator {
    fn evaluate(&self, state: &BoardState, p_drop: f32, rng: &mut dyn RngCore) -> EvalResult;
}

impl<E: Evaluator + ?Sized> Evaluator for &E {
    fn evaluate(&self, state: &BoardState, p_drop: f32, rng: &mut dyn RngCore) -> EvalResult {
        (**self).evaluate(state, p_drop, rng)
    }
}

impl<E: Evaluator + ?Sized> Evaluator for Arc<E> {
    fn evaluate(&self, state: &BoardState, p_drop: f32, rng: &mut dyn RngCore) -> EvalResult {
        (**self).evaluate(state, p_drop, rng)
    }
}
