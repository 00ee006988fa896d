//! Deterministic stand-in for a trained network.
//!
//! The value is `tanh(E / scale)` where `E` is the minimax leaf evaluation
//! scored for the first player. The policy is uniform over legal moves.
//!
//! `E` is a sum of independent terms (one per connection in Connect4, one per
//! occupied cell in Othello). With `p_drop > 0` each term is dropped with that
//! probability and the survivors are not rescaled, the same damage model the
//! network applies to its head units.

use alloc::vec;

use libm::tanh;
use rand::{Rng, RngCore};

use super::{EvalResult, Evaluator};
use crate::game::{BoardState, GameVariant};
use crate::search::{connect4_terms, othello_terms, CONNECT4_TERMINAL, OTHELLO_TERMINAL};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct HeuristicEvaluator;

impl HeuristicEvaluator {
    pub fn scale(variant: GameVariant) -> f64 {
        match variant {
            GameVariant::Connect4 => 20_000.0,
            _ => 100.0,
        }
    }
}

fn raw_evaluation(state: &BoardState, p_drop: f32, rng: &mut dyn RngCore) -> f64 {
    if let Some(outcome) = state.outcome() {
        let terminal = match state.variant() {
            GameVariant::Connect4 => CONNECT4_TERMINAL,
            _ => OTHELLO_TERMINAL,
        };
        return terminal * outcome.c_win() as f64;
    }
    let mut e = 0.0;
    let mut add = |t: f64| {
        if p_drop <= 0.0 || rng.random::<f32>() >= p_drop {
            e += t;
        }
    };
    match state.variant() {
        GameVariant::Connect4 => connect4_terms(state, &mut add),
        _ => othello_terms(state, &mut add),
    }
    e
}

impl Evaluator for HeuristicEvaluator {
    fn evaluate(&self, state: &BoardState, p_drop: f32, rng: &mut dyn RngCore) -> EvalResult {
        let variant = state.variant();
        let e = raw_evaluation(state, p_drop, rng);
        let value = tanh(e / Self::scale(variant)) as f32;
        let mut policy = vec![0.0; variant.action_count()];
        let moves = state.legal_moves_unchecked();
        if moves.is_empty() {
            policy.fill(1.0 / variant.action_count() as f32);
        } else {
            let p = 1.0 / moves.len() as f32;
            for mv in moves {
                policy[mv.action(variant)] = p;
            }
        }
        EvalResult { value, policy }
    }
}

/// Undamaged heuristic evaluation.
pub fn heuristic_evaluate(state: &BoardState) -> EvalResult {
    struct NoRng;
    impl RngCore for NoRng {
        fn next_u32(&mut self) -> u32 {
            unreachable!("undamaged evaluation draws no randomness")
        }
        fn next_u64(&mut self) -> u64 {
            unreachable!("undamaged evaluation draws no randomness")
        }
        fn fill_bytes(&mut self, _: &mut [u8]) {
            unreachable!("undamaged evaluation draws no randomness")
        }
    }
    HeuristicEvaluator.evaluate(state, 0.0, &mut NoRng)
}
