//! Game engine and dynamic difficulty adjustment for AlphaZero-style agents.
//!
//! The crate is `no_std` and only needs `alloc`. It contains:
//!
//! - [`game`]: Connect4 and 6x6/8x8 Othello rules, symmetries and network input encoding.
//! - [`eval`]: the policy-value network, its training loop, and a heuristic evaluator.
//! - [`search`]: PUCT tree search, playout UCT, minimax and a random agent.
//! - [`dda`]: value tracking and the three strength-adjustment strategies.
//! - [`arena`]: agents, match series, Elo ratings, tournaments and grid search.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod arena;
pub mod dda;
pub mod eval;
pub mod game;
pub mod search;

pub use game::{BoardState, Cell, Color, GameError, GameVariant, Move, Outcome};
