//! Move-decision algorithms.

mod minimax;
mod puct;
mod uct;

use alloc::vec::Vec;

use rand::Rng;
use thiserror::Error;

use crate::game::{BoardState, GameError, GameVariant, Move};

pub(crate) use minimax::{connect4_terms, othello_terms};
pub use minimax::{
    effective_depth, evaluate_leaf_connect4, evaluate_leaf_othello, minimax_decide,
    minimax_root_values, othello_cell_weight, MinimaxParams, CONNECT4_TERMINAL, CONNECT4_THREE,
    CONNECT4_TWO, OTHELLO_TERMINAL,
};
pub(crate) use puct::softmax_visit_index;
pub use puct::{
    decide_move_alphazero, mcts_search, puct_score, puct_select, select_played_move, Dda3Hook,
    EdgeStats, MoveSelection, RootNoise, SearchParams, SearchResult,
};
pub use uct::{decide_move_vanilla_mcts, uct_search, UctParams};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SearchError {
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("node has not been expanded")]
    Unexpanded,
    #[error("evaluation not defined for {0}")]
    WrongVariant(GameVariant),
}

/// Uniform choice from a non-empty slice.
pub(crate) fn pick_uniform<T: Copy, R: Rng + ?Sized>(items: &[T], rng: &mut R) -> T {
    items[rng.random_range(0..items.len())]
}

/// Indices of the maximal entries of `scores` (exact float equality).
pub(crate) fn argmax_ties<I: IntoIterator<Item = f64>>(scores: I) -> Vec<usize> {
    let mut best = f64::NEG_INFINITY;
    let mut ties = Vec::new();
    for (i, s) in scores.into_iter().enumerate() {
        if s > best {
            best = s;
            ties.clear();
            ties.push(i);
        } else if s == best {
            ties.push(i);
        }
    }
    ties
}

/// Uniformly random legal move.
pub fn decide_move_random<R: Rng + ?Sized>(
    state: &BoardState,
    rng: &mut R,
) -> Result<Move, SearchError> {
    let moves = state.valid_moves()?;
    Ok(pick_uniform(&moves, rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::Cell;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_is_uniform_over_columns() {
        let s = BoardState::new_game(GameVariant::Connect4);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut counts = [0u32; 7];
        for _ in 0..7000 {
            let Move::Drop(c) = decide_move_random(&s, &mut rng).unwrap() else {
                panic!("connect4 move")
            };
            counts[c as usize] += 1;
        }
        // 1000 expected per column; 5 sigma is about 150
        assert!(
            counts.iter().all(|&n| (850..1150).contains(&n)),
            "{counts:?}"
        );
    }

    #[test]
    fn random_forced_pass() {
        let mut cells = alloc::vec![Cell::Empty; 36];
        cells[0] = Cell::Second;
        cells[1] = Cell::Second;
        cells[2] = Cell::First;
        let s =
            BoardState::from_cells(GameVariant::Othello6, &cells, crate::Color::First, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        assert_eq!(decide_move_random(&s, &mut rng).unwrap(), Move::Pass);
    }

    #[test]
    fn random_is_reproducible() {
        let s = BoardState::new_game(GameVariant::Othello8);
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..20)
                .map(|_| decide_move_random(&s, &mut rng).unwrap())
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(3), draw(3));
    }

    #[test]
    fn argmax_ties_collects_equal_maxima() {
        assert_eq!(argmax_ties([1.0, 3.0, 2.0, 3.0]), [1, 3]);
        assert!(argmax_ties(core::iter::empty()).is_empty());
    }
}
