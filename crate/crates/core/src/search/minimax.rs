//! Fixed-depth minimax with hand-written leaf evaluations.

use alloc::vec::Vec;

use rand::Rng;

use super::{pick_uniform, SearchError};
use crate::game::{BoardState, Cell, Color, GameVariant, Move};

#[rustfmt::skip]
const WEIGHTS_6X6: [i32; 36] = [
     30,  -5,   2,   2,  -5,  30,
     -5, -15,   3,   3, -15,  -5,
      2,   3,   0,   0,   3,   2,
      2,   3,   0,   0,   3,   2,
     -5, -15,   3,   3, -15,  -5,
     30,  -5,   2,   2,  -5,  30,
];

#[rustfmt::skip]
const WEIGHTS_8X8: [i32; 64] = [
    120, -20,  20,   5,   5,  20, -20, 120,
    -20, -40,  -5,  -5,  -5,  -5, -40, -20,
     20,  -5,  15,   3,   3,  15,  -5,  20,
      5,  -5,   3,   3,   3,   3,  -5,   5,
      5,  -5,   3,   3,   3,   3,  -5,   5,
     20,  -5,  15,   3,   3,  15,  -5,  20,
    -20, -40,  -5,  -5,  -5,  -5, -40, -20,
    120, -20,  20,   5,   5,  20, -20, 120,
];

pub const CONNECT4_TWO: f64 = 100.0;
pub const CONNECT4_THREE: f64 = 10_000.0;
pub const CONNECT4_TERMINAL: f64 = 1_000_000.0;
pub const OTHELLO_TERMINAL: f64 = 1_000.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MinimaxParams {
    pub depth: u32,
    /// Othello only: search to the end once this few empty cells remain.
    pub endgame_full_depth_turns: u32,
}

impl Default for MinimaxParams {
    fn default() -> Self {
        Self {
            depth: 3,
            endgame_full_depth_turns: 6,
        }
    }
}

/// Positional weight of an Othello cell.
pub fn othello_cell_weight(variant: GameVariant, row: usize, col: usize) -> Option<i32> {
    match variant {
        GameVariant::Othello6 => Some(WEIGHTS_6X6[row * 6 + col]),
        GameVariant::Othello8 => Some(WEIGHTS_8X8[row * 8 + col]),
        GameVariant::Connect4 => None,
    }
}

/// Additive terms of the non-terminal Connect4 evaluation from the first
/// player's perspective: one term per maximal run of length 2 or 3.
pub(crate) fn connect4_terms(state: &BoardState, mut f: impl FnMut(f64)) {
    for color in [Color::First, Color::Second] {
        let sign = color.value() as f64;
        state.for_each_run(color, |len| match len {
            2 => f(CONNECT4_TWO * sign),
            3 => f(CONNECT4_THREE * sign),
            _ => {}
        });
    }
}

/// Additive terms of the Othello evaluation from the first player's
/// perspective: one term per occupied cell.
pub(crate) fn othello_terms(state: &BoardState, mut f: impl FnMut(f64)) {
    let variant = state.variant();
    for r in 0..variant.rows() {
        for c in 0..variant.cols() {
            let occupancy = match state.cell(r, c) {
                Cell::First => 1.0,
                Cell::Second => -1.0,
                Cell::Empty => continue,
            };
            let w = othello_cell_weight(variant, r, c).unwrap_or(0) as f64;
            f(w * occupancy);
        }
    }
}

/// Connection-count evaluation for Connect4, scored for `c_minimax`.
pub fn evaluate_leaf_connect4(state: &BoardState, c_minimax: Color) -> f64 {
    let cm = c_minimax.value() as f64;
    if let Some(outcome) = state.outcome() {
        return CONNECT4_TERMINAL * outcome.c_win() as f64 * cm;
    }
    let mut e = 0.0;
    connect4_terms(state, |t| e += t);
    e * cm
}

/// Weighted-cell evaluation for Othello, scored for `c_minimax`.
pub fn evaluate_leaf_othello(state: &BoardState, c_minimax: Color) -> Result<f64, SearchError> {
    if !state.variant().is_othello() {
        return Err(SearchError::WrongVariant(state.variant()));
    }
    let mut e = 0.0;
    othello_terms(state, |t| e += t);
    Ok(e * c_minimax.value() as f64)
}

fn leaf_value(state: &BoardState, c_minimax: Color) -> f64 {
    match state.variant() {
        GameVariant::Connect4 => evaluate_leaf_connect4(state, c_minimax),
        _ => match state.outcome() {
            Some(o) => OTHELLO_TERMINAL * o.c_win() as f64 * c_minimax.value() as f64,
            None => evaluate_leaf_othello(state, c_minimax).unwrap_or(0.0),
        },
    }
}

fn node_value(
    state: &BoardState,
    depth: u32,
    c_minimax: Color,
    mut alpha: f64,
    mut beta: f64,
    pruning: bool,
) -> f64 {
    if depth == 0 || state.is_terminal() {
        return leaf_value(state, c_minimax);
    }
    let maximizing = state.to_move() == c_minimax;
    let mut best = if maximizing {
        f64::NEG_INFINITY
    } else {
        f64::INFINITY
    };
    for mv in state.legal_moves_unchecked() {
        let v = node_value(
            &state.apply_unchecked(mv),
            depth - 1,
            c_minimax,
            alpha,
            beta,
            pruning,
        );
        if maximizing {
            best = best.max(v);
            alpha = alpha.max(v);
        } else {
            best = best.min(v);
            beta = beta.min(v);
        }
        if pruning && alpha >= beta {
            break;
        }
    }
    best
}

/// Search depth actually used from `state`.
pub fn effective_depth(state: &BoardState, params: &MinimaxParams) -> u32 {
    if state.variant().is_othello() && state.empty_count() <= params.endgame_full_depth_turns {
        u32::MAX
    } else {
        params.depth
    }
}

/// Exact minimax value of every root move, scored for the side to move.
///
/// Each root child is searched with a full window, so the values are the
/// same with or without alpha-beta pruning.
pub fn minimax_root_values(
    state: &BoardState,
    params: &MinimaxParams,
    pruning: bool,
) -> Result<Vec<(Move, f64)>, SearchError> {
    let moves = state.valid_moves()?;
    let depth = effective_depth(state, params).max(1);
    let c_minimax = state.to_move();
    Ok(moves
        .into_iter()
        .map(|mv| {
            let child = state.apply_unchecked(mv);
            let v = node_value(
                &child,
                depth - 1,
                c_minimax,
                f64::NEG_INFINITY,
                f64::INFINITY,
                pruning,
            );
            (mv, v)
        })
        .collect())
}

/// Picks the best minimax move, breaking ties uniformly at random.
pub fn minimax_decide<R: Rng + ?Sized>(
    state: &BoardState,
    params: &MinimaxParams,
    rng: &mut R,
) -> Result<Move, SearchError> {
    let values = minimax_root_values(state, params, true)?;
    let best = values
        .iter()
        .map(|&(_, v)| v)
        .fold(f64::NEG_INFINITY, f64::max);
    let ties: Vec<Move> = values
        .iter()
        .filter(|&&(_, v)| v == best)
        .map(|&(m, _)| m)
        .collect();
    Ok(pick_uniform(&ties, rng))
}
