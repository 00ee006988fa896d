//! Board symmetries used for training-data augmentation.

use alloc::vec::Vec;

use super::{BoardState, GameVariant};

/// Number of symmetric images produced per position.
pub fn symmetry_count(variant: GameVariant) -> usize {
    if variant.is_othello() {
        8
    } else {
        2
    }
}

/// Image of `(row, col)` under symmetry `k`.
///
/// Connect4: `k = 0` identity, `k = 1` left-right mirror. Square boards: bit 2
/// of `k` transposes, then the low two bits rotate clockwise.
pub(crate) fn map_cell(variant: GameVariant, k: usize, row: usize, col: usize) -> (usize, usize) {
    let (rows, cols) = (variant.rows(), variant.cols());
    if !variant.is_othello() {
        return if k == 0 {
            (row, col)
        } else {
            (row, cols - 1 - col)
        };
    }
    let n = rows;
    let (mut r, mut c) = if k & 4 != 0 { (col, row) } else { (row, col) };
    for _ in 0..(k & 3) {
        (r, c) = (c, n - 1 - r);
    }
    (r, c)
}

/// Every symmetric image of `(state, policy)`. The first entry is the identity.
/// The Othello pass entry maps to itself.
///
/// # Panics
///
/// If `policy.len()` differs from the variant's action count.
pub fn symmetries(state: &BoardState, policy: &[f32]) -> Vec<(BoardState, Vec<f32>)> {
    let variant = state.variant();
    assert_eq!(policy.len(), variant.action_count(), "policy length");
    let cols = variant.cols();
    let cells = state.cells();
    (0..symmetry_count(variant))
        .map(|k| {
            let mut mapped = cells.clone();
            for (i, &cell) in cells.iter().enumerate() {
                let (r, c) = map_cell(variant, k, i / cols, i % cols);
                mapped[r * cols + c] = cell;
            }
            let image =
                BoardState::from_cells(variant, &mapped, state.to_move(), state.turn_index())
                    .expect("symmetry preserves board size");
            let mut pi = policy.to_vec();
            if variant.is_othello() {
                for (a, &p) in policy.iter().take(variant.cells()).enumerate() {
                    let (r, c) = map_cell(variant, k, a / cols, a % cols);
                    pi[r * cols + c] = p;
                }
            } else {
                for (a, &p) in policy.iter().enumerate() {
                    pi[map_cell(variant, k, 0, a).1] = p;
                }
            }
            (image, pi)
        })
        .collect()
}
