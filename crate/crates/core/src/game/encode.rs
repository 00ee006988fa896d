//! Network input planes.

use alloc::vec;
use alloc::vec::Vec;

use super::{BoardState, Cell, Color, GameError};

/// Number of past board states fed to the network.
pub const HISTORY_LEN: usize = 1;

/// Stack of `2T + 1` feature planes stored plane-major: `data[p][row][col]`.
///
/// Planes `0..T` hold first-player occupancy (oldest first), planes `T..2T`
/// second-player occupancy, and the last plane is filled with the color of
/// the player to move.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneStack {
    pub rows: usize,
    pub cols: usize,
    pub planes: usize,
    pub data: Vec<f32>,
}

impl PlaneStack {
    pub fn plane(&self, p: usize) -> &[f32] {
        let n = self.rows * self.cols;
        &self.data[p * n..(p + 1) * n]
    }
}

pub fn encode_planes(history: &[BoardState], to_move: Color) -> Result<PlaneStack, GameError> {
    if history.len() != HISTORY_LEN {
        return Err(GameError::HistoryLength {
            expected: HISTORY_LEN,
            got: history.len(),
        });
    }
    let variant = history[0].variant();
    let (rows, cols) = (variant.rows(), variant.cols());
    let n = rows * cols;
    let t = history.len();
    let planes = 2 * t + 1;
    let mut data = vec![0.0f32; planes * n];
    for (h, state) in history.iter().enumerate() {
        for (i, cell) in state.cells().into_iter().enumerate() {
            match cell {
                Cell::First => data[h * n + i] = 1.0,
                Cell::Second => data[(t + h) * n + i] = 1.0,
                Cell::Empty => {}
            }
        }
    }
    data[2 * t * n..].fill(to_move.value());
    Ok(PlaneStack {
        rows,
        cols,
        planes,
        data,
    })
}
