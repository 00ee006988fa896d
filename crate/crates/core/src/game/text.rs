//! Plain-text board format.
//!
//! ```text
//! connect4 1 3
//! .......
//! .......
//! .......
//! .......
//! ...O...
//! ..XX...
//! ```
//!
//! The header is `variant to_move turn_index` with `to_move` either `1` or
//! `-1`. Rows follow top to bottom, `.` empty, `X` first player, `O` second.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use super::{BoardState, Cell, Color, GameError, GameVariant};

impl fmt::Display for BoardState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} {} {}",
            self.variant,
            self.to_move.sign(),
            self.turn_index
        )?;
        let cols = self.variant.cols();
        for r in 0..self.variant.rows() {
            let line: String = (0..cols)
                .map(|c| match self.cell(r, c) {
                    Cell::Empty => '.',
                    Cell::First => 'X',
                    Cell::Second => 'O',
                })
                .collect();
            if r + 1 < self.variant.rows() {
                writeln!(f, "{line}")?;
            } else {
                write!(f, "{line}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for BoardState {
    type Err = GameError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut lines = s.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| GameError::Parse("empty input".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let [variant, to_move, turn] = fields[..] else {
            return Err(GameError::Parse(alloc::format!("bad header `{header}`")));
        };
        let variant: GameVariant = variant.parse()?;
        let to_move = to_move
            .parse::<i8>()
            .ok()
            .and_then(Color::from_sign)
            .ok_or_else(|| GameError::Parse(alloc::format!("bad side to move `{to_move}`")))?;
        let turn_index = turn
            .parse::<u32>()
            .map_err(|_| GameError::Parse(alloc::format!("bad turn index `{turn}`")))?;
        let mut cells = Vec::with_capacity(variant.cells());
        let mut rows = 0;
        for line in lines {
            if line.chars().count() != variant.cols() {
                return Err(GameError::Parse(alloc::format!("bad row width `{line}`")));
            }
            for ch in line.chars() {
                cells.push(match ch {
                    '.' => Cell::Empty,
                    'X' => Cell::First,
                    'O' => Cell::Second,
                    other => return Err(GameError::Parse(alloc::format!("bad cell `{other}`"))),
                });
            }
            rows += 1;
        }
        if rows != variant.rows() {
            return Err(GameError::Parse(alloc::format!(
                "expected {} rows, got {rows}",
                variant.rows()
            )));
        }
        BoardState::from_cells(variant, &cells, to_move, turn_index)
    }
}
