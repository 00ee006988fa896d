//! Rules for Connect4, 6x6 Othello and 8x8 Othello.
//!
//! Boards are stored as a pair of occupancy bitboards, one per color, with
//! cell `(row, col)` at bit `row * cols + col`. Row 0 is the top row and
//! column 0 the leftmost column.

mod bits;
mod encode;
mod symmetry;
mod text;

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use thiserror::Error;

pub use encode::{encode_planes, PlaneStack, HISTORY_LEN};
pub use symmetry::{symmetries, symmetry_count};

use bits::Geometry;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("game over")]
    GameOver,
    #[error("illegal move: {0}")]
    IllegalMove(Move),
    #[error("expected {expected} history states, got {got}")]
    HistoryLength { expected: usize, got: usize },
    #[error("unknown game variant `{0}`")]
    UnknownVariant(alloc::string::String),
    #[error("bad board text: {0}")]
    Parse(alloc::string::String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GameVariant {
    Connect4,
    Othello6,
    Othello8,
}

impl GameVariant {
    pub const ALL: [GameVariant; 3] = [Self::Connect4, Self::Othello6, Self::Othello8];

    pub const fn rows(self) -> usize {
        match self {
            Self::Connect4 => 6,
            Self::Othello6 => 6,
            Self::Othello8 => 8,
        }
    }

    pub const fn cols(self) -> usize {
        match self {
            Self::Connect4 => 7,
            Self::Othello6 => 6,
            Self::Othello8 => 8,
        }
    }

    pub const fn cells(self) -> usize {
        self.rows() * self.cols()
    }

    /// Length of the policy vector. Othello variants carry a trailing pass entry.
    pub const fn action_count(self) -> usize {
        match self {
            Self::Connect4 => 7,
            Self::Othello6 => 37,
            Self::Othello8 => 65,
        }
    }

    pub const fn is_othello(self) -> bool {
        !matches!(self, Self::Connect4)
    }

    pub const fn name(self) -> &'static str {
        match self {
            Self::Connect4 => "connect4",
            Self::Othello6 => "othello6",
            Self::Othello8 => "othello8",
        }
    }

    fn geometry(self) -> &'static Geometry {
        match self {
            Self::Connect4 => &bits::CONNECT4,
            Self::Othello6 => &bits::OTHELLO6,
            Self::Othello8 => &bits::OTHELLO8,
        }
    }
}

impl fmt::Display for GameVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GameVariant {
    type Err = GameError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "connect4" => Ok(Self::Connect4),
            "othello6" => Ok(Self::Othello6),
            "othello8" | "othello" => Ok(Self::Othello8),
            other => Err(GameError::UnknownVariant(other.into())),
        }
    }
}

/// Disc color. The first player is `+1`, the second `-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Color {
    First,
    Second,
}

impl Color {
    pub const fn sign(self) -> i8 {
        match self {
            Self::First => 1,
            Self::Second => -1,
        }
    }

    pub fn value(self) -> f32 {
        self.sign() as f32
    }

    pub const fn opponent(self) -> Self {
        match self {
            Self::First => Self::Second,
            Self::Second => Self::First,
        }
    }

    pub fn from_sign(sign: i8) -> Option<Self> {
        match sign {
            1 => Some(Self::First),
            -1 => Some(Self::Second),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cell {
    Empty,
    First,
    Second,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Move {
    /// Connect4: drop into a column.
    Drop(u8),
    /// Othello: place at `(row, col)`.
    Place(u8, u8),
    /// Othello: no flipping placement exists.
    Pass,
}

impl Move {
    /// Index of the move in the policy vector.
    pub fn action(self, variant: GameVariant) -> usize {
        match self {
            Move::Drop(c) => c as usize,
            Move::Place(r, c) => r as usize * variant.cols() + c as usize,
            Move::Pass => variant.cells(),
        }
    }

    pub fn from_action(variant: GameVariant, action: usize) -> Option<Move> {
        match variant {
            GameVariant::Connect4 => (action < variant.cols()).then_some(Move::Drop(action as u8)),
            _ if action < variant.cells() => Some(Move::Place(
                (action / variant.cols()) as u8,
                (action % variant.cols()) as u8,
            )),
            _ if action == variant.cells() => Some(Move::Pass),
            _ => None,
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move::Drop(c) => write!(f, "drop {c}"),
            Move::Place(r, c) => write!(f, "place {r},{c}"),
            Move::Pass => f.write_str("pass"),
        }
    }
}

/// Parses the [`Display`](fmt::Display) form: `drop C`, `place R,C` or `pass`.
impl FromStr for Move {
    type Err = GameError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || GameError::Parse(alloc::format!("bad move `{s}`"));
        let s = s.trim();
        if s == "pass" {
            return Ok(Move::Pass);
        }
        if let Some(c) = s.strip_prefix("drop ") {
            return c.trim().parse().map(Move::Drop).map_err(|_| bad());
        }
        let (r, c) = s
            .strip_prefix("place ")
            .and_then(|rc| rc.split_once(','))
            .ok_or_else(bad)?;
        Ok(Move::Place(
            r.trim().parse().map_err(|_| bad())?,
            c.trim().parse().map_err(|_| bad())?,
        ))
    }
}

/// Result of a finished game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Win(Color),
    Draw,
}

impl Outcome {
    /// Disc color of the winner, `0` on a draw.
    pub fn c_win(self) -> i8 {
        match self {
            Outcome::Win(c) => c.sign(),
            Outcome::Draw => 0,
        }
    }

    pub fn value(self) -> f32 {
        self.c_win() as f32
    }

    pub fn from_c_win(c_win: i8) -> Option<Self> {
        match c_win {
            0 => Some(Outcome::Draw),
            s => Color::from_sign(s).map(Outcome::Win),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BoardState {
    variant: GameVariant,
    first: u64,
    second: u64,
    to_move: Color,
    turn_index: u32,
}

impl BoardState {
    pub fn new_game(variant: GameVariant) -> Self {
        let mut state = Self {
            variant,
            first: 0,
            second: 0,
            to_move: Color::First,
            turn_index: 0,
        };
        if variant.is_othello() {
            let n = variant.rows();
            let (a, b) = (n / 2 - 1, n / 2);
            // d5/e4 dark (first), d4/e5 light (second)
            state.set(b, a, Cell::First);
            state.set(a, b, Cell::First);
            state.set(a, a, Cell::Second);
            state.set(b, b, Cell::Second);
        }
        state
    }

    /// Builds a state from a cell grid given row-major from the top-left.
    pub fn from_cells(
        variant: GameVariant,
        cells: &[Cell],
        to_move: Color,
        turn_index: u32,
    ) -> Result<Self, GameError> {
        if cells.len() != variant.cells() {
            return Err(GameError::Parse(alloc::format!(
                "expected {} cells, got {}",
                variant.cells(),
                cells.len()
            )));
        }
        let mut state = Self {
            variant,
            first: 0,
            second: 0,
            to_move,
            turn_index,
        };
        for (i, &cell) in cells.iter().enumerate() {
            state.set(i / variant.cols(), i % variant.cols(), cell);
        }
        Ok(state)
    }

    pub fn variant(&self) -> GameVariant {
        self.variant
    }

    pub fn to_move(&self) -> Color {
        self.to_move
    }

    pub fn turn_index(&self) -> u32 {
        self.turn_index
    }

    pub fn cell(&self, row: usize, col: usize) -> Cell {
        let bit = 1u64 << (row * self.variant.cols() + col);
        if self.first & bit != 0 {
            Cell::First
        } else if self.second & bit != 0 {
            Cell::Second
        } else {
            Cell::Empty
        }
    }

    pub fn cells(&self) -> Vec<Cell> {
        let cols = self.variant.cols();
        (0..self.variant.cells())
            .map(|i| self.cell(i / cols, i % cols))
            .collect()
    }

    /// Occupancy bitboard for `color`.
    pub fn occupancy(&self, color: Color) -> u64 {
        match color {
            Color::First => self.first,
            Color::Second => self.second,
        }
    }

    pub fn disc_count(&self, color: Color) -> u32 {
        self.occupancy(color).count_ones()
    }

    /// Lengths of maximal runs of `color` discs along rows, columns and both
    /// diagonals.
    pub(crate) fn for_each_run(&self, color: Color, f: impl FnMut(u32)) {
        self.variant
            .geometry()
            .for_each_run(self.occupancy(color), f);
    }

    pub fn empty_count(&self) -> u32 {
        self.variant.cells() as u32 - (self.first | self.second).count_ones()
    }

    fn set(&mut self, row: usize, col: usize, cell: Cell) {
        let bit = 1u64 << (row * self.variant.cols() + col);
        self.first &= !bit;
        self.second &= !bit;
        match cell {
            Cell::First => self.first |= bit,
            Cell::Second => self.second |= bit,
            Cell::Empty => {}
        }
    }

    fn own_opp(&self) -> (u64, u64) {
        match self.to_move {
            Color::First => (self.first, self.second),
            Color::Second => (self.second, self.first),
        }
    }

    /// Bitboard of Othello cells where the mover flips at least one disc.
    fn othello_placements(&self, color: Color) -> u64 {
        let (own, opp) = match color {
            Color::First => (self.first, self.second),
            Color::Second => (self.second, self.first),
        };
        self.variant.geometry().placements(own, opp)
    }

    fn connect4_open_columns(&self) -> impl Iterator<Item = usize> + '_ {
        let occupied = self.first | self.second;
        (0..self.variant.cols()).filter(move |&c| occupied & (1u64 << c) == 0)
    }

    pub fn is_terminal(&self) -> bool {
        self.outcome().is_some()
    }

    /// Game result, present iff the state is terminal.
    pub fn outcome(&self) -> Option<Outcome> {
        let geo = self.variant.geometry();
        let full = (self.first | self.second) == geo.full;
        match self.variant {
            GameVariant::Connect4 => {
                if geo.has_four(self.first) {
                    Some(Outcome::Win(Color::First))
                } else if geo.has_four(self.second) {
                    Some(Outcome::Win(Color::Second))
                } else if full {
                    Some(Outcome::Draw)
                } else {
                    None
                }
            }
            _ => {
                let finished = full
                    || (self.othello_placements(Color::First) == 0
                        && self.othello_placements(Color::Second) == 0);
                if !finished {
                    return None;
                }
                let (f, s) = (self.first.count_ones(), self.second.count_ones());
                Some(match f.cmp(&s) {
                    core::cmp::Ordering::Greater => Outcome::Win(Color::First),
                    core::cmp::Ordering::Less => Outcome::Win(Color::Second),
                    core::cmp::Ordering::Equal => Outcome::Draw,
                })
            }
        }
    }

    pub fn valid_moves(&self) -> Result<Vec<Move>, GameError> {
        if self.is_terminal() {
            return Err(GameError::GameOver);
        }
        Ok(self.legal_moves_unchecked())
    }

    /// Legal moves without the terminal check. Empty only for Connect4 full boards.
    pub(crate) fn legal_moves_unchecked(&self) -> Vec<Move> {
        match self.variant {
            GameVariant::Connect4 => self
                .connect4_open_columns()
                .map(|c| Move::Drop(c as u8))
                .collect(),
            _ => {
                let mut moves = self.othello_placements(self.to_move);
                if moves == 0 {
                    return alloc::vec![Move::Pass];
                }
                let cols = self.variant.cols();
                let mut out = Vec::with_capacity(moves.count_ones() as usize);
                while moves != 0 {
                    let idx = moves.trailing_zeros() as usize;
                    moves &= moves - 1;
                    out.push(Move::Place((idx / cols) as u8, (idx % cols) as u8));
                }
                out
            }
        }
    }

    pub fn is_legal(&self, mv: Move) -> bool {
        if self.is_terminal() {
            return false;
        }
        match (self.variant, mv) {
            (GameVariant::Connect4, Move::Drop(c)) => {
                (c as usize) < self.variant.cols() && (self.first | self.second) & (1u64 << c) == 0
            }
            (GameVariant::Connect4, _) | (_, Move::Drop(_)) => false,
            (_, Move::Place(r, c)) => {
                let (r, c) = (r as usize, c as usize);
                r < self.variant.rows()
                    && c < self.variant.cols()
                    && self.othello_placements(self.to_move)
                        & (1u64 << (r * self.variant.cols() + c))
                        != 0
            }
            (_, Move::Pass) => self.othello_placements(self.to_move) == 0,
        }
    }

    pub fn apply_move(&self, mv: Move) -> Result<BoardState, GameError> {
        if self.is_terminal() {
            return Err(GameError::GameOver);
        }
        if !self.is_legal(mv) {
            return Err(GameError::IllegalMove(mv));
        }
        Ok(self.apply_unchecked(mv))
    }

    /// Applies a move already known to be legal.
    pub(crate) fn apply_unchecked(&self, mv: Move) -> BoardState {
        let mut next = *self;
        let cols = self.variant.cols();
        match mv {
            Move::Drop(c) => {
                let occupied = self.first | self.second;
                let row = (0..self.variant.rows())
                    .rev()
                    .find(|&r| occupied & (1u64 << (r * cols + c as usize)) == 0)
                    .expect("drop into full column");
                let bit = 1u64 << (row * cols + c as usize);
                match self.to_move {
                    Color::First => next.first |= bit,
                    Color::Second => next.second |= bit,
                }
            }
            Move::Place(r, c) => {
                let idx = r as usize * cols + c as usize;
                let (own, opp) = self.own_opp();
                let flips = self.variant.geometry().flips(idx, own, opp);
                let own = own | flips | (1u64 << idx);
                let opp = opp & !flips;
                match self.to_move {
                    Color::First => {
                        next.first = own;
                        next.second = opp;
                    }
                    Color::Second => {
                        next.second = own;
                        next.first = opp;
                    }
                }
            }
            Move::Pass => {}
        }
        next.to_move = self.to_move.opponent();
        next.turn_index += 1;
        next
    }
}
