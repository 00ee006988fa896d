//! Deliberately naive rules written from the game descriptions, used to
//! cross-check the bitboard engine.

use alphadda_core::{BoardState, Cell, Color, GameVariant, Move};

const DIRS: [(i32, i32); 8] = [
    (-1, -1),
    (-1, 0),
    (-1, 1),
    (0, -1),
    (0, 1),
    (1, -1),
    (1, 0),
    (1, 1),
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Oracle {
    pub variant: GameVariant,
    pub rows: i32,
    pub cols: i32,
    /// +1 first player, -1 second player, 0 empty.
    pub grid: Vec<Vec<i8>>,
    pub to_move: i8,
}

impl Oracle {
    pub fn new(variant: GameVariant) -> Self {
        let (rows, cols) = match variant {
            GameVariant::Connect4 => (6, 7),
            GameVariant::Othello6 => (6, 6),
            GameVariant::Othello8 => (8, 8),
        };
        let mut grid = vec![vec![0i8; cols]; rows];
        if variant != GameVariant::Connect4 {
            let m = rows / 2;
            grid[m - 1][m - 1] = -1;
            grid[m][m] = -1;
            grid[m - 1][m] = 1;
            grid[m][m - 1] = 1;
        }
        Self {
            variant,
            rows: rows as i32,
            cols: cols as i32,
            grid,
            to_move: 1,
        }
    }

    fn at(&self, r: i32, c: i32) -> Option<i8> {
        if r < 0 || c < 0 || r >= self.rows || c >= self.cols {
            None
        } else {
            Some(self.grid[r as usize][c as usize])
        }
    }

    fn flips_for(&self, r: i32, c: i32, me: i8) -> Vec<(i32, i32)> {
        let mut all = Vec::new();
        if self.at(r, c) != Some(0) {
            return all;
        }
        for (dr, dc) in DIRS {
            let mut line = Vec::new();
            let (mut rr, mut cc) = (r + dr, c + dc);
            while self.at(rr, cc) == Some(-me) {
                line.push((rr, cc));
                rr += dr;
                cc += dc;
            }
            if !line.is_empty() && self.at(rr, cc) == Some(me) {
                all.extend(line);
            }
        }
        all
    }

    fn placements(&self, me: i8) -> Vec<Move> {
        let mut out = Vec::new();
        for r in 0..self.rows {
            for c in 0..self.cols {
                if !self.flips_for(r, c, me).is_empty() {
                    out.push(Move::Place(r as u8, c as u8));
                }
            }
        }
        out
    }

    fn four_in_a_row(&self, who: i8) -> bool {
        for r in 0..self.rows {
            for c in 0..self.cols {
                for (dr, dc) in [(0, 1), (1, 0), (1, 1), (1, -1)] {
                    if (0..4).all(|k| self.at(r + k * dr, c + k * dc) == Some(who)) {
                        return true;
                    }
                }
            }
        }
        false
    }

    /// `Some(c_win)` when the game is over.
    pub fn outcome(&self) -> Option<i8> {
        let full = self.grid.iter().flatten().all(|&x| x != 0);
        if self.variant == GameVariant::Connect4 {
            if self.four_in_a_row(1) {
                return Some(1);
            }
            if self.four_in_a_row(-1) {
                return Some(-1);
            }
            return full.then_some(0);
        }
        if !full && (!self.placements(1).is_empty() || !self.placements(-1).is_empty()) {
            return None;
        }
        let score: i32 = self.grid.iter().flatten().map(|&x| x as i32).sum();
        Some(score.signum() as i8)
    }

    pub fn legal_moves(&self) -> Vec<Move> {
        if self.outcome().is_some() {
            return Vec::new();
        }
        if self.variant == GameVariant::Connect4 {
            return (0..self.cols)
                .filter(|&c| self.grid[0][c as usize] == 0)
                .map(|c| Move::Drop(c as u8))
                .collect();
        }
        let p = self.placements(self.to_move);
        if p.is_empty() {
            vec![Move::Pass]
        } else {
            p
        }
    }

    pub fn play(&mut self, mv: Move) {
        match mv {
            Move::Drop(c) => {
                let c = c as usize;
                let r = (0..self.rows as usize)
                    .rev()
                    .find(|&r| self.grid[r][c] == 0)
                    .expect("column has room");
                self.grid[r][c] = self.to_move;
            }
            Move::Place(r, c) => {
                let (r, c) = (r as i32, c as i32);
                for (fr, fc) in self.flips_for(r, c, self.to_move) {
                    self.grid[fr as usize][fc as usize] = self.to_move;
                }
                self.grid[r as usize][c as usize] = self.to_move;
            }
            Move::Pass => {}
        }
        self.to_move = -self.to_move;
    }

    /// Whether the engine state shows the same board and side to move.
    pub fn matches(&self, s: &BoardState) -> bool {
        let side = if s.to_move() == Color::First { 1 } else { -1 };
        side == self.to_move
            && (0..self.rows as usize).all(|r| {
                (0..self.cols as usize).all(|c| {
                    let v = match s.cell(r, c) {
                        Cell::Empty => 0,
                        Cell::First => 1,
                        Cell::Second => -1,
                    };
                    v == self.grid[r][c]
                })
            })
    }
}

pub fn sorted(mut moves: Vec<Move>) -> Vec<String> {
    let mut out: Vec<String> = moves.drain(..).map(|m| m.to_string()).collect();
    out.sort();
    out
}
