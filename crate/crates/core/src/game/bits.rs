//! Shift-based bitboard kernels shared by every board size.

pub(super) struct Geometry {
    pub rows: usize,
    pub cols: usize,
    pub full: u64,
    not_first_col: u64,
    not_last_col: u64,
}

pub(super) const CONNECT4: Geometry = Geometry::new(6, 7);
pub(super) const OTHELLO6: Geometry = Geometry::new(6, 6);
pub(super) const OTHELLO8: Geometry = Geometry::new(8, 8);

/// (row delta, col delta) for the eight compass directions.
const DIRECTIONS: [(i32, i32); 8] = [
    (0, 1),
    (0, -1),
    (1, 0),
    (-1, 0),
    (1, 1),
    (1, -1),
    (-1, 1),
    (-1, -1),
];

impl Geometry {
    const fn new(rows: usize, cols: usize) -> Self {
        let n = rows * cols;
        let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let mut first_col = 0u64;
        let mut last_col = 0u64;
        let mut r = 0;
        while r < rows {
            first_col |= 1u64 << (r * cols);
            last_col |= 1u64 << (r * cols + cols - 1);
            r += 1;
        }
        Self {
            rows,
            cols,
            full,
            not_first_col: full & !first_col,
            not_last_col: full & !last_col,
        }
    }

    /// Moves every set bit one step in direction `(dr, dc)`, dropping bits
    /// that would leave the board.
    #[inline]
    fn shift(&self, x: u64, (dr, dc): (i32, i32)) -> u64 {
        let delta = dr * self.cols as i32 + dc;
        let moved = if delta >= 0 {
            x << delta as u32
        } else {
            x >> (-delta) as u32
        };
        let moved = match dc {
            1 => moved & self.not_first_col,
            -1 => moved & self.not_last_col,
            _ => moved,
        };
        moved & self.full
    }

    /// Empty cells where `own` brackets at least one `opp` disc.
    pub fn placements(&self, own: u64, opp: u64) -> u64 {
        let empty = self.full & !(own | opp);
        let mut moves = 0;
        let run = self.rows.max(self.cols) - 2;
        for dir in DIRECTIONS {
            let mut t = self.shift(own, dir) & opp;
            for _ in 1..run {
                t |= self.shift(t, dir) & opp;
            }
            moves |= self.shift(t, dir) & empty;
        }
        moves
    }

    /// Opponent discs flipped by placing at `idx`.
    pub fn flips(&self, idx: usize, own: u64, opp: u64) -> u64 {
        let start = 1u64 << idx;
        let mut flips = 0;
        for dir in DIRECTIONS {
            let mut run = 0;
            let mut x = self.shift(start, dir);
            while x & opp != 0 {
                run |= x;
                x = self.shift(x, dir);
            }
            if x & own != 0 {
                flips |= run;
            }
        }
        flips
    }

    pub fn has_four(&self, b: u64) -> bool {
        [(0, 1), (1, 0), (1, 1), (1, -1)].into_iter().any(|dir| {
            let pairs = b & self.shift(b, dir);
            pairs & self.shift(self.shift(pairs, dir), dir) != 0
        })
    }

    /// Lengths of maximal same-color runs of `b` along the four line
    /// directions, reported through `f`.
    pub fn for_each_run(&self, b: u64, mut f: impl FnMut(u32)) {
        for dir in [(0, 1), (1, 0), (1, 1), (1, -1)] {
            // cells that start a run: set, with no set predecessor
            let mut starts = b & !self.shift(b, dir);
            while starts != 0 {
                let bit = starts & starts.wrapping_neg();
                starts &= starts - 1;
                let mut len = 1;
                let mut x = self.shift(bit, dir);
                while x & b != 0 {
                    len += 1;
                    x = self.shift(x, dir);
                }
                f(len);
            }
        }
    }
}
