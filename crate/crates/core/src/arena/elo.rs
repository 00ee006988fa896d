use alloc::string::String;
use alloc::vec::Vec;

use libm::pow;

pub const ELO_K: f64 = 8.0;
pub const ELO_INITIAL: f64 = 1500.0;

/// Expected score of `a` against `b`: `1 / (1 + 10^((e_b - e_a) / 400))`.
pub fn elo_expected(e_a: f64, e_b: f64) -> f64 {
    1.0 / (1.0 + pow(10.0, (e_b - e_a) / 400.0))
}

/// Updated rating `e_a + k (n_win - n_games p)`. Draws count half a win.
pub fn elo_update(e_a: f64, n_win: f64, n_games: u32, p: f64, k: f64) -> f64 {
    e_a + k * (n_win - n_games as f64 * p)
}

/// Ratings of a fixed roster, indexed by entrant position.
#[derive(Debug, Clone, PartialEq)]
pub struct EloTable {
    names: Vec<String>,
    ratings: Vec<f64>,
    k: f64,
}

impl EloTable {
    pub fn new(names: Vec<String>) -> Self {
        let ratings = alloc::vec![ELO_INITIAL; names.len()];
        Self {
            names,
            ratings,
            k: ELO_K,
        }
    }

    pub fn with_k(mut self, k: f64) -> Self {
        self.k = k;
        self
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn len(&self) -> usize {
        self.ratings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ratings.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn rating(&self, i: usize) -> f64 {
        self.ratings[i]
    }

    pub fn ratings(&self) -> &[f64] {
        &self.ratings
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.names
            .iter()
            .map(String::as_str)
            .zip(self.ratings.iter().copied())
    }

    /// Applies one game; `score_a` is 1, 0.5 or 0 for entrant `a`.
    ///
    /// `b` receives exactly the negated change, so the rating sum is conserved.
    pub fn record_game(&mut self, a: usize, b: usize, score_a: f64) {
        let p = elo_expected(self.ratings[a], self.ratings[b]);
        let before = self.ratings[a];
        let delta = elo_update(before, score_a, 1, p, self.k) - before;
        self.ratings[a] += delta;
        self.ratings[b] -= delta;
    }
}
