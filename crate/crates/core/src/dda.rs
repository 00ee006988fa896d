//! Dynamic difficulty adjustment.
//!
//! The agent records the undamaged evaluator value `v_n` of the position at
//! each of its own turns and averages the last `n_h` of them into `v_bar`.
//! Multiplying by the agent's disc color gives how well the agent is doing:
//! `+1` means the evaluator expects the agent to win. Three strategies turn
//! that signal into weaker or stronger play:
//!
//! - simulation scaling: fewer tree-search simulations the better the agent is doing;
//! - dropout scaling: a higher head-unit dropout rate the better the agent is doing;
//! - value matching: a tree search that steers toward positions whose value
//!   mirrors `v_bar`, assuming the opponent keeps the game where it is.

use alloc::vec::Vec;

use libm::{ceil, pow, sqrt};
use rand::RngCore;

use crate::eval::Evaluator;
use crate::game::{BoardState, Color, GameVariant, Move};
use crate::search::{
    mcts_search, select_played_move, Dda3Hook, EdgeStats, MoveSelection, SearchError, SearchParams,
};

/// Root values recorded at the agent's own turns, oldest first.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueHistory {
    values: Vec<f64>,
    c_dda: Color,
}

impl ValueHistory {
    pub fn new(c_dda: Color) -> Self {
        Self {
            values: Vec::new(),
            c_dda,
        }
    }

    pub fn from_values(c_dda: Color, values: &[f64]) -> Self {
        let mut h = Self::new(c_dda);
        values.iter().for_each(|&v| h.push(v));
        h
    }

    /// Appends a value, clamped to `[-1, 1]`.
    pub fn push(&mut self, v: f64) {
        self.values.push(v.clamp(-1.0, 1.0));
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn c_dda(&self) -> Color {
        self.c_dda
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self, n_h: usize) -> f64 {
        mean_value(&self.values, n_h)
    }
}

/// Mean of the last `n_h` values; of all values when fewer exist; `0` when empty.
pub fn mean_value(values: &[f64], n_h: usize) -> f64 {
    let tail = &values[values.len().saturating_sub(n_h)..];
    if tail.is_empty() {
        return 0.0;
    }
    tail.iter().sum::<f64>() / tail.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dda1Params {
    pub n_h: usize,
    pub a_sim: f64,
    pub b_sim0: f64,
    pub n_max: u32,
}

impl Dda1Params {
    pub fn for_variant(variant: GameVariant) -> Self {
        let (n_h, a_sim, b_sim0, n_max) = match variant {
            GameVariant::Connect4 => (4, 2.0, -1.4, 200),
            GameVariant::Othello6 => (3, 1.6, -1.5, 200),
            GameVariant::Othello8 => (3, 2.8, -1.4, 400),
        };
        Self {
            n_h,
            a_sim,
            b_sim0,
            n_max,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dda2Params {
    pub n_h: usize,
    pub a_drop: f64,
    pub p_drop0: f64,
    pub p_max: f64,
}

impl Dda2Params {
    pub fn for_variant(variant: GameVariant) -> Self {
        let (n_h, a_drop, p_drop0) = match variant {
            GameVariant::Connect4 => (1, 5.0, -0.4),
            GameVariant::Othello6 => (2, 1.0, 0.0),
            GameVariant::Othello8 => (3, 10.0, -0.9),
        };
        Self {
            n_h,
            a_drop,
            p_drop0,
            p_max: 0.95,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dda3Params {
    pub n_h: usize,
    pub c_explore: f64,
}

impl Dda3Params {
    pub fn for_variant(variant: GameVariant) -> Self {
        let (n_h, c_explore) = match variant {
            GameVariant::Connect4 => (2, 0.5),
            GameVariant::Othello6 => (4, 1.0),
            GameVariant::Othello8 => (1, 0.75),
        };
        Self { n_h, c_explore }
    }
}

/// Simulation count `ceil(10^(-a_sim * (v_bar * c_dda + b_sim0)))`, capped at `n_max`.
// NaN-aware: a non-finite count saturates at the cap.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn dda1_num_sims(v_bar: f64, c_dda: Color, p: &Dda1Params) -> u32 {
    let x = v_bar * c_dda.value() as f64;
    let n = ceil(pow(10.0, -p.a_sim * (x + p.b_sim0)));
    if !(n < p.n_max as f64) {
        p.n_max.max(1)
    } else {
        (n as u32).max(1)
    }
}

/// Dropout probability `a_drop * (v_bar * c_dda + p_drop0)`, clamped to `[0, p_max]`.
pub fn dda2_dropout_prob(v_bar: f64, c_dda: Color, p: &Dda2Params) -> f64 {
    let x = v_bar * c_dda.value() as f64;
    let prob = p.a_drop * (x + p.p_drop0);
    if prob < 0.0 {
        0.0
    } else if prob > p.p_max {
        p.p_max
    } else {
        prob
    }
}

/// Value-matching selection score
/// `W / N_parent + c * sqrt(2 ln(N_parent + 1) / (n + 1))`; the first term
/// is zero while the parent is unvisited.
pub fn dda3_score(edge: &EdgeStats, parent_visits: u32, c: f64) -> f64 {
    let exploit = if parent_visits == 0 {
        0.0
    } else {
        edge.w / parent_visits as f64
    };
    let explore = c * sqrt(2.0 * libm::log(parent_visits as f64 + 1.0) / (edge.n as f64 + 1.0));
    exploit + explore
}

/// Value-matching backup: `W -= |v_leaf + v_bar * c_edge * c_dda|`, `N += 1`.
///
/// On the agent's own edges this penalizes distance from `-v_bar`; on the
/// opponent's edges, distance from `v_bar`.
pub fn dda3_backup(edge: &mut EdgeStats, v_leaf: f64, v_bar: f64, c_edge: Color, c_dda: Color) {
    let sign = (c_edge.sign() * c_dda.sign()) as f64;
    edge.n += 1;
    edge.w -= (v_leaf + v_bar * sign).abs();
    edge.q = edge.w / edge.n as f64;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DdaKind {
    Dda1,
    Dda2,
    Dda3,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DdaStrategy {
    Simulations(Dda1Params),
    Dropout(Dda2Params),
    ValueMatching(Dda3Params),
}

impl DdaStrategy {
    pub fn for_variant(kind: DdaKind, variant: GameVariant) -> Self {
        match kind {
            DdaKind::Dda1 => Self::Simulations(Dda1Params::for_variant(variant)),
            DdaKind::Dda2 => Self::Dropout(Dda2Params::for_variant(variant)),
            DdaKind::Dda3 => Self::ValueMatching(Dda3Params::for_variant(variant)),
        }
    }

    pub fn kind(&self) -> DdaKind {
        match self {
            Self::Simulations(_) => DdaKind::Dda1,
            Self::Dropout(_) => DdaKind::Dda2,
            Self::ValueMatching(_) => DdaKind::Dda3,
        }
    }

    pub fn n_h(&self) -> usize {
        match self {
            Self::Simulations(p) => p.n_h,
            Self::Dropout(p) => p.n_h,
            Self::ValueMatching(p) => p.n_h,
        }
    }
}

/// What the adjustment did on one turn.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DdaDiagnostics {
    pub v_n: f64,
    pub v_bar: f64,
    pub n_sim: Option<u32>,
    pub p_drop: Option<f64>,
}

/// Records the position value, adapts the search, and returns the move.
///
/// `base` supplies `c_puct` and, for the dropout and value-matching
/// strategies, the simulation count. The played move is always the most
/// visited root edge.
pub fn dda_decide_move<E: Evaluator + ?Sized>(
    strategy: &DdaStrategy,
    state: &BoardState,
    history: &mut ValueHistory,
    evaluator: &E,
    base: &SearchParams,
    rng: &mut dyn RngCore,
) -> Result<(Move, DdaDiagnostics), SearchError> {
    state.valid_moves()?;
    let v_n = evaluator.evaluate(state, 0.0, rng).value as f64;
    history.push(v_n);
    let v_bar = history.mean(strategy.n_h());
    let c_dda = history.c_dda();

    let mut params = SearchParams {
        mode: MoveSelection::Argmax,
        dropout: 0.0,
        root_noise: None,
        ..*base
    };
    let mut diagnostics = DdaDiagnostics {
        v_n,
        v_bar,
        n_sim: None,
        p_drop: None,
    };
    let mut hook = None;
    match strategy {
        DdaStrategy::Simulations(p) => {
            params.n_sim = dda1_num_sims(v_bar, c_dda, p);
            diagnostics.n_sim = Some(params.n_sim);
        }
        DdaStrategy::Dropout(p) => {
            let p_drop = dda2_dropout_prob(v_bar, c_dda, p);
            params.dropout = p_drop as f32;
            diagnostics.p_drop = Some(p_drop);
        }
        DdaStrategy::ValueMatching(p) => {
            hook = Some(Dda3Hook {
                v_bar,
                c_dda,
                c_explore: p.c_explore,
            });
        }
    }
    let result = mcts_search(state, evaluator, &params, hook, rng)?;
    Ok((
        select_played_move(&result, state, &params, rng),
        diagnostics,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_value_examples() {
        assert!((mean_value(&[0.2, 0.4, 0.6], 2) - 0.5).abs() < 1e-12);
        assert_eq!(mean_value(&[0.8], 4), 0.8);
        assert_eq!(mean_value(&[], 3), 0.0);
    }

    #[test]
    fn history_clamps() {
        let mut h = ValueHistory::new(Color::Second);
        h.push(3.0);
        h.push(-1.5);
        assert_eq!(h.values(), [1.0, -1.0]);
        assert_eq!(h.c_dda(), Color::Second);
    }

    #[test]
    fn dda1_connect4_examples() {
        let p = Dda1Params::for_variant(GameVariant::Connect4);
        assert_eq!(dda1_num_sims(1.0, Color::First, &p), 7);
        assert_eq!(dda1_num_sims(-1.0, Color::Second, &p), 7);
        assert_eq!(dda1_num_sims(-1.0, Color::First, &p), 200);
        assert_eq!(dda1_num_sims(0.0, Color::First, &p), 200);
    }

    #[test]
    fn dda2_connect4_examples() {
        let p = Dda2Params::for_variant(GameVariant::Connect4);
        assert_eq!(dda2_dropout_prob(1.0, Color::First, &p), 0.95);
        assert_eq!(dda2_dropout_prob(0.0, Color::First, &p), 0.0);
        assert!((dda2_dropout_prob(0.5, Color::First, &p) - 0.5).abs() < 1e-12);
        assert!((dda2_dropout_prob(-0.5, Color::Second, &p) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn dda3_score_examples() {
        assert_eq!(dda3_score(&EdgeStats::default(), 0, 0.5), 0.0);
        let e = EdgeStats {
            n: 1,
            w: -1.3,
            ..EdgeStats::default()
        };
        let expected = -0.325 + 0.5 * sqrt(libm::log(5.0));
        assert!((dda3_score(&e, 4, 0.5) - expected).abs() < 1e-12);
        assert!((expected - 0.30932).abs() < 1e-5);
        let more = EdgeStats { n: 2, ..e };
        assert!(dda3_score(&more, 4, 0.5) < dda3_score(&e, 4, 0.5));
    }

    #[test]
    fn dda3_backup_examples() {
        let mut own = EdgeStats::default();
        dda3_backup(&mut own, 0.5, 0.8, Color::First, Color::First);
        assert!((own.w + 1.3).abs() < 1e-12);
        assert_eq!(own.n, 1);

        let mut opp = EdgeStats::default();
        dda3_backup(&mut opp, 0.5, 0.8, Color::Second, Color::First);
        assert!((opp.w + 0.3).abs() < 1e-12);

        let mut fixed = EdgeStats::default();
        dda3_backup(&mut fixed, -0.8, 0.8, Color::Second, Color::Second);
        assert_eq!(fixed.w, 0.0);
    }

    #[test]
    fn strategy_defaults() {
        let s = DdaStrategy::for_variant(DdaKind::Dda3, GameVariant::Othello6);
        assert_eq!(s.n_h(), 4);
        assert_eq!(s.kind(), DdaKind::Dda3);
        let p = Dda2Params::for_variant(GameVariant::Othello8);
        assert_eq!((p.n_h, p.a_drop, p.p_drop0), (3, 10.0, -0.9));
        let p = Dda1Params::for_variant(GameVariant::Othello8);
        assert_eq!((p.n_h, p.a_sim, p.b_sim0, p.n_max), (3, 2.8, -1.4, 400));
    }
}
