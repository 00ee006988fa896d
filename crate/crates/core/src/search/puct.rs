//! AlphaZero-style tree search guided by a policy-value evaluator.
//!
//! Edge values `W` and `Q` are stored from the first player's perspective
//! (the `c_win` convention). Selection at a node multiplies `Q` by the
//! node's mover color, so every node maximizes for the side to move.

use alloc::vec;
use alloc::vec::Vec;

use libm::{expf, powf, sqrt};
use rand::{Rng, RngCore};
use rand_distr::{Distribution, Gamma};

use super::{argmax_ties, pick_uniform, SearchError};
use crate::dda::{dda3_backup, dda3_score};
use crate::eval::Evaluator;
use crate::game::{BoardState, Color, GameVariant, Move, Outcome};

/// Per-edge statistics.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EdgeStats {
    /// Visit count.
    pub n: u32,
    /// Cumulative value.
    pub w: f64,
    /// Mean value `w / n`, zero while unvisited.
    pub q: f64,
    /// Prior probability.
    pub p: f64,
}

impl EdgeStats {
    pub fn with_prior(p: f64) -> Self {
        Self {
            p,
            ..Self::default()
        }
    }

    /// Standard backup: `N += 1`, `W += v`, `Q = W / N`.
    pub fn backup(&mut self, v: f64) {
        self.n += 1;
        self.w += v;
        self.q = self.w / self.n as f64;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MoveSelection {
    /// Always play the most visited edge.
    Argmax,
    /// Sample from the visit softmax before `t_opening` turns, then argmax.
    SoftmaxOpening,
}

/// Dirichlet noise mixed into the root priors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootNoise {
    pub epsilon: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchParams {
    pub n_sim: u32,
    pub c_puct: f64,
    pub t_opening: u32,
    pub tau: f32,
    pub mode: MoveSelection,
    /// Dropout probability passed to every evaluation in the search.
    pub dropout: f32,
    pub root_noise: Option<RootNoise>,
}

impl SearchParams {
    /// Playing strength settings from the AlphaZero parameter table.
    pub fn for_variant(variant: GameVariant) -> Self {
        let (n_sim, t_opening, tau) = match variant {
            GameVariant::Connect4 => (200, 4, 50.0),
            GameVariant::Othello6 => (200, 4, 20.0),
            GameVariant::Othello8 => (400, 6, 40.0),
        };
        Self {
            n_sim,
            c_puct: 1.25,
            t_opening,
            tau,
            mode: MoveSelection::Argmax,
            dropout: 0.0,
            root_noise: None,
        }
    }

    pub fn with_sims(mut self, n_sim: u32) -> Self {
        self.n_sim = n_sim;
        self
    }
}

/// Replaces PUCT selection and the `W += v` backup with the value-matching
/// rule of the third difficulty-adjustment strategy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dda3Hook {
    pub v_bar: f64,
    pub c_dda: Color,
    pub c_explore: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    /// Root legal moves with their final edge statistics.
    pub root: Vec<(Move, EdgeStats)>,
    /// Evaluator value of the root position.
    pub root_value: f64,
}

impl SearchResult {
    pub fn total_visits(&self) -> u32 {
        self.root.iter().map(|(_, e)| e.n).sum()
    }

    /// Visit counts laid out over the full action space.
    pub fn visit_counts(&self, variant: GameVariant) -> Vec<u32> {
        let mut out = vec![0; variant.action_count()];
        for (mv, e) in &self.root {
            out[mv.action(variant)] = e.n;
        }
        out
    }

    /// Normalized visit distribution over the action space.
    pub fn visit_distribution(&self, variant: GameVariant) -> Vec<f32> {
        let total = self.total_visits().max(1) as f32;
        self.visit_counts(variant)
            .into_iter()
            .map(|n| n as f32 / total)
            .collect()
    }
}

struct Edge {
    mv: Move,
    stats: EdgeStats,
    child: Option<usize>,
}

struct Node {
    state: BoardState,
    terminal: Option<Outcome>,
    expanded: bool,
    edges: Vec<Edge>,
}

impl Node {
    fn new(state: BoardState) -> Self {
        Self {
            terminal: state.outcome(),
            state,
            expanded: false,
            edges: Vec::new(),
        }
    }

    fn visits(&self) -> u32 {
        self.edges.iter().map(|e| e.stats.n).sum()
    }
}

/// PUCT score `sign * Q + c_puct * P * sqrt(N) / (1 + n)` where `sign` is
/// the mover's color.
pub fn puct_score(edge: &EdgeStats, parent_visits: u32, c_puct: f64, mover: Color) -> f64 {
    mover.value() as f64 * edge.q
        + c_puct * edge.p * sqrt(parent_visits as f64) / (1.0 + edge.n as f64)
}

/// Index of the edge maximizing [`puct_score`], with the parent visit count
/// taken as the sum over `edges`. Ties are broken uniformly at random.
pub fn puct_select<R: Rng + ?Sized>(
    edges: &[EdgeStats],
    mover: Color,
    c_puct: f64,
    rng: &mut R,
) -> Result<usize, SearchError> {
    if edges.is_empty() {
        return Err(SearchError::Unexpanded);
    }
    let parent: u32 = edges.iter().map(|e| e.n).sum();
    let ties = argmax_ties(edges.iter().map(|e| puct_score(e, parent, c_puct, mover)));
    Ok(pick_uniform(&ties, rng))
}

fn dda3_select<R: Rng + ?Sized>(edges: &[EdgeStats], hook: &Dda3Hook, rng: &mut R) -> usize {
    let parent: u32 = edges.iter().map(|e| e.n).sum();
    let ties = argmax_ties(edges.iter().map(|e| dda3_score(e, parent, hook.c_explore)));
    pick_uniform(&ties, rng)
}

/// Priors masked to `moves` and renormalized; uniform when nothing survives.
fn masked_priors(variant: GameVariant, policy: &[f32], moves: &[Move]) -> Vec<f64> {
    let mut priors: Vec<f64> = moves
        .iter()
        .map(|m| {
            let p = policy.get(m.action(variant)).copied().unwrap_or(0.0);
            if p.is_finite() && p > 0.0 {
                p as f64
            } else {
                0.0
            }
        })
        .collect();
    let sum: f64 = priors.iter().sum();
    if sum > 0.0 && sum.is_finite() {
        priors.iter_mut().for_each(|p| *p /= sum);
    } else {
        let u = 1.0 / moves.len() as f64;
        priors.iter_mut().for_each(|p| *p = u);
    }
    priors
}

struct Tree<'a, E: ?Sized> {
    nodes: Vec<Node>,
    evaluator: &'a E,
    params: &'a SearchParams,
    hook: Option<Dda3Hook>,
}

impl<E: Evaluator + ?Sized> Tree<'_, E> {
    /// Evaluates and expands `idx`, returning the leaf value.
    fn expand(&mut self, idx: usize, rng: &mut dyn RngCore) -> f64 {
        let state = self.nodes[idx].state;
        let eval = self.evaluator.evaluate(&state, self.params.dropout, rng);
        let moves = state.legal_moves_unchecked();
        let priors = masked_priors(state.variant(), &eval.policy, &moves);
        let node = &mut self.nodes[idx];
        node.edges = moves
            .into_iter()
            .zip(priors)
            .map(|(mv, p)| Edge {
                mv,
                stats: EdgeStats::with_prior(p),
                child: None,
            })
            .collect();
        node.expanded = true;
        (eval.value as f64).clamp(-1.0, 1.0)
    }

    fn add_root_noise(&mut self, noise: RootNoise, rng: &mut dyn RngCore) {
        let edges = &mut self.nodes[0].edges;
        if edges.len() < 2 || noise.epsilon <= 0.0 {
            return;
        }
        let Ok(gamma) = Gamma::new(noise.alpha, 1.0) else {
            return;
        };
        let eta: Vec<f64> = edges.iter().map(|_| gamma.sample(rng)).collect();
        let sum: f64 = eta.iter().sum();
        if sum.is_nan() || sum <= 0.0 {
            return;
        }
        for (e, x) in edges.iter_mut().zip(eta) {
            e.stats.p = (1.0 - noise.epsilon) * e.stats.p + noise.epsilon * x / sum;
        }
    }

    fn simulate(&mut self, rng: &mut dyn RngCore) {
        let mut path: Vec<(usize, usize)> = Vec::new();
        let mut idx = 0;
        let v = loop {
            let node = &self.nodes[idx];
            if let Some(outcome) = node.terminal {
                break outcome.value() as f64;
            }
            if !node.expanded {
                break self.expand(idx, rng);
            }
            let stats: Vec<EdgeStats> = node.edges.iter().map(|e| e.stats).collect();
            let a = match &self.hook {
                Some(hook) => dda3_select(&stats, hook, rng),
                None => puct_select(&stats, node.state.to_move(), self.params.c_puct, rng)
                    .expect("expanded non-terminal node has edges"),
            };
            path.push((idx, a));
            idx = match self.nodes[idx].edges[a].child {
                Some(child) => child,
                None => {
                    let edge = &self.nodes[idx].edges[a];
                    let child = Node::new(self.nodes[idx].state.apply_unchecked(edge.mv));
                    self.nodes.push(child);
                    let child_idx = self.nodes.len() - 1;
                    self.nodes[idx].edges[a].child = Some(child_idx);
                    child_idx
                }
            };
        };
        for (node_idx, a) in path.into_iter().rev() {
            let mover = self.nodes[node_idx].state.to_move();
            let stats = &mut self.nodes[node_idx].edges[a].stats;
            match &self.hook {
                Some(hook) => dda3_backup(stats, v, hook.v_bar, mover, hook.c_dda),
                None => stats.backup(v),
            }
        }
    }
}

/// Runs `params.n_sim` simulations from `root`.
///
/// The root is expanded before the first simulation, so the root edge visit
/// counts always sum to `n_sim`.
pub fn mcts_search<E: Evaluator + ?Sized>(
    root: &BoardState,
    evaluator: &E,
    params: &SearchParams,
    hook: Option<Dda3Hook>,
    rng: &mut dyn RngCore,
) -> Result<SearchResult, SearchError> {
    root.valid_moves()?;
    let mut tree = Tree {
        nodes: vec![Node::new(*root)],
        evaluator,
        params,
        hook,
    };
    let root_value = tree.expand(0, rng);
    if let Some(noise) = params.root_noise {
        tree.add_root_noise(noise, rng);
    }
    for _ in 0..params.n_sim {
        tree.simulate(rng);
    }
    debug_assert_eq!(tree.nodes[0].visits(), params.n_sim);
    Ok(SearchResult {
        root: tree.nodes[0]
            .edges
            .iter()
            .map(|e| (e.mv, e.stats))
            .collect(),
        root_value,
    })
}

/// Visit-count softmax `exp(N^(1/tau)) / sum_b exp(N_b^(1/tau))`, sampled.
pub(crate) fn softmax_visit_index<R: Rng + ?Sized>(visits: &[u32], tau: f32, rng: &mut R) -> usize {
    let logits: Vec<f32> = visits.iter().map(|&n| powf(n as f32, 1.0 / tau)).collect();
    let max = logits.iter().copied().fold(f32::NEG_INFINITY, f32::max);
    let weights: Vec<f32> = logits.iter().map(|&l| expf(l - max)).collect();
    let total: f32 = weights.iter().sum();
    let mut x = rng.random::<f32>() * total;
    for (i, w) in weights.iter().enumerate() {
        if x < *w {
            return i;
        }
        x -= w;
    }
    weights.len() - 1
}

/// Chooses the move to play from a finished search.
pub fn select_played_move<R: Rng + ?Sized>(
    result: &SearchResult,
    state: &BoardState,
    params: &SearchParams,
    rng: &mut R,
) -> Move {
    let visits: Vec<u32> = result.root.iter().map(|(_, e)| e.n).collect();
    let i = if params.mode == MoveSelection::SoftmaxOpening && state.turn_index() < params.t_opening
    {
        softmax_visit_index(&visits, params.tau, rng)
    } else {
        pick_uniform(&argmax_ties(visits.iter().map(|&n| n as f64)), rng)
    };
    result.root[i].0
}

/// Searches and returns the move to play.
pub fn decide_move_alphazero<E: Evaluator + ?Sized>(
    state: &BoardState,
    evaluator: &E,
    params: &SearchParams,
    rng: &mut dyn RngCore,
) -> Result<Move, SearchError> {
    let result = mcts_search(state, evaluator, params, None, rng)?;
    Ok(select_played_move(&result, state, params, rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{EvalResult, HeuristicEvaluator};
    use crate::game::Cell;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    struct Uniform;

    impl Evaluator for Uniform {
        fn evaluate(&self, s: &BoardState, _: f32, _: &mut dyn RngCore) -> EvalResult {
            let n = s.variant().action_count();
            EvalResult {
                value: 0.0,
                policy: vec![1.0 / n as f32; n],
            }
        }
    }

    #[test]
    fn puct_scores_hand_example() {
        let edges = [EdgeStats::with_prior(0.7), EdgeStats::with_prior(0.3)];
        assert!((puct_score(&edges[0], 4, 1.25, Color::First) - 1.75).abs() < 1e-6);
        assert!((puct_score(&edges[1], 4, 1.25, Color::First) - 0.75).abs() < 1e-6);

        // parent visits of 4 carried by a zero-prior edge with Q = 0
        let mut visited = EdgeStats::with_prior(0.0);
        visited.n = 4;
        let all = [edges[0], edges[1], visited];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(puct_select(&all, Color::First, 1.25, &mut rng).unwrap(), 0);
    }

    #[test]
    fn puct_zero_visits_is_uniform_over_q() {
        let edges = [EdgeStats::with_prior(0.9), EdgeStats::with_prior(0.1)];
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut hits = [0u32; 2];
        for _ in 0..2000 {
            hits[puct_select(&edges, Color::First, 1.25, &mut rng).unwrap()] += 1;
        }
        assert!(hits.iter().all(|&h| (900..1100).contains(&h)), "{hits:?}");
        assert_eq!(
            puct_select(&[], Color::First, 1.25, &mut rng),
            Err(SearchError::Unexpanded)
        );
    }

    #[test]
    fn puct_respects_mover_perspective() {
        let mut good_for_first = EdgeStats::with_prior(0.5);
        good_for_first.n = 10;
        good_for_first.w = 8.0;
        good_for_first.q = 0.8;
        let mut good_for_second = EdgeStats::with_prior(0.5);
        good_for_second.n = 10;
        good_for_second.w = -8.0;
        good_for_second.q = -0.8;
        let edges = [good_for_first, good_for_second];
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        assert_eq!(
            puct_select(&edges, Color::First, 1.25, &mut rng).unwrap(),
            0
        );
        assert_eq!(
            puct_select(&edges, Color::Second, 1.25, &mut rng).unwrap(),
            1
        );
    }

    #[test]
    fn visit_totals_match_sims() {
        let s = BoardState::new_game(GameVariant::Othello6);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n_sim in [1, 7, 50] {
            let params = SearchParams::for_variant(GameVariant::Othello6).with_sims(n_sim);
            let r = mcts_search(&s, &Uniform, &params, None, &mut rng).unwrap();
            assert_eq!(r.total_visits(), n_sim);
            for (_, e) in &r.root {
                assert!((-1.0..=1.0).contains(&e.q));
            }
        }
    }

    #[test]
    fn terminal_root_is_an_error() {
        let mut cells = vec![Cell::Empty; 42];
        for r in 2..6 {
            cells[r * 7] = Cell::First;
        }
        let s = BoardState::from_cells(GameVariant::Connect4, &cells, Color::Second, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let params = SearchParams::for_variant(GameVariant::Connect4);
        assert!(mcts_search(&s, &Uniform, &params, None, &mut rng).is_err());
    }

    #[test]
    fn finds_immediate_connect4_win() {
        let mut cells = vec![Cell::Empty; 42];
        for c in 1..4 {
            cells[5 * 7 + c] = Cell::First;
            cells[4 * 7 + c] = Cell::Second;
        }
        let s = BoardState::from_cells(GameVariant::Connect4, &cells, Color::First, 6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let params = SearchParams::for_variant(GameVariant::Connect4).with_sims(200);
        let r = mcts_search(&s, &HeuristicEvaluator, &params, None, &mut rng).unwrap();
        let best = r.root.iter().max_by_key(|(_, e)| e.n).unwrap().0;
        assert!(matches!(best, Move::Drop(0) | Move::Drop(4)), "{best:?}");
    }

    #[test]
    fn softmax_of_equal_visits_is_fair() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut hits = [0u32; 2];
        for _ in 0..4000 {
            hits[softmax_visit_index(&[1, 1], 50.0, &mut rng)] += 1;
        }
        assert!(hits.iter().all(|&h| (1850..2150).contains(&h)), "{hits:?}");
    }

    #[test]
    fn played_move_is_argmax_with_fair_ties() {
        let s = BoardState::new_game(GameVariant::Connect4);
        let params = SearchParams::for_variant(GameVariant::Connect4);
        let stats = |n| EdgeStats {
            n,
            ..EdgeStats::default()
        };
        let result = SearchResult {
            root: vec![
                (Move::Drop(0), stats(10)),
                (Move::Drop(1), stats(5)),
                (Move::Drop(2), stats(1)),
            ],
            root_value: 0.0,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        assert_eq!(
            select_played_move(&result, &s, &params, &mut rng),
            Move::Drop(0)
        );

        let tied = SearchResult {
            root: vec![(Move::Drop(0), stats(7)), (Move::Drop(1), stats(7))],
            root_value: 0.0,
        };
        let zeros = (0..2000)
            .filter(|_| select_played_move(&tied, &s, &params, &mut rng) == Move::Drop(0))
            .count();
        assert!((900..1100).contains(&zeros), "{zeros}");
    }
}
