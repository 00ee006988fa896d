//! Playout-based Monte Carlo tree search with UCT selection.
//!
//! Each node's cumulative value `q` is kept from the point of view of the
//! player whose move led to it, so the root children score results for the
//! searching player: `+1` per win, `-1` per loss, unchanged on a draw.

use alloc::vec::Vec;

use libm::{log, sqrt};
use rand::Rng;

use super::{argmax_ties, pick_uniform, SearchError};
use crate::game::{BoardState, Color, Move, Outcome};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UctParams {
    pub n_sim: u32,
    pub c: f64,
    pub eps: f64,
    /// Visit count at which a leaf's children are created.
    pub n_open: u32,
}

impl UctParams {
    pub fn with_sims(n_sim: u32) -> Self {
        Self {
            n_sim,
            c: 0.5,
            eps: 1e-7,
            n_open: 5,
        }
    }

    /// 300 simulations.
    pub fn mcts1() -> Self {
        Self::with_sims(300)
    }

    /// 100 simulations.
    pub fn mcts2() -> Self {
        Self::with_sims(100)
    }
}

struct Node {
    state: BoardState,
    mv: Option<Move>,
    /// Player who moved into this node.
    mover: Color,
    visits: u32,
    q: f64,
    children: Vec<usize>,
}

fn playout<R: Rng + ?Sized>(mut state: BoardState, rng: &mut R) -> Outcome {
    loop {
        if let Some(outcome) = state.outcome() {
            return outcome;
        }
        let moves = state.legal_moves_unchecked();
        state = state.apply_unchecked(pick_uniform(&moves, rng));
    }
}

struct Tree {
    nodes: Vec<Node>,
    params: UctParams,
}

impl Tree {
    fn expand(&mut self, idx: usize) {
        let state = self.nodes[idx].state;
        let mover = state.to_move();
        for mv in state.legal_moves_unchecked() {
            self.nodes.push(Node {
                state: state.apply_unchecked(mv),
                mv: Some(mv),
                mover,
                visits: 0,
                q: 0.0,
                children: Vec::new(),
            });
            let child = self.nodes.len() - 1;
            self.nodes[idx].children.push(child);
        }
    }

    /// Unvisited children first (uniformly), otherwise the maximal UCT score.
    fn select<R: Rng + ?Sized>(&self, idx: usize, rng: &mut R) -> usize {
        let node = &self.nodes[idx];
        let unvisited: Vec<usize> = node
            .children
            .iter()
            .copied()
            .filter(|&c| self.nodes[c].visits == 0)
            .collect();
        if !unvisited.is_empty() {
            return pick_uniform(&unvisited, rng);
        }
        let ln_parent = log(node.visits as f64 + 1.0);
        let scores = node.children.iter().map(|&c| {
            let child = &self.nodes[c];
            let n = child.visits as f64;
            child.q / n + self.params.c * sqrt(ln_parent / (n + self.params.eps))
        });
        node.children[pick_uniform(&argmax_ties(scores), rng)]
    }

    fn simulate<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let mut path = Vec::with_capacity(16);
        path.push(0);
        let mut idx = 0;
        while !self.nodes[idx].children.is_empty() {
            idx = self.select(idx, rng);
            path.push(idx);
        }
        let leaf = &self.nodes[idx];
        let outcome = match leaf.state.outcome() {
            Some(outcome) => outcome,
            None if leaf.visits >= self.params.n_open => {
                self.expand(idx);
                idx = self.select(idx, rng);
                path.push(idx);
                playout(self.nodes[idx].state, rng)
            }
            None => playout(leaf.state, rng),
        };
        let c_win = outcome.c_win() as f64;
        for i in path {
            let node = &mut self.nodes[i];
            node.visits += 1;
            node.q += c_win * node.mover.value() as f64;
        }
    }
}

/// Runs the search and returns the root moves with their visit counts.
pub fn uct_search<R: Rng + ?Sized>(
    state: &BoardState,
    params: &UctParams,
    rng: &mut R,
) -> Result<Vec<(Move, u32)>, SearchError> {
    state.valid_moves()?;
    let mut tree = Tree {
        nodes: alloc::vec![Node {
            state: *state,
            mv: None,
            mover: state.to_move().opponent(),
            visits: 0,
            q: 0.0,
            children: Vec::new(),
        }],
        params: *params,
    };
    tree.expand(0);
    for _ in 0..params.n_sim {
        tree.simulate(rng);
    }
    Ok(tree.nodes[0]
        .children
        .iter()
        .map(|&c| {
            (
                tree.nodes[c].mv.expect("child has a move"),
                tree.nodes[c].visits,
            )
        })
        .collect())
}

/// Most visited root move, ties broken uniformly.
pub fn decide_move_vanilla_mcts<R: Rng + ?Sized>(
    state: &BoardState,
    params: &UctParams,
    rng: &mut R,
) -> Result<Move, SearchError> {
    let visits = uct_search(state, params, rng)?;
    let ties = argmax_ties(visits.iter().map(|&(_, n)| n as f64));
    Ok(visits[pick_uniform(&ties, rng)].0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{Cell, GameVariant};
    use alloc::vec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn root_visits_sum_to_sims() {
        let s = BoardState::new_game(GameVariant::Connect4);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let visits = uct_search(&s, &UctParams::mcts2(), &mut rng).unwrap();
        assert_eq!(visits.iter().map(|&(_, n)| n).sum::<u32>(), 100);
        assert_eq!(visits.len(), 7);
    }

    #[test]
    fn takes_immediate_win() {
        let mut cells = vec![Cell::Empty; 42];
        for r in 3..6 {
            cells[r * 7 + 2] = Cell::Second;
        }
        cells[5 * 7] = Cell::First;
        cells[5 * 7 + 6] = Cell::First;
        cells[4 * 7 + 6] = Cell::First;
        let s = BoardState::from_cells(GameVariant::Connect4, &cells, Color::Second, 6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..5 {
            assert_eq!(
                decide_move_vanilla_mcts(&s, &UctParams::mcts1(), &mut rng).unwrap(),
                Move::Drop(2)
            );
        }
    }
}
