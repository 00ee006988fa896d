#![allow(dead_code)]

pub mod oracle;

use alphadda_core::arena::game_rng;
use alphadda_core::{BoardState, GameVariant};
use rand::seq::IndexedRandom;

use oracle::{sorted, Oracle};

/// Plays `games` random games through both the engine and the oracle and
/// returns the number of disagreements found.
pub fn oracle_disagreements(variant: GameVariant, games: u64, seed: u64) -> usize {
    let mut bad = 0;
    for g in 0..games {
        let mut rng = game_rng(seed, g);
        let mut engine = BoardState::new_game(variant);
        let mut oracle = Oracle::new(variant);
        loop {
            let expected = oracle.outcome();
            if engine.outcome().map(|o| o.c_win()) != expected {
                bad += 1;
                break;
            }
            if expected.is_some() {
                break;
            }
            let moves = engine.valid_moves().expect("live game");
            if sorted(moves.clone()) != sorted(oracle.legal_moves()) {
                bad += 1;
                break;
            }
            let mv = *moves.choose(&mut rng).unwrap();
            engine = engine.apply_move(mv).unwrap();
            oracle.play(mv);
            if !oracle.matches(&engine) {
                bad += 1;
                break;
            }
        }
    }
    bad
}

/// Random reachable non-terminal positions.
pub fn random_positions(variant: GameVariant, n: usize, seed: u64) -> Vec<BoardState> {
    let mut out = Vec::with_capacity(n);
    let mut i = 0u64;
    while out.len() < n {
        let mut rng = game_rng(seed, i);
        i += 1;
        let mut s = BoardState::new_game(variant);
        let stop = rand::Rng::random_range(&mut rng, 0..variant.cells() as u32);
        for _ in 0..stop {
            let Ok(moves) = s.valid_moves() else { break };
            s = s.apply_move(*moves.choose(&mut rng).unwrap()).unwrap();
        }
        if !s.is_terminal() {
            out.push(s);
        }
    }
    out
}
