//! Matches, tournaments, Elo ratings, sweeps and grid search.
//!
//! Every game draws its randomness from [`game_rng`]`(seed, index)`, so a
//! run is reproducible from its configuration and master seed alone.

mod agent;
mod elo;
mod stats;
mod tournament;

use thiserror::Error;

use crate::search::SearchError;

pub use agent::{Agent, AgentKind, AgentSpec, Decision, EvaluatorSpec, SpecAgent};
pub use elo::{elo_expected, elo_update, EloTable, ELO_INITIAL, ELO_K};
pub use stats::{average_ranks, spearman};
pub use tournament::{
    fixed_opponent_rating, game_rng, grid_objective, grid_search, grid_search_by, match_series,
    match_series_with, play_game, rating_from_scores, round_robin, sweep_dropout, sweep_n_sim,
    FixedRating, GameLog, GridCell, GridSearch, MatchResult, OpponentRecord, PlayedTurn,
    RoundRobin, RoundRobinGame, SeriesGame,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ArenaError {
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error("series length must be even, got {0}")]
    OddGameCount(u32),
    #[error("a tournament needs at least two agents, got {0}")]
    TooFewAgents(usize),
    #[error("grid is empty")]
    EmptyGrid,
}
