use alloc::string::String;
use alloc::vec::Vec;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::agent::{Agent, AgentSpec, EvaluatorSpec};
use super::elo::{elo_expected, elo_update, EloTable, ELO_INITIAL, ELO_K};
use super::ArenaError;
use crate::dda::{DdaDiagnostics, DdaStrategy};
use crate::game::{BoardState, Color, GameError, GameVariant, Move, Outcome};
use crate::search::{SearchError, SearchParams};

/// Deterministic generator for game `index` of a run seeded with `seed`.
pub fn game_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlayedTurn {
    pub color: Color,
    pub mv: Move,
    pub dda: Option<DdaDiagnostics>,
}

/// Move list of a finished game.
#[derive(Debug, Clone, PartialEq)]
pub struct GameLog {
    pub variant: GameVariant,
    pub turns: Vec<PlayedTurn>,
    pub outcome: Outcome,
}

impl GameLog {
    /// Replays the moves from the initial position.
    pub fn replay(&self) -> Result<BoardState, GameError> {
        self.turns
            .iter()
            .try_fold(BoardState::new_game(self.variant), |s, t| {
                s.apply_move(t.mv)
            })
    }
}

/// Plays one game to the end.
pub fn play_game(
    first: &mut dyn Agent,
    second: &mut dyn Agent,
    variant: GameVariant,
    rng: &mut dyn RngCore,
) -> Result<GameLog, SearchError> {
    first.reset(Color::First);
    second.reset(Color::Second);
    let mut state = BoardState::new_game(variant);
    let mut turns = Vec::new();
    loop {
        if let Some(outcome) = state.outcome() {
            return Ok(GameLog {
                variant,
                turns,
                outcome,
            });
        }
        let color = state.to_move();
        let d = match color {
            Color::First => first.decide(&state, rng)?,
            Color::Second => second.decide(&state, rng)?,
        };
        state = state.apply_move(d.mv)?;
        turns.push(PlayedTurn {
            color,
            mv: d.mv,
            dda: d.dda,
        });
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesGame {
    /// Whether agent A moved first.
    pub a_first: bool,
    pub log: GameLog,
}

impl SeriesGame {
    /// Score of agent A: 1, 0.5 or 0.
    pub fn score_a(&self) -> f64 {
        let a = if self.a_first {
            Color::First
        } else {
            Color::Second
        };
        match self.log.outcome {
            Outcome::Win(c) if c == a => 1.0,
            Outcome::Win(_) => 0.0,
            Outcome::Draw => 0.5,
        }
    }
}

/// Results from agent A's point of view.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MatchResult {
    pub wins: u32,
    pub losses: u32,
    pub draws: u32,
    pub games: Vec<SeriesGame>,
}

impl MatchResult {
    pub fn played(&self) -> u32 {
        self.wins + self.losses + self.draws
    }

    fn rate(&self, n: u32) -> f64 {
        if self.played() == 0 {
            0.0
        } else {
            n as f64 / self.played() as f64
        }
    }

    pub fn win_rate(&self) -> f64 {
        self.rate(self.wins)
    }

    pub fn loss_rate(&self) -> f64 {
        self.rate(self.losses)
    }

    pub fn draw_rate(&self) -> f64 {
        self.rate(self.draws)
    }

    /// `|win_rate - loss_rate|`, the balance objective.
    pub fn imbalance(&self) -> f64 {
        (self.win_rate() - self.loss_rate()).abs()
    }

    fn record(&mut self, game: SeriesGame) {
        match game.score_a() {
            1.0 => self.wins += 1,
            0.0 => self.losses += 1,
            _ => self.draws += 1,
        }
        self.games.push(game);
    }
}

fn series(
    a: &mut dyn Agent,
    b: &mut dyn Agent,
    variant: GameVariant,
    n_games: u32,
    seed: u64,
    stream_base: u64,
) -> Result<MatchResult, ArenaError> {
    if !n_games.is_multiple_of(2) {
        return Err(ArenaError::OddGameCount(n_games));
    }
    let mut result = MatchResult::default();
    for i in 0..n_games {
        let a_first = i % 2 == 0;
        let mut rng = game_rng(seed, stream_base + i as u64);
        let log = if a_first {
            play_game(a, b, variant, &mut rng)?
        } else {
            play_game(b, a, variant, &mut rng)?
        };
        result.record(SeriesGame { a_first, log });
    }
    Ok(result)
}

/// Plays `n_games` (even) games, alternating who moves first.
pub fn match_series(
    a: &AgentSpec,
    b: &AgentSpec,
    variant: GameVariant,
    n_games: u32,
    seed: u64,
) -> Result<MatchResult, ArenaError> {
    series(&mut a.build(), &mut b.build(), variant, n_games, seed, 0)
}

/// [`match_series`] for arbitrary agents.
pub fn match_series_with(
    a: &mut dyn Agent,
    b: &mut dyn Agent,
    variant: GameVariant,
    n_games: u32,
    seed: u64,
) -> Result<MatchResult, ArenaError> {
    series(a, b, variant, n_games, seed, 0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundRobinGame {
    pub round: u32,
    pub first: usize,
    pub second: usize,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundRobin {
    pub table: EloTable,
    pub games: Vec<RoundRobinGame>,
}

/// Every round plays each ordered pair once; Elo is updated after every game.
pub fn round_robin(
    agents: &[AgentSpec],
    variant: GameVariant,
    n_rounds: u32,
    seed: u64,
) -> Result<RoundRobin, ArenaError> {
    if agents.len() < 2 {
        return Err(ArenaError::TooFewAgents(agents.len()));
    }
    let mut players: Vec<_> = agents.iter().map(AgentSpec::build).collect();
    let mut table = EloTable::new(agents.iter().map(AgentSpec::label).collect());
    let mut games = Vec::new();
    let mut index = 0u64;
    for round in 0..n_rounds {
        for i in 0..players.len() {
            for j in 0..players.len() {
                if i == j {
                    continue;
                }
                let mut rng = game_rng(seed, index);
                index += 1;
                let (lo, hi) = players.split_at_mut(i.max(j));
                let (pi, pj) = if i < j {
                    (&mut lo[i], &mut hi[0])
                } else {
                    (&mut hi[0], &mut lo[j])
                };
                let log = play_game(pi, pj, variant, &mut rng)?;
                let score = match log.outcome {
                    Outcome::Win(Color::First) => 1.0,
                    Outcome::Win(Color::Second) => 0.0,
                    Outcome::Draw => 0.5,
                };
                table.record_game(i, j, score);
                games.push(RoundRobinGame {
                    round,
                    first: i,
                    second: j,
                    outcome: log.outcome,
                });
            }
        }
    }
    Ok(RoundRobin { table, games })
}

/// Rating against opponents whose ratings stay fixed.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedRating {
    pub rating: f64,
    /// Per-opponent results, from the subject's point of view.
    pub results: Vec<MatchResult>,
}

const FIXED_RATING_TOL: f64 = 0.01;
const FIXED_RATING_MAX_PASSES: usize = 200;

/// Rating implied by a sequence of `(opponent_rating, score)` games.
///
/// Starting from 1500, the games are replayed with per-game updates until a
/// full pass moves the rating by less than 0.01 (at most 200 passes).
pub fn rating_from_scores(games: &[(f64, f64)], k: f64) -> f64 {
    let mut r = ELO_INITIAL;
    for _ in 0..FIXED_RATING_MAX_PASSES {
        let before = r;
        for &(opp, s) in games {
            r = elo_update(r, s, 1, elo_expected(r, opp), k);
        }
        if (r - before).abs() < FIXED_RATING_TOL {
            break;
        }
    }
    r
}

/// Plays `n_games` against each frozen opponent and rates the subject.
pub fn fixed_opponent_rating(
    subject: &AgentSpec,
    opponents: &[(AgentSpec, f64)],
    variant: GameVariant,
    n_games: u32,
    seed: u64,
) -> Result<FixedRating, ArenaError> {
    let mut me = subject.build();
    let mut results = Vec::with_capacity(opponents.len());
    let mut scores = Vec::new();
    for (k, (spec, rating)) in opponents.iter().enumerate() {
        let r = series(
            &mut me,
            &mut spec.build(),
            variant,
            n_games,
            seed,
            (k as u64) << 32,
        )?;
        scores.extend(r.games.iter().map(|g| (*rating, g.score_a())));
        results.push(r);
    }
    Ok(FixedRating {
        rating: rating_from_scores(&scores, ELO_K),
        results,
    })
}

/// Win/loss/draw counts against one opponent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpponentRecord {
    pub opponent: String,
    pub wins: u32,
    pub losses: u32,
    pub draws: u32,
}

impl OpponentRecord {
    pub fn from_result(opponent: String, r: &MatchResult) -> Self {
        Self {
            opponent,
            wins: r.wins,
            losses: r.losses,
            draws: r.draws,
        }
    }

    pub fn imbalance(&self) -> f64 {
        let n = self.wins + self.losses + self.draws;
        if n == 0 {
            0.0
        } else {
            (self.wins as f64 - self.losses as f64).abs() / n as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridCell<P> {
    pub params: P,
    pub records: Vec<OpponentRecord>,
    /// Sum over opponents of `|win_rate - loss_rate|`.
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSearch<P> {
    pub best: usize,
    pub cells: Vec<GridCell<P>>,
}

impl<P> GridSearch<P> {
    pub fn best_cell(&self) -> &GridCell<P> {
        &self.cells[self.best]
    }
}

/// Sum of per-opponent imbalances.
pub fn grid_objective(records: &[OpponentRecord]) -> f64 {
    records.iter().map(OpponentRecord::imbalance).sum()
}

/// Evaluates every cell with `play_cell` and keeps the first one with the
/// smallest objective.
pub fn grid_search_by<P: Clone, E: From<ArenaError>>(
    grid: &[P],
    mut play_cell: impl FnMut(&P) -> Result<Vec<OpponentRecord>, E>,
) -> Result<GridSearch<P>, E> {
    if grid.is_empty() {
        return Err(ArenaError::EmptyGrid.into());
    }
    let mut cells = Vec::with_capacity(grid.len());
    let mut best = 0;
    for params in grid {
        let records = play_cell(params)?;
        let objective = grid_objective(&records);
        if objective
            < cells
                .get(best)
                .map_or(f64::INFINITY, |c: &GridCell<P>| c.objective)
        {
            best = cells.len();
        }
        cells.push(GridCell {
            params: params.clone(),
            records,
            objective,
        });
    }
    Ok(GridSearch { best, cells })
}

/// Grid search over DDA parameter sets against fixed opponents.
pub fn grid_search(
    variant: GameVariant,
    grid: &[DdaStrategy],
    evaluator: &EvaluatorSpec,
    search: SearchParams,
    opponents: &[AgentSpec],
    n_games: u32,
    seed: u64,
) -> Result<GridSearch<DdaStrategy>, ArenaError> {
    grid_search_by(grid, |strategy| {
        let subject = AgentSpec::Dda {
            evaluator: evaluator.clone(),
            strategy: *strategy,
            search,
        };
        opponents
            .iter()
            .enumerate()
            .map(|(k, opp)| {
                let r = series(
                    &mut subject.build(),
                    &mut opp.build(),
                    variant,
                    n_games,
                    seed,
                    (k as u64) << 32,
                )?;
                Ok(OpponentRecord::from_result(opp.label(), &r))
            })
            .collect()
    })
}

/// Ratings of an AlphaZero subject for several simulation counts.
pub fn sweep_n_sim(
    evaluator: &EvaluatorSpec,
    base: SearchParams,
    n_sims: &[u32],
    opponents: &[(AgentSpec, f64)],
    variant: GameVariant,
    n_games: u32,
    seed: u64,
) -> Result<Vec<(u32, FixedRating)>, ArenaError> {
    n_sims
        .iter()
        .map(|&n| {
            let subject = AgentSpec::alphazero(evaluator.clone(), base.with_sims(n));
            Ok((
                n,
                fixed_opponent_rating(&subject, opponents, variant, n_games, seed)?,
            ))
        })
        .collect()
}

/// Results of an AlphaZero subject for several inference dropout rates.
pub fn sweep_dropout(
    evaluator: &EvaluatorSpec,
    base: SearchParams,
    p_drops: &[f32],
    opponent: &AgentSpec,
    variant: GameVariant,
    n_games: u32,
    seed: u64,
) -> Result<Vec<(f32, MatchResult)>, ArenaError> {
    p_drops
        .iter()
        .map(|&p| {
            let subject =
                AgentSpec::alphazero(evaluator.clone(), SearchParams { dropout: p, ..base });
            Ok((p, match_series(&subject, opponent, variant, n_games, seed)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arena::agent::AgentKind;
    use alloc::vec;

    fn random() -> AgentSpec {
        AgentSpec::Random
    }

    #[test]
    fn random_series_bookkeeping() {
        let r = match_series(&random(), &random(), GameVariant::Connect4, 100, 1).unwrap();
        assert_eq!(r.played(), 100);
        assert_eq!(r.games.iter().filter(|g| g.a_first).count(), 50);
        for g in &r.games {
            assert_eq!(g.log.replay().unwrap().outcome(), Some(g.log.outcome));
        }
        let again = match_series(&random(), &random(), GameVariant::Connect4, 100, 1).unwrap();
        assert_eq!(r, again);
    }

    #[test]
    fn odd_series_is_rejected() {
        assert_eq!(
            match_series(&random(), &random(), GameVariant::Connect4, 3, 1),
            Err(ArenaError::OddGameCount(3))
        );
    }

    #[test]
    fn round_robin_conserves_rating_mass() {
        let agents = [
            random(),
            random(),
            AgentSpec::preset(
                AgentKind::Minimax,
                GameVariant::Connect4,
                EvaluatorSpec::Heuristic,
            ),
        ];
        let rr = round_robin(&agents, GameVariant::Connect4, 2, 4).unwrap();
        assert_eq!(rr.games.len(), 2 * 6);
        let sum: f64 = rr.table.ratings().iter().sum();
        assert!((sum - 4500.0).abs() < 1e-9);
        assert!(matches!(
            round_robin(&agents[..1], GameVariant::Connect4, 1, 0),
            Err(ArenaError::TooFewAgents(1))
        ));
    }

    #[test]
    fn losing_subject_rates_below_everyone() {
        let games = vec![(1400.0, 0.0), (1600.0, 0.0), (1450.0, 0.0)];
        let r = rating_from_scores(&games, ELO_K);
        assert!(r < 1400.0);
        let even = vec![(1500.0, 1.0), (1500.0, 0.0)];
        // per-game updates leave an order bias below K
        assert!((rating_from_scores(&even, ELO_K) - 1500.0).abs() < ELO_K);
    }

    #[test]
    fn grid_prefers_exact_balance() {
        let draws = |n: u32| OpponentRecord {
            opponent: "scripted".into(),
            wins: 0,
            losses: 0,
            draws: n,
        };
        let result = grid_search_by::<u32, ArenaError>(&[3, 7, 9], |&p| {
            Ok(vec![if p == 7 {
                draws(10)
            } else {
                OpponentRecord {
                    opponent: "scripted".into(),
                    wins: p,
                    losses: 0,
                    draws: 10 - p.min(10),
                }
            }])
        })
        .unwrap();
        assert_eq!(result.best_cell().params, 7);
        assert_eq!(result.best_cell().objective, 0.0);
        for c in &result.cells {
            assert_eq!(c.objective, grid_objective(&c.records));
        }
        let single = grid_search_by::<u32, ArenaError>(&[5], |_| Ok(vec![])).unwrap();
        assert_eq!(single.best, 0);
        assert_eq!(
            grid_search_by::<u32, ArenaError>(&[], |_| Ok(vec![])),
            Err(ArenaError::EmptyGrid)
        );
    }
}
