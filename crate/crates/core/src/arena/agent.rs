use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use core::fmt;
use core::str::FromStr;

use rand::RngCore;

use crate::dda::{dda_decide_move, DdaDiagnostics, DdaKind, DdaStrategy, ValueHistory};
use crate::eval::{EvalResult, Evaluator, HeuristicEvaluator, PolicyValueNet};
use crate::game::{BoardState, Color, GameError, GameVariant, Move};
use crate::search::{
    decide_move_alphazero, decide_move_random, decide_move_vanilla_mcts, minimax_decide,
    MinimaxParams, MoveSelection, SearchError, SearchParams, UctParams,
};

/// Evaluator backing the network-guided agents.
#[derive(Clone)]
pub enum EvaluatorSpec {
    Heuristic,
    Network(Arc<PolicyValueNet<f32>>),
}

impl fmt::Debug for EvaluatorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Heuristic => f.write_str("Heuristic"),
            Self::Network(net) => write!(f, "Network({} params)", net.parameter_count()),
        }
    }
}

impl Evaluator for EvaluatorSpec {
    fn evaluate(&self, state: &BoardState, p_drop: f32, rng: &mut dyn RngCore) -> EvalResult {
        match self {
            Self::Heuristic => HeuristicEvaluator.evaluate(state, p_drop, rng),
            Self::Network(net) => net.evaluate(state, p_drop, rng),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AgentKind {
    AlphaZero,
    Dda1,
    Dda2,
    Dda3,
    Mcts1,
    Mcts2,
    Minimax,
    Random,
}

impl AgentKind {
    pub const ALL: [AgentKind; 8] = [
        Self::AlphaZero,
        Self::Dda1,
        Self::Dda2,
        Self::Dda3,
        Self::Mcts1,
        Self::Mcts2,
        Self::Minimax,
        Self::Random,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::AlphaZero => "AlphaZero",
            Self::Dda1 => "AlphaDDA1",
            Self::Dda2 => "AlphaDDA2",
            Self::Dda3 => "AlphaDDA3",
            Self::Mcts1 => "MCTS1",
            Self::Mcts2 => "MCTS2",
            Self::Minimax => "Minimax",
            Self::Random => "Random",
        }
    }

    /// Whether the agent needs an evaluator.
    pub fn uses_evaluator(self) -> bool {
        matches!(self, Self::AlphaZero | Self::Dda1 | Self::Dda2 | Self::Dda3)
    }
}

impl fmt::Display for AgentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AgentKind {
    type Err = GameError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.to_ascii_lowercase();
        Ok(match lower.as_str() {
            "alphazero" => Self::AlphaZero,
            "alphadda1" | "dda1" => Self::Dda1,
            "alphadda2" | "dda2" => Self::Dda2,
            "alphadda3" | "dda3" => Self::Dda3,
            "mcts1" => Self::Mcts1,
            "mcts2" => Self::Mcts2,
            "minimax" => Self::Minimax,
            "random" => Self::Random,
            _ => return Err(GameError::Parse(format!("unknown agent kind `{s}`"))),
        })
    }
}

/// Complete, cloneable description of an agent.
#[derive(Debug, Clone)]
pub enum AgentSpec {
    AlphaZero {
        evaluator: EvaluatorSpec,
        search: SearchParams,
    },
    Dda {
        evaluator: EvaluatorSpec,
        strategy: DdaStrategy,
        search: SearchParams,
    },
    Mcts(UctParams),
    Minimax(MinimaxParams),
    Random,
}

impl AgentSpec {
    /// Default settings for `kind`. Evaluation-free kinds ignore `evaluator`.
    pub fn preset(kind: AgentKind, variant: GameVariant, evaluator: EvaluatorSpec) -> Self {
        let search = SearchParams {
            mode: MoveSelection::Argmax,
            ..SearchParams::for_variant(variant)
        };
        let dda = |k| Self::Dda {
            evaluator: evaluator.clone(),
            strategy: DdaStrategy::for_variant(k, variant),
            search,
        };
        match kind {
            AgentKind::AlphaZero => Self::AlphaZero {
                evaluator: evaluator.clone(),
                search,
            },
            AgentKind::Dda1 => dda(DdaKind::Dda1),
            AgentKind::Dda2 => dda(DdaKind::Dda2),
            AgentKind::Dda3 => dda(DdaKind::Dda3),
            AgentKind::Mcts1 => Self::Mcts(UctParams::mcts1()),
            AgentKind::Mcts2 => Self::Mcts(UctParams::mcts2()),
            AgentKind::Minimax => Self::Minimax(MinimaxParams::default()),
            AgentKind::Random => Self::Random,
        }
    }

    pub fn alphazero(evaluator: EvaluatorSpec, search: SearchParams) -> Self {
        Self::AlphaZero { evaluator, search }
    }

    pub fn kind(&self) -> AgentKind {
        match self {
            Self::AlphaZero { .. } => AgentKind::AlphaZero,
            Self::Dda { strategy, .. } => match strategy.kind() {
                DdaKind::Dda1 => AgentKind::Dda1,
                DdaKind::Dda2 => AgentKind::Dda2,
                DdaKind::Dda3 => AgentKind::Dda3,
            },
            Self::Mcts(p) if p.n_sim == UctParams::mcts2().n_sim => AgentKind::Mcts2,
            Self::Mcts(_) => AgentKind::Mcts1,
            Self::Minimax(_) => AgentKind::Minimax,
            Self::Random => AgentKind::Random,
        }
    }

    /// Display name; non-preset simulation counts are appended.
    pub fn label(&self) -> String {
        match self {
            Self::Mcts(p) if p.n_sim != 300 && p.n_sim != 100 => format!("MCTS({})", p.n_sim),
            _ => self.kind().name().to_string(),
        }
    }

    pub fn build(&self) -> SpecAgent {
        SpecAgent {
            spec: self.clone(),
            history: None,
        }
    }
}

/// Output of one decision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decision {
    pub mv: Move,
    pub dda: Option<DdaDiagnostics>,
}

impl From<Move> for Decision {
    fn from(mv: Move) -> Self {
        Self { mv, dda: None }
    }
}

/// A player with per-game state.
pub trait Agent {
    /// Starts a new game in which this agent plays `color`.
    fn reset(&mut self, color: Color);
    fn decide(
        &mut self,
        state: &BoardState,
        rng: &mut dyn RngCore,
    ) -> Result<Decision, SearchError>;
}

/// Agent instantiated from an [`AgentSpec`].
#[derive(Debug, Clone)]
pub struct SpecAgent {
    spec: AgentSpec,
    history: Option<ValueHistory>,
}

impl SpecAgent {
    pub fn spec(&self) -> &AgentSpec {
        &self.spec
    }

    /// Value history of a DDA agent in the current game.
    pub fn history(&self) -> Option<&ValueHistory> {
        self.history.as_ref()
    }

    /// Reinstates a saved value history. No effect on non-DDA agents.
    pub fn restore_history(&mut self, history: ValueHistory) {
        if matches!(self.spec, AgentSpec::Dda { .. }) {
            self.history = Some(history);
        }
    }
}

impl Agent for SpecAgent {
    fn reset(&mut self, color: Color) {
        self.history = matches!(self.spec, AgentSpec::Dda { .. }).then(|| ValueHistory::new(color));
    }

    fn decide(
        &mut self,
        state: &BoardState,
        rng: &mut dyn RngCore,
    ) -> Result<Decision, SearchError> {
        match &self.spec {
            AgentSpec::AlphaZero { evaluator, search } => {
                decide_move_alphazero(state, evaluator, search, rng).map(Decision::from)
            }
            AgentSpec::Dda {
                evaluator,
                strategy,
                search,
            } => {
                let history = self
                    .history
                    .get_or_insert_with(|| ValueHistory::new(state.to_move()));
                let (mv, diag) = dda_decide_move(strategy, state, history, evaluator, search, rng)?;
                Ok(Decision {
                    mv,
                    dda: Some(diag),
                })
            }
            AgentSpec::Mcts(p) => decide_move_vanilla_mcts(state, p, rng).map(Decision::from),
            AgentSpec::Minimax(p) => minimax_decide(state, p, rng).map(Decision::from),
            AgentSpec::Random => decide_move_random(state, rng).map(Decision::from),
        }
    }
}

impl<A: Agent + ?Sized> Agent for &mut A {
    fn reset(&mut self, color: Color) {
        (**self).reset(color)
    }

    fn decide(
        &mut self,
        state: &BoardState,
        rng: &mut dyn RngCore,
    ) -> Result<Decision, SearchError> {
        (**self).decide(state, rng)
    }
}

impl<A: Agent + ?Sized> Agent for alloc::boxed::Box<A> {
    fn reset(&mut self, color: Color) {
        (**self).reset(color)
    }

    fn decide(
        &mut self,
        state: &BoardState,
        rng: &mut dyn RngCore,
    ) -> Result<Decision, SearchError> {
        (**self).decide(state, rng)
    }
}
