//! Run configuration documents (TOML).
//!
//! Every table rejects unknown keys. Absent values fall back to the selected
//! preset: `paper` reproduces the published parameter tables, `desk` shrinks
//! the network and the game counts so a run fits on a laptop CPU.

use std::path::{Path, PathBuf};

use alphadda_core::arena::{AgentKind, AgentSpec, EvaluatorSpec};
use alphadda_core::dda::{Dda1Params, Dda2Params, Dda3Params, DdaStrategy};
use alphadda_core::eval::{NetworkConfig, TrainConfig};
use alphadda_core::search::SearchParams;
use alphadda_core::GameVariant;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid config {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("`{key}`: {message}")]
    Invalid { key: String, message: String },
}

impl ConfigError {
    fn invalid(key: impl Into<String>, message: impl Into<String>) -> Self {
        Self::Invalid {
            key: key.into(),
            message: message.into(),
        }
    }
}

/// (De)serializes a value through its `Display`/`FromStr` pair.
pub(crate) mod as_str {
    use std::fmt::Display;
    use std::str::FromStr;

    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<T: Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, T, D>(d: D) -> Result<T, D::Error>
    where
        T: FromStr,
        T::Err: Display,
        D: Deserializer<'de>,
    {
        String::deserialize(d)?.parse().map_err(de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Paper,
    #[default]
    Desk,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Self::Paper => "paper",
            Self::Desk => "desk",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(with = "as_str", default = "default_variant")]
    pub variant: GameVariant,
    #[serde(default)]
    pub preset: Preset,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    #[serde(default)]
    pub network: NetworkOverrides,
    #[serde(default)]
    pub train: TrainOverrides,
    #[serde(default)]
    pub agents: Vec<AgentConfig>,
    #[serde(default, rename = "match")]
    pub match_: MatchSection,
    #[serde(default)]
    pub elo: EloSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gridsearch: Option<GridSection>,
}

fn default_variant() -> GameVariant {
    GameVariant::Connect4
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            variant: default_variant(),
            preset: Preset::default(),
            seed: 0,
            out: default_out(),
            network: NetworkOverrides::default(),
            train: TrainOverrides::default(),
            agents: Vec::new(),
            match_: MatchSection::default(),
            elo: EloSection::default(),
            sweep: None,
            gridsearch: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkOverrides {
    pub history: Option<usize>,
    pub residual_blocks: Option<usize>,
    pub filters: Option<usize>,
    pub kernel_size: Option<usize>,
    pub value_hidden: Option<usize>,
    pub policy_hidden: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainOverrides {
    pub n_iter: Option<u32>,
    pub n_self: Option<u32>,
    pub n_sim: Option<u32>,
    pub c_puct: Option<f64>,
    pub t_opening: Option<u32>,
    pub tau: Option<f32>,
    pub epsilon_noise: Option<f64>,
    pub dirichlet_alpha: Option<f64>,
    pub n_queue: Option<usize>,
    pub n_epoch: Option<u32>,
    pub n_batch: Option<usize>,
    pub learning_rate: Option<f32>,
    pub momentum: Option<f32>,
    pub weight_decay: Option<f32>,
}

/// One player. Only the overrides that apply to `kind` are accepted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentConfig {
    #[serde(with = "as_str")]
    pub kind: AgentKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// Network weights; omitted means the heuristic evaluator.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checkpoint: Option<PathBuf>,
    /// Frozen rating when used as a sweep opponent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rating: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_sim: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_puct: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_drop: Option<f32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_h: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_sim: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_sim0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_drop: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_drop0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_explore: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatchSection {
    /// Games per opponent; must be even.
    pub games: Option<u32>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EloSection {
    pub rounds: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    NSim,
    PDrop,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            Self::NSim => "n_sim",
            Self::PDrop => "p_drop",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub param: SweepParam,
    pub values: Vec<f64>,
    /// Games per opponent and value; must be even.
    pub games: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    #[serde(with = "as_str")]
    pub kind: AgentKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checkpoint: Option<PathBuf>,
    #[serde(default)]
    pub n_h: Vec<usize>,
    #[serde(default)]
    pub a_sim: Vec<f64>,
    #[serde(default)]
    pub b_sim0: Vec<f64>,
    #[serde(default)]
    pub n_max: Vec<u32>,
    #[serde(default)]
    pub a_drop: Vec<f64>,
    #[serde(default)]
    pub p_drop0: Vec<f64>,
    #[serde(default)]
    pub p_max: Vec<f64>,
    #[serde(default)]
    pub c_explore: Vec<f64>,
    pub games: Option<u32>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_owned(),
            source,
        })?;
        Self::parse(&text).map_err(|e| match e {
            ConfigError::Parse { message, .. } => ConfigError::Parse {
                path: path.to_owned(),
                message,
            },
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let config: Self = toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: PathBuf::from("<inline>"),
            message: e.to_string(),
        })?;
        config.validate()?;
        Ok(config)
    }

    /// Checks cross-field constraints that the schema cannot express.
    pub fn validate(&self) -> Result<(), ConfigError> {
        for (i, agent) in self.agents.iter().enumerate() {
            agent
                .to_spec(self.variant, EvaluatorSpec::Heuristic)
                .map_err(|e| match e {
                    ConfigError::Invalid { key, message } => {
                        ConfigError::invalid(format!("agents[{i}].{key}"), message)
                    }
                    other => other,
                })?;
        }
        let even = |key: &str, n: Option<u32>| match n {
            Some(n) if n == 0 || n % 2 == 1 => {
                Err(ConfigError::invalid(key, "must be even and positive"))
            }
            _ => Ok(()),
        };
        even("match.games", self.match_.games)?;
        if let Some(s) = &self.sweep {
            even("sweep.games", s.games)?;
            if s.values.is_empty() {
                return Err(ConfigError::invalid("sweep.values", "must not be empty"));
            }
        }
        if let Some(g) = &self.gridsearch {
            even("gridsearch.games", g.games)?;
            if !matches!(g.kind, AgentKind::Dda1 | AgentKind::Dda2 | AgentKind::Dda3) {
                return Err(ConfigError::invalid(
                    "gridsearch.kind",
                    "must be a DDA agent",
                ));
            }
            g.strategies(self.variant)?;
        }
        Ok(())
    }

    pub fn network_config(&self) -> NetworkConfig {
        let base = match self.preset {
            Preset::Paper => NetworkConfig::paper(self.variant),
            Preset::Desk => NetworkConfig::desk(self.variant),
        };
        let o = &self.network;
        NetworkConfig {
            variant: self.variant,
            history: o.history.unwrap_or(base.history),
            residual_blocks: o.residual_blocks.unwrap_or(base.residual_blocks),
            filters: o.filters.unwrap_or(base.filters),
            kernel_size: o.kernel_size.unwrap_or(base.kernel_size),
            value_hidden: o.value_hidden.unwrap_or(base.value_hidden),
            policy_hidden: o.policy_hidden.unwrap_or(base.policy_hidden),
        }
    }

    pub fn train_config(&self) -> TrainConfig {
        let b = match self.preset {
            Preset::Paper => TrainConfig::paper(self.variant),
            Preset::Desk => TrainConfig::desk(self.variant),
        };
        let o = &self.train;
        TrainConfig {
            variant: self.variant,
            n_iter: o.n_iter.unwrap_or(b.n_iter),
            n_self: o.n_self.unwrap_or(b.n_self),
            n_sim: o.n_sim.unwrap_or(b.n_sim),
            c_puct: o.c_puct.unwrap_or(b.c_puct),
            t_opening: o.t_opening.unwrap_or(b.t_opening),
            tau: o.tau.unwrap_or(b.tau),
            epsilon_noise: o.epsilon_noise.unwrap_or(b.epsilon_noise),
            dirichlet_alpha: o.dirichlet_alpha.unwrap_or(b.dirichlet_alpha),
            n_queue: o.n_queue.unwrap_or(b.n_queue),
            n_epoch: o.n_epoch.unwrap_or(b.n_epoch),
            n_batch: o.n_batch.unwrap_or(b.n_batch),
            learning_rate: o.learning_rate.unwrap_or(b.learning_rate),
            momentum: o.momentum.unwrap_or(b.momentum),
            weight_decay: o.weight_decay.unwrap_or(b.weight_decay),
        }
    }

    fn by_preset(&self, paper: u32, desk: u32) -> u32 {
        match self.preset {
            Preset::Paper => paper,
            Preset::Desk => desk,
        }
    }

    pub fn match_games(&self) -> u32 {
        self.match_.games.unwrap_or(self.by_preset(40, 10))
    }

    pub fn elo_rounds(&self) -> u32 {
        self.elo.rounds.unwrap_or(self.by_preset(50, 5))
    }

    pub fn sweep_games(&self) -> u32 {
        self.sweep
            .as_ref()
            .and_then(|s| s.games)
            .unwrap_or(self.by_preset(50, 10))
    }

    pub fn grid_games(&self) -> u32 {
        self.gridsearch
            .as_ref()
            .and_then(|g| g.games)
            .unwrap_or(self.by_preset(40, 10))
    }
}

impl AgentConfig {
    pub fn new(kind: AgentKind) -> Self {
        Self {
            kind,
            name: None,
            checkpoint: None,
            rating: None,
            n_sim: None,
            c_puct: None,
            p_drop: None,
            depth: None,
            n_h: None,
            a_sim: None,
            b_sim0: None,
            n_max: None,
            a_drop: None,
            p_drop0: None,
            p_max: None,
            c_explore: None,
        }
    }

    /// Display name: `name` if given, otherwise the agent label.
    pub fn label(&self, variant: GameVariant) -> String {
        match &self.name {
            Some(n) => n.clone(),
            None => self
                .to_spec(variant, EvaluatorSpec::Heuristic)
                .map(|s| s.label())
                .unwrap_or_else(|_| self.kind.name().to_owned()),
        }
    }

    fn present(&self) -> Vec<&'static str> {
        let mut keys = Vec::new();
        let mut add = |k, set: bool| {
            if set {
                keys.push(k)
            }
        };
        add("checkpoint", self.checkpoint.is_some());
        add("n_sim", self.n_sim.is_some());
        add("c_puct", self.c_puct.is_some());
        add("p_drop", self.p_drop.is_some());
        add("depth", self.depth.is_some());
        add("n_h", self.n_h.is_some());
        add("a_sim", self.a_sim.is_some());
        add("b_sim0", self.b_sim0.is_some());
        add("n_max", self.n_max.is_some());
        add("a_drop", self.a_drop.is_some());
        add("p_drop0", self.p_drop0.is_some());
        add("p_max", self.p_max.is_some());
        add("c_explore", self.c_explore.is_some());
        keys
    }

    /// Keys accepted for this agent's kind.
    pub fn allowed_params(&self) -> &'static [&'static str] {
        match self.kind {
            AgentKind::AlphaZero => &["checkpoint", "n_sim", "c_puct", "p_drop"],
            AgentKind::Dda1 => &["checkpoint", "c_puct", "n_h", "a_sim", "b_sim0", "n_max"],
            AgentKind::Dda2 => &[
                "checkpoint",
                "n_sim",
                "c_puct",
                "n_h",
                "a_drop",
                "p_drop0",
                "p_max",
            ],
            AgentKind::Dda3 => &["checkpoint", "n_sim", "n_h", "c_explore"],
            AgentKind::Mcts1 | AgentKind::Mcts2 => &["n_sim"],
            AgentKind::Minimax => &["depth"],
            AgentKind::Random => &[],
        }
    }

    /// Builds the agent, with `evaluator` backing network-guided kinds.
    pub fn to_spec(
        &self,
        variant: GameVariant,
        evaluator: EvaluatorSpec,
    ) -> Result<AgentSpec, ConfigError> {
        if let Some(key) = self
            .present()
            .into_iter()
            .find(|k| !self.allowed_params().contains(k))
        {
            return Err(ConfigError::invalid(
                key,
                format!("does not apply to {}", self.kind.name()),
            ));
        }
        if let Some(p) = self.p_drop {
            if !(0.0..=alphadda_core::eval::MAX_DROPOUT).contains(&p) {
                return Err(ConfigError::invalid("p_drop", "must lie in [0, 0.95]"));
            }
        }
        if self.n_sim == Some(0) {
            return Err(ConfigError::invalid("n_sim", "must be positive"));
        }
        let mut spec = AgentSpec::preset(self.kind, variant, evaluator);
        match &mut spec {
            AgentSpec::AlphaZero { search, .. } => self.apply_search(search),
            AgentSpec::Dda {
                strategy, search, ..
            } => {
                self.apply_search(search);
                self.apply_strategy(strategy);
            }
            AgentSpec::Mcts(p) => {
                if let Some(n) = self.n_sim {
                    p.n_sim = n;
                }
            }
            AgentSpec::Minimax(p) => {
                if let Some(d) = self.depth {
                    p.depth = d;
                }
            }
            AgentSpec::Random => {}
        }
        Ok(spec)
    }

    fn apply_search(&self, s: &mut SearchParams) {
        if let Some(n) = self.n_sim {
            s.n_sim = n;
        }
        if let Some(c) = self.c_puct {
            s.c_puct = c;
        }
        if let Some(p) = self.p_drop {
            s.dropout = p;
        }
    }

    fn apply_strategy(&self, strategy: &mut DdaStrategy) {
        match strategy {
            DdaStrategy::Simulations(p) => {
                set(&mut p.n_h, self.n_h);
                set(&mut p.a_sim, self.a_sim);
                set(&mut p.b_sim0, self.b_sim0);
                set(&mut p.n_max, self.n_max);
            }
            DdaStrategy::Dropout(p) => {
                set(&mut p.n_h, self.n_h);
                set(&mut p.a_drop, self.a_drop);
                set(&mut p.p_drop0, self.p_drop0);
                set(&mut p.p_max, self.p_max);
            }
            DdaStrategy::ValueMatching(p) => {
                set(&mut p.n_h, self.n_h);
                set(&mut p.c_explore, self.c_explore);
            }
        }
    }
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

/// Values for one grid axis; an empty list keeps the preset value.
fn axis<T: Copy>(values: &[T], default: T) -> Vec<T> {
    if values.is_empty() {
        vec![default]
    } else {
        values.to_vec()
    }
}

impl GridSection {
    /// Cartesian product of the listed parameter values, in row-major order.
    pub fn strategies(&self, variant: GameVariant) -> Result<Vec<DdaStrategy>, ConfigError> {
        let reject = |key: &str, set: bool| {
            if set {
                Err(ConfigError::invalid(
                    format!("gridsearch.{key}"),
                    format!("does not apply to {}", self.kind.name()),
                ))
            } else {
                Ok(())
            }
        };
        let dda1 = [
            !self.a_sim.is_empty(),
            !self.b_sim0.is_empty(),
            !self.n_max.is_empty(),
        ];
        let dda2 = [
            !self.a_drop.is_empty(),
            !self.p_drop0.is_empty(),
            !self.p_max.is_empty(),
        ];
        let names1 = ["a_sim", "b_sim0", "n_max"];
        let names2 = ["a_drop", "p_drop0", "p_max"];
        let foreign: Vec<(&str, bool)> = match self.kind {
            AgentKind::Dda1 => names2
                .into_iter()
                .zip(dda2)
                .chain([("c_explore", !self.c_explore.is_empty())])
                .collect(),
            AgentKind::Dda2 => names1
                .into_iter()
                .zip(dda1)
                .chain([("c_explore", !self.c_explore.is_empty())])
                .collect(),
            _ => names1
                .into_iter()
                .zip(dda1)
                .chain(names2.into_iter().zip(dda2))
                .collect(),
        };
        for (key, set) in foreign {
            reject(key, set)?;
        }
        let mut out = Vec::new();
        match self.kind {
            AgentKind::Dda1 => {
                let d = Dda1Params::for_variant(variant);
                for n_h in axis(&self.n_h, d.n_h) {
                    for a_sim in axis(&self.a_sim, d.a_sim) {
                        for b_sim0 in axis(&self.b_sim0, d.b_sim0) {
                            for n_max in axis(&self.n_max, d.n_max) {
                                out.push(DdaStrategy::Simulations(Dda1Params {
                                    n_h,
                                    a_sim,
                                    b_sim0,
                                    n_max,
                                }));
                            }
                        }
                    }
                }
            }
            AgentKind::Dda2 => {
                let d = Dda2Params::for_variant(variant);
                for n_h in axis(&self.n_h, d.n_h) {
                    for a_drop in axis(&self.a_drop, d.a_drop) {
                        for p_drop0 in axis(&self.p_drop0, d.p_drop0) {
                            for p_max in axis(&self.p_max, d.p_max) {
                                out.push(DdaStrategy::Dropout(Dda2Params {
                                    n_h,
                                    a_drop,
                                    p_drop0,
                                    p_max,
                                }));
                            }
                        }
                    }
                }
            }
            AgentKind::Dda3 => {
                let d = Dda3Params::for_variant(variant);
                for n_h in axis(&self.n_h, d.n_h) {
                    for c_explore in axis(&self.c_explore, d.c_explore) {
                        out.push(DdaStrategy::ValueMatching(Dda3Params { n_h, c_explore }));
                    }
                }
            }
            _ => {
                return Err(ConfigError::invalid(
                    "gridsearch.kind",
                    "must be a DDA agent",
                ))
            }
        }
        Ok(out)
    }

    /// Search settings shared by every cell.
    pub fn search(&self, variant: GameVariant) -> SearchParams {
        match AgentSpec::preset(self.kind, variant, EvaluatorSpec::Heuristic) {
            AgentSpec::Dda { search, .. } => search,
            _ => SearchParams::for_variant(variant),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_follow_preset() {
        let c = RunConfig::parse("").unwrap();
        assert_eq!(c.variant, GameVariant::Connect4);
        assert_eq!(c.preset, Preset::Desk);
        assert_eq!(c.train_config(), TrainConfig::desk(GameVariant::Connect4));
        let p = RunConfig::parse("preset = \"paper\"\nvariant = \"othello8\"").unwrap();
        assert_eq!(p.train_config(), TrainConfig::paper(GameVariant::Othello8));
        assert_eq!(
            p.network_config(),
            NetworkConfig::paper(GameVariant::Othello8)
        );
        assert_eq!((p.match_games(), p.elo_rounds()), (40, 50));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let e = RunConfig::parse("sed = 3").unwrap_err().to_string();
        assert!(e.contains("sed"), "{e}");
        let e = RunConfig::parse("[train]\nn_iters = 3")
            .unwrap_err()
            .to_string();
        assert!(e.contains("n_iters"), "{e}");
    }

    #[test]
    fn bad_variant_names_the_key() {
        let e = RunConfig::parse("variant = \"chess\"")
            .unwrap_err()
            .to_string();
        assert!(e.contains("variant") && e.contains("chess"), "{e}");
    }

    #[test]
    fn agent_overrides_are_checked_per_kind() {
        let ok =
            "[[agents]]\nkind = \"DDA1\"\nn_max = 40\n[[agents]]\nkind = \"MCTS1\"\nn_sim = 50";
        let c = RunConfig::parse(ok).unwrap();
        let AgentSpec::Mcts(p) = c.agents[1]
            .to_spec(c.variant, EvaluatorSpec::Heuristic)
            .unwrap()
        else {
            panic!()
        };
        assert_eq!(p.n_sim, 50);
        let e = RunConfig::parse("[[agents]]\nkind = \"Random\"\ndepth = 2")
            .unwrap_err()
            .to_string();
        assert!(e.contains("agents[0].depth"), "{e}");
        let e = RunConfig::parse("[[agents]]\nkind = \"Chess\"")
            .unwrap_err()
            .to_string();
        assert!(e.contains("Chess"), "{e}");
    }

    #[test]
    fn odd_game_counts_are_rejected() {
        let e = RunConfig::parse("[match]\ngames = 3")
            .unwrap_err()
            .to_string();
        assert!(e.contains("match.games"), "{e}");
    }

    #[test]
    fn grid_is_a_cartesian_product() {
        let c = RunConfig::parse(
            "[gridsearch]\nkind = \"DDA1\"\nn_h = [2, 3]\na_sim = [100.0, 200.0, 300.0]",
        )
        .unwrap();
        let g = c
            .gridsearch
            .as_ref()
            .unwrap()
            .strategies(c.variant)
            .unwrap();
        assert_eq!(g.len(), 6);
        let e = RunConfig::parse("[gridsearch]\nkind = \"DDA3\"\np_max = [0.5]")
            .unwrap_err()
            .to_string();
        assert!(e.contains("gridsearch.p_max"), "{e}");
    }

    #[test]
    fn config_round_trips_through_toml() {
        let c = RunConfig::parse("seed = 9\n[[agents]]\nkind = \"DDA2\"\na_drop = 0.5").unwrap();
        let text = toml::to_string(&c).unwrap();
        assert_eq!(RunConfig::parse(&text).unwrap(), c);
    }
}
