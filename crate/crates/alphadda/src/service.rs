//! Human-versus-agent game service.
//!
//! Sessions live in memory. Each one is guarded by its own lock that is
//! never held while an agent searches: the agent is moved out of the
//! session, runs on the blocking pool, and is put back with its move. While
//! it is out the session reports `awaiting_agent` and rejects human moves.
//! After every transition the session is written to the snapshot
//! directory, from which a restarted service resumes.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use alphadda_core::arena::{game_rng, Agent, AgentKind, EvaluatorSpec, SpecAgent};
use alphadda_core::dda::ValueHistory;
use alphadda_core::eval::PolicyValueNet;
use alphadda_core::{BoardState, Cell, Color, GameVariant, Move, Outcome};
use anyhow::Context;
use axum::extract::{Path as UrlPath, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::{as_str, AgentConfig};
use crate::records::{self, DdaBlock, TurnLine};

/// Environment variable holding the listen address.
pub const BIND_ENV: &str = "ALPHADDA_BIND";
pub const DEFAULT_BIND: &str = "127.0.0.1:8080";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Seat {
    First,
    Second,
}

impl Seat {
    fn color(self) -> Color {
        match self {
            Self::First => Color::First,
            Self::Second => Color::Second,
        }
    }

    fn of(c: Color) -> Self {
        match c {
            Color::First => Self::First,
            Color::Second => Self::Second,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    AwaitingHuman,
    AwaitingAgent,
    Finished,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateRequest {
    #[serde(with = "as_str")]
    pub variant: GameVariant,
    pub agent: AgentConfig,
    pub human: Seat,
    /// Wait for the agent's opening move before answering.
    #[serde(default = "yes")]
    pub wait: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MoveRequest {
    #[serde(rename = "move")]
    pub mv: String,
    /// Wait for the agent's reply before answering.
    #[serde(default = "yes")]
    pub wait: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlayedMove {
    pub turn: u32,
    pub seat: Seat,
    pub by: String,
    #[serde(rename = "move")]
    pub mv: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    /// Turn index at which the agent moved.
    pub turn: u32,
    #[serde(flatten)]
    pub dda: DdaBlock,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeView {
    pub c_win: i8,
    /// `human`, `agent` or `draw`.
    pub winner: String,
}

/// Session as sent over the wire.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionView {
    pub id: String,
    #[serde(with = "as_str")]
    pub variant: GameVariant,
    pub human: Seat,
    pub agent: AgentConfig,
    pub agent_label: String,
    pub status: Status,
    pub outcome: Option<OutcomeView>,
    pub to_move: Seat,
    pub turn: u32,
    pub board: String,
    /// Rows top to bottom; 1 first player, -1 second, 0 empty.
    pub grid: Vec<Vec<i8>>,
    /// Empty unless the human is to move.
    pub legal_moves: Vec<String>,
    pub moves: Vec<PlayedMove>,
    /// One entry per agent turn for difficulty-adjusting agents.
    pub diagnostics: Vec<TraceEntry>,
    pub last_agent_move: Option<String>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy)]
struct Turn {
    color: Color,
    mv: Move,
    dda: Option<DdaBlock>,
}

struct Session {
    id: String,
    variant: GameVariant,
    human: Color,
    config: AgentConfig,
    label: String,
    seed: u64,
    /// `None` while the agent is thinking.
    agent: Option<SpecAgent>,
    state: BoardState,
    turns: Vec<Turn>,
    error: Option<String>,
}

impl Session {
    fn status(&self) -> Status {
        if self.state.is_terminal() {
            Status::Finished
        } else if self.state.to_move() == self.human {
            Status::AwaitingHuman
        } else {
            Status::AwaitingAgent
        }
    }

    fn agent_to_move(&self) -> bool {
        self.status() == Status::AwaitingAgent && self.agent.is_some()
    }

    fn view(&self) -> SessionView {
        let status = self.status();
        let v = self.variant;
        let grid = (0..v.rows())
            .map(|r| {
                (0..v.cols())
                    .map(|c| match self.state.cell(r, c) {
                        Cell::Empty => 0,
                        Cell::First => 1,
                        Cell::Second => -1,
                    })
                    .collect()
            })
            .collect();
        let legal_moves = if status == Status::AwaitingHuman {
            legal(&self.state)
        } else {
            Vec::new()
        };
        let outcome = self.state.outcome().map(|o| OutcomeView {
            c_win: o.c_win(),
            winner: match o {
                Outcome::Draw => "draw".into(),
                Outcome::Win(c) if c == self.human => "human".into(),
                Outcome::Win(_) => "agent".into(),
            },
        });
        let moves = self
            .turns
            .iter()
            .zip(0..)
            .map(|(t, turn)| PlayedMove {
                turn,
                seat: Seat::of(t.color),
                by: if t.color == self.human {
                    "human"
                } else {
                    "agent"
                }
                .into(),
                mv: t.mv.to_string(),
            })
            .collect();
        let diagnostics = self
            .turns
            .iter()
            .zip(0..)
            .filter_map(|(t, turn)| t.dda.map(|dda| TraceEntry { turn, dda }))
            .collect();
        SessionView {
            id: self.id.clone(),
            variant: v,
            human: Seat::of(self.human),
            agent: self.config.clone(),
            agent_label: self.label.clone(),
            status,
            outcome,
            to_move: Seat::of(self.state.to_move()),
            turn: self.state.turn_index(),
            board: self.state.to_string(),
            grid,
            legal_moves,
            moves,
            diagnostics,
            last_agent_move: self
                .turns
                .iter()
                .rev()
                .find(|t| t.color != self.human)
                .map(|t| t.mv.to_string()),
            error: self.error.clone(),
        }
    }

    fn apply(&mut self, turn: Turn) -> Result<(), alphadda_core::GameError> {
        self.state = self.state.apply_move(turn.mv)?;
        self.turns.push(turn);
        Ok(())
    }
}

fn legal(state: &BoardState) -> Vec<String> {
    state
        .valid_moves()
        .map(|ms| ms.iter().map(Move::to_string).collect())
        .unwrap_or_default()
}

/// Accepts the canonical move text plus bare shorthands: `3` for a
/// Connect4 column and `2,4` for an Othello cell.
pub fn parse_move(text: &str, variant: GameVariant) -> Option<Move> {
    if let Ok(m) = text.parse::<Move>() {
        return Some(m);
    }
    let t = text.trim();
    if variant.is_othello() {
        let (r, c) = t.split_once(',')?;
        Some(Move::Place(r.trim().parse().ok()?, c.trim().parse().ok()?))
    } else {
        t.parse().ok().map(Move::Drop)
    }
}

/// First line of a snapshot file; the game's turns follow as record lines.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SnapshotHeader {
    session: String,
    #[serde(with = "as_str")]
    variant: GameVariant,
    human: Seat,
    agent: AgentConfig,
    seed: u64,
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: Value,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        Self {
            status,
            body: json!({ "error": message.into() }),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

type SessionRef = Arc<Mutex<Session>>;

struct Inner {
    sessions: Mutex<HashMap<String, SessionRef>>,
    networks: HashMap<GameVariant, Arc<PolicyValueNet<f32>>>,
    snapshots: Option<PathBuf>,
}

/// Shared service state; cheap to clone.
#[derive(Clone)]
pub struct AppState(Arc<Inner>);

impl AppState {
    /// `networks` back the network-guided agents of each variant; variants
    /// without one use the heuristic evaluator.
    pub fn new(
        networks: HashMap<GameVariant, Arc<PolicyValueNet<f32>>>,
        snapshots: Option<PathBuf>,
    ) -> Self {
        Self(Arc::new(Inner {
            sessions: Mutex::new(HashMap::new()),
            networks,
            snapshots,
        }))
    }

    pub fn session_count(&self) -> usize {
        self.0.sessions.lock().unwrap().len()
    }

    fn evaluator(&self, variant: GameVariant) -> EvaluatorSpec {
        match self.0.networks.get(&variant) {
            Some(n) => EvaluatorSpec::Network(n.clone()),
            None => EvaluatorSpec::Heuristic,
        }
    }

    fn build(
        &self,
        variant: GameVariant,
        config: &AgentConfig,
    ) -> Result<(SpecAgent, String), ApiError> {
        if config.checkpoint.is_some() {
            return Err(ApiError::new(
                StatusCode::BAD_REQUEST,
                "`agent.checkpoint`: network weights are chosen when the service starts",
            ));
        }
        let spec = config
            .to_spec(variant, self.evaluator(variant))
            .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, format!("agent.{e}")))?;
        let label = config.name.clone().unwrap_or_else(|| spec.label());
        Ok((spec.build(), label))
    }

    fn get(&self, id: &str) -> Result<SessionRef, ApiError> {
        self.0
            .sessions
            .lock()
            .unwrap()
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("no session `{id}`")))
    }

    fn snapshot(&self, s: &Session) {
        let Some(dir) = &self.0.snapshots else { return };
        if let Err(e) = write_snapshot(dir, s) {
            eprintln!("snapshot of session {} failed: {e:#}", s.id);
        }
    }

    /// Runs the agent's turn if it is due. The session lock is released
    /// while the agent searches.
    async fn agent_turn(&self, session: SessionRef) {
        let job = {
            let mut s = session.lock().unwrap();
            if !s.agent_to_move() {
                return;
            }
            let turn = s.state.turn_index() as u64;
            let rng = game_rng(s.seed, turn);
            (s.agent.take().unwrap(), s.state, rng)
        };
        let (mut agent, state, mut rng) = job;
        let joined = tokio::task::spawn_blocking(move || {
            let d = agent.decide(&state, &mut rng);
            (agent, d)
        })
        .await;
        let mut s = session.lock().unwrap();
        match joined {
            Ok((agent, Ok(d))) => {
                s.agent = Some(agent);
                let color = s.state.to_move();
                let turn = Turn {
                    color,
                    mv: d.mv,
                    dda: d.dda.map(DdaBlock::from),
                };
                if let Err(e) = s.apply(turn) {
                    s.error = Some(format!("agent produced an illegal move: {e}"));
                }
            }
            Ok((agent, Err(e))) => {
                s.agent = Some(agent);
                s.error = Some(format!("agent failed: {e}"));
            }
            Err(e) => s.error = Some(format!("agent task aborted: {e}")),
        }
        self.snapshot(&s);
    }

    async fn advance(&self, session: SessionRef, wait: bool) {
        if wait {
            self.agent_turn(session).await;
        } else {
            let me = self.clone();
            tokio::spawn(async move { me.agent_turn(session).await });
        }
    }

    pub async fn create(&self, req: CreateRequest) -> Result<SessionView, ApiError> {
        let (mut agent, label) = self.build(req.variant, &req.agent)?;
        let human = req.human.color();
        agent.reset(human.opponent());
        let id = uuid::Uuid::new_v4().simple().to_string();
        let seed = u64::from_le_bytes(uuid::Uuid::new_v4().as_bytes()[..8].try_into().unwrap());
        let session = Session {
            id: id.clone(),
            variant: req.variant,
            human,
            config: req.agent,
            label,
            seed,
            agent: Some(agent),
            state: BoardState::new_game(req.variant),
            turns: Vec::new(),
            error: None,
        };
        self.snapshot(&session);
        let session = Arc::new(Mutex::new(session));
        self.0.sessions.lock().unwrap().insert(id, session.clone());
        self.advance(session.clone(), req.wait).await;
        let view = session.lock().unwrap().view();
        Ok(view)
    }

    pub fn view(&self, id: &str) -> Result<SessionView, ApiError> {
        Ok(self.get(id)?.lock().unwrap().view())
    }

    pub async fn play(&self, id: &str, req: MoveRequest) -> Result<SessionView, ApiError> {
        let session = self.get(id)?;
        {
            let mut s = session.lock().unwrap();
            match s.status() {
                Status::AwaitingHuman => {}
                Status::AwaitingAgent => {
                    return Err(ApiError::new(
                        StatusCode::CONFLICT,
                        "not your turn: the agent is to move",
                    ))
                }
                Status::Finished => {
                    return Err(ApiError::new(StatusCode::CONFLICT, "the game is over"))
                }
            }
            let mv = parse_move(&req.mv, s.variant).filter(|&m| s.state.is_legal(m));
            let Some(mv) = mv else {
                let legal_moves = legal(&s.state);
                return Err(ApiError {
                    status: StatusCode::BAD_REQUEST,
                    body: json!({
                        "error": format!("illegal move `{}`", req.mv),
                        "legal_moves": legal_moves,
                    }),
                });
            };
            let color = s.human;
            s.apply(Turn {
                color,
                mv,
                dda: None,
            })
            .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, e.to_string()))?;
            self.snapshot(&s);
        }
        self.advance(session.clone(), req.wait).await;
        let view = session.lock().unwrap().view();
        Ok(view)
    }

    /// Reloads every snapshot in the snapshot directory and resumes any
    /// session whose agent was to move. Returns the number restored.
    pub async fn restore(&self) -> anyhow::Result<usize> {
        let Some(dir) = self.0.snapshots.clone() else {
            return Ok(0);
        };
        if !dir.exists() {
            return Ok(0);
        }
        let mut pending = Vec::new();
        for entry in fs::read_dir(&dir)? {
            let path = entry?.path();
            if path.extension().and_then(|e| e.to_str()) != Some("jsonl") {
                continue;
            }
            let session = self
                .read_snapshot(&path)
                .with_context(|| format!("cannot restore {}", path.display()))?;
            let id = session.id.clone();
            let session = Arc::new(Mutex::new(session));
            self.0.sessions.lock().unwrap().insert(id, session.clone());
            pending.push(session);
        }
        let n = pending.len();
        for s in pending {
            self.advance(s, false).await;
        }
        Ok(n)
    }

    fn read_snapshot(&self, path: &Path) -> anyhow::Result<Session> {
        let text = fs::read_to_string(path)?;
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header: SnapshotHeader = serde_json::from_str(lines.next().context("empty snapshot")?)?;
        let turns: Vec<TurnLine> = lines.map(serde_json::from_str).collect::<Result<_, _>>()?;
        let (mut agent, label) = self
            .build(header.variant, &header.agent)
            .map_err(|e| anyhow::anyhow!("{}", e.body["error"].as_str().unwrap_or_default()))?;
        let human = header.human.color();
        agent.reset(human.opponent());
        let values: Vec<f64> = turns.iter().filter_map(|t| t.dda.map(|d| d.v_n)).collect();
        if !values.is_empty() {
            agent.restore_history(ValueHistory::from_values(human.opponent(), &values));
        }
        let mut session = Session {
            id: header.session,
            variant: header.variant,
            human,
            config: header.agent,
            label,
            seed: header.seed,
            agent: Some(agent),
            state: BoardState::new_game(header.variant),
            turns: Vec::new(),
            error: None,
        };
        if !turns.is_empty() {
            records::replay(&turns)?;
        }
        for t in &turns {
            let color = Color::from_sign(t.color).context("bad color")?;
            session.apply(Turn {
                color,
                mv: t.mv,
                dda: t.dda,
            })?;
        }
        Ok(session)
    }
}

fn write_snapshot(dir: &Path, s: &Session) -> anyhow::Result<()> {
    fs::create_dir_all(dir)?;
    let header = SnapshotHeader {
        session: s.id.clone(),
        variant: s.variant,
        human: Seat::of(s.human),
        agent: s.config.clone(),
        seed: s.seed,
    };
    let c_win = s.state.outcome().map(|o| o.c_win());
    let mut state = BoardState::new_game(s.variant);
    let mut lines = Vec::with_capacity(s.turns.len());
    for (t, turn) in s.turns.iter().zip(0..) {
        lines.push(TurnLine {
            game: 0,
            turn,
            board: state.to_string(),
            mv: t.mv,
            color: t.color.sign(),
            pi: None,
            c_win,
            dda: t.dda,
        });
        state = state.apply_move(t.mv)?;
    }
    let mut buf = serde_json::to_vec(&header)?;
    buf.push(b'\n');
    records::write_lines(&mut buf, &lines)?;
    let path = dir.join(format!("{}.jsonl", s.id));
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, buf)?;
    fs::rename(&tmp, &path)?;
    Ok(())
}

fn parse_body<T: for<'de> Deserialize<'de>>(body: Value) -> Result<T, ApiError> {
    serde_json::from_value(body)
        .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, format!("invalid request: {e}")))
}

async fn health(State(app): State<AppState>) -> Json<Value> {
    Json(json!({ "status": "ok", "sessions": app.session_count() }))
}

async fn agents() -> Json<Value> {
    let kinds: Vec<Value> = AgentKind::ALL
        .iter()
        .map(|&k| {
            let params = AgentConfig::new(k).allowed_params();
            json!({
                "kind": k.name(),
                "uses_evaluator": k.uses_evaluator(),
                "parameters": params.iter().filter(|&&p| p != "checkpoint").collect::<Vec<_>>(),
            })
        })
        .collect();
    let variants: Vec<&str> = GameVariant::ALL.iter().map(|v| v.name()).collect();
    Json(json!({ "agents": kinds, "variants": variants }))
}

async fn create_session(
    State(app): State<AppState>,
    Json(body): Json<Value>,
) -> Result<Response, ApiError> {
    let req: CreateRequest = parse_body(body)?;
    let view = app.create(req).await?;
    Ok((StatusCode::CREATED, Json(view)).into_response())
}

async fn get_session(
    State(app): State<AppState>,
    UrlPath(id): UrlPath<String>,
) -> Result<Json<SessionView>, ApiError> {
    app.view(&id).map(Json)
}

async fn post_move(
    State(app): State<AppState>,
    UrlPath(id): UrlPath<String>,
    Json(body): Json<Value>,
) -> Result<Json<SessionView>, ApiError> {
    let req: MoveRequest = parse_body(body)?;
    app.play(&id, req).await.map(Json)
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/api/agents", get(agents))
        .route("/api/sessions", post(create_session))
        .route("/api/sessions/{id}", get(get_session))
        .route("/api/sessions/{id}/moves", post(post_move))
        .with_state(state)
}

/// Serves until the process is stopped.
pub async fn serve(state: AppState, bind: &str) -> anyhow::Result<()> {
    let restored = state.restore().await?;
    let listener = tokio::net::TcpListener::bind(bind)
        .await
        .with_context(|| format!("cannot bind {bind}"))?;
    eprintln!(
        "listening on {} ({restored} sessions restored)",
        listener.local_addr()?
    );
    axum::serve(listener, router(state)).await?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn move_shorthands() {
        assert_eq!(
            parse_move("drop 3", GameVariant::Connect4),
            Some(Move::Drop(3))
        );
        assert_eq!(parse_move("3", GameVariant::Connect4), Some(Move::Drop(3)));
        assert_eq!(
            parse_move(" 2, 4 ", GameVariant::Othello6),
            Some(Move::Place(2, 4))
        );
        assert_eq!(
            parse_move("place 2,4", GameVariant::Othello8),
            Some(Move::Place(2, 4))
        );
        assert_eq!(parse_move("pass", GameVariant::Othello8), Some(Move::Pass));
        assert_eq!(parse_move("x", GameVariant::Connect4), None);
        assert_eq!(parse_move("2,4", GameVariant::Connect4), None);
    }
}
