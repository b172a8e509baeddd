//! HTTP session service: value queries and interactive games where a human
//! plays one side against the engine.

use std::collections::HashMap;
use std::path::{Path as FsPath, PathBuf};
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use goldsand_core::solver::{solve_value, DEFAULT_TOL};
use goldsand_core::strategy::{remover_reply, remover_respond, OptimalPusher, PusherPolicy, StrategyConfig};
use goldsand_core::{apply_move, Arrangement, Degeneracy, GameKind, Label, MoveSplit, ParamPoint, SandCell};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::json;
use tokio::sync::{Mutex, RwLock};
use uuid::Uuid;

/// Largest depth `N` the service accepts.
pub const MAX_DEPTH: u32 = 16;
/// Largest number of occupied cells the service accepts.
pub const MAX_CELLS: usize = 1024;

#[derive(Debug, thiserror::Error)]
pub enum ApiError {
    #[error("{0}")]
    BadRequest(String),
    #[error("session {0} not found")]
    NotFound(Uuid),
    #[error("session {0} is finished")]
    Finished(Uuid),
    #[error("{0}")]
    Internal(String),
}

impl From<goldsand_core::Error> for ApiError {
    fn from(err: goldsand_core::Error) -> Self {
        ApiError::BadRequest(err.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = match self {
            ApiError::BadRequest(_) => StatusCode::BAD_REQUEST,
            ApiError::NotFound(_) => StatusCode::NOT_FOUND,
            ApiError::Finished(_) => StatusCode::CONFLICT,
            ApiError::Internal(_) => StatusCode::INTERNAL_SERVER_ERROR,
        };
        (status, Json(json!({ "error": self.to_string() }))).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

fn parse_body<T: DeserializeOwned>(body: &Bytes) -> ApiResult<T> {
    serde_json::from_slice(body).map_err(|e| ApiError::BadRequest(format!("invalid request body: {e}")))
}

/// Rejects arrangements beyond the per-request computation bounds.
pub fn check_bounds(x: &Arrangement) -> ApiResult<()> {
    if x.max_level() > MAX_DEPTH {
        return Err(ApiError::BadRequest(format!("maxLevel {} exceeds the service bound {MAX_DEPTH}", x.max_level())));
    }
    if x.cell_count() > MAX_CELLS {
        return Err(ApiError::BadRequest(format!("{} cells exceed the service bound {MAX_CELLS}", x.cell_count())));
    }
    if !x.kind().is_builtin() {
        return Err(ApiError::BadRequest(format!("unsupported kind {}", x.kind())));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    #[serde(alias = "Pusher")]
    Pusher,
    #[serde(alias = "Remover")]
    Remover,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Active,
    Finished,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SessionRound {
    pub round: usize,
    pub split: Vec<SandCell>,
    pub tau: u32,
    pub harvested: f64,
    pub destroyed: f64,
    /// `e` after the round.
    pub e: f64,
}

/// One interactive game. The engine plays the role the human does not.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Session {
    pub session_id: Uuid,
    pub kind: GameKind,
    pub human_role: Role,
    pub config: StrategyConfig,
    pub pusher_policy: PusherPolicy,
    pub initial: Arrangement,
    pub arrangement: Arrangement,
    pub e0: f64,
    pub harvested: f64,
    pub rounds: Vec<SessionRound>,
    pub status: Status,
    /// The engine Pusher's split awaiting the human Remover's label.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pending_split: Option<Vec<SandCell>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub engine_pusher: Option<OptimalPusher>,
}

fn value_or_zero(x: &Arrangement, tol: f64) -> ApiResult<(f64, Option<ParamPoint>, Option<Degeneracy>)> {
    if x.is_empty() {
        return Ok((0.0, None, None));
    }
    let v = solve_value(x, tol)?;
    Ok((v.e, Some(v.p_star), Some(v.degeneracy)))
}

impl Session {
    pub fn new(
        arrangement: Arrangement,
        human_role: Role,
        config: StrategyConfig,
        pusher_policy: PusherPolicy,
    ) -> ApiResult<Session> {
        check_bounds(&arrangement)?;
        config.validate()?;
        if arrangement.is_empty() {
            return Err(ApiError::BadRequest("arrangement holds no sand".into()));
        }
        if pusher_policy == PusherPolicy::RandomSplit {
            return Err(ApiError::BadRequest("sessions need a deterministic engine Pusher".into()));
        }
        let e0 = value_or_zero(&arrangement, config.solver_tol)?.0;
        let engine_pusher = match (human_role, pusher_policy.agent(&config)) {
            (Role::Remover, goldsand_core::strategy::PusherAgent::Optimal(p)) => Some(p),
            _ => None,
        };
        let mut session = Session {
            session_id: Uuid::new_v4(),
            kind: arrangement.kind(),
            human_role,
            config,
            pusher_policy,
            initial: arrangement.clone(),
            arrangement,
            e0,
            harvested: 0.0,
            rounds: Vec::new(),
            status: Status::Active,
            pending_split: None,
            engine_pusher,
        };
        session.advance()?;
        Ok(session)
    }

    /// Whose move it is, if the game is still on.
    pub fn turn(&self) -> Option<Role> {
        match self.status {
            Status::Finished => None,
            Status::Active if self.pending_split.is_some() => Some(Role::Remover),
            Status::Active => Some(Role::Pusher),
        }
    }

    fn engine_split(&mut self) -> ApiResult<MoveSplit> {
        let x = &self.arrangement;
        let mv = match &mut self.engine_pusher {
            Some(p) => p.respond(x)?,
            None => self.pusher_policy.agent(&self.config).respond(x)?,
        };
        Ok(mv.split)
    }

    /// Finishes the game when nothing can move, and queues the engine
    /// Pusher's split when the human plays Remover.
    fn advance(&mut self) -> ApiResult<()> {
        if !self.arrangement.cells().any(|(c, _)| c.level >= 1) {
            // Only winning cells (or nothing) left: collect and stop.
            self.harvested += self.arrangement.l1();
            self.status = Status::Finished;
            return Ok(());
        }
        if self.human_role == Role::Remover {
            let split = self.engine_split()?;
            if split.is_empty() {
                self.status = Status::Finished;
            } else {
                self.pending_split = Some(split.to_cells(self.arrangement.system()));
            }
        }
        Ok(())
    }

    fn play_round(&mut self, split: &MoveSplit, tau: Label) -> ApiResult<SessionRound> {
        let out = apply_move(&self.arrangement, split, tau)?;
        let e = value_or_zero(&out.next, self.config.solver_tol)?.0;
        let round = SessionRound {
            round: self.rounds.len() + 1,
            split: split.to_cells(self.arrangement.system()),
            tau: tau.number(),
            harvested: out.harvested,
            destroyed: out.destroyed,
            e,
        };
        self.harvested += out.harvested;
        self.arrangement = out.next;
        self.rounds.push(round.clone());
        Ok(round)
    }

    /// Applies the human's move and the engine's answer.
    pub fn human_move(&mut self, req: &MoveRequest) -> ApiResult<MoveResponse> {
        if self.status == Status::Finished {
            return Err(ApiError::Finished(self.session_id));
        }
        let sys = self.arrangement.shared_system();
        match (self.human_role, &req.split, req.tau) {
            (Role::Pusher, Some(cells), None) => {
                let split = MoveSplit::from_cells(&sys, cells)?.validated(&self.arrangement)?;
                if split.is_empty() {
                    return Err(ApiError::BadRequest("a split must run some sand".into()));
                }
                if split.cells().any(|(c, _)| c.level == 0) {
                    return Err(ApiError::BadRequest("level-0 sand cannot run".into()));
                }
                let tau = remover_respond(&self.arrangement, &split, &self.config)?;
                let round = self.play_round(&split, tau)?;
                self.advance()?;
                Ok(MoveResponse { round, engine: EngineMove::Remover { tau: tau.number() } })
            }
            (Role::Remover, None, Some(n)) => {
                let tau = Label::from_number(n)?;
                if !sys.has_label(tau) {
                    return Err(ApiError::BadRequest(format!("label {n} is not a transition of {}", self.kind)));
                }
                let cells = self.pending_split.take().ok_or_else(|| ApiError::Internal("no pending split".into()))?;
                let split = MoveSplit::from_cells(&sys, &cells)?;
                let round = self.play_round(&split, tau)?;
                self.advance()?;
                Ok(MoveResponse { round, engine: EngineMove::Pusher { split: self.pending_split.clone() } })
            }
            (Role::Pusher, _, _) => Err(ApiError::BadRequest("the human Pusher moves with {\"split\": [...]} only".into())),
            (Role::Remover, _, _) => Err(ApiError::BadRequest("the human Remover moves with {\"tau\": n} only".into())),
        }
    }

    /// The engine's recommendation for the human's next move.
    pub fn hint(&self) -> ApiResult<serde_json::Value> {
        if self.status == Status::Finished {
            return Err(ApiError::Finished(self.session_id));
        }
        match self.human_role {
            Role::Pusher => {
                let mv = OptimalPusher::new(self.config).respond(&self.arrangement)?;
                Ok(json!({ "split": mv.split.to_cells(self.arrangement.system()), "phase": mv.phase }))
            }
            Role::Remover => {
                let cells = self.pending_split.as_ref().ok_or_else(|| ApiError::Internal("no pending split".into()))?;
                let split = MoveSplit::from_cells(self.arrangement.system(), cells)?;
                let reply = remover_reply(&self.arrangement, &split, &self.config)?;
                Ok(serde_json::to_value(reply).map_err(|e| ApiError::Internal(e.to_string()))?)
            }
        }
    }

    pub fn view(&self) -> ApiResult<SessionView> {
        let (e, p_star, degeneracy) = value_or_zero(&self.arrangement, self.config.solver_tol)?;
        Ok(SessionView {
            session: self.clone(),
            turn: self.turn(),
            e,
            p_star,
            degeneracy,
            legal_labels: self.arrangement.system().labels().map(|l| l.number()).collect(),
            runnable: self.arrangement.cells().filter(|(c, _)| c.level >= 1).count(),
        })
    }

    pub fn snapshot(&self) -> String {
        serde_json::to_string_pretty(self).expect("session serializes")
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct MoveRequest {
    #[serde(default)]
    pub split: Option<Vec<SandCell>>,
    #[serde(default)]
    pub tau: Option<u32>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "role", rename_all = "snake_case")]
pub enum EngineMove {
    Remover { tau: u32 },
    /// The engine's next split, absent when the game ended.
    Pusher { split: Option<Vec<SandCell>> },
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MoveResponse {
    pub round: SessionRound,
    pub engine: EngineMove,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SessionView {
    #[serde(flatten)]
    pub session: Session,
    pub turn: Option<Role>,
    pub e: f64,
    pub p_star: Option<ParamPoint>,
    pub degeneracy: Option<Degeneracy>,
    pub legal_labels: Vec<u32>,
    /// Cells holding sand that may run.
    pub runnable: usize,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct ValueRequest {
    arrangement: Arrangement,
    #[serde(default)]
    tol: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct CreateRequest {
    #[serde(default)]
    kind: Option<GameKind>,
    arrangement: Arrangement,
    human_role: Role,
    #[serde(default)]
    eps: Option<f64>,
    #[serde(default)]
    pusher_policy: Option<PusherPolicy>,
}

/// Shared service state.
#[derive(Clone, Default)]
pub struct AppState {
    sessions: Arc<RwLock<HashMap<Uuid, Arc<Mutex<Session>>>>>,
    state_dir: Option<PathBuf>,
}

impl AppState {
    /// State backed by snapshots in `state_dir`, reloading any found there.
    pub fn with_state_dir(dir: &FsPath) -> anyhow::Result<AppState> {
        std::fs::create_dir_all(dir)?;
        let mut sessions = HashMap::new();
        for entry in std::fs::read_dir(dir)? {
            let path = entry?.path();
            if path.extension().is_some_and(|e| e == "json") {
                let session: Session = serde_json::from_str(&std::fs::read_to_string(&path)?)
                    .map_err(|e| anyhow::anyhow!("snapshot {}: {e}", path.display()))?;
                sessions.insert(session.session_id, Arc::new(Mutex::new(session)));
            }
        }
        tracing::info!(count = sessions.len(), dir = %dir.display(), "reloaded sessions");
        Ok(AppState { sessions: Arc::new(RwLock::new(sessions)), state_dir: Some(dir.to_path_buf()) })
    }

    pub async fn session_count(&self) -> usize {
        self.sessions.read().await.len()
    }

    pub async fn session(&self, id: Uuid) -> ApiResult<Arc<Mutex<Session>>> {
        self.sessions.read().await.get(&id).cloned().ok_or(ApiError::NotFound(id))
    }

    fn persist(&self, session: &Session) -> ApiResult<()> {
        let Some(dir) = &self.state_dir else {
            return Ok(());
        };
        let path = dir.join(format!("{}.json", session.session_id));
        let tmp = path.with_extension("json.tmp");
        std::fs::write(&tmp, session.snapshot())
            .and_then(|_| std::fs::rename(&tmp, &path))
            .map_err(|e| ApiError::Internal(format!("writing snapshot: {e}")))
    }

    fn forget(&self, id: Uuid) -> ApiResult<()> {
        if let Some(dir) = &self.state_dir {
            let path = dir.join(format!("{id}.json"));
            if path.exists() {
                std::fs::remove_file(path).map_err(|e| ApiError::Internal(format!("removing snapshot: {e}")))?;
            }
        }
        Ok(())
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/v1/value", post(value))
        .route("/v1/sessions", post(create_session))
        .route("/v1/sessions/{id}", get(get_session).delete(delete_session))
        .route("/v1/sessions/{id}/move", post(make_move))
        .route("/v1/sessions/{id}/hint", post(hint))
        .with_state(state)
}

fn session_id(raw: &str) -> ApiResult<Uuid> {
    Uuid::parse_str(raw).map_err(|_| ApiError::BadRequest(format!("malformed session id {raw:?}")))
}

async fn value(body: Bytes) -> ApiResult<Json<serde_json::Value>> {
    let req: ValueRequest = parse_body(&body)?;
    check_bounds(&req.arrangement)?;
    let v = solve_value(&req.arrangement, req.tol.unwrap_or(DEFAULT_TOL))?;
    Ok(Json(serde_json::to_value(v).map_err(|e| ApiError::Internal(e.to_string()))?))
}

async fn create_session(State(state): State<AppState>, body: Bytes) -> ApiResult<(StatusCode, Json<serde_json::Value>)> {
    let req: CreateRequest = parse_body(&body)?;
    if let Some(kind) = req.kind {
        if kind != req.arrangement.kind() {
            return Err(ApiError::BadRequest(format!("kind {kind} does not match the arrangement's {}", req.arrangement.kind())));
        }
    }
    let config = StrategyConfig::with_epsilon(req.eps.unwrap_or(StrategyConfig::default().epsilon));
    let session = Session::new(req.arrangement, req.human_role, config, req.pusher_policy.unwrap_or_default())?;
    let id = session.session_id;
    state.persist(&session)?;
    let view = session.view()?;
    state.sessions.write().await.insert(id, Arc::new(Mutex::new(session)));
    tracing::info!(%id, "session created");
    Ok((StatusCode::CREATED, Json(json!({ "sessionId": id, "session": view }))))
}

async fn get_session(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<SessionView>> {
    let session = state.session(session_id(&id)?).await?;
    let guard = session.lock().await;
    Ok(Json(guard.view()?))
}

async fn delete_session(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<StatusCode> {
    let id = session_id(&id)?;
    state.sessions.write().await.remove(&id).ok_or(ApiError::NotFound(id))?;
    state.forget(id)?;
    tracing::info!(%id, "session deleted");
    Ok(StatusCode::NO_CONTENT)
}

async fn make_move(State(state): State<AppState>, Path(id): Path<String>, body: Bytes) -> ApiResult<Json<serde_json::Value>> {
    let session = state.session(session_id(&id)?).await?;
    let req: MoveRequest = parse_body(&body)?;
    let mut guard = session.lock().await;
    // Work on a copy so a rejected move leaves the session untouched.
    let mut next = guard.clone();
    let response = next.human_move(&req)?;
    state.persist(&next)?;
    *guard = next;
    Ok(Json(json!({ "move": response, "session": guard.view()? })))
}

async fn hint(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<serde_json::Value>> {
    let session = state.session(session_id(&id)?).await?;
    let guard = session.lock().await;
    Ok(Json(guard.hint()?))
}

/// Serves the API until interrupted.
pub async fn serve(addr: std::net::SocketAddr, state: AppState) -> anyhow::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!(addr = %listener.local_addr()?, "listening");
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
