//! Request and response documents, and the route handlers.

use std::sync::Arc;
use std::time::Instant;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::{Deserialize, Serialize};
use tokio::sync::Mutex;
use warden_core::agents::WardenKind;
use warden_core::{Actor, GoalSpec, Position};

use crate::session::{
    Action, Awaiting, Hint, HumanRole, Legal, MoveError, NewSession, PrisonerEngine, Record, Session,
    SessionOutcome,
};
use crate::AppState;

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError { status, code, message: message.into() }
    }

    fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "bad_request", message)
    }

    fn not_found(id: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, "not_found", format!("no game with id {id}"))
    }
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    code: &'a str,
    message: &'a str,
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = ErrorBody { code: self.code, message: &self.message };
        (self.status, Json(body)).into_response()
    }
}

impl From<JsonRejection> for ApiError {
    fn from(rejection: JsonRejection) -> Self {
        let status = match rejection {
            JsonRejection::JsonDataError(_) => StatusCode::UNPROCESSABLE_ENTITY,
            _ => StatusCode::BAD_REQUEST,
        };
        ApiError::new(status, "bad_body", rejection.body_text())
    }
}

impl From<MoveError> for ApiError {
    fn from(err: MoveError) -> Self {
        match err {
            MoveError::Finished => ApiError::new(StatusCode::CONFLICT, "finished", "the game is over"),
            MoveError::OutOfTurn(m) => ApiError::new(StatusCode::CONFLICT, "out_of_turn", m),
            MoveError::Illegal(m) => ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "illegal_value", m),
        }
    }
}

/// Either a spec document or its short text form, e.g. `"uniform:3,3"`.
#[derive(Deserialize)]
#[serde(untagged)]
pub enum SpecInput {
    Text(String),
    Document(GoalSpec),
}

/// Either a digit list or position text, e.g. `"220"` or `"THTTH"`.
#[derive(Deserialize)]
#[serde(untagged)]
pub enum PositionInput {
    Text(String),
    Digits(Vec<u32>),
}

#[derive(Deserialize)]
pub struct CreateGame {
    pub spec: SpecInput,
    pub human_role: HumanRole,
    pub start: Option<PositionInput>,
    pub warden_engine: Option<String>,
    pub prisoner_engine: Option<PrisonerEngine>,
    pub seed: Option<u64>,
}

#[derive(Serialize)]
pub struct GameState {
    pub id: String,
    pub spec: GoalSpec,
    pub human_role: HumanRole,
    pub warden_engine: String,
    pub prisoner_engine: PrisonerEngine,
    pub start: Vec<u32>,
    pub position: Vec<u32>,
    pub position_text: String,
    /// H/T rendering, only for two-symbol games.
    pub coins: Option<Vec<String>>,
    pub moves_made: u32,
    pub limit: Option<u32>,
    pub moves_remaining: Option<u32>,
    pub awaiting: Awaiting,
    pub awaiting_actor: Option<Actor>,
    pub legal: Legal,
    pub outcome: Option<SessionOutcome>,
    pub transcript: Vec<Record>,
}

impl GameState {
    fn of(session: &Session) -> Self {
        let alphabet = session.alphabet();
        GameState {
            id: session.id.clone(),
            spec: session.spec.clone(),
            human_role: session.human_role,
            warden_engine: session.warden_engine.clone(),
            prisoner_engine: session.prisoner_engine,
            start: session.start.digits().to_vec(),
            position: session.position.digits().to_vec(),
            position_text: session.position.render(alphabet),
            coins: (alphabet == 2)
                .then(|| session.position.render_coins().chars().map(String::from).collect()),
            moves_made: session.moves_made,
            limit: session.limit(),
            moves_remaining: session.moves_remaining(),
            awaiting: session.awaiting,
            awaiting_actor: match session.awaiting {
                Awaiting::WardenDecision => Some(Actor::Warden),
                Awaiting::PrisonerValue => Some(Actor::Prisoner),
                Awaiting::Finished => None,
            },
            legal: session.legal(),
            outcome: session.outcome,
            transcript: session.transcript.clone(),
        }
    }
}

fn parse_spec(input: SpecInput) -> Result<GoalSpec, ApiError> {
    let spec = match input {
        SpecInput::Text(text) => GoalSpec::parse(&text),
        SpecInput::Document(spec) => spec.validate().map(|_| spec),
    };
    spec.map_err(|e| ApiError::bad_request(e.to_string()))
}

fn parse_start(spec: &GoalSpec, input: Option<PositionInput>) -> Result<Position, ApiError> {
    let position = match input {
        None if *spec == GoalSpec::prime_puzzle() => Position::new(vec![8, 8]),
        None => Ok(Position::zeros(spec.len())),
        Some(PositionInput::Text(text)) => Position::parse(&text),
        Some(PositionInput::Digits(digits)) => Position::new(digits),
    };
    let position = position.map_err(|e| ApiError::bad_request(e.to_string()))?;
    spec.check_position(&position).map_err(|e| ApiError::bad_request(e.to_string()))?;
    Ok(position)
}

pub async fn create_game(
    State(state): State<Arc<AppState>>,
    body: Result<Json<CreateGame>, JsonRejection>,
) -> Result<(StatusCode, Json<GameState>), ApiError> {
    let Json(request) = body?;
    let spec = parse_spec(request.spec)?;
    let start = parse_start(&spec, request.start)?;
    let engine_name = request.warden_engine.unwrap_or_else(|| "optimal".into());
    let warden_engine = WardenKind::parse(&engine_name, request.seed.unwrap_or(0))
        .map_err(|e| ApiError::bad_request(e.to_string()))?;
    let table = {
        let state = state.clone();
        tokio::task::spawn_blocking(move || state.table_for(&spec))
            .await
            .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))?
            .map_err(|e| ApiError::bad_request(e.to_string()))?
    };
    let id = uuid::Uuid::new_v4().simple().to_string();
    let session = Session::new(NewSession {
        id: id.clone(),
        table,
        start,
        human_role: request.human_role,
        warden_engine,
        warden_engine_name: engine_name,
        prisoner_engine: request.prisoner_engine.unwrap_or(PrisonerEngine::Optimal),
    })
    .map_err(|e| ApiError::bad_request(e.to_string()))?;
    let view = GameState::of(&session);
    state.insert(id, session);
    Ok((StatusCode::CREATED, Json(view)))
}

fn lookup(state: &AppState, id: &str) -> Result<Arc<Mutex<Session>>, ApiError> {
    state.session(id).ok_or_else(|| ApiError::not_found(id))
}

pub async fn get_game(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> Result<Json<GameState>, ApiError> {
    let session = lookup(&state, &id)?;
    let mut session = session.lock().await;
    session.last_used = Instant::now();
    Ok(Json(GameState::of(&session)))
}

pub async fn make_move(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Result<Json<Action>, JsonRejection>,
) -> Result<Json<GameState>, ApiError> {
    let Json(action) = body?;
    let session = lookup(&state, &id)?;
    // moves on one session are never queued behind each other
    let mut session = session.try_lock().map_err(|_| {
        ApiError::new(StatusCode::CONFLICT, "busy", "another move on this game is in progress")
    })?;
    session.last_used = Instant::now();
    session.act(action)?;
    Ok(Json(GameState::of(&session)))
}

pub async fn hint(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> Result<Json<Hint>, ApiError> {
    let session = lookup(&state, &id)?;
    let mut session = session.lock().await;
    session.last_used = Instant::now();
    Ok(Json(session.hint()?))
}

pub async fn delete_game(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> Result<Json<GameState>, ApiError> {
    let session = state.remove(&id).ok_or_else(|| ApiError::not_found(&id))?;
    let mut session = session.lock().await;
    session.abandon();
    Ok(Json(GameState::of(&session)))
}
