//! HTTP+JSON server for playing the warden's game against solver-backed
//! engines, or hotseat.
//!
//! Sessions live in memory and are dropped after an idle timeout. Solved
//! tables are built on first use and shared by every session on that spec.

pub mod api;
pub mod session;

use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, Mutex as StdMutex, RwLock};
use std::time::{Duration, Instant};

use axum::routing::{get, post};
use axum::Router;
use tokio::sync::Mutex;
use tower_http::services::ServeDir;
use warden_core::{solve_with_cap, GoalSpec, RemotenessTable};

use crate::session::Session;

pub const DEFAULT_IDLE_TIMEOUT: Duration = Duration::from_secs(3600);

/// Largest game the server will solve for a session.
pub const DEFAULT_STATE_CAP: u64 = 1_000_000;

pub struct AppState {
    sessions: RwLock<HashMap<String, Arc<Mutex<Session>>>>,
    tables: StdMutex<HashMap<GoalSpec, Arc<RemotenessTable>>>,
    idle_timeout: Duration,
    state_cap: u64,
}

impl Default for AppState {
    fn default() -> Self {
        AppState::new(DEFAULT_IDLE_TIMEOUT, DEFAULT_STATE_CAP)
    }
}

impl AppState {
    pub fn new(idle_timeout: Duration, state_cap: u64) -> Self {
        AppState {
            sessions: RwLock::default(),
            tables: StdMutex::default(),
            idle_timeout,
            state_cap,
        }
    }

    pub fn table_for(&self, spec: &GoalSpec) -> warden_core::Result<Arc<RemotenessTable>> {
        let mut tables = self.tables.lock().expect("table cache poisoned");
        if let Some(table) = tables.get(spec) {
            return Ok(table.clone());
        }
        let table = Arc::new(solve_with_cap(spec, self.state_cap)?);
        tables.insert(spec.clone(), table.clone());
        Ok(table)
    }

    fn insert(&self, id: String, session: Session) {
        let mut sessions = self.sessions.write().expect("session map poisoned");
        sessions.insert(id, Arc::new(Mutex::new(session)));
    }

    pub fn session(&self, id: &str) -> Option<Arc<Mutex<Session>>> {
        self.sessions.read().expect("session map poisoned").get(id).cloned()
    }

    fn remove(&self, id: &str) -> Option<Arc<Mutex<Session>>> {
        self.sessions.write().expect("session map poisoned").remove(id)
    }

    pub fn session_count(&self) -> usize {
        self.sessions.read().expect("session map poisoned").len()
    }

    /// Drops sessions idle for longer than the timeout as of `now`. A session
    /// busy with a request is kept.
    pub fn evict_idle(&self, now: Instant) -> usize {
        let mut sessions = self.sessions.write().expect("session map poisoned");
        let before = sessions.len();
        sessions.retain(|_, session| match session.try_lock() {
            Ok(s) => now.saturating_duration_since(s.last_used) <= self.idle_timeout,
            Err(_) => true,
        });
        before - sessions.len()
    }
}

pub fn router(state: Arc<AppState>, static_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/api/games", post(api::create_game))
        .route("/api/games/{id}", get(api::get_game).delete(api::delete_game))
        .route("/api/games/{id}/move", post(api::make_move))
        .route("/api/games/{id}/hint", get(api::hint))
        .with_state(state);
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

/// Serves until the process is stopped, evicting idle sessions once a minute.
pub async fn serve(addr: SocketAddr, static_dir: Option<PathBuf>) -> std::io::Result<()> {
    let state = Arc::new(AppState::default());
    let sweeper = state.clone();
    tokio::spawn(async move {
        let mut tick = tokio::time::interval(Duration::from_secs(60));
        loop {
            tick.tick().await;
            let evicted = sweeper.evict_idle(Instant::now());
            if evicted > 0 {
                tracing::info!(evicted, "dropped idle sessions");
            }
        }
    });
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!(addr = %listener.local_addr()?, "listening");
    axum::serve(listener, router(state, static_dir)).await
}
