use thiserror::Error;

use crate::game::Actor;

#[derive(Debug, Error)]
pub enum Error {
    #[error("illegal move: {actor} may not write {value} over rightmost {rightmost} (alphabet {alphabet})")]
    IllegalMove {
        actor: Actor,
        value: u32,
        rightmost: u32,
        alphabet: u32,
    },
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("digit {digit} is outside the alphabet 0..{alphabet}")]
    DigitOutOfRange { digit: u32, alphabet: u32 },
    #[error("index {index} is outside 0..{size}")]
    IndexOutOfRange { index: u64, size: u64 },
    #[error("invalid goal spec: {0}")]
    InvalidSpec(String),
    #[error("state space of {states} positions exceeds the cap of {cap}")]
    StateSpaceTooLarge { states: u128, cap: u64 },
    #[error("no winning path: position {0} is unwinnable")]
    NoWinPath(String),
    #[error("position {0} is already a goal")]
    Terminal(String),
    #[error("optimal chain is broken at remoteness {0}")]
    ChainBroken(u32),
    #[error("operation requires a single-goal spec")]
    NotSingleGoal,
    #[error("word {0} does not occur in the sequence")]
    WordNotPresent(String),
    #[error("search budget of {0} states exceeded")]
    SearchBudgetExceeded(usize),
    #[error("the warden can prolong the game forever from {0}")]
    Unbounded(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("cache file: {0}")]
    Cache(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
