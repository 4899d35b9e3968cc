//! The warden's game: a prisoner and a warden take turns moving the rightmost
//! digit of a row to the far left, the warden lowering it or the prisoner
//! raising it, until the row shows the prisoner's goal.
//!
//! [`solver`] computes exact remoteness for every position by retrograde
//! analysis. For a single goal the optimal-play chain visits every winnable
//! position once, and reading off the new digit at each step yields the
//! lexicographically minimal de Bruijn sequence (or its goal-word
//! generalisation). [`sequences`] holds independent classical constructions
//! of the same objects, and [`oracle`] independent game searches.

pub mod agents;
pub mod cache;
pub mod error;
pub mod game;
pub mod oracle;
pub mod sequences;
pub mod solver;
pub mod verify;

pub use error::{Error, Result};
pub use game::{
    decode, encode, legal_values, rotation_dominates, Actor, GoalSpec, MoveChoice, Position,
    WardenDecision,
};
pub use solver::{solve, solve_with_cap, BoundedWin, ChainSequence, RemotenessTable, UNWINNABLE};
