//! Strategies for both players and the game simulator.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{encode, legal_values, Actor, GoalSpec, MoveChoice, Position, WardenDecision};
use crate::solver::RemotenessTable;

pub trait PrisonerPolicy {
    /// Called at the start of every move, before the warden decides.
    fn before_move(&mut self, _position: &Position) {}

    /// Value to write after the warden has passed.
    fn choose(&mut self, position: &Position) -> u32;

    /// Called once every move has been applied.
    fn after_move(&mut self, _before: &Position, _choice: MoveChoice) {}

    /// Compact summary of the policy's memory, for exhaustive search.
    fn memory_key(&self) -> u64 {
        0
    }
}

pub trait WardenPolicy {
    fn decide(&mut self, position: &Position) -> WardenDecision;
}

/// Round-based prisoner strategy that needs no solved table.
///
/// Moves are grouped into rounds of `n`. In a round where the warden has not
/// yet lowered anything, the prisoner raises every digit to the goal digit of
/// the slot it will occupy when the round ends; once the warden lowers a
/// digit the prisoner stops raising until the next round. Against a word goal
/// the prisoner first waits, writing digits back unchanged, until the
/// position fits under the goal slot by slot.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BasicPrisoner {
    goal: Arc<[u32]>,
    round_move: Option<usize>,
    spoiled: bool,
}

impl BasicPrisoner {
    pub fn new(spec: &GoalSpec) -> Result<Self> {
        let goal = spec.single_goal().ok_or(Error::NotSingleGoal)?;
        Ok(BasicPrisoner { goal: goal.into(), round_move: None, spoiled: false })
    }

    /// Moves made so far in the current round, if one is running.
    pub fn round_move(&self) -> Option<usize> {
        self.round_move
    }
}

impl PrisonerPolicy for BasicPrisoner {
    fn before_move(&mut self, position: &Position) {
        let n = self.goal.len();
        if self.round_move.is_none_or(|k| k == n) {
            let fits = position.digits().iter().zip(self.goal.iter()).all(|(d, g)| d <= g);
            self.round_move = fits.then_some(0);
            self.spoiled = false;
        }
    }

    fn choose(&mut self, position: &Position) -> u32 {
        let erased = position.rightmost();
        match self.round_move {
            Some(k) if !self.spoiled => {
                // the item moved k-th in a round is back in slot n-1-k when it ends
                let slot = self.goal.len() - 1 - k;
                self.goal[slot].max(erased)
            }
            _ => erased,
        }
    }

    fn after_move(&mut self, _before: &Position, choice: MoveChoice) {
        if let Some(k) = self.round_move.as_mut() {
            if choice.actor == Actor::Warden {
                self.spoiled = true;
            }
            *k += 1;
        }
    }

    fn memory_key(&self) -> u64 {
        match self.round_move {
            None => 0,
            Some(k) => 1 + 2 * k as u64 + self.spoiled as u64,
        }
    }
}

#[derive(Clone, Debug)]
pub struct OptimalPrisoner {
    table: Arc<RemotenessTable>,
}

impl OptimalPrisoner {
    pub fn new(table: Arc<RemotenessTable>) -> Self {
        OptimalPrisoner { table }
    }
}

impl PrisonerPolicy for OptimalPrisoner {
    fn choose(&mut self, position: &Position) -> u32 {
        self.table.prisoner_best(position).expect("position matches the table")
    }
}

/// Plays the remoteness-maximising branch from a solved table.
#[derive(Clone, Debug)]
pub struct OptimalWarden {
    table: Arc<RemotenessTable>,
}

impl OptimalWarden {
    pub fn new(table: Arc<RemotenessTable>) -> Self {
        OptimalWarden { table }
    }
}

impl WardenPolicy for OptimalWarden {
    fn decide(&mut self, position: &Position) -> WardenDecision {
        self.table.warden_best(position).expect("position matches the table")
    }
}

/// Never lowers anything.
#[derive(Clone, Copy, Debug, Default)]
pub struct NeverDecrease;

impl WardenPolicy for NeverDecrease {
    fn decide(&mut self, _position: &Position) -> WardenDecision {
        WardenDecision::Pass
    }
}

/// Lowers whenever possible, by one step only (the largest child).
#[derive(Clone, Copy, Debug, Default)]
pub struct GreedyMaxChild;

impl WardenPolicy for GreedyMaxChild {
    fn decide(&mut self, position: &Position) -> WardenDecision {
        match position.rightmost() {
            0 => WardenDecision::Pass,
            v => WardenDecision::Decrease(v - 1),
        }
    }
}

/// Picks uniformly among passing and every legal decrease.
#[derive(Clone, Debug)]
pub struct RandomWarden {
    rng: ChaCha8Rng,
}

impl RandomWarden {
    pub fn new(seed: u64) -> Self {
        RandomWarden { rng: ChaCha8Rng::seed_from_u64(seed) }
    }
}

impl WardenPolicy for RandomWarden {
    fn decide(&mut self, position: &Position) -> WardenDecision {
        let v = position.rightmost();
        match self.rng.gen_range(0..=v) {
            k if k == v => WardenDecision::Pass,
            k => WardenDecision::Decrease(k),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Step {
    pub actor: Actor,
    pub value: u32,
    pub position: Position,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum Outcome {
    Won { moves: u32 },
    Unresolved { cap: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Transcript {
    pub spec: GoalSpec,
    pub start: Position,
    pub steps: Vec<Step>,
    pub outcome: Outcome,
}

impl Transcript {
    /// One `move_index actor value position` line per move, then a summary.
    pub fn to_lines(&self) -> String {
        let alphabet = self.spec.alphabet();
        let mut out = format!("start {}\n", self.start.render(alphabet));
        for (i, step) in self.steps.iter().enumerate() {
            out.push_str(&format!(
                "{} {} {} {}\n",
                i + 1,
                step.actor,
                step.value,
                step.position.render(alphabet)
            ));
        }
        match self.outcome {
            Outcome::Won { moves } => out.push_str(&format!("won {moves}\n")),
            Outcome::Unresolved { cap } => out.push_str(&format!("unresolved {cap}\n")),
        }
        out
    }

    pub fn final_position(&self) -> &Position {
        self.steps.last().map_or(&self.start, |s| &s.position)
    }
}

/// Plays one game. The warden decides first each move; if he passes the
/// prisoner writes. With `goal_as_start` a start already at the goal must
/// return to it after at least one move.
pub fn simulate(
    spec: &GoalSpec,
    start: &Position,
    prisoner: &mut dyn PrisonerPolicy,
    warden: &mut dyn WardenPolicy,
    cap: u32,
    goal_as_start: bool,
) -> Result<Transcript> {
    let mut steps = Vec::new();
    let outcome = run(spec, start, prisoner, warden, cap, goal_as_start, |choice, position| {
        steps.push(Step { actor: choice.actor, value: choice.value, position: position.clone() })
    })?;
    Ok(Transcript { spec: spec.clone(), start: start.clone(), steps, outcome })
}

/// `simulate` without the transcript.
pub fn play(
    spec: &GoalSpec,
    start: &Position,
    prisoner: &mut dyn PrisonerPolicy,
    warden: &mut dyn WardenPolicy,
    cap: u32,
    goal_as_start: bool,
) -> Result<Outcome> {
    run(spec, start, prisoner, warden, cap, goal_as_start, |_, _| {})
}

fn run(
    spec: &GoalSpec,
    start: &Position,
    prisoner: &mut dyn PrisonerPolicy,
    warden: &mut dyn WardenPolicy,
    cap: u32,
    goal_as_start: bool,
    mut record: impl FnMut(MoveChoice, &Position),
) -> Result<Outcome> {
    spec.check_position(start)?;
    if spec.is_goal(start) && !goal_as_start {
        return Ok(Outcome::Won { moves: 0 });
    }
    let alphabet = spec.alphabet();
    let mut position = start.clone();
    let mut before = start.clone();
    for moves in 1..=cap {
        prisoner.before_move(&position);
        let choice = match warden.decide(&position) {
            WardenDecision::Decrease(w) => MoveChoice::warden(w),
            WardenDecision::Pass => MoveChoice::prisoner(prisoner.choose(&position)),
        };
        before.clone_from(&position);
        position.apply_move_in_place(choice, alphabet)?;
        prisoner.after_move(&before, choice);
        record(choice, &position);
        if spec.is_goal(&position) {
            return Ok(Outcome::Won { moves });
        }
    }
    Ok(Outcome::Unresolved { cap })
}

/// Longest game the warden can force against a fixed prisoner policy,
/// searching every warden choice with the policy's memory as part of the
/// state. Fails if the warden can loop forever or the search outgrows
/// `budget` states.
pub fn worst_case_length<P>(spec: &GoalSpec, start: &Position, policy: P, budget: usize) -> Result<u32>
where
    P: PrisonerPolicy + Clone,
{
    WorstCaseSearch::new(spec, budget).longest(start, policy)
}

/// Exhaustive worst-case search whose memo is shared across starts, so one
/// search can answer every start of a spec for the same policy type.
pub struct WorstCaseSearch<'a> {
    spec: &'a GoalSpec,
    budget: usize,
    done: HashMap<(u64, u64), u32>,
}

struct Frame<P> {
    key: (u64, u64),
    successors: Vec<(Position, P)>,
    next: usize,
    best: u32,
}

impl<'a> WorstCaseSearch<'a> {
    pub fn new(spec: &'a GoalSpec, budget: usize) -> Self {
        WorstCaseSearch { spec, budget, done: HashMap::new() }
    }

    fn expand<P: PrisonerPolicy + Clone>(&self, position: &Position, policy: &P) -> Result<Vec<(Position, P)>> {
        let alphabet = self.spec.alphabet();
        let (warden, _) = legal_values(position, alphabet);
        let decisions =
            std::iter::once(WardenDecision::Pass).chain(warden.map(WardenDecision::Decrease));
        let mut out = Vec::with_capacity(position.rightmost() as usize + 1);
        for decision in decisions {
            let mut policy = policy.clone();
            policy.before_move(position);
            let choice = match decision {
                WardenDecision::Decrease(w) => MoveChoice::warden(w),
                WardenDecision::Pass => MoveChoice::prisoner(policy.choose(position)),
            };
            let next = position.apply_move(choice, alphabet)?;
            policy.after_move(position, choice);
            out.push((next, policy));
        }
        Ok(out)
    }

    pub fn longest<P: PrisonerPolicy + Clone>(&mut self, start: &Position, policy: P) -> Result<u32> {
        self.spec.check_position(start)?;
        if self.spec.is_goal(start) {
            return Ok(0);
        }
        let alphabet = self.spec.alphabet();
        let key_of = |p: &Position, policy: &P| -> Result<(u64, u64)> {
            Ok((encode(p, alphabet)?, policy.memory_key()))
        };
        let root = key_of(start, &policy)?;
        if let Some(&len) = self.done.get(&root) {
            return Ok(len);
        }
        let mut on_stack = HashSet::new();
        on_stack.insert(root);
        let mut stack = vec![Frame { key: root, successors: self.expand(start, &policy)?, next: 0, best: 0 }];

        while let Some(frame) = stack.last_mut() {
            if frame.next == frame.successors.len() {
                let finished = stack.pop().expect("nonempty");
                on_stack.remove(&finished.key);
                self.done.insert(finished.key, finished.best);
                match stack.last_mut() {
                    Some(parent) => parent.best = parent.best.max(finished.best + 1),
                    None => return Ok(finished.best),
                }
                continue;
            }
            let (position, child_policy) = frame.successors[frame.next].clone();
            frame.next += 1;
            if self.spec.is_goal(&position) {
                frame.best = frame.best.max(1);
                continue;
            }
            let key = key_of(&position, &child_policy)?;
            if let Some(&len) = self.done.get(&key) {
                frame.best = frame.best.max(len + 1);
                continue;
            }
            if on_stack.contains(&key) {
                return Err(Error::Unbounded(start.render(alphabet)));
            }
            if self.done.len() + stack.len() >= self.budget {
                return Err(Error::SearchBudgetExceeded(self.budget));
            }
            let successors = self.expand(&position, &child_policy)?;
            on_stack.insert(key);
            stack.push(Frame { key, successors, next: 0, best: 0 });
        }
        unreachable!("the root frame returns")
    }
}

/// Warden strategies selectable by name.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WardenKind {
    Optimal,
    NeverDecrease,
    GreedyMaxChild,
    Random(u64),
}

impl WardenKind {
    pub fn parse(name: &str, seed: u64) -> Result<Self> {
        match name {
            "optimal" => Ok(WardenKind::Optimal),
            "never_decrease" | "never-decrease" => Ok(WardenKind::NeverDecrease),
            "greedy_max_child" | "greedy-max-child" => Ok(WardenKind::GreedyMaxChild),
            "random" => Ok(WardenKind::Random(seed)),
            other => Err(Error::Parse(format!("unknown warden policy {other:?}"))),
        }
    }

    pub fn build(&self, table: Option<&Arc<RemotenessTable>>) -> Result<Box<dyn WardenPolicy + Send>> {
        Ok(match self {
            WardenKind::Optimal => {
                let table = table.ok_or_else(|| Error::InvalidSpec("optimal warden needs a solved table".into()))?;
                Box::new(OptimalWarden::new(table.clone()))
            }
            WardenKind::NeverDecrease => Box::new(NeverDecrease),
            WardenKind::GreedyMaxChild => Box::new(GreedyMaxChild),
            WardenKind::Random(seed) => Box::new(RandomWarden::new(*seed)),
        })
    }
}
