//! One game in progress, independent of HTTP.

use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use warden_core::agents::{BasicPrisoner, OptimalPrisoner, PrisonerPolicy, WardenKind, WardenPolicy};
use warden_core::{Actor, GoalSpec, MoveChoice, Position, RemotenessTable, WardenDecision};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HumanRole {
    Prisoner,
    Warden,
    Both,
}

impl HumanRole {
    fn controls(self, actor: Actor) -> bool {
        matches!(
            (self, actor),
            (HumanRole::Both, _)
                | (HumanRole::Prisoner, Actor::Prisoner)
                | (HumanRole::Warden, Actor::Warden)
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Awaiting {
    WardenDecision,
    PrisonerValue,
    Finished,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SessionOutcome {
    PrisonerWon { moves: u32 },
    LimitExceeded { moves: u32 },
    Abandoned { moves: u32 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "snake_case")]
pub enum Action {
    Pass,
    Write { value: u32 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrisonerEngine {
    Optimal,
    Basic,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Record {
    pub actor: Actor,
    pub value: u32,
    pub position: Vec<u32>,
    /// The warden passed only because nothing lower existed.
    pub forced_pass: bool,
}

#[derive(Debug, PartialEq, Eq)]
pub enum MoveError {
    Finished,
    OutOfTurn(String),
    Illegal(String),
}

#[derive(Clone, Debug, Serialize)]
pub struct Legal {
    pub pass: bool,
    pub values: Vec<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HintStatus {
    Winnable,
    Unwinnable,
    LimitUnreachable,
}

#[derive(Clone, Debug, Serialize)]
pub struct Hint {
    pub actor: Actor,
    pub action: Action,
    pub remoteness: Option<u32>,
    pub status: HintStatus,
}

pub struct Session {
    pub id: String,
    pub spec: GoalSpec,
    pub start: Position,
    pub position: Position,
    pub moves_made: u32,
    pub human_role: HumanRole,
    pub warden_engine: String,
    pub prisoner_engine: PrisonerEngine,
    pub awaiting: Awaiting,
    pub outcome: Option<SessionOutcome>,
    pub transcript: Vec<Record>,
    pub last_used: Instant,
    table: Arc<RemotenessTable>,
    warden: Box<dyn WardenPolicy + Send>,
    prisoner: Box<dyn PrisonerPolicy + Send>,
    /// The warden's pass in the current move was forced.
    passed_forced: bool,
}

pub struct NewSession {
    pub id: String,
    pub table: Arc<RemotenessTable>,
    pub start: Position,
    pub human_role: HumanRole,
    pub warden_engine: WardenKind,
    pub warden_engine_name: String,
    pub prisoner_engine: PrisonerEngine,
}

impl Session {
    pub fn new(params: NewSession) -> warden_core::Result<Self> {
        let NewSession { id, table, start, human_role, warden_engine, warden_engine_name, prisoner_engine } =
            params;
        let spec = table.spec().clone();
        spec.check_position(&start)?;
        let warden = warden_engine.build(Some(&table))?;
        let prisoner: Box<dyn PrisonerPolicy + Send> = match prisoner_engine {
            PrisonerEngine::Optimal => Box::new(OptimalPrisoner::new(table.clone())),
            PrisonerEngine::Basic => Box::new(BasicPrisoner::new(&spec)?),
        };
        let mut session = Session {
            id,
            spec,
            position: start.clone(),
            start,
            moves_made: 0,
            human_role,
            warden_engine: warden_engine_name,
            prisoner_engine,
            awaiting: Awaiting::WardenDecision,
            outcome: None,
            transcript: Vec::new(),
            last_used: Instant::now(),
            table,
            warden,
            prisoner,
            passed_forced: false,
        };
        // a single goal as the start means a full loop back to it; a goal
        // set (which may carry a limit) is simply already won
        if session.spec.single_goal().is_none() && session.spec.is_goal(&session.position) {
            session.finish(SessionOutcome::PrisonerWon { moves: 0 });
        } else {
            session.begin_move();
            session.advance();
        }
        Ok(session)
    }

    pub fn alphabet(&self) -> u32 {
        self.spec.alphabet()
    }

    pub fn limit(&self) -> Option<u32> {
        self.spec.limit()
    }

    pub fn moves_remaining(&self) -> Option<u32> {
        self.limit().map(|l| l.saturating_sub(self.moves_made))
    }

    pub fn legal(&self) -> Legal {
        let v = self.position.rightmost();
        match self.awaiting {
            Awaiting::WardenDecision => Legal { pass: true, values: (0..v).collect() },
            Awaiting::PrisonerValue => Legal { pass: false, values: (v..self.alphabet()).collect() },
            Awaiting::Finished => Legal { pass: false, values: Vec::new() },
        }
    }

    /// Applies a human decision, then lets the engines play until a human is
    /// needed again.
    pub fn act(&mut self, action: Action) -> Result<(), MoveError> {
        let actor = match self.awaiting {
            Awaiting::Finished => return Err(MoveError::Finished),
            Awaiting::WardenDecision => Actor::Warden,
            Awaiting::PrisonerValue => Actor::Prisoner,
        };
        if !self.human_role.controls(actor) {
            return Err(MoveError::OutOfTurn(format!("the {actor} is played by the engine")));
        }
        let v = self.position.rightmost();
        match (actor, action) {
            (Actor::Warden, Action::Pass) => self.pass(false),
            (Actor::Warden, Action::Write { value }) if value < v => {
                self.apply(MoveChoice::warden(value))
            }
            (Actor::Warden, Action::Write { value }) => {
                return Err(MoveError::Illegal(format!(
                    "the warden may only write a value below {v}, not {value}"
                )))
            }
            (Actor::Prisoner, Action::Pass) => {
                return Err(MoveError::OutOfTurn("only the warden can pass".into()))
            }
            (Actor::Prisoner, Action::Write { value }) if value >= v && value < self.alphabet() => {
                self.apply(MoveChoice::prisoner(value))
            }
            (Actor::Prisoner, Action::Write { value }) => {
                return Err(MoveError::Illegal(format!(
                    "the prisoner must write a value from {v} to {}, not {value}",
                    self.alphabet() - 1
                )))
            }
        }
        self.advance();
        Ok(())
    }

    pub fn abandon(&mut self) {
        if self.outcome.is_none() {
            self.finish(SessionOutcome::Abandoned { moves: self.moves_made });
        }
    }

    /// The solver's choice for the awaited decision.
    pub fn hint(&self) -> Result<Hint, MoveError> {
        let table = &self.table;
        let (actor, action) = match self.awaiting {
            Awaiting::Finished => return Err(MoveError::Finished),
            Awaiting::WardenDecision => {
                let decision = table.warden_best(&self.position).expect("session position fits its table");
                let action = match decision {
                    WardenDecision::Pass => Action::Pass,
                    WardenDecision::Decrease(value) => Action::Write { value },
                };
                (Actor::Warden, action)
            }
            Awaiting::PrisonerValue => {
                let value = table.prisoner_best(&self.position).expect("session position fits its table");
                (Actor::Prisoner, Action::Write { value })
            }
        };
        let remoteness = self.remoteness();
        let status = match (remoteness, self.moves_remaining()) {
            (None, _) => HintStatus::Unwinnable,
            (Some(r), Some(left)) if r > left => HintStatus::LimitUnreachable,
            _ => HintStatus::Winnable,
        };
        Ok(Hint { actor, action, remoteness, status })
    }

    /// Remoteness of the current position; a single goal the session started
    /// on counts as a start.
    pub fn remoteness(&self) -> Option<u32> {
        let r = if self.moves_made == 0 {
            self.table.remoteness_from_start(&self.position)
        } else {
            self.table.remoteness(&self.position)
        };
        r.expect("session position fits its table")
    }

    fn begin_move(&mut self) {
        self.awaiting = Awaiting::WardenDecision;
        self.passed_forced = false;
        self.prisoner.before_move(&self.position);
    }

    fn pass(&mut self, forced: bool) {
        self.awaiting = Awaiting::PrisonerValue;
        self.passed_forced = forced;
    }

    fn apply(&mut self, choice: MoveChoice) {
        let before = self.position.clone();
        self.position = before
            .apply_move(choice, self.alphabet())
            .expect("decisions are validated before they are applied");
        self.prisoner.after_move(&before, choice);
        self.moves_made += 1;
        self.transcript.push(Record {
            actor: choice.actor,
            value: choice.value,
            position: self.position.digits().to_vec(),
            forced_pass: choice.actor == Actor::Prisoner && self.passed_forced,
        });
        if self.spec.is_goal(&self.position) {
            self.finish(SessionOutcome::PrisonerWon { moves: self.moves_made });
        } else if self.limit().is_some_and(|l| self.moves_made >= l) {
            self.finish(SessionOutcome::LimitExceeded { moves: self.moves_made });
        } else {
            self.begin_move();
        }
    }

    fn finish(&mut self, outcome: SessionOutcome) {
        self.outcome = Some(outcome);
        self.awaiting = Awaiting::Finished;
    }

    /// Plays engine decisions and forced passes until a human decision or the end.
    fn advance(&mut self) {
        loop {
            match self.awaiting {
                Awaiting::Finished => return,
                Awaiting::WardenDecision if self.position.rightmost() == 0 => self.pass(true),
                Awaiting::WardenDecision if !self.human_role.controls(Actor::Warden) => {
                    match self.warden.decide(&self.position) {
                        WardenDecision::Pass => self.pass(false),
                        WardenDecision::Decrease(w) => self.apply(MoveChoice::warden(w)),
                    }
                }
                Awaiting::PrisonerValue if !self.human_role.controls(Actor::Prisoner) => {
                    let value = self.prisoner.choose(&self.position);
                    self.apply(MoveChoice::prisoner(value));
                }
                _ => return,
            }
        }
    }
}
