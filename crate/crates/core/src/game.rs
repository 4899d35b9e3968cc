//! Positions, goal specifications and the single-move transition rule.
//!
//! A position is a row of digits stored leftmost-first. Every move erases the
//! rightmost digit and writes a new one at the far left. If the erased digit
//! is `v`, the warden may write any value below `v`; otherwise he passes and
//! the prisoner writes any value from `v` up to the top of the alphabet.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Position(Vec<u32>);

impl Position {
    pub fn new(digits: Vec<u32>) -> Result<Self> {
        if digits.is_empty() {
            return Err(Error::InvalidSpec("position must have at least one digit".into()));
        }
        Ok(Position(digits))
    }

    pub fn zeros(n: usize) -> Self {
        Position(vec![0; n.max(1)])
    }

    pub fn digits(&self) -> &[u32] {
        &self.0
    }

    pub fn into_digits(self) -> Vec<u32> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The digit about to be transferred.
    pub fn rightmost(&self) -> u32 {
        *self.0.last().expect("positions are never empty")
    }

    pub fn check_alphabet(&self, alphabet: u32) -> Result<()> {
        match self.0.iter().find(|&&d| d >= alphabet) {
            Some(&digit) => Err(Error::DigitOutOfRange { digit, alphabet }),
            None => Ok(()),
        }
    }

    /// Drops the rightmost digit and writes `value` at the far left, without
    /// checking legality.
    pub fn shifted_in(&self, value: u32) -> Position {
        let mut digits = Vec::with_capacity(self.0.len());
        digits.push(value);
        digits.extend_from_slice(&self.0[..self.0.len() - 1]);
        Position(digits)
    }

    pub fn apply_move(&self, choice: MoveChoice, alphabet: u32) -> Result<Position> {
        let mut next = self.clone();
        next.apply_move_in_place(choice, alphabet)?;
        Ok(next)
    }

    pub fn apply_move_in_place(&mut self, choice: MoveChoice, alphabet: u32) -> Result<()> {
        let rightmost = self.rightmost();
        let legal = match choice.actor {
            Actor::Warden => choice.value < rightmost,
            Actor::Prisoner => rightmost <= choice.value && choice.value < alphabet,
        };
        if !legal {
            return Err(Error::IllegalMove {
                actor: choice.actor,
                value: choice.value,
                rightmost,
                alphabet,
            });
        }
        self.0.rotate_right(1);
        self.0[0] = choice.value;
        Ok(())
    }

    /// Cyclic rotation starting at digit `k`: `x_k .. x_n x_1 .. x_{k-1}`.
    pub fn rotation(&self, k: usize) -> Position {
        let mut digits = self.0.clone();
        digits.rotate_left(k % self.0.len());
        Position(digits)
    }

    /// Parses `"2503"`, `"12,0,3"` or, for coins, `"THTTH"` (H = 0, T = 1).
    pub fn parse(text: &str) -> Result<Position> {
        let text = text.trim();
        if text.is_empty() {
            return Err(Error::Parse("empty position".into()));
        }
        let digits = if text.contains(',') {
            text.split(',')
                .map(|part| {
                    part.trim()
                        .parse::<u32>()
                        .map_err(|e| Error::Parse(format!("bad digit {part:?}: {e}")))
                })
                .collect::<Result<Vec<_>>>()?
        } else if text.chars().all(|c| matches!(c, 'H' | 'T' | 'h' | 't')) {
            return Self::parse_coins(text);
        } else {
            text.chars()
                .map(|c| {
                    c.to_digit(10)
                        .ok_or_else(|| Error::Parse(format!("bad digit {c:?} in {text:?}")))
                })
                .collect::<Result<Vec<_>>>()?
        };
        Position::new(digits)
    }

    pub fn parse_coins(text: &str) -> Result<Position> {
        let digits = text
            .trim()
            .chars()
            .map(|c| match c {
                'H' | 'h' => Ok(0),
                'T' | 't' => Ok(1),
                other => Err(Error::Parse(format!("bad coin {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Position::new(digits)
    }

    /// Digits concatenated for alphabets up to ten symbols, comma-separated above.
    pub fn render(&self, alphabet: u32) -> String {
        render_digits(&self.0, alphabet)
    }

    pub fn render_coins(&self) -> String {
        self.0.iter().map(|&d| if d == 0 { 'H' } else { 'T' }).collect()
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wide = self.0.iter().any(|&d| d >= 10);
        f.write_str(&render_digits(&self.0, if wide { u32::MAX } else { 10 }))
    }
}

pub fn render_digits(digits: &[u32], alphabet: u32) -> String {
    if alphabet <= 10 {
        digits.iter().map(|d| char::from_digit(*d, 10).unwrap_or('?')).collect()
    } else {
        digits.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Actor {
    Warden,
    Prisoner,
}

impl fmt::Display for Actor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Actor::Warden => "warden",
            Actor::Prisoner => "prisoner",
        })
    }
}

/// Who transfers the rightmost item, and the value written on it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MoveChoice {
    pub actor: Actor,
    pub value: u32,
}

impl MoveChoice {
    pub fn warden(value: u32) -> Self {
        MoveChoice { actor: Actor::Warden, value }
    }

    pub fn prisoner(value: u32) -> Self {
        MoveChoice { actor: Actor::Prisoner, value }
    }
}

/// The warden's half of a move.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WardenDecision {
    Pass,
    Decrease(u32),
}

/// Values the warden may write and values the prisoner may write after a pass.
pub fn legal_values(position: &Position, alphabet: u32) -> (Range<u32>, Range<u32>) {
    let v = position.rightmost();
    (0..v, v..alphabet.max(v))
}

/// True iff some cyclic rotation of `position` fits componentwise under `goal`.
pub fn rotation_dominates(position: &Position, goal: &[u32]) -> Result<bool> {
    let n = position.len();
    if goal.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: goal.len() });
    }
    let digits = position.digits();
    Ok((0..n).any(|k| (0..n).all(|i| digits[(i + k) % n] <= goal[i])))
}

/// Mixed-radix index with the leftmost digit most significant.
pub fn encode(position: &Position, alphabet: u32) -> Result<u64> {
    position.check_alphabet(alphabet)?;
    let mut index: u64 = 0;
    for &d in position.digits() {
        index = index
            .checked_mul(alphabet as u64)
            .and_then(|i| i.checked_add(d as u64))
            .ok_or(Error::IndexOutOfRange { index: u64::MAX, size: u64::MAX })?;
    }
    Ok(index)
}

pub fn decode(index: u64, alphabet: u32, n: usize) -> Result<Position> {
    let size = (alphabet as u128).pow(n as u32);
    if alphabet == 0 || n == 0 || index as u128 >= size {
        return Err(Error::IndexOutOfRange {
            index,
            size: size.min(u64::MAX as u128) as u64,
        });
    }
    let mut digits = vec![0; n];
    let mut rest = index;
    for slot in digits.iter_mut().rev() {
        *slot = (rest % alphabet as u64) as u32;
        rest /= alphabet as u64;
    }
    Ok(Position(digits))
}

/// Which variant of the game is being played.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GoalSpec {
    /// `n` dice with `m` sides; the goal is every die showing `m - 1`.
    Uniform { m: u32, n: usize },
    /// An arbitrary goal word; the alphabet is `0..=max(goal)`.
    Word { goal: Vec<u32> },
    /// A set of goal words with an optional move budget.
    Multi {
        alphabet: u32,
        n: usize,
        goals: BTreeSet<Vec<u32>>,
        limit: Option<u32>,
    },
}

impl GoalSpec {
    pub fn uniform(m: u32, n: usize) -> Result<Self> {
        let spec = GoalSpec::Uniform { m, n };
        spec.validate()?;
        Ok(spec)
    }

    pub fn word(goal: Vec<u32>) -> Result<Self> {
        let spec = GoalSpec::Word { goal };
        spec.validate()?;
        Ok(spec)
    }

    pub fn multi(
        alphabet: u32,
        n: usize,
        goals: impl IntoIterator<Item = Vec<u32>>,
        limit: Option<u32>,
    ) -> Result<Self> {
        let spec = GoalSpec::Multi { alphabet, n, goals: goals.into_iter().collect(), limit };
        spec.validate()?;
        Ok(spec)
    }

    /// Two ten-sided dice, every two-digit rendering of a prime wins, 19 moves.
    pub fn prime_puzzle() -> Self {
        let goals = (2..100u32)
            .filter(|&p| is_prime(p))
            .map(|p| vec![p / 10, p % 10])
            .collect();
        GoalSpec::Multi { alphabet: 10, n: 2, goals, limit: Some(19) }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            GoalSpec::Uniform { m, n } => {
                if *m == 0 || *n == 0 {
                    return Err(Error::InvalidSpec("uniform spec needs m >= 1 and n >= 1".into()));
                }
            }
            GoalSpec::Word { goal } => {
                if goal.is_empty() {
                    return Err(Error::InvalidSpec("goal word must be nonempty".into()));
                }
                if goal.contains(&u32::MAX) {
                    return Err(Error::InvalidSpec("goal digit too large".into()));
                }
            }
            GoalSpec::Multi { alphabet, n, goals, .. } => {
                if *alphabet == 0 || *n == 0 {
                    return Err(Error::InvalidSpec("multi-goal spec needs alphabet >= 1 and n >= 1".into()));
                }
                if goals.is_empty() {
                    return Err(Error::InvalidSpec("multi-goal spec needs at least one goal".into()));
                }
                for g in goals {
                    if g.len() != *n {
                        return Err(Error::LengthMismatch { expected: *n, got: g.len() });
                    }
                    if let Some(&digit) = g.iter().find(|&&d| d >= *alphabet) {
                        return Err(Error::DigitOutOfRange { digit, alphabet: *alphabet });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn alphabet(&self) -> u32 {
        match self {
            GoalSpec::Uniform { m, .. } => *m,
            GoalSpec::Word { goal } => goal.iter().copied().max().unwrap_or(0) + 1,
            GoalSpec::Multi { alphabet, .. } => *alphabet,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            GoalSpec::Uniform { n, .. } | GoalSpec::Multi { n, .. } => *n,
            GoalSpec::Word { goal } => goal.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn limit(&self) -> Option<u32> {
        match self {
            GoalSpec::Multi { limit, .. } => *limit,
            _ => None,
        }
    }

    /// The goal word of a Uniform or Word spec.
    pub fn single_goal(&self) -> Option<Vec<u32>> {
        match self {
            GoalSpec::Uniform { m, n } => Some(vec![m - 1; *n]),
            GoalSpec::Word { goal } => Some(goal.clone()),
            GoalSpec::Multi { .. } => None,
        }
    }

    pub fn goal_words(&self) -> Vec<Vec<u32>> {
        match self {
            GoalSpec::Multi { goals, .. } => goals.iter().cloned().collect(),
            _ => vec![self.single_goal().expect("single-goal spec")],
        }
    }

    pub fn is_goal(&self, position: &Position) -> bool {
        let digits = position.digits();
        match self {
            GoalSpec::Uniform { m, n } => digits.len() == *n && digits.iter().all(|&d| d == m - 1),
            GoalSpec::Word { goal } => digits == goal.as_slice(),
            GoalSpec::Multi { goals, .. } => goals.contains(digits),
        }
    }

    /// `A^n`, or `None` on overflow.
    pub fn state_count(&self) -> Option<u128> {
        (self.alphabet() as u128).checked_pow(u32::try_from(self.len()).ok()?)
    }

    pub fn check_position(&self, position: &Position) -> Result<()> {
        if position.len() != self.len() {
            return Err(Error::LengthMismatch { expected: self.len(), got: position.len() });
        }
        position.check_alphabet(self.alphabet())
    }

    pub fn apply_move(&self, position: &Position, choice: MoveChoice) -> Result<Position> {
        self.check_position(position)?;
        position.apply_move(choice, self.alphabet())
    }

    /// Parses `uniform:M,N`, `word:WORD`, `prime` or `multi:A,N,G1;G2[@LIMIT]`.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if text == "prime" {
            return Ok(Self::prime_puzzle());
        }
        let (kind, rest) = text
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("unrecognised spec {text:?}")))?;
        let int = |s: &str| {
            s.trim()
                .parse::<u64>()
                .map_err(|e| Error::Parse(format!("bad number {s:?}: {e}")))
        };
        match kind {
            "uniform" => {
                let (m, n) = rest
                    .split_once(',')
                    .ok_or_else(|| Error::Parse("expected uniform:M,N".into()))?;
                Self::uniform(int(m)? as u32, int(n)? as usize)
            }
            "word" => Self::word(Position::parse(rest)?.into_digits()),
            "multi" => {
                let (body, limit) = match rest.split_once('@') {
                    Some((body, limit)) => (body, Some(int(limit)? as u32)),
                    None => (rest, None),
                };
                let mut parts = body.splitn(3, ',');
                let (Some(a), Some(n), Some(goals)) = (parts.next(), parts.next(), parts.next())
                else {
                    return Err(Error::Parse("expected multi:A,N,G1;G2[@LIMIT]".into()));
                };
                let goals = goals
                    .split(';')
                    .map(|g| Position::parse(g).map(Position::into_digits))
                    .collect::<Result<Vec<_>>>()?;
                Self::multi(int(a)? as u32, int(n)? as usize, goals, limit)
            }
            other => Err(Error::Parse(format!("unknown spec kind {other:?}"))),
        }
    }
}

fn is_prime(p: u32) -> bool {
    p >= 2 && (2..p).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}


#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    fn word(alphabet: u32, n: usize) -> impl Strategy<Value = Vec<u32>> {
        proptest::collection::vec(0..alphabet, n)
    }

    proptest! {
        #[test]
        fn moves_preserve_shape((alphabet, digits, value) in (1u32..8, 1usize..6)
            .prop_flat_map(|(a, n)| (Just(a), word(a, n), 0..a)))
        {
            let p = Position::new(digits).unwrap();
            let (warden, prisoner) = legal_values(&p, alphabet);
            let actor = if warden.contains(&value) { Actor::Warden } else { Actor::Prisoner };
            let next = p.apply_move(MoveChoice { actor, value }, alphabet).unwrap();
            prop_assert_eq!(next.len(), p.len());
            prop_assert!(next.check_alphabet(alphabet).is_ok());
            prop_assert_eq!(warden.len() + prisoner.len(), alphabet as usize);
            prop_assert!(warden.end == prisoner.start);
        }

        #[test]
        fn rotation_dominance_is_rotation_invariant((digits, goal, k) in (1usize..6)
            .prop_flat_map(|n| (word(6, n), word(5, n), 0..n)))
        {
            let p = Position::new(digits).unwrap();
            prop_assert_eq!(
                rotation_dominates(&p.rotation(k), &goal).unwrap(),
                rotation_dominates(&p, &goal).unwrap()
            );
        }

        #[test]
        fn encode_decode_roundtrip((alphabet, n, index) in (1u32..10, 1usize..6)
            .prop_flat_map(|(a, n)| (Just(a), Just(n), 0..(a as u64).pow(n as u32))))
        {
            let p = decode(index, alphabet, n).unwrap();
            prop_assert_eq!(encode(&p, alphabet).unwrap(), index);
        }
    }
}
