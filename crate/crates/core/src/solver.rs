//! Retrograde solver: exact remoteness for every position.
//!
//! For a non-goal position whose rightmost digit is `v`,
//!
//! ```text
//! r(p) = 1 + max( max_{w < v} r(child_w), min_{u >= v} r(child_u) )
//! ```
//!
//! where `child_d` is `p` with `d` written on the left. The table is filled
//! level by level outward from the goals: a position is settled at level
//! `k + 1` the moment its last warden option and its first prisoner option
//! have been settled at levels `<= k`.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::game::{decode, encode, GoalSpec, MoveChoice, Position, WardenDecision};

/// Sentinel for positions from which the warden can hold out forever.
pub const UNWINNABLE: u32 = u32::MAX;

pub const DEFAULT_STATE_CAP: u64 = 100_000_000;

#[derive(Clone, Debug)]
pub struct RemotenessTable {
    spec: GoalSpec,
    alphabet: u32,
    n: usize,
    values: Vec<u32>,
    goal_as_start: Option<u32>,
    decisions: OnceLock<Vec<Decision>>,
}

impl PartialEq for RemotenessTable {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec && self.values == other.values && self.goal_as_start == other.goal_as_start
    }
}

impl Eq for RemotenessTable {}

/// Best replies at one position: the warden's decrease (or `NO_DECREASE` to
/// pass) and the prisoner's value after a pass.
#[derive(Clone, Copy, Debug)]
struct Decision {
    warden: u32,
    prisoner: u32,
}

const NO_DECREASE: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct BoundedWin {
    pub winnable: bool,
    pub moves: Option<u32>,
}

pub fn solve(spec: &GoalSpec) -> Result<RemotenessTable> {
    solve_with_cap(spec, DEFAULT_STATE_CAP)
}

pub fn solve_with_cap(spec: &GoalSpec, cap: u64) -> Result<RemotenessTable> {
    spec.validate()?;
    let states = match spec.state_count() {
        Some(s) if s <= cap as u128 => s as usize,
        other => {
            return Err(Error::StateSpaceTooLarge { states: other.unwrap_or(u128::MAX), cap })
        }
    };
    let alphabet = spec.alphabet();
    let n = spec.len();
    let a = alphabet as usize;
    let high = states / a;

    let mut values = vec![UNWINNABLE; states];
    let mut frontier = Vec::new();
    for goal in spec.goal_words() {
        let idx = encode(&Position::new(goal)?, alphabet)? as usize;
        values[idx] = 0;
        frontier.push(idx);
    }
    frontier.sort_unstable();

    // Positions sharing their first n-1 digits form a block with one common
    // set of children: child d of block b is d * high + b. A position in the
    // block whose rightmost digit is x is settled once children 0..x are
    // settled (all warden options) and some child d >= x is (the pass).
    let mut prefix = vec![0u32; high]; // children 0..prefix settled
    let mut reach = vec![0u32; high]; // 1 + largest settled child
    let mut next_x = vec![0u32; high]; // positions below this are settled

    let mut level = 0u32;
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &q in &frontier {
            let written = (q / high) as u32;
            let block = q % high;
            reach[block] = reach[block].max(written + 1);
            if written == prefix[block] {
                let mut k = prefix[block];
                while k < alphabet && values[k as usize * high + block] <= level {
                    k += 1;
                }
                prefix[block] = k;
            }
            let bound = prefix[block].min(reach[block] - 1);
            for x in next_x[block]..=bound {
                let p = block * a + x as usize;
                if values[p] == UNWINNABLE {
                    values[p] = level + 1;
                    next.push(p);
                }
            }
            next_x[block] = next_x[block].max(bound + 1);
        }
        frontier = next;
        level += 1;
    }

    let mut table = RemotenessTable {
        spec: spec.clone(),
        alphabet,
        n,
        values,
        goal_as_start: None,
        decisions: OnceLock::new(),
    };
    if let Some(goal) = spec.single_goal() {
        let idx = encode(&Position::new(goal)?, alphabet)? as usize;
        table.goal_as_start = Some(table.step_value(idx));
    }
    Ok(table)
}

impl RemotenessTable {
    /// Rebuilds a table from stored values, checking shape and goal entries.
    pub fn from_parts(spec: GoalSpec, values: Vec<u32>, goal_as_start: Option<u32>) -> Result<Self> {
        spec.validate()?;
        let states = spec.state_count().unwrap_or(u128::MAX);
        if values.len() as u128 != states {
            return Err(Error::Cache(format!("expected {states} values, found {}", values.len())));
        }
        let alphabet = spec.alphabet();
        let n = spec.len();
        for goal in spec.goal_words() {
            let idx = encode(&Position::new(goal)?, alphabet)? as usize;
            if values[idx] != 0 {
                return Err(Error::Cache("goal entry is not zero".into()));
            }
        }
        if goal_as_start.is_some() != spec.single_goal().is_some() {
            return Err(Error::Cache("goal_as_start does not match the spec kind".into()));
        }
        Ok(RemotenessTable { spec, alphabet, n, values, goal_as_start, decisions: OnceLock::new() })
    }

    pub fn spec(&self) -> &GoalSpec {
        &self.spec
    }

    pub fn alphabet(&self) -> u32 {
        self.alphabet
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Raw entries indexed by `encode`, `UNWINNABLE` for unwinnable positions.
    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn goal_as_start(&self) -> Option<u32> {
        self.goal_as_start
    }

    pub fn index_of(&self, p: &Position) -> Result<usize> {
        self.spec.check_position(p)?;
        Ok(encode(p, self.alphabet)? as usize)
    }

    pub fn position_at(&self, index: usize) -> Position {
        decode(index as u64, self.alphabet, self.n).expect("index within table")
    }

    /// Remoteness with the goal as an end point; `None` when unwinnable.
    pub fn remoteness(&self, p: &Position) -> Result<Option<u32>> {
        let v = self.values[self.index_of(p)?];
        Ok((v != UNWINNABLE).then_some(v))
    }

    /// Like `remoteness`, but a single goal counts as a start needing a full loop.
    pub fn remoteness_from_start(&self, p: &Position) -> Result<Option<u32>> {
        match self.goal_as_start {
            Some(r) if self.spec.is_goal(p) => Ok((r != UNWINNABLE).then_some(r)),
            _ => self.remoteness(p),
        }
    }

    pub fn winnable_count(&self) -> usize {
        self.values.iter().filter(|&&v| v != UNWINNABLE).count()
    }

    fn child(&self, idx: usize, written: u32) -> usize {
        let a = self.alphabet as usize;
        written as usize * (self.values.len() / a) + idx / a
    }

    /// Largest warden-branch value and smallest prisoner-branch value, each
    /// with the smallest value achieving it.
    fn branches(&self, idx: usize) -> (Option<(u32, u32)>, (u32, u32)) {
        let erased = (idx % self.alphabet as usize) as u32;
        let mut warden: Option<(u32, u32)> = None;
        for w in 0..erased {
            let r = self.values[self.child(idx, w)];
            if warden.is_none_or(|(best, _)| r > best) {
                warden = Some((r, w));
            }
        }
        let mut prisoner = (UNWINNABLE, erased);
        let mut first = true;
        for u in erased..self.alphabet {
            let r = self.values[self.child(idx, u)];
            if first || r < prisoner.0 {
                prisoner = (r, u);
                first = false;
            }
        }
        (warden, prisoner)
    }

    /// Right-hand side of the recurrence evaluated from stored child values.
    fn step_value(&self, idx: usize) -> u32 {
        let (warden, (prisoner, _)) = self.branches(idx);
        let worst = warden.map_or(prisoner, |(w, _)| w.max(prisoner));
        if worst == UNWINNABLE {
            UNWINNABLE
        } else {
            worst + 1
        }
    }

    /// Per-block prefix maxima and suffix minima over the shared children.
    fn decisions(&self) -> &[Decision] {
        self.decisions.get_or_init(|| {
            let a = self.alphabet as usize;
            let high = self.values.len() / a;
            let mut out = vec![Decision { warden: NO_DECREASE, prisoner: 0 }; self.values.len()];
            let mut suffix = vec![(0u32, 0u32); a];
            for block in 0..high {
                let child = |d: usize| self.values[d * high + block];
                let mut best = (UNWINNABLE, a as u32 - 1);
                for d in (0..a).rev() {
                    if child(d) <= best.0 {
                        best = (child(d), d as u32);
                    }
                    suffix[d] = best;
                }
                let mut worst: Option<(u32, u32)> = None;
                for x in 0..a {
                    let (pass_value, prisoner) = suffix[x];
                    let warden = match worst {
                        Some((w, value)) if w >= pass_value => value,
                        _ => NO_DECREASE,
                    };
                    out[block * a + x] = Decision { warden, prisoner };
                    if worst.is_none_or(|(w, _)| child(x) > w) {
                        worst = Some((child(x), x as u32));
                    }
                }
            }
            out
        })
    }

    /// The move made from `p` under optimal play by both sides. The warden
    /// lowers whenever that is at least as slow for the prisoner as passing;
    /// ties between values go to the smallest.
    pub fn optimal_move(&self, p: &Position) -> Result<MoveChoice> {
        let idx = self.index_of(p)?;
        let r = if self.spec.is_goal(p) {
            self.goal_as_start.ok_or_else(|| Error::Terminal(p.render(self.alphabet)))?
        } else {
            self.values[idx]
        };
        if r == UNWINNABLE {
            return Err(Error::NoWinPath(p.render(self.alphabet)));
        }
        let decision = self.decisions()[idx];
        let choice = match decision.warden {
            NO_DECREASE => MoveChoice::prisoner(decision.prisoner),
            w => MoveChoice::warden(w),
        };
        if self.values[self.child(idx, choice.value)] != r - 1 {
            return Err(Error::ChainBroken(r));
        }
        Ok(choice)
    }

    /// The warden's remoteness-maximising decision. Ties go to the larger
    /// resulting remoteness, then to a decrease over a pass, then to the
    /// smallest value.
    pub fn warden_best(&self, p: &Position) -> Result<WardenDecision> {
        let idx = self.index_of(p)?;
        Ok(match self.decisions()[idx].warden {
            NO_DECREASE => WardenDecision::Pass,
            w => WardenDecision::Decrease(w),
        })
    }

    /// The prisoner's remoteness-minimising value after a pass; ties go to
    /// the smallest value.
    pub fn prisoner_best(&self, p: &Position) -> Result<u32> {
        let idx = self.index_of(p)?;
        Ok(self.decisions()[idx].prisoner)
    }

    /// True iff every settled non-goal entry equals its recurrence value and
    /// every unsettled one evaluates to `UNWINNABLE`.
    pub fn recurrence_holds(&self) -> bool {
        let a = self.alphabet as usize;
        let high = self.values.len() / a;
        let mut suffix_min = vec![UNWINNABLE; a + 1];
        for block in 0..high {
            let child = |d: usize| self.values[d * high + block];
            for d in (0..a).rev() {
                suffix_min[d] = suffix_min[d + 1].min(child(d));
            }
            let mut warden_max = 0;
            for x in 0..a {
                let idx = block * a + x;
                let worst = warden_max.max(suffix_min[x]);
                let expected = if worst == UNWINNABLE { UNWINNABLE } else { worst + 1 };
                let stored = self.values[idx];
                let ok = if stored == 0 {
                    self.spec.is_goal(&self.position_at(idx))
                } else {
                    stored == expected
                };
                if !ok {
                    return false;
                }
                warden_max = warden_max.max(child(x));
            }
        }
        true
    }

    /// `remoteness(alpha a) <= remoteness(alpha b)` for `a < b`, the goal
    /// counting as a start.
    pub fn last_digit_monotone(&self) -> bool {
        let a = self.alphabet as usize;
        let goal = self
            .spec
            .single_goal()
            .map(|g| encode(&Position::new(g).unwrap(), self.alphabet).unwrap() as usize);
        let at = |idx: usize| match (goal, self.goal_as_start) {
            (Some(g), Some(r)) if g == idx => r,
            _ => self.values[idx],
        };
        self.values.chunks(a).enumerate().all(|(prefix, row)| {
            (1..row.len()).all(|d| at(prefix * a + d - 1) <= at(prefix * a + d))
        })
    }

    /// Exactly one position per remoteness `0..=L`, the goal taking both 0
    /// and `L` (as a start), where `L` is the number of winnable positions.
    pub fn verify_single_chain(&self) -> bool {
        let Some(top) = self.goal_as_start else {
            return false;
        };
        let winnable = self.winnable_count();
        let mut seen = vec![false; winnable + 1];
        for &v in self.values.iter().chain(std::iter::once(&top)) {
            if v == UNWINNABLE {
                continue;
            }
            match seen.get_mut(v as usize) {
                Some(slot) if !*slot => *slot = true,
                _ => return false,
            }
        }
        top as usize == winnable && seen.iter().all(|&s| s)
    }

    /// Winnable positions ordered by remoteness, starting with the goal.
    fn chain_positions(&self) -> Result<Vec<usize>> {
        if !self.verify_single_chain() {
            return Err(Error::ChainBroken(0));
        }
        let mut order = vec![0usize; self.winnable_count()];
        for (idx, &v) in self.values.iter().enumerate() {
            if v != UNWINNABLE {
                order[v as usize] = idx;
            }
        }
        Ok(order)
    }

    /// The optimal-play loop, printed from the all-zeros window.
    pub fn build_chain(&self) -> Result<ChainSequence> {
        let goal = self.spec.single_goal().ok_or(Error::NotSingleGoal)?;
        let order = self.chain_positions()?;
        let len = order.len();
        let n = self.n;
        let mut digits = Vec::with_capacity(len);
        for k in 1..=len {
            let prev = self.position_at(order[k - 1]);
            let cur = self.position_at(order[k % len]);
            if prev.digits()[1..] != cur.digits()[..n - 1] {
                return Err(Error::ChainBroken(k as u32));
            }
            digits.push(cur.rightmost());
        }
        // digits[k - 1] ends the window of the position at remoteness k
        let zeros = self.remoteness_rank_of_zeros()?;
        let start = (zeros + len * n - n) % len;
        digits.rotate_left(start);
        Ok(ChainSequence { goal, alphabet: self.alphabet, digits })
    }

    /// Remoteness of the all-zeros word on the loop, in `1..=L`.
    fn remoteness_rank_of_zeros(&self) -> Result<usize> {
        let len = self.winnable_count();
        match self.values[0] {
            UNWINNABLE => Err(Error::WordNotPresent("0".repeat(self.n))),
            0 => Ok(len),
            r => Ok(r as usize),
        }
    }

    /// Index of `word`'s window in the canonical loop, by remoteness arithmetic.
    pub fn locate(&self, word: &Position) -> Result<usize> {
        self.spec.single_goal().ok_or(Error::NotSingleGoal)?;
        let len = self.winnable_count();
        let r = match self.remoteness(word)? {
            None => return Err(Error::WordNotPresent(word.render(self.alphabet))),
            Some(0) => len,
            Some(r) => r as usize,
        };
        let zeros = self.remoteness_rank_of_zeros()?;
        Ok((r + len - zeros) % len)
    }

    pub fn within(&self, p: &Position, limit: u32) -> Result<BoundedWin> {
        Ok(match self.remoteness(p)? {
            Some(r) if r <= limit => BoundedWin { winnable: true, moves: Some(r) },
            _ => BoundedWin { winnable: false, moves: None },
        })
    }

    /// Win-within-limit query for a spec that carries a move limit.
    pub fn bounded_win(&self, p: &Position) -> Result<BoundedWin> {
        let limit = self
            .spec
            .limit()
            .ok_or_else(|| Error::InvalidSpec("spec has no move limit".into()))?;
        self.within(p, limit)
    }
}

/// The loop of digits encoding the optimal-play chain.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct ChainSequence {
    pub goal: Vec<u32>,
    pub alphabet: u32,
    /// Canonical rotation: the first window is all zeros.
    pub digits: Vec<u32>,
}

impl ChainSequence {
    pub fn render(&self) -> String {
        crate::game::render_digits(&self.digits, self.alphabet)
    }

    /// Loop with the goal repeated in front, e.g. `(222)000100...`.
    pub fn render_with_goal(&self) -> String {
        format!(
            "({}){}",
            crate::game::render_digits(&self.goal, self.alphabet),
            self.render()
        )
    }

    pub fn windows(&self) -> Vec<Vec<u32>> {
        crate::sequences::cyclic_windows(&self.digits, self.goal.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pos(s: &str) -> Position {
        Position::parse(s).unwrap()
    }

    const PRINTED_ORDER: &str = "222 220 200 000 001 010 100 002 020 201 011 110 101 012 \
                               120 202 021 210 102 022 221 211 111 112 121 212 122";

    #[test]
    fn three_dice_remoteness_list() {
        let table = solve(&GoalSpec::uniform(3, 3).unwrap()).unwrap();
        for (r, p) in PRINTED_ORDER.split_whitespace().enumerate() {
            assert_eq!(table.remoteness(&pos(p)).unwrap(), Some(r as u32), "{p}");
        }
        assert_eq!(table.goal_as_start(), Some(27));
        assert!(table.verify_single_chain());
        assert!(table.recurrence_holds());
    }

    #[test]
    fn goal_as_start_small_cases() {
        assert_eq!(solve(&GoalSpec::uniform(2, 4).unwrap()).unwrap().goal_as_start(), Some(16));
        assert_eq!(solve(&GoalSpec::uniform(2, 1).unwrap()).unwrap().goal_as_start(), Some(2));
        assert_eq!(solve(&GoalSpec::uniform(1, 3).unwrap()).unwrap().goal_as_start(), Some(1));
        assert_eq!(solve(&GoalSpec::prime_puzzle()).unwrap().goal_as_start(), None);
    }

    #[test]
    fn optimal_moves() {
        let table = solve(&GoalSpec::uniform(3, 3).unwrap()).unwrap();
        assert_eq!(table.optimal_move(&pos("220")).unwrap(), MoveChoice::prisoner(2));
        assert_eq!(table.optimal_move(&pos("001")).unwrap(), MoveChoice::warden(0));
        assert_eq!(table.warden_best(&pos("002")).unwrap(), WardenDecision::Decrease(1));
        assert_eq!(table.warden_best(&pos("220")).unwrap(), WardenDecision::Pass);
        // from the goal as a start the first step is 221
        assert_eq!(table.optimal_move(&pos("222")).unwrap(), MoveChoice::warden(1));
    }

    #[test]
    fn word_goal_unwinnable() {
        let table = solve(&GoalSpec::word(vec![3, 1, 4]).unwrap()).unwrap();
        assert_eq!(table.remoteness(&pos("402")).unwrap(), None);
        assert!(table.remoteness(&pos("042")).unwrap().is_some());
        assert!(matches!(table.optimal_move(&pos("402")), Err(Error::NoWinPath(_))));
    }

    #[test]
    fn prime_goal_is_zero() {
        let spec = GoalSpec::prime_puzzle();
        let table = solve(&spec).unwrap();
        assert_eq!(table.remoteness(&pos("02")).unwrap(), Some(0));
        assert_eq!(
            table.bounded_win(&pos("02")).unwrap(),
            BoundedWin { winnable: true, moves: Some(0) }
        );
        assert!(matches!(table.optimal_move(&pos("02")), Err(Error::Terminal(_))));
    }

    #[test]
    fn chains() {
        let chain = solve(&GoalSpec::uniform(3, 3).unwrap()).unwrap().build_chain().unwrap();
        assert_eq!(chain.render_with_goal(), "(222)000100201101202102211121222");
        let chain = solve(&GoalSpec::uniform(2, 4).unwrap()).unwrap().build_chain().unwrap();
        assert_eq!(chain.render_with_goal(), "(1111)0000100110101111");
        let chain = solve(&GoalSpec::word(vec![2, 1, 3]).unwrap()).unwrap().build_chain().unwrap();
        assert_eq!(chain.render_with_goal(), "(213)00010020030110120131021031112113202203212213");
        assert!(solve(&GoalSpec::prime_puzzle()).unwrap().build_chain().is_err());
    }

    #[test]
    fn locate_by_remoteness() {
        let table = solve(&GoalSpec::uniform(3, 3).unwrap()).unwrap();
        assert_eq!(table.locate(&pos("000")).unwrap(), 0);
        assert_eq!(table.locate(&pos("222")).unwrap(), 24);
        assert_eq!(table.locate(&pos("220")).unwrap(), 25);
        let table = solve(&GoalSpec::word(vec![3, 1, 4]).unwrap()).unwrap();
        assert!(matches!(table.locate(&pos("402")), Err(Error::WordNotPresent(_))));
    }

    #[test]
    fn single_symbol_alphabet() {
        let table = solve(&GoalSpec::uniform(1, 4).unwrap()).unwrap();
        assert_eq!(table.remoteness(&pos("0000")).unwrap(), Some(0));
        assert_eq!(table.build_chain().unwrap().render(), "0");
    }

    #[test]
    fn state_cap() {
        let err = solve_with_cap(&GoalSpec::uniform(10, 5).unwrap(), 1000).unwrap_err();
        assert!(matches!(err, Error::StateSpaceTooLarge { states: 100_000, cap: 1000 }));
    }

    #[test]
    fn monotone_with_goal_as_start() {
        let table = solve(&GoalSpec::uniform(3, 3).unwrap()).unwrap();
        assert!(table.last_digit_monotone());
        let start = |s| table.remoteness_from_start(&pos(s)).unwrap().unwrap();
        assert!(start("220") < start("221") && start("221") < start("222"));
    }
}
