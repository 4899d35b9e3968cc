//! Independent reference computations used to cross-check the solver.
//!
//! Nothing here touches the retrograde solver or its index arithmetic: the
//! searches walk the game through `Position::apply_move` directly.

use std::collections::{HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::game::{decode, encode, legal_values, GoalSpec, MoveChoice, Position};

/// Explicit move graph: every position's children, warden writes first.
struct MoveGraph {
    children: Vec<Vec<u32>>,
    split: Vec<usize>,
    goal: Vec<bool>,
}

impl MoveGraph {
    fn build(spec: &GoalSpec, max_states: u64) -> Result<Self> {
        spec.validate()?;
        let alphabet = spec.alphabet();
        let n = spec.len();
        let states = spec
            .state_count()
            .filter(|&s| s <= max_states as u128)
            .ok_or(Error::StateSpaceTooLarge {
                states: spec.state_count().unwrap_or(u128::MAX),
                cap: max_states,
            })? as u64;
        let mut graph = MoveGraph { children: Vec::new(), split: Vec::new(), goal: Vec::new() };
        for i in 0..states {
            let p = decode(i, alphabet, n)?;
            let (warden, prisoner) = legal_values(&p, alphabet);
            let moves = warden
                .map(MoveChoice::warden)
                .chain(prisoner.map(MoveChoice::prisoner))
                .map(|c| Ok(encode(&p.apply_move(c, alphabet)?, alphabet)? as u32))
                .collect::<Result<Vec<_>>>()?;
            graph.split.push(p.rightmost() as usize);
            graph.children.push(moves);
            graph.goal.push(spec.is_goal(&p));
        }
        Ok(graph)
    }
}

/// Remoteness of every position by backward induction over the explicit move
/// graph: a position is settled once every warden child is settled and some
/// prisoner child is. `None` marks unwinnable.
pub fn exhaustive_remoteness(spec: &GoalSpec, max_states: u64) -> Result<Vec<Option<u32>>> {
    let graph = MoveGraph::build(spec, max_states)?;
    let states = graph.children.len();
    // (parent, warden edge?) for every edge into a position
    let mut parents: Vec<Vec<(u32, bool)>> = vec![Vec::new(); states];
    for (p, kids) in graph.children.iter().enumerate() {
        for (k, &c) in kids.iter().enumerate() {
            parents[c as usize].push((p as u32, k < graph.split[p]));
        }
    }
    let mut warden_pending: Vec<usize> = graph.split.clone();
    let mut prisoner_ready = vec![false; states];
    let mut values: Vec<Option<u32>> = vec![None; states];
    let mut queue = VecDeque::new();
    for (i, &g) in graph.goal.iter().enumerate() {
        if g {
            values[i] = Some(0);
            queue.push_back(i);
        }
    }
    // breadth-first, so positions leave the queue in order of remoteness
    while let Some(c) = queue.pop_front() {
        let level = values[c].expect("queued positions are settled");
        for &(p, warden) in &parents[c] {
            let p = p as usize;
            if values[p].is_some() {
                continue;
            }
            if warden {
                warden_pending[p] -= 1;
            } else {
                prisoner_ready[p] = true;
            }
            if warden_pending[p] == 0 && prisoner_ready[p] {
                values[p] = Some(level + 1);
                queue.push_back(p);
            }
        }
    }
    Ok(values)
}

/// The same values by Jacobi iteration of the recurrence from "everything
/// unwinnable" down to its least fixed point. Quadratic in the longest game,
/// so only for small spaces.
pub fn value_iteration(spec: &GoalSpec, max_states: u64) -> Result<Vec<Option<u32>>> {
    let graph = MoveGraph::build(spec, max_states)?;
    const INF: u32 = u32::MAX;
    let mut values: Vec<u32> = graph.goal.iter().map(|&g| if g { 0 } else { INF }).collect();
    let mut next = values.clone();
    loop {
        for i in 0..values.len() {
            if graph.goal[i] {
                continue;
            }
            let (warden, prisoner) = graph.children[i].split_at(graph.split[i]);
            next[i] = bellman(&values, warden, prisoner);
        }
        if next == values {
            return Ok(values.into_iter().map(|v| (v != INF).then_some(v)).collect());
        }
        std::mem::swap(&mut values, &mut next);
    }
}

/// `1 + max(max over warden writes, min over prisoner writes)`, `u32::MAX`
/// standing for +infinity.
fn bellman(values: &[u32], warden: &[u32], prisoner: &[u32]) -> u32 {
    let worst = warden.iter().map(|&c| values[c as usize]).max().unwrap_or(0);
    let best = prisoner.iter().map(|&c| values[c as usize]).min().unwrap_or(u32::MAX);
    let v = worst.max(best);
    if v == u32::MAX {
        v
    } else {
        v + 1
    }
}

/// Remoteness of a goal word treated as a start, from a full remoteness vector.
pub fn exhaustive_goal_as_start(spec: &GoalSpec, values: &[Option<u32>]) -> Result<Option<u32>> {
    let goal = Position::new(spec.single_goal().ok_or(Error::NotSingleGoal)?)?;
    let alphabet = spec.alphabet();
    let (warden, prisoner) = legal_values(&goal, alphabet);
    let child = |c: MoveChoice| -> Result<u32> {
        Ok(encode(&goal.apply_move(c, alphabet)?, alphabet)? as u32)
    };
    let w = warden.map(|v| child(MoveChoice::warden(v))).collect::<Result<Vec<_>>>()?;
    let q = prisoner.map(|v| child(MoveChoice::prisoner(v))).collect::<Result<Vec<_>>>()?;
    let flat: Vec<u32> = values.iter().map(|v| v.unwrap_or(u32::MAX)).collect();
    let v = bellman(&flat, &w, &q);
    Ok((v != u32::MAX).then_some(v))
}

/// Depth-limited minimax: the fewest moves within which the prisoner can force
/// a goal from `start`, or `None` if the warden can hold out for `depth` moves.
pub fn bounded_minimax(spec: &GoalSpec, start: &Position, depth: u32) -> Result<Option<u32>> {
    spec.check_position(start)?;
    let mut search = DepthSearch { spec, alphabet: spec.alphabet(), memo: HashMap::new() };
    for d in 0..=depth {
        if search.forced_within(start, d) {
            return Ok(Some(d));
        }
    }
    Ok(None)
}

struct DepthSearch<'a> {
    spec: &'a GoalSpec,
    alphabet: u32,
    memo: HashMap<(Position, u32), bool>,
}

impl DepthSearch<'_> {
    fn forced_within(&mut self, p: &Position, depth: u32) -> bool {
        if self.spec.is_goal(p) {
            return true;
        }
        if depth == 0 {
            return false;
        }
        if let Some(&known) = self.memo.get(&(p.clone(), depth)) {
            return known;
        }
        let (warden, prisoner) = legal_values(p, self.alphabet);
        let mut win = true;
        for v in warden {
            if !self.forced_within(&p.shifted_in(v), depth - 1) {
                win = false;
                break;
            }
        }
        if win {
            win = prisoner.into_iter().any(|v| self.forced_within(&p.shifted_in(v), depth - 1));
        }
        self.memo.insert((p.clone(), depth), win);
        win
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_coin_by_hand() {
        let spec = GoalSpec::uniform(2, 1).unwrap();
        let values = exhaustive_remoteness(&spec, 1 << 20).unwrap();
        assert_eq!(values, vec![Some(1), Some(0)]);
        assert_eq!(exhaustive_goal_as_start(&spec, &values).unwrap(), Some(2));
    }

    #[test]
    fn early_levels_of_three_dice() {
        let spec = GoalSpec::uniform(3, 3).unwrap();
        let values = value_iteration(&spec, 1 << 20).unwrap();
        let r = |s: &str| values[encode(&Position::parse(s).unwrap(), 3).unwrap() as usize];
        assert_eq!(r("220"), Some(1));
        assert_eq!(r("200"), Some(2));
        assert_eq!(r("000"), Some(3));
        assert_eq!(r("001"), Some(4));
    }

    #[test]
    fn depth_search_matches_value_iteration() {
        let spec = GoalSpec::uniform(3, 3).unwrap();
        let values = exhaustive_remoteness(&spec, 1 << 20).unwrap();
        for (i, v) in values.iter().enumerate() {
            let p = decode(i as u64, 3, 3).unwrap();
            assert_eq!(bounded_minimax(&spec, &p, 27).unwrap(), *v);
            if let Some(v) = v.filter(|&v| v > 0) {
                assert_eq!(bounded_minimax(&spec, &p, v - 1).unwrap(), None);
            }
        }
    }

    #[test]
    fn backward_induction_matches_value_iteration() {
        for (m, n) in [(1, 3), (2, 1), (2, 4), (3, 3), (4, 2), (5, 1)] {
            let spec = GoalSpec::uniform(m, n).unwrap();
            assert_eq!(
                exhaustive_remoteness(&spec, 1 << 12).unwrap(),
                value_iteration(&spec, 1 << 12).unwrap()
            );
        }
        let spec = GoalSpec::word(vec![3, 1, 4]).unwrap();
        assert_eq!(exhaustive_remoteness(&spec, 1 << 12).unwrap(), value_iteration(&spec, 1 << 12).unwrap());
        let prime = GoalSpec::prime_puzzle();
        assert_eq!(exhaustive_remoteness(&prime, 100).unwrap(), value_iteration(&prime, 100).unwrap());
    }

    #[test]
    fn refuses_large_spaces() {
        let spec = GoalSpec::uniform(10, 6).unwrap();
        assert!(matches!(
            exhaustive_remoteness(&spec, 1000),
            Err(Error::StateSpaceTooLarge { .. })
        ));
    }
}
