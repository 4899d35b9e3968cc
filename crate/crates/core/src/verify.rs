//! Structural checks over whole families of uniform games.

use serde::Serialize;

use crate::error::Result;
use crate::game::{GoalSpec, Position};
use crate::sequences::{fkm, greedy_granddaddy};
use crate::solver::solve;

/// Every `(m, n)` with `m^n <= max_states`. The one-symbol game has a single
/// state at every length, so it is only listed up to length 4.
pub fn uniform_shapes(max_states: u64) -> Vec<(u32, usize)> {
    let mut out = Vec::new();
    for m in 1..=max_states.min(u32::MAX as u64) as u32 {
        for n in 1.. {
            match (m as u64).checked_pow(n as u32) {
                Some(s) if s <= max_states && (m > 1 || n <= 4) => out.push((m, n)),
                _ => break,
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct UniformReport {
    pub m: u32,
    pub n: usize,
    /// Game chain, greedy construction and Lyndon concatenation coincide.
    pub oracle_equivalence: bool,
    /// One position per remoteness, the longest game being `m^n` from `(m-1)^n`.
    pub single_chain: bool,
    /// Remoteness never decreases as the last digit grows.
    pub monotone: bool,
    pub recurrence: bool,
}

impl UniformReport {
    pub fn passed(&self) -> bool {
        self.oracle_equivalence && self.single_chain && self.monotone && self.recurrence
    }
}

pub fn check_uniform(m: u32, n: usize) -> Result<UniformReport> {
    let spec = GoalSpec::uniform(m, n)?;
    let table = solve(&spec)?;
    let states = m.pow(n as u32);
    let single_chain = table.verify_single_chain()
        && table.goal_as_start() == Some(states)
        && table.remoteness_from_start(&Position::new(vec![m - 1; n])?)? == Some(states);
    let oracle_equivalence = match table.build_chain() {
        Ok(chain) => {
            chain.digits == greedy_granddaddy(m, n)?.digits && chain.digits == fkm(m, n)?.digits
        }
        Err(_) => false,
    };
    Ok(UniformReport {
        m,
        n,
        oracle_equivalence,
        single_chain,
        monotone: table.last_digit_monotone(),
        recurrence: table.recurrence_holds(),
    })
}
