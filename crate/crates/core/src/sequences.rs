//! Classical de Bruijn constructions and verifiers.
//!
//! These are deliberately independent of the game solver so they can serve
//! as oracles for it: a greedy smallest-digit construction, the
//! Fredricksen-Kessler-Maiorana concatenation of Lyndon words, and an
//! exhaustive backtracking enumeration.

use std::collections::HashSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{render_digits, rotation_dominates, Position};

/// Default ceiling on `m^n` for the constructions below.
pub const DEFAULT_SEQUENCE_CAP: u64 = 1 << 26;

/// Ceiling on the number of sequences `enumerate_all` will produce.
pub const ENUMERATION_GUARD: f64 = 1e5;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct DeBruijnSequence {
    pub m: u32,
    pub n: usize,
    pub digits: Vec<u32>,
}

impl DeBruijnSequence {
    pub fn render(&self) -> String {
        render_digits(&self.digits, self.m)
    }

    /// `{m, n, digits, canonical: true}`
    pub fn to_document(&self) -> serde_json::Value {
        serde_json::json!({
            "m": self.m,
            "n": self.n,
            "digits": self.render(),
            "canonical": true,
        })
    }
}

fn checked_size(m: u32, n: usize, cap: u64) -> Result<usize> {
    match (m as u128).checked_pow(n as u32) {
        Some(s) if m >= 1 && n >= 1 && s <= cap as u128 => Ok(s as usize),
        s => Err(Error::StateSpaceTooLarge { states: s.unwrap_or(u128::MAX), cap }),
    }
}

/// The `n`-digit windows of `digits` read cyclically, one per start index.
pub fn cyclic_windows(digits: &[u32], n: usize) -> Vec<Vec<u32>> {
    let len = digits.len();
    (0..len)
        .map(|i| (0..n).map(|j| digits[(i + j) % len]).collect())
        .collect()
}

/// Rotates a loop so it starts with the window `0^n`, if present.
pub fn canonical_rotation(digits: &[u32], n: usize) -> Option<Vec<u32>> {
    let start = cyclic_windows(digits, n)
        .iter()
        .position(|w| w.iter().all(|&d| d == 0))?;
    let mut out = digits.to_vec();
    out.rotate_left(start);
    Some(out)
}

/// Lexicographically minimal de Bruijn sequence by greedy construction.
///
/// Starting from the window `(m-1)^n`, keep appending the smallest digit
/// whose new window has not been seen. The loop is then read from `0^n`.
pub fn greedy_granddaddy(m: u32, n: usize) -> Result<DeBruijnSequence> {
    greedy_granddaddy_with_cap(m, n, DEFAULT_SEQUENCE_CAP)
}

pub fn greedy_granddaddy_with_cap(m: u32, n: usize, cap: u64) -> Result<DeBruijnSequence> {
    let size = checked_size(m, n, cap)?;
    let top = m - 1;
    let high = size / m as usize;
    let mut seen = vec![false; size];
    let mut window = size - 1;
    seen[window] = true;
    // windows sharing a prefix are used in increasing order of their last
    // digit, so each prefix keeps a cursor to its smallest unused digit
    let mut cursor = vec![0usize; high];
    let mut out = Vec::with_capacity(size);
    while out.len() < size {
        let prefix = window % high;
        let base = prefix * m as usize;
        let mut d = cursor[prefix];
        while d < m as usize && seen[base + d] {
            d += 1;
        }
        cursor[prefix] = d;
        if d == m as usize {
            break;
        }
        window = base + d;
        seen[window] = true;
        out.push(d as u32);
    }
    // the final window returns to (m-1)^n and closes the loop
    if out.len() + 1 == size {
        out.push(top);
    }
    if out.len() != size {
        return Err(Error::ChainBroken(out.len() as u32));
    }
    let digits = canonical_rotation(&out, n).expect("loop contains 0^n");
    Ok(DeBruijnSequence { m, n, digits })
}

/// Lyndon words over `0..m` of length dividing `n`, in lexicographic order,
/// concatenated.
pub fn fkm(m: u32, n: usize) -> Result<DeBruijnSequence> {
    fkm_with_cap(m, n, DEFAULT_SEQUENCE_CAP)
}

pub fn fkm_with_cap(m: u32, n: usize, cap: u64) -> Result<DeBruijnSequence> {
    let size = checked_size(m, n, cap)?;
    let mut digits = Vec::with_capacity(size);
    for word in lyndon_words(m, n) {
        if n.is_multiple_of(word.len()) {
            digits.extend_from_slice(&word);
        }
    }
    Ok(DeBruijnSequence { m, n, digits })
}

/// All Lyndon words over `0..m` of length at most `n`, in lexicographic order.
pub fn lyndon_words(m: u32, n: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    if m == 1 {
        out.push(vec![0]);
        return out;
    }
    let mut w: Vec<u32> = vec![0];
    while !w.is_empty() {
        out.push(w.clone());
        let len = w.len();
        while w.len() < n {
            let d = w[w.len() - len];
            w.push(d);
        }
        while w.last() == Some(&(m - 1)) {
            w.pop();
        }
        if let Some(last) = w.last_mut() {
            *last += 1;
        }
    }
    out
}

/// Each of the `m^n` words occurs exactly once as a cyclic window.
pub fn is_de_bruijn(digits: &[u32], m: u32, n: usize) -> bool {
    let Some(size) = (m as u128).checked_pow(n as u32) else {
        return false;
    };
    if n == 0 || digits.len() as u128 != size || digits.iter().any(|&d| d >= m) {
        return false;
    }
    let mut seen = HashSet::with_capacity(digits.len());
    cyclic_windows(digits, n).into_iter().all(|w| seen.insert(w))
}

/// Windows are exactly the words that fit under some rotation of `goal`, each once.
pub fn is_generalized(digits: &[u32], goal: &[u32]) -> bool {
    let n = goal.len();
    if n == 0 || digits.len() as u128 != count_winnable_brute(goal) {
        return false;
    }
    let mut seen = HashSet::with_capacity(digits.len());
    cyclic_windows(digits, n).into_iter().all(|w| {
        let fits = Position::new(w.clone())
            .and_then(|p| rotation_dominates(&p, goal))
            .unwrap_or(false);
        fits && seen.insert(w)
    })
}

/// Number of de Bruijn loops: `(m!)^(m^(n-1)) / m^n`, as a float.
pub fn de_bruijn_count(m: u32, n: usize) -> f64 {
    let log_fact: f64 = (1..=m).map(|k| (k as f64).ln()).sum();
    let log = log_fact * (m as f64).powi(n as i32 - 1) - (n as f64) * (m as f64).ln();
    log.exp()
}

/// Every de Bruijn sequence for `(m, n)` in its rotation starting with `0^n`,
/// in lexicographic order.
pub fn enumerate_all(m: u32, n: usize) -> Result<Vec<DeBruijnSequence>> {
    let count = de_bruijn_count(m, n);
    if m == 0 || n == 0 || count.round() > ENUMERATION_GUARD {
        return Err(Error::SearchBudgetExceeded(ENUMERATION_GUARD as usize));
    }
    let size = checked_size(m, n, u64::MAX)?;
    if m == 1 {
        return Ok(vec![DeBruijnSequence { m, n, digits: vec![0] }]);
    }
    let high = size / m as usize;
    let mut seen = vec![false; size];
    seen[0] = true;
    let mut digits = vec![0u32; n];
    let mut out = Vec::new();
    extend(m, n, high, 0, &mut seen, &mut digits, &mut out);
    Ok(out)
}

fn extend(
    m: u32,
    n: usize,
    high: usize,
    window: usize,
    seen: &mut [bool],
    digits: &mut Vec<u32>,
    out: &mut Vec<DeBruijnSequence>,
) {
    let size = seen.len();
    if digits.len() == size {
        // the n - 1 wrap-around windows must all be new
        let mut wrapped = Vec::new();
        let mut w = window;
        let mut ok = true;
        for j in 0..n - 1 {
            w = (w % high) * m as usize + digits[j] as usize;
            if seen[w] || wrapped.contains(&w) {
                ok = false;
                break;
            }
            wrapped.push(w);
        }
        if ok {
            out.push(DeBruijnSequence { m, n, digits: digits.clone() });
        }
        return;
    }
    let base = (window % high) * m as usize;
    for d in 0..m as usize {
        let next = base + d;
        if seen[next] {
            continue;
        }
        seen[next] = true;
        digits.push(d as u32);
        extend(m, n, high, next, seen, digits, out);
        digits.pop();
        seen[next] = false;
    }
}

/// Start index of `word` among the cyclic windows of `digits`.
pub fn locate(word: &[u32], digits: &[u32]) -> Result<usize> {
    let len = digits.len();
    (0..len)
        .find(|&i| word.iter().enumerate().all(|(j, &d)| digits[(i + j) % len] == d))
        .ok_or_else(|| Error::WordNotPresent(render_digits(word, u32::MAX)))
}

/// Words fitting under some rotation of `goal`, by inclusion-exclusion over
/// the set of rotations used.
pub fn count_winnable(goal: &[u32]) -> u128 {
    let n = goal.len();
    assert!(n < 32, "inclusion-exclusion over 2^n rotation subsets");
    let mut total: i128 = 0;
    for subset in 1u32..(1 << n) {
        let mut product: i128 = 1;
        for j in 0..n {
            let cap = (0..n)
                .filter(|k| subset >> k & 1 == 1)
                .map(|k| goal[(j + n - k) % n])
                .min()
                .expect("nonempty subset");
            product *= cap as i128 + 1;
        }
        if subset.count_ones() % 2 == 1 {
            total += product;
        } else {
            total -= product;
        }
    }
    total as u128
}

/// Same count by filtering every word over `0..=max(goal)`.
pub fn count_winnable_brute(goal: &[u32]) -> u128 {
    let n = goal.len();
    let a = goal.iter().copied().max().unwrap_or(0) as u64 + 1;
    let size = a.pow(n as u32);
    (0..size)
        .filter(|&i| {
            let p = crate::game::decode(i, a as u32, n).expect("in range");
            rotation_dominates(&p, goal).expect("same length")
        })
        .count() as u128
}

#[cfg(test)]
mod tests {
    use super::*;

    fn digits(s: &str) -> Vec<u32> {
        s.chars().map(|c| c.to_digit(10).unwrap()).collect()
    }

    #[test]
    fn greedy_examples() {
        assert_eq!(greedy_granddaddy(2, 4).unwrap().render(), "0000100110101111");
        assert_eq!(greedy_granddaddy(3, 3).unwrap().render(), "000100201101202102211121222");
        assert_eq!(greedy_granddaddy(2, 1).unwrap().render(), "01");
        assert_eq!(greedy_granddaddy(1, 3).unwrap().render(), "0");
    }

    #[test]
    fn lyndon_words_for_binary_rank_four() {
        let words: Vec<String> = lyndon_words(2, 4)
            .into_iter()
            .filter(|w| 4 % w.len() == 0)
            .map(|w| render_digits(&w, 2))
            .collect();
        assert_eq!(words, ["0", "0001", "0011", "01", "0111", "1"]);
    }

    #[test]
    fn fkm_examples() {
        assert_eq!(fkm(2, 4).unwrap().render(), "0000100110101111");
        assert_eq!(fkm(2, 2).unwrap().render(), "0011");
        assert_eq!(fkm(1, 5).unwrap().render(), "0");
    }

    #[test]
    fn verifier_examples() {
        assert!(is_de_bruijn(&digits("0000100110101111"), 2, 4));
        assert!(is_de_bruijn(&digits("0000100111101011"), 2, 4));
        assert!(is_de_bruijn(&digits("0000101100111101"), 2, 4));
        assert!(is_de_bruijn(&digits("0000101101001111"), 2, 4));
        assert!(!is_de_bruijn(&digits("0101"), 2, 2));
        assert!(!is_de_bruijn(&digits("001"), 2, 2));
        assert!(is_de_bruijn(&digits("0"), 1, 3));
    }

    #[test]
    fn generalized_loops() {
        let g321 = digits("00010110200211120121220221300301310311320321");
        assert!(is_generalized(&g321, &[3, 2, 1]));
        assert!(!is_generalized(&g321, &[1, 3, 2][..2]));
        let mut broken = g321.clone();
        broken.swap(3, 4);
        assert!(!is_generalized(&broken, &[3, 2, 1]));
    }

    #[test]
    fn enumeration_counts() {
        let all = enumerate_all(2, 4).unwrap();
        assert_eq!(all.len(), 16);
        assert_eq!(all[0].render(), "0000100110101111");
        assert!(all.iter().all(|s| is_de_bruijn(&s.digits, 2, 4)));
        assert_eq!(enumerate_all(2, 3).unwrap().len(), 2);
        let ones = enumerate_all(2, 1).unwrap();
        assert_eq!(ones.len(), 1);
        assert_eq!(ones[0].render(), "01");
        assert_eq!(enumerate_all(3, 2).unwrap().len(), 24);
        assert!(enumerate_all(2, 6).is_err());
    }

    #[test]
    fn the_printed_alternatives_are_enumerated() {
        let all: Vec<String> = enumerate_all(2, 4).unwrap().iter().map(|s| s.render()).collect();
        for s in ["0000100111101011", "0000101100111101", "0000101101001111"] {
            assert!(all.contains(&s.to_string()), "{s}");
        }
    }

    #[test]
    fn locate_by_scan() {
        let loop27 = digits("000100201101202102211121222");
        assert_eq!(locate(&[0, 0, 0, 0], &digits("0000100110101111")).unwrap(), 0);
        assert_eq!(locate(&[2, 2, 2], &loop27).unwrap(), 24);
        assert_eq!(locate(&[1, 2, 2], &loop27).unwrap(), 23);
        assert_eq!(locate(&[2, 2, 0], &loop27).unwrap(), 25);
        assert!(locate(&[3, 0, 0], &loop27).is_err());
    }

    #[test]
    fn winnable_counts() {
        assert_eq!(count_winnable(&[3, 2, 1]), 44);
        assert_eq!(count_winnable_brute(&[3, 2, 1]), 44);
        assert_eq!(count_winnable(&[2, 2, 2]), 27);
        assert_eq!(count_winnable(&[0, 0, 0, 0]), 1);
        assert_eq!(count_winnable_brute(&[0, 0, 0, 0]), 1);
    }

    #[test]
    fn construction_caps() {
        assert!(greedy_granddaddy_with_cap(10, 6, 1000).is_err());
        assert!(fkm_with_cap(10, 6, 1000).is_err());
    }
}
