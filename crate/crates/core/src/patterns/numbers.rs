//! The pattern numbers `(s_{k,i}, t_{k,i})` for `RP^∞_{2k+1}` and
//! `(a_{k,i}, b_{k,i})` for `RP^∞_{2k}`.
//!
//! At position `u^i` and level `p`: `p < s` is horizontal, `s <= p < t` is
//! vertical, `p = t` carries the special differential (and the horizontal
//! one on the `σ^{2^t}` classes), and levels past `t` see nothing because
//! the position is gone.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Which clause produced a value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Clause {
    Base,
    Reflected,
    Range,
    /// Past the stunted range; values follow the `RP^∞` table.
    Tail,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternCell {
    pub s: u32,
    /// `None` is infinity.
    pub t: Option<u32>,
    pub clause: Clause,
}

impl PatternCell {
    fn new(s: u32, t: Option<u32>, clause: Clause) -> Self {
        PatternCell { s, t, clause }
    }
}

fn ilog2(x: u64) -> u32 {
    63 - x.leading_zeros()
}

/// Horizontal below `⌊log2 i⌋ + 1`, vertical above, no special.
fn tail(i: u64) -> PatternCell {
    let s = if i == 0 { 0 } else { ilog2(i) + 1 };
    PatternCell::new(s, None, Clause::Tail)
}

/// `j` with `lo + 2^{j-1} <= i < lo + 2^j`, where `2^{-1}` is read as 0
/// so that `j = 0` covers `i = lo`.
fn range_index(lo: u64, i: u64) -> Option<u32> {
    if i < lo {
        return None;
    }
    let d = i - lo;
    Some(if d == 0 { 0 } else { ilog2(d) + 1 })
}

/// Pattern numbers for the odd stunted space `RP^∞_{2k+1}`, `i >= k+1`.
pub fn st_numbers(k: u64, i: u64) -> Result<PatternCell> {
    if i < k + 1 {
        return Err(Error::InvalidArgument(format!("st_numbers needs i >= k+1, got k={k}, i={i}")));
    }
    if i > 2 * k {
        return Ok(tail(i));
    }
    if (k + 1).is_power_of_two() {
        let l = ilog2(k + 1);
        // s = j for k + 2^{j-1} <= i < k + 2^j, j >= 1.
        let j = range_index(k, i).unwrap();
        return Ok(PatternCell::new(j, Some(l), Clause::Base));
    }
    let l = ilog2(2 * k);
    debug_assert!(k < 1 << l && 1 << l <= 2 * k);
    if i < 1 << l {
        let r = st_numbers((1 << l) - k - 1, (1 << l) + i - 2 * k - 1)?;
        return Ok(PatternCell { clause: Clause::Reflected, ..r });
    }
    let j = range_index(2 * k + 1 - (1 << l), i).unwrap();
    Ok(PatternCell::new(j, Some(l), Clause::Range))
}

/// Pattern numbers for the even stunted space `RP^∞_{2k}`, `i >= k >= 1`.
pub fn ab_numbers(k: u64, i: u64) -> Result<PatternCell> {
    if k == 0 || i < k {
        return Err(Error::InvalidArgument(format!("ab_numbers needs i >= k >= 1, got k={k}, i={i}")));
    }
    if i >= 2 * k {
        return Ok(tail(i));
    }
    if k.is_power_of_two() {
        let l = ilog2(k);
        let j = range_index(k, i).unwrap();
        return Ok(PatternCell::new(j, Some(l), Clause::Base));
    }
    let l = ilog2(2 * k - 1);
    debug_assert!(k <= 1 << l && 1 << l < 2 * k);
    if i < 1 << l {
        let r = ab_numbers((1 << l) - k, (1 << l) + i - 2 * k)?;
        return Ok(PatternCell { clause: Clause::Reflected, ..r });
    }
    let j = range_index(2 * k - (1 << l), i).unwrap();
    Ok(PatternCell::new(j, Some(l), Clause::Range))
}

/// Special-differential start points `(i, level)` implied by the pattern
/// numbers: the positions in the stunted range where `t` (resp. `b`) changes.
pub fn special_starts(m: u64) -> Vec<(u64, u32)> {
    let k = m / 2;
    let (lo, hi) = if m % 2 == 1 { (k + 1, 2 * k) } else { (k, 2 * k - 1) };
    let mut out: Vec<(u64, u32)> = Vec::new();
    for i in lo..=hi {
        let cell = if m % 2 == 1 { st_numbers(k, i) } else { ab_numbers(k, i) };
        if let Ok(PatternCell { t: Some(t), .. }) = cell {
            if out.last().map(|x| x.1) != Some(t) {
                out.push((i, t));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::patterns::decompose::{delta_chain, epsilon_chain};

    #[test]
    fn small_cases() {
        assert_eq!(st_numbers(1, 2).unwrap(), PatternCell::new(1, Some(1), Clause::Base));
        assert_eq!(ab_numbers(2, 2).unwrap().s, 0);
        assert!(st_numbers(3, 3).is_err());
        assert!(ab_numbers(3, 2).is_err());
        // k = 2^l - 1 past 2k: horizontal exactly for 2^p <= i.
        for i in 15..64 {
            let c = st_numbers(7, i).unwrap();
            assert_eq!(c.t, None);
            assert!(1u64 << (c.s - 1) <= i && i < 1u64 << c.s);
        }
    }

    #[test]
    fn k50_ranges() {
        let odd: Vec<_> = (51..=100).map(|i| st_numbers(50, i).unwrap()).collect();
        assert_eq!((odd[0].s, odd[0].t), (1, Some(1)));
        assert_eq!((odd[1].s, odd[1].t), (2, Some(2)));
        assert_eq!(odd[2].t, Some(4));
        assert_eq!(odd[13].t, Some(6));
        let even: Vec<_> = (50..100).map(|i| ab_numbers(50, i).unwrap()).collect();
        assert_eq!((even[0].s, even[0].t), (0, Some(1)));
        assert_eq!(even[2].t, Some(4));
    }

    #[test]
    fn chains_match_pattern_numbers() {
        for k in 1..=64u64 {
            let e = epsilon_chain(k).unwrap();
            let mut from_chain: Vec<(u64, u32)> = e.starts.iter().zip(&e.levels).map(|(&s, &n)| (s as u64, n)).collect();
            from_chain.sort();
            assert_eq!(special_starts(2 * k + 1), from_chain, "odd k={k}");
            let d = delta_chain(k).unwrap();
            let mut from_chain: Vec<(u64, u32)> = d.starts.iter().zip(&d.levels).map(|(&s, &n)| (s as u64, n)).collect();
            from_chain.sort();
            assert_eq!(special_starts(2 * k), from_chain, "even k={k}");
        }
    }

    #[test]
    fn s_below_t() {
        for k in 1..=64u64 {
            for i in k + 1..=2 * k + 8 {
                let c = st_numbers(k, i).unwrap();
                assert!(c.t.is_none_or(|t| c.s <= t), "st k={k} i={i}");
            }
            for i in k..=2 * k + 8 {
                let c = ab_numbers(k, i).unwrap();
                assert!(c.t.is_none_or(|t| c.s <= t), "ab k={k} i={i}");
            }
        }
    }
}
