//! Full differential tables for `RP^∞_m` and `RP^∞`.

use super::decompose::{alt_decompose, odd_stunted_decomposition, AltDecomposition, DecompositionForm};
use super::numbers::{ab_numbers, st_numbers, PatternCell};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt::Write;

/// Bottom cell of the space: `RP^∞_m`, or unstunted `RP^∞`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Bottom {
    Finite(u64),
    Infinity,
}

impl Bottom {
    pub fn parse(s: &str) -> Result<Bottom> {
        match s.trim() {
            "inf" | "infinity" | "oo" => Ok(Bottom::Infinity),
            t => {
                let m: u64 = t.parse().map_err(|_| Error::InvalidArgument(format!("bad bottom cell {s}")))?;
                if m == 0 {
                    return Err(Error::InvalidArgument("m must be at least 1".into()));
                }
                Ok(Bottom::Finite(m))
            }
        }
    }

    /// First `u`-exponent of the `E_1` generator line.
    pub fn first_position(self) -> u64 {
        match self {
            Bottom::Infinity => 0,
            Bottom::Finite(m) => m.div_ceil(2),
        }
    }

    /// First cell dimension.
    pub fn cell(self) -> u64 {
        match self {
            Bottom::Infinity => 0,
            Bottom::Finite(m) => m,
        }
    }

    pub fn label(self) -> String {
        match self {
            Bottom::Infinity => "inf".into(),
            Bottom::Finite(m) => m.to_string(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RuleClass {
    Special,
    Vertical,
    Horizontal,
}

impl RuleClass {
    pub fn name(self) -> &'static str {
        match self {
            RuleClass::Special => "special",
            RuleClass::Vertical => "vertical",
            RuleClass::Horizontal => "horizontal",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DifferentialRule {
    pub page: u64,
    pub sigma_res: u64,
    pub sigma_mod: u64,
    pub u_lo: u64,
    /// `None` when the family runs forever.
    pub u_hi: Option<u64>,
    pub class: RuleClass,
    pub level: u32,
}

impl DifferentialRule {
    pub fn new(class: RuleClass, level: u32, u_lo: u64, u_hi: Option<u64>) -> Self {
        let sigma_mod = 1u64 << (level + 1);
        let sigma_res = match class {
            RuleClass::Special => 0,
            _ => 1 << level,
        };
        DifferentialRule { page: sigma_mod - 1, sigma_res, sigma_mod, u_lo, u_hi, class, level }
    }

    pub fn contains(&self, i: u64) -> bool {
        i >= self.u_lo && self.u_hi.is_none_or(|h| i <= h)
    }

    /// Page, residue and class congruences.
    pub fn is_well_formed(&self) -> bool {
        let m = 1u64 << (self.level + 1);
        let res = match self.class {
            RuleClass::Special => 0,
            _ => 1 << self.level,
        };
        self.page == m - 1 && self.sigma_mod == m && self.sigma_res == res && self.u_hi.is_none_or(|h| h >= self.u_lo)
    }
}

/// Pattern numbers at position `i >= bottom.first_position()`.
pub fn pattern_cell(bottom: Bottom, i: u64) -> Result<PatternCell> {
    match bottom {
        Bottom::Infinity => Ok(PatternCell {
            s: if i == 0 { 0 } else { 63 - i.leading_zeros() + 1 },
            t: None,
            clause: super::numbers::Clause::Tail,
        }),
        Bottom::Finite(m) if m % 2 == 1 => st_numbers(m / 2, i),
        Bottom::Finite(m) => ab_numbers(m / 2, i),
    }
}

/// Rule class acting at level `p` on position `u^i`, if any.
pub fn action(bottom: Bottom, i: u64, p: u32) -> Option<RuleClass> {
    if i < bottom.first_position() {
        return None;
    }
    let c = pattern_cell(bottom, i).ok()?;
    if p < c.s {
        Some(RuleClass::Horizontal)
    } else if c.t.is_none_or(|t| p < t) {
        Some(RuleClass::Vertical)
    } else if c.t == Some(p) {
        Some(RuleClass::Special)
    } else {
        None
    }
}

/// Every rule class acting at level `p` on `u^i`. At `p = t` the special
/// family is accompanied by horizontal differentials on the `sigma^(2^t)`
/// classes.
pub fn actions(bottom: Bottom, i: u64, p: u32) -> Vec<RuleClass> {
    match action(bottom, i, p) {
        Some(RuleClass::Special) => vec![RuleClass::Special, RuleClass::Horizontal],
        Some(c) => vec![c],
        None => vec![],
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DifferentialTable {
    /// `None` for `RP^∞`.
    pub m: Option<u64>,
    pub bottom_position: u64,
    pub i_max: u64,
    /// Levels above this are vertical on every listed tail position.
    pub level_cap: u32,
    pub decomposition: Option<AltDecomposition>,
    pub rules: Vec<DifferentialRule>,
    pub notes: Vec<String>,
}

/// All rule families on positions up to `max(i_max, m)`, merged into
/// maximal `u`-ranges. Horizontal families still running at the horizon are
/// right-infinite; vertical ones end at `2^level - 1`.
pub fn differential_table(bottom: Bottom, i_max: u64) -> Result<DifferentialTable> {
    let lo = bottom.first_position();
    let horizon = i_max.max(bottom.cell()).max(lo + 1);
    let level_cap = 63 - horizon.leading_zeros() + 1;
    let mut rules = Vec::new();
    for p in 0..=level_cap {
        let present: Vec<Vec<RuleClass>> = (lo..=horizon).map(|i| actions(bottom, i, p)).collect();
        for c in [RuleClass::Special, RuleClass::Vertical, RuleClass::Horizontal] {
            let mut start: Option<u64> = None;
            for i in lo..=horizon + 1 {
                let on = i <= horizon && present[(i - lo) as usize].contains(&c);
                match (start, on) {
                    (None, true) => start = Some(i),
                    (Some(s0), false) => {
                        let end = i - 1;
                        let hi = if end < horizon {
                            Some(end)
                        } else {
                            match c {
                                RuleClass::Horizontal => None,
                                RuleClass::Vertical => Some(end.max((1u64 << p) - 1)),
                                RuleClass::Special => Some(end),
                            }
                        };
                        rules.push(DifferentialRule::new(c, p, s0, hi));
                        start = None;
                    }
                    _ => {}
                }
            }
        }
    }
    rules.sort_by_key(|r| (r.class, r.level, r.u_lo));
    let (m, decomposition, mut notes) = match bottom {
        Bottom::Infinity => (None, None, vec![]),
        Bottom::Finite(m) => {
            let k = m / 2;
            let d = if k == 0 {
                None
            } else if m % 2 == 1 {
                Some(odd_stunted_decomposition(k)?)
            } else {
                Some(alt_decompose(k, DecompositionForm::EvenStunted)?)
            };
            let tail_from = if m % 2 == 1 { 2 * k + 1 } else { 2 * k };
            (Some(m), d, vec![format!("positions i >= {tail_from} follow the RP^inf table (horizontal iff 2^level <= i)")])
        }
    };
    notes.push(format!("levels above {level_cap} are vertical on every tail position below 2^level"));
    Ok(DifferentialTable { m, bottom_position: lo, i_max: horizon, level_cap, decomposition, rules, notes })
}

impl DifferentialTable {
    /// Families meeting the stunted range `[bottom, m)`; everything for `RP^∞`.
    pub fn stunted_families(&self) -> Vec<DifferentialRule> {
        match self.m {
            None => self.rules.clone(),
            Some(m) => self.rules.iter().filter(|r| r.u_lo < m).copied().collect(),
        }
    }

    /// Aligned text listing grouped as special, vertical, horizontal.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        match (self.m, &self.decomposition) {
            (Some(m), Some(d)) => writeln!(out, "RP^inf_{m}: k = {} = {d}", m / 2).unwrap(),
            (Some(m), None) => writeln!(out, "RP^inf_{m}: k = {}", m / 2).unwrap(),
            (None, _) => writeln!(out, "RP^inf").unwrap(),
        }
        let mut fams = self.stunted_families();
        if fams.is_empty() {
            // nothing below the tail (m = 1): show the RP^inf-type rules
            fams = self.rules.clone();
        }
        let mut specials: Vec<_> = fams.iter().filter(|r| r.class == RuleClass::Special).collect();
        specials.sort_by_key(|r| (r.u_lo, r.level));
        let mut verticals: Vec<_> = fams.iter().filter(|r| r.class == RuleClass::Vertical).collect();
        verticals.sort_by_key(|r| (r.level, r.u_lo));
        let mut horizontals: Vec<_> = fams.iter().filter(|r| r.class == RuleClass::Horizontal).collect();
        horizontals.sort_by_key(|r| (r.level, r.u_lo));
        for (title, group) in [("special", specials), ("vertical", verticals), ("horizontal", horizontals)] {
            if group.is_empty() {
                continue;
            }
            writeln!(out, "{title}:").unwrap();
            for r in group {
                let sigma = format!("sigma^({} mod {})", r.sigma_res, r.sigma_mod);
                let range = match r.u_hi {
                    None => format!("u^i, i >= {}", r.u_lo),
                    Some(h) if h == r.u_lo => format!("u^{}", r.u_lo),
                    Some(h) => format!("u^i, {} <= i <= {h}", r.u_lo),
                };
                writeln!(out, "  {:<6}{:<22}{range}", format!("d{}", r.page), sigma).unwrap();
            }
        }
        if let Some(m) = self.m {
            writeln!(out, "tail: u^i, i >= {m}, as for RP^inf").unwrap();
        }
        out
    }
}
