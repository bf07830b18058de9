//! Which differential acts on which monomial, and where it lands.

use super::monomial::Monomial;
use crate::error::{Error, Result};
use crate::patterns::{DifferentialTable, RuleClass};
use crate::series::{horizontal_leading_term, VExp, MAX_GENERATORS};
use std::sync::OnceLock;

/// Behaviour at levels above the table's level cap.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Above {
    /// Vertical on positions `>= from`, nothing below.
    TailVertical { from: i64 },
    Vertical,
    Horizontal,
    Nothing,
}

/// Rule families per level, instantiated as multiplications on monomials.
#[derive(Clone, Debug)]
pub struct RuleBook {
    /// `by_level[n]` holds the families of level `n <= cap`.
    by_level: Vec<Vec<(RuleClass, i64, Option<i64>)>>,
    cap: u32,
    above: Above,
    max_page: Option<u64>,
}

/// Where a differential sends a monomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Image {
    Zero,
    Hit(Monomial),
}

pub fn page_of_level(n: u32) -> u64 {
    (1u64 << (n + 1)) - 1
}

/// `v`-exponent and `u`-exponent of the leading term of `w_n`, so that the
/// horizontal differential multiplies by `v^e u^shift σ^{2^n} a^{2^{n+1}-1}`.
/// Levels up to 3 come from the series; beyond that the series is too costly
/// to expand and the pattern `v_{n+1} u^{2^n}` is used directly.
pub fn horizontal_lead(n: u32) -> (VExp, i64) {
    static CACHE: OnceLock<Vec<(VExp, i64)>> = OnceLock::new();
    let cached = CACHE.get_or_init(|| {
        (0..=3)
            .map(|k| {
                let (e, s) = horizontal_leading_term(k).expect("leading term of w_n");
                (e, s as i64)
            })
            .collect()
    });
    if (n as usize) < cached.len() {
        cached[n as usize]
    } else if (n as usize) < MAX_GENERATORS {
        (VExp::generator(n as usize + 1), 1i64 << n)
    } else {
        (VExp::ONE, i64::MAX / 4)
    }
}

impl RuleBook {
    /// Rules of a differential table. The table must reach `u_max`.
    pub fn from_table(table: &DifferentialTable, u_max: i64) -> Result<RuleBook> {
        if (table.i_max as i64) < u_max {
            return Err(Error::WindowTooSmall(format!(
                "table horizon {} is below the window's u bound {u_max}",
                table.i_max
            )));
        }
        let cap = table.level_cap;
        let mut by_level = vec![Vec::new(); cap as usize + 1];
        for r in &table.rules {
            by_level[r.level as usize].push((r.class, r.u_lo as i64, r.u_hi.map(|h| h as i64)));
        }
        // both parities follow the RP^inf table from u^m on
        let tail = table.m.map_or(0, |m| m as i64);
        Ok(RuleBook { by_level, cap, above: Above::TailVertical { from: tail }, max_page: None })
    }

    /// Coefficient BCSS: every level is vertical.
    pub fn point() -> RuleBook {
        RuleBook { by_level: vec![], cap: 0, above: Above::Vertical, max_page: None }
    }

    /// `u` inverted: every level is horizontal.
    pub fn localized() -> RuleBook {
        RuleBook { by_level: vec![], cap: 0, above: Above::Horizontal, max_page: None }
    }

    /// No differentials at all.
    pub fn empty() -> RuleBook {
        RuleBook { by_level: vec![], cap: 0, above: Above::Nothing, max_page: None }
    }

    /// Drops every family on pages beyond `r`.
    pub fn up_to_page(mut self, r: u64) -> RuleBook {
        self.max_page = Some(r);
        self
    }

    /// Highest level listed explicitly; `None` when the book is uniform.
    pub fn cap(&self) -> Option<u32> {
        if self.by_level.is_empty() {
            None
        } else {
            Some(self.cap)
        }
    }

    fn active(&self, n: u32) -> bool {
        self.max_page.is_none_or(|r| page_of_level(n) <= r)
    }

    /// Classes acting at level `n` on position `i`: the class on the
    /// `σ ≡ 2^n` line and whether a special family acts on `σ ≡ 0`.
    pub fn classes(&self, i: i64, n: u32) -> (Option<RuleClass>, bool) {
        if !self.active(n) {
            return (None, false);
        }
        if (n as usize) < self.by_level.len() {
            let mut line = None;
            let mut special = false;
            for &(c, lo, hi) in &self.by_level[n as usize] {
                if i >= lo && hi.is_none_or(|h| i <= h) {
                    match c {
                        RuleClass::Special => special = true,
                        RuleClass::Horizontal => line = Some(RuleClass::Horizontal),
                        RuleClass::Vertical => {
                            if line.is_none() {
                                line = Some(RuleClass::Vertical)
                            }
                        }
                    }
                }
            }
            return (line, special);
        }
        let line = match self.above {
            Above::TailVertical { from } if i >= from => Some(RuleClass::Vertical),
            Above::TailVertical { .. } | Above::Nothing => None,
            Above::Vertical => Some(RuleClass::Vertical),
            Above::Horizontal => Some(RuleClass::Horizontal),
        };
        (line, false)
    }

    /// `d_{2^{n+1}-1}` of a single monomial, before any window check.
    pub fn image(&self, m: &Monomial, n: u32) -> Image {
        if n as usize >= MAX_GENERATORS {
            return Image::Zero;
        }
        let p = 1i64 << n;
        let r = page_of_level(n) as i64;
        let res = m.sigma.rem_euclid(2 * p);
        let (line, special) = self.classes(m.u, n);
        let vertical = |m: &Monomial| match m.times_v(n as usize) {
            Some(t) => Image::Hit(t.shifted(0, p, r)),
            None => Image::Zero,
        };
        if res == p {
            match line {
                Some(RuleClass::Vertical) => vertical(m),
                Some(RuleClass::Horizontal) => {
                    if m.v_power(n as usize) > 0 {
                        return Image::Zero;
                    }
                    let (e, shift) = horizontal_lead(n);
                    let mut t = m.shifted(shift, p, r);
                    t.v = t.v.mul(&e);
                    Image::Hit(t)
                }
                _ => Image::Zero,
            }
        } else if res == 0 && special {
            vertical(m)
        } else {
            Image::Zero
        }
    }

    /// Monomials that `image(_, n)` could send to `t`; callers filter by
    /// validity and recheck with `image`.
    pub fn preimage_candidates(&self, t: &Monomial, n: u32) -> Vec<Monomial> {
        let mut out = Vec::new();
        if n as usize >= MAX_GENERATORS {
            return out;
        }
        let p = 1i64 << n;
        let r = page_of_level(n) as i64;
        if let Some(s) = t.without_v(n as usize) {
            out.push(s.shifted(0, -p, -r));
        }
        let (e, shift) = horizontal_lead(n);
        let divisible = (1..=MAX_GENERATORS).all(|k| t.v.get(k) >= e.get(k));
        if divisible {
            let mut s = t.shifted(-shift, -p, -r);
            for k in 1..=MAX_GENERATORS {
                s.v.0[k - 1] -= e.get(k);
            }
            out.push(s);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::patterns::{differential_table, Bottom};

    #[test]
    fn leading_terms_follow_pattern() {
        for n in 0..=3 {
            assert_eq!(horizontal_lead(n), (VExp::generator(n as usize + 1), 1i64 << n));
        }
    }

    #[test]
    fn rp_infinity_classes() {
        let t = differential_table(Bottom::Infinity, 40).unwrap();
        let b = RuleBook::from_table(&t, 40).unwrap();
        // u^j with j < 2^n is vertical at level n, horizontal otherwise
        assert_eq!(b.classes(0, 0).0, Some(RuleClass::Vertical));
        assert_eq!(b.classes(1, 0).0, Some(RuleClass::Horizontal));
        assert_eq!(b.classes(3, 2).0, Some(RuleClass::Vertical));
        assert_eq!(b.classes(4, 2).0, Some(RuleClass::Horizontal));
        assert_eq!(b.classes(39, 9).0, Some(RuleClass::Vertical));
    }

    #[test]
    fn stunted_special_and_dead_levels() {
        let t = differential_table(Bottom::Finite(101), 120).unwrap();
        let b = RuleBook::from_table(&t, 120).unwrap();
        assert_eq!(b.classes(51, 1), (Some(RuleClass::Horizontal), true));
        assert_eq!(b.classes(54, 3), (Some(RuleClass::Vertical), false));
        // levels above t are dead below the tail
        assert_eq!(b.classes(51, 5), (None, false));
        assert_eq!(b.classes(110, 9).0, Some(RuleClass::Vertical));
    }

    #[test]
    fn images_shift_degree_by_one() {
        let t = differential_table(Bottom::Finite(101), 120).unwrap();
        let b = RuleBook::from_table(&t, 120).unwrap();
        for u in 51..80 {
            for s in -20..20 {
                let m = Monomial::new(u, s, 0, 0, VExp::ONE);
                for n in 0..6 {
                    if let Image::Hit(t) = b.image(&m, n) {
                        let (c1, ca) = m.cell();
                        assert_eq!(t.cell(), (c1 - 1, ca));
                        assert_eq!(t.a - m.a, page_of_level(n) as i64);
                        assert!(b.preimage_candidates(&t, n).contains(&m));
                    }
                }
            }
        }
    }

    #[test]
    fn first_special_differential_of_rp101() {
        let t = differential_table(Bottom::Finite(101), 80).unwrap();
        let b = RuleBook::from_table(&t, 80).unwrap();
        let z = Monomial::new(51, 0, 0, 0, VExp::ONE);
        assert_eq!(b.image(&z, 1), Image::Hit(Monomial::new(51, 2, 3, 0, VExp::generator(1))));
    }
}
