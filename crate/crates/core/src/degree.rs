//! RO(Z/2 x Z/2) degrees: integer combinations of 1, alpha, gamma, gamma*alpha.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RODegree {
    pub c1: i64,
    pub ca: i64,
    pub cg: i64,
    pub cga: i64,
}

/// Which sign representation `u` and the `v_n` are graded against.
///
/// `Diagonal` is the Z/2 x Z/2 setting where `|u| = -1-γα` and
/// `|v_n| = (2^n-1)(1+γα)`; `Stunted` is the single Z/2 setting of the charts
/// where `|u| = -1-α` and `|v_n| = (2^n-1)(1+α)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Convention {
    Diagonal,
    Stunted,
}

impl RODegree {
    pub const ZERO: RODegree = RODegree { c1: 0, ca: 0, cg: 0, cga: 0 };

    pub const fn new(c1: i64, ca: i64, cg: i64, cga: i64) -> Self {
        RODegree { c1, ca, cg, cga }
    }

    pub const fn one() -> Self {
        Self::new(1, 0, 0, 0)
    }
    pub const fn alpha() -> Self {
        Self::new(0, 1, 0, 0)
    }
    pub const fn gamma() -> Self {
        Self::new(0, 0, 1, 0)
    }
    pub const fn gamma_alpha() -> Self {
        Self::new(0, 0, 0, 1)
    }

    /// The sign representation paired with the trivial one in `convention`.
    fn sign(convention: Convention) -> Self {
        match convention {
            Convention::Diagonal => Self::gamma_alpha(),
            Convention::Stunted => Self::alpha(),
        }
    }

    pub fn u(convention: Convention) -> Self {
        -(Self::one() + Self::sign(convention))
    }

    pub fn v(n: usize, convention: Convention) -> Self {
        (Self::one() + Self::sign(convention)) * ((1i64 << n) - 1)
    }

    /// `|a| = -α`.
    pub fn a() -> Self {
        -Self::alpha()
    }

    /// `|σ| = α - 1`.
    pub fn sigma() -> Self {
        Self::alpha() - Self::one()
    }

    /// `|b_k| = k(1+γα)`.
    pub fn b(k: usize) -> Self {
        (Self::one() + Self::gamma_alpha()) * k as i64
    }

    /// Degree of a `v`-monomial with exponents `e[0] = e_1, e[1] = e_2, ...`.
    pub fn v_monomial(exps: &[u16], convention: Convention) -> Self {
        let w: i64 = exps
            .iter()
            .enumerate()
            .map(|(i, &e)| ((1i64 << (i + 1)) - 1) * e as i64)
            .sum();
        (Self::one() + Self::sign(convention)) * w
    }

    /// The periodicity class `γ + α - 1 - γα`.
    pub fn periodicity() -> Self {
        Self::new(-1, 1, 1, -1)
    }

    pub fn swap_alpha_gamma(self) -> Self {
        Self::new(self.c1, self.cg, self.ca, self.cga)
    }

    pub fn as_array(self) -> [i64; 4] {
        [self.c1, self.ca, self.cg, self.cga]
    }
}

impl Add for RODegree {
    type Output = RODegree;
    fn add(self, o: RODegree) -> RODegree {
        RODegree::new(self.c1 + o.c1, self.ca + o.ca, self.cg + o.cg, self.cga + o.cga)
    }
}

impl Sub for RODegree {
    type Output = RODegree;
    fn sub(self, o: RODegree) -> RODegree {
        self + (-o)
    }
}

impl Neg for RODegree {
    type Output = RODegree;
    fn neg(self) -> RODegree {
        RODegree::new(-self.c1, -self.ca, -self.cg, -self.cga)
    }
}

impl Mul<i64> for RODegree {
    type Output = RODegree;
    fn mul(self, k: i64) -> RODegree {
        RODegree::new(self.c1 * k, self.ca * k, self.cg * k, self.cga * k)
    }
}

impl fmt::Display for RODegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts = [(self.c1, ""), (self.ca, "a"), (self.cg, "g"), (self.cga, "ga")];
        let mut wrote = false;
        for (c, name) in parts {
            if c == 0 {
                continue;
            }
            if wrote {
                write!(f, "{}", if c < 0 { " - " } else { " + " })?;
            } else if c < 0 {
                write!(f, "-")?;
            }
            let a = c.abs();
            match (a, name) {
                (_, "") => write!(f, "{a}")?,
                (1, _) => write!(f, "{name}")?,
                _ => write!(f, "{a}{name}")?,
            }
            wrote = true;
        }
        if !wrote {
            write!(f, "0")?;
        }
        Ok(())
    }
}
