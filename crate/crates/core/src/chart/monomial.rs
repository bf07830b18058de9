//! E1 basis monomials `u^i σ^s a^j v_0^e v^E` and their bidegrees.

use crate::degree::RODegree;
use crate::series::VExp;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Bidegree key of a chart cell: the `1`- and `α`-coefficients of the
/// RO-degree. The `γ` parts vanish for every generator in play.
pub type CellKey = (i64, i64);

/// Field order is the basis order: `(u, σ, a, v_0, v)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub u: i64,
    pub sigma: i64,
    pub a: i64,
    /// Power of `v_0 = 2`; only nonzero on lines carrying integral data.
    pub v0: u16,
    pub v: VExp,
}

impl Monomial {
    pub fn new(u: i64, sigma: i64, a: i64, v0: u16, v: VExp) -> Self {
        Monomial { u, sigma, a, v0, v }
    }

    pub fn weight(&self) -> i64 {
        self.v.weight()
    }

    /// Homological RO-degree with `|u| = -1-α`, `|σ| = α-1`, `|a| = -α`,
    /// `|v_n| = (2^n-1)(1+α)`.
    pub fn degree(&self) -> RODegree {
        let (c1, ca) = self.cell();
        RODegree::new(c1, ca, 0, 0)
    }

    pub fn cell(&self) -> CellKey {
        let w = self.weight();
        (w - self.sigma - self.u, w - self.a + self.sigma - self.u)
    }

    /// `-c_1`, the integer dimension once `a` is inverted.
    pub fn dimension(&self) -> i64 {
        -self.cell().0
    }

    /// Multiplies by `v_n` (`n = 0` is `v_0`). `None` if `n` exceeds the
    /// generator capacity.
    pub fn times_v(&self, n: usize) -> Option<Monomial> {
        let mut m = *self;
        if n == 0 {
            m.v0 += 1;
        } else if n <= crate::series::MAX_GENERATORS {
            m.v = m.v.mul(&VExp::generator(n));
        } else {
            return None;
        }
        Some(m)
    }

    pub fn shifted(&self, du: i64, ds: i64, da: i64) -> Monomial {
        Monomial { u: self.u + du, sigma: self.sigma + ds, a: self.a + da, ..*self }
    }

    /// Power of `v_n`, including `n = 0`.
    pub fn v_power(&self, n: usize) -> u16 {
        if n == 0 {
            self.v0
        } else if n <= crate::series::MAX_GENERATORS {
            self.v.get(n)
        } else {
            0
        }
    }

    /// Divides by `v_n` when possible.
    pub fn without_v(&self, n: usize) -> Option<Monomial> {
        if self.v_power(n) == 0 {
            return None;
        }
        let mut m = *self;
        if n == 0 {
            m.v0 -= 1;
        } else {
            m.v.0[n - 1] -= 1;
        }
        Some(m)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if self.v0 == 1 {
            parts.push("v0".into());
        } else if self.v0 > 1 {
            parts.push(format!("v0^{}", self.v0));
        }
        if self.v != VExp::ONE {
            parts.push(self.v.to_string());
        }
        for (name, e) in [("a", self.a), ("sigma", self.sigma), ("u", self.u)] {
            match e {
                0 => {}
                1 => parts.push(name.into()),
                _ => parts.push(format!("{name}^{e}")),
            }
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

/// JSON form of a monomial.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonomialJson {
    pub u: i64,
    pub sigma: i64,
    pub a: i64,
    pub v: Vec<u16>,
}

impl MonomialJson {
    /// `v[0]` is the `v_0` exponent, followed by `v_1..v_nmax`.
    pub fn from_monomial(m: &Monomial, nmax: usize) -> Self {
        let mut v = vec![m.v0];
        v.extend(m.v.exponents(nmax));
        MonomialJson { u: m.u, sigma: m.sigma, a: m.a, v }
    }
}

/// All `v`-exponent vectors over `v_1..v_nmax` of weight at most `weight_max`,
/// in increasing order.
pub fn v_monomials(nmax: usize, weight_max: i64) -> Vec<VExp> {
    fn rec(n: usize, nmax: usize, left: i64, cur: &mut [u16; crate::series::MAX_GENERATORS], out: &mut Vec<VExp>) {
        if n > nmax {
            out.push(VExp(*cur));
            return;
        }
        let w = (1i64 << n) - 1;
        let mut e = 0;
        while e as i64 * w <= left {
            cur[n - 1] = e;
            rec(n + 1, nmax, left - e as i64 * w, cur, out);
            e += 1;
        }
        cur[n - 1] = 0;
    }
    let mut out = Vec::new();
    if weight_max >= 0 {
        rec(1, nmax, weight_max, &mut [0; crate::series::MAX_GENERATORS], &mut out);
    }
    out.sort();
    out
}

/// `v_monomials(nmax, weight_max).len()`, counted without building them.
pub fn count_v_monomials(nmax: usize, weight_max: i64) -> u128 {
    if weight_max < 0 {
        return 0;
    }
    let w = weight_max as usize;
    let mut ways = vec![0u128; w + 1];
    ways[0] = 1;
    for n in 1..=nmax {
        let part = (1usize << n) - 1;
        for x in part..=w {
            ways[x] = ways[x].saturating_add(ways[x - part]);
        }
    }
    ways.iter().fold(0u128, |a, &b| a.saturating_add(b))
}
