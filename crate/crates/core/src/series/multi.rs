//! Multivariate series in up to four variables, truncated by total degree.

use super::poly::RationalPoly;
use num_rational::BigRational;
use std::collections::BTreeMap;

pub const MAX_VARS: usize = 4;

pub type Exps = [u16; MAX_VARS];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiSeries {
    nvars: usize,
    nmax: usize,
    trunc: usize,
    terms: BTreeMap<Exps, RationalPoly>,
}

fn total(e: &Exps) -> usize {
    e.iter().map(|&x| x as usize).sum()
}

impl MultiSeries {
    pub fn zero(nvars: usize, nmax: usize, trunc: usize) -> Self {
        assert!((1..=MAX_VARS).contains(&nvars));
        MultiSeries { nvars, nmax, trunc, terms: BTreeMap::new() }
    }

    /// The variable with index `i` (x = 0, y = 1, ...).
    pub fn var(i: usize, nvars: usize, nmax: usize, trunc: usize) -> Self {
        assert!(i < nvars);
        let mut s = Self::zero(nvars, nmax, trunc);
        let mut e = [0; MAX_VARS];
        e[i] = 1;
        s.add_term(e, RationalPoly::one());
        s
    }

    pub fn constant(c: RationalPoly, nvars: usize, nmax: usize, trunc: usize) -> Self {
        let mut s = Self::zero(nvars, nmax, trunc);
        s.add_term([0; MAX_VARS], c);
        s
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }
    pub fn nmax(&self) -> usize {
        self.nmax
    }
    pub fn trunc(&self) -> usize {
        self.trunc
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exps, &RationalPoly)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &[u16]) -> RationalPoly {
        let mut k = [0; MAX_VARS];
        k[..e.len()].copy_from_slice(e);
        self.terms.get(&k).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, e: Exps, c: RationalPoly) {
        if total(&e) >= self.trunc || c.is_zero() {
            return;
        }
        let c = c.restrict(self.nmax);
        let slot = self.terms.entry(e).or_default();
        slot.add_assign(&c);
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = Self::zero(self.nvars.max(o.nvars), self.nmax.max(o.nmax), self.trunc.min(o.trunc));
        for (e, c) in self.terms.iter().chain(o.terms.iter()) {
            r.add_term(*e, c.clone());
        }
        r
    }

    pub fn scale(&self, p: &RationalPoly) -> Self {
        let mut r = Self::zero(self.nvars, self.nmax, self.trunc);
        for (e, c) in &self.terms {
            r.add_term(*e, c.mul(p));
        }
        r
    }

    pub fn scale_rational(&self, q: &BigRational) -> Self {
        self.scale(&RationalPoly::constant(q.clone()))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let trunc = self.trunc.min(o.trunc);
        let mut acc: BTreeMap<Exps, RationalPoly> = BTreeMap::new();
        for (e1, c1) in &self.terms {
            let d1 = total(e1);
            for (e2, c2) in &o.terms {
                if d1 + total(e2) >= trunc {
                    continue;
                }
                let mut e = *e1;
                for (a, b) in e.iter_mut().zip(e2.iter()) {
                    *a += *b;
                }
                acc.entry(e).or_default().add_product(c1, c2);
            }
        }
        acc.retain(|_, c| !c.is_zero());
        MultiSeries { nvars: self.nvars.max(o.nvars), nmax: self.nmax.max(o.nmax), trunc, terms: acc }
    }

    /// Whether the constant term vanishes.
    pub fn has_zero_constant(&self) -> bool {
        !self.terms.contains_key(&[0; MAX_VARS])
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Sets every `v_n` to zero in the coefficients.
    pub fn specialize_additive(&self) -> Self {
        let mut r = Self::zero(self.nvars, self.nmax, self.trunc);
        for (e, c) in &self.terms {
            r.add_term(*e, RationalPoly::constant(c.constant_term()));
        }
        r
    }

    /// Swaps variables `i` and `j`.
    pub fn swap_vars(&self, i: usize, j: usize) -> Self {
        let mut r = Self::zero(self.nvars, self.nmax, self.trunc);
        for (e, c) in &self.terms {
            let mut f = *e;
            f.swap(i, j);
            r.add_term(f, c.clone());
        }
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_square() {
        let x = MultiSeries::var(0, 2, 1, 3);
        let y = MultiSeries::var(1, 2, 1, 3);
        let s = x.add(&y);
        let sq = s.mul(&s);
        assert_eq!(sq.coeff(&[1, 1]), RationalPoly::integer(2));
        assert_eq!(sq.coeff(&[2, 0]), RationalPoly::one());
        let cube = sq.mul(&s);
        assert!(cube.is_zero(), "total degree 3 is past the truncation");
    }
}
