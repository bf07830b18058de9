//! Polynomials in v_1, ..., v_nmax with exact rational coefficients.

use crate::degree::{Convention, RODegree};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Hard cap on the number of polynomial generators.
pub const MAX_GENERATORS: usize = 8;

/// Exponent vector; slot `i` holds the exponent of `v_{i+1}`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VExp(pub [u16; MAX_GENERATORS]);

impl VExp {
    pub const ONE: VExp = VExp([0; MAX_GENERATORS]);

    /// The exponent vector of `v_n`, `n >= 1`.
    pub fn generator(n: usize) -> VExp {
        assert!((1..=MAX_GENERATORS).contains(&n), "generator index {n} out of range");
        let mut e = [0; MAX_GENERATORS];
        e[n - 1] = 1;
        VExp(e)
    }

    pub fn from_slice(exps: &[u16]) -> VExp {
        assert!(exps.len() <= MAX_GENERATORS);
        let mut e = [0; MAX_GENERATORS];
        e[..exps.len()].copy_from_slice(exps);
        VExp(e)
    }

    /// Exponent of `v_n`.
    pub fn get(&self, n: usize) -> u16 {
        self.0[n - 1]
    }

    pub fn mul(&self, o: &VExp) -> VExp {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(o.0.iter()) {
            *a += *b;
        }
        VExp(e)
    }

    pub fn pow(&self, k: u16) -> VExp {
        let mut e = self.0;
        for a in e.iter_mut() {
            *a *= k;
        }
        VExp(e)
    }

    /// Largest `n` with nonzero exponent of `v_n` (0 for the unit).
    pub fn top(&self) -> usize {
        self.0.iter().rposition(|&e| e != 0).map_or(0, |i| i + 1)
    }

    /// Σ (2^n - 1) e_n: the multiple of (1 + sign) carried by the monomial.
    pub fn weight(&self) -> i64 {
        self.0
            .iter()
            .enumerate()
            .map(|(i, &e)| ((1i64 << (i + 1)) - 1) * e as i64)
            .sum()
    }

    pub fn degree(&self, convention: Convention) -> RODegree {
        RODegree::v_monomial(&self.0, convention)
    }

    pub fn exponents(&self, nmax: usize) -> Vec<u16> {
        self.0[..nmax].to_vec()
    }
}

impl fmt::Display for VExp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "v{}", i + 1)?;
            } else {
                write!(f, "v{}^{}", i + 1, e)?;
            }
        }
        if first {
            write!(f, "1")?;
        }
        Ok(())
    }
}

/// Relations imposed on coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Modulus {
    None,
    /// The ideal `(2, v_1, ..., v_{n-1})`, `n >= 1`; `Ideal(1)` is plain mod 2.
    Ideal(usize),
}

impl Modulus {
    pub const TWO: Modulus = Modulus::Ideal(1);

    pub fn label(&self) -> String {
        match self {
            Modulus::None => "none".to_string(),
            Modulus::Ideal(n) => {
                let mut s = "(2".to_string();
                for i in 1..*n {
                    s.push_str(&format!(",v{i}"));
                }
                s.push(')');
                s
            }
        }
    }

    /// Parses `none`, `2`, `(2)`, `(2,v1,v2)` or `ideal:n`.
    pub fn parse(s: &str) -> Result<Modulus> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t == "none" || t.is_empty() {
            return Ok(Modulus::None);
        }
        if let Some(n) = t.strip_prefix("ideal:") {
            let n: usize = n.parse().map_err(|_| Error::InvalidArgument(format!("bad modulus {s}")))?;
            if n == 0 {
                return Ok(Modulus::None);
            }
            return Ok(Modulus::Ideal(n));
        }
        let inner = t.trim_start_matches('(').trim_end_matches(')');
        let mut parts = inner.split(',');
        if parts.next() != Some("2") {
            return Err(Error::InvalidArgument(format!("bad modulus {s}")));
        }
        let mut n = 1;
        for (i, p) in parts.enumerate() {
            if p != format!("v{}", i + 1) {
                return Err(Error::InvalidArgument(format!("modulus generators must be v1..v(n-1) in order: {s}")));
            }
            n += 1;
        }
        Ok(Modulus::Ideal(n))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RationalPoly {
    terms: BTreeMap<VExp, BigRational>,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl RationalPoly {
    pub fn zero() -> Self {
        RationalPoly { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::monomial(VExp::ONE, c)
    }

    pub fn integer(n: i64) -> Self {
        Self::constant(rat(n))
    }

    pub fn monomial(e: VExp, c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e, c);
        }
        RationalPoly { terms }
    }

    /// `v_n`.
    pub fn v(n: usize) -> Self {
        Self::monomial(VExp::generator(n), BigRational::one())
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

    pub fn terms(&self) -> impl Iterator<Item = (&VExp, &BigRational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &VExp) -> BigRational {
        self.terms.get(e).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn add_term(&mut self, e: VExp, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_assign(&mut self, o: &RationalPoly) {
        for (e, c) in &o.terms {
            self.add_term(*e, c.clone());
        }
    }

    pub fn sub_assign(&mut self, o: &RationalPoly) {
        for (e, c) in &o.terms {
            self.add_term(*e, -c.clone());
        }
    }

    /// `self += a * b`.
    pub fn add_product(&mut self, a: &RationalPoly, b: &RationalPoly) {
        for (e1, c1) in &a.terms {
            for (e2, c2) in &b.terms {
                self.add_term(e1.mul(e2), c1 * c2);
            }
        }
    }

    pub fn add(&self, o: &RationalPoly) -> RationalPoly {
        let mut r = self.clone();
        r.add_assign(o);
        r
    }

    pub fn sub(&self, o: &RationalPoly) -> RationalPoly {
        let mut r = self.clone();
        r.sub_assign(o);
        r
    }

    pub fn mul(&self, o: &RationalPoly) -> RationalPoly {
        let mut r = RationalPoly::zero();
        r.add_product(self, o);
        r
    }

    pub fn scale(&self, c: &BigRational) -> RationalPoly {
        if c.is_zero() {
            return RationalPoly::zero();
        }
        RationalPoly { terms: self.terms.iter().map(|(e, x)| (*e, x * c)).collect() }
    }

    pub fn neg(&self) -> RationalPoly {
        self.scale(&rat(-1))
    }

    pub fn pow(&self, k: u32) -> RationalPoly {
        let mut r = RationalPoly::one();
        for _ in 0..k {
            r = r.mul(self);
        }
        r
    }

    /// Highest generator index appearing.
    pub fn top_generator(&self) -> usize {
        self.terms.keys().map(|e| e.top()).max().unwrap_or(0)
    }

    /// Sets `v_n = 0` for every `n > nmax`.
    pub fn restrict(&self, nmax: usize) -> RationalPoly {
        RationalPoly {
            terms: self.terms.iter().filter(|(e, _)| e.top() <= nmax).map(|(e, c)| (*e, c.clone())).collect(),
        }
    }

    /// Value with every `v_n` set to zero.
    pub fn constant_term(&self) -> BigRational {
        self.coeff(&VExp::ONE)
    }

    /// Whether every term has the same weight; returns it.
    pub fn homogeneous_weight(&self) -> Option<Option<i64>> {
        let mut w = None;
        for e in self.terms.keys() {
            match w {
                None => w = Some(e.weight()),
                Some(x) if x != e.weight() => return None,
                _ => {}
            }
        }
        Some(w)
    }

    /// Reduces modulo the given ideal. Coefficients must be 2-local integers.
    pub fn reduce(&self, modulus: Modulus) -> Result<RationalPoly> {
        let n = match modulus {
            Modulus::None => return Ok(self.clone()),
            Modulus::Ideal(n) => n,
        };
        let two = BigInt::from(2);
        let mut out = RationalPoly::zero();
        for (e, c) in &self.terms {
            if c.denom().is_even() {
                return Err(Error::NonIntegral { term: e.to_string(), coef: c.to_string() });
            }
            if (1..n).any(|j| j <= MAX_GENERATORS && e.get(j) > 0) {
                continue;
            }
            // p/q with q odd is congruent to p mod 2.
            if c.numer().mod_floor(&two).is_one() {
                out.terms.insert(*e, BigRational::one());
            }
        }
        Ok(out)
    }

    /// True when all coefficients are integers.
    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.coeff(&VExp::ONE).is_one()
    }
}

pub(crate) fn fmt_coef(c: &BigRational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for RationalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            if *e == VExp::ONE {
                write!(f, "{}", fmt_coef(&a))?;
            } else if a.is_one() {
                write!(f, "{e}")?;
            } else {
                write!(f, "{}*{e}", fmt_coef(&a))?;
            }
        }
        Ok(())
    }
}
