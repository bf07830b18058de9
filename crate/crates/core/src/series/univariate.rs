//! Truncated power series in `u` with polynomial coefficients.

use super::poly::{fmt_coef, Modulus, RationalPoly, VExp};
use crate::degree::{Convention, RODegree};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};
use std::fmt;

/// `Σ_{j < trunc} c_j u^j` over `Q[v_1..v_nmax]`, optionally reduced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    nmax: usize,
    trunc: usize,
    modulus: Modulus,
    coeffs: Vec<RationalPoly>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub u: i64,
    pub v: Vec<u16>,
    pub coef: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub trunc: i64,
    pub modulus: String,
    pub terms: Vec<TermJson>,
}

impl TruncatedSeries {
    pub fn zero(nmax: usize, trunc: usize) -> Self {
        TruncatedSeries { nmax, trunc, modulus: Modulus::None, coeffs: vec![RationalPoly::zero(); trunc] }
    }

    /// The series `u`.
    pub fn u(nmax: usize, trunc: usize) -> Self {
        let mut s = Self::zero(nmax, trunc);
        if trunc > 1 {
            s.coeffs[1] = RationalPoly::one();
        }
        s
    }

    /// Builds from coefficients; entries at or past `trunc` are dropped.
    pub fn from_coeffs(nmax: usize, trunc: usize, mut coeffs: Vec<RationalPoly>) -> Self {
        coeffs.resize(trunc, RationalPoly::zero());
        for c in coeffs.iter_mut() {
            if c.top_generator() > nmax {
                *c = c.restrict(nmax);
            }
        }
        TruncatedSeries { nmax, trunc, modulus: Modulus::None, coeffs }
    }

    pub fn nmax(&self) -> usize {
        self.nmax
    }
    pub fn trunc(&self) -> usize {
        self.trunc
    }
    pub fn modulus(&self) -> Modulus {
        self.modulus
    }
    pub fn coeffs(&self) -> &[RationalPoly] {
        &self.coeffs
    }

    /// Coefficient of `u^j`; zero past the truncation.
    pub fn coeff(&self, j: usize) -> RationalPoly {
        self.coeffs.get(j).cloned().unwrap_or_default()
    }

    pub fn set_coeff(&mut self, j: usize, c: RationalPoly) {
        if j < self.trunc {
            self.coeffs[j] = c.restrict(self.nmax);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Lowest nonzero `(j, c_j)`.
    pub fn lowest_term(&self) -> Option<(usize, &RationalPoly)> {
        self.coeffs.iter().enumerate().find(|(_, c)| !c.is_zero())
    }

    /// Lowers the truncation order.
    pub fn truncate(&self, trunc: usize) -> Self {
        let t = trunc.min(self.trunc);
        TruncatedSeries { nmax: self.nmax, trunc: t, modulus: self.modulus, coeffs: self.coeffs[..t].to_vec() }
    }

    fn combine_meta(&self, o: &Self) -> (usize, usize, Modulus) {
        let modulus = if self.modulus == o.modulus { self.modulus } else { Modulus::None };
        (self.nmax.max(o.nmax), self.trunc.min(o.trunc), modulus)
    }

    pub fn add(&self, o: &Self) -> Self {
        let (nmax, trunc, modulus) = self.combine_meta(o);
        let coeffs = (0..trunc).map(|j| self.coeffs[j].add(&o.coeffs[j])).collect();
        TruncatedSeries { nmax, trunc, modulus, coeffs }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let (nmax, trunc, modulus) = self.combine_meta(o);
        let coeffs = (0..trunc).map(|j| self.coeffs[j].sub(&o.coeffs[j])).collect();
        TruncatedSeries { nmax, trunc, modulus, coeffs }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let (nmax, trunc, _) = self.combine_meta(o);
        let mut coeffs = vec![RationalPoly::zero(); trunc];
        for (i, a) in self.coeffs.iter().enumerate().take(trunc) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate().take(trunc - i) {
                if !b.is_zero() {
                    coeffs[i + j].add_product(a, b);
                }
            }
        }
        TruncatedSeries { nmax, trunc, modulus: Modulus::None, coeffs }
    }

    pub fn scale(&self, p: &RationalPoly) -> Self {
        let coeffs = self.coeffs.iter().map(|c| c.mul(p)).collect();
        TruncatedSeries { nmax: self.nmax, trunc: self.trunc, modulus: Modulus::None, coeffs }
    }

    /// `self(g)`; `g` must have zero constant term.
    pub fn compose(&self, g: &Self) -> Result<Self> {
        if !g.coeff(0).is_zero() {
            return Err(Error::InvalidArgument("inner series must have zero constant term".into()));
        }
        let (nmax, trunc, _) = self.combine_meta(g);
        // Horner: c_0 + g(c_1 + g(c_2 + ...)).
        let mut acc = TruncatedSeries::zero(nmax, trunc);
        for j in (0..trunc).rev() {
            acc = acc.mul(g);
            acc.coeffs[0].add_assign(&self.coeffs[j]);
        }
        Ok(acc)
    }

    /// `self^p` for a series with constant term 1 (J.C.P. Miller recurrence).
    pub fn pow_unit(&self, p: i64) -> Result<Self> {
        if !self.coeff(0).is_one() {
            return Err(Error::InvalidArgument("pow_unit needs constant term 1".into()));
        }
        let mut out = vec![RationalPoly::one()];
        for n in 1..self.trunc {
            out.push(miller_step(&self.coeffs, &out, p, n));
        }
        Ok(TruncatedSeries { nmax: self.nmax, trunc: self.trunc, modulus: Modulus::None, coeffs: out })
    }

    /// Reduces every coefficient modulo the ideal.
    pub fn reduce(&self, modulus: Modulus) -> Result<Self> {
        let coeffs = self.coeffs.iter().map(|c| c.reduce(modulus)).collect::<Result<Vec<_>>>()?;
        Ok(TruncatedSeries { nmax: self.nmax, trunc: self.trunc, modulus, coeffs })
    }

    /// Checks every monomial `c v^E u^j` has degree `target`; returns the first offender.
    pub fn check_homogeneous(&self, target: RODegree, convention: Convention) -> std::result::Result<(), (usize, VExp)> {
        let u = RODegree::u(convention);
        for (j, c) in self.coeffs.iter().enumerate() {
            for (e, _) in c.terms() {
                if e.degree(convention) + u * j as i64 != target {
                    return Err((j, *e));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> SeriesJson {
        series_json(self.nmax, 0, self.trunc as i64, self.modulus, &self.coeffs)
    }
}

/// One step of `(g^p)_n = (1/n) Σ_{j=1}^{n} ((p+1)j - n) g_j (g^p)_{n-j}`.
pub(crate) fn miller_step(g: &[RationalPoly], gp: &[RationalPoly], p: i64, n: usize) -> RationalPoly {
    let mut acc = RationalPoly::zero();
    for j in 1..=n.min(g.len() - 1) {
        if g[j].is_zero() || gp[n - j].is_zero() {
            continue;
        }
        let k = (p + 1) * j as i64 - n as i64;
        if k == 0 {
            continue;
        }
        acc.add_product(&g[j].scale(&BigRational::from_integer(BigInt::from(k))), &gp[n - j]);
    }
    acc.scale(&BigRational::new(BigInt::one(), BigInt::from(n)))
}

pub(crate) fn series_json(nmax: usize, low: i64, trunc: i64, modulus: Modulus, coeffs: &[RationalPoly]) -> SeriesJson {
    let mut terms = Vec::new();
    for (j, c) in coeffs.iter().enumerate() {
        for (e, x) in c.terms() {
            terms.push(TermJson { u: low + j as i64, v: e.exponents(nmax), coef: fmt_coef(x) });
        }
    }
    SeriesJson { trunc, modulus: modulus.label(), terms }
}

pub(crate) fn render(f: &mut fmt::Formatter<'_>, low: i64, trunc: i64, coeffs: &[RationalPoly]) -> fmt::Result {
    let mut first = true;
    for (j, c) in coeffs.iter().enumerate() {
        let k = low + j as i64;
        for (e, x) in c.terms() {
            let neg = x.is_negative();
            let a = x.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            first = false;
            let mut factors = Vec::new();
            if !a.is_one() {
                factors.push(fmt_coef(&a));
            }
            if *e != VExp::ONE {
                factors.push(e.to_string());
            }
            match k {
                0 => {}
                1 => factors.push("u".into()),
                _ => factors.push(format!("u^{k}")),
            }
            if factors.is_empty() {
                factors.push("1".into());
            }
            write!(f, "{}", factors.join("*"))?;
        }
    }
    if first {
        write!(f, "0")?;
    }
    write!(f, " + O(u^{trunc})")
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        render(f, 0, self.trunc as i64, &self.coeffs)
    }
}

/// `u^low · Σ_{j} c_j u^j`, known for exponents below `trunc`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentSeries {
    pub nmax: usize,
    pub low: i64,
    pub trunc: i64,
    pub coeffs: Vec<RationalPoly>,
}

impl LaurentSeries {
    /// `u^shift · s`.
    pub fn shifted(s: &TruncatedSeries, shift: i64) -> Self {
        LaurentSeries { nmax: s.nmax, low: shift, trunc: s.trunc as i64 + shift, coeffs: s.coeffs.clone() }
    }

    pub fn coeff(&self, k: i64) -> RationalPoly {
        if k < self.low || k >= self.trunc {
            return RationalPoly::zero();
        }
        self.coeffs.get((k - self.low) as usize).cloned().unwrap_or_default()
    }

    /// Nonzero `(exponent, coefficient)` pairs.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &RationalPoly)> {
        let low = self.low;
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(move |(j, c)| (low + j as i64, c))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let low = self.low + o.low;
        let trunc = (self.trunc + o.low).min(o.trunc + self.low);
        let len = (trunc - low).max(0) as usize;
        let mut coeffs = vec![RationalPoly::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                if i + j < len && !a.is_zero() && !b.is_zero() {
                    coeffs[i + j].add_product(a, b);
                }
            }
        }
        LaurentSeries { nmax: self.nmax.max(o.nmax), low, trunc, coeffs }
    }

    pub fn check_homogeneous(&self, target: RODegree, convention: Convention) -> std::result::Result<(), (i64, VExp)> {
        let u = RODegree::u(convention);
        for (k, c) in self.terms() {
            for (e, _) in c.terms() {
                if e.degree(convention) + u * k != target {
                    return Err((k, *e));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> SeriesJson {
        series_json(self.nmax, self.low, self.trunc, Modulus::None, &self.coeffs)
    }
}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        render(f, self.low, self.trunc, &self.coeffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn int(n: i64) -> RationalPoly {
        RationalPoly::integer(n)
    }

    fn series(cs: &[i64], trunc: usize) -> TruncatedSeries {
        TruncatedSeries::from_coeffs(1, trunc, cs.iter().map(|&c| int(c)).collect())
    }

    #[test]
    fn render_text() {
        let s = TruncatedSeries::from_coeffs(2, 4, vec![int(0), int(2), RationalPoly::v(1), int(-1)]);
        assert_eq!(s.to_string(), "2*u + v1*u^2 - u^3 + O(u^4)");
        assert_eq!(s.to_json().terms.len(), 3);
        assert_eq!(s.lowest_term().map(|t| t.0), Some(1));
    }

    #[test]
    fn geometric_inverse() {
        // (1 - u)(1 + u + u^2 + ...) = 1
        let a = series(&[1, -1], 8);
        let b = series(&[1; 8], 8);
        assert_eq!(a.mul(&b), series(&[1], 8));
        assert_eq!(a.pow_unit(-1).unwrap(), b);
    }

    proptest! {
        #[test]
        fn miller_matches_repeated_product(cs in proptest::collection::vec(-3i64..4, 1..6), p in 0i64..5) {
            let mut cs = cs;
            cs.insert(0, 1);
            let s = series(&cs, 7);
            let mut direct = series(&[1], 7);
            for _ in 0..p {
                direct = direct.mul(&s);
            }
            prop_assert_eq!(s.pow_unit(p).unwrap(), direct);
        }

        #[test]
        fn composition_associates(a in proptest::collection::vec(-3i64..4, 0..5),
                                  b in proptest::collection::vec(-3i64..4, 0..5),
                                  c in proptest::collection::vec(-3i64..4, 0..5)) {
            let mk = |v: &Vec<i64>| {
                let mut w = vec![0];
                w.extend(v.iter().copied());
                series(&w, 6)
            };
            let (f, g, h) = (mk(&a), mk(&b), mk(&c));
            let lhs = f.compose(&g).unwrap().compose(&h).unwrap();
            let rhs = f.compose(&g.compose(&h).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
