//! The universal 2-typical formal group law in Hazewinkel generators.

use super::multi::{MultiSeries, MAX_VARS};
use super::poly::{Modulus, RationalPoly, VExp, MAX_GENERATORS};
use super::univariate::{miller_step, LaurentSeries, TruncatedSeries};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;

fn check_args(nmax: usize, trunc: usize) -> Result<()> {
    if nmax == 0 || nmax > MAX_GENERATORS {
        return Err(Error::InvalidArgument(format!("nmax must be in 1..={MAX_GENERATORS}, got {nmax}")));
    }
    if trunc < 2 {
        return Err(Error::InvalidArgument(format!("truncation order must be at least 2, got {trunc}")));
    }
    Ok(())
}

/// `l_0, l_1, ...` with `2 l_n = Σ_{i<n} l_i v_{n-i}^{2^i}`, `v_j = 0` for `j > nmax`.
pub fn log_coefficients(nmax: usize, count: usize) -> Vec<RationalPoly> {
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    let mut l = vec![RationalPoly::one()];
    for n in 1..count {
        let mut s = RationalPoly::zero();
        for (i, li) in l.iter().enumerate() {
            let j = n - i;
            if j > nmax {
                continue;
            }
            let vpow = RationalPoly::monomial(VExp::generator(j).pow(1 << i), BigRational::from_integer(1.into()));
            s.add_product(li, &vpow);
        }
        l.push(s.scale(&half));
    }
    l
}

/// Number of `i` with `2^i < trunc`.
fn log_len(trunc: usize) -> usize {
    let mut c = 0;
    while (1usize << c) < trunc {
        c += 1;
    }
    c
}

/// `log(u) = Σ l_i u^{2^i}` truncated at `u^trunc`.
pub fn hazewinkel_log(nmax: usize, trunc: usize) -> Result<TruncatedSeries> {
    check_args(nmax, trunc)?;
    let l = log_coefficients(nmax, log_len(trunc));
    let mut s = TruncatedSeries::zero(nmax, trunc);
    for (i, li) in l.into_iter().enumerate() {
        s.set_coeff(1 << i, li);
    }
    Ok(s)
}

/// The compositional inverse of the logarithm.
///
/// Writing `exp(t) = t·g(t)`, the coefficient `g_{k-1}` is fixed by the
/// `t^k` coefficient of `log(exp t) = t`, which only involves powers
/// `g^{2^i}` at indices below `k-1`; those are extended incrementally.
pub fn hazewinkel_exp(nmax: usize, trunc: usize) -> Result<TruncatedSeries> {
    check_args(nmax, trunc)?;
    let l = log_coefficients(nmax, log_len(trunc));
    let mut g = vec![RationalPoly::one()];
    let mut powers: Vec<Vec<RationalPoly>> = (1..l.len()).map(|_| vec![RationalPoly::one()]).collect();
    for k in 2..trunc {
        let mut gk = RationalPoly::zero();
        for i in 1..l.len() {
            let p = 1usize << i;
            if p > k {
                break;
            }
            let need = k - p;
            let pw = &mut powers[i - 1];
            while pw.len() <= need {
                let n = pw.len();
                let next = miller_step(&g, pw, p as i64, n);
                pw.push(next);
            }
            gk.add_product(&l[i], &pw[need]);
        }
        g.push(gk.neg());
    }
    let mut coeffs = vec![RationalPoly::zero()];
    coeffs.extend(g);
    Ok(TruncatedSeries::from_coeffs(nmax, trunc, coeffs))
}

/// `F(x, y) = exp(log x + log y)` in two variables, total order below `trunc`.
pub fn universal_fgl(nmax: usize, trunc: usize) -> Result<MultiSeries> {
    check_args(nmax, trunc)?;
    let lg = hazewinkel_log(nmax, trunc)?;
    let ex = hazewinkel_exp(nmax, trunc)?;
    let x = MultiSeries::var(0, 2, nmax, trunc);
    let y = MultiSeries::var(1, 2, nmax, trunc);
    let s = substitute_univariate(&lg, &x).add(&substitute_univariate(&lg, &y));
    Ok(substitute_univariate(&ex, &s))
}

/// `f(s)` for a univariate series `f` and a multivariate `s` with zero constant term.
pub fn substitute_univariate(f: &TruncatedSeries, s: &MultiSeries) -> MultiSeries {
    let (nv, nmax, trunc) = (s.nvars(), s.nmax().max(f.nmax()), s.trunc().min(f.trunc()));
    let mut acc = MultiSeries::zero(nv, nmax, trunc);
    for j in (0..trunc).rev() {
        acc = acc.mul(s);
        acc.add_term([0; MAX_VARS], f.coeff(j));
    }
    acc
}

/// `x +_F y` for series `x`, `y` in a common multivariate ring.
///
/// Both inputs need zero constant term and the same truncation and `nmax`.
pub fn fgl_sum(x: &MultiSeries, y: &MultiSeries) -> Result<MultiSeries> {
    if x.trunc() != y.trunc() {
        return Err(Error::TruncationMismatch { left: x.trunc(), right: y.trunc() });
    }
    if x.nmax() != y.nmax() || x.nvars() != y.nvars() {
        return Err(Error::InvalidArgument("fgl_sum inputs live in different rings".into()));
    }
    if !x.has_zero_constant() || !y.has_zero_constant() {
        return Err(Error::InvalidArgument("fgl_sum inputs need zero constant term".into()));
    }
    let (nv, nmax, trunc) = (x.nvars(), x.nmax(), x.trunc());
    let f = universal_fgl(nmax, trunc)?;
    // Σ_i x^i (Σ_j c_ij y^j), Horner in x.
    let mut ypow = vec![MultiSeries::constant(RationalPoly::one(), nv, nmax, trunc)];
    for _ in 1..trunc {
        let next = ypow.last().unwrap().mul(y);
        ypow.push(next);
    }
    let mut acc = MultiSeries::zero(nv, nmax, trunc);
    for i in (0..trunc).rev() {
        acc = acc.mul(x);
        for (j, yp) in ypow.iter().enumerate().take(trunc - i) {
            let c = f.coeff(&[i as u16, j as u16]);
            if !c.is_zero() {
                acc = acc.add(&yp.scale(&c));
            }
        }
    }
    Ok(acc)
}

/// `[2]_F(u) = F(u, u)`, reduced by `modulus`.
pub fn two_series(nmax: usize, trunc: usize, modulus: Modulus) -> Result<TruncatedSeries> {
    check_args(nmax, trunc)?;
    let lg = hazewinkel_log(nmax, trunc)?;
    let ex = hazewinkel_exp(nmax, trunc)?;
    let doubled = lg.scale(&RationalPoly::integer(2));
    ex.compose(&doubled)?.reduce(modulus)
}

/// The pair behind the level-`n` differentials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhiW {
    pub level: usize,
    /// `[2]_F(u)` reduced mod `(2, v_1..v_{n-1})`; unreduced when `n = 0`.
    pub phi: TruncatedSeries,
    /// `phi - v_n u^{2^n}` with `v_0 = 2`.
    pub w: TruncatedSeries,
}

pub fn phi_w_series(n: usize, nmax: usize, trunc: usize) -> Result<PhiW> {
    if n >= 16 || trunc <= (1usize << (n + 1)) {
        return Err(Error::InvalidArgument(format!(
            "truncation {trunc} does not expose u^{} at level {n}",
            1u64 << (n + 1).min(63)
        )));
    }
    if n > nmax {
        return Err(Error::InvalidArgument(format!("level {n} needs nmax >= {n}")));
    }
    let modulus = if n == 0 { Modulus::None } else { Modulus::Ideal(n) };
    let phi = two_series(nmax, trunc, modulus)?;
    let vn = if n == 0 { RationalPoly::integer(2) } else { RationalPoly::v(n) };
    let mut w = phi.clone();
    let p = 1usize << n;
    w.set_coeff(p, phi.coeff(p).sub(&vn));
    let w = if n == 0 { w } else { w.reduce(modulus)? };
    Ok(PhiW { level: n, phi, w })
}

/// Leading term of `w_n` once `v_n` is also killed: returns the `v`-exponent
/// and the `u`-shift relative to `u^{2^n}` of the horizontal differential.
pub fn horizontal_leading_term(n: usize) -> Result<(VExp, usize)> {
    let nmax = n + 1;
    let trunc = (1usize << (n + 1)) + 1;
    let pw = phi_w_series(n, nmax, trunc)?;
    let w = pw.w.reduce(Modulus::Ideal(n + 1))?;
    let (j, c) = w
        .lowest_term()
        .ok_or_else(|| Error::Consistency { cell: format!("w_{n}"), reason: "vanishes mod v_n".into() })?;
    if c.len() != 1 {
        return Err(Error::Consistency { cell: format!("w_{n}"), reason: format!("leading coefficient {c} is not a monomial") });
    }
    let (e, _) = c.terms().next().unwrap();
    Ok((*e, j - (1 << n)))
}

/// `[x^k] F(x, u)` as a series in `u` below `u^trunc`.
pub fn b_coefficient(k: usize, nmax: usize, trunc: usize) -> Result<TruncatedSeries> {
    if trunc <= k {
        return Err(Error::InvalidArgument(format!("truncation {trunc} must exceed k = {k}")));
    }
    let f = universal_fgl(nmax, k + trunc)?;
    let coeffs = (0..trunc).map(|j| f.coeff(&[k as u16, j as u16])).collect();
    Ok(TruncatedSeries::from_coeffs(nmax, trunc, coeffs))
}

/// Image of `b_k` in the localized corner: `u^{-1} [x^k] F(x, u)`, which
/// has degree `k(1+γα)`.
pub fn b_image(k: usize, nmax: usize, trunc: usize) -> Result<LaurentSeries> {
    Ok(LaurentSeries::shifted(&b_coefficient(k, nmax, trunc)?, -1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degree::{Convention, RODegree};

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(d))
    }

    #[test]
    fn small_logs() {
        assert_eq!(hazewinkel_log(1, 2).unwrap().to_string(), "u + O(u^2)");
        assert_eq!(hazewinkel_log(1, 3).unwrap().to_string(), "u + 1/2*v1*u^2 + O(u^3)");
        let l2 = hazewinkel_log(2, 5).unwrap().coeff(4);
        let expect = RationalPoly::v(2).scale(&q(1, 2)).add(&RationalPoly::v(1).pow(3).scale(&q(1, 4)));
        assert_eq!(l2, expect);
        assert!(hazewinkel_log(0, 4).is_err());
        assert!(hazewinkel_log(1, 1).is_err());
    }

    #[test]
    fn exp_inverts_log() {
        let (lg, ex) = (hazewinkel_log(3, 12).unwrap(), hazewinkel_exp(3, 12).unwrap());
        let u = TruncatedSeries::u(3, 12);
        assert_eq!(ex.compose(&lg).unwrap(), u);
        assert_eq!(lg.compose(&ex).unwrap(), u);
    }

    #[test]
    fn two_series_low_terms() {
        let t = two_series(2, 6, Modulus::None).unwrap();
        assert_eq!(t.coeff(1), RationalPoly::integer(2));
        assert_eq!(t.coeff(2), RationalPoly::v(1).neg());
        let m = two_series(2, 6, Modulus::TWO).unwrap();
        assert!(m.coeff(0).is_zero() && m.coeff(1).is_zero());
        assert_eq!(m.lowest_term().unwrap(), (2, &RationalPoly::v(1)));
    }

    #[test]
    fn phi_w_shapes() {
        let pw = phi_w_series(1, 2, 9).unwrap();
        assert!(pw.w.coeff(2).is_zero());
        assert!(pw.w.lowest_term().unwrap().0 > 2);
        let c4 = pw.w.coeff(4);
        assert_eq!(c4.coeff(&VExp::generator(2)), BigRational::from_integer(1.into()));
        assert!(c4.terms().all(|(e, _)| *e == VExp::generator(2) || e.get(2) == 0));
        let p0 = phi_w_series(0, 1, 3).unwrap();
        assert_eq!(p0.phi.reduce(Modulus::TWO).unwrap().lowest_term().unwrap(), (2, &RationalPoly::v(1)));
        assert!(p0.w.coeff(1).is_zero());
        assert!(phi_w_series(2, 3, 8).is_err());
    }

    #[test]
    fn horizontal_leading_terms() {
        for n in 0..4 {
            assert_eq!(horizontal_leading_term(n).unwrap(), (VExp::generator(n + 1), 1 << n), "level {n}");
        }
    }

    #[test]
    fn b_images() {
        let b0 = b_coefficient(0, 2, 5).unwrap();
        assert_eq!(b0, TruncatedSeries::u(2, 5));
        let b1 = b_coefficient(1, 2, 4).unwrap();
        assert_eq!(b1.coeff(0), RationalPoly::one());
        assert_eq!(b1.coeff(1).reduce(Modulus::TWO).unwrap(), RationalPoly::v(1));
        for k in 0..4 {
            let b = b_image(k, 3, 8).unwrap();
            assert_eq!(b.check_homogeneous(RODegree::b(k), Convention::Diagonal), Ok(()), "b_{k}");
        }
    }
}
