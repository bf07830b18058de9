//! Sign-alternating sums of powers of two and the ε/δ chains built from them.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecompositionForm {
    /// `ℓ = 2^{n_1} - 2^{n_2} + ... - 2^{n_q}`, q even.
    OddStuntedEvenQ,
    /// `ℓ = 2^{n_1} - ... + 2^{n_q} - 1`, q odd, `n_q >= 1`.
    OddStuntedOddQ,
    /// `ℓ = Σ (-1)^{i+1} 2^{n_i}` with `n_{q-1} > n_q + 1`.
    EvenStunted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AltDecomposition {
    pub form: DecompositionForm,
    /// Strictly decreasing.
    pub exponents: Vec<u32>,
}

impl AltDecomposition {
    pub fn q(&self) -> usize {
        self.exponents.len()
    }

    pub fn alternating_sum(exps: &[u32]) -> i128 {
        exps.iter()
            .enumerate()
            .map(|(i, &n)| if i % 2 == 0 { 1i128 << n } else { -(1i128 << n) })
            .sum()
    }

    pub fn evaluate(&self) -> i128 {
        let s = Self::alternating_sum(&self.exponents);
        match self.form {
            DecompositionForm::OddStuntedOddQ => s - 1,
            _ => s,
        }
    }

    /// Whether the exponents satisfy the shape constraints of the form.
    pub fn is_well_formed(&self) -> bool {
        let e = &self.exponents;
        if e.is_empty() || e.windows(2).any(|w| w[0] <= w[1]) {
            return false;
        }
        match self.form {
            DecompositionForm::OddStuntedEvenQ => e.len().is_multiple_of(2),
            DecompositionForm::OddStuntedOddQ => e.len() % 2 == 1 && *e.last().unwrap() >= 1,
            DecompositionForm::EvenStunted => e.len() < 2 || e[e.len() - 2] > e[e.len() - 1] + 1,
        }
    }
}

impl fmt::Display for AltDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, n) in self.exponents.iter().enumerate() {
            if i > 0 {
                write!(f, " {} ", if i % 2 == 1 { "-" } else { "+" })?;
            }
            write!(f, "2^{n}")?;
        }
        if self.form == DecompositionForm::OddStuntedOddQ {
            write!(f, " - 1")?;
        }
        Ok(())
    }
}

/// Exponent pairs `(a, b)` of the maximal runs of ones, `Σ (2^a - 2^b)`, high to low.
fn runs(x: u64) -> Vec<u32> {
    let mut out = Vec::new();
    let mut bit = 64;
    while bit > 0 {
        bit -= 1;
        if x >> bit & 1 == 1 {
            let top = bit + 1;
            while bit > 0 && x >> (bit - 1) & 1 == 1 {
                bit -= 1;
            }
            out.push(top);
            out.push(bit);
        }
    }
    out
}

/// The decomposition of `ℓ` in the requested form. Each form admits at most
/// one representation, so it is also the one with minimal `q`.
pub fn alt_decompose(l: u64, form: DecompositionForm) -> Result<AltDecomposition> {
    if l == 0 || l >= 1 << 62 {
        return Err(Error::NotRepresentable(l));
    }
    let exponents = match form {
        DecompositionForm::OddStuntedEvenQ => runs(l),
        DecompositionForm::OddStuntedOddQ => {
            if l.is_multiple_of(2) {
                return Err(Error::NotRepresentable(l));
            }
            let s = l + 1;
            let low = s.trailing_zeros();
            let mut e = runs(s - (1 << low));
            e.push(low);
            e
        }
        DecompositionForm::EvenStunted => {
            let low = l.trailing_zeros();
            if l >> (low + 1) & 1 == 1 {
                runs(l)
            } else {
                let mut e = runs(l - (1 << low));
                e.push(low);
                e
            }
        }
    };
    let d = AltDecomposition { form, exponents };
    debug_assert!(d.is_well_formed() && d.evaluate() == l as i128);
    Ok(d)
}

/// The form used for `RP^∞_{2ℓ+1}`: even `q` when `ℓ` is even, odd `q` otherwise.
pub fn odd_stunted_decomposition(l: u64) -> Result<AltDecomposition> {
    if l.is_multiple_of(2) {
        alt_decompose(l, DecompositionForm::OddStuntedEvenQ)
    } else {
        alt_decompose(l, DecompositionForm::OddStuntedOddQ)
    }
}

/// A chain `ℓ_1 = ℓ, ℓ_2, ..., ℓ_q` with the start points it predicts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chain {
    pub l: u64,
    pub decomposition: AltDecomposition,
    /// `ε(ℓ)` or `δ(ℓ)`.
    pub value: i64,
    pub ells: Vec<i64>,
    /// `starts[i-1]` is `ε_i` (resp. `δ_i`).
    pub starts: Vec<i64>,
    /// `levels[i-1] = n_i`: the start `starts[i-1]` carries a differential on page `2^{n_i+1}-1`.
    pub levels: Vec<u32>,
}

fn build_chain(l: u64, decomposition: AltDecomposition, carry: i64, base: i64) -> Chain {
    let n = &decomposition.exponents;
    let mut ells = vec![l as i64];
    for i in 0..n.len() - 1 {
        let next = (1i64 << n[i]) - ells[i] - carry;
        ells.push(next);
    }
    let f: Vec<i64> = ells.iter().zip(n).map(|(&x, &ni)| 2 * x - (1i64 << ni) + carry).collect();
    let mut starts = vec![0; n.len()];
    let mut acc = base + l as i64;
    for i in (0..n.len()).rev() {
        starts[i] = acc;
        acc += f[i];
    }
    Chain { l, value: f[0], ells, starts, levels: n.clone(), decomposition }
}

/// `ε(ℓ) = 2ℓ - 2^{n_1} + 1`, `ℓ_{i+1} = 2^{n_i} - ℓ_i - 1`,
/// `ε_i = 1 + ℓ + Σ_{j>i} ε(ℓ_j)`.
pub fn epsilon_chain(l: u64) -> Result<Chain> {
    Ok(build_chain(l, odd_stunted_decomposition(l)?, 1, 1))
}

/// `δ(ℓ) = 2ℓ - 2^{n_1}`, `ℓ_{i+1} = 2^{n_i} - ℓ_i`, `δ_i = ℓ + Σ_{j>i} δ(ℓ_j)`.
pub fn delta_chain(l: u64) -> Result<Chain> {
    Ok(build_chain(l, alt_decompose(l, DecompositionForm::EvenStunted)?, 0, 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use DecompositionForm::*;

    /// Every sign-alternating sum with q <= 8 and n_1 <= 12, grouped by form.
    fn brute_force(form: DecompositionForm) -> std::collections::BTreeMap<i128, Vec<Vec<u32>>> {
        let mut out: std::collections::BTreeMap<i128, Vec<Vec<u32>>> = Default::default();
        fn rec(cur: &mut Vec<u32>, form: DecompositionForm, out: &mut std::collections::BTreeMap<i128, Vec<Vec<u32>>>) {
            if !cur.is_empty() {
                let d = AltDecomposition { form, exponents: cur.clone() };
                if d.is_well_formed() && d.evaluate() > 0 {
                    out.entry(d.evaluate()).or_default().push(cur.clone());
                }
            }
            if cur.len() == 8 {
                return;
            }
            let hi = cur.last().map_or(13, |&x| x);
            for n in 0..hi {
                cur.push(n);
                rec(cur, form, out);
                cur.pop();
            }
        }
        rec(&mut Vec::new(), form, &mut out);
        out
    }

    #[test]
    fn paper_examples() {
        assert_eq!(odd_stunted_decomposition(50).unwrap().exponents, vec![6, 4, 2, 1]);
        assert_eq!(alt_decompose(50, EvenStunted).unwrap().exponents, vec![6, 4, 1]);
        let one = alt_decompose(1, OddStuntedOddQ).unwrap();
        assert_eq!(one.exponents, vec![1]);
        assert_eq!(one.to_string(), "2^1 - 1");
        assert!(alt_decompose(4, OddStuntedOddQ).is_err());
        assert!(alt_decompose(0, EvenStunted).is_err());
    }

    #[test]
    fn enumerator_agrees() {
        for form in [OddStuntedEvenQ, OddStuntedOddQ, EvenStunted] {
            let all = brute_force(form);
            for l in 1..=1000u64 {
                let found = all.get(&(l as i128));
                match alt_decompose(l, form) {
                    Ok(d) if d.q() > 8 => {}
                    Ok(d) => {
                        let found = found.expect("engine found a representation the enumerator missed");
                        assert_eq!(found.len(), 1, "{form:?} {l} not unique: {found:?}");
                        assert_eq!(found[0], d.exponents);
                    }
                    Err(_) => assert!(found.is_none(), "{form:?} {l}: missed {found:?}"),
                }
            }
        }
    }

    #[test]
    fn chains() {
        let e = epsilon_chain(50).unwrap();
        assert_eq!(e.value, 37);
        assert_eq!(e.ells, vec![50, 13, 2, 1]);
        assert_eq!(e.starts, vec![64, 53, 52, 51]);
        assert_eq!(e.levels, vec![6, 4, 2, 1]);
        let e1 = epsilon_chain(1).unwrap();
        assert_eq!((e1.value, e1.ells.len()), (1, 1));
        assert_eq!(epsilon_chain(2).unwrap().value, 1);

        let d = delta_chain(50).unwrap();
        assert_eq!(d.value, 36);
        assert_eq!(d.ells, vec![50, 14, 2]);
        assert_eq!(d.starts, vec![64, 52, 50]);
        assert_eq!(delta_chain(2).unwrap().value, 2);
        let d14 = delta_chain(14).unwrap();
        assert_eq!((d14.value, d14.decomposition.exponents.clone()), (12, vec![4, 1]));
    }

    proptest::proptest! {
        #[test]
        fn round_trip(l in 1u64..(1 << 40)) {
            for form in [OddStuntedEvenQ, OddStuntedOddQ, EvenStunted] {
                if let Ok(d) = alt_decompose(l, form) {
                    proptest::prop_assert!(d.is_well_formed());
                    proptest::prop_assert_eq!(d.evaluate(), l as i128);
                }
            }
            proptest::prop_assert!(alt_decompose(l, EvenStunted).is_ok());
            proptest::prop_assert!(odd_stunted_decomposition(l).is_ok());
        }
    }
}
