//! Finitely presented abelian groups `Z^n / im(R)`, their canonical forms,
//! subgroups given by generator lattices, and pullbacks.

use super::snf::{image_basis, kernel, smith_normal_form, solve, solve_with, IntMatrix, Snf};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

/// `Z^gens` modulo the column span of `relations` (a `gens x k` matrix).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presented {
    pub relations: IntMatrix,
}

impl Presented {
    pub fn new(relations: IntMatrix) -> Self {
        Presented { relations }
    }

    /// Direct sum of cyclic groups of the given orders (`0` for `Z`).
    pub fn cyclic(orders: &[u64]) -> Self {
        let n = orders.len();
        let cols: Vec<Vec<BigInt>> = orders
            .iter()
            .enumerate()
            .filter(|(_, &o)| o != 0)
            .map(|(i, &o)| {
                let mut c = vec![BigInt::zero(); n];
                c[i] = BigInt::from(o);
                c
            })
            .collect();
        Presented { relations: IntMatrix::from_cols(&cols, n) }
    }

    pub fn free(n: usize) -> Self {
        Presented { relations: IntMatrix::zeros(n, 0) }
    }

    pub fn gens(&self) -> usize {
        self.relations.rows()
    }

    pub fn direct_sum(&self, o: &Presented) -> Presented {
        Presented { relations: self.relations.block(&o.relations) }
    }

    pub fn canonical(&self) -> FgAbelianGroup {
        FgAbelianGroup::from_presentation(self.clone())
    }

    /// Is `x` zero in the group?
    pub fn is_zero(&self, x: &[BigInt]) -> bool {
        x.iter().all(|c| c.is_zero()) || solve(&self.relations, x).is_some()
    }

    /// Does the lattice `S + im R` contain `x`?
    pub fn in_subgroup(&self, s: &IntMatrix, x: &[BigInt]) -> bool {
        solve(&s.hcat(&self.relations), x).is_some()
    }

    /// `S + im R == T + im R`.
    pub fn same_subgroup(&self, s: &IntMatrix, t: &IntMatrix) -> bool {
        let st = smith_normal_form(&s.hcat(&self.relations));
        let tt = smith_normal_form(&t.hcat(&self.relations));
        let cs = s.cols() + self.relations.cols();
        let ct = t.cols() + self.relations.cols();
        (0..t.cols()).all(|j| solve_with(&st, cs, &t.col(j)).is_some())
            && (0..s.cols()).all(|j| solve_with(&tt, ct, &s.col(j)).is_some())
    }

    /// The subquotient `(S + im R) / (S' + im R)` with `S' ⊆ S + im R`,
    /// presented on a basis of `S + im R`. Returns the group and the basis.
    pub fn subquotient(&self, s: &IntMatrix, sub: &IntMatrix) -> (Presented, IntMatrix) {
        let basis = image_basis(&s.hcat(&self.relations));
        let snf = smith_normal_form(&basis);
        let bottom = sub.hcat(&self.relations);
        let cols: Vec<Vec<BigInt>> = (0..bottom.cols())
            .map(|j| solve_with(&snf, basis.cols(), &bottom.col(j)).expect("subgroup lies in the larger lattice"))
            .collect();
        (Presented { relations: IntMatrix::from_cols(&cols, basis.cols()) }, basis)
    }

    /// Generators, one per standard basis vector, that are not in `S + im R`.
    pub fn missing_generators(&self, s: &IntMatrix) -> Vec<usize> {
        let full = s.hcat(&self.relations);
        let snf = smith_normal_form(&full);
        (0..self.gens())
            .filter(|&i| {
                let mut e = vec![BigInt::zero(); self.gens()];
                e[i] = BigInt::one();
                solve_with(&snf, full.cols(), &e).is_none()
            })
            .collect()
    }

    /// Does `S + im R` exhaust the group?
    pub fn spans(&self, s: &IntMatrix) -> bool {
        let snf = smith_normal_form(&s.hcat(&self.relations));
        snf.rank == self.gens() && snf.invariants().iter().all(|d| d.is_one())
    }
}

/// Isomorphism type of a finitely generated abelian group: invariant
/// factors `d_1 | d_2 | ...` with every `d_i > 1`, followed by `0`s for the
/// free summands. The presentation it came from is kept.
#[derive(Clone, Debug)]
pub struct FgAbelianGroup {
    pub summands: Vec<BigInt>,
    pub presentation: Presented,
}

impl PartialEq for FgAbelianGroup {
    fn eq(&self, o: &Self) -> bool {
        self.summands == o.summands
    }
}

impl Eq for FgAbelianGroup {}

impl FgAbelianGroup {
    pub fn from_presentation(p: Presented) -> Self {
        FgAbelianGroup { summands: canonical_summands(&p), presentation: p }
    }

    pub fn cyclic(orders: &[u64]) -> Self {
        Self::from_presentation(Presented::cyclic(orders))
    }

    pub fn is_trivial(&self) -> bool {
        self.summands.is_empty()
    }

    pub fn rank(&self) -> usize {
        self.summands.iter().filter(|d| d.is_zero()).count()
    }

    /// Order of the group, `None` when infinite.
    pub fn order(&self) -> Option<BigInt> {
        if self.rank() > 0 {
            return None;
        }
        Some(self.summands.iter().fold(BigInt::one(), |a, d| a * d))
    }

    pub fn summands_u64(&self) -> Vec<u64> {
        self.summands.iter().map(|d| u64::try_from(d).unwrap_or(u64::MAX)).collect()
    }
}

impl fmt::Display for FgAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.summands.is_empty() {
            return write!(f, "0");
        }
        let mut parts: Vec<String> = Vec::new();
        let mut i = 0;
        while i < self.summands.len() {
            let d = &self.summands[i];
            let mut j = i;
            while j < self.summands.len() && &self.summands[j] == d {
                j += 1;
            }
            let base = if d.is_zero() { "Z".to_string() } else { format!("Z/{d}") };
            parts.push(if j - i > 1 { format!("({base})^{}", j - i) } else { base });
            i = j;
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// JSON form: summand orders with `0` for `Z`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupJson {
    pub summands: Vec<u64>,
    pub text: String,
}

impl From<&FgAbelianGroup> for GroupJson {
    fn from(g: &FgAbelianGroup) -> Self {
        GroupJson { summands: g.summands_u64(), text: g.to_string() }
    }
}

fn canonical_summands(p: &Presented) -> Vec<BigInt> {
    let s = smith_normal_form(&p.relations);
    let mut out: Vec<BigInt> = s.invariants().into_iter().filter(|d| !d.is_one()).collect();
    out.extend(std::iter::repeat_n(BigInt::zero(), p.gens() - s.rank));
    out
}

/// Checks that `map` (target gens x source gens) sends relations to relations.
pub fn check_map(map: &IntMatrix, source: &Presented, target: &Presented) -> Result<()> {
    if map.cols() != source.gens() || map.rows() != target.gens() {
        return Err(Error::IllDefinedMap(format!(
            "matrix is {}x{} but the groups have {} and {} generators",
            map.rows(),
            map.cols(),
            target.gens(),
            source.gens()
        )));
    }
    let images = map.mul(&source.relations);
    let snf = smith_normal_form(&target.relations);
    for j in 0..images.cols() {
        if solve_with(&snf, target.relations.cols(), &images.col(j)).is_none() {
            return Err(Error::IllDefinedMap(format!("relation {j} maps to a nonzero element")));
        }
    }
    Ok(())
}

/// `{x : map·x ∈ T + im R_target}` as a generator matrix in the source.
pub fn preimage(map: &IntMatrix, target: &Presented, t: &IntMatrix) -> IntMatrix {
    let n = map.cols();
    let k = kernel(&map.hcat(&t.neg()).hcat(&target.relations.neg()));
    k.select_rows(0..n)
}

/// Outcome of checking `0 -> X -ι-> Y -φ-> Z -> 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exactness {
    pub composite_zero: bool,
    pub injective: bool,
    pub middle: bool,
    pub surjective: bool,
}

impl Exactness {
    pub fn holds(&self) -> bool {
        self.composite_zero && self.injective && self.middle && self.surjective
    }
}

/// Verifies a short exact sequence from its matrices.
pub fn short_exact(x: &Presented, iota: &IntMatrix, y: &Presented, phi: &IntMatrix, z: &Presented) -> Exactness {
    let comp = phi.mul(iota);
    let composite_zero = (0..comp.cols()).all(|j| z.is_zero(&comp.col(j)));
    // ker ι: preimage of 0 must be im R_X
    let ker_iota = preimage(iota, y, &IntMatrix::zeros(y.gens(), 0));
    let injective = (0..ker_iota.cols()).all(|j| x.is_zero(&ker_iota.col(j)));
    let ker_phi = preimage(phi, z, &IntMatrix::zeros(z.gens(), 0));
    let middle = y.same_subgroup(&ker_phi, iota);
    let surjective = z.spans(phi);
    Exactness { composite_zero, injective, middle, surjective }
}

/// The fiber product `A = B ×_D C` with its projections.
#[derive(Clone, Debug)]
pub struct Pullback {
    pub group: FgAbelianGroup,
    /// `A -> B` and `A -> C`.
    pub to_b: IntMatrix,
    pub to_c: IntMatrix,
    /// Basis of the lattice of `A` inside `Z^{b+c}`.
    pub basis: IntMatrix,
    /// Standard generators of `D` outside `im f + im g`; empty when the
    /// square is co-cartesian.
    pub missing: Vec<usize>,
}

impl Pullback {
    pub fn cocartesian(&self) -> bool {
        self.missing.is_empty()
    }

    /// `A -> B ⊕ C`.
    pub fn inclusion(&self) -> IntMatrix {
        self.to_b.vcat(&self.to_c)
    }
}

/// `ker(f ⊕ -g): B ⊕ C -> D`, without requiring `im f + im g = D`.
pub fn fiber_product(b: &Presented, c: &Presented, d: &Presented, f: &IntMatrix, g: &IntMatrix) -> Result<Pullback> {
    check_map(f, b, d)?;
    check_map(g, c, d)?;
    let nb = b.gens();
    let bc = b.direct_sum(c);
    let phi = f.hcat(&g.neg());
    let lattice = preimage(&phi, d, &IntMatrix::zeros(d.gens(), 0));
    let (group, basis) = bc.subquotient(&lattice, &IntMatrix::zeros(bc.gens(), 0));
    let to_b = basis.select_rows(0..nb);
    let to_c = basis.select_rows(nb..bc.gens());
    let missing = d.missing_generators(&f.hcat(g));
    Ok(Pullback { group: group.canonical(), to_b, to_c, basis, missing })
}

/// Pullback of a cartesian co-cartesian square; errors when
/// `im f + im g != D`, naming the generators of `D` that are missed.
pub fn pullback_group(b: &Presented, c: &Presented, d: &Presented, f: &IntMatrix, g: &IntMatrix) -> Result<Pullback> {
    let p = fiber_product(b, c, d, f, g)?;
    if !p.cocartesian() {
        return Err(Error::NotCocartesian { witness: p.missing.iter().map(|i| format!("e{i}")).collect() });
    }
    Ok(p)
}

/// Solves `M x = b` once per column of `B`, reusing one SNF.
pub(crate) fn solve_columns(m: &IntMatrix, b: &IntMatrix) -> Option<IntMatrix> {
    let s: Snf = smith_normal_form(m);
    let cols: Option<Vec<Vec<BigInt>>> = (0..b.cols()).map(|j| solve_with(&s, m.cols(), &b.col(j))).collect();
    cols.map(|c| IntMatrix::from_cols(&c, m.cols()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_rows(rows, rows.first().map_or(0, |r| r.len()))
    }

    #[test]
    fn canonical_forms() {
        // Z/2 + Z/3 = Z/6, and Z/4 + Z/2 stays as two summands
        assert_eq!(FgAbelianGroup::cyclic(&[2, 3]).summands, vec![BigInt::from(6)]);
        assert_eq!(FgAbelianGroup::cyclic(&[4, 2]).to_string(), "Z/2 + Z/4");
        assert_eq!(FgAbelianGroup::cyclic(&[0, 2, 1]).to_string(), "Z/2 + Z");
        assert_eq!(FgAbelianGroup::cyclic(&[1]).to_string(), "0");
        assert_eq!(FgAbelianGroup::cyclic(&[0, 0]).to_string(), "(Z)^2");
        // isomorphism-invariant equality
        let p = Presented::new(mat(&[vec![2, 0], vec![2, 4]]));
        assert_eq!(p.canonical(), FgAbelianGroup::cyclic(&[2, 4]));
    }

    #[test]
    fn diagonal_of_z() {
        let z = Presented::free(1);
        let id = IntMatrix::identity(1);
        let p = pullback_group(&z, &z, &z, &id, &id).unwrap();
        assert_eq!(p.group, FgAbelianGroup::cyclic(&[0]));
        assert_eq!(p.to_b, p.to_c);
    }

    #[test]
    fn index_two_sublattice() {
        let z = Presented::free(1);
        let z2 = Presented::cyclic(&[2]);
        let one = IntMatrix::identity(1);
        let p = pullback_group(&z, &z, &z2, &one, &one).unwrap();
        assert_eq!(p.group.to_string(), "(Z)^2");
        // the lattice has index 2 in Z^2
        assert_eq!(p.basis.determinant().magnitude(), &num_bigint::BigUint::from(2u32));
    }

    #[test]
    fn split_case() {
        // f: Z -> Z/2 onto, g = 0 from C = Z/4: A = ker f + C = 2Z + Z/4
        let z = Presented::free(1);
        let c = Presented::cyclic(&[4]);
        let d = Presented::cyclic(&[2]);
        let p = pullback_group(&z, &c, &d, &IntMatrix::identity(1), &IntMatrix::zeros(1, 1)).unwrap();
        assert_eq!(p.group, FgAbelianGroup::cyclic(&[0, 4]));
    }

    #[test]
    fn not_cocartesian_is_reported() {
        let z = Presented::free(1);
        let two = mat(&[vec![2]]);
        let err = pullback_group(&z, &z, &z, &two, &two).unwrap_err();
        assert!(matches!(err, Error::NotCocartesian { .. }));
        let p = fiber_product(&z, &z, &z, &two, &two).unwrap();
        assert_eq!(p.missing, vec![0]);
        assert_eq!(p.group, FgAbelianGroup::cyclic(&[0]));
    }

    #[test]
    fn ill_defined_map() {
        let z2 = Presented::cyclic(&[2]);
        let z = Presented::free(1);
        assert!(check_map(&IntMatrix::identity(1), &z2, &z).is_err());
        assert!(check_map(&IntMatrix::identity(1), &z, &z2).is_ok());
    }

    #[test]
    fn short_exact_sequence_check() {
        // 0 -> Z -2-> Z -> Z/2 -> 0
        let z = Presented::free(1);
        let z2 = Presented::cyclic(&[2]);
        let e = short_exact(&z, &mat(&[vec![2]]), &z, &IntMatrix::identity(1), &z2);
        assert!(e.holds());
        // 0 -> Z -4-> Z -> Z/2: not exact in the middle
        let e = short_exact(&z, &mat(&[vec![4]]), &z, &IntMatrix::identity(1), &z2);
        assert!(!e.middle && e.injective && e.surjective);
    }
}
