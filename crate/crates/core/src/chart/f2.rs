//! Sparse linear algebra over F_2.

use std::collections::HashMap;

/// Sorted list of indices with coefficient 1.
pub type SVec = Vec<u32>;

pub fn xor(a: &[u32], b: &[u32]) -> SVec {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Normalizes an arbitrary list: sorts and cancels pairs.
pub fn normalize(mut v: Vec<u32>) -> SVec {
    v.sort_unstable();
    let mut out: Vec<u32> = Vec::with_capacity(v.len());
    for x in v {
        if out.last() == Some(&x) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    out
}

/// Row echelon form keyed by lowest index, with optional tracking of the
/// combination of inserted vectors each row represents.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: Vec<SVec>,
    combos: Vec<SVec>,
    pivot: HashMap<u32, usize>,
    inserted: u32,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v`; returns the residual and the combination of inserted
    /// vectors that was subtracted.
    pub fn reduce(&self, v: &[u32]) -> (SVec, SVec) {
        let mut v = v.to_vec();
        let mut combo: SVec = Vec::new();
        let mut k = 0;
        while k < v.len() {
            if let Some(&r) = self.pivot.get(&v[k]) {
                v = xor(&v, &self.rows[r]);
                combo = xor(&combo, &self.combos[r]);
                // entries before k are unaffected: the row's lowest index is v[k]
            } else {
                k += 1;
            }
        }
        (v, combo)
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        self.reduce(v).0.is_empty()
    }

    /// Inserts `v` (numbered by insertion order). Returns `None` if it was
    /// independent, otherwise the combination of earlier insertions equal to it.
    pub fn insert(&mut self, v: &[u32]) -> Option<SVec> {
        let id = self.inserted;
        self.inserted += 1;
        let (res, combo) = self.reduce(v);
        if res.is_empty() {
            return Some(combo);
        }
        let combo = xor(&combo, &[id]);
        self.pivot.insert(res[0], self.rows.len());
        self.rows.push(res);
        self.combos.push(combo);
        None
    }
}
