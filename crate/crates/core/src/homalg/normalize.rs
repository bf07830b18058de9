//! Reduction of `k + ℓγα + mα + nγ` to the two computed families.

use crate::degree::RODegree;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "case")]
pub enum DegreeCase {
    /// `k + ℓγα`.
    Diagonal,
    /// `k + ℓγα + mα` with `m < 0`, computed from `RP^∞_{-m}`.
    OffDiagonal { m: i64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NormalizedDegree {
    pub degree: RODegree,
    #[serde(flatten)]
    pub case: DegreeCase,
}

/// Swaps `α` and `γ` so that `m <= n`, then adds `n` times
/// `1 + γα - α - γ` (a multiple of the periodicity class) to clear the
/// `γ` coefficient.
pub fn normalize_ro_degree(k: i64, l: i64, m: i64, n: i64) -> NormalizedDegree {
    let (m, n) = if m > n { (n, m) } else { (m, n) };
    let degree = RODegree::new(k + n, m - n, 0, l + n);
    let case = if m == n { DegreeCase::Diagonal } else { DegreeCase::OffDiagonal { m: m - n } };
    NormalizedDegree { degree, case }
}

impl NormalizedDegree {
    pub fn of(d: RODegree) -> Self {
        normalize_ro_degree(d.c1, d.cga, d.ca, d.cg)
    }

    /// `[k, ℓ, m, n]`.
    pub fn as_klmn(&self) -> [i64; 4] {
        [self.degree.c1, self.degree.cga, self.degree.ca, self.degree.cg]
    }
}
