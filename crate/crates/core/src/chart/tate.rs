//! Rank check of the `a`-inverted spectral sequence against the cells of
//! the space.

use super::engine::{Chart, Filtration, Geometry, PageRun};
use crate::error::{Error, Result};
use crate::patterns::Bottom;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Indeterminate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TateDegree {
    pub dimension: i64,
    pub expected: usize,
    /// Survivors untouched by the window boundary.
    pub reliable: usize,
    pub tainted: usize,
    pub safe: bool,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TateReport {
    pub space: String,
    pub safe_range: (i64, i64),
    pub degrees: Vec<TateDegree>,
}

impl TateReport {
    pub fn passed(&self) -> bool {
        self.degrees.iter().all(|d| d.verdict != Verdict::Fail) && self.degrees.iter().any(|d| d.safe)
    }

    pub fn count(&self, v: Verdict) -> usize {
        self.degrees.iter().filter(|d| d.verdict == v).count()
    }
}

/// Cells of the space in dimension `d`: one per dimension from the bottom
/// cell on, or a single class in dimension 0 for the point.
pub fn expected_rank(geometry: Geometry, d: i64) -> usize {
    match geometry {
        Geometry::Stunted { bottom: Bottom::Infinity } => (d >= 0) as usize,
        Geometry::Stunted { bottom: Bottom::Finite(m) } => (d >= m as i64) as usize,
        Geometry::Point => (d == 0) as usize,
        Geometry::Localized { .. } => 0,
    }
}

/// Default trusted dimensions for a window: a few below zero up to the
/// `u` bound less a margin for differentials that push `u` upwards.
pub fn default_safe_range(chart: &Chart) -> (i64, i64) {
    let w = &chart.window;
    let margin = 8.min(w.u_max / 4);
    (-4, w.u_max - margin)
}

/// Compares the reliable `E_∞` ranks of a Tate chart with the cells of the
/// space, dimension by dimension. Dimensions outside `safe` only fail when
/// reliable survivors exceed the expected rank.
pub fn tate_rank_check(chart: &Chart, run: &PageRun, safe: (i64, i64)) -> Result<TateReport> {
    if !matches!(chart.window.filtration, Filtration::Tate { .. }) {
        return Err(Error::InvalidArgument("the rank check needs a chart with a inverted".into()));
    }
    if !run.complete {
        return Err(Error::InvalidArgument("the run stopped before E_infinity".into()));
    }
    let mut degrees = Vec::new();
    for (ci, &(c1, _)) in chart.keys().iter().enumerate() {
        let d = -c1;
        let cell = &run.e_inf[ci];
        let expected = expected_rank(chart.geometry, d);
        let reliable = cell.reliable();
        let tainted = cell.rank() - reliable;
        let is_safe = d >= safe.0 && d <= safe.1;
        let verdict = if is_safe {
            if reliable == expected {
                Verdict::Pass
            } else {
                Verdict::Fail
            }
        } else if reliable > expected {
            Verdict::Fail
        } else if reliable == expected && tainted == 0 {
            Verdict::Pass
        } else {
            Verdict::Indeterminate
        };
        degrees.push(TateDegree { dimension: d, expected, reliable, tainted, safe: is_safe, verdict });
    }
    degrees.sort_by_key(|d| d.dimension);
    Ok(TateReport { space: chart.geometry.label(), safe_range: safe, degrees })
}
