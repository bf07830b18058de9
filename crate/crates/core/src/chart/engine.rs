//! E1 construction and page-by-page homology over F_2.
//!
//! A chart is a finite window of the E1 basis. Differentials are the rule
//! multiplications of [`RuleBook`]; only the pages `2^{n+1}-1` can be
//! nonzero. Classes are carried as E1 vectors and every page keeps the
//! accumulated boundaries, so `d_r` of a representative is read off modulo
//! boundaries in the page-`r` basis of its target cell.
//!
//! Window truncation is tracked by taint. A monomial is tainted when one of
//! its differentials leaves the window or when it can be hit from outside.
//! Each page splits its matrices into connected components; a component
//! containing a tainted class taints everything it produces. Untainted
//! classes are exact.

use super::f2::{xor, Echelon, SVec};
use super::monomial::{count_v_monomials, v_monomials, CellKey, Monomial};
use super::rules::{page_of_level, Image, RuleBook};
use crate::error::{Error, Result};
use crate::par::{self, Parallelism};
use crate::patterns::Bottom;
use crate::series::{VExp, MAX_GENERATORS};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};

/// Shape of the space whose E1 term is charted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Geometry {
    /// `RP^∞_m` or `RP^∞`; positions start at `bottom.first_position()`.
    Stunted { bottom: Bottom },
    /// The coefficients: only `u^0`.
    Point,
    /// `u` inverted, positions from `u_min`.
    Localized { u_min: i64 },
}

impl Geometry {
    pub fn stunted(bottom: Bottom) -> Self {
        Geometry::Stunted { bottom }
    }

    pub fn u_min(&self) -> i64 {
        match *self {
            Geometry::Stunted { bottom } => bottom.first_position() as i64,
            Geometry::Point => 0,
            Geometry::Localized { u_min } => u_min,
        }
    }

    /// Positions whose coefficient line is `BP_*` rather than `BP_*/2`.
    pub fn integral_at(&self, u: i64) -> bool {
        match *self {
            Geometry::Stunted { bottom: Bottom::Infinity } => u == 0,
            Geometry::Stunted { bottom: Bottom::Finite(m) } => m % 2 == 0 && u == (m / 2) as i64,
            Geometry::Point => true,
            Geometry::Localized { .. } => false,
        }
    }

    pub fn label(&self) -> String {
        match *self {
            Geometry::Stunted { bottom } => bottom.label(),
            Geometry::Point => "point".into(),
            Geometry::Localized { u_min } => format!("localized(u>={u_min})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Filtration {
    /// Borel: `0 <= a <= a_max`.
    Borel { a_max: i64 },
    /// `a` inverted; one slice `c_α = alpha_slice` represents all of them.
    Tate { alpha_slice: i64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub u_max: i64,
    pub sigma_min: i64,
    pub sigma_max: i64,
    pub weight_max: i64,
    pub v0_max: u16,
    pub nmax: usize,
    pub filtration: Filtration,
}

impl Window {
    pub fn borel(u_max: i64, sigma: i64, weight_max: i64, a_max: i64) -> Window {
        let nmax = nmax_for_weight(weight_max);
        Window {
            u_max,
            sigma_min: -sigma,
            sigma_max: sigma,
            weight_max,
            v0_max: 3,
            nmax,
            filtration: Filtration::Borel { a_max },
        }
    }

    pub fn tate(u_max: i64, sigma: i64, weight_max: i64) -> Window {
        Window { filtration: Filtration::Tate { alpha_slice: 0 }, ..Window::borel(u_max, sigma, weight_max, 0) }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sigma_max < self.sigma_min + 1 {
            return Err(Error::WindowTooSmall("sigma range must contain a full period 2".into()));
        }
        if self.weight_max < 0 {
            return Err(Error::WindowTooSmall("negative weight bound".into()));
        }
        if self.nmax == 0 || self.nmax > MAX_GENERATORS - 1 {
            return Err(Error::InvalidArgument(format!("nmax must lie in 1..={}", MAX_GENERATORS - 1)));
        }
        if self.weight_max >= (1i64 << (self.nmax + 1)) - 1 {
            return Err(Error::WindowTooSmall(format!(
                "weight bound {} needs v_{} but nmax is {}",
                self.weight_max,
                self.nmax + 1,
                self.nmax
            )));
        }
        if let Filtration::Borel { a_max } = self.filtration {
            if a_max < 0 {
                return Err(Error::WindowTooSmall("negative a bound".into()));
            }
        }
        Ok(())
    }
}

/// Smallest `nmax` with `weight_max < 2^{nmax+1} - 1`.
pub fn nmax_for_weight(weight_max: i64) -> usize {
    let mut n = 1;
    while weight_max >= (1i64 << (n + 1)) - 1 {
        n += 1;
    }
    n
}

/// A window of the E1 basis, grouped by bidegree.
#[derive(Clone, Debug)]
pub struct Chart {
    pub geometry: Geometry,
    pub window: Window,
    keys: Vec<CellKey>,
    cells: Vec<Vec<Monomial>>,
    index: HashMap<Monomial, (u32, u32)>,
}

/// Builds the E1 chart. For `RP^∞_{2k+1}` the lines start at `u^{k+1}` with
/// `BP_*/2` coefficients (the relation `[2](u)/u` has leading term `2`);
/// for `RP^∞_{2k}` they start at `u^k`, whose line keeps `BP_*`.
/// Refuse to build charts larger than this many `E_1` monomials.
pub const MAX_E1_MONOMIALS: u128 = 4_000_000;

fn e1_size_bound(positions: i64, w: &Window) -> u128 {
    let a = match w.filtration {
        Filtration::Borel { a_max } => a_max + 1,
        Filtration::Tate { .. } => 1,
    };
    let sigma = w.sigma_max - w.sigma_min + 1;
    // one integral line may carry v0 powers
    let lines = positions + w.v0_max as i64;
    count_v_monomials(w.nmax, w.weight_max).saturating_mul((lines.max(0) * sigma.max(0) * a.max(0)) as u128)
}

pub fn build_e1(geometry: Geometry, window: Window) -> Result<Chart> {
    window.validate()?;
    let u_lo = geometry.u_min();
    let u_hi = match geometry {
        Geometry::Point => 0,
        _ => window.u_max,
    };
    if u_hi < u_lo {
        return Err(Error::WindowTooSmall(format!("u bound {} is below the first position {u_lo}", window.u_max)));
    }
    let size = e1_size_bound(u_hi - u_lo + 1, &window);
    if size > MAX_E1_MONOMIALS {
        return Err(Error::InvalidArgument(format!(
            "window holds up to {size} E1 monomials, above the limit {MAX_E1_MONOMIALS}"
        )));
    }
    let vs = v_monomials(window.nmax, window.weight_max);
    let mut by_cell: BTreeMap<CellKey, Vec<Monomial>> = BTreeMap::new();
    for u in u_lo..=u_hi {
        let v0_top = if geometry.integral_at(u) { window.v0_max } else { 0 };
        for sigma in window.sigma_min..=window.sigma_max {
            for v in &vs {
                for v0 in 0..=v0_top {
                    let base = Monomial::new(u, sigma, 0, v0, *v);
                    match window.filtration {
                        Filtration::Borel { a_max } => {
                            for a in 0..=a_max {
                                let m = Monomial { a, ..base };
                                by_cell.entry(m.cell()).or_default().push(m);
                            }
                        }
                        Filtration::Tate { alpha_slice } => {
                            let a = v.weight() + sigma - u - alpha_slice;
                            let m = Monomial { a, ..base };
                            by_cell.entry(m.cell()).or_default().push(m);
                        }
                    }
                }
            }
        }
    }
    let mut keys = Vec::with_capacity(by_cell.len());
    let mut cells = Vec::with_capacity(by_cell.len());
    let mut index = HashMap::new();
    for (ci, (k, mut ms)) in by_cell.into_iter().enumerate() {
        ms.sort();
        for (j, m) in ms.iter().enumerate() {
            index.insert(*m, (ci as u32, j as u32));
        }
        keys.push(k);
        cells.push(ms);
    }
    Ok(Chart { geometry, window, keys, cells, index })
}

impl Chart {
    pub fn keys(&self) -> &[CellKey] {
        &self.keys
    }

    pub fn basis(&self, cell: usize) -> &[Monomial] {
        &self.cells[cell]
    }

    pub fn cell_index(&self, key: CellKey) -> Option<usize> {
        self.keys.binary_search(&key).ok()
    }

    pub fn cell_of(&self, key: CellKey) -> &[Monomial] {
        self.cell_index(key).map_or(&[], |i| &self.cells[i])
    }

    pub fn len(&self) -> usize {
        self.cells.iter().map(|c| c.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn locate(&self, m: &Monomial) -> Option<(usize, usize)> {
        self.index.get(m).map(|&(c, j)| (c as usize, j as usize))
    }

    /// Whether `m` is a basis monomial of the full (unwindowed) E1 term.
    pub fn in_ring(&self, m: &Monomial) -> bool {
        if m.u < self.geometry.u_min() || (self.geometry == Geometry::Point && m.u != 0) {
            return false;
        }
        if m.v0 > 0 && !self.geometry.integral_at(m.u) {
            return false;
        }
        match self.window.filtration {
            Filtration::Borel { .. } => m.a >= 0,
            Filtration::Tate { alpha_slice } => m.cell().1 == alpha_slice,
        }
    }

    pub fn in_window(&self, m: &Monomial) -> bool {
        self.index.contains_key(m)
    }

    /// Monomials of the window whose fate depends on data outside it.
    pub fn static_taint(&self, book: &RuleBook, levels: &[u32], mode: Parallelism) -> Vec<Vec<bool>> {
        par::map(mode, &self.cells, |ms| {
            ms.iter()
                .map(|m| {
                    levels.iter().any(|&n| {
                        let forward_out = match book.image(m, n) {
                            Image::Hit(t) => self.in_ring(&t) && !self.in_window(&t),
                            Image::Zero => false,
                        };
                        forward_out
                            || book.preimage_candidates(m, n).iter().any(|s| {
                                self.in_ring(s) && !self.in_window(s) && book.image(s, n) == Image::Hit(*m)
                            })
                    })
                })
                .collect()
        })
    }
}

/// One cell of a page: representatives in E1 coordinates and the boundary
/// generators accumulated so far.
#[derive(Clone, Debug, Default)]
pub struct CellPage {
    pub reps: Vec<SVec>,
    pub tainted: Vec<bool>,
    boundary: Vec<SVec>,
}

impl CellPage {
    pub fn rank(&self) -> usize {
        self.reps.len()
    }

    pub fn reliable(&self) -> usize {
        self.tainted.iter().filter(|t| !**t).count()
    }

    pub fn boundary_rank(&self) -> usize {
        self.boundary.len()
    }

    /// Boundary generators in E1 coordinates.
    pub fn boundary(&self) -> &[SVec] {
        &self.boundary
    }
}

/// `E_r` with its differential.
#[derive(Clone, Debug)]
pub struct Page {
    pub r: u64,
    pub level: u32,
    pub cells: Vec<CellPage>,
    /// Per cell and representative: target coordinates in the page basis of
    /// the cell one `c_1` below.
    pub d: Vec<Vec<SVec>>,
    pub rank_d: Vec<usize>,
}

/// Outcome of the internal checks of a run.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckLog {
    /// Violations of `d_r d_r = 0` among untainted classes.
    pub d_squared: Vec<String>,
    /// Cells where rank bookkeeping failed.
    pub euler: Vec<String>,
    /// Untainted differentials leaving the page-`r` span of their target.
    pub consistency: Vec<String>,
    /// Count of tainted differentials whose value was cut by the window.
    pub truncated: usize,
}

impl CheckLog {
    pub fn ok(&self) -> bool {
        self.d_squared.is_empty() && self.euler.is_empty() && self.consistency.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct PageRun {
    pub pages: Vec<Page>,
    pub e_inf: Vec<CellPage>,
    pub checks: CheckLog,
    /// Last page included; `E_{r_max+1}` is `E_∞` iff `complete`.
    pub r_max: u64,
    pub complete: bool,
}

impl PageRun {
    /// `E_r` for any `r >= 1` (pages between the nonzero ones repeat).
    pub fn page_cells(&self, r: u64) -> &[CellPage] {
        match self.pages.iter().find(|p| p.r >= r) {
            Some(p) => &p.cells,
            None => &self.e_inf,
        }
    }
}

/// Highest page supported by the generator capacity.
pub const MAX_PAGE: u64 = (1 << MAX_GENERATORS) - 1;

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n as u32).collect() }
    }
    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = p;
            x = p;
        }
        x
    }
    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb) as usize] = ra.min(rb);
        }
    }
}

fn combine(reps: &[SVec], combo: &[u32]) -> SVec {
    let mut out = Vec::new();
    for &j in combo {
        out = xor(&out, &reps[j as usize]);
    }
    out
}

/// Runs every page `r <= r_max`.
pub fn run_pages(chart: &Chart, book: &RuleBook, r_max: u64, mode: Parallelism) -> Result<PageRun> {
    if r_max == 0 || r_max > MAX_PAGE {
        return Err(Error::PageBeyondLimit { page: r_max, r_max: MAX_PAGE });
    }
    let all_levels: Vec<u32> = (0..MAX_GENERATORS as u32 - 1).collect();
    let levels: Vec<u32> = all_levels.iter().copied().filter(|&n| page_of_level(n) <= r_max).collect();
    // Taint looks at every level, including those past r_max, only when the
    // run is meant to reach E_∞; a truncated run is exact up to its last page.
    let taint_levels: Vec<u32> = levels.clone();
    let stat = chart.static_taint(book, &taint_levels, mode);
    let mut cur: Vec<CellPage> = chart
        .cells
        .iter()
        .zip(stat)
        .map(|(ms, t)| CellPage { reps: (0..ms.len() as u32).map(|j| vec![j]).collect(), tainted: t, boundary: vec![] })
        .collect();
    let mut checks = CheckLog::default();
    let mut pages = Vec::new();
    for &n in &levels {
        let (page, next) = step(chart, book, n, cur, &mut checks, mode);
        pages.push(page);
        cur = next;
    }
    let complete = all_levels
        .iter()
        .filter(|&&n| page_of_level(n) > r_max)
        .all(|&n| chart.cells.iter().flatten().all(|m| book.image(m, n) == Image::Zero));
    Ok(PageRun { pages, e_inf: cur, checks, r_max, complete })
}

struct Outgoing {
    coords: Vec<SVec>,
    bad: Vec<bool>,
    residual_issues: Vec<String>,
    truncated: usize,
}

fn step(
    chart: &Chart,
    book: &RuleBook,
    n: u32,
    cur: Vec<CellPage>,
    checks: &mut CheckLog,
    mode: Parallelism,
) -> (Page, Vec<CellPage>) {
    let ncell = chart.cells.len();
    let target_of: Vec<Option<usize>> = chart.keys.iter().map(|&(c1, ca)| chart.cell_index((c1 - 1, ca))).collect();

    // d_r of every representative, in the page basis of the target cell.
    let outgoing: Vec<Outgoing> = par::map_range(mode, 0..ncell, |ci| {
        let src = &cur[ci];
        let ms = &chart.cells[ci];
        let mut out = Outgoing {
            coords: Vec::with_capacity(src.reps.len()),
            bad: vec![false; src.reps.len()],
            residual_issues: vec![],
            truncated: 0,
        };
        let tgt = target_of[ci];
        let mut ech: Option<(Echelon, u32)> = None;
        for (j, rep) in src.reps.iter().enumerate() {
            let mut y: Vec<u32> = Vec::new();
            let mut escaped = false;
            for &e in rep {
                if let Image::Hit(t) = book.image(&ms[e as usize], n) {
                    match chart.locate(&t) {
                        Some((c, k)) => {
                            debug_assert_eq!(Some(c), tgt);
                            y.push(k as u32);
                        }
                        None => escaped |= chart.in_ring(&t),
                    }
                }
            }
            let y = super::f2::normalize(y);
            if y.is_empty() {
                out.coords.push(vec![]);
                out.bad[j] = escaped;
                continue;
            }
            let tc = tgt.expect("image cell exists when an image lies in the window");
            let (e, nb) = ech.get_or_insert_with(|| {
                let mut e = Echelon::new();
                for b in &cur[tc].boundary {
                    e.insert(b);
                }
                let nb = cur[tc].boundary.len() as u32;
                for r in &cur[tc].reps {
                    e.insert(r);
                }
                (e, nb)
            });
            let (res, combo) = e.reduce(&y);
            let coords: SVec = combo.iter().filter(|&&i| i >= *nb).map(|&i| i - *nb).collect();
            if !res.is_empty() || escaped {
                if src.tainted[j] || escaped {
                    out.truncated += 1;
                } else {
                    out.residual_issues.push(format!(
                        "d_{} of {} leaves the E_{} span of cell {:?}",
                        page_of_level(n),
                        ms[rep[0] as usize],
                        page_of_level(n),
                        chart.keys[tc]
                    ));
                }
                out.bad[j] = true;
            }
            out.coords.push(coords);
        }
        out
    });

    // Components of the page's matrices.
    let mut offset = vec![0u32; ncell + 1];
    for ci in 0..ncell {
        offset[ci + 1] = offset[ci] + cur[ci].reps.len() as u32;
    }
    let mut uf = UnionFind::new(offset[ncell] as usize);
    for ci in 0..ncell {
        if let Some(tc) = target_of[ci] {
            for (j, c) in outgoing[ci].coords.iter().enumerate() {
                for &k in c {
                    uf.union(offset[ci] + j as u32, offset[tc] + k);
                }
            }
        }
    }
    let mut comp_taint: HashMap<u32, bool> = HashMap::new();
    for ci in 0..ncell {
        for j in 0..cur[ci].reps.len() {
            let t = cur[ci].tainted[j] || outgoing[ci].bad[j];
            if t {
                let root = uf.find(offset[ci] + j as u32);
                comp_taint.insert(root, true);
            }
        }
    }
    let roots: Vec<Vec<u32>> =
        (0..ncell).map(|ci| (0..cur[ci].reps.len() as u32).map(|j| uf.find(offset[ci] + j)).collect()).collect();
    let source_of: Vec<Option<usize>> = chart.keys.iter().map(|&(c1, ca)| chart.cell_index((c1 + 1, ca))).collect();

    struct CellResult {
        next: CellPage,
        rank_out: usize,
        rank_in: usize,
        d2: Vec<String>,
    }
    let results: Vec<CellResult> = par::map_range(mode, 0..ncell, |ci| {
        let page = &cur[ci];
        let out = &outgoing[ci].coords;
        let incoming: Vec<&SVec> = match source_of[ci] {
            Some(s) => outgoing[s].coords.iter().filter(|c| !c.is_empty()).collect(),
            None => vec![],
        };
        let mut groups: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
        for (j, &r) in roots[ci].iter().enumerate() {
            groups.entry(r).or_default().push(j as u32);
        }
        let mut in_groups: BTreeMap<u32, Vec<&SVec>> = BTreeMap::new();
        for c in incoming {
            in_groups.entry(roots[ci][c[0] as usize]).or_default().push(c);
        }
        let mut next = CellPage { reps: vec![], tainted: vec![], boundary: page.boundary.clone() };
        let (mut rank_out, mut rank_in) = (0, 0);
        let mut d2 = Vec::new();
        for (root, members) in &groups {
            let tainted = comp_taint.get(root).copied().unwrap_or(false);
            // kernel of the outgoing map on this component
            let mut ker: Vec<SVec> = Vec::new();
            let mut e = Echelon::new();
            for &j in members {
                if let Some(combo) = e.insert(&out[j as usize]) {
                    let mut k: SVec = combo.iter().map(|&i| members[i as usize]).collect();
                    k.push(j);
                    k.sort_unstable();
                    ker.push(k);
                }
            }
            rank_out += members.len() - ker.len();
            // image arriving on this component
            let mut bech = Echelon::new();
            let mut bvecs: Vec<&SVec> = Vec::new();
            for b in in_groups.get(root).map(|v| v.as_slice()).unwrap_or(&[]) {
                if bech.insert(b).is_none() {
                    bvecs.push(b);
                    let mut img: SVec = Vec::new();
                    for &j in b.iter() {
                        img = xor(&img, &out[j as usize]);
                    }
                    if !img.is_empty() && !tainted {
                        d2.push(format!("cell {:?}: d_r d_r != 0 on a class of {} terms", chart.keys[ci], b.len()));
                    }
                }
            }
            rank_in += bvecs.len();
            for b in &bvecs {
                next.boundary.push(combine(&page.reps, b));
            }
            for k in &ker {
                if bech.insert(k).is_none() {
                    next.reps.push(combine(&page.reps, k));
                    next.tainted.push(tainted);
                }
            }
        }
        CellResult { next, rank_out, rank_in, d2 }
    });

    let rank_out: Vec<usize> = results.iter().map(|r| r.rank_out).collect();
    for ci in 0..ncell {
        let res = &results[ci];
        let expect_in = source_of[ci].map_or(0, |s| rank_out[s]);
        let old = cur[ci].reps.len();
        if res.rank_in != expect_in || res.next.reps.len() + res.rank_out + res.rank_in != old {
            checks.euler.push(format!(
                "cell {:?} page {}: {} -> {} with ranks out {} in {} (source side {})",
                chart.keys[ci],
                page_of_level(n),
                old,
                res.next.reps.len(),
                res.rank_out,
                res.rank_in,
                expect_in
            ));
        }
        checks.d_squared.extend(res.d2.iter().cloned());
    }
    for o in &outgoing {
        checks.consistency.extend(o.residual_issues.iter().cloned());
        checks.truncated += o.truncated;
    }
    let mut next = Vec::with_capacity(ncell);
    for r in results {
        next.push(r.next);
    }
    let page = Page {
        r: page_of_level(n),
        level: n,
        cells: cur,
        d: outgoing.into_iter().map(|o| o.coords).collect(),
        rank_d: rank_out,
    };
    (page, next)
}

/// The coefficient BCSS of `BP\R_*`: only `u^0`, every level vertical.
pub fn point_bcss(window: Window, mode: Parallelism) -> Result<(Chart, PageRun)> {
    let chart = build_e1(Geometry::Point, window)?;
    let run = run_pages(&chart, &RuleBook::point(), MAX_PAGE, mode)?;
    Ok((chart, run))
}

/// Monomials making up a representative.
pub fn rep_monomials<'a>(chart: &'a Chart, cell: usize, rep: &'a [u32]) -> impl Iterator<Item = &'a Monomial> + 'a {
    rep.iter().map(move |&j| &chart.cells[cell][j as usize])
}

/// The lowest E1 monomial of a representative, used as its label.
pub fn leading(chart: &Chart, cell: usize, rep: &[u32]) -> Monomial {
    chart.cells[cell][rep[0] as usize]
}

/// `v`-free monomial helper for tests and callers.
pub fn mono(u: i64, sigma: i64, a: i64) -> Monomial {
    Monomial::new(u, sigma, a, 0, VExp::ONE)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::tate::{tate_rank_check, Verdict};
    use crate::patterns::differential_table;

    fn book_for(bottom: Bottom, u_max: i64) -> RuleBook {
        RuleBook::from_table(&differential_table(bottom, u_max as u64).unwrap(), u_max).unwrap()
    }

    fn v1(e: u16) -> VExp {
        VExp::from_slice(&[e])
    }

    #[test]
    fn hand_enumerated_cell_of_rp_infinity() {
        // u < 4, nmax = 1 (weights <= 2), |σ| <= 2, a <= 4, v_0 at most once.
        let w = Window { v0_max: 1, ..Window::borel(3, 2, 2, 4) };
        assert_eq!(w.nmax, 1);
        let chart = build_e1(Geometry::stunted(Bottom::Infinity), w).unwrap();
        let got: Vec<Monomial> = chart.cell_of((0, 0)).to_vec();
        // c_1 = w - σ - u = 0 and c_α = w - a + σ - u = 0 force a = 2σ, u = w - σ.
        let mut want = vec![
            Monomial::new(0, 0, 0, 0, VExp::ONE),
            Monomial::new(0, 0, 0, 1, VExp::ONE),
            Monomial::new(1, 0, 0, 0, v1(1)),
            Monomial::new(2, 0, 0, 0, v1(2)),
            Monomial::new(0, 1, 2, 0, v1(1)),
            Monomial::new(0, 1, 2, 1, v1(1)),
            Monomial::new(1, 1, 2, 0, v1(2)),
            Monomial::new(0, 2, 4, 0, v1(2)),
            Monomial::new(0, 2, 4, 1, v1(2)),
        ];
        want.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn cells_match_brute_force_degrees() {
        let w = Window::borel(5, 3, 4, 3);
        let chart = build_e1(Geometry::stunted(Bottom::Finite(6)), w).unwrap();
        let mut n = 0;
        for u in 3..=5 {
            for s in -3..=3 {
                for e in v_monomials(w.nmax, 4) {
                    for a in 0..=3 {
                        for v0 in 0..=(if u == 3 { 3 } else { 0 }) {
                            let m = Monomial::new(u, s, a, v0, e);
                            let deg = crate::degree::RODegree::u(crate::degree::Convention::Stunted) * u
                                + crate::degree::RODegree::sigma() * s
                                + crate::degree::RODegree::a() * a
                                + e.degree(crate::degree::Convention::Stunted);
                            assert!(chart.cell_of((deg.c1, deg.ca)).contains(&m));
                            n += 1;
                        }
                    }
                }
            }
        }
        assert_eq!(n, chart.len());
    }

    #[test]
    fn bottom_generator_cell() {
        for m in [5u64, 6, 9, 12] {
            let bottom = Bottom::Finite(m);
            let chart = build_e1(Geometry::stunted(bottom), Window::borel(12, 4, 3, 3)).unwrap();
            let g = mono(bottom.first_position() as i64, 0, 0);
            assert!(chart.cell_of(g.cell()).contains(&g));
        }
    }

    #[test]
    fn parities_differ_by_the_bottom_line() {
        let odd = build_e1(Geometry::stunted(Bottom::Finite(9)), Window::borel(10, 2, 1, 2)).unwrap();
        let even = build_e1(Geometry::stunted(Bottom::Finite(8)), Window::borel(10, 2, 1, 2)).unwrap();
        let at = |c: &Chart, u: i64| c.keys.iter().enumerate().flat_map(|(i, _)| c.basis(i)).filter(|m| m.u == u).count();
        assert_eq!(at(&odd, 4), 0);
        assert!(at(&even, 4) > at(&even, 5));
        for u in 5..=10 {
            assert_eq!(at(&odd, u), at(&even, u));
        }
    }

    #[test]
    fn no_rules_means_every_page_is_e1() {
        let chart = build_e1(Geometry::stunted(Bottom::Finite(7)), Window::borel(12, 6, 3, 4)).unwrap();
        let run = run_pages(&chart, &RuleBook::empty(), MAX_PAGE, Parallelism::Sequential).unwrap();
        for (ci, c) in run.e_inf.iter().enumerate() {
            assert_eq!(c.rank(), chart.basis(ci).len());
        }
        for p in &run.pages {
            assert!(p.rank_d.iter().all(|&r| r == 0));
        }
        assert!(run.complete && run.checks.ok());
    }

    #[test]
    fn first_special_differential_of_rp101() {
        let bottom = Bottom::Finite(101);
        let chart = build_e1(Geometry::stunted(bottom), Window::borel(70, 8, 3, 8)).unwrap();
        let run = run_pages(&chart, &book_for(bottom, 70), 3, Parallelism::Sequential).unwrap();
        let page3 = run.pages.iter().find(|p| p.r == 3).unwrap();
        let z = mono(51, 0, 0);
        let (ci, _) = chart.locate(&z).unwrap();
        let j = page3.cells[ci].reps.iter().position(|r| leading(&chart, ci, r) == z).unwrap();
        let target = Monomial::new(51, 2, 3, 0, v1(1));
        let (ti, _) = chart.locate(&target).unwrap();
        let coords = &page3.d[ci][j];
        assert_eq!(coords.len(), 1);
        assert_eq!(leading(&chart, ti, &page3.cells[ti].reps[coords[0] as usize]), target);
        assert!(run.checks.ok());
    }

    #[test]
    fn tate_rp_infinity_rank_one() {
        let chart = build_e1(Geometry::stunted(Bottom::Infinity), Window::tate(16, 24, 7)).unwrap();
        let run = run_pages(&chart, &book_for(Bottom::Infinity, 16), MAX_PAGE, Parallelism::Parallel).unwrap();
        assert!(run.checks.ok(), "{:?}", run.checks);
        let rep = tate_rank_check(&chart, &run, (-4, 16)).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.degrees.iter().filter(|d| d.safe && d.verdict == Verdict::Pass).count(), 21);
    }

    #[test]
    fn window_stability() {
        let bottom = Bottom::Finite(5);
        let small = build_e1(Geometry::stunted(bottom), Window::tate(16, 24, 7)).unwrap();
        let large = build_e1(Geometry::stunted(bottom), Window::tate(24, 32, 7)).unwrap();
        let rs = run_pages(&small, &book_for(bottom, 16), MAX_PAGE, Parallelism::Parallel).unwrap();
        let rl = run_pages(&large, &book_for(bottom, 24), MAX_PAGE, Parallelism::Parallel).unwrap();
        let a = tate_rank_check(&small, &rs, (-4, 16)).unwrap();
        let b = tate_rank_check(&large, &rl, (-4, 24)).unwrap();
        for d in a.degrees.iter().filter(|d| d.safe) {
            let e = b.degrees.iter().find(|e| e.dimension == d.dimension).unwrap();
            assert_eq!(d.reliable, e.reliable, "dimension {}", d.dimension);
        }
        // Borel: cells without taint in both windows agree
        let bs = build_e1(Geometry::stunted(bottom), Window::borel(14, 12, 3, 6)).unwrap();
        let bl = build_e1(Geometry::stunted(bottom), Window::borel(20, 16, 3, 9)).unwrap();
        let rbs = run_pages(&bs, &book_for(bottom, 14), MAX_PAGE, Parallelism::Sequential).unwrap();
        let rbl = run_pages(&bl, &book_for(bottom, 20), MAX_PAGE, Parallelism::Sequential).unwrap();
        // every reliable class of the small window is a nonzero class of
        // the large one, and distinct classes stay independent
        let mut compared = 0;
        for (ci, key) in bs.keys().iter().enumerate() {
            let li = bl.cell_index(*key).unwrap();
            let l = &rbl.e_inf[li];
            let mut ech = Echelon::new();
            for b in &l.boundary {
                ech.insert(b);
            }
            let nb = l.boundary.len() as u32;
            for r in &l.reps {
                ech.insert(r);
            }
            let mut classes = Echelon::new();
            for (r, t) in rbs.e_inf[ci].reps.iter().zip(&rbs.e_inf[ci].tainted) {
                if *t {
                    continue;
                }
                let v = crate::chart::f2::normalize(
                    r.iter().map(|&j| bl.locate(&bs.basis(ci)[j as usize]).unwrap().1 as u32).collect(),
                );
                let (res, combo) = ech.reduce(&v);
                assert!(res.is_empty(), "cell {key:?}: reliable class is not a cycle in the larger window");
                let coords: SVec = combo.into_iter().filter(|&i| i >= nb).collect();
                assert!(classes.insert(&coords).is_none(), "cell {key:?}: reliable classes collapse");
                compared += 1;
            }
        }
        assert!(compared > 20, "only {compared} cells compared");
    }

    #[test]
    fn u_multiplication_commutes_where_the_rule_class_is_unchanged() {
        let bottom = Bottom::Finite(9);
        let book = book_for(bottom, 40);
        let mut checked = 0;
        for i in 5..39 {
            for n in 0..5 {
                if book.classes(i, n) != book.classes(i + 1, n) {
                    continue;
                }
                for s in -20..20 {
                    let m = Monomial::new(i, s, 0, 0, v1(1));
                    let lhs = match book.image(&m, n) {
                        Image::Hit(t) => Image::Hit(t.shifted(1, 0, 0)),
                        z => z,
                    };
                    assert_eq!(book.image(&m.shifted(1, 0, 0), n), lhs);
                    checked += 1;
                }
            }
        }
        assert!(checked > 1000);
    }

    #[test]
    fn point_bcss_kills_odd_sigma_and_keeps_unit() {
        let (chart, run) = point_bcss(Window::borel(0, 8, 3, 8), Parallelism::Sequential).unwrap();
        assert!(run.checks.ok());
        // σ^{-1} supports d_1 onto v_0 a
        let page1 = &run.pages[0];
        let x = mono(0, -1, 0);
        let (ci, j) = chart.locate(&x).unwrap();
        assert_eq!(page1.d[ci][j].len(), 1);
        // σ^4 survives to page 7 and dies there (σ ≡ 4 mod 8)
        let y = mono(0, 4, 0);
        let (ci, _) = chart.locate(&y).unwrap();
        let page7 = run.pages.iter().find(|p| p.r == 7).unwrap();
        let j = page7.cells[ci].reps.iter().position(|r| leading(&chart, ci, r) == y).unwrap();
        assert_eq!(page7.d[ci][j].len(), 1);
        // the unit is a permanent cycle
        let (ci, _) = chart.locate(&mono(0, 0, 0)).unwrap();
        assert!(run.e_inf[ci].reps.iter().any(|r| leading(&chart, ci, r) == mono(0, 0, 0)));
    }

    #[test]
    fn point_tate_is_concentrated_in_dimension_zero() {
        let chart = build_e1(Geometry::Point, Window::tate(0, 24, 7)).unwrap();
        let run = run_pages(&chart, &RuleBook::point(), MAX_PAGE, Parallelism::Sequential).unwrap();
        let rep = tate_rank_check(&chart, &run, (-8, 8)).unwrap();
        assert!(rep.passed(), "{:?}", rep.degrees);
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let bottom = Bottom::Finite(12);
        let chart = build_e1(Geometry::stunted(bottom), Window::tate(16, 16, 7)).unwrap();
        let book = book_for(bottom, 16);
        let a = run_pages(&chart, &book, MAX_PAGE, Parallelism::Sequential).unwrap();
        let b = run_pages(&chart, &book, MAX_PAGE, Parallelism::Parallel).unwrap();
        for (x, y) in a.e_inf.iter().zip(&b.e_inf) {
            assert_eq!(x.reps, y.reps);
            assert_eq!(x.tainted, y.tainted);
        }
    }
}
