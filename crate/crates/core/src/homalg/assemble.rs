//! Per-degree assembly of the corner diagram
//!
//! ```text
//!   A ---------> R[u, 1/u][b_1, b_2, ...]        (upper right)
//!   |                 |
//!   v                 v
//!   R[[u]]/[2](u) --> R((u))/[2](u)             (lower left, lower right)
//! ```
//!
//! over a coefficient table `R`, windowed in the `u`-exponent and in the
//! weight of `b`-monomials. The off-diagonal variant replaces the lower
//! left corner by a stunted projective space read off its chart.

use super::group::{fiber_product, GroupJson, Presented};
use super::snf::IntMatrix;
use super::tables::{BundledTable, ChartClass, ChartClasses, CoefficientTable, Deg, VSeries};
use crate::chart::{CellKey, Geometry, Monomial, RuleBook, Window};
use crate::error::Result;
use crate::par::{self, Parallelism};
use crate::patterns::{differential_table, Bottom};
use crate::series::VExp;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// `u`-exponents `[bottom - below, bottom + above)` around the bottom of
/// the lower-left corner, and `b`-monomials up to `b_weight`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssemblyWindow {
    pub below: i64,
    pub above: i64,
    pub b_weight: i64,
}

impl Default for AssemblyWindow {
    fn default() -> Self {
        AssemblyWindow { below: 2, above: 3, b_weight: 3 }
    }
}

/// Where the lower-left corner starts and whether its bottom line is
/// integral: `u^0` for the diagonal, `u^{m/2}` (integral) or `u^{(m+1)/2}`
/// (mod 2) for `RP^∞_m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Line {
    pub bottom: i64,
    pub integral: bool,
}

impl Line {
    pub fn diagonal() -> Line {
        Line { bottom: 0, integral: true }
    }

    pub fn stunted(m: u64) -> Line {
        if m.is_multiple_of(2) {
            Line { bottom: (m / 2) as i64, integral: true }
        } else {
            Line { bottom: m.div_ceil(2) as i64, integral: false }
        }
    }

    fn range(&self, w: &AssemblyWindow) -> (i64, i64) {
        (self.bottom - w.below, self.bottom + w.above)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CornerGroups {
    pub upper_right: GroupJson,
    pub lower_left: GroupJson,
    pub lower_right: GroupJson,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeReport {
    /// `[k, l, m, n]` for `k + l·γα + m·α + n·γ`.
    pub degree: [i64; 4],
    /// `a`-layer for associated-graded tables, `None` for exact tables.
    pub layer: Option<i64>,
    pub corners: Option<CornerGroups>,
    pub pullback: Option<GroupJson>,
    pub spanning: bool,
    pub indeterminate: bool,
    /// At degree 0: does `A` map onto the pair of units?
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unit: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl DegreeReport {
    fn gap(degree: [i64; 4], layer: Option<i64>, reason: String) -> Self {
        DegreeReport {
            degree,
            layer,
            corners: None,
            pullback: None,
            spanning: false,
            indeterminate: true,
            unit: None,
            reason: Some(reason),
        }
    }

    /// Spanning holds, or the degree could not be decided.
    pub fn consistent(&self) -> bool {
        self.indeterminate || self.spanning
    }
}

/// Exponent vectors `(e_1, e_2, ...)` of `b`-monomials with
/// `sum k e_k <= max_weight`, in a fixed order.
pub fn b_monomials(max_weight: i64) -> Vec<Vec<u16>> {
    fn rec(k: i64, left: i64, max: i64, cur: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
        if k > max {
            out.push(cur.clone());
            return;
        }
        let mut e = 0;
        while e * k <= left {
            cur.push(e as u16);
            rec(k + 1, left - e * k, max, cur, out);
            cur.pop();
            e += 1;
        }
    }
    let mut out = Vec::new();
    rec(1, max_weight.max(0), max_weight.max(0), &mut Vec::new(), &mut out);
    out
}

fn b_weight(e: &[u16]) -> i64 {
    e.iter().enumerate().map(|(i, &x)| (i as i64 + 1) * x as i64).sum()
}

fn b_label(e: &[u16]) -> String {
    let parts: Vec<String> = e
        .iter()
        .enumerate()
        .filter(|(_, &x)| x > 0)
        .map(|(i, &x)| if x == 1 { format!("b{}", i + 1) } else { format!("b{}^{x}", i + 1) })
        .collect();
    parts.join("*")
}

/// `u^j · prod b_image(k)^{e_k}` below `hi`.
fn ur_series(j: i64, e: &[u16], images: &[VSeries], hi: i64) -> VSeries {
    let mut s = VSeries::default();
    if j < hi {
        s.add(j, VExp::ONE, BigInt::one());
    }
    // the b-images start at u^{-1}, so carry enough room before truncating
    let room = e.iter().map(|&x| x as i64).sum::<i64>();
    for (k, &x) in e.iter().enumerate() {
        for _ in 0..x {
            s = s.mul_below(&images[k], hi + room);
        }
    }
    s.terms.retain(|&p, _| p < hi);
    s
}

fn shift(d: Deg, t: i64) -> Deg {
    (d.0 + t, d.1 + t)
}

/// A square of presented groups over the window, before taking the
/// fiber product. `window` lists the generators of `d` that make up the
/// lower-right corner; the rest only carry relations reaching into it.
struct Square {
    b: Presented,
    c: Presented,
    d: Presented,
    f: IntMatrix,
    g: IntMatrix,
    window: Vec<usize>,
    unit: Option<(usize, usize)>,
}

fn diag_orders(orders: &[u64]) -> Vec<Vec<BigInt>> {
    orders
        .iter()
        .enumerate()
        .filter(|(_, &o)| o != 0)
        .map(|(i, &o)| {
            let mut c = vec![BigInt::zero(); orders.len()];
            c[i] = BigInt::from(o);
            c
        })
        .collect()
}

/// Generators `(position, class)` of `R·u^j` for `j` in `range`, together
/// with the relations `c·u^i·[2](u)` truncated at `range.end`.
struct Tower {
    index: HashMap<(i64, usize), usize>,
    orders: Vec<u64>,
    relations: Vec<Vec<BigInt>>,
}

fn series_tower(
    table: &dyn CoefficientTable,
    deg: Deg,
    gens: std::ops::Range<i64>,
    rel_from: i64,
    two: &VSeries,
) -> std::result::Result<Tower, String> {
    let mut index = HashMap::new();
    let mut orders = Vec::new();
    for j in gens.clone() {
        let cs = table.generators(shift(deg, j)).ok_or_else(|| format!("coefficients missing in degree {:?}", shift(deg, j)))?;
        for (ci, c) in cs.iter().enumerate() {
            index.insert((j, ci), orders.len());
            orders.push(c.order);
        }
    }
    let mut relations = diag_orders(&orders);
    for i in rel_from..gens.end - 1 {
        let dc = shift(deg, i + 1);
        let cs = table.generators(dc).ok_or_else(|| format!("coefficients missing in degree {dc:?}"))?;
        for ci in 0..cs.len() {
            let mut col = vec![BigInt::zero(); orders.len()];
            for (&p, row) in &two.terms {
                let p = p + i;
                if p >= gens.end {
                    continue;
                }
                for (e, z) in row {
                    let img = table.act(dc, ci, e).ok_or_else(|| format!("product by {e} unknown in degree {dc:?}"))?;
                    for (t, y) in img {
                        let r = *index.get(&(p, t)).ok_or_else(|| format!("u^{p} outside the corner"))?;
                        col[r] += z * &y;
                    }
                }
            }
            if col.iter().any(|x| !x.is_zero()) {
                relations.push(col);
            }
        }
    }
    Ok(Tower { index, orders, relations })
}

fn table_square(table: &dyn CoefficientTable, deg: Deg, line: Line, w: &AssemblyWindow) -> Result<std::result::Result<Square, String>> {
    let (lo, hi) = line.range(w);
    // extra room below the lower-right window so relations whose leading
    // terms die on torsion coefficients are still seen
    let reach = hi - lo;
    let two = table.two_series(2 * reach + 2)?;
    let images: Vec<VSeries> =
        (1..=w.b_weight.max(0) as usize).map(|k| table.b_image(k, reach + w.b_weight + 2)).collect::<Result<_>>()?;
    Ok((|| {
        let lr = series_tower(table, deg, (lo - reach)..hi, lo - reach - 1, &two)?;
        let ll_from = if line.integral { line.bottom } else { line.bottom - 1 };
        let ll = series_tower(table, deg, line.bottom..hi, ll_from, &two)?;

        let mut ur_orders = Vec::new();
        let mut f_cols = Vec::new();
        let mut unit = None;
        for e in b_monomials(w.b_weight) {
            let wt = b_weight(&e);
            let e1 = e.first().copied().unwrap_or(0) as i64;
            for j in (lo + e1)..(hi + e1) {
                let dc = shift(deg, j - wt);
                let cs = table.generators(dc).ok_or_else(|| format!("coefficients missing in degree {dc:?}"))?;
                let s = ur_series(j, &e, &images, hi);
                for (ci, c) in cs.iter().enumerate() {
                    if deg == (0, 0) && j == 0 && wt == 0 && c.label == "1" {
                        unit = Some((ur_orders.len(), ci));
                    }
                    ur_orders.push(c.order);
                    let mut col = vec![BigInt::zero(); lr.orders.len()];
                    for (&p, row) in &s.terms {
                        for (v, z) in row {
                            let img = table.act(dc, ci, v).ok_or_else(|| {
                                format!("product of {} by {v} unknown in degree {dc:?}", if e.iter().all(|&x| x == 0) { "1".into() } else { b_label(&e) })
                            })?;
                            for (t, y) in img {
                                let r = *lr.index.get(&(p, t)).ok_or_else(|| format!("u^{p} outside the corner"))?;
                                col[r] += z * &y;
                            }
                        }
                    }
                    f_cols.push(col);
                }
            }
        }
        let mut g_cols = Vec::new();
        let mut ll_keys: Vec<(i64, usize)> = ll.index.keys().copied().collect();
        ll_keys.sort_unstable_by_key(|k| ll.index[k]);
        for key in &ll_keys {
            let mut col = vec![BigInt::zero(); lr.orders.len()];
            col[lr.index[key]] = BigInt::one();
            g_cols.push(col);
        }
        let unit = unit.and_then(|(ur, ci)| ll.index.get(&(0, ci)).map(|&l| (ur, l)));
        let window = lr.index.iter().filter(|((j, _), _)| *j >= lo).map(|(_, &i)| i).collect();
        let mut ur_rel = diag_orders(&ur_orders);
        ur_rel.retain(|c| !c.is_empty());
        Ok(Square {
            b: Presented::new(IntMatrix::from_cols(&ur_rel, ur_orders.len())),
            c: Presented::new(IntMatrix::from_cols(&ll.relations, ll.orders.len())),
            d: Presented::new(IntMatrix::from_cols(&lr.relations, lr.orders.len())),
            f: IntMatrix::from_cols(&f_cols, lr.orders.len()),
            g: IntMatrix::from_cols(&g_cols, lr.orders.len()),
            window,
            unit,
        })
    })())
}

fn unit_vector(n: usize, i: usize) -> Vec<BigInt> {
    let mut v = vec![BigInt::zero(); n];
    v[i] = BigInt::one();
    v
}

fn finish(degree: [i64; 4], layer: Option<i64>, sq: Square) -> Result<DegreeReport> {
    let pb = fiber_product(&sq.b, &sq.c, &sq.d, &sq.f, &sq.g)?;
    let spanning = sq.window.iter().all(|i| !pb.missing.contains(i));
    let mut window = sq.window.clone();
    window.sort_unstable();
    let sel: Vec<Vec<BigInt>> = window.iter().map(|&i| unit_vector(sq.d.gens(), i)).collect();
    let (lr, _) = sq.d.subquotient(&IntMatrix::from_cols(&sel, sq.d.gens()), &IntMatrix::zeros(sq.d.gens(), 0));
    let unit = sq.unit.map(|(ur, ll)| {
        let nb = sq.b.gens();
        let mut x = unit_vector(nb + sq.c.gens(), ur);
        x[nb + ll] = BigInt::one();
        sq.b.direct_sum(&sq.c).in_subgroup(&pb.basis, &x)
    });
    Ok(DegreeReport {
        degree,
        layer,
        corners: Some(CornerGroups {
            upper_right: GroupJson::from(&sq.b.canonical()),
            lower_left: GroupJson::from(&sq.c.canonical()),
            lower_right: GroupJson::from(&lr.canonical()),
        }),
        pullback: Some(GroupJson::from(&pb.group)),
        spanning,
        indeterminate: false,
        unit,
        reason: None,
    })
}

/// Pullback in degree `k + l·γα` over an exact or graded table; `layer`
/// only labels the report.
pub fn assemble_table_degree(
    table: &dyn CoefficientTable,
    deg: Deg,
    line: Line,
    w: &AssemblyWindow,
    degree: [i64; 4],
    layer: Option<i64>,
) -> Result<DegreeReport> {
    match table_square(table, deg, line, w)? {
        Ok(sq) => finish(degree, layer, sq),
        Err(reason) => Ok(DegreeReport::gap(degree, layer, reason)),
    }
}

/// Diagonal degrees `k + l·γα` over `table`.
pub fn assemble_diagonal(
    table: &dyn CoefficientTable,
    degrees: &[Deg],
    w: &AssemblyWindow,
    layer: Option<i64>,
    mode: Parallelism,
) -> Result<Vec<DegreeReport>> {
    par::map(mode, degrees, |&d| assemble_table_degree(table, d, Line::diagonal(), w, [d.0, d.1, 0, 0], layer))
        .into_iter()
        .collect()
}

/// Off-diagonal degrees `k + l·γα - m·α` with the lower-left corner
/// modelled as `u^{bottom}·R[[u]]/[2](u)` over `table`. Over the additive
/// toy table this is the hand-checkable model of `RP^∞_m`.
pub fn assemble_offdiagonal_table(
    table: &dyn CoefficientTable,
    m: u64,
    degrees: &[Deg],
    w: &AssemblyWindow,
    mode: Parallelism,
) -> Result<Vec<DegreeReport>> {
    par::map(mode, degrees, |&d| assemble_table_degree(table, d, Line::stunted(m), w, [d.0, d.1, -(m as i64), 0], None))
        .into_iter()
        .collect()
}

/// Charts needed for the associated-graded off-diagonal assembly over
/// `RP^∞_m`: the point chart for the upper right, the stunted chart for
/// the lower left and a `u`-localized chart for the lower right.
pub struct OffDiagonalCharts {
    pub m: u64,
    pub window: AssemblyWindow,
    pub line: Line,
    pub point: BundledTable,
    pub stunted: ChartClasses,
    pub localized: ChartClasses,
}

impl OffDiagonalCharts {
    /// `chart` bounds `σ`, weight and `a` for the stunted and localized
    /// charts; their `u` range is set from the assembly window.
    pub fn new(m: u64, w: AssemblyWindow, point: BundledTable, chart: Window, mode: Parallelism) -> Result<Self> {
        let line = Line::stunted(m);
        let (lo, hi) = line.range(&w);
        let window = Window { u_max: hi, ..chart };
        let bottom = Bottom::Finite(m);
        let book = RuleBook::from_table(&differential_table(bottom, hi.max(1) as u64)?, hi)?;
        let stunted = ChartClasses::compute(Geometry::Stunted { bottom }, window, &book, mode)?;
        let localized = ChartClasses::compute(Geometry::Localized { u_min: lo - (hi - lo) }, window, &RuleBook::localized(), mode)?;
        Ok(OffDiagonalCharts { m, window: w, line, point, stunted, localized })
    }

    pub fn default_chart_window() -> Window {
        Window::borel(0, 12, 6, 24)
    }
}

/// Reduces an integer series mod 2 in `R((u))/[2](u)`, where
/// `2 = -(c_1 u + c_2 u^2 + ...)` with `[2](u)/u = 2 + sum c_i u^i`: even
/// coefficients are pushed to higher powers instead of dropped. Returns
/// the odd terms below `hi`.
fn mod2_terms(mut s: VSeries, tail: &VSeries, hi: i64) -> Vec<(i64, VExp)> {
    let two = BigInt::from(2);
    let mut out = Vec::new();
    while let Some(p) = s.lowest() {
        if p >= hi {
            break;
        }
        let row = s.terms.remove(&p).unwrap_or_default();
        for (e, z) in row {
            if z.is_odd() {
                out.push((p, e));
            }
            let q = z.div_floor(&two);
            if q.is_zero() {
                continue;
            }
            for (&i, trow) in &tail.terms {
                if p + i < hi {
                    for (f, c) in trow {
                        s.add(p + i, e.mul(f), -(&q * c));
                    }
                }
            }
        }
    }
    out
}

/// `[2](u)/u - 2`.
fn two_tail(ctx: &OffDiagonalCharts, reach: i64) -> Result<VSeries> {
    let two = ctx.point.two_series(reach + 2)?;
    let mut tail = VSeries::default();
    for (&p, row) in &two.terms {
        for (e, z) in row {
            if p == 1 && *e == VExp::ONE {
                debug_assert_eq!(*z, BigInt::from(2));
                continue;
            }
            tail.add(p - 1, *e, z.clone());
        }
    }
    Ok(tail)
}

/// `r · series` (powers relative to `r`) in the localized chart, `r`'s `v_0`-power becoming `2^t`.
fn localized_image(r: &Monomial, series: &VSeries, tail: &VSeries, hi: i64) -> Vec<Monomial> {
    let scale = VSeries { terms: [(0, [(VExp::ONE, BigInt::from(2).pow(r.v0 as u32))].into())].into() };
    let s = series.mul_below(&scale, hi - r.u);
    mod2_terms(s, tail, hi - r.u)
        .into_iter()
        .map(|(p, e)| Monomial { u: r.u + p, v: r.v.mul(&e), v0: 0, ..*r })
        .collect()
}

fn layer_square(ctx: &OffDiagonalCharts, cell: CellKey, s: i64) -> Result<std::result::Result<Square, String>> {
    let w = &ctx.window;
    let (lo, hi) = ctx.line.range(w);
    let images: Vec<VSeries> = (1..=w.b_weight.max(0) as usize)
        .map(|k| ctx.point.b_image(k, hi - lo + w.b_weight + 2))
        .collect::<Result<_>>()?;
    let tail = two_tail(ctx, hi - lo + 2)?;
    Ok((|| {
        let lr = ctx.localized.classes(cell, s, lo..hi).ok_or_else(|| format!("lower right untrusted at {cell:?}, a = {s}"))?;
        let ll = ctx.stunted.classes(cell, s, ctx.line.bottom..hi).ok_or_else(|| format!("lower left untrusted at {cell:?}, a = {s}"))?;
        let lr_pos: HashMap<usize, usize> = lr.iter().enumerate().map(|(p, (i, _))| (*i, p)).collect();
        let to_lr = |monos: Vec<Monomial>| -> std::result::Result<Vec<BigInt>, String> {
            let ids = ctx.localized.express_mod(cell, &monos, Some(hi)).ok_or_else(|| format!("image not expressible at {cell:?}, a = {s}"))?;
            let mut col = vec![BigInt::zero(); lr.len()];
            for id in ids {
                let p = lr_pos.get(&id).ok_or_else(|| format!("image leaves the window at {cell:?}, a = {s}"))?;
                col[*p] += 1;
            }
            Ok(col)
        };

        let mut ur_orders = Vec::new();
        let mut f_cols = Vec::new();
        for e in b_monomials(w.b_weight) {
            let wt = b_weight(&e);
            let e1 = e.first().copied().unwrap_or(0) as i64;
            // a v_0-multiple maps through 2 = v_1 u + ..., so its image starts
            // that many positions higher; generators are windowed by where
            // their image starts
            let deepest = ctx.point.classes.chart.window.v0_max as i64;
            for j in (lo + e1 - deepest)..(hi + e1) {
                let dc = shift(cell, j - wt);
                let start = |c: &ChartClass| j - e1 + c.rep.iter().map(|r| r.v0 as i64).min().unwrap_or(0);
                let cls = ctx.point.classes.classes(dc, s, 0..1).ok_or_else(|| format!("coefficients untrusted in {dc:?}, a = {s}"))?;
                let series = ur_series(j, &e, &images, hi);
                for (_, c) in cls.into_iter().filter(|(_, c)| (lo..hi).contains(&start(c))) {
                    ur_orders.push(c.order);
                    let monos = c.rep.iter().flat_map(|r| localized_image(r, &series, &tail, hi)).collect();
                    f_cols.push(to_lr(monos)?);
                }
            }
        }
        let mut ll_orders = Vec::new();
        let mut g_cols = Vec::new();
        for (_, c) in &ll {
            ll_orders.push(c.order);
            let monos = c.rep.iter().flat_map(|r| localized_image(r, &VSeries::one(), &tail, hi)).collect();
            g_cols.push(to_lr(monos)?);
        }
        let lr_orders: Vec<u64> = lr.iter().map(|(_, c)| c.order).collect();
        Ok(Square {
            b: Presented::cyclic(&ur_orders),
            c: Presented::cyclic(&ll_orders),
            d: Presented::cyclic(&lr_orders),
            f: IntMatrix::from_cols(&f_cols, lr.len()),
            g: IntMatrix::from_cols(&g_cols, lr.len()),
            window: (0..lr.len()).collect(),
            unit: None,
        })
    })())
}

/// The associated-graded pullback in chart cell `(k, l)` on the `a = s`
/// layer (the `b^s` layer of the `b`-adic filtration). Spanning on every
/// layer is the graded form of the filtration condition.
pub fn assemble_offdiagonal(ctx: &OffDiagonalCharts, cells: &[CellKey], layers: &[i64], mode: Parallelism) -> Result<Vec<DegreeReport>> {
    let jobs: Vec<(CellKey, i64)> = cells.iter().flat_map(|&c| layers.iter().map(move |&s| (c, s))).collect();
    par::map(mode, &jobs, |&(cell, s)| {
        let degree = [cell.0, cell.1, -(ctx.m as i64), 0];
        match layer_square(ctx, cell, s)? {
            Ok(sq) => finish(degree, Some(s), sq),
            Err(reason) => Ok(DegreeReport::gap(degree, Some(s), reason)),
        }
    })
    .into_iter()
    .collect()
}

/// Agreement between two runs of the same assembly (say at two chart
/// windows) on the degrees both could decide.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowComparison {
    pub compared: usize,
    pub agreed: usize,
    pub disagreements: Vec<([i64; 4], Option<i64>)>,
}

impl WindowComparison {
    pub fn stable(&self) -> bool {
        self.disagreements.is_empty()
    }
}

pub fn compare_reports(a: &[DegreeReport], b: &[DegreeReport]) -> WindowComparison {
    let other: HashMap<([i64; 4], Option<i64>), &DegreeReport> = b.iter().map(|r| ((r.degree, r.layer), r)).collect();
    let mut out = WindowComparison::default();
    for r in a.iter().filter(|r| !r.indeterminate) {
        let Some(o) = other.get(&(r.degree, r.layer)).filter(|o| !o.indeterminate) else {
            continue;
        };
        out.compared += 1;
        if r.corners == o.corners && r.pullback == o.pullback && r.spanning == o.spanning {
            out.agreed += 1;
        } else {
            out.disagreements.push((r.degree, r.layer));
        }
    }
    out
}
