//! Coefficient data for the corner rings: a toy table for the additive
//! law, and tables read off the `E_∞` page of a chart.

use crate::chart::f2::{Echelon, SVec};
use crate::chart::{build_e1, run_pages, CellKey, Chart, Filtration, Geometry, Monomial, PageRun, RuleBook, Window, MAX_PAGE};
use crate::error::{Error, Result};
use crate::par::Parallelism;
use crate::series::{self, Modulus, RationalPoly, VExp};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::collections::{BTreeMap, HashMap, HashSet};
use std::ops::Range;
use std::sync::{Arc, Mutex};

/// Bidegree `k + ℓ·(sign)`: the `1`- and sign-coefficients.
pub type Deg = (i64, i64);

/// Power series in `u` with integer `v`-polynomial coefficients, known
/// below a fixed exponent.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VSeries {
    pub terms: BTreeMap<i64, BTreeMap<VExp, BigInt>>,
}

impl VSeries {
    pub fn one() -> Self {
        let mut s = VSeries::default();
        s.add(0, VExp::ONE, BigInt::one());
        s
    }

    pub fn add(&mut self, p: i64, e: VExp, z: BigInt) {
        if z.is_zero() {
            return;
        }
        let row = self.terms.entry(p).or_default();
        let slot = row.entry(e).or_default();
        *slot += z;
        if slot.is_zero() {
            row.remove(&e);
            if row.is_empty() {
                self.terms.remove(&p);
            }
        }
    }

    /// Product with terms at exponents `>= below` dropped.
    pub fn mul_below(&self, o: &VSeries, below: i64) -> VSeries {
        let mut out = VSeries::default();
        for (&p, row) in &self.terms {
            for (&q, orow) in &o.terms {
                if p + q >= below {
                    continue;
                }
                for (e, z) in row {
                    for (f, y) in orow {
                        out.add(p + q, e.mul(f), z * y);
                    }
                }
            }
        }
        out
    }

    pub fn lowest(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    fn from_coeffs<'a>(low: i64, coeffs: impl Iterator<Item = &'a RationalPoly>, below: i64) -> Result<VSeries> {
        let mut s = VSeries::default();
        for (j, c) in coeffs.enumerate() {
            let p = low + j as i64;
            if p >= below {
                break;
            }
            for (e, q) in c.terms() {
                if !q.is_integer() {
                    return Err(Error::NonIntegral { term: format!("u^{p}"), coef: q.to_string() });
                }
                s.add(p, *e, q.to_integer());
            }
        }
        Ok(s)
    }
}

/// A basis element of a coefficient group: `Z` (order 0) or `Z/order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableGen {
    pub label: String,
    pub order: u64,
}

/// Graded coefficient ring data: groups per bidegree, the action of
/// `v`-monomials, the 2-series and the images of the `b_k`.
pub trait CoefficientTable: Send + Sync {
    fn name(&self) -> String;

    /// Basis of the coefficients in `deg`; `None` where the table is not
    /// trusted.
    fn generators(&self, deg: Deg) -> Option<Vec<TableGen>>;

    /// `v^e` times generator `idx` of `deg`, in the basis of
    /// `deg + |v^e|`; `None` when unknown.
    fn act(&self, deg: Deg, idx: usize, e: &VExp) -> Option<Vec<(usize, BigInt)>>;

    /// `[2]_F(u)` with exponents below `below`.
    fn two_series(&self, below: i64) -> Result<VSeries>;

    /// `u^{-1} [x^k] F(x, u)` with exponents below `below`.
    fn b_image(&self, k: usize, below: i64) -> Result<VSeries>;
}

/// `Z` in degree 0 with every `v_n` acting as zero: the additive law,
/// `[2](u) = 2u`, `x +_F u = x + u`.
#[derive(Clone, Copy, Debug, Default)]
pub struct ToyTable;

impl CoefficientTable for ToyTable {
    fn name(&self) -> String {
        "toy".into()
    }

    fn generators(&self, deg: Deg) -> Option<Vec<TableGen>> {
        Some(if deg == (0, 0) { vec![TableGen { label: "1".into(), order: 0 }] } else { vec![] })
    }

    fn act(&self, _deg: Deg, idx: usize, e: &VExp) -> Option<Vec<(usize, BigInt)>> {
        Some(if *e == VExp::ONE { vec![(idx, BigInt::one())] } else { vec![] })
    }

    fn two_series(&self, below: i64) -> Result<VSeries> {
        let mut s = VSeries::default();
        if below > 1 {
            s.add(1, VExp::ONE, BigInt::from(2));
        }
        Ok(s)
    }

    fn b_image(&self, k: usize, below: i64) -> Result<VSeries> {
        let mut s = VSeries::default();
        if k == 1 && below > -1 {
            s.add(-1, VExp::ONE, BigInt::one());
        }
        Ok(s)
    }
}

/// An `E_∞` class as a coefficient generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChartClass {
    /// Representative monomial; for an integral tower, its lowest member.
    pub lead: Monomial,
    /// `0` for a `v_0`-tower reaching the window's `v_0` bound, `2^k` for a
    /// tower of length `k`, else 2.
    pub order: u64,
    /// Representative in E1 monomials (for a tower, its bottom).
    pub rep: Vec<Monomial>,
    /// A `v_0`-tower on an integral line.
    pub tower: bool,
}

impl ChartClass {
    pub fn a(&self) -> i64 {
        self.lead.a
    }
}

#[derive(Clone, Debug, Default)]
struct CellClasses {
    classes: Vec<ChartClass>,
    /// Class of each `E_∞` representative, with its `v_0` offset.
    rep_class: Vec<(usize, u16)>,
    /// `(a, u)` positions touched by tainted or inhomogeneous classes.
    bad: HashSet<(i64, i64)>,
    /// Lookup by monomial; towers are keyed with `v_0` stripped.
    by_lead: HashMap<Monomial, usize>,
}

/// `E_∞` of a chart organised as groups per cell and `a`-layer.
pub struct ChartClasses {
    pub chart: Chart,
    pub run: PageRun,
    cells: Vec<CellClasses>,
}

fn strip_v0(m: &Monomial) -> Monomial {
    Monomial { v0: 0, ..*m }
}

impl ChartClasses {
    pub fn new(chart: Chart, run: PageRun) -> Self {
        let mut cells = Vec::with_capacity(chart.len());
        for (ci, page) in run.e_inf.iter().enumerate() {
            let basis = chart.basis(ci);
            let mut cc = CellClasses::default();
            let mut towers: BTreeMap<Monomial, Vec<(usize, u16)>> = BTreeMap::new();
            for (ri, rep) in page.reps.iter().enumerate() {
                let lead = basis[rep[0] as usize];
                let a = lead.a;
                if page.tainted[ri] || rep.iter().any(|&j| basis[j as usize].a != a) {
                    cc.bad.extend(rep.iter().map(|&j| (basis[j as usize].a, basis[j as usize].u)));
                }
                if a == 0 && chart.geometry.integral_at(lead.u) {
                    if rep.len() > 1 {
                        cc.bad.insert((0, lead.u));
                    }
                    towers.entry(strip_v0(&lead)).or_default().push((ri, lead.v0));
                } else {
                    cc.rep_class.push((usize::MAX, 0));
                    let idx = cc.classes.len();
                    let rep = rep.iter().map(|&j| basis[j as usize]).collect();
                    cc.classes.push(ChartClass { lead, order: 2, rep, tower: false });
                    cc.by_lead.insert(lead, idx);
                    cc.rep_class[ri] = (idx, 0);
                    continue;
                }
                cc.rep_class.push((usize::MAX, 0));
            }
            for (key, mut reps) in towers {
                reps.sort_by_key(|r| r.1);
                let bottom = reps[0].1;
                // a tower must be unbroken up to the v_0 bound
                if reps.iter().enumerate().any(|(k, r)| r.1 != bottom + k as u16) {
                    cc.bad.insert((0, key.u));
                }
                let top = reps[reps.len() - 1].1;
                let order = if top >= chart.window.v0_max { 0 } else { 1u64 << reps.len() };
                let idx = cc.classes.len();
                let lead = Monomial { v0: bottom, ..key };
                cc.classes.push(ChartClass { lead, order, rep: vec![lead], tower: true });
                cc.by_lead.insert(key, idx);
                for (ri, v0) in reps {
                    cc.rep_class[ri] = (idx, v0 - bottom);
                }
            }
            cells.push(cc);
        }
        ChartClasses { chart, run, cells }
    }

    /// Runs the chart for `geometry` with `book` and collects its classes.
    pub fn compute(geometry: Geometry, window: Window, book: &RuleBook, mode: Parallelism) -> Result<Self> {
        let chart = build_e1(geometry, window)?;
        let run = run_pages(&chart, book, MAX_PAGE, mode)?;
        Ok(Self::new(chart, run))
    }

    /// Positions `u` of the geometry inside `us`.
    fn positions(&self, us: &Range<i64>) -> Range<i64> {
        match self.chart.geometry {
            Geometry::Point => us.start.max(0)..us.end.min(1),
            g => us.start.max(g.u_min())..us.end,
        }
    }

    /// Does the window contain every E1 monomial of `key` on the layer
    /// `a = layer` at positions in `us`? Each such position has exactly one
    /// `σ` and one `v`-weight, so this is a finite check.
    pub fn box_trusted(&self, key: CellKey, layer: i64, us: Range<i64>) -> bool {
        let w = &self.chart.window;
        let a_max = match w.filtration {
            Filtration::Borel { a_max } => a_max,
            Filtration::Tate { .. } => return false,
        };
        let (c1, ca) = key;
        // 2(wt - u) = c1 + cα + a, σ = wt - u - c1
        let twice = c1 + ca + layer;
        if layer < 0 || twice.rem_euclid(2) != 0 {
            return true;
        }
        if layer > a_max {
            return false;
        }
        let excess = twice / 2;
        let sigma = excess - c1;
        for u in self.positions(&us) {
            let wt = excess + u;
            if wt < 0 {
                continue;
            }
            if wt > w.weight_max || u > w.u_max || sigma < w.sigma_min || sigma > w.sigma_max {
                return false;
            }
        }
        true
    }

    pub fn cell(&self, key: CellKey) -> Option<usize> {
        self.chart.cell_index(key)
    }

    /// Classes of `key` on the layer `a = layer` with lead position in
    /// `us`, or `None` when that part of the cell is not trusted.
    pub fn classes(&self, key: CellKey, layer: i64, us: Range<i64>) -> Option<Vec<(usize, &ChartClass)>> {
        if !self.run.complete || !self.box_trusted(key, layer, us.clone()) {
            return None;
        }
        let Some(ci) = self.cell(key) else {
            return Some(Vec::new());
        };
        let cc = &self.cells[ci];
        if self.positions(&us).any(|u| cc.bad.contains(&(layer, u))) {
            return None;
        }
        Some(cc.classes.iter().enumerate().filter(|(_, c)| c.a() == layer && us.contains(&c.lead.u)).collect())
    }

    /// Class index and `v_0` excess of a monomial that is itself a class
    /// lead (towers matched with `v_0` stripped).
    pub fn lookup(&self, m: &Monomial) -> Option<(usize, u16)> {
        let ci = self.cell(m.cell())?;
        let cc = &self.cells[ci];
        if m.a == 0 && self.chart.geometry.integral_at(m.u) {
            let idx = *cc.by_lead.get(&strip_v0(m))?;
            let bottom = cc.classes[idx].lead.v0;
            return (m.v0 >= bottom).then(|| (idx, m.v0 - bottom));
        }
        cc.by_lead.get(m).map(|&i| (i, 0))
    }

    /// Writes a mod 2 sum of monomials in one cell in terms of the cell's
    /// non-tower classes, modulo boundaries and, when `hi` is given,
    /// everything at positions `u >= hi`; monomials there may lie outside
    /// the window. `None` if the sum is not a cycle modulo those or needs a
    /// tower.
    pub fn express_mod(&self, key: CellKey, monos: &[Monomial], hi: Option<i64>) -> Option<Vec<usize>> {
        let below = |m: &Monomial| hi.is_none_or(|h| m.u < h);
        let Some(ci) = self.cell(key) else {
            return monos.iter().all(|m| !below(m)).then(Vec::new);
        };
        let mut v: Vec<u32> = Vec::with_capacity(monos.len());
        for m in monos {
            match self.chart.locate(m) {
                Some((c, j)) if c == ci => v.push(j as u32),
                _ if !below(m) => {}
                _ => return None,
            }
        }
        let v: SVec = crate::chart::f2::normalize(v);
        let basis = self.chart.basis(ci);
        let page = &self.run.e_inf[ci];
        let mut ech = Echelon::new();
        for b in page.boundary() {
            ech.insert(b);
        }
        for (j, m) in basis.iter().enumerate() {
            if !below(m) {
                ech.insert(&[j as u32]);
            }
        }
        let first_rep = ech_count(page.boundary().len(), basis, &below);
        for r in &page.reps {
            ech.insert(r);
        }
        let (res, combo) = ech.reduce(&v);
        if !res.is_empty() {
            return None;
        }
        let cc = &self.cells[ci];
        let mut out: Vec<usize> = Vec::new();
        for id in combo {
            let id = id as usize;
            if id < first_rep {
                continue;
            }
            let (class, excess) = cc.rep_class[id - first_rep];
            if cc.classes[class].tower || excess > 0 {
                return None;
            }
            out.push(class);
        }
        out.sort_unstable();
        Some(out)
    }

    pub fn express(&self, key: CellKey, monos: &[Monomial]) -> Option<Vec<usize>> {
        self.express_mod(key, monos, None)
    }
}

fn ech_count(boundary: usize, basis: &[Monomial], below: &impl Fn(&Monomial) -> bool) -> usize {
    boundary + basis.iter().filter(|m| !below(m)).count()
}

/// The coefficient table read off the point chart's `E_∞`: `a = 0` towers
/// give `Z`, other classes `Z/2`, and `v`-monomials act on class leads.
///
/// Restricted to one `a`-layer it is the associated graded piece of the
/// `a`-adic filtration; `u`, `b_k`, `v_n` and integers all preserve `a`, so
/// layers can be assembled one at a time.
#[derive(Clone)]
pub struct BundledTable {
    pub classes: Arc<ChartClasses>,
    pub layer: Option<i64>,
    nmax: usize,
    series_cache: Arc<Mutex<HashMap<(usize, i64), VSeries>>>,
}

impl BundledTable {
    pub fn new(window: Window, mode: Parallelism) -> Result<Self> {
        let classes = ChartClasses::compute(Geometry::Point, window, &RuleBook::point(), mode)?;
        Ok(BundledTable { nmax: window.nmax, classes: Arc::new(classes), layer: None, series_cache: Arc::default() })
    }

    /// The same table restricted to the layer `a = s`.
    pub fn at_layer(&self, s: i64) -> BundledTable {
        BundledTable { layer: Some(s), ..self.clone() }
    }

    /// Default window: `|σ| <= 12`, weight up to 6, `a <= 24`.
    pub fn default_window() -> Window {
        Window::borel(0, 12, 6, 24)
    }

    fn cached(&self, key: (usize, i64), make: impl FnOnce() -> Result<VSeries>) -> Result<VSeries> {
        if let Some(s) = self.series_cache.lock().expect("series cache").get(&key) {
            return Ok(s.clone());
        }
        let s = make()?;
        self.series_cache.lock().expect("series cache").insert(key, s.clone());
        Ok(s)
    }
}

impl CoefficientTable for BundledTable {
    fn name(&self) -> String {
        "bundled".into()
    }

    fn generators(&self, deg: Deg) -> Option<Vec<TableGen>> {
        let cls = self.classes.classes(deg, self.layer?, 0..1)?;
        Some(cls.into_iter().map(|(_, c)| TableGen { label: c.lead.to_string(), order: c.order }).collect())
    }

    fn act(&self, deg: Deg, idx: usize, e: &VExp) -> Option<Vec<(usize, BigInt)>> {
        let cls = self.classes.classes(deg, self.layer?, 0..1)?;
        let (_, c) = cls.get(idx)?;
        let times = |m: &Monomial| Monomial { v: m.v.mul(e), ..*m };
        let t = times(&c.lead);
        let tcls = self.classes.classes(t.cell(), self.layer?, 0..1)?;
        let pos = |j: usize| tcls.iter().position(|(i, _)| *i == j);
        if t.a == 0 && self.classes.chart.geometry.integral_at(t.u) {
            // products of permanent cycles on the integral line never vanish
            let (j, excess) = self.classes.lookup(&t)?;
            return Some(vec![(pos(j)?, BigInt::from(2).pow(excess as u32))]);
        }
        let monos: Vec<Monomial> = c.rep.iter().map(times).collect();
        let ids = self.classes.express(t.cell(), &monos)?;
        ids.into_iter().map(|j| Some((pos(j)?, BigInt::one()))).collect()
    }

    fn two_series(&self, below: i64) -> Result<VSeries> {
        let nmax = self.nmax;
        self.cached((0, below), || {
            let trunc = below.max(2) as usize;
            let s = series::two_series(nmax, trunc, Modulus::None)?;
            VSeries::from_coeffs(0, s.coeffs().iter(), below)
        })
    }

    fn b_image(&self, k: usize, below: i64) -> Result<VSeries> {
        let nmax = self.nmax;
        self.cached((k, below), || {
            let trunc = (below + 1).max(k as i64 + 1) as usize;
            let s = series::b_image(k, nmax, trunc)?;
            VSeries::from_coeffs(s.low, s.coeffs.iter(), below)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degree::{Convention, RODegree};

    #[test]
    fn toy_table_shape() {
        let t = ToyTable;
        assert_eq!(t.generators((0, 0)).unwrap().len(), 1);
        assert!(t.generators((1, 1)).unwrap().is_empty());
        assert_eq!(t.two_series(5).unwrap().terms.len(), 1);
        assert_eq!(t.b_image(1, 3).unwrap().lowest(), Some(-1));
        assert!(t.b_image(2, 3).unwrap().terms.is_empty());
    }

    #[test]
    fn bundled_b_images_are_homogeneous() {
        let t = BundledTable::new(Window::borel(0, 4, 2, 4), Parallelism::Sequential).unwrap();
        for k in 1..=3 {
            let s = t.b_image(k, 4).unwrap();
            for (&p, row) in &s.terms {
                for e in row.keys() {
                    let deg = e.degree(Convention::Diagonal) + RODegree::u(Convention::Diagonal) * p;
                    assert_eq!(deg, RODegree::b(k), "b_{k}: {e} u^{p}");
                }
            }
        }
        // [2](u) = 2u + ...
        let two = t.two_series(4).unwrap();
        assert_eq!(two.terms[&1][&VExp::ONE], BigInt::from(2));
    }

    #[test]
    fn point_table_unit_and_v_action() {
        let t = BundledTable::new(BundledTable::default_window(), Parallelism::Sequential).unwrap();
        assert!(t.generators((0, 0)).is_none(), "high layers of degree 0 sit at the window edge");
        let t = t.at_layer(0);
        let unit = t.generators((0, 0)).expect("layer 0 of degree 0 is trusted");
        let i = unit.iter().position(|g| g.label == "1").expect("unit class");
        assert_eq!(unit[i].order, 0);
        // v_1 * 1 is the Z-tower generator v_1 in degree (1, 1)
        let v1 = t.act((0, 0), i, &VExp::generator(1)).expect("known product");
        let gens = t.generators((1, 1)).unwrap();
        assert_eq!(v1.len(), 1);
        assert_eq!(gens[v1[0].0].label, "v1");
        assert_eq!(v1[0].1, BigInt::one());
    }
}
