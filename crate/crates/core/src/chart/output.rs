//! JSON and SVG renderings of pages.

use super::engine::{leading, CellPage, Chart, PageRun, Window};
use super::monomial::MonomialJson;
use serde::{Deserialize, Serialize};
use std::fmt::Write;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisJson {
    /// Lowest E1 monomial of the representative.
    pub lead: MonomialJson,
    pub terms: usize,
    pub reliable: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellJson {
    pub degree: [i64; 2],
    pub basis: Vec<BasisJson>,
    /// `[source, target, 1]`: target index in the cell of degree `c_1 - 1`.
    pub d: Vec<[u32; 3]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PageJson {
    pub m: String,
    pub window: Window,
    pub page: u64,
    /// True for `E_∞`.
    #[serde(rename = "final")]
    pub is_final: bool,
    pub cells: Vec<CellJson>,
}

fn cells_json(chart: &Chart, cells: &[CellPage], d: Option<&[Vec<Vec<u32>>]>) -> Vec<CellJson> {
    let nmax = chart.window.nmax;
    let mut out = Vec::new();
    for (ci, key) in chart.keys().iter().enumerate() {
        let cell = &cells[ci];
        if cell.reps.is_empty() {
            continue;
        }
        let basis = cell
            .reps
            .iter()
            .zip(&cell.tainted)
            .map(|(r, t)| BasisJson {
                lead: MonomialJson::from_monomial(&leading(chart, ci, r), nmax),
                terms: r.len(),
                reliable: !t,
            })
            .collect();
        let mut trip = Vec::new();
        if let Some(d) = d {
            for (j, coords) in d[ci].iter().enumerate() {
                for &k in coords {
                    trip.push([j as u32, k, 1]);
                }
            }
        }
        out.push(CellJson { degree: [key.0, key.1], basis, d: trip });
    }
    out
}

/// `E_r` with `d_r`; pages past the run's last nonzero page are `E_∞`.
pub fn page_json(chart: &Chart, run: &PageRun, r: u64) -> PageJson {
    let m = chart.geometry.label();
    let window = chart.window;
    match run.pages.iter().find(|p| p.r >= r) {
        Some(p) => {
            let d = (p.r == r).then_some(p.d.as_slice());
            PageJson { m, window, page: r, is_final: false, cells: cells_json(chart, &p.cells, d) }
        }
        None => PageJson { m, window, page: r, is_final: run.complete, cells: cells_json(chart, &run.e_inf, None) },
    }
}

/// Dots at `(stem, a)` with `stem = c_1 + c_α`, one per basis element of
/// `E_r`, and segments for `d_r`. Classes sharing a spot are fanned out.
pub fn page_svg(chart: &Chart, run: &PageRun, r: u64) -> String {
    let page = page_json(chart, run, r);
    let mut pts: Vec<(i64, i64, bool)> = Vec::new();
    let mut pos: Vec<Vec<(f64, f64)>> = Vec::new();
    let mut spots: std::collections::BTreeMap<(i64, i64), usize> = Default::default();
    for cell in &page.cells {
        let stem = cell.degree[0] + cell.degree[1];
        let mut cp = Vec::new();
        for b in &cell.basis {
            let k = spots.entry((stem, b.lead.a)).or_insert(0);
            let off = *k as f64 * 0.18;
            *k += 1;
            cp.push((stem as f64 + off, b.lead.a as f64 + off * 0.5));
            pts.push((stem, b.lead.a, b.reliable));
        }
        pos.push(cp);
    }
    let (xmin, xmax) = pts.iter().fold((i64::MAX, i64::MIN), |(lo, hi), p| (lo.min(p.0), hi.max(p.0)));
    let (ymin, ymax) = pts.iter().fold((i64::MAX, i64::MIN), |(lo, hi), p| (lo.min(p.1), hi.max(p.1)));
    let (xmin, xmax, ymin, ymax) = if pts.is_empty() { (0, 1, 0, 1) } else { (xmin, xmax, ymin, ymax) };
    let scale = 16.0;
    let pad = 24.0;
    let width = (xmax - xmin + 2) as f64 * scale + 2.0 * pad;
    let height = (ymax - ymin + 2) as f64 * scale + 2.0 * pad;
    let px = |x: f64| pad + (x - xmin as f64 + 1.0) * scale;
    let py = |y: f64| height - pad - (y - ymin as f64 + 1.0) * scale;
    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}">"#
    )
    .unwrap();
    writeln!(s, r#"<title>{} E_{}</title>"#, xml_escape(&page.m), page.page).unwrap();
    writeln!(s, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##).unwrap();
    // differentials: target cell has degree (c1 - 1, cα)
    let index: std::collections::HashMap<[i64; 2], usize> =
        page.cells.iter().enumerate().map(|(i, c)| (c.degree, i)).collect();
    for (ci, cell) in page.cells.iter().enumerate() {
        if let Some(&ti) = index.get(&[cell.degree[0] - 1, cell.degree[1]]) {
            for t in &cell.d {
                let (x1, y1) = pos[ci][t[0] as usize];
                let (x2, y2) = pos[ti][t[1] as usize];
                writeln!(
                    s,
                    r##"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="#1f5fbf" stroke-width="1"/>"##,
                    px(x1),
                    py(y1),
                    px(x2),
                    py(y2)
                )
                .unwrap();
            }
        }
    }
    for (ci, cell) in page.cells.iter().enumerate() {
        for (j, b) in cell.basis.iter().enumerate() {
            let (x, y) = pos[ci][j];
            let fill = if b.reliable { "#000000" } else { "#b0b0b0" };
            writeln!(s, r#"<circle cx="{:.1}" cy="{:.1}" r="2.5" fill="{fill}"/>"#, px(x), py(y)).unwrap();
        }
    }
    writeln!(s, "</svg>").unwrap();
    s
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
