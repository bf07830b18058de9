use crate::config::{Format, RunConfig};
use crate::Usage;
use anyhow::{Context, Result};
use realcob_core::chart::{
    build_e1, default_safe_range, page_json, page_svg, point_bcss, run_pages, tate_rank_check, Chart, Geometry, PageRun,
    RuleBook, TateReport, Verdict, Window, MAX_PAGE,
};
use realcob_core::homalg::{
    assemble_diagonal, assemble_offdiagonal, assemble_offdiagonal_table, compare_reports, normalize_ro_degree,
    AssemblyWindow, BundledTable, DegreeCase, DegreeReport, OffDiagonalCharts, ToyTable, WindowComparison,
};
use realcob_core::par::Parallelism;
use realcob_core::patterns::{
    alt_decompose, delta_chain, differential_table, epsilon_chain, odd_stunted_decomposition, Bottom, Chain,
    DecompositionForm,
};
use realcob_core::series::{two_series, universal_fgl, Modulus};
use serde_json::{json, Value};
use std::fmt::Write;
use std::path::PathBuf;

/// Rendered output and whether every check it carries passed.
pub struct Outcome {
    pub out: String,
    pub ok: bool,
}

impl Outcome {
    fn ok(out: String) -> Self {
        Outcome { out, ok: true }
    }
}

fn to_json(v: &impl serde::Serialize) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn text_or_json(format: Format) -> Result<bool> {
    match format {
        Format::Json => Ok(true),
        Format::Text => Ok(false),
        Format::Svg => Err(Usage("svg output is only available for chart and point-bcss".into()).into()),
    }
}

pub fn two_series_cmd(cfg: &RunConfig, modulus: &str) -> Result<Outcome> {
    let json = text_or_json(cfg.format)?;
    let modulus = Modulus::parse(modulus)?;
    let s = two_series(cfg.nmax, cfg.trunc_order, modulus)?;
    if json {
        return Ok(Outcome::ok(to_json(&s.to_json())?));
    }
    Ok(Outcome::ok(format!("{s}\n")))
}

pub fn fgl_cmd(cfg: &RunConfig) -> Result<Outcome> {
    let json = text_or_json(cfg.format)?;
    let f = universal_fgl(cfg.nmax, cfg.trunc_order)?;
    let mut terms: Vec<(u16, u16, String)> = f.terms().map(|(e, c)| (e[0], e[1], c.to_string())).collect();
    terms.sort_by_key(|t| (t.0 + t.1, t.0));
    if json {
        let terms: Vec<Value> = terms.iter().map(|(x, y, c)| json!({"x": x, "y": y, "coef": c})).collect();
        return Ok(Outcome::ok(to_json(&json!({"nmax": cfg.nmax, "trunc": cfg.trunc_order, "terms": terms}))?));
    }
    let mut out = format!("F(x, y) mod (x, y)^{}, generators v1..v{}\n", cfg.trunc_order, cfg.nmax);
    for (x, y, c) in terms {
        writeln!(out, "x^{x} y^{y}  {c}")?;
    }
    Ok(Outcome::ok(out))
}

pub fn decompose_cmd(cfg: &RunConfig, l: u64, form: &str) -> Result<Outcome> {
    let json = text_or_json(cfg.format)?;
    let d = match form {
        "odd" => odd_stunted_decomposition(l)?,
        "odd-even-q" => alt_decompose(l, DecompositionForm::OddStuntedEvenQ)?,
        "odd-odd-q" => alt_decompose(l, DecompositionForm::OddStuntedOddQ)?,
        "even" => alt_decompose(l, DecompositionForm::EvenStunted)?,
        _ => return Err(Usage(format!("unknown form {form:?}; use odd, odd-even-q, odd-odd-q or even")).into()),
    };
    if json {
        return Ok(Outcome::ok(to_json(&json!({"l": l, "form": d.form, "exponents": d.exponents, "text": d.to_string()}))?));
    }
    Ok(Outcome::ok(format!("{l} = {d}\n")))
}

fn chain_line(name: &str, c: &Chain) -> String {
    let list = |v: &[i64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    let levels: Vec<i64> = c.levels.iter().map(|&n| n as i64).collect();
    format!(
        "{name}({}) = {}\n  {} = {}\n  ells   {}\n  starts {}\n  levels {}\n",
        c.l,
        c.value,
        c.l,
        c.decomposition,
        list(&c.ells),
        list(&c.starts),
        list(&levels)
    )
}

pub fn chains_cmd(cfg: &RunConfig, l: u64, kind: &str) -> Result<Outcome> {
    let json = text_or_json(cfg.format)?;
    let (eps, del) = match kind {
        "epsilon" => (Some(epsilon_chain(l)?), None),
        "delta" => (None, Some(delta_chain(l)?)),
        "both" => (Some(epsilon_chain(l)?), Some(delta_chain(l)?)),
        _ => return Err(Usage(format!("unknown chain kind {kind:?}; use epsilon, delta or both")).into()),
    };
    if json {
        return Ok(Outcome::ok(to_json(&json!({"l": l, "epsilon": eps, "delta": del}))?));
    }
    let mut out = String::new();
    if let Some(c) = &eps {
        out += &chain_line("epsilon", c);
    }
    if let Some(c) = &del {
        out += &chain_line("delta", c);
    }
    Ok(Outcome::ok(out))
}

pub fn patterns_cmd(cfg: &RunConfig, m: &str, i_max: Option<u64>) -> Result<Outcome> {
    let json = text_or_json(cfg.format)?;
    let bottom = Bottom::parse(m)?;
    let i_max = i_max.unwrap_or(match bottom {
        Bottom::Infinity => 64,
        Bottom::Finite(m) => m,
    });
    let table = differential_table(bottom, i_max)?;
    if json {
        return Ok(Outcome::ok(to_json(&table)?));
    }
    Ok(Outcome::ok(table.render_text()))
}

/// Page selection and output shared by `chart` and `point-bcss`.
pub struct PageArgs {
    pub page: Option<u64>,
    pub svg: Option<PathBuf>,
}

fn page_summary(out: &mut String, chart: &Chart, run: &PageRun) -> Result<()> {
    let classes = |cells: &[realcob_core::chart::CellPage]| cells.iter().map(|c| c.rank()).sum::<usize>();
    let e1 = run.pages.first().map_or_else(|| classes(&run.e_inf), |p| classes(&p.cells));
    writeln!(out, "E_1: {e1} classes in {} cells", chart.len())?;
    for p in &run.pages {
        writeln!(out, "d_{}: rank {}", p.r, p.rank_d.iter().sum::<usize>())?;
    }
    let reliable: usize = run.e_inf.iter().map(|c| c.reliable()).sum();
    let label = if run.complete { "E_inf" } else { "E_last" };
    writeln!(out, "{label}: {} classes, {reliable} away from the window edge", classes(&run.e_inf))?;
    let c = &run.checks;
    if c.ok() {
        writeln!(out, "checks: ok ({} truncated differentials)", c.truncated)?;
    } else {
        writeln!(
            out,
            "checks: FAILED (d^2: {}, euler: {}, consistency: {})",
            c.d_squared.len(),
            c.euler.len(),
            c.consistency.len()
        )?;
        for s in c.d_squared.iter().chain(&c.euler).chain(&c.consistency).take(10) {
            writeln!(out, "  {s}")?;
        }
    }
    Ok(())
}

fn emit_page(
    cfg: &RunConfig,
    args: &PageArgs,
    chart: &Chart,
    run: &PageRun,
    tate: Option<&TateReport>,
) -> Result<Outcome> {
    let r = args.page.unwrap_or(MAX_PAGE + 1);
    let ok = run.checks.ok() && tate.is_none_or(|t| t.passed());
    if let Some(path) = &args.svg {
        std::fs::write(path, page_svg(chart, run, r)).map_err(|e| Usage(format!("writing {}: {e}", path.display())))?;
    }
    let out = match cfg.format {
        Format::Svg => page_svg(chart, run, r),
        Format::Json => {
            let mut v = serde_json::to_value(page_json(chart, run, r))?;
            let obj = v.as_object_mut().context("page json is an object")?;
            obj.insert("complete".into(), json!(run.complete));
            obj.insert("checks".into(), serde_json::to_value(&run.checks)?);
            obj.insert("tate".into(), serde_json::to_value(tate)?);
            // pages run to megabytes; keep them compact
            serde_json::to_string(&v)? + "\n"
        }
        Format::Text => {
            let w = chart.window;
            let mut out = format!(
                "{}: u <= {}, sigma in [{}, {}], weight <= {}, {:?}\n",
                chart.geometry.label(),
                w.u_max,
                w.sigma_min,
                w.sigma_max,
                w.weight_max,
                w.filtration
            );
            page_summary(&mut out, chart, run)?;
            if let Some(t) = tate {
                writeln!(
                    out,
                    "tate: {} on degrees {}..={} ({} pass, {} fail, {} indeterminate)",
                    if t.passed() { "pass" } else { "FAIL" },
                    t.safe_range.0,
                    t.safe_range.1,
                    t.count(Verdict::Pass),
                    t.count(Verdict::Fail),
                    t.count(Verdict::Indeterminate)
                )?;
            }
            out
        }
    };
    Ok(Outcome { out, ok })
}

fn check_page(page: Option<u64>) -> Result<()> {
    if let Some(r) = page {
        if r == 0 || r > MAX_PAGE + 1 {
            return Err(Usage(format!("page must lie in 1..={}", MAX_PAGE + 1)).into());
        }
    }
    Ok(())
}

pub fn chart_cmd(cfg: &RunConfig, m: &str, tate: bool, args: &PageArgs, mode: Parallelism) -> Result<Outcome> {
    check_page(args.page)?;
    let bottom = Bottom::parse(m)?;
    let u_max = bottom.first_position() as i64 + cfg.u_window;
    let window = if tate {
        Window::tate(u_max, cfg.sigma_window, cfg.weight_window)
    } else {
        Window::borel(u_max, cfg.sigma_window, cfg.weight_window, cfg.a_window)
    };
    window.validate()?;
    let chart = build_e1(Geometry::stunted(bottom), window)?;
    let book = RuleBook::from_table(&differential_table(bottom, u_max as u64)?, u_max)?;
    let run = run_pages(&chart, &book, MAX_PAGE, mode)?;
    let report = if tate { Some(tate_rank_check(&chart, &run, default_safe_range(&chart))?) } else { None };
    emit_page(cfg, args, &chart, &run, report.as_ref())
}

pub fn point_cmd(cfg: &RunConfig, args: &PageArgs, mode: Parallelism) -> Result<Outcome> {
    check_page(args.page)?;
    let window = Window::borel(0, cfg.sigma_window, cfg.weight_window, cfg.a_window);
    window.validate()?;
    let (chart, run) = point_bcss(window, mode)?;
    emit_page(cfg, args, &chart, &run, None)
}

pub struct PullbackArgs {
    pub mode: String,
    pub m: Option<u64>,
    pub coeffs: String,
    pub radius: i64,
    pub layers: i64,
    pub below: Option<i64>,
    pub above: Option<i64>,
    pub b_weight: Option<i64>,
}

fn grid(r: i64) -> Vec<(i64, i64)> {
    (-r..=r).flat_map(|k| (-r..=r).map(move |l| (k, l))).collect()
}

fn report_line(r: &DegreeReport) -> String {
    let d = r.degree;
    let layer = r.layer.map_or(String::new(), |s| format!(" a={s}"));
    let head = format!("[{}, {}, {}, {}]{layer}", d[0], d[1], d[2], d[3]);
    if r.indeterminate {
        return format!("{head}  indeterminate: {}", r.reason.as_deref().unwrap_or("outside the window"));
    }
    let g = |x: Option<&realcob_core::homalg::GroupJson>| x.map_or("?".to_string(), |g| g.text.clone());
    let c = r.corners.as_ref();
    let mut s = format!(
        "{head}  UR {}  LL {}  LR {}  pullback {}  {}",
        g(c.map(|c| &c.upper_right)),
        g(c.map(|c| &c.lower_left)),
        g(c.map(|c| &c.lower_right)),
        g(r.pullback.as_ref()),
        if r.spanning { "spanning" } else { "NOT SPANNING" }
    );
    if let Some(u) = r.unit {
        write!(s, "  unit {}", if u { "ok" } else { "MISSING" }).unwrap();
    }
    s
}

pub fn pullback_cmd(cfg: &RunConfig, a: &PullbackArgs, mode: Parallelism) -> Result<Outcome> {
    let json = text_or_json(cfg.format)?;
    if a.radius < 0 || a.layers < 0 {
        return Err(Usage("radius and layers must be non-negative".into()).into());
    }
    let bundled = match a.coeffs.as_str() {
        "toy" => false,
        "bundled" => true,
        c => return Err(Usage(format!("unknown coefficient table {c:?}; use toy or bundled")).into()),
    };
    let base = match (a.mode.as_str(), bundled) {
        (_, false) => AssemblyWindow::default(),
        ("diagonal", true) => AssemblyWindow { below: 1, above: 2, b_weight: 2 },
        (_, true) => AssemblyWindow { below: 1, above: 3, b_weight: 2 },
    };
    let w = AssemblyWindow {
        below: a.below.unwrap_or(base.below),
        above: a.above.unwrap_or(base.above),
        b_weight: a.b_weight.unwrap_or(base.b_weight),
    };
    if w.below < 0 || w.above <= 0 || w.b_weight < 0 {
        return Err(Usage("assembly window needs below >= 0, above > 0, b-weight >= 0".into()).into());
    }
    let cells = grid(a.radius);
    let layers: Vec<i64> = (0..=a.layers).collect();
    let mut stability: Option<WindowComparison> = None;
    let (reports, m) = match a.mode.as_str() {
        "diagonal" => {
            if a.m.is_some() {
                return Err(Usage("--m applies to the off-diagonal mode only".into()).into());
            }
            let reports = if bundled {
                let table = BundledTable::new(BundledTable::default_window(), mode)?;
                let mut all = Vec::new();
                for &s in &layers {
                    all.extend(assemble_diagonal(&table.at_layer(s), &cells, &w, Some(s), mode)?);
                }
                all
            } else {
                assemble_diagonal(&ToyTable, &cells, &w, None, mode)?
            };
            (reports, None)
        }
        "off" => {
            let m = a.m.ok_or_else(|| Usage("the off-diagonal mode needs --m".into()))?;
            if m == 0 {
                return Err(Usage("m must be at least 1".into()).into());
            }
            let reports = if bundled {
                let table = BundledTable::new(BundledTable::default_window(), mode)?;
                let run = |chart: Window| -> Result<Vec<DegreeReport>> {
                    let ctx = OffDiagonalCharts::new(m, w, table.clone(), chart, mode)?;
                    Ok(assemble_offdiagonal(&ctx, &cells, &layers, mode)?)
                };
                let reports = run(OffDiagonalCharts::default_chart_window())?;
                let wider = run(Window::borel(0, 14, 6, 28))?;
                stability = Some(compare_reports(&reports, &wider));
                reports
            } else {
                assemble_offdiagonal_table(&ToyTable, m, &cells, &w, mode)?
            };
            (reports, Some(m))
        }
        other => return Err(Usage(format!("unknown mode {other:?}; use diagonal or off")).into()),
    };

    let failures: Vec<&DegreeReport> = reports.iter().filter(|r| !r.consistent()).collect();
    let determined = reports.iter().filter(|r| !r.indeterminate).count();
    let stable = stability.as_ref().is_none_or(|s| s.stable());
    let ok = failures.is_empty() && stable;
    let out = if json {
        to_json(&json!({
            "mode": a.mode,
            "coeffs": a.coeffs,
            "m": m,
            "window": w,
            "reports": reports,
            "summary": {
                "reports": reports.len(),
                "determined": determined,
                "indeterminate": reports.len() - determined,
                "spanning_failures": failures.len(),
            },
            "stability": stability,
        }))?
    } else {
        let mut out = String::new();
        for r in &reports {
            writeln!(out, "{}", report_line(r))?;
        }
        writeln!(
            out,
            "{} degrees: {determined} determined, {} indeterminate, {} spanning failures",
            reports.len(),
            reports.len() - determined,
            failures.len()
        )?;
        if let Some(s) = &stability {
            writeln!(out, "window stability: {}/{} agree", s.agreed, s.compared)?;
        }
        out
    };
    Ok(Outcome { out, ok })
}

pub fn normalize_cmd(cfg: &RunConfig, k: i64, l: i64, m: i64, n: i64) -> Result<Outcome> {
    let json = text_or_json(cfg.format)?;
    let d = normalize_ro_degree(k, l, m, n);
    if json {
        return Ok(Outcome::ok(to_json(&d)?));
    }
    let case = match d.case {
        DegreeCase::Diagonal => "diagonal".to_string(),
        DegreeCase::OffDiagonal { m } => format!("off-diagonal, RP^inf_{}", -m),
    };
    Ok(Outcome::ok(format!("{} -> {} ({case})\n", klmn([k, l, m, n]), klmn(d.as_klmn()))))
}

/// `k + lγα + mα + nγ` written with `ga`, `a` and `g`, zero terms dropped.
fn klmn(d: [i64; 4]) -> String {
    let mut s = d[0].to_string();
    for (c, name) in d[1..].iter().zip(["ga", "a", "g"]) {
        match *c {
            0 => {}
            1 => s += &format!(" + {name}"),
            -1 => s += &format!(" - {name}"),
            c if c < 0 => s += &format!(" - {}{name}", -c),
            c => s += &format!(" + {c}{name}"),
        }
    }
    s
}
