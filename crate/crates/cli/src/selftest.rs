//! Quick end-to-end checks over every module. Output depends only on the
//! seed, never on timing or thread count.

use crate::config::{Format, RunConfig};
use crate::commands::Outcome;
use anyhow::Result;
use realcob_core::chart::{build_e1, default_safe_range, point_bcss, run_pages, tate_rank_check, Geometry, RuleBook, Window, MAX_PAGE};
use realcob_core::degree::{Convention, RODegree};
use realcob_core::homalg::{assemble_diagonal, cone_suite, lemma_suite, AssemblyWindow, ToyTable};
use realcob_core::par::Parallelism;
use realcob_core::patterns::{delta_chain, differential_table, epsilon_chain, special_starts, Bottom};
use realcob_core::series::{b_image, fgl_sum, two_series, Modulus, MultiSeries, RationalPoly};
use serde::Serialize;

#[derive(Serialize)]
struct Check {
    name: &'static str,
    passed: bool,
    detail: String,
}

fn check(name: &'static str, f: impl FnOnce() -> Result<(bool, String)>) -> Check {
    match f() {
        Ok((passed, detail)) => Check { name, passed, detail },
        Err(e) => Check { name, passed: false, detail: format!("error: {e}") },
    }
}

fn two_series_check() -> Result<(bool, String)> {
    for n in 0..=3usize {
        let modulus = if n == 0 { Modulus::None } else { Modulus::Ideal(n) };
        let s = two_series(n.max(1), (1 << (n + 1)) + 2, modulus)?;
        let want = if n == 0 { RationalPoly::integer(2) } else { RationalPoly::v(n) };
        if s.lowest_term() != Some((1 << n, &want)) {
            return Ok((false, format!("lowest term wrong mod I_{n}")));
        }
    }
    Ok((true, "lowest term v_n u^(2^n) mod I_n for n <= 3".into()))
}

fn fgl_check() -> Result<(bool, String)> {
    let (nmax, trunc) = (2, 8);
    let x = MultiSeries::var(0, 3, nmax, trunc);
    let y = MultiSeries::var(1, 3, nmax, trunc);
    let z = MultiSeries::var(2, 3, nmax, trunc);
    let xy = fgl_sum(&x, &y)?;
    let unit = fgl_sum(&x, &MultiSeries::zero(3, nmax, trunc))? == x;
    let comm = xy == fgl_sum(&y, &x)?;
    let assoc = fgl_sum(&xy, &z)? == fgl_sum(&x, &fgl_sum(&y, &z)?)?;
    Ok((unit && comm && assoc, format!("unit {unit}, commutative {comm}, associative {assoc} to order {trunc}")))
}

fn b_check() -> Result<(bool, String)> {
    for k in 0..=6 {
        if b_image(k, 3, 8)?.check_homogeneous(RODegree::b(k), Convention::Diagonal).is_err() {
            return Ok((false, format!("b_{k} is not homogeneous")));
        }
    }
    Ok((true, "b_0..b_6 homogeneous".into()))
}

fn chain_check() -> Result<(bool, String)> {
    let sorted = |starts: &[i64], levels: &[u32]| {
        let mut v: Vec<(u64, u32)> = starts.iter().zip(levels).map(|(&s, &n)| (s as u64, n)).collect();
        v.sort();
        v
    };
    for k in 1..=64u64 {
        let e = epsilon_chain(k)?;
        let d = delta_chain(k)?;
        if sorted(&e.starts, &e.levels) != special_starts(2 * k + 1) || sorted(&d.starts, &d.levels) != special_starts(2 * k) {
            return Ok((false, format!("chain starts differ from pattern numbers at k = {k}")));
        }
    }
    Ok((true, "chain starts agree for k <= 64".into()))
}

fn tate_check(mode: Parallelism) -> Result<(bool, String)> {
    let bottom = Bottom::Infinity;
    let chart = build_e1(Geometry::stunted(bottom), Window::tate(16, 24, 7))?;
    let book = RuleBook::from_table(&differential_table(bottom, 16)?, 16)?;
    let run = run_pages(&chart, &book, MAX_PAGE, mode)?;
    let rep = tate_rank_check(&chart, &run, default_safe_range(&chart))?;
    let ok = run.checks.ok() && rep.passed();
    Ok((ok, format!("RP^inf: checks {}, tate {}", run.checks.ok(), rep.passed())))
}

fn point_check(mode: Parallelism) -> Result<(bool, String)> {
    let (_, run) = point_bcss(Window::borel(0, 8, 3, 8), mode)?;
    Ok((run.checks.ok(), format!("{} nonzero pages, checks {}", run.pages.len(), run.checks.ok())))
}

fn lemma_check(seed: u64) -> Result<(bool, String)> {
    let r = lemma_suite(seed, 100);
    Ok((r.all_passed(), format!("{}/{} instances", r.passed(), r.instances.len())))
}

fn cone_check(seed: u64) -> Result<(bool, String)> {
    let r = cone_suite(seed, 50)?;
    let ok = r.factored == r.checks && r.unique == r.checks;
    Ok((ok, format!("{} cones, {} factor, {} uniquely", r.checks, r.factored, r.unique)))
}

fn spanning_check(mode: Parallelism) -> Result<(bool, String)> {
    let cells: Vec<(i64, i64)> = (-3..=3).flat_map(|k| (-3..=3).map(move |l| (k, l))).collect();
    let r = assemble_diagonal(&ToyTable, &cells, &AssemblyWindow::default(), None, mode)?;
    let bad = r.iter().filter(|x| !x.consistent() || x.indeterminate).count();
    Ok((bad == 0, format!("{} toy degrees, {bad} failures", r.len())))
}

pub fn run(cfg: &RunConfig, mode: Parallelism) -> Result<Outcome> {
    let seed = cfg.seed;
    let checks = vec![
        check("two-series", two_series_check),
        check("fgl-axioms", fgl_check),
        check("b-homogeneity", b_check),
        check("chains", chain_check),
        check("tate-rank", || tate_check(mode)),
        check("point-bcss", || point_check(mode)),
        check("lemma-suite", || lemma_check(seed)),
        check("cone-suite", || cone_check(seed)),
        check("toy-spanning", || spanning_check(mode)),
    ];
    let passed = checks.iter().filter(|c| c.passed).count();
    let ok = passed == checks.len();
    let out = match cfg.format {
        Format::Json => {
            serde_json::to_string_pretty(&serde_json::json!({"seed": seed, "passed": ok, "checks": checks}))? + "\n"
        }
        _ => {
            let mut out = String::new();
            for c in &checks {
                out += &format!("{:4}  {:14}  {}\n", if c.passed { "ok" } else { "FAIL" }, c.name, c.detail);
            }
            out + &format!("selftest seed {seed}: {passed}/{} passed\n", checks.len())
        }
    };
    Ok(Outcome { out, ok })
}
