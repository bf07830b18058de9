//! One line per acceptance criterion: verdict, elapsed time, detail.
//! Tolerances and time limits are fixed below; any failure makes the
//! target exit non-zero.

use num_bigint::BigInt;
use num_rational::BigRational;
use realcob_core::chart::{
    build_e1, default_safe_range, run_pages, tate_rank_check, Chart, Geometry, PageRun, RuleBook, Verdict, Window, MAX_PAGE,
};
use realcob_core::degree::{Convention, RODegree};
use realcob_core::homalg::{
    assemble_diagonal, assemble_offdiagonal, assemble_offdiagonal_table, lemma_suite, AssemblyWindow, BundledTable,
    DegreeReport, OffDiagonalCharts, ToyTable,
};
use realcob_core::par::Parallelism;
use realcob_core::patterns::{
    delta_chain, differential_table, epsilon_chain, special_starts, Bottom, DifferentialRule, RuleClass,
};
use realcob_core::series::{b_image, fgl_sum, two_series, Modulus, MultiSeries, RationalPoly};
use std::collections::BTreeSet;
use std::process::{Command, ExitCode};
use std::time::Instant;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

// ---- 1: golden differential tables ----

type Printed = (RuleClass, u64, u64, u64, u64, Option<u64>);
use RuleClass::{Horizontal as H, Special as S, Vertical as V};

/// The two worked k = 50 lists, transcribed as printed.
const PRINTED_101: [Printed; 13] = [
    (S, 3, 0, 4, 51, Some(51)),
    (S, 7, 0, 8, 52, Some(52)),
    (S, 31, 0, 32, 53, Some(63)),
    (S, 127, 0, 128, 64, Some(100)),
    (V, 15, 8, 16, 53, Some(56)),
    (V, 63, 32, 64, 64, Some(68)),
    (H, 1, 1, 2, 51, None),
    (H, 3, 2, 4, 51, None),
    (H, 7, 4, 8, 52, None),
    (H, 15, 8, 16, 56, None),
    (H, 31, 16, 32, 53, None),
    (H, 63, 32, 64, 69, None),
    (H, 127, 64, 128, 64, None),
];

const PRINTED_100: [Printed; 13] = [
    (S, 3, 0, 4, 50, Some(51)),
    (S, 31, 0, 32, 52, Some(63)),
    (S, 127, 0, 128, 64, Some(99)),
    (V, 1, 1, 2, 50, Some(50)),
    (V, 15, 8, 16, 52, Some(55)),
    (V, 63, 32, 64, 64, Some(67)),
    (H, 1, 1, 2, 51, None),
    (H, 3, 2, 4, 50, None),
    (H, 7, 4, 8, 52, None),
    (H, 15, 8, 16, 56, None),
    (H, 31, 16, 32, 52, None),
    (H, 63, 32, 64, 68, None),
    (H, 127, 64, 128, 64, None),
];

fn sorted(mut v: Vec<Printed>) -> Vec<Printed> {
    v.sort();
    v
}

fn cli_table(m: u64) -> Result<Vec<DifferentialRule>, String> {
    let o = Command::new(env!("CARGO_BIN_EXE_realcob"))
        .args(["patterns", "--m", &m.to_string(), "--format", "json"])
        .output()
        .map_err(|e| e.to_string())?;
    ensure(o.status.success(), format!("patterns --m {m} exited {:?}", o.status.code()))?;
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).map_err(|e| e.to_string())?;
    serde_json::from_value(v["rules"].clone()).map_err(|e| e.to_string())
}

fn golden_tables() -> Outcome {
    let mut counts = Vec::new();
    for (m, printed) in [(101u64, &PRINTED_101), (100, &PRINTED_100)] {
        let table = differential_table(Bottom::Finite(m), m).map_err(|e| e.to_string())?;
        ensure(cli_table(m)? == table.rules, format!("CLI rules for m = {m} differ from the library table"))?;
        let got = sorted(table.stunted_families().iter().map(|r| (r.class, r.page, r.sigma_res, r.sigma_mod, r.u_lo, r.u_hi)).collect());
        let mut want = sorted(printed.to_vec());
        if m == 101 {
            // printed vertical d15 (8 mod 16) ends at 56, where the printed
            // horizontal d15 of the same class starts; one action per level
            // leaves 55
            let v = want.iter_mut().find(|r| r.0 == V && r.1 == 15).unwrap();
            v.5 = Some(55);
        }
        ensure(got == want, format!("m = {m}: engine {got:?} vs printed {want:?}"))?;
        counts.push(got.len());
    }
    Ok(format!(
        "m=101: {} families, m=100: {} families, exact (101 with the vertical d15 end read as 55)",
        counts[0], counts[1]
    ))
}

// ---- 2: 2-series against a log/exp-reversion oracle ----

type Coeffs = Vec<RationalPoly>;

/// `l_n = (1/2) Σ_{i<n} l_i v_{n-i}^{2^i}`, placed at `u^{2^n}`.
fn oracle_log(nmax: usize, trunc: usize) -> Coeffs {
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    let mut l = vec![RationalPoly::one()];
    while (1usize << l.len()) < trunc {
        let n = l.len();
        let mut s = RationalPoly::zero();
        for (i, li) in l.iter().enumerate() {
            if n - i <= nmax {
                s = s.add(&li.mul(&RationalPoly::v(n - i).pow(1 << i)));
            }
        }
        l.push(s.scale(&half));
    }
    let mut out = vec![RationalPoly::zero(); trunc];
    for (i, li) in l.into_iter().enumerate() {
        out[1 << i] = li;
    }
    out
}

fn series_mul(a: &Coeffs, b: &Coeffs) -> Coeffs {
    let n = a.len();
    let mut out = vec![RationalPoly::zero(); n];
    for (i, x) in a.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
        for (j, y) in b.iter().enumerate().take(n - i) {
            out[i + j] = out[i + j].add(&x.mul(y));
        }
    }
    out
}

/// Reverts `log([2]u) = 2 log u` coefficient by coefficient.
fn oracle_two_series(nmax: usize, trunc: usize) -> Coeffs {
    let l = oracle_log(nmax, trunc);
    let two = BigRational::from_integer(BigInt::from(2));
    let mut a = vec![RationalPoly::zero(); trunc];
    for j in 1..trunc {
        let mut got = vec![RationalPoly::zero(); trunc];
        let mut pw = a.clone();
        for lk in l.iter().skip(1) {
            for (g, p) in got.iter_mut().zip(&pw) {
                *g = g.add(&p.mul(lk));
            }
            pw = series_mul(&pw, &a);
        }
        a[j] = l[j].scale(&two).sub(&got[j]);
    }
    a
}

fn two_series_terms() -> Outcome {
    let mut seen = Vec::new();
    for n in 0..=3usize {
        let trunc = (1 << (n + 1)) + 2;
        let nmax = n.max(1);
        let modulus = if n == 0 { Modulus::None } else { Modulus::Ideal(n) };
        let want = if n == 0 { RationalPoly::integer(2) } else { RationalPoly::v(n) };
        let oracle = oracle_two_series(nmax, trunc);
        let engine = two_series(nmax, trunc, Modulus::None).map_err(|e| e.to_string())?;
        ensure(engine.coeffs() == &oracle[..], format!("[2](u) differs from the oracle at n = {n}"))?;
        let lowest = oracle
            .iter()
            .enumerate()
            .map(|(j, c)| (j, c.reduce(modulus).unwrap()))
            .find(|(_, c)| !c.is_zero())
            .ok_or("oracle series vanishes")?;
        ensure(lowest == (1 << n, want.clone()), format!("oracle lowest term at n = {n}: {lowest:?}"))?;
        let reduced = two_series(nmax, trunc, modulus).map_err(|e| e.to_string())?;
        ensure(reduced.lowest_term() == Some((1 << n, &want)), format!("engine lowest term at n = {n}"))?;
        seen.push(format!("{want}*u^{}", 1 << n));
    }
    Ok(format!("lowest terms {} at N = 2^(n+1)+2, equal to the oracle", seen.join(", ")))
}

// ---- 3: group law axioms ----

fn fgl_axioms() -> Outcome {
    let var = |i| MultiSeries::var(i, 3, 3, 12);
    let (x, y, z) = (var(0), var(1), var(2));
    let sum = |a: &MultiSeries, b: &MultiSeries| fgl_sum(a, b).map_err(|e| e.to_string());
    let zero = MultiSeries::zero(3, 3, 12);
    ensure(sum(&x, &zero)? == x && sum(&zero, &y)? == y, "unit")?;
    let xy = sum(&x, &y)?;
    ensure(xy == sum(&y, &x)?, "commutativity")?;
    ensure(sum(&xy, &z)? == sum(&x, &sum(&y, &z)?)?, "associativity")?;
    Ok(format!("unit, commutativity, associativity to order 12 with nmax 3 ({} terms in x +F y)", xy.len()))
}

// ---- 4: chains against pattern numbers ----

fn chains_vs_numbers() -> Outcome {
    let mut compared = 0;
    for k in 1..=64u64 {
        for (m, chain) in [(2 * k + 1, epsilon_chain(k)), (2 * k, delta_chain(k))] {
            let c = chain.map_err(|e| e.to_string())?;
            let mut starts: Vec<(u64, u32)> = c.starts.iter().zip(&c.levels).map(|(&s, &n)| (s as u64, n)).collect();
            starts.sort();
            ensure(starts == special_starts(m), format!("m = {m}: chain {starts:?} vs numbers {:?}", special_starts(m)))?;
            compared += starts.len();
        }
    }
    Ok(format!("{compared} start points agree for k <= 64 (odd and even m)"))
}

// ---- 5 and 6: Tate ranks and page checks ----

fn f2_rank(vs: &[Vec<u32>]) -> usize {
    let mut rows: Vec<BTreeSet<u32>> = Vec::new();
    for v in vs {
        let mut x: BTreeSet<u32> = v.iter().copied().collect();
        for r in &rows {
            let p = *r.iter().next_back().unwrap();
            if x.contains(&p) {
                x = x.symmetric_difference(r).copied().collect();
            }
        }
        if !x.is_empty() {
            rows.push(x);
            rows.sort_by_key(|r| std::cmp::Reverse(*r.iter().next_back().unwrap()));
        }
    }
    rows.len()
}

/// Recomputes every page from outside the engine: ranks of `d_r`, the rank
/// identity per cell, and `d∘d = 0` on untainted classes.
fn recheck(chart: &Chart, run: &PageRun) -> Result<usize, String> {
    let keys = chart.keys();
    let mut composites = 0;
    for (pi, page) in run.pages.iter().enumerate() {
        let next = run.pages.get(pi + 1).map(|p| &p.cells).unwrap_or(&run.e_inf);
        let ranks: Vec<usize> = page.d.iter().map(|d| f2_rank(d)).collect();
        ensure(ranks == page.rank_d, format!("rank of d_{}", page.r))?;
        for ci in 0..keys.len() {
            let into = chart.cell_index((keys[ci].0 + 1, keys[ci].1)).map_or(0, |s| ranks[s]);
            ensure(
                next[ci].rank() == page.cells[ci].rank() - ranks[ci] - into,
                format!("rank conservation at {:?} on page {}", keys[ci], page.r),
            )?;
            let Some(t) = chart.cell_index((keys[ci].0 - 1, keys[ci].1)) else { continue };
            for (j, img) in page.d[ci].iter().enumerate() {
                if page.cells[ci].tainted[j] || img.iter().any(|&k| page.cells[t].tainted[k as usize]) {
                    continue;
                }
                let mut acc = BTreeSet::new();
                for &k in img {
                    for &x in &page.d[t][k as usize] {
                        if !acc.remove(&x) {
                            acc.insert(x);
                        }
                    }
                }
                ensure(acc.is_empty(), format!("d_{0} d_{0} != 0 at {1:?}", page.r, keys[ci]))?;
                composites += 1;
            }
        }
    }
    Ok(composites)
}

const BOTTOMS: [Bottom; 7] = [
    Bottom::Infinity,
    Bottom::Finite(4),
    Bottom::Finite(5),
    Bottom::Finite(8),
    Bottom::Finite(9),
    Bottom::Finite(12),
    Bottom::Finite(13),
];

fn tate_runs() -> Result<Vec<(Bottom, Chart, PageRun)>, String> {
    BOTTOMS
        .iter()
        .map(|&b| {
            let chart = build_e1(Geometry::stunted(b), Window::tate(40, 48, 15)).map_err(|e| e.to_string())?;
            let table = differential_table(b, 40).map_err(|e| e.to_string())?;
            let book = RuleBook::from_table(&table, 40).map_err(|e| e.to_string())?;
            let run = run_pages(&chart, &book, MAX_PAGE, Parallelism::Parallel).map_err(|e| e.to_string())?;
            Ok((b, chart, run))
        })
        .collect()
}

fn tate_convergence(runs: &[(Bottom, Chart, PageRun)]) -> Outcome {
    let mut safe_total = 0;
    for (b, chart, run) in runs {
        ensure(run.complete, format!("{b:?}: run incomplete"))?;
        let rep = tate_rank_check(chart, run, default_safe_range(chart)).map_err(|e| e.to_string())?;
        let bottom = b.cell() as i64;
        for d in rep.degrees.iter().filter(|d| d.safe) {
            let want = (d.dimension >= bottom) as usize;
            ensure(d.verdict == Verdict::Pass && d.reliable == want, format!("{b:?}: degree {} has rank {}", d.dimension, d.reliable))?;
            safe_total += 1;
        }
        ensure(rep.passed(), format!("{b:?}: tate check failed"))?;
    }
    Ok(format!("rank 1 from the bottom cell, 0 below, on {safe_total} safe degrees over 7 spaces (u <= 40)"))
}

fn page_checks(runs: &[(Bottom, Chart, PageRun)]) -> Outcome {
    let (mut pages, mut composites) = (0, 0);
    for (b, chart, run) in runs {
        ensure(run.checks.ok(), format!("{b:?}: engine checks {:?}", run.checks))?;
        composites += recheck(chart, run)?;
        pages += run.pages.len();
    }
    Ok(format!("{pages} pages: d^2 = 0 on {composites} composites, rank conservation in every cell"))
}

// ---- 7: lemma suite ----

fn lemma() -> Outcome {
    let r = lemma_suite(20240601, 100);
    ensure(r.all_passed(), format!("{}/{} instances", r.passed(), r.instances.len()))?;
    let finite = r.instances.iter().filter(|i| i.finite).count();
    Ok(format!("{}/100 squares ({finite} finite): exactness and completeness hold", r.passed()))
}

// ---- 8: spanning ----

fn grid(r: i64) -> Vec<(i64, i64)> {
    (-r..=r).flat_map(|k| (-r..=r).map(move |l| (k, l))).collect()
}

fn spans(reports: &[DegreeReport], what: &str) -> Result<usize, String> {
    for r in reports {
        ensure(r.consistent(), format!("{what}: spanning fails at {:?}", r.degree))?;
    }
    Ok(reports.iter().filter(|r| !r.indeterminate).count())
}

fn spanning() -> Outcome {
    let mode = Parallelism::Parallel;
    let err = |e: realcob_core::Error| e.to_string();
    let w = AssemblyWindow::default();
    let toy = assemble_diagonal(&ToyTable, &grid(4), &w, None, mode).map_err(err)?;
    let mut toy_n = spans(&toy, "toy diagonal")?;
    ensure(toy_n == toy.len(), "toy table has undetermined degrees")?;
    for m in 1..=6 {
        toy_n += spans(&assemble_offdiagonal_table(&ToyTable, m, &grid(4), &w, mode).map_err(err)?, "toy off-diagonal")?;
    }
    let bundled = BundledTable::new(BundledTable::default_window(), mode).map_err(err)?;
    let dw = AssemblyWindow { below: 1, above: 2, b_weight: 2 };
    let mut bundled_n = 0;
    for s in 0..=2 {
        bundled_n += spans(&assemble_diagonal(&bundled.at_layer(s), &grid(3), &dw, Some(s), mode).map_err(err)?, "bundled diagonal")?;
    }
    let ow = AssemblyWindow { below: 1, above: 3, b_weight: 2 };
    for m in [3, 4] {
        let ctx = OffDiagonalCharts::new(m, ow, bundled.clone(), OffDiagonalCharts::default_chart_window(), mode).map_err(err)?;
        bundled_n += spans(&assemble_offdiagonal(&ctx, &grid(3), &[0, 1, 2], mode).map_err(err)?, "bundled off-diagonal")?;
    }
    ensure(bundled_n > 0, "no bundled degree was determined")?;
    Ok(format!("images span the corner in {toy_n} toy and {bundled_n} bundled degrees with complete data"))
}

// ---- 9: b_k homogeneity ----

fn b_homogeneity() -> Outcome {
    let mut terms = 0;
    for k in 0..=6 {
        let b = b_image(k, 3, 8).map_err(|e| e.to_string())?;
        ensure(b.check_homogeneous(RODegree::b(k), Convention::Diagonal).is_ok(), format!("b_{k}"))?;
        terms += b.terms().count();
    }
    Ok(format!("b_0..b_6 homogeneous of degree k(1 + ga), {terms} monomials"))
}

// ---- 10: selftest determinism ----

fn determinism() -> Outcome {
    let run = |threads: Option<&str>| -> Result<Vec<u8>, String> {
        let mut c = Command::new(env!("CARGO_BIN_EXE_realcob"));
        c.args(["selftest", "--seed", "2024"]);
        if let Some(t) = threads {
            c.env("REALCOB_THREADS", t);
        }
        let o = c.output().map_err(|e| e.to_string())?;
        ensure(o.status.success(), format!("selftest exited {:?}", o.status.code()))?;
        Ok(o.stdout)
    };
    let a = run(None)?;
    ensure(a == run(None)?, "two runs differ")?;
    ensure(a == run(Some("1"))?, "REALCOB_THREADS=1 changes the report")?;
    Ok(format!("{} identical bytes across three runs", a.len()))
}

fn main() -> ExitCode {
    let mut failed = 0;
    let mut report = |n: u32, limit: Option<f64>, f: &mut dyn FnMut() -> Outcome| {
        let t = Instant::now();
        let res = f();
        let secs = t.elapsed().as_secs_f64();
        let res = match (res, limit) {
            (Ok(_), Some(l)) if secs >= l => Err(format!("took {secs:.2}s, limit {l}s")),
            (r, _) => r,
        };
        let (verdict, detail) = match &res {
            Ok(d) => ("PASS", d.clone()),
            Err(e) => ("FAIL", e.clone()),
        };
        let limit = limit.map_or("-".to_string(), |l| format!("<{l}s"));
        println!("criterion {n:2}  {verdict}  {secs:7.2}s ({limit:>5})  {detail}");
        if res.is_err() {
            failed += 1;
        }
    };
    report(1, Some(1.0), &mut golden_tables);
    report(2, Some(5.0), &mut two_series_terms);
    report(3, Some(30.0), &mut fgl_axioms);
    report(4, Some(5.0), &mut chains_vs_numbers);
    let mut runs: Option<Vec<(Bottom, Chart, PageRun)>> = None;
    report(5, Some(60.0), &mut || {
        let r = runs.insert(tate_runs()?);
        tate_convergence(r)
    });
    report(6, None, &mut || page_checks(runs.as_deref().ok_or("no charts from criterion 5")?));
    report(7, Some(10.0), &mut lemma);
    report(8, Some(30.0), &mut spanning);
    report(9, Some(1.0), &mut b_homogeneity);
    report(10, None, &mut determinism);
    println!("{} of 10 criteria passed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
