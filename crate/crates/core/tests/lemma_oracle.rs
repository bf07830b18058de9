//! Filtered pullbacks of finite random squares against element enumeration.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use realcob_core::homalg::{
    cone_suite, filtered_pullback, lemma_suite, random_square, FilteredAbelianGroup, IntMatrix, RandomSquare, Shape,
};
use std::collections::HashSet;
use std::time::Instant;

type Elem = Vec<u64>;

fn all_elements(orders: &[u64]) -> Vec<Elem> {
    let mut out = vec![vec![]];
    for &o in orders {
        out = out.into_iter().flat_map(|e| (0..o).map(move |x| [e.clone(), vec![x]].concat())).collect();
    }
    out
}

fn reduce(v: &[BigInt], orders: &[u64]) -> Elem {
    v.iter()
        .zip(orders)
        .map(|(x, &o)| {
            let o = BigInt::from(o);
            (((x % &o) + &o) % &o).to_u64().unwrap()
        })
        .collect()
}

fn apply(m: &IntMatrix, x: &Elem, tgt: &[u64]) -> Elem {
    let v: Vec<BigInt> = x.iter().map(|&a| BigInt::from(a)).collect();
    reduce(&m.mul_vec(&v), tgt)
}

/// Subgroup generated by the columns of `gens`, by closure.
fn span(gens: &IntMatrix, orders: &[u64]) -> HashSet<Elem> {
    let cols: Vec<Elem> = (0..gens.cols()).map(|j| reduce(&gens.col(j), orders)).collect();
    let mut seen: HashSet<Elem> = HashSet::new();
    let zero = vec![0; orders.len()];
    let mut stack = vec![zero.clone()];
    seen.insert(zero);
    while let Some(x) = stack.pop() {
        for c in &cols {
            let y: Elem = x.iter().zip(c).zip(orders).map(|((a, b), o)| (a + b) % o).collect();
            if seen.insert(y.clone()) {
                stack.push(y);
            }
        }
    }
    seen
}

fn level_set(g: &FilteredAbelianGroup, i: usize, orders: &[u64]) -> HashSet<Elem> {
    span(&g.level(i), orders)
}

struct Counts {
    a: usize,
    levels: Vec<usize>,
    torsion: Vec<usize>,
}

fn brute_force(sq: &RandomSquare, depth: usize) -> Counts {
    let bs = all_elements(&sq.orders_b);
    let cs = all_elements(&sq.orders_c);
    let fb: Vec<Elem> = bs.iter().map(|b| apply(&sq.f, b, &sq.orders_d)).collect();
    let gc: Vec<Elem> = cs.iter().map(|c| apply(&sq.g, c, &sq.orders_d)).collect();
    let mut pairs = Vec::new();
    for (i, x) in fb.iter().enumerate() {
        for (j, y) in gc.iter().enumerate() {
            if x == y {
                pairs.push((i, j));
            }
        }
    }
    let levels = (0..=depth)
        .map(|l| {
            let fbl = level_set(&sq.b, l, &sq.orders_b);
            let fcl = level_set(&sq.c, l, &sq.orders_c);
            pairs.iter().filter(|(i, j)| fbl.contains(&bs[*i]) && fcl.contains(&cs[*j])).count()
        })
        .collect();
    let killed_by = |k: u32| {
        pairs
            .iter()
            .filter(|(i, j)| {
                let t = 1u64 << k;
                bs[*i].iter().zip(&sq.orders_b).all(|(x, o)| (x * t).is_multiple_of(*o))
                    && cs[*j].iter().zip(&sq.orders_c).all(|(x, o)| (x * t).is_multiple_of(*o))
            })
            .count()
    };
    Counts { a: pairs.len(), levels, torsion: (0..4).map(killed_by).collect() }
}

fn order(p: &realcob_core::homalg::Presented) -> usize {
    p.canonical().order().expect("finite").to_usize().unwrap()
}

#[test]
fn finite_pullbacks_match_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut checked = 0;
    for _ in 0..40 {
        let sq = random_square(&mut rng, &Shape::finite_small()).unwrap();
        let fp = filtered_pullback(&sq.b, &sq.c, &sq.d, &sq.f, &sq.g).unwrap();
        let depth = sq.d.depth().max(sq.b.depth()).max(sq.c.depth());
        let bf = brute_force(&sq, depth);
        let a = fp.a.canonical();
        assert_eq!(a.order().unwrap().to_usize().unwrap(), bf.a);
        for (k, &n) in bf.torsion.iter().enumerate() {
            let t = 1u64 << k;
            let engine: u64 = a.summands_u64().iter().map(|&o| o.min(t)).product();
            assert_eq!(engine as usize, n, "elements killed by 2^{k} in {a}");
        }
        for (i, &n) in bf.levels.iter().enumerate() {
            assert_eq!(order(&fp.a.level_group(i).0), n, "|F^{i}A|");
            if i + 1 < bf.levels.len() {
                assert_eq!(order(&fp.a.graded_piece(i).0) * bf.levels[i + 1], n, "|E_0^{i}A|");
            }
        }
        // 0 -> A -> B + C -> D -> 0 forces |A||D| = |B||C|.
        let size = |o: &[u64]| o.iter().product::<u64>() as usize;
        assert_eq!(bf.a * size(&sq.orders_d), size(&sq.orders_b) * size(&sq.orders_c));
        assert!(fp.certificate.holds());
        checked += 1;
    }
    assert_eq!(checked, 40);
}

#[test]
fn hundred_instance_suite_holds() {
    let t = Instant::now();
    let report = lemma_suite(20240601, 100);
    let elapsed = t.elapsed();
    let failed: Vec<_> = report.instances.iter().filter(|i| !i.passed()).collect();
    assert!(failed.is_empty(), "{failed:?}");
    assert!(report.instances.iter().any(|i| !i.finite));
    assert!(elapsed.as_secs_f64() < 10.0, "{elapsed:?}");
}

#[test]
fn fifty_cones_factor_uniquely() {
    let r = cone_suite(99, 50).unwrap();
    assert_eq!(r.checks, 50);
    assert!(r.all_passed(), "{r:?}");
}
