//! Seeded random filtered squares for exercising the filtered pullback and
//! the universal property of the fiber product.
//!
//! Groups are direct sums of cyclic 2-groups (and `Z` unless the instance is
//! finite); maps are random subject to respecting the relations. `C` is
//! built as `D ⊕ C'` with `g = [id | g']` so the square is co-cartesian, and
//! the filtration on `D` is defined as `f(F^i B) + g(F^i C)`.

use super::filtered::{filtered_pullback, FilteredAbelianGroup, LemmaCertificate};
use super::group::{fiber_product, Presented};
use super::snf::{solve, IntMatrix};
use crate::error::Result;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug)]
pub struct RandomSquare {
    pub b: FilteredAbelianGroup,
    pub c: FilteredAbelianGroup,
    pub d: FilteredAbelianGroup,
    pub f: IntMatrix,
    pub g: IntMatrix,
    /// Cyclic orders of the generators (`0` for `Z`).
    pub orders_b: Vec<u64>,
    pub orders_c: Vec<u64>,
    pub orders_d: Vec<u64>,
}

impl RandomSquare {
    pub fn is_finite(&self) -> bool {
        [&self.orders_b, &self.orders_c, &self.orders_d].iter().all(|o| o.iter().all(|&x| x != 0))
    }
}

/// Shape limits for random instances.
#[derive(Clone, Copy, Debug)]
pub struct Shape {
    pub max_b: usize,
    pub max_d: usize,
    pub max_extra_c: usize,
    pub max_exponent: u32,
    pub max_depth: usize,
    pub finite: bool,
}

impl Shape {
    pub fn finite_small() -> Shape {
        Shape { max_b: 2, max_d: 2, max_extra_c: 1, max_exponent: 3, max_depth: 4, finite: true }
    }

    pub fn mixed() -> Shape {
        Shape { max_b: 3, max_d: 3, max_extra_c: 2, max_exponent: 3, max_depth: 4, finite: false }
    }
}

fn random_orders(rng: &mut ChaCha8Rng, n: usize, shape: &Shape) -> Vec<u64> {
    (0..n)
        .map(|_| if !shape.finite && rng.gen_ratio(1, 4) { 0 } else { 1u64 << rng.gen_range(1..=shape.max_exponent) })
        .collect()
}

/// Entry `x` of a map `Z/s -> Z/t` (orders, `0` for `Z`) is allowed iff
/// `s x ≡ 0 mod t`.
fn random_entry(rng: &mut ChaCha8Rng, s: u64, t: u64) -> i64 {
    match (s, t) {
        (0, 0) => rng.gen_range(-2..=2),
        (0, t) => rng.gen_range(0..t as i64),
        (_, 0) => 0,
        (s, t) => {
            let step = t / s.gcd(&t);
            step as i64 * rng.gen_range(0..(t / step).max(1) as i64)
        }
    }
}

fn random_map(rng: &mut ChaCha8Rng, src: &[u64], tgt: &[u64]) -> IntMatrix {
    let rows: Vec<Vec<i64>> = tgt.iter().map(|&t| src.iter().map(|&s| random_entry(rng, s, t)).collect()).collect();
    IntMatrix::from_rows(&rows, src.len())
}

/// Diagonal filtration: generator `j` contributes `2^{c_j i} e_j` to `F^i`
/// while `i < t_j`.
fn random_filtration(rng: &mut ChaCha8Rng, n: usize, depth: usize) -> Vec<IntMatrix> {
    let drops: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=depth)).collect();
    let steps: Vec<u32> = (0..n).map(|_| rng.gen_range(0..=1)).collect();
    (0..depth)
        .map(|i| {
            let cols: Vec<Vec<BigInt>> = (0..n)
                .filter(|&j| i < drops[j])
                .map(|j| {
                    let mut c = vec![BigInt::zero(); n];
                    c[j] = BigInt::from(1u64 << (steps[j] * i as u32));
                    c
                })
                .collect();
            IntMatrix::from_cols(&cols, n)
        })
        .collect()
}

pub fn random_square(rng: &mut ChaCha8Rng, shape: &Shape) -> Result<RandomSquare> {
    let nb = rng.gen_range(1..=shape.max_b);
    let nd = rng.gen_range(1..=shape.max_d);
    let ne = rng.gen_range(0..=shape.max_extra_c);
    let depth = rng.gen_range(1..=shape.max_depth);
    let orders_b = random_orders(rng, nb, shape);
    let orders_d = random_orders(rng, nd, shape);
    let extra = random_orders(rng, ne, shape);
    let mut orders_c = orders_d.clone();
    orders_c.extend(&extra);
    let f = random_map(rng, &orders_b, &orders_d);
    let g = IntMatrix::identity(nd).hcat(&random_map(rng, &extra, &orders_d));
    let gb = Presented::cyclic(&orders_b);
    let gc = Presented::cyclic(&orders_c);
    let gd = Presented::cyclic(&orders_d);
    let b = FilteredAbelianGroup::new(gb, random_filtration(rng, nb, depth))?;
    let c = FilteredAbelianGroup::new(gc, random_filtration(rng, nd + ne, depth))?;
    let d_levels = (0..depth).map(|i| f.mul(&b.level(i)).hcat(&g.mul(&c.level(i)))).collect();
    let d = FilteredAbelianGroup::new(gd, d_levels)?;
    Ok(RandomSquare { b, c, d, f, g, orders_b, orders_c, orders_d })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceReport {
    pub index: usize,
    pub finite: bool,
    pub a: String,
    pub depth: usize,
    pub certificate: Option<LemmaCertificate>,
    pub error: Option<String>,
}

impl InstanceReport {
    pub fn passed(&self) -> bool {
        self.certificate.as_ref().is_some_and(|c| c.holds())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub instances: Vec<InstanceReport>,
}

impl SuiteReport {
    pub fn passed(&self) -> usize {
        self.instances.iter().filter(|i| i.passed()).count()
    }

    pub fn all_passed(&self) -> bool {
        self.passed() == self.instances.len()
    }
}

/// `count` random instances; even indices are finite, odd ones may carry
/// free summands.
pub fn lemma_suite(seed: u64, count: usize) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut instances = Vec::with_capacity(count);
    for index in 0..count {
        let shape = if index % 2 == 0 { Shape::finite_small() } else { Shape::mixed() };
        let report = match random_square(&mut rng, &shape) {
            Ok(sq) => match filtered_pullback(&sq.b, &sq.c, &sq.d, &sq.f, &sq.g) {
                Ok(fp) => InstanceReport {
                    index,
                    finite: sq.is_finite(),
                    a: fp.a.canonical().to_string(),
                    depth: sq.d.depth(),
                    certificate: Some(fp.certificate),
                    error: None,
                },
                Err(e) => InstanceReport {
                    index,
                    finite: sq.is_finite(),
                    a: String::new(),
                    depth: sq.d.depth(),
                    certificate: None,
                    error: Some(e.to_string()),
                },
            },
            Err(e) => InstanceReport { index, finite: false, a: String::new(), depth: 0, certificate: None, error: Some(e.to_string()) },
        };
        instances.push(report);
    }
    SuiteReport { seed, instances }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeReport {
    pub seed: u64,
    pub checks: usize,
    pub factored: usize,
    pub unique: usize,
}

impl ConeReport {
    pub fn all_passed(&self) -> bool {
        self.factored == self.checks && self.unique == self.checks
    }
}

/// Universal property: for random `p: Z^k -> B`, `q: Z^k -> C` with
/// `f p = g q`, find `h: Z^k -> A` with `π_B h = p`, `π_C h = q`, and check
/// that `A -> B ⊕ C` is injective so `h` is unique.
pub fn cone_suite(seed: u64, count: usize) -> Result<ConeReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut factored = 0;
    let mut unique = 0;
    for index in 0..count {
        let shape = if index % 2 == 0 { Shape::finite_small() } else { Shape::mixed() };
        let sq = random_square(&mut rng, &shape)?;
        let (b, c, d) = (&sq.b.group, &sq.c.group, &sq.d.group);
        let pb = fiber_product(b, c, d, &sq.f, &sq.g)?;
        let nd = sq.orders_d.len();
        let extra = &sq.orders_c[nd..];
        let g_extra = sq.g.select_cols(nd..sq.g.cols());
        let k = rng.gen_range(1..=3);
        let mut ok = true;
        for _ in 0..k {
            // q is built from p alone, without reference to the pullback
            let p: Vec<BigInt> = sq.orders_b.iter().map(|_| BigInt::from(rng.gen_range(-4..=4))).collect();
            let cp: Vec<BigInt> = extra.iter().map(|_| BigInt::from(rng.gen_range(-4..=4))).collect();
            let fp = sq.f.mul_vec(&p);
            let gp = g_extra.mul_vec(&cp);
            let mut q: Vec<BigInt> = fp.iter().zip(&gp).map(|(x, y)| x - y).collect();
            q.extend(cp);
            let diff: Vec<BigInt> = sq.f.mul_vec(&p).iter().zip(sq.g.mul_vec(&q)).map(|(x, y)| x - y).collect();
            if !d.is_zero(&diff) {
                ok = false;
                break;
            }
            let mut pq = p.clone();
            pq.extend(q.iter().cloned());
            let bc_rel = b.direct_sum(c).relations;
            let Some(sol) = solve(&pb.basis.hcat(&bc_rel), &pq) else {
                ok = false;
                break;
            };
            let h = &sol[..pb.basis.cols()];
            let hb: Vec<BigInt> = pb.to_b.mul_vec(h).iter().zip(&p).map(|(x, y)| x - y).collect();
            let hc: Vec<BigInt> = pb.to_c.mul_vec(h).iter().zip(&q).map(|(x, y)| x - y).collect();
            if !b.is_zero(&hb) || !c.is_zero(&hc) {
                ok = false;
                break;
            }
        }
        if ok {
            factored += 1;
        }
        let exact = super::group::short_exact(
            &pb.group.presentation,
            &pb.inclusion(),
            &b.direct_sum(c),
            &sq.f.hcat(&sq.g.neg()),
            d,
        );
        if exact.injective {
            unique += 1;
        }
    }
    Ok(ConeReport { seed, checks: count, factored, unique })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_instances() {
        let a = lemma_suite(7, 6);
        let b = lemma_suite(7, 6);
        assert_eq!(a, b);
    }

    #[test]
    fn small_suite_passes() {
        let r = lemma_suite(1, 10);
        for i in &r.instances {
            assert!(i.passed(), "{i:?}");
        }
        assert!(r.instances.iter().any(|i| !i.finite));
    }

    #[test]
    fn cones_factor() {
        let r = cone_suite(3, 10).unwrap();
        assert!(r.all_passed(), "{r:?}");
    }

    #[test]
    fn maps_respect_relations() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let sq = random_square(&mut rng, &Shape::mixed()).unwrap();
            assert!(super::super::group::check_map(&sq.f, &sq.b.group, &sq.d.group).is_ok());
            assert!(super::super::group::check_map(&sq.g, &sq.c.group, &sq.d.group).is_ok());
        }
    }
}
