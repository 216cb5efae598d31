use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qpip::bttree::{preduce, step_toward, P1Point, PReductionStructure, TreeVertex};
use qpip::ideals::{local_right_ideal, random_singular_upper, RightIdeal, SplittingMap};
use qpip::localring::LocalMat;
use qpip::quat::{maximal_order, Order, QuatAlgebra, QuatElement};
use qpip::units::{is_transitive, pbuild, CompactRep};

fn big(n: i64) -> BigInt {
    BigInt::from(n)
}

fn order(a: i64, b: i64) -> Arc<Order> {
    let alg = Arc::new(QuatAlgebra::new(a, b).unwrap());
    Arc::new(maximal_order(alg).unwrap())
}

fn mat(p: i64, k: u32, e: [i64; 4]) -> LocalMat {
    LocalMat::from_i64(p, k, e)
}

#[test]
fn distances_to_the_base_vertex() {
    let d = |m: LocalMat| TreeVertex::new(&m).unwrap().distance_to_base().unwrap();
    assert_eq!(d(mat(2, 4, [1, 0, 0, 1])), 0);
    assert_eq!(d(mat(2, 4, [2, 0, 0, 1])), 1);
    assert_eq!(d(mat(2, 5, [8, 0, 0, 1])), 3);
    // content is removed: 2·diag(4,1) sits at distance 2
    assert_eq!(d(mat(2, 5, [8, 0, 0, 2])), 2);
    // det divisible by the whole modulus
    assert!(TreeVertex::new(&mat(2, 3, [8, 0, 0, 1])).is_err());
}

#[test]
fn neighbor_labels() {
    let o = order(3, -1);
    let s = pbuild(&o, &big(5)).unwrap();
    // diag(p,1): column space spanned by (0,1)ᵀ, labelled (0 : 1)
    let q = TreeVertex::new(&mat(5, 3, [5, 0, 0, 1])).unwrap();
    assert_eq!(step_toward(0, &q, &s).unwrap(), P1Point::from_index(5, 5));
    // distance one: the label of the vertex itself
    let q = TreeVertex::new(&mat(5, 3, [1, 0, 3, 5])).unwrap();
    assert_eq!(q.first_step().unwrap(), P1Point::from_index(3, 5));
    // deeper along the same ray
    let q = TreeVertex::new(&mat(5, 4, [1, 0, 3, 125])).unwrap();
    assert_eq!(q.distance_to_base().unwrap(), 3);
    assert_eq!(step_toward(0, &q, &s).unwrap(), P1Point::from_index(3, 5));
    assert!(step_toward(0, &TreeVertex::new(&mat(5, 3, [1, 0, 0, 1])).unwrap(), &s).is_err());
}

#[test]
fn vertex_classes() {
    let a = TreeVertex::new(&mat(3, 4, [3, 0, 0, 1])).unwrap();
    let b = TreeVertex::new(&mat(3, 4, [3, 3, 0, 1])).unwrap();
    let c = TreeVertex::new(&mat(3, 4, [1, 0, 0, 3])).unwrap();
    assert!(a.same_class(&b).unwrap());
    assert!(!a.same_class(&c).unwrap());
    // the determinant-one change of basis [[1,1],[0,1]] on the right fixes the class
    let m = mat(3, 4, [1, 2, 6, 9]);
    let u = mat(3, 4, [1, 1, 0, 1]);
    let x = TreeVertex::new(&m).unwrap();
    let y = TreeVertex::new(&m.mul(&u)).unwrap();
    assert!(x.same_class(&y).unwrap());
}

fn check_structure(o: &Arc<Order>, s: &PReductionStructure) {
    let alg = o.alg();
    let p = s.p_u64();
    assert_eq!(s.table(0).len() as u64, p + 1);
    assert_eq!(s.table(1).len() as u64, p + 1);
    s.verify().unwrap();
    for side in 0..2 {
        let mats: Vec<LocalMat> = s.generators(side).iter().map(|g| s.action(side, g).unwrap()).collect();
        assert!(is_transitive(&mats, p));
        for g in s.generators(side) {
            assert!(g.nrd(alg).abs().is_one());
        }
    }
    // the target entries are trivial
    assert!(s.entry(0, s.target(0)).word.is_empty());
    assert!(s.entry(1, s.target(1)).word.is_empty());
    // x₁ has norm p and P₁ is adjacent to P₀
    let n = alg.nrd(s.x1());
    assert_eq!(qpip::arith::rat_valuation(&n, s.p()), 1);
    assert_eq!(s.i1().norm_int(), Some(s.p().clone()));
}

fn expanded_small(g: &CompactRep, alg: &QuatAlgebra) -> Option<QuatElement> {
    g.expand(alg, 300).ok()
}

#[test]
fn reduction_structures_for_the_example_algebra() {
    let o = order(3, -1);
    let alg = o.alg();
    for p in [5i64, 7, 11, 13] {
        let s = pbuild(&o, &big(p)).unwrap();
        check_structure(&o, &s);
        for g in s.generators(0) {
            if let Some(x) = expanded_small(g, alg) {
                assert!(o.contains(&x));
            }
        }
        for g in s.generators(1) {
            if let Some(x) = expanded_small(g, alg) {
                assert!(s.o1().contains(&x), "side-1 unit outside O₁ at p = {p}");
            }
        }
    }
}

fn ideal_of(o: &Arc<Order>, n: &BigInt, c: [i64; 4]) -> Option<RightIdeal> {
    let x = o.from_coords(&c.map(BigInt::from));
    RightIdeal::from_generators(o.clone(), &[x, QuatElement::integer(n.clone())]).ok()
}

// a local ideal of norm p^e at p, met with a random ideal of norm prime to p
fn random_ideal(o: &Arc<Order>, map: &SplittingMap, rng: &mut ChaCha8Rng) -> Option<RightIdeal> {
    let p = map.p().clone();
    let e = rng.gen_range(0..=6u32);
    let local = if e == 0 {
        RightIdeal::unit(o.clone())
    } else {
        let m = random_singular_upper(&p, e, rng);
        local_right_ideal(&map.at_precision(e).unwrap(), &m).ok()?
    };
    let mut n = big(rng.gen_range(1..40));
    while (&n % &p) == big(0) {
        n /= &p;
    }
    let c = [0; 4].map(|_| rng.gen_range(-30i64..30));
    let other = ideal_of(o, &n, c)?;
    RightIdeal::from_lattice(o.clone(), local.lattice().intersect(other.lattice())).ok()
}

fn check_preduce(i: &RightIdeal, s: &PReductionStructure) -> u32 {
    let p = s.p();
    let out = preduce(i, s).unwrap();
    let k = out.j.norm_valuation(p);
    assert!(k == 0 || k == 1, "valuation {k} left");
    assert!(out.j.is_integral());
    let cj = out.c.mul_cr(i).unwrap();
    let jp = out.j.scale(&BigRational::from_integer(p.pow(out.r)));
    assert_eq!(cj, jp, "c·I ≠ J·p^r");
    for (k, d) in &out.trace {
        assert_eq!(k, d);
    }
    assert!(out.c.nrd(i.alg()).abs().is_one());
    out.trace.len() as u32
}

#[test]
fn example_preduce() {
    let o = order(3, -1);
    let s = pbuild(&o, &big(7)).unwrap();
    let j = RightIdeal::from_generators(
        o.clone(),
        &[QuatElement::from_ints([49, 0, 0, 0]), QuatElement::from_ints([-17, -8, 1, 0])],
    )
    .unwrap();
    assert_eq!(j.norm_int(), Some(big(49)));
    let out = preduce(&j, &s).unwrap();
    assert_eq!(out.r, 1);
    assert_eq!(out.j.norm_valuation(&big(7)), 0);
    assert!(out.j.is_unit() || out.j.norm_int() == Some(BigInt::one()));
    check_preduce(&j, &s);
    // p·O reduces to O with r = 1 and a trivial unit
    let po = RightIdeal::unit(o.clone()).scale(&BigRational::from_integer(big(7)));
    let out = preduce(&po, &s).unwrap();
    assert_eq!(out.r, 1);
    assert!(out.j.is_unit());
    assert!(out.c.is_trivial());
}

#[test]
fn random_preduce_runs() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (a, b, p) in [(3i64, -1i64, 5i64), (3, -1, 7), (-1, 7, 3), (2, 5, 3), (2, 5, 7)] {
        let o = order(a, b);
        let s = pbuild(&o, &big(p)).unwrap();
        check_structure(&o, &s);
        let mut done = 0;
        let mut looped = 0;
        while done < 12 {
            let Some(i) = random_ideal(&o, s.map(), &mut rng) else { continue };
            let v = i.norm_valuation(&big(p));
            if !(0..=6).contains(&v) {
                continue;
            }
            let rounds = check_preduce(&i, &s);
            assert!(rounds as i64 <= v.max(1));
            if rounds > 1 {
                looped += 1;
            }
            done += 1;
        }
        assert!(looped > 0, "no reduction loop exercised for ({a},{b}) at {p}");
    }
}
