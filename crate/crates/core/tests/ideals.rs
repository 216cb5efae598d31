use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qpip::arith::{factor_integer, rat_valuation};
use qpip::ideals::{
    ideal_is_smooth, local_left_ideal, random_left_ideal, random_prime_norm_ideal, smooth_exponents, RightIdeal,
    SplittingMap, TwoSidedIdeal,
};
use qpip::linalg::IntLattice;
use qpip::localring::{local_generator, LocalMat};
use qpip::quat::{maximal_order, Order, QuatAlgebra, QuatElement};

fn big(n: i64) -> BigInt {
    BigInt::from(n)
}

fn example_order() -> Arc<Order> {
    let alg = Arc::new(QuatAlgebra::new(3, -1).unwrap());
    Arc::new(maximal_order(alg).unwrap())
}

fn el(c: [i64; 4]) -> QuatElement {
    QuatElement::from_ints(c)
}

fn ideal_i(o: &Arc<Order>) -> RightIdeal {
    RightIdeal::from_generators(o.clone(), &[el([19, 0, 0, 0]), el([-3, -4, 1, 0])]).unwrap()
}

fn ideal_j(o: &Arc<Order>) -> RightIdeal {
    RightIdeal::from_generators(o.clone(), &[el([49, 0, 0, 0]), el([-17, -8, 1, 0])]).unwrap()
}

// gcd of the norm form on a basis: q(b_i) and the polar values
fn norm_gcd(i: &RightIdeal) -> BigRational {
    let alg = i.alg();
    let b = i.basis();
    let mut vals = Vec::new();
    for x in &b {
        vals.push(alg.nrd(x));
    }
    for s in 0..4 {
        for t in (s + 1)..4 {
            vals.push(alg.nrd(&b[s].add(&b[t])) - alg.nrd(&b[s]) - alg.nrd(&b[t]));
        }
    }
    let den = vals.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let g = vals.iter().fold(BigInt::zero(), |acc, v| acc.gcd(&(v * BigRational::from_integer(den.clone())).to_integer()));
    BigRational::new(g, den)
}

#[test]
fn generated_ideals_and_norms() {
    let o = example_order();
    let unit = RightIdeal::from_generators(o.clone(), &[QuatElement::one()]).unwrap();
    assert!(unit.is_unit());
    assert_eq!(unit.norm(), &BigRational::one());
    let i = ideal_i(&o);
    assert_eq!(i.norm_int(), Some(big(19)));
    assert_eq!(norm_gcd(&i), BigRational::from_integer(big(19)));
    let j = ideal_j(&o);
    assert_eq!(j.norm_int(), Some(big(49)));
    assert_eq!(norm_gcd(&j), BigRational::from_integer(big(49)));
    assert!(i.is_integral() && j.is_integral());
}

#[test]
fn products_inverses_and_conjugates() {
    let o = example_order();
    let unit = RightIdeal::unit(o.clone());
    assert!(unit.mul(&unit).unwrap().is_unit());
    assert!(unit.inverse().is_unit());
    let i = ideal_i(&o);
    let ol = i.left_order();
    assert_eq!(i.mul(&i.inverse()).unwrap().lattice(), ol.lattice());
    assert_eq!(&i.alg().lattice_mul(i.inverse().lattice(), i.lattice()), o.lattice());
    let ic = i.mul(&i.conj()).unwrap();
    assert_eq!(ic.lattice(), &ol.lattice().scale(&BigRational::from_integer(big(19))));
    // J̄ has left order O, so I·J̄ is defined
    let j = ideal_j(&o);
    let ij = i.mul(&j.conj()).unwrap();
    assert_eq!(ij.norm_int(), Some(big(19 * 49)));
    assert_eq!(norm_gcd(&ij), BigRational::from_integer(big(19 * 49)));
    assert!(j.mul(&i).is_err());
}

#[test]
fn two_sided_parts() {
    let o = example_order();
    let alg = o.alg();
    let five = RightIdeal::from_generators(o.clone(), &[QuatElement::integer(5)]).unwrap();
    let (c, j) = five.two_sided_generated().unwrap();
    assert_eq!(c, TwoSidedIdeal::scalar(BigRational::from_integer(big(5))));
    assert!(j.is_unit());

    let p2 = TwoSidedIdeal::new(BigRational::one(), [big(2)]);
    let lat = p2.lattice(&o);
    assert_eq!(alg.lattice_mul(&lat, &lat), o.lattice().scale(&BigRational::from_integer(big(2))));
    let p2i = RightIdeal::from_lattice(o.clone(), lat.clone()).unwrap();
    assert_eq!(p2i.norm_int(), Some(big(2)));
    let (c, j) = p2i.two_sided_generated().unwrap();
    assert_eq!(c, p2);
    assert!(j.is_unit());

    let i = ideal_i(&o);
    let (c, j) = i.two_sided_generated().unwrap();
    assert!(c.is_one());
    assert_eq!(j, i);

    // round trip on a product with a two-sided factor
    let p3 = TwoSidedIdeal::new(BigRational::from_integer(big(7)), [big(3)]);
    let k = i.mul_two_sided(&p3);
    let (c, j) = k.two_sided_generated().unwrap();
    assert_eq!(c, p3);
    assert_eq!(j, i);
    assert_eq!(j.mul_two_sided(&c), k);
}

#[test]
fn splitting_map_relations() {
    let o = example_order();
    let p = big(7);
    let map = SplittingMap::new(o.clone(), &p, 1).unwrap();
    let id = LocalMat::identity(&p, 1);
    assert_eq!(map.image(&QuatElement::one()).unwrap(), id);
    let i = map.image(&el([0, 1, 0, 0])).unwrap();
    let j = map.image(&el([0, 0, 1, 0])).unwrap();
    assert_eq!(i.mul(&i), id.scale(&big(3)));
    assert_eq!(j.mul(&j), id.scale(&big(-1)));
    assert_eq!(i.mul(&j), j.mul(&i).scale(&big(-1)));
    assert!(map.check_homomorphism());

    let map3 = map.at_precision(3).unwrap();
    assert!(map3.check_homomorphism());
    for (a, b) in map3.basis_images().iter().zip(map.basis_images()) {
        assert_eq!(&a.reduce(1), b);
    }
    let fresh = SplittingMap::new(o.clone(), &p, 3).unwrap();
    assert_eq!(fresh.basis_images(), map3.basis_images());
    assert!(SplittingMap::new(o, &big(3), 1).is_err());
}

#[test]
fn splitting_map_at_two() {
    let alg = Arc::new(QuatAlgebra::new(5, 1).unwrap());
    let o = Arc::new(maximal_order(alg).unwrap());
    let map = SplittingMap::new(o.clone(), &big(2), 4).unwrap();
    assert!(map.check_homomorphism());
    let x = el([1, 1, 0, 1]);
    if o.contains(&x) {
        let n = o.alg().nrd(&x).to_integer();
        assert_eq!(map.image(&x).unwrap().det(), n.mod_floor(&big(16)));
    }
}

#[test]
fn local_generators_have_the_norm_valuation() {
    let o = example_order();
    let alg = o.alg();
    for (ideal, p, v) in [(ideal_i(&o), 19, 1), (ideal_j(&o), 7, 2), (RightIdeal::unit(o.clone()), 5, 0)] {
        let p = big(p);
        let map = SplittingMap::new(o.clone(), &p, 1).unwrap();
        let x = local_generator(&ideal, &p, &map).unwrap();
        assert!(ideal.contains(&x));
        assert_eq!(rat_valuation(&alg.nrd(&x), &p), v);
    }
}

#[test]
fn local_left_ideal_of_prime_norm() {
    let o = example_order();
    let alg = o.alg();
    let p = big(5);
    let map = SplittingMap::new(o.clone(), &p, 1).unwrap();
    let m = LocalMat::from_i64(5, 1, [0, 1, 0, 0]);
    let r = local_left_ideal(&map, &m).unwrap();
    assert!(o.lattice().contains_lattice(&r));
    let index = r.det() / o.lattice().det();
    assert_eq!(index, BigRational::from_integer(big(25)));
    for b in o.basis() {
        for x in alg.lattice_elements(&r) {
            assert!(alg.lattice_contains(&r, &alg.mul(&b, &x)));
        }
    }
}

#[test]
fn random_left_ideals_hit_the_discriminant() {
    let o = example_order();
    let alg = o.alg();
    let maps: Vec<SplittingMap> =
        [5, 7, 11, 13, 17].iter().map(|&p| SplittingMap::new(o.clone(), &big(p), 1).unwrap()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let delta = BigRational::from_integer(alg.disc());
    let lo = BigRational::new(big(1), big(17));
    let hi = BigRational::from_integer(big(17));
    for draw in 0..1000 {
        let r = random_left_ideal(&o, &maps, &big(17), &mut rng).unwrap();
        let ratio = BigRational::from_integer(r.norm.clone()) / &delta;
        assert!(ratio >= lo && ratio <= hi, "draw {draw}: na(R) = {}", r.norm);
        if draw < 50 {
            let index = r.lattice.det() / o.lattice().det();
            assert_eq!(index, BigRational::from_integer(&r.norm * &r.norm));
        }
    }
}

#[test]
fn smoothness() {
    let fb: Vec<BigInt> = [2, 3, 5, 7, 11, 13, 17].iter().map(|&p| big(p)).collect();
    let e = smooth_exponents(&big(7), &fb).unwrap();
    assert_eq!(e, vec![0, 0, 0, 1, 0, 0, 0]);
    assert!(smooth_exponents(&big(19), &fb).is_none());
    assert_eq!(smooth_exponents(&big(1), &fb).unwrap(), vec![0; 7]);
    assert!(qpip::ideals::is_smooth(&factor_integer(&big(-7 * 8)).unwrap(), &fb));
    let o = example_order();
    assert!(ideal_is_smooth(&ideal_i(&o), &fb).is_none());
    assert!(ideal_is_smooth(&ideal_j(&o), &fb).is_some());
}

#[test]
fn parses_ideal_strings() {
    let o = example_order();
    let a = qpip::ideals::parse_ideal(o.clone(), "gens: 19,0,0,0 ; -3,-4,1,0").unwrap();
    assert_eq!(a, ideal_i(&o));
    let l: &IntLattice = a.lattice();
    let mut ints = Vec::new();
    for row in l.basis() {
        for x in row {
            ints.push(x.to_string());
        }
    }
    let text = format!("hnf: {} / {}", ints.join(" "), l.den());
    assert_eq!(qpip::ideals::parse_ideal(o, &text).unwrap(), a);
}

#[test]
fn prime_norm_ideals_cover_every_line() {
    let o = Arc::new(maximal_order(Arc::new(QuatAlgebra::new(3, -1).unwrap())).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut seen: Vec<IntLattice> = Vec::new();
    for _ in 0..200 {
        let i = random_prime_norm_ideal(&o, &big(7), &mut rng).unwrap();
        assert_eq!(i.norm_int(), Some(big(7)));
        if !seen.contains(i.lattice()) {
            seen.push(i.lattice().clone());
        }
    }
    assert_eq!(seen.len(), 8);
    // ramified: the two-sided prime
    let i = random_prime_norm_ideal(&o, &big(3), &mut rng).unwrap();
    assert_eq!(i.norm_int(), Some(big(3)));
}
