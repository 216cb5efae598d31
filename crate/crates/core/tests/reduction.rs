use std::sync::Arc;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qpip::error::Error;
use qpip::ideals::RightIdeal;
use qpip::linalg::smith;
use qpip::quat::{maximal_order, Order, QuatAlgebra, QuatElement};
use qpip::reduction::{
    build_factor_base, from_text, gbuild, greduce, naive_generator, to_text, principal_generator, verify_generator, BuildConfig,
    SolveConfig,
};

fn big(n: i64) -> BigInt {
    BigInt::from(n)
}

fn order(a: i64, b: i64) -> Arc<Order> {
    let alg = Arc::new(QuatAlgebra::new(a, b).unwrap());
    Arc::new(maximal_order(alg).unwrap())
}

fn example_ideal(o: &Arc<Order>) -> RightIdeal {
    RightIdeal::from_generators(
        o.clone(),
        &[QuatElement::from_ints([19, 0, 0, 0]), QuatElement::from_ints([-3, -4, 1, 0])],
    )
    .unwrap()
}

#[test]
fn factor_bases() {
    let o = order(3, -1);
    let fb = build_factor_base(o.alg(), Some(17));
    assert_eq!(fb.primes(), [2, 3, 5, 7, 11, 13, 17].map(big));
    let split: Vec<bool> = (0..fb.len()).map(|k| fb.is_split(k)).collect();
    assert_eq!(split, [false, false, true, true, true, true, true]);
    let tiny = build_factor_base(o.alg(), Some(2));
    assert_eq!(tiny.primes(), [big(2)]);
    assert_eq!(
        gbuild(&o, &tiny, &BuildConfig::default()).unwrap_err(),
        Error::InsufficientSplitPrimes
    );
    // small discriminants fall back to 17
    assert_eq!(build_factor_base(o.alg(), None).bound(), 17);
}

#[test]
fn example_structure_and_generator() {
    let start = Instant::now();
    let o = order(3, -1);
    let fb = build_factor_base(o.alg(), Some(17));
    let s = gbuild(&o, &fb, &BuildConfig::default()).unwrap();
    let snf = smith(&s.valuation_matrix());
    assert!(snf.is_unimodular(7));
    s.check().unwrap();

    let i = example_ideal(&o);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let sol = principal_generator(&i, &s, &mut rng, &SolveConfig::default()).unwrap();
    let w = sol.expanded.expect("small generator expands");
    assert_eq!(o.alg().nrd(&w).abs(), BigRational::from_integer(big(19)));
    assert!(verify_generator(&i, &w));
    assert!(start.elapsed().as_secs_f64() < 5.0);
}

#[test]
fn greduce_trivial_and_scalar_inputs() {
    let o = order(3, -1);
    let fb = build_factor_base(o.alg(), Some(17));
    let s = gbuild(&o, &fb, &BuildConfig::default()).unwrap();
    let unit = RightIdeal::unit(o.clone());
    let out = greduce(&unit, &s).unwrap();
    assert!(out.j.is_unit() && out.c.is_one());
    assert_eq!(out.g.mul_cr(&unit).unwrap(), unit);

    let five = unit.scale(&BigRational::from_integer(big(5)));
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let sol = principal_generator(&five, &s, &mut rng, &SolveConfig::default()).unwrap();
    let w = sol.expanded.unwrap();
    assert!(verify_generator(&five, &w));
    assert_eq!(o.alg().nrd(&w).abs(), BigRational::from_integer(big(25)));

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let sol = principal_generator(&unit, &s, &mut rng, &SolveConfig::default()).unwrap();
    assert!(o.alg().nrd(&sol.expanded.unwrap()).abs().is_one());
}

#[test]
fn naive_oracle() {
    let o = order(3, -1);
    let i = example_ideal(&o);
    let w = naive_generator(&i, 100_000).unwrap();
    assert!(verify_generator(&i, &w));
}

#[test]
fn structure_files_round_trip() {
    let o = order(3, -1);
    let fb = build_factor_base(o.alg(), Some(17));
    let s = gbuild(&o, &fb, &BuildConfig::default()).unwrap();
    let text = to_text(&s);
    let back = from_text(&text).unwrap();
    assert_eq!(to_text(&back), text);
    // a second build is byte-identical
    let again = gbuild(&o, &fb, &BuildConfig::default()).unwrap();
    assert_eq!(to_text(&again), text);
    // the loaded structure solves like the original
    let i = example_ideal(&o);
    let mut r1 = ChaCha8Rng::seed_from_u64(9);
    let mut r2 = ChaCha8Rng::seed_from_u64(9);
    let a = principal_generator(&i, &s, &mut r1, &SolveConfig::default()).unwrap();
    let b = principal_generator(&i, &back, &mut r2, &SolveConfig::default()).unwrap();
    assert_eq!(a.expanded, b.expanded);
    assert_eq!(a.attempts, b.attempts);

    let tampered = text.replacen("bound 17", "bound 19", 1);
    assert!(matches!(from_text(&tampered), Err(Error::Parse(_))));
    assert!(from_text(&text[..text.len() / 2]).is_err());
}
