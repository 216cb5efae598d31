use std::sync::Arc;

use criterion::{criterion_group, criterion_main, Criterion};
use num_bigint::BigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qpip::bttree::preduce;
use qpip::ideals::{random_prime_norm_ideal, RightIdeal};
use qpip::quat::{maximal_order, Order, QuatAlgebra, QuatElement};
use qpip::reduction::{build_factor_base, gbuild, principal_generator, BuildConfig, SolveConfig};
use qpip::units::pbuild;

fn order(a: i64, b: i64) -> Arc<Order> {
    Arc::new(maximal_order(Arc::new(QuatAlgebra::new(a, b).unwrap())).unwrap())
}

fn build(c: &mut Criterion) {
    let o = order(3, -1);
    let fb = build_factor_base(o.alg(), Some(17));
    c.bench_function("gbuild (3,-1) bound 17", |b| b.iter(|| gbuild(&o, &fb, &BuildConfig::default()).unwrap()));
}

fn solve(c: &mut Criterion) {
    let o = order(3, -1);
    let fb = build_factor_base(o.alg(), Some(17));
    let s = gbuild(&o, &fb, &BuildConfig::default()).unwrap();
    let i = RightIdeal::from_generators(
        o.clone(),
        &[QuatElement::from_ints([19, 0, 0, 0]), QuatElement::from_ints([-3, -4, 1, 0])],
    )
    .unwrap();
    c.bench_function("solve norm 19", |b| {
        b.iter(|| {
            let mut rng = ChaCha8Rng::seed_from_u64(1);
            principal_generator(&i, &s, &mut rng, &SolveConfig::default()).unwrap()
        })
    });
}

fn reduce(c: &mut Criterion) {
    let o = order(3, -1);
    let p = BigInt::from(5);
    let s = pbuild(&o, &p).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let i = random_prime_norm_ideal(&o, &p, &mut rng).unwrap();
    c.bench_function("preduce norm 5", |b| b.iter(|| preduce(&i, &s).unwrap()));
}

criterion_group!(benches, build, solve, reduce);
criterion_main!(benches);
