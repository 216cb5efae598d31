use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;

use qpip::linalg::IntLattice;
use qpip::localring::{
    divide_matrix, gcd_matrix, gcd_matrix_depth, hermite_sl2, smith_sl2, solve_membership, val_mod,
    LocalMat,
};

const PRIMES: [i64; 5] = [2, 3, 5, 7, 13];

// entries p^v·u with v spread over [0, i], so all valuation patterns occur
fn mat_in(p: i64, i: u32) -> impl Strategy<Value = LocalMat> {
    prop::array::uniform4((0..=i, any::<u32>())).prop_map(move |es| {
        let e = es.map(|(v, u)| BigInt::from(p).pow(v) * BigInt::from(u));
        LocalMat::new(&BigInt::from(p), i, e)
    })
}

fn pair() -> impl Strategy<Value = (LocalMat, LocalMat)> {
    (0..PRIMES.len(), 1u32..=8)
        .prop_flat_map(|(k, i)| (mat_in(PRIMES[k], i), mat_in(PRIMES[k], i)))
        .prop_filter("det A ≠ 0", |(a, _)| a.w().is_some())
}

fn w(m: &LocalMat) -> Option<u32> {
    val_mod(&m.det(), m.p(), m.precision())
}

// the ℤ-module A·M₂ + B·M₂ + p^i·ℤ⁴ inside ℤ⁴, in HNF
fn residue_module(ms: &[&LocalMat]) -> IntLattice {
    let p = ms[0].p().clone();
    let i = ms[0].precision();
    let mut rows = Vec::new();
    for m in ms {
        for k in 0..4 {
            let mut e = [0i64; 4];
            e[k] = 1;
            let prod = m.mul(&LocalMat::new(&p, i, e.map(BigInt::from)));
            rows.push(prod.entries().clone());
        }
    }
    let pi = p.pow(i);
    for k in 0..4 {
        let mut e: [BigInt; 4] = [0, 1, 2, 3].map(|_| BigInt::zero());
        e[k] = pi.clone();
        rows.push(e);
    }
    IntLattice::from_generators(&rows, &BigInt::from(1)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn division_with_remainder((a, b) in pair()) {
        let (q, r) = divide_matrix(&a, &b);
        prop_assert_eq!(a.mul(&q).add(&r), b);
        if !r.is_zero() {
            let wr = w(&r);
            prop_assert!(wr.is_some(), "det R = 0 for nonzero R");
            prop_assert!(wr.unwrap() < w(&a).unwrap());
        }
    }

    #[test]
    fn normal_forms_reconstruct((a, b) in pair()) {
        let (u, v, n) = smith_sl2(&a);
        let one = BigInt::from(1);
        prop_assert_eq!(u.det(), one.clone());
        prop_assert_eq!(v.det(), one.clone());
        prop_assert_eq!(u.mul(&a).mul(&v), n.clone());
        prop_assert!(n.entry(0, 1).is_zero() && n.entry(1, 0).is_zero());
        let (va, vb) = (val_mod(n.entry(0, 0), a.p(), a.precision()), val_mod(n.entry(1, 1), a.p(), a.precision()));
        prop_assert!(va.unwrap() <= vb.unwrap_or(u32::MAX));
        let (wm, h) = hermite_sl2(&b);
        prop_assert_eq!(wm.det(), one);
        prop_assert_eq!(b.mul(&wm), h.clone());
        prop_assert!(h.entry(0, 1).is_zero());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1_000))]

    #[test]
    fn gcd_generates_the_sum((a, b) in pair()) {
        let (d, depth) = gcd_matrix_depth(&a, &b);
        prop_assert!(depth <= w(&a).unwrap() + 1);
        prop_assert_eq!(residue_module(&[&d]), residue_module(&[&a, &b]));
    }

    #[test]
    fn membership_recovers_combinations(
        (a, b) in pair(),
        mu in prop::array::uniform4(-1000i64..1000),
    ) {
        let c = a.mul(&b);
        let e = b.add(&a);
        let bs = [a.clone(), b.clone(), c, e];
        let mut d = LocalMat::zero(a.p(), a.precision());
        for (m, x) in mu.iter().zip(bs.iter()) {
            d = d.add(&x.scale(&BigInt::from(*m)));
        }
        let sol = solve_membership(&d, &bs).expect("solvable by construction");
        let mut back = LocalMat::zero(a.p(), a.precision());
        for (m, x) in sol.iter().zip(bs.iter()) {
            back = back.add(&x.scale(m));
        }
        prop_assert_eq!(back, d);
    }
}

#[test]
fn gcd_with_a_unimodular_matrix_is_everything() {
    for &p in &PRIMES {
        let pb = BigInt::from(p);
        let a = LocalMat::identity(&pb, 4).scale(&pb);
        let m = LocalMat::from_i64(p, 4, [1, 1, 0, 1]);
        let d = gcd_matrix(&a, &m);
        assert_eq!(w(&d), Some(0));
        assert_eq!(residue_module(&[&d]), IntLattice::standard());
        assert_eq!(residue_module(&[&a, &a]), residue_module(&[&gcd_matrix(&a, &a)]));
    }
}
