use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;

use qpip::ideals::{RightIdeal, SplittingMap};
use qpip::localring::local_generator;
use qpip::arith::rat_valuation;
use qpip::quat::{maximal_order, Order, QuatAlgebra, QuatElement};

fn orders() -> Vec<Arc<Order>> {
    [(3, -1), (-1, 7), (2, 5), (-6, 35)]
        .iter()
        .map(|&(a, b)| Arc::new(maximal_order(Arc::new(QuatAlgebra::new(a, b).unwrap())).unwrap()))
        .collect()
}

// n·O + z·O for z ∈ O with small coordinates
fn ideal_of(o: &Arc<Order>, n: i64, c: [i64; 4]) -> Option<RightIdeal> {
    let z = o.from_coords(&c.map(BigInt::from));
    if o.alg().nrd(&z).is_zero() {
        return None;
    }
    RightIdeal::from_generators(o.clone(), &[QuatElement::integer(n), z]).ok()
}

fn index(i: &RightIdeal) -> BigRational {
    i.lattice().det() / i.order().lattice().det()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn index_is_the_squared_norm(k in 0usize..4, n in 1i64..60, c in prop::array::uniform4(-9i64..9)) {
        let o = &orders()[k];
        if let Some(i) = ideal_of(o, n, c) {
            prop_assert!(i.is_integral());
            prop_assert_eq!(index(&i), i.norm() * i.norm());
            // the norm divides every element norm and n² in particular
            for b in i.basis() {
                let q = i.alg().nrd(&b) / i.norm();
                prop_assert!(q.is_integer());
            }
        }
    }

    #[test]
    fn inverse_and_products(k in 0usize..4, n in 1i64..40, c in prop::array::uniform4(-6i64..6),
                            m in 1i64..40, d in prop::array::uniform4(-6i64..6)) {
        let o = &orders()[k];
        let (Some(i), Some(j)) = (ideal_of(o, n, c), ideal_of(o, m, d)) else { return Ok(()); };
        let ol = i.left_order();
        let prod = i.mul(&i.inverse()).unwrap();
        prop_assert_eq!(prod.lattice(), ol.lattice());
        prop_assert_eq!(&i.alg().lattice_mul(i.inverse().lattice(), i.lattice()), o.lattice());
        let ij = i.mul(&j.conj()).unwrap();
        prop_assert_eq!(ij.norm(), &(i.norm() * j.norm()));
        prop_assert_eq!(index(&ij), ij.norm() * ij.norm());
        let alg = i.alg();
        let left = alg.lattice_mul(&alg.lattice_mul(i.lattice(), j.conj().lattice()), j.lattice());
        let right = alg.lattice_mul(i.lattice(), &alg.lattice_mul(j.conj().lattice(), j.lattice()));
        prop_assert_eq!(&left, &right);
        prop_assert_eq!(right, i.lattice().scale(j.norm()));
    }

    #[test]
    fn two_sided_round_trip(k in 0usize..4, n in 1i64..30, c in prop::array::uniform4(-6i64..6), s in 1i64..6) {
        let o = &orders()[k];
        let Some(i) = ideal_of(o, n, c) else { return Ok(()); };
        let i = i.scale(&BigRational::from_integer(BigInt::from(s)));
        let (cc, j) = i.two_sided_generated().unwrap();
        prop_assert_eq!(j.mul_two_sided(&cc), i.clone());
        prop_assert!(j.is_integral());
        let (c2, _) = j.two_sided_generated().unwrap();
        prop_assert!(c2.is_one());
    }

    #[test]
    fn local_generators(k in 0usize..4, n in 1i64..200, c in prop::array::uniform4(-9i64..9)) {
        let o = &orders()[k];
        let Some(i) = ideal_of(o, n, c) else { return Ok(()); };
        for p in [2i64, 3, 5, 7, 11, 13] {
            let p = BigInt::from(p);
            if o.alg().is_ramified(&p) {
                continue;
            }
            let map = SplittingMap::new(o.clone(), &p, 1).unwrap();
            let x = local_generator(&i, &p, &map).unwrap();
            prop_assert!(i.contains(&x));
            prop_assert_eq!(rat_valuation(&o.alg().nrd(&x), &p), rat_valuation(i.norm(), &p));
        }
    }
}
