use std::sync::Arc;

use num_bigint::{BigInt, RandBigInt};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::arith::{trial_divide, valuation, FactoredInteger};
use crate::error::Result;
use crate::linalg::IntLattice;
use crate::localring::LocalMat;
use crate::quat::Order;

use super::ideal::RightIdeal;
use super::splitting::SplittingMap;

/// A left ideal of `O`, as produced by [`random_left_ideal`].
#[derive(Clone, Debug)]
pub struct LeftIdeal {
    pub order: Arc<Order>,
    pub lattice: IntLattice,
    pub norm: BigInt,
    /// `(p, k_p)` with `k_p > 0`
    pub exponents: Vec<(BigInt, u32)>,
}

impl LeftIdeal {
    pub fn unit(order: Arc<Order>) -> Self {
        let lattice = order.lattice().clone();
        LeftIdeal { order, lattice, norm: BigInt::one(), exponents: Vec::new() }
    }

    pub fn contains(&self, x: &crate::quat::QuatElement) -> bool {
        self.order.alg().lattice_contains(&self.lattice, x)
    }
}

/// `O·ι⁻¹(M) + p^k·O` for a primitive `M` of determinant zero.
pub fn local_left_ideal(map: &SplittingMap, m: &LocalMat) -> Result<IntLattice> {
    let order = map.order();
    let alg = order.alg();
    let x = map.preimage(m);
    let pk = BigRational::from_integer(map.p().pow(map.precision()));
    let mut gens = Vec::with_capacity(8);
    for b in order.basis() {
        let y = alg.mul(&b, &x);
        gens.push((y.num().clone(), y.den().clone()));
        let z = b.scale(&pk);
        gens.push((z.num().clone(), z.den().clone()));
    }
    IntLattice::from_rational_generators(&gens)
}

/// `ι⁻¹(M)·O + p^k·O`, a right ideal of norm `p^k` for primitive singular `M`.
pub fn local_right_ideal(map: &SplittingMap, m: &LocalMat) -> Result<RightIdeal> {
    let order = map.order();
    let x = map.preimage(m);
    let pk = crate::quat::QuatElement::integer(map.p().pow(map.precision()));
    RightIdeal::from_generators(order.clone(), &[x, pk])
}

/// A random primitive upper-triangular matrix of determinant zero.
pub fn random_singular_upper<R: Rng + ?Sized>(p: &BigInt, k: u32, rng: &mut R) -> LocalMat {
    let m = p.pow(k);
    loop {
        let a = rng.gen_bigint_range(&BigInt::zero(), &m);
        let b = rng.gen_bigint_range(&BigInt::zero(), &m);
        // c in the annihilator of a
        let va = if a.is_zero() { k } else { valuation(&a, p).0.min(k) };
        let step = p.pow(k - va);
        let c = rng.gen_bigint_range(&BigInt::zero(), &p.pow(va)) * &step;
        let mat = LocalMat::new(p, k, [a, b, BigInt::zero(), c]);
        if mat.is_primitive() {
            return mat;
        }
    }
}

/// Exponents `k_p ∈ {0,1,2}`: shuffle the primes, then take them greedily
/// until the product reaches `Δ/B`, never overshooting `Δ·B` with `B = max FB`.
pub fn choose_exponents<R: Rng + ?Sized>(
    primes: &[BigInt],
    delta: &BigInt,
    fb_max: &BigInt,
    rng: &mut R,
) -> Vec<(usize, u32)> {
    let mut order: Vec<usize> = (0..primes.len()).collect();
    order.shuffle(rng);
    let hi = delta * fb_max;
    let mut prod = BigInt::one();
    let mut out = Vec::new();
    for idx in order {
        if &prod * fb_max >= *delta {
            break;
        }
        let p = &primes[idx];
        let mut k: u32 = rng.gen_range(1..=2);
        while k > 0 && &prod * p.pow(k) > hi {
            k -= 1;
        }
        if k > 0 {
            prod *= p.pow(k);
            out.push((idx, k));
        }
    }
    out
}

/// A random left ideal `R = ∩_p (O·ι⁻¹(M_p) + p^{k_p}O)` with `na(R) ≈ Δ`.
///
/// `maps` holds one splitting map per split factor base prime.
pub fn random_left_ideal<R: Rng + ?Sized>(
    order: &Arc<Order>,
    maps: &[SplittingMap],
    fb_max: &BigInt,
    rng: &mut R,
) -> Result<LeftIdeal> {
    let primes: Vec<BigInt> = maps.iter().map(|m| m.p().clone()).collect();
    let delta = order.alg().disc();
    let ks = choose_exponents(&primes, &delta, fb_max, rng);
    let mut r = LeftIdeal::unit(order.clone());
    for (idx, k) in ks {
        let map = maps[idx].at_precision(k)?;
        let m = random_singular_upper(map.p(), k, rng);
        let rp = local_left_ideal(&map, &m)?;
        r.lattice = r.lattice.intersect(&rp);
        r.norm *= map.p().pow(k);
        r.exponents.push((map.p().clone(), k));
    }
    r.exponents.sort();
    Ok(r)
}

/// Exponent vector of `n` over `fb` if `n` is `fb`-smooth.
pub fn smooth_exponents(n: &BigInt, fb: &[BigInt]) -> Option<Vec<u32>> {
    if n.is_zero() {
        return None;
    }
    let (e, rest) = trial_divide(n, fb);
    (rest.abs().is_one()).then_some(e)
}

pub fn is_smooth(n: &FactoredInteger, fb: &[BigInt]) -> bool {
    n.primes().all(|p| fb.contains(p))
}

/// Smoothness of an integral ideal through its norm.
pub fn ideal_is_smooth(i: &RightIdeal, fb: &[BigInt]) -> Option<Vec<u32>> {
    let n = i.norm();
    if !n.denom().is_one() {
        return None;
    }
    smooth_exponents(n.numer(), fb)
}

/// A uniformly random integral right ideal of norm `l` (prime); at a
/// ramified `l` this is the unique two-sided prime over `l`.
pub fn random_prime_norm_ideal<R: Rng + ?Sized>(order: &Arc<Order>, l: &BigInt, rng: &mut R) -> Result<RightIdeal> {
    if order.alg().is_ramified(l) {
        let c = super::ideal::TwoSidedIdeal::new(BigRational::one(), [l.clone()]);
        return RightIdeal::from_lattice(order.clone(), c.lattice(order));
    }
    let map = SplittingMap::new(order.clone(), l, 1)?;
    // the p+1 ideals of norm l are the rank-one matrices up to column space
    let y = rng.gen_bigint_range(&BigInt::zero(), &(l + 1u32));
    let e = if &y == l {
        [BigInt::zero(), BigInt::zero(), BigInt::zero(), BigInt::one()]
    } else {
        [BigInt::one(), BigInt::zero(), y, BigInt::zero()]
    };
    local_right_ideal(&map, &LocalMat::new(l, 1, e))
}
