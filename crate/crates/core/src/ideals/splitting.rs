use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use crate::arith::{mod_inverse, quadratic_roots_mod_prime, valuation};
use crate::error::{Error, Result};
use crate::linalg::Vec4;
use crate::localring::{solve_membership, LocalMat};
use crate::quat::{Order, QuatElement};

/// A ring epimorphism `ι: O → M₂(ℤ/p^k)` with kernel `p^k·O`.
#[derive(Clone, Debug)]
pub struct SplittingMap {
    order: Arc<Order>,
    p: BigInt,
    k: u32,
    // idempotent and second basis vector seeds, as order coordinates mod p
    e1: Vec4,
    z: Vec4,
    images: [LocalMat; 4],
}

fn small_coords() -> impl Iterator<Item = Vec4> {
    let r = [0i64, 1, -1, 2, -2];
    let mut out = Vec::new();
    for a in r {
        for b in r {
            for c in r {
                for d in r {
                    out.push([a, b, c, d].map(BigInt::from));
                }
            }
        }
    }
    out.into_iter()
}

fn reduce_coords(c: &Vec4, m: &BigInt) -> Vec4 {
    c.clone().map(|x| x.mod_floor(m))
}

impl SplittingMap {
    /// Deterministic construction at precision `k ≥ 1`.
    pub fn new(order: Arc<Order>, p: &BigInt, k: u32) -> Result<Self> {
        if order.alg().is_ramified(p) {
            return Err(Error::RamifiedPrime(p.to_string()));
        }
        let alg = order.alg();
        let mut seed = None;
        for c in small_coords() {
            let x = order.from_coords(&c);
            if x.is_scalar() {
                continue;
            }
            let t = x.trd().to_integer();
            let n = alg.nrd(&x).to_integer();
            let roots = quadratic_roots_mod_prime(&-t, &n, p);
            if roots.len() == 2 {
                let inv = mod_inverse(&(&roots[0] - &roots[1]), p).expect("distinct roots");
                let e = x.sub(&QuatElement::integer(roots[1].clone())).scale_int(&inv);
                seed = Some(reduce_coords(&order.coords(&e).expect("in order"), p));
                break;
            }
        }
        let e1 = seed.ok_or_else(|| Error::invariant("no split element found for the splitting map"))?;
        // z with e, z·e independent mod p
        let e_el = order.from_coords(&e1);
        let ec = order.coords(&e_el).unwrap();
        let mut zsel = None;
        for c in small_coords() {
            let z = order.from_coords(&c);
            let ze = order.coords(&alg.mul(&z, &e_el)).expect("in order");
            if pick_minor(&ec, &ze, p).is_some() {
                zsel = Some(c);
                break;
            }
        }
        let z = zsel.ok_or_else(|| Error::invariant("no second basis vector for the splitting map"))?;
        SplittingMap::build(order, p.clone(), k, e1, z)
    }

    fn build(order: Arc<Order>, p: BigInt, k: u32, e1: Vec4, z: Vec4) -> Result<Self> {
        let alg = order.alg();
        let m = p.pow(k);
        // Hensel lift of the idempotent: e ← 3e² − 2e³
        let mut e = order.from_coords(&e1);
        let mut prec = 1u32;
        while prec < k {
            let e2 = alg.mul(&e, &e);
            let e3 = alg.mul(&e2, &e);
            let next = e2.scale_int(&BigInt::from(3)).sub(&e3.scale_int(&BigInt::from(2)));
            e = order.from_coords(&reduce_coords(&order.coords(&next).expect("in order"), &m));
            prec *= 2;
        }
        let ze = alg.mul(&order.from_coords(&z), &e);
        let ec = reduce_coords(&order.coords(&e).unwrap(), &m);
        let zec = reduce_coords(&order.coords(&ze).unwrap(), &m);
        let (r, s) = pick_minor(&ec, &zec, &p).ok_or_else(|| Error::invariant("degenerate splitting basis"))?;
        let det = (&ec[r] * &zec[s] - &ec[s] * &zec[r]).mod_floor(&m);
        let dinv = mod_inverse(&det, &m).expect("unit minor");
        // coordinates (α, β) of y = α·e + β·ze from rows r, s
        let solve = |y: &Vec4| -> (BigInt, BigInt) {
            let a = ((&y[r] * &zec[s] - &y[s] * &zec[r]) * &dinv).mod_floor(&m);
            let b = ((&ec[r] * &y[s] - &ec[s] * &y[r]) * &dinv).mod_floor(&m);
            (a, b)
        };
        let basis = order.basis();
        let mut images = Vec::with_capacity(4);
        for b in &basis {
            let y1 = reduce_coords(&order.coords(&alg.mul(b, &e)).unwrap(), &m);
            let y2 = reduce_coords(&order.coords(&alg.mul(b, &ze)).unwrap(), &m);
            let (a1, b1) = solve(&y1);
            let (a2, b2) = solve(&y2);
            images.push(LocalMat::new(&p, k, [a1, a2, b1, b2]));
        }
        let images = [images[0].clone(), images[1].clone(), images[2].clone(), images[3].clone()];
        let map = SplittingMap { order, p, k, e1, z, images };
        if !map.check_homomorphism() {
            return Err(Error::invariant("splitting map is not multiplicative"));
        }
        Ok(map)
    }

    /// The same map at another precision (consistent by construction).
    pub fn at_precision(&self, k: u32) -> Result<SplittingMap> {
        if k == self.k {
            return Ok(self.clone());
        }
        if k < self.k {
            let mut m = self.clone();
            m.k = k;
            m.images = self.images.clone().map(|x| x.reduce(k));
            return Ok(m);
        }
        SplittingMap::build(self.order.clone(), self.p.clone(), k, self.e1.clone(), self.z.clone())
    }

    pub fn p(&self) -> &BigInt {
        &self.p
    }

    pub fn precision(&self) -> u32 {
        self.k
    }

    pub fn order(&self) -> &Arc<Order> {
        &self.order
    }

    pub fn basis_images(&self) -> &[LocalMat; 4] {
        &self.images
    }

    pub fn image_coords(&self, c: &Vec4) -> LocalMat {
        let mut acc = LocalMat::zero(&self.p, self.k);
        for (ci, im) in c.iter().zip(self.images.iter()) {
            if !ci.is_zero() {
                acc = acc.add(&im.scale(ci));
            }
        }
        acc
    }

    /// `ι(x)` for `x ∈ O`.
    pub fn image(&self, x: &QuatElement) -> Option<LocalMat> {
        self.order.coords(x).map(|c| self.image_coords(&c))
    }

    /// `(ι(p^s·x), s)` for the least `s ≥ 0` with `p^s·x` integral at `p`.
    pub fn image_scaled(&self, x: &QuatElement) -> Option<(LocalMat, u32)> {
        let (vd, cof) = valuation(x.den(), &self.p);
        let m = self.p.pow(self.k);
        let inv = mod_inverse(&cof, &m)?;
        let y = x.scale_int(&cof);
        for s in 0..=(vd + 64) {
            let ys = y.scale_int(&self.p.pow(s));
            if let Some(im) = self.image(&ys) {
                return Some((im.scale(&inv), s));
            }
        }
        None
    }

    /// Some `x ∈ O` with `ι(x) = M`.
    pub fn preimage(&self, m: &LocalMat) -> QuatElement {
        let mu = solve_membership(m, &self.images).expect("splitting map is surjective");
        let c = [mu[0].clone(), mu[1].clone(), mu[2].clone(), mu[3].clone()];
        self.order.from_coords(&c)
    }

    /// `ι(1) = 1` and `ι(b_m b_n) = ι(b_m)ι(b_n)` on the basis.
    pub fn check_homomorphism(&self) -> bool {
        let alg = self.order.alg();
        let basis = self.order.basis();
        if self.image(&QuatElement::one()) != Some(LocalMat::identity(&self.p, self.k)) {
            return false;
        }
        for (i, x) in basis.iter().enumerate() {
            for (j, y) in basis.iter().enumerate() {
                let xy = alg.mul(x, y);
                match self.image(&xy) {
                    Some(m) if m == self.images[i].mul(&self.images[j]) => {}
                    _ => return false,
                }
            }
        }
        true
    }
}

fn pick_minor(a: &Vec4, b: &Vec4, p: &BigInt) -> Option<(usize, usize)> {
    for r in 0..4 {
        for s in (r + 1)..4 {
            let d = &a[r] * &b[s] - &a[s] * &b[r];
            if !(d % p).is_zero() {
                return Some((r, s));
            }
        }
    }
    None
}
