use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::arith::mod_inverse;

/// A 2×2 matrix `[[a, b], [c, d]]` over `ℤ/p^i`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LocalMat {
    p: BigInt,
    i: u32,
    m: BigInt,
    e: [BigInt; 4],
}

impl fmt::Debug for LocalMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]] mod {}^{}", self.e[0], self.e[1], self.e[2], self.e[3], self.p, self.i)
    }
}

/// `v_p(x)` for a residue mod `p^i`, `None` for zero.
pub fn val_mod(x: &BigInt, p: &BigInt, i: u32) -> Option<u32> {
    let m = p.pow(i);
    let mut y = x.mod_floor(&m);
    if y.is_zero() {
        return None;
    }
    let mut v = 0;
    while (&y % p).is_zero() {
        y /= p;
        v += 1;
    }
    Some(v)
}

/// `a | b` in `ℤ/p^i`, with `v(0) = ∞`.
pub fn divides(a: &BigInt, b: &BigInt, p: &BigInt, i: u32) -> bool {
    match (val_mod(a, p, i), val_mod(b, p, i)) {
        (_, None) => true,
        (None, Some(_)) => false,
        (Some(va), Some(vb)) => vb >= va,
    }
}

/// Some `q` with `a·q ≡ b mod p^i`, assuming `a | b`.
pub fn div_mod(b: &BigInt, a: &BigInt, p: &BigInt, i: u32) -> BigInt {
    let m = p.pow(i);
    let Some(vb) = val_mod(b, p, i) else {
        return BigInt::zero();
    };
    let va = val_mod(a, p, i).expect("division by zero residue");
    assert!(vb >= va, "non-divisible residues");
    let pa = p.pow(va);
    let pb = p.pow(vb);
    let ua = a.mod_floor(&m) / &pa;
    let ub = b.mod_floor(&m) / &pb;
    let inv = mod_inverse(&ua, &m).expect("unit part");
    (p.pow(vb - va) * ub * inv).mod_floor(&m)
}

impl LocalMat {
    pub fn new(p: &BigInt, i: u32, e: [BigInt; 4]) -> Self {
        assert!(i >= 1);
        let m = p.pow(i);
        let e = e.map(|x| x.mod_floor(&m));
        LocalMat { p: p.clone(), i, m, e }
    }

    pub fn from_i64(p: i64, i: u32, e: [i64; 4]) -> Self {
        LocalMat::new(&BigInt::from(p), i, e.map(BigInt::from))
    }

    pub fn identity(p: &BigInt, i: u32) -> Self {
        LocalMat::new(p, i, [BigInt::one(), BigInt::zero(), BigInt::zero(), BigInt::one()])
    }

    pub fn zero(p: &BigInt, i: u32) -> Self {
        LocalMat::new(p, i, [BigInt::zero(), BigInt::zero(), BigInt::zero(), BigInt::zero()])
    }

    fn same(&self, e: [BigInt; 4]) -> Self {
        LocalMat::new(&self.p, self.i, e)
    }

    pub fn p(&self) -> &BigInt {
        &self.p
    }

    pub fn precision(&self) -> u32 {
        self.i
    }

    pub fn modulus(&self) -> &BigInt {
        &self.m
    }

    pub fn entries(&self) -> &[BigInt; 4] {
        &self.e
    }

    pub fn entry(&self, r: usize, c: usize) -> &BigInt {
        &self.e[2 * r + c]
    }

    pub fn is_zero(&self) -> bool {
        self.e.iter().all(|x| x.is_zero())
    }

    pub fn mul(&self, o: &LocalMat) -> LocalMat {
        let [a, b, c, d] = &self.e;
        let [w, x, y, z] = &o.e;
        self.same([a * w + b * y, a * x + b * z, c * w + d * y, c * x + d * z])
    }

    pub fn add(&self, o: &LocalMat) -> LocalMat {
        self.same([0, 1, 2, 3].map(|k| &self.e[k] + &o.e[k]))
    }

    pub fn sub(&self, o: &LocalMat) -> LocalMat {
        self.same([0, 1, 2, 3].map(|k| &self.e[k] - &o.e[k]))
    }

    pub fn scale(&self, s: &BigInt) -> LocalMat {
        self.same(self.e.clone().map(|x| x * s))
    }

    pub fn det(&self) -> BigInt {
        let [a, b, c, d] = &self.e;
        (a * d - b * c).mod_floor(&self.m)
    }

    /// `w(M) = v_p(det M)`, `None` when `det M = 0` in `ℤ/p^i`.
    pub fn w(&self) -> Option<u32> {
        val_mod(&self.det(), &self.p, self.i)
    }

    pub fn adjugate(&self) -> LocalMat {
        let [a, b, c, d] = self.e.clone();
        self.same([d, -b, -c, a])
    }

    /// Inverse of a matrix with unit determinant.
    pub fn inverse(&self) -> Option<LocalMat> {
        let inv = mod_inverse(&self.det(), &self.m)?;
        Some(self.adjugate().scale(&inv))
    }

    /// Some entry is a unit.
    pub fn is_primitive(&self) -> bool {
        self.e.iter().any(|x| !(x % &self.p).is_zero())
    }

    /// Reduction to a lower precision.
    pub fn reduce(&self, j: u32) -> LocalMat {
        assert!(j <= self.i);
        LocalMat::new(&self.p, j, self.e.clone())
    }

    /// Same integer representatives read at precision `j`.
    pub fn with_precision(&self, j: u32) -> LocalMat {
        LocalMat::new(&self.p, j, self.e.clone())
    }

    fn rot_left(&self) -> LocalMat {
        // [[0,1],[-1,0]]·M
        let [a, b, c, d] = self.e.clone();
        self.same([c, d, -a, -b])
    }

    fn rot_right(&self) -> LocalMat {
        // M·[[0,-1],[1,0]]
        let [a, b, c, d] = self.e.clone();
        self.same([b, -a, d, -c])
    }

    fn v(&self, k: usize) -> Option<u32> {
        val_mod(&self.e[k], &self.p, self.i)
    }
}

fn rot_l(p: &BigInt, i: u32) -> LocalMat {
    LocalMat::new(p, i, [BigInt::zero(), BigInt::one(), BigInt::from(-1), BigInt::zero()])
}

fn rot_r(p: &BigInt, i: u32) -> LocalMat {
    LocalMat::new(p, i, [BigInt::zero(), BigInt::from(-1), BigInt::one(), BigInt::zero()])
}

fn min_opt(a: Option<u32>, b: Option<u32>) -> bool {
    // a strictly smaller than b with None = ∞
    match (a, b) {
        (Some(x), Some(y)) => x < y,
        (Some(_), None) => true,
        _ => false,
    }
}

/// `U·M·V = diag(a, b)` with `U, V ∈ SL₂` and `v(a) ≤ v(b)`.
pub fn smith_sl2(m: &LocalMat) -> (LocalMat, LocalMat, LocalMat) {
    let (p, i) = (m.p.clone(), m.i);
    let mut u = LocalMat::identity(&p, i);
    let mut v = LocalMat::identity(&p, i);
    let mut n = m.clone();
    let mut best = 0;
    for k in 1..4 {
        if min_opt(n.v(k), n.v(best)) {
            best = k;
        }
    }
    if n.v(best).is_none() {
        return (u, v, n);
    }
    if best >= 2 {
        n = n.rot_left();
        u = rot_l(&p, i).mul(&u);
    }
    if best % 2 == 1 {
        n = n.rot_right();
        v = v.mul(&rot_r(&p, i));
    }
    let a = n.e[0].clone();
    let q = div_mod(&n.e[2], &a, &p, i);
    let el = LocalMat::new(&p, i, [BigInt::one(), BigInt::zero(), -&q, BigInt::one()]);
    n = el.mul(&n);
    u = el.mul(&u);
    let q = div_mod(&n.e[1], &a, &p, i);
    let er = LocalMat::new(&p, i, [BigInt::one(), -&q, BigInt::zero(), BigInt::one()]);
    n = n.mul(&er);
    v = v.mul(&er);
    (u, v, n)
}

/// `M·W = [[c, 0], [e, f]]` with `W ∈ SL₂`.
pub fn hermite_sl2(m: &LocalMat) -> (LocalMat, LocalMat) {
    let (p, i) = (m.p.clone(), m.i);
    let mut w = LocalMat::identity(&p, i);
    let mut n = m.clone();
    if min_opt(n.v(1), n.v(0)) {
        n = n.rot_right();
        w = w.mul(&rot_r(&p, i));
    }
    if !n.e[1].is_zero() {
        let q = div_mod(&n.e[1], &n.e[0], &p, i);
        let er = LocalMat::new(&p, i, [BigInt::one(), -&q, BigInt::zero(), BigInt::one()]);
        n = n.mul(&er);
        w = w.mul(&er);
    }
    (w, n)
}

/// Matrix Euclidean division: `B = A·Q + R` with `R = 0` or `w(R) < w(A)`.
pub fn divide_matrix(a: &LocalMat, b: &LocalMat) -> (LocalMat, LocalMat) {
    let (p, i) = (a.p.clone(), a.i);
    assert!(a.w().is_some(), "divide_matrix needs det A ≠ 0");
    let (u, v, s) = smith_sl2(a);
    let (da, db) = (s.e[0].clone(), s.e[3].clone());
    let b1 = u.mul(b);
    let (w, h) = hermite_sl2(&b1);
    let (c, e, f) = (h.e[0].clone(), h.e[2].clone(), h.e[3].clone());
    let z = BigInt::zero;
    let dv = |x: &BigInt, y: &BigInt| div_mod(x, y, &p, i);
    let mk = |e: [BigInt; 4]| LocalMat::new(&p, i, e);
    let (q, r) = if divides(&da, &c, &p, i) {
        if divides(&db, &f, &p, i) {
            if divides(&db, &e, &p, i) {
                (mk([dv(&c, &da), z(), dv(&e, &db), dv(&f, &db)]), LocalMat::zero(&p, i))
            } else {
                (mk([dv(&c, &da), BigInt::one(), z(), dv(&f, &db)]), mk([z(), -&da, e.clone(), z()]))
            }
        } else {
            (mk([dv(&c, &da) - 1, z(), z(), z()]), mk([da.clone(), z(), e.clone(), f.clone()]))
        }
    } else if divides(&db, &f, &p, i) {
        (mk([z(), z(), z(), dv(&f, &db) - 1]), mk([c.clone(), z(), e.clone(), db.clone()]))
    } else {
        (LocalMat::zero(&p, i), mk([c.clone(), z(), e.clone(), f.clone()]))
    };
    let winv = w.adjugate();
    let uinv = u.adjugate();
    (v.mul(&q).mul(&winv), uinv.mul(&r).mul(&winv))
}

/// `D` with `A·M₂ + B·M₂ = D·M₂`, and the recursion depth.
pub fn gcd_matrix_depth(a: &LocalMat, b: &LocalMat) -> (LocalMat, u32) {
    let (_, r) = divide_matrix(a, b);
    if r.is_zero() {
        (a.clone(), 1)
    } else {
        let (d, k) = gcd_matrix_depth(&r, a);
        (d, k + 1)
    }
}

pub fn gcd_matrix(a: &LocalMat, b: &LocalMat) -> LocalMat {
    gcd_matrix_depth(a, b).0
}

/// Integers `μ` with `Σ μ_k B_k ≡ D mod p^i`.
pub fn solve_membership(d: &LocalMat, bs: &[LocalMat]) -> Option<Vec<BigInt>> {
    let (p, i, m) = (d.p.clone(), d.i, d.m.clone());
    let n = bs.len();
    // rows = the four entries, columns = unknowns
    let mut a: Vec<Vec<BigInt>> = (0..4).map(|r| bs.iter().map(|b| b.e[r].clone()).collect()).collect();
    let mut rhs: Vec<BigInt> = d.e.to_vec();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut rank = 0;
    for k in 0..4.min(n) {
        let mut best: Option<(usize, usize, u32)> = None;
        for r in k..4 {
            for c in k..n {
                if let Some(v) = val_mod(&a[r][c], &p, i) {
                    if best.is_none_or(|(_, _, bv)| v < bv) {
                        best = Some((r, c, v));
                    }
                }
            }
        }
        let Some((br, bc, _)) = best else {
            break;
        };
        a.swap(k, br);
        rhs.swap(k, br);
        for row in a.iter_mut() {
            row.swap(k, bc);
        }
        perm.swap(k, bc);
        let piv = a[k][k].clone();
        for r in (k + 1)..4 {
            if a[r][k].is_zero() {
                continue;
            }
            let f = div_mod(&a[r][k], &piv, &p, i);
            for c in k..n {
                let t = &f * &a[k][c];
                a[r][c] = (&a[r][c] - t).mod_floor(&m);
            }
            rhs[r] = (&rhs[r] - &f * &rhs[k]).mod_floor(&m);
        }
        rank += 1;
    }
    if rhs[rank..].iter().any(|x| !x.mod_floor(&m).is_zero()) {
        return None;
    }
    let mut mu = vec![BigInt::zero(); n];
    for k in (0..rank).rev() {
        let mut s = rhs[k].clone();
        for c in (k + 1)..n {
            s -= &a[k][c] * &mu[c];
        }
        let s = s.mod_floor(&m);
        if !divides(&a[k][k], &s, &p, i) {
            return None;
        }
        mu[k] = div_mod(&s, &a[k][k], &p, i);
    }
    let mut out = vec![BigInt::zero(); n];
    for (k, &orig) in perm.iter().enumerate() {
        out[orig] = mu[k].clone();
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smith_of_antidiagonal() {
        let m = LocalMat::from_i64(5, 3, [0, 5, 1, 0]);
        let (u, v, n) = smith_sl2(&m);
        assert!(u.det().is_one() && v.det().is_one());
        assert_eq!(u.mul(&m).mul(&v), n);
        assert!(n.entry(0, 1).is_zero() && n.entry(1, 0).is_zero());
        assert_eq!(val_mod(n.entry(0, 0), m.p(), 3), Some(0));
        assert_eq!(val_mod(n.entry(1, 1), m.p(), 3), Some(1));
    }

    #[test]
    fn divide_examples() {
        let a = LocalMat::from_i64(2, 4, [2, 0, 0, 1]);
        let b = LocalMat::from_i64(2, 4, [4, 0, 0, 2]);
        let (q, r) = divide_matrix(&a, &b);
        assert!(r.is_zero());
        assert_eq!(a.mul(&q), b);
        let (q, r) = divide_matrix(&a, &a);
        assert!(r.is_zero());
        assert_eq!(a.mul(&q), a);
        let z = LocalMat::zero(a.p(), 4);
        let (q, r) = divide_matrix(&a, &z);
        assert!(q.is_zero() && r.is_zero());
    }

    #[test]
    fn gcd_with_unit() {
        let p = BigInt::from(3);
        let a = LocalMat::identity(&p, 3).scale(&p);
        let b = LocalMat::from_i64(3, 3, [1, 1, 0, 1]);
        let d = gcd_matrix(&a, &b);
        assert_eq!(d.w(), Some(0));
    }

    #[test]
    fn membership() {
        let p = BigInt::from(7);
        let bs = vec![
            LocalMat::from_i64(7, 2, [1, 0, 0, 0]),
            LocalMat::from_i64(7, 2, [0, 1, 0, 0]),
            LocalMat::from_i64(7, 2, [0, 0, 7, 0]),
            LocalMat::from_i64(7, 2, [0, 0, 0, 1]),
        ];
        let d = bs[0].add(&bs[1].scale(&p));
        let mu = solve_membership(&d, &bs).unwrap();
        let mut s = LocalMat::zero(&p, 2);
        for (m, b) in mu.iter().zip(bs.iter()) {
            s = s.add(&b.scale(m));
        }
        assert_eq!(s, d);
        assert!(solve_membership(&LocalMat::from_i64(7, 2, [0, 0, 1, 0]), &bs).is_none());
    }
}
