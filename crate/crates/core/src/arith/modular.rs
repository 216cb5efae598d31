use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Non-negative residue of `a` modulo `m` (`m > 0`).
pub fn modp(a: &BigInt, m: &BigInt) -> BigInt {
    a.mod_floor(m)
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    if m.is_one() {
        return Some(BigInt::zero());
    }
    let e = modp(a, m).extended_gcd(m);
    if !e.gcd.is_one() {
        return None;
    }
    Some(modp(&e.x, m))
}

/// `p`-adic valuation of a nonzero integer together with the cofactor.
pub fn valuation(n: &BigInt, p: &BigInt) -> (u32, BigInt) {
    debug_assert!(!n.is_zero());
    let mut v = 0;
    let mut m = n.clone();
    loop {
        let (q, r) = m.div_rem(p);
        if !r.is_zero() {
            return (v, m);
        }
        m = q;
        v += 1;
    }
}

/// `p`-adic valuation, `None` for zero.
pub fn val(n: &BigInt, p: &BigInt) -> Option<u32> {
    if n.is_zero() {
        None
    } else {
        Some(valuation(n, p).0)
    }
}

/// Chinese remaindering of `x ≡ r_i mod m_i` for pairwise coprime moduli.
pub fn crt(residues: &[(BigInt, BigInt)]) -> (BigInt, BigInt) {
    let mut x = BigInt::zero();
    let mut m = BigInt::one();
    for (r, mi) in residues {
        let inv = mod_inverse(&m, mi).expect("moduli must be coprime");
        let t = modp(&((r - &x) * inv), mi);
        x += &m * t;
        m *= mi;
        x = modp(&x, &m);
    }
    (x, m)
}

/// Jacobi symbol `(a/n)` for odd positive `n`.
pub fn jacobi(a: &BigInt, n: &BigInt) -> i32 {
    debug_assert!(n.is_positive() && n.is_odd());
    let mut a = modp(a, n);
    let mut n = n.clone();
    let mut t = 1;
    let three = BigInt::from(3);
    let five = BigInt::from(5);
    let eight = BigInt::from(8);
    while !a.is_zero() {
        while a.is_even() {
            a >>= 1;
            let r = modp(&n, &eight);
            if r == three || r == five {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if modp(&a, &BigInt::from(4)) == three && modp(&n, &BigInt::from(4)) == three {
            t = -t;
        }
        a = modp(&a, &n);
    }
    if n.is_one() {
        t
    } else {
        0
    }
}

/// Legendre symbol `(a/p)` for an odd prime `p`.
pub fn legendre(a: &BigInt, p: &BigInt) -> i32 {
    jacobi(a, p)
}

/// Kronecker symbol `(D/p)` for a prime `p`, including `p = 2`.
pub fn kronecker_prime(d: &BigInt, p: &BigInt) -> i32 {
    if *p == BigInt::from(2) {
        if d.is_even() {
            return 0;
        }
        let r = modp(d, &BigInt::from(8));
        if r == BigInt::one() || r == BigInt::from(7) {
            1
        } else {
            -1
        }
    } else {
        legendre(d, p)
    }
}

/// A square root of `a` modulo the odd prime `p` (Tonelli–Shanks).
pub fn sqrt_mod_prime(a: &BigInt, p: &BigInt) -> Option<BigInt> {
    let a = modp(a, p);
    if a.is_zero() {
        return Some(a);
    }
    if *p == BigInt::from(2) {
        return Some(a);
    }
    if legendre(&a, p) != 1 {
        return None;
    }
    let pm1: BigInt = p - 1u32;
    let mut q = pm1.clone();
    let mut s = 0u32;
    while q.is_even() {
        q >>= 1;
        s += 1;
    }
    if s == 1 {
        let e: BigInt = (p + 1u32) >> 2;
        return Some(a.modpow(&e, p));
    }
    let mut z = BigInt::from(2);
    while legendre(&z, p) != -1 {
        z += 1u32;
    }
    let mut m = s;
    let mut c = z.modpow(&q, p);
    let mut t = a.modpow(&q, p);
    let mut r = a.modpow(&((&q + 1u32) >> 1), p);
    while !t.is_one() {
        let mut i = 0u32;
        let mut tt = t.clone();
        while !tt.is_one() {
            tt = (&tt * &tt) % p;
            i += 1;
        }
        let mut b = c.clone();
        for _ in 0..(m - i - 1) {
            b = (&b * &b) % p;
        }
        m = i;
        c = (&b * &b) % p;
        t = (t * &c) % p;
        r = (r * b) % p;
    }
    Some(r)
}

/// Roots in `Z/p` of the monic quadratic `X² + bX + c`.
pub fn quadratic_roots_mod_prime(b: &BigInt, c: &BigInt, p: &BigInt) -> Vec<BigInt> {
    if *p == BigInt::from(2) {
        return (0..2)
            .map(BigInt::from)
            .filter(|x| modp(&(x * x + b * x + c), p).is_zero())
            .collect();
    }
    let disc = modp(&(b * b - BigInt::from(4) * c), p);
    let Some(s) = sqrt_mod_prime(&disc, p) else {
        return Vec::new();
    };
    let inv2 = mod_inverse(&BigInt::from(2), p).unwrap();
    let r1 = modp(&((-b + &s) * &inv2), p);
    let r2 = modp(&((-b - &s) * &inv2), p);
    if r1 == r2 {
        vec![r1]
    } else {
        let (lo, hi) = if r1 < r2 { (r1, r2) } else { (r2, r1) };
        vec![lo, hi]
    }
}

/// Hensel lift of a simple root `r` of `X² + bX + c` from mod `p` to mod `p^k`.
pub fn hensel_lift_quadratic(b: &BigInt, c: &BigInt, r: &BigInt, p: &BigInt, k: u32) -> BigInt {
    let pk = p.pow(k);
    let mut x = modp(r, &pk);
    let mut prec = 1u32;
    while prec < k {
        prec = (2 * prec).min(k);
        let m = p.pow(prec);
        let f = &x * &x + b * &x + c;
        let df = BigInt::from(2) * &x + b;
        let inv = mod_inverse(&df, &m).expect("root must be simple");
        x = modp(&(&x - f * inv), &m);
    }
    x
}

/// Integer square root test.
pub fn is_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let r = n.sqrt();
    &r * &r == *n
}

/// `⌈n/d⌉` for `d > 0`.
pub fn ceil_div(n: &BigInt, d: &BigInt) -> BigInt {
    n.div_ceil(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn tonelli_shanks_small_primes() {
        for p in [3i64, 5, 7, 13, 17, 41, 97, 257] {
            for a in 0..p {
                let r = sqrt_mod_prime(&b(a), &b(p));
                let is_qr = (0..p).any(|x| (x * x) % p == a);
                assert_eq!(r.is_some(), is_qr, "a={a} p={p}");
                if let Some(r) = r {
                    assert_eq!((&r * &r) % b(p), b(a));
                }
            }
        }
    }

    #[test]
    fn jacobi_matches_euler() {
        for p in [3i64, 5, 7, 11, 13, 101] {
            for a in 1..p {
                let e = b(a).modpow(&b((p - 1) / 2), &b(p));
                let expect = if e.is_one() { 1 } else { -1 };
                assert_eq!(jacobi(&b(a), &b(p)), expect);
            }
        }
    }

    #[test]
    fn crt_combines() {
        let (x, m) = crt(&[(b(2), b(3)), (b(3), b(5)), (b(2), b(7))]);
        assert_eq!(m, b(105));
        assert_eq!(x, b(23));
    }

    #[test]
    fn hensel_lifts_roots() {
        let p = b(7);
        for r in quadratic_roots_mod_prime(&b(0), &b(-2), &p) {
            let x = hensel_lift_quadratic(&b(0), &b(-2), &r, &p, 6);
            let m = p.pow(6);
            assert!(modp(&(&x * &x - 2), &m).is_zero());
        }
    }
}
