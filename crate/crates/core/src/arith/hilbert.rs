use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::modular::{legendre, modp, valuation};

/// A place of ℚ.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Place {
    Finite(BigInt),
    Infinite,
}

impl Place {
    pub fn prime(p: u64) -> Self {
        Place::Finite(BigInt::from(p))
    }
}

fn eps2(u: &BigInt) -> u32 {
    // (u - 1)/2 mod 2 for odd u
    let r = modp(u, &BigInt::from(4));
    if r == BigInt::from(1) {
        0
    } else {
        1
    }
}

fn omega2(u: &BigInt) -> u32 {
    // (u² - 1)/8 mod 2 for odd u
    let r = modp(u, &BigInt::from(8));
    if r == BigInt::from(1) || r == BigInt::from(7) {
        0
    } else {
        1
    }
}

/// Hilbert symbol `(a,b)_v`: +1 iff the algebra `(a,b/ℚ)` splits at `v`.
pub fn hilbert_symbol(a: &BigInt, b: &BigInt, place: &Place) -> i32 {
    assert!(!a.is_zero() && !b.is_zero(), "hilbert symbol of zero");
    match place {
        Place::Infinite => {
            if a.is_negative() && b.is_negative() {
                -1
            } else {
                1
            }
        }
        Place::Finite(p) => {
            let (alpha, u) = valuation(a, p);
            let (beta, v) = valuation(b, p);
            if *p == BigInt::from(2) {
                let e = eps2(&u) * eps2(&v) + alpha * omega2(&v) + beta * omega2(&u);
                if e.is_multiple_of(2) {
                    1
                } else {
                    -1
                }
            } else {
                let pm: BigInt = (p - 1u32) / 2u32;
                let mut s = if (alpha * beta) % 2 == 1 && pm.is_odd() { -1 } else { 1 };
                if beta % 2 == 1 {
                    s *= legendre(&u, p);
                }
                if alpha % 2 == 1 {
                    s *= legendre(&v, p);
                }
                s
            }
        }
    }
}

/// Finite primes where `(a,b/ℚ)` ramifies, ascending.
pub fn ramified_primes(a: &BigInt, b: &BigInt) -> Vec<BigInt> {
    let mut cand: Vec<BigInt> = vec![BigInt::from(2)];
    for n in [a, b] {
        let f = super::factor::factor_integer(n).expect("parameters must be factorable");
        for p in f.primes() {
            if !cand.contains(p) {
                cand.push(p.clone());
            }
        }
    }
    cand.sort();
    cand.into_iter()
        .filter(|p| hilbert_symbol(a, b, &Place::Finite(p.clone())) == -1)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(x: i64) -> BigInt {
        BigInt::from(x)
    }

    fn brute_split(a: i64, bb: i64, p: i64) -> bool {
        // isotropy of <1,-a,-b,ab> is equivalent to solubility of z² = a x² + b y²;
        // mod p^3 with a primitive solution is enough for small parameters
        let m = p * p * p;
        let mut unit_square = vec![false; m as usize];
        let mut any_square = vec![false; m as usize];
        for z in 0..m {
            let s = ((z * z) % m) as usize;
            any_square[s] = true;
            if z % p != 0 {
                unit_square[s] = true;
            }
        }
        for x in 0..m {
            for y in 0..m {
                let rhs = (a * x * x + bb * y * y).rem_euclid(m) as usize;
                let primitive_xy = x % p != 0 || y % p != 0;
                if (primitive_xy && any_square[rhs]) || unit_square[rhs] {
                    return true;
                }
            }
        }
        false
    }

    #[test]
    fn example_values() {
        assert_eq!(hilbert_symbol(&b(3), &b(-1), &Place::prime(2)), -1);
        assert_eq!(hilbert_symbol(&b(3), &b(-1), &Place::prime(3)), -1);
        assert_eq!(hilbert_symbol(&b(3), &b(-1), &Place::prime(5)), 1);
        for p in [2u64, 3, 5, 7, 11] {
            assert_eq!(hilbert_symbol(&b(1), &b(1), &Place::prime(p)), 1);
        }
        assert_eq!(ramified_primes(&b(3), &b(-1)), vec![b(2), b(3)]);
        assert!(ramified_primes(&b(1), &b(1)).is_empty());
    }

    #[test]
    fn brute_force_small_primes() {
        for (a, bb) in [(3, -1), (17, -1), (5, 7), (-3, 7), (2, 5), (6, -5)] {
            for p in [3i64, 5, 7] {
                let h = hilbert_symbol(&b(a), &b(bb), &Place::prime(p as u64));
                assert_eq!(h == 1, brute_split(a, bb, p), "({a},{bb})_{p}");
            }
        }
    }
}
