use std::fmt;
use std::sync::OnceLock;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

const TRIAL_BOUND: u32 = 1_000_000;
const DEFAULT_MAX_DIGITS: usize = 40;

/// Signed integer with its prime factorization.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FactoredInteger {
    sign: i8,
    factors: Vec<(BigInt, u32)>,
}

impl FactoredInteger {
    pub fn one() -> Self {
        FactoredInteger { sign: 1, factors: Vec::new() }
    }

    /// Builds from parts, merging repeated primes and sorting.
    pub fn from_parts(sign: i8, factors: impl IntoIterator<Item = (BigInt, u32)>) -> Self {
        let mut fs: Vec<(BigInt, u32)> = factors.into_iter().filter(|(_, e)| *e > 0).collect();
        fs.sort();
        let mut merged: Vec<(BigInt, u32)> = Vec::with_capacity(fs.len());
        for (p, e) in fs {
            match merged.last_mut() {
                Some((q, f)) if *q == p => *f += e,
                _ => merged.push((p, e)),
            }
        }
        FactoredInteger { sign: if sign < 0 { -1 } else { 1 }, factors: merged }
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn factors(&self) -> &[(BigInt, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = &BigInt> {
        self.factors.iter().map(|(p, _)| p)
    }

    pub fn valuation(&self, p: &BigInt) -> u32 {
        self.factors.iter().find(|(q, _)| q == p).map_or(0, |(_, e)| *e)
    }

    pub fn value(&self) -> BigInt {
        let mut v = BigInt::from(self.sign);
        for (p, e) in &self.factors {
            v *= p.pow(*e);
        }
        v
    }

    pub fn abs(&self) -> Self {
        FactoredInteger { sign: 1, factors: self.factors.clone() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        FactoredInteger::from_parts(
            self.sign * other.sign,
            self.factors.iter().chain(other.factors.iter()).cloned(),
        )
    }

    pub fn pow(&self, k: u32) -> Self {
        FactoredInteger {
            sign: if k.is_multiple_of(2) { 1 } else { self.sign },
            factors: self.factors.iter().map(|(p, e)| (p.clone(), e * k)).collect(),
        }
    }

    pub fn is_one(&self) -> bool {
        self.sign == 1 && self.factors.is_empty()
    }
}

impl fmt::Display for FactoredInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sign < 0 {
            write!(f, "-")?;
        }
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        for (i, (p, e)) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            if *e == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{e}")?;
            }
        }
        Ok(())
    }
}

fn small_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let n = TRIAL_BOUND as usize;
        let mut sieve = vec![true; n + 1];
        sieve[0] = false;
        sieve[1] = false;
        let mut i = 2;
        while i * i <= n {
            if sieve[i] {
                let mut j = i * i;
                while j <= n {
                    sieve[j] = false;
                    j += i;
                }
            }
            i += 1;
        }
        (0..=n).filter(|&k| sieve[k]).map(|k| k as u32).collect()
    })
}

/// All primes up to `bound` (at most the trial-division bound).
pub fn primes_up_to(bound: u32) -> Vec<u32> {
    small_primes().iter().copied().take_while(|&p| p <= bound).collect()
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, m);
        }
        a = mulmod(a, a, m);
        e >>= 1;
    }
    r
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'outer: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Miller–Rabin; deterministic below 3.3·10²⁴, probabilistic with many bases above.
pub fn is_prime(n: &BigInt) -> bool {
    if n.sign() != Sign::Plus {
        return false;
    }
    if let Some(m) = n.to_u64() {
        return is_prime_u64(m);
    }
    for &p in small_primes().iter().take(200) {
        if (n % p).is_zero() {
            return false;
        }
    }
    let one = BigInt::one();
    let nm1: BigInt = n - 1u32;
    let mut d = nm1.clone();
    let mut s = 0;
    while d.is_even() {
        d >>= 1;
        s += 1;
    }
    'outer: for &a in small_primes().iter().take(24) {
        let mut x = BigInt::from(a).modpow(&d, n);
        if x == one || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == nm1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

fn rho_u64(n: u64) -> u64 {
    if n.is_multiple_of(2) {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mulmod(x, x, n) + c) % n;
        let (mut x, mut y, mut g) = (2u64, 2u64, 1u64);
        let mut q = 1u64;
        let mut r = 1u64;
        let mut ys = 2u64;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..std::cmp::min(128, r - k) {
                    y = f(y);
                    q = mulmod(q, x.abs_diff(y), n);
                }
                g = q.gcd(&n);
                k += 128;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = x.abs_diff(ys).gcd(&n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

fn rho_big(n: &BigInt) -> BigInt {
    let mut c = BigInt::one();
    loop {
        let f = |x: &BigInt| (x * x + &c) % n;
        let mut y = BigInt::from(2);
        let mut x = y.clone();
        let mut g = BigInt::one();
        let mut q = BigInt::one();
        let mut ys = y.clone();
        let mut r: u64 = 1;
        while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g.is_one() {
                ys = y.clone();
                for _ in 0..std::cmp::min(128, r - k) {
                    y = f(&y);
                    q = (q * (&x - &y).abs()) % n;
                }
                g = q.gcd(n);
                k += 128;
            }
            r *= 2;
        }
        if g == *n {
            loop {
                ys = f(&ys);
                g = (&x - &ys).abs().gcd(n);
                if !g.is_one() {
                    break;
                }
            }
        }
        if g != *n {
            return g;
        }
        c += 1u32;
    }
}

fn split_composite(n: &BigInt, max_digits: usize, out: &mut Vec<(BigInt, u32)>) -> Result<()> {
    if n.is_one() {
        return Ok(());
    }
    if is_prime(n) {
        out.push((n.clone(), 1));
        return Ok(());
    }
    if n.to_string().len() > max_digits {
        return Err(Error::FactorizationCap(n.to_string()));
    }
    let d = match n.to_u64() {
        Some(m) => BigInt::from(rho_u64(m)),
        None => rho_big(n),
    };
    split_composite(&d, max_digits, out)?;
    split_composite(&(n / &d), max_digits, out)
}

/// Exact factorization with the default 40-digit composite cap.
pub fn factor_integer(n: &BigInt) -> Result<FactoredInteger> {
    factor_integer_capped(n, DEFAULT_MAX_DIGITS)
}

/// Exact factorization; fails on composite cofactors above `max_digits` digits.
pub fn factor_integer_capped(n: &BigInt, max_digits: usize) -> Result<FactoredInteger> {
    if n.is_zero() {
        return Err(Error::InvalidInput("cannot factor 0".into()));
    }
    let sign = if n.is_negative() { -1 } else { 1 };
    let mut m = n.abs();
    let mut out = Vec::new();
    if let Some(mut small) = m.to_u64() {
        for &p in small_primes() {
            let p = p as u64;
            if p * p > small {
                break;
            }
            if small % p == 0 {
                let mut e = 0;
                while small % p == 0 {
                    small /= p;
                    e += 1;
                }
                out.push((BigInt::from(p), e));
            }
        }
        m = BigInt::from(small);
    } else {
        for &p in small_primes() {
            if (&m % p).is_zero() {
                let mut e = 0;
                while (&m % p).is_zero() {
                    m /= p;
                    e += 1;
                }
                out.push((BigInt::from(p), e));
            }
            if m.is_one() {
                break;
            }
            let pb = BigInt::from(p);
            if &pb * &pb > m {
                break;
            }
        }
    }
    if !m.is_one() {
        let mut rest = Vec::new();
        split_composite(&m, max_digits, &mut rest)?;
        out.extend(rest);
    }
    Ok(FactoredInteger::from_parts(sign, out))
}

/// Divides out the listed primes; returns the exponents and the leftover cofactor.
pub fn trial_divide(n: &BigInt, primes: &[BigInt]) -> (Vec<u32>, BigInt) {
    let mut m = n.abs();
    let mut exps = Vec::with_capacity(primes.len());
    for p in primes {
        let mut e = 0;
        if !m.is_zero() {
            loop {
                let (q, r) = m.div_rem(p);
                if !r.is_zero() {
                    break;
                }
                m = q;
                e += 1;
            }
        }
        exps.push(e);
    }
    (exps, m)
}

/// Squarefree part and square root of the square part: `n = s·r²` with `s` squarefree.
pub fn squarefree_decomposition(n: &BigInt) -> Result<(BigInt, BigInt)> {
    let f = factor_integer(n)?;
    let mut s = BigInt::from(f.sign());
    let mut r = BigInt::one();
    for (p, e) in f.factors() {
        if e % 2 == 1 {
            s *= p;
        }
        r *= p.pow(e / 2);
    }
    Ok((s, r))
}

/// Positive divisors of a factored integer, ascending.
pub fn divisors(f: &FactoredInteger) -> Vec<BigInt> {
    let mut ds = vec![BigInt::one()];
    for (p, e) in f.factors() {
        let mut next = Vec::with_capacity(ds.len() * (*e as usize + 1));
        for d in &ds {
            let mut pk = BigInt::one();
            for _ in 0..=*e {
                next.push(d * &pk);
                pk *= p;
            }
        }
        ds = next;
    }
    ds.sort();
    ds
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn factors_small_values() {
        let f = factor_integer(&b(12)).unwrap();
        assert_eq!(f.sign(), 1);
        assert_eq!(f.factors(), &[(b(2), 2), (b(3), 1)]);
        let f = factor_integer(&b(-19)).unwrap();
        assert_eq!(f.sign(), -1);
        assert_eq!(f.factors(), &[(b(19), 1)]);
        let f = factor_integer(&b(36)).unwrap();
        assert_eq!(f.factors(), &[(b(2), 2), (b(3), 2)]);
        assert_eq!(f.value(), b(36));
    }

    #[test]
    fn factors_beyond_trial_bound() {
        let p = BigInt::from(1_000_003u64);
        let q = BigInt::from(998_244_353u64);
        let r: BigInt = "1000000000000000003".parse().unwrap();
        let n = &p * &q * &r * &p;
        let f = factor_integer(&n).unwrap();
        assert_eq!(f.value(), n);
        assert_eq!(f.valuation(&p), 2);
        assert!(f.primes().all(is_prime));
    }

    #[test]
    fn primality_agrees_with_sieve() {
        let ps = primes_up_to(5000);
        for n in 0..5000u32 {
            assert_eq!(is_prime(&BigInt::from(n)), ps.binary_search(&n).is_ok(), "{n}");
        }
    }

    #[test]
    fn digit_cap_is_enforced() {
        let p: BigInt = "170141183460469231731687303715884105727".parse().unwrap();
        let q: BigInt = "618970019642690137449562111".parse().unwrap();
        assert!(matches!(
            factor_integer_capped(&(&p * &q), 40),
            Err(Error::FactorizationCap(_))
        ));
    }

    #[test]
    fn squarefree_parts() {
        assert_eq!(squarefree_decomposition(&b(72)).unwrap(), (b(2), b(6)));
        assert_eq!(squarefree_decomposition(&b(-45)).unwrap(), (b(-5), b(3)));
    }
}
