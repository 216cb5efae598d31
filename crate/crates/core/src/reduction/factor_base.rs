use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::arith::primes_up_to;
use crate::quat::QuatAlgebra;

/// Primes up to a bound, flagged split or ramified in the algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorBase {
    primes: Vec<BigInt>,
    split: Vec<bool>,
    bound: u32,
}

/// `L(x) = exp(√(log x · log log x))`.
pub fn subexp_l(x: f64) -> f64 {
    let lx = x.max(3.0).ln();
    (lx * lx.ln()).sqrt().exp()
}

/// `max(17, ⌈L(Δ)^{1/2}⌉)`.
pub fn default_bound(delta: &BigInt) -> u32 {
    let d = delta.to_f64().unwrap_or(f64::MAX);
    let b = subexp_l(d).sqrt().ceil();
    (b.min(1e6) as u32).max(17)
}

impl FactorBase {
    pub fn new(alg: &QuatAlgebra, bound: Option<u32>) -> Self {
        let bound = bound.unwrap_or_else(|| default_bound(&alg.disc()));
        let primes: Vec<BigInt> = primes_up_to(bound).into_iter().map(BigInt::from).collect();
        let split = primes.iter().map(|p| !alg.is_ramified(p)).collect();
        FactorBase { primes, split, bound }
    }

    pub fn primes(&self) -> &[BigInt] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn bound(&self) -> u32 {
        self.bound
    }

    pub fn is_split(&self, k: usize) -> bool {
        self.split[k]
    }

    pub fn split_primes(&self) -> impl Iterator<Item = &BigInt> {
        self.primes.iter().zip(&self.split).filter(|(_, s)| **s).map(|(p, _)| p)
    }

    pub fn position(&self, p: &BigInt) -> Option<usize> {
        self.primes.iter().position(|q| q == p)
    }

    pub fn max_prime(&self) -> BigInt {
        self.primes.last().cloned().unwrap_or_else(|| BigInt::from(1))
    }
}

/// Factor base for `alg`; the default bound is `max(17, ⌈L(Δ)^{1/2}⌉)`.
pub fn build_factor_base(alg: &QuatAlgebra, bound: Option<u32>) -> FactorBase {
    FactorBase::new(alg, bound)
}
