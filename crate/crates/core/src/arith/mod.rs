//! Integer and rational utilities: factorization, symbols, modular arithmetic
//! and real quadratic units.

mod factor;
mod hilbert;
mod modular;
mod pell;

pub use factor::{
    divisors, factor_integer, factor_integer_capped, is_prime, primes_up_to,
    squarefree_decomposition, trial_divide, FactoredInteger,
};
pub use hilbert::{hilbert_symbol, ramified_primes, Place};
pub use modular::{
    ceil_div, crt, hensel_lift_quadratic, is_square, jacobi, kronecker_prime, legendre,
    mod_inverse, modp, quadratic_roots_mod_prime, sqrt_mod_prime, val, valuation,
};
pub use pell::{
    order_discriminant, pell_fundamental_unit, pell_fundamental_unit_capped, QuadUnit,
    DEFAULT_UNIT_DIGITS,
};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Exact rational from integer parts.
pub fn rat(n: impl Into<BigInt>, d: impl Into<BigInt>) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// `p`-adic valuation of a nonzero rational.
pub fn rat_valuation(q: &BigRational, p: &BigInt) -> i64 {
    assert!(!q.is_zero());
    valuation(q.numer(), p).0 as i64 - valuation(q.denom(), p).0 as i64
}

pub fn big(x: i64) -> BigInt {
    BigInt::from(x)
}

pub fn is_one_rat(q: &BigRational) -> bool {
    q.is_one()
}
