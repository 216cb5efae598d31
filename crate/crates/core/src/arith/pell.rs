use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Default cap on the decimal size of a fundamental unit.
pub const DEFAULT_UNIT_DIGITS: usize = 4000;

/// A unit `(x + y√d)/2` of the order `ℤ + f·ℤ_K` in `K = ℚ(√d)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadUnit {
    pub d: BigInt,
    pub conductor: BigInt,
    pub x: BigInt,
    pub y: BigInt,
}

impl QuadUnit {
    /// `x² − d y²` divided by 4, i.e. the field norm.
    pub fn norm(&self) -> BigInt {
        (&self.x * &self.x - &self.d * &self.y * &self.y) / 4
    }

    /// Approximate real value, for ordering.
    pub fn approx(&self) -> f64 {
        let dx = num_traits::ToPrimitive::to_f64(&self.x).unwrap_or(f64::INFINITY);
        let dy = num_traits::ToPrimitive::to_f64(&self.y).unwrap_or(f64::INFINITY);
        let sd = num_traits::ToPrimitive::to_f64(&self.d).unwrap().sqrt();
        (dx + dy * sd) / 2.0
    }
}

/// Discriminant of the order of conductor `f` in `ℚ(√d)`.
pub fn order_discriminant(d: &BigInt, f: &BigInt) -> BigInt {
    let fund = if d.mod_floor(&BigInt::from(4)) == BigInt::one() { d.clone() } else { d * 4 };
    fund * f * f
}

/// Fundamental unit of `ℤ + f·ℤ_K` for real quadratic `K = ℚ(√d)`.
pub fn pell_fundamental_unit(d: &BigInt, conductor: &BigInt) -> Result<QuadUnit> {
    pell_fundamental_unit_capped(d, conductor, DEFAULT_UNIT_DIGITS)
}

/// As [`pell_fundamental_unit`], failing once the convergents exceed `max_digits` digits.
pub fn pell_fundamental_unit_capped(
    d: &BigInt,
    conductor: &BigInt,
    max_digits: usize,
) -> Result<QuadUnit> {
    if *d <= BigInt::one() || !conductor.is_positive() {
        return Err(Error::InvalidInput(format!("pell: d={d} f={conductor}")));
    }
    let disc = order_discriminant(d, conductor);
    let s = disc.sqrt();
    if &s * &s == disc {
        return Err(Error::InvalidInput(format!("pell: {d} not squarefree")));
    }
    let bits_cap = (max_digits as f64 * std::f64::consts::LOG2_10) as u64 + 8;
    // reduced start (σ + √Δ)/2: largest σ < √Δ with σ ≡ Δ mod 2
    let mut sigma = s.clone();
    if (&sigma - &disc).is_odd() {
        sigma -= 1u32;
    }
    let p0 = sigma.clone();
    let q0 = BigInt::from(2);
    let (mut p, mut q) = (p0.clone(), q0.clone());
    // q_{n-2}, q_{n-1} with q_{-2} = 1, q_{-1} = 0
    let (mut qm2, mut qm1) = (BigInt::one(), BigInt::zero());
    loop {
        let a = (&p + &s).div_floor(&q);
        let qn = &a * &qm1 + &qm2;
        qm2 = std::mem::replace(&mut qm1, qn);
        if qm1.bits() > bits_cap {
            return Err(Error::SizeCap(format!("fundamental unit of disc {disc}")));
        }
        let pn = &a * &q - &p;
        let qn = (&disc - &pn * &pn) / &q;
        p = pn;
        q = qn;
        if p == p0 && q == q0 {
            break;
        }
    }
    // ε = q_{l-1}·x₀ + q_{l-2}, x₀ = (σ + √Δ)/2, √Δ = g·√d
    let g = (&disc / d).sqrt();
    let x = &qm1 * &sigma + 2 * &qm2;
    let y = &qm1 * g;
    let u = QuadUnit { d: d.clone(), conductor: conductor.clone(), x, y };
    debug_assert!(u.norm().abs().is_one());
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn documented_values() {
        let u = pell_fundamental_unit(&b(3), &b(1)).unwrap();
        assert_eq!((u.x.clone(), u.y.clone()), (b(4), b(2)));
        assert_eq!(u.norm(), b(1));
        let u = pell_fundamental_unit(&b(2), &b(1)).unwrap();
        assert_eq!((u.x.clone(), u.y.clone()), (b(2), b(2)));
        assert_eq!(u.norm(), b(-1));
        let u = pell_fundamental_unit(&b(5), &b(2)).unwrap();
        assert_eq!((u.x.clone(), u.y.clone()), (b(4), b(2)));
        assert_eq!(u.norm(), b(-1));
        let u = pell_fundamental_unit(&b(5), &b(1)).unwrap();
        assert_eq!((u.x.clone(), u.y.clone()), (b(1), b(1)));
    }

    fn is_unit_y(disc: i64, y: i64) -> bool {
        // some x with x² − Δy² = ±4 and x ≡ Δy mod 2
        for sgn in [4i64, -4] {
            let t = disc as i128 * (y as i128) * (y as i128) + sgn as i128;
            if t < 0 {
                continue;
            }
            let r = (t as f64).sqrt() as i128;
            for x in [r - 1, r, r + 1] {
                if x >= 0 && x * x == t {
                    return true;
                }
            }
        }
        false
    }

    fn is_proper_power(u: &QuadUnit, disc: &BigInt) -> bool {
        // u = ε^k with k ≥ 2 for a unit ε of the same order
        let ln = u.approx().ln();
        let g = (disc / &u.d).sqrt();
        let sd = (disc.to_string().parse::<f64>().unwrap()).sqrt();
        for k in 2..=((ln / 0.48).ceil() as u32) {
            let r = (ln / k as f64).exp();
            for nrm in [1.0f64, -1.0] {
                let tr = (r + nrm / r).round();
                let yd = ((r - nrm / r) / sd).round();
                if yd < 1.0 {
                    continue;
                }
                let x = num_traits::FromPrimitive::from_f64(tr).unwrap();
                let y = <BigInt as num_traits::FromPrimitive>::from_f64(yd).unwrap() * &g;
                let e = QuadUnit { d: u.d.clone(), conductor: u.conductor.clone(), x, y };
                if !e.norm().abs().is_one() {
                    continue;
                }
                let mut acc = (BigInt::from(2), BigInt::zero());
                for _ in 0..k {
                    acc = (
                        (&acc.0 * &e.x + &u.d * &acc.1 * &e.y) / 2,
                        (&acc.0 * &e.y + &acc.1 * &e.x) / 2,
                    );
                }
                if acc.0 == u.x && acc.1 == u.y {
                    return true;
                }
            }
        }
        false
    }

    #[test]
    fn minimal_up_to_200() {
        for d in 2..=200i64 {
            let (sd, r) = crate::arith::squarefree_decomposition(&b(d)).unwrap();
            if !r.is_one() || sd.is_one() {
                continue;
            }
            for f in [1i64, 2, 3] {
                let u = pell_fundamental_unit(&b(d), &b(f)).unwrap();
                assert!(u.norm().abs().is_one());
                assert!(u.x.is_positive() && u.y.is_positive());
                let disc = order_discriminant(&b(d), &b(f));
                let g = (&disc / b(d)).sqrt();
                let ydisc = &u.y / &g;
                let limit: i64 = num_traits::ToPrimitive::to_i64(&ydisc).unwrap_or(i64::MAX).min(20_000);
                let di = num_traits::ToPrimitive::to_i64(&disc).unwrap();
                for yy in 1..limit {
                    assert!(!is_unit_y(di, yy), "smaller unit for d={d} f={f} y={yy}");
                }
                assert!(!is_proper_power(&u, &disc), "d={d} f={f}");
            }
        }
    }
}
