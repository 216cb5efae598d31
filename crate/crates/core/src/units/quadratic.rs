use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::{
    divisors, factor_integer, hensel_lift_quadratic, kronecker_prime, mod_inverse, quadratic_roots_mod_prime,
    squarefree_decomposition, valuation, FactoredInteger, QuadUnit,
};
use crate::error::{Error, Result};
use crate::quat::{Order, QuatElement};

/// `a + b·ω` in `ℤ_K = ℤ[ω]`, `ω = (D + √D)/2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadElem {
    pub a: BigInt,
    pub b: BigInt,
}

impl QuadElem {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>) -> Self {
        QuadElem { a: a.into(), b: b.into() }
    }

    pub fn one() -> Self {
        QuadElem::new(1, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    fn reduce(&self, m: &BigInt) -> QuadElem {
        QuadElem { a: self.a.mod_floor(m), b: self.b.mod_floor(m) }
    }

    fn scale(&self, s: &BigInt) -> QuadElem {
        QuadElem { a: &self.a * s, b: &self.b * s }
    }
}

impl fmt::Display for QuadElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+{}w", self.a, self.b)
    }
}

/// Splitting type of a prime in `K`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrimeType {
    Split,
    Inert,
    Ramified,
}

/// A real or imaginary quadratic field `K = ℚ(√d)` embedded in the algebra,
/// together with the suborder `ℛ = ℤ + f·ℤ_K` it meets a given order in.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticContext {
    d: BigInt,
    disc: BigInt,
    conductor: BigInt,
    conductor_factored: FactoredInteger,
    // image of ω in the algebra
    omega: QuatElement,
    // least q with q·ℛ inside the reference order
    ref_den: BigInt,
}

impl QuadraticContext {
    /// The field `ℚ(x)` for a non-central `x` of the host order (integral
    /// trace and norm), with `ℛ = ℤ_K ∩ host`; `reference` is the order whose
    /// ideals the units will multiply.
    pub fn from_element(x: &QuatElement, host: &Order, reference: &Order) -> Result<Self> {
        let alg = host.alg();
        let t = x.trd();
        let n = alg.nrd(x);
        if !t.is_integer() || !n.is_integer() || x.is_scalar() {
            return Err(Error::Precondition(format!("{x} does not generate a quadratic order")));
        }
        let (t, n) = (t.to_integer(), n.to_integer());
        let dx = &t * &t - BigInt::from(4) * &n;
        if dx.is_zero() {
            return Err(Error::Precondition(format!("{x} has a repeated root")));
        }
        let (d, _) = squarefree_decomposition(&dx)?;
        if d.is_one() {
            return Err(Error::Precondition(format!("{x} is split over ℚ")));
        }
        let disc = if d.mod_floor(&BigInt::from(4)).is_one() { d.clone() } else { &d * 4 };
        // dx = fx²·disc
        let fx = (&dx / &disc).abs().sqrt();
        debug_assert_eq!(&fx * &fx * &disc, dx);
        // √disc = (2x − t)/fx
        let sqrt_disc = x
            .scale_int(&BigInt::from(2))
            .sub(&QuatElement::integer(t.clone()))
            .scale(&BigRational::new(BigInt::one(), fx.clone()));
        let omega = QuatElement::integer(disc.clone())
            .add(&sqrt_disc)
            .scale(&BigRational::new(BigInt::one(), BigInt::from(2)));
        let ffx = factor_integer(&fx)?;
        let mut conductor = fx.clone();
        for g in divisors(&ffx) {
            if host.contains(&omega.scale_int(&g)) {
                conductor = g;
                break;
            }
        }
        let conductor_factored = factor_integer(&conductor)?;
        let w = omega.scale_int(&conductor);
        let ref_den = element_denominator(&w, reference);
        Ok(QuadraticContext { d, disc, conductor, conductor_factored, omega, ref_den })
    }

    /// Rebuilds a context from stored data, checking that `ω` satisfies
    /// `ω² = Dω − (D² − D)/4` and that `f·ω` lies in `host`.
    pub fn from_parts(
        d: BigInt,
        conductor: BigInt,
        omega: QuatElement,
        ref_den: BigInt,
        host: &Order,
        reference: &Order,
    ) -> Result<Self> {
        let disc = if d.mod_floor(&BigInt::from(4)).is_one() { d.clone() } else { &d * 4 };
        let conductor_factored = factor_integer(&conductor)?;
        let ctx = QuadraticContext { d, disc, conductor, conductor_factored, omega, ref_den };
        let alg = host.alg();
        let w = ctx.omega.scale_int(&ctx.conductor);
        let ok = ctx.omega.trd() == BigRational::from_integer(ctx.disc.clone())
            && alg.nrd(&ctx.omega) == BigRational::from_integer(ctx.omega_norm())
            && host.contains(&w)
            && element_denominator(&w, reference) == ctx.ref_den;
        if !ok {
            return Err(Error::invariant("stored quadratic context is inconsistent"));
        }
        Ok(ctx)
    }

    pub fn d(&self) -> &BigInt {
        &self.d
    }

    pub fn disc(&self) -> &BigInt {
        &self.disc
    }

    pub fn conductor(&self) -> &BigInt {
        &self.conductor
    }

    pub fn conductor_factored(&self) -> &FactoredInteger {
        &self.conductor_factored
    }

    pub fn omega(&self) -> &QuatElement {
        &self.omega
    }

    /// Least `q` with `q·ℛ` inside the reference order.
    pub fn reference_denominator(&self) -> &BigInt {
        &self.ref_den
    }

    pub fn is_real(&self) -> bool {
        self.d.is_positive()
    }

    /// `N(ω)`; `ω² = D·ω − N(ω)`.
    fn omega_norm(&self) -> BigInt {
        (&self.disc * &self.disc - &self.disc) / 4
    }

    pub fn mul(&self, x: &QuadElem, y: &QuadElem) -> QuadElem {
        let n = self.omega_norm();
        let bb = &x.b * &y.b;
        QuadElem { a: &x.a * &y.a - &bb * &n, b: &x.a * &y.b + &x.b * &y.a + bb * &self.disc }
    }

    fn mul_mod(&self, x: &QuadElem, y: &QuadElem, m: &BigInt) -> QuadElem {
        self.mul(x, y).reduce(m)
    }

    pub fn conj(&self, x: &QuadElem) -> QuadElem {
        QuadElem { a: &x.a + &x.b * &self.disc, b: -&x.b }
    }

    pub fn norm(&self, x: &QuadElem) -> BigInt {
        &x.a * &x.a + &x.a * &x.b * &self.disc + &x.b * &x.b * self.omega_norm()
    }

    pub fn trace(&self, x: &QuadElem) -> BigInt {
        BigInt::from(2) * &x.a + &x.b * &self.disc
    }

    pub fn embed(&self, x: &QuadElem) -> QuatElement {
        QuatElement::integer(x.a.clone()).add(&self.omega.scale_int(&x.b))
    }

    /// `(X + Y√d)/2` in the `ω` basis.
    pub fn from_half(&self, x: &BigInt, y: &BigInt) -> Result<QuadElem> {
        // √d = √D when D = d, else √D/2; √D = 2ω − D
        let (num_a, num_b, den) = if self.disc == self.d {
            // (X + Y(2ω − D))/2
            (x - y * &self.disc, BigInt::from(2) * y, BigInt::from(2))
        } else {
            // (X + Y(2ω − D)/2)/2
            (BigInt::from(2) * x - y * &self.disc, BigInt::from(2) * y, BigInt::from(4))
        };
        if !(&num_a % &den).is_zero() || !(&num_b % &den).is_zero() {
            return Err(Error::invariant("quadratic element is not integral"));
        }
        Ok(QuadElem { a: num_a / &den, b: num_b / den })
    }

    pub fn from_unit(&self, u: &QuadUnit) -> Result<QuadElem> {
        self.from_half(&u.x, &u.y)
    }

    pub fn in_suborder(&self, x: &QuadElem) -> bool {
        (&x.b % &self.conductor).is_zero()
    }

    pub fn prime_type(&self, l: &BigInt) -> PrimeType {
        match kronecker_prime(&self.disc, l) {
            1 => PrimeType::Split,
            -1 => PrimeType::Inert,
            _ => PrimeType::Ramified,
        }
    }

    /// `x^e mod m` for `x` invertible mod `m` (any sign of `e`).
    pub fn pow_mod(&self, x: &QuadElem, e: &BigInt, m: &BigInt) -> Result<QuadElem> {
        let base = if e.is_negative() { self.inverse_mod(x, m)? } else { x.reduce(m) };
        let mut acc = QuadElem::one().reduce(m);
        let bits = e.abs();
        for k in (0..bits.bits()).rev() {
            acc = self.mul_mod(&acc, &acc, m);
            if bits.bit(k) {
                acc = self.mul_mod(&acc, &base, m);
            }
        }
        Ok(acc)
    }

    pub fn inverse_mod(&self, x: &QuadElem, m: &BigInt) -> Result<QuadElem> {
        let n = self.norm(x);
        let inv = mod_inverse(&n, m).ok_or_else(|| Error::invariant("element not invertible modulo m"))?;
        Ok(self.conj(x).scale(&inv).reduce(m))
    }

    /// `∏ yᵢ^{eᵢ}` modulo `m·ℤ_K` for a product that is a unit at every
    /// prime dividing `m`.
    pub fn eval_product(&self, factors: &[(QuadElem, BigInt)], m: &BigInt) -> Result<QuadElem> {
        if m.is_one() {
            return Ok(QuadElem::new(0, 0));
        }
        if factors.iter().all(|(y, _)| self.norm(y).abs().is_one()) {
            let mut acc = QuadElem::one().reduce(m);
            for (y, e) in factors {
                acc = self.mul_mod(&acc, &self.pow_mod(y, e, m)?, m);
            }
            return Ok(acc);
        }
        let fm = factor_integer(m)?;
        let mut a_parts = Vec::new();
        let mut b_parts = Vec::new();
        for (l, w) in fm.factors() {
            let z = self.eval_at_prime(factors, l, *w)?;
            let lw = l.pow(*w);
            a_parts.push((z.a, lw.clone()));
            b_parts.push((z.b, lw));
        }
        let (a, _) = crate::arith::crt(&a_parts);
        let (b, _) = crate::arith::crt(&b_parts);
        Ok(QuadElem { a, b })
    }

    fn eval_at_prime(&self, factors: &[(QuadElem, BigInt)], l: &BigInt, w: u32) -> Result<QuadElem> {
        let lw = l.pow(w);
        match self.prime_type(l) {
            PrimeType::Split => {
                // the two embeddings ℤ_K → ℤ_l, ω ↦ r
                let nb = -&self.disc;
                let nc = self.omega_norm();
                let roots = quadratic_roots_mod_prime(&nb, &nc, l);
                if roots.len() != 2 {
                    return Err(Error::invariant("split prime without two roots"));
                }
                let mut images = Vec::with_capacity(2);
                for r0 in &roots {
                    let mut vsum = BigInt::zero();
                    let mut acc = BigInt::one();
                    for (y, e) in factors {
                        let extra = valuation(&self.norm(y).abs(), l).0;
                        let prec = w + extra;
                        let lp = l.pow(prec);
                        let r = hensel_lift_quadratic(&nb, &nc, r0, l, prec);
                        let img = (&y.a + &y.b * &r).mod_floor(&lp);
                        let v = if img.is_zero() {
                            return Err(Error::invariant("factor vanishes at a split prime"));
                        } else {
                            valuation(&img, l).0
                        };
                        let unit = (img / l.pow(v)).mod_floor(&lw);
                        vsum += BigInt::from(v) * e;
                        let u = if e.is_negative() {
                            mod_inverse(&unit, &lw).ok_or_else(|| Error::invariant("unit part not invertible"))?
                        } else {
                            unit
                        };
                        acc = (acc * pow_mod_int(&u, &e.abs(), &lw)).mod_floor(&lw);
                    }
                    if !vsum.is_zero() {
                        return Err(Error::invariant("compact representation is not a unit"));
                    }
                    images.push(acc);
                }
                let r1 = hensel_lift_quadratic(&nb, &nc, &roots[0], l, w);
                let r2 = hensel_lift_quadratic(&nb, &nc, &roots[1], l, w);
                let inv = mod_inverse(&(&r1 - &r2), &lw).expect("distinct roots mod l");
                let b = ((&images[0] - &images[1]) * inv).mod_floor(&lw);
                let a = (&images[0] - &b * &r1).mod_floor(&lw);
                Ok(QuadElem { a, b })
            }
            PrimeType::Inert => {
                let mut vsum = BigInt::zero();
                let mut acc = QuadElem::one();
                for (y, e) in factors {
                    let v = coeff_valuation(y, l);
                    let lv = l.pow(v);
                    let u = QuadElem { a: &y.a / &lv, b: &y.b / &lv };
                    vsum += BigInt::from(v) * e;
                    acc = self.mul_mod(&acc, &self.pow_mod(&u, e, &lw)?, &lw);
                }
                if !vsum.is_zero() {
                    return Err(Error::invariant("compact representation is not a unit"));
                }
                Ok(acc)
            }
            PrimeType::Ramified => {
                // ℓ = 𝔓²; any uniformizer π works since Σ eᵢ vᵢ = 0
                let pi = self.ramified_uniformizer(l);
                let pi_bar = self.conj(&pi);
                let npi = self.norm(&pi);
                let upi = &npi / l;
                let mut vsum = BigInt::zero();
                let mut acc = QuadElem::one();
                for (y, e) in factors {
                    let v = valuation(&self.norm(y).abs(), l).0;
                    // y·π^{-v} = (y·π̄^v / ℓ^v)·u_π^{-v}
                    let mut t = y.clone();
                    for _ in 0..v {
                        t = self.mul(&t, &pi_bar);
                    }
                    let lv = l.pow(v);
                    if !(&t.a % &lv).is_zero() || !(&t.b % &lv).is_zero() {
                        return Err(Error::invariant("uniformizer stripping failed"));
                    }
                    let t = QuadElem { a: &t.a / &lv, b: &t.b / &lv };
                    let uinv = mod_inverse(&upi.pow(v), &lw).expect("coprime to l");
                    let u = t.scale(&uinv).reduce(&lw);
                    vsum += BigInt::from(v) * e;
                    acc = self.mul_mod(&acc, &self.pow_mod(&u, e, &lw)?, &lw);
                }
                if !vsum.is_zero() {
                    return Err(Error::invariant("compact representation is not a unit"));
                }
                Ok(acc)
            }
        }
    }

    fn ramified_uniformizer(&self, l: &BigInt) -> QuadElem {
        let mut k = 0i64;
        loop {
            for c in [k, -k] {
                let pi = QuadElem::new(c, 1);
                let n = self.norm(&pi);
                if !n.is_zero() && valuation(&n.abs(), l).0 == 1 {
                    return pi;
                }
            }
            k += 1;
        }
    }

    /// Exact `∏ yᵢ^{eᵢ}` as a rational combination `(a + bω)/den`, refusing
    /// results beyond `max_digits` decimal digits.
    pub fn expand(&self, factors: &[(QuadElem, BigInt)], max_digits: usize) -> Result<(QuadElem, BigInt)> {
        let cap_bits = (max_digits as f64 * std::f64::consts::LOG2_10) as u64 + 8;
        let mut num = QuadElem::one();
        let mut den = BigInt::one();
        for (y, e) in factors {
            let ee = e.abs();
            let k: u64 = ee.try_into().map_err(|_| Error::SizeCap("exponent too large to expand".into()))?;
            let n = self.norm(y);
            if n.abs().bits() * k > cap_bits * 2 {
                return Err(Error::SizeCap(format!("expansion of a unit power exceeds {max_digits} digits")));
            }
            let mut p = QuadElem::one();
            let mut base = y.clone();
            let mut kk = k;
            while kk > 0 {
                if kk & 1 == 1 {
                    p = self.mul(&p, &base);
                }
                kk >>= 1;
                if kk > 0 {
                    base = self.mul(&base, &base);
                }
                if base.a.bits() > cap_bits || p.a.bits() > cap_bits {
                    return Err(Error::SizeCap(format!("expansion exceeds {max_digits} digits")));
                }
            }
            if e.is_negative() {
                // y^{-k} = ȳ^k / N(y)^k
                num = self.mul(&num, &self.conj(&p));
                den *= n.pow(k as u32);
            } else {
                num = self.mul(&num, &p);
            }
            if num.a.bits() > cap_bits || num.b.bits() > cap_bits {
                return Err(Error::SizeCap(format!("expansion exceeds {max_digits} digits")));
            }
        }
        if den.is_negative() {
            den = -den;
            num = num.scale(&BigInt::from(-1));
        }
        let g = num.a.gcd(&num.b).gcd(&den);
        if !g.is_one() && !g.is_zero() {
            num = QuadElem { a: &num.a / &g, b: &num.b / &g };
            den /= g;
        }
        Ok((num, den))
    }
}

fn coeff_valuation(y: &QuadElem, l: &BigInt) -> u32 {
    match (y.a.is_zero(), y.b.is_zero()) {
        (true, true) => 0,
        (true, false) => valuation(&y.b, l).0,
        (false, true) => valuation(&y.a, l).0,
        (false, false) => valuation(&y.a, l).0.min(valuation(&y.b, l).0),
    }
}

fn pow_mod_int(x: &BigInt, e: &BigInt, m: &BigInt) -> BigInt {
    x.modpow(e, m)
}

/// Least positive `q` with `q·x` in the order.
pub fn element_denominator(x: &QuatElement, o: &Order) -> BigInt {
    if o.contains(x) {
        return BigInt::one();
    }
    // O ⊇ det(B)/L·ℤ⁴ for the HNF rows B over L, so q | den(x)·det(B)
    let l = o.lattice();
    let det_b = (l.det() * BigRational::from_integer(l.den().pow(4))).to_integer().abs();
    let fb = factor_integer(&(x.den() * det_b)).expect("small denominators");
    for q in divisors(&fb) {
        if o.contains(&x.scale_int(&q)) {
            return q;
        }
    }
    unreachable!("den(x)·det(B) clears every denominator")
}
