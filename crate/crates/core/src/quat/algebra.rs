use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::{factor_integer, ramified_primes};
use crate::error::{Error, Result};
use crate::linalg::{zero4, GramForm, IntLattice, Vec4};

/// Element `(t + u·i + v·j + w·ij)` with a common positive denominator.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuatElement {
    num: Vec4,
    den: BigInt,
}

impl QuatElement {
    /// Normalizes so that `den > 0` and the entries are coprime to it.
    pub fn new(num: Vec4, den: BigInt) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let mut num = num;
        let mut den = den;
        if den.is_negative() {
            den = -den;
            num = num.map(|x| -x);
        }
        let mut g = den.clone();
        for x in &num {
            g = g.gcd(x);
        }
        if !g.is_one() {
            num = num.map(|x| x / &g);
            den /= &g;
        }
        QuatElement { num, den }
    }

    pub fn from_ints(c: [i64; 4]) -> Self {
        QuatElement::new(c.map(BigInt::from), BigInt::one())
    }

    pub fn from_rationals(c: &[BigRational; 4]) -> Self {
        let mut l = BigInt::one();
        for q in c {
            l = l.lcm(q.denom());
        }
        let num = [0, 1, 2, 3].map(|i| c[i].numer() * (&l / c[i].denom()));
        QuatElement::new(num, l)
    }

    pub fn scalar(q: &BigRational) -> Self {
        QuatElement::new(
            [q.numer().clone(), BigInt::zero(), BigInt::zero(), BigInt::zero()],
            q.denom().clone(),
        )
    }

    pub fn integer(n: impl Into<BigInt>) -> Self {
        QuatElement::new([n.into(), BigInt::zero(), BigInt::zero(), BigInt::zero()], BigInt::one())
    }

    pub fn one() -> Self {
        QuatElement::integer(1)
    }

    pub fn zero() -> Self {
        QuatElement::integer(0)
    }

    pub fn num(&self) -> &Vec4 {
        &self.num
    }

    pub fn den(&self) -> &BigInt {
        &self.den
    }

    pub fn coeff(&self, k: usize) -> BigRational {
        BigRational::new(self.num[k].clone(), self.den.clone())
    }

    pub fn coeffs(&self) -> [BigRational; 4] {
        [0, 1, 2, 3].map(|k| self.coeff(k))
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(|x| x.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num[0].is_one() && self.num[1..].iter().all(|x| x.is_zero())
    }

    /// True when the element is a rational scalar.
    pub fn is_scalar(&self) -> bool {
        self.num[1..].iter().all(|x| x.is_zero())
    }

    pub fn add(&self, o: &QuatElement) -> QuatElement {
        let num = [0, 1, 2, 3].map(|k| &self.num[k] * &o.den + &o.num[k] * &self.den);
        QuatElement::new(num, &self.den * &o.den)
    }

    pub fn sub(&self, o: &QuatElement) -> QuatElement {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> QuatElement {
        QuatElement { num: self.num.clone().map(|x| -x), den: self.den.clone() }
    }

    pub fn scale(&self, q: &BigRational) -> QuatElement {
        QuatElement::new(self.num.clone().map(|x| x * q.numer()), &self.den * q.denom())
    }

    pub fn scale_int(&self, n: &BigInt) -> QuatElement {
        QuatElement::new(self.num.clone().map(|x| x * n), self.den.clone())
    }

    pub fn conj(&self) -> QuatElement {
        let [t, u, v, w] = self.num.clone();
        QuatElement { num: [t, -u, -v, -w], den: self.den.clone() }
    }

    pub fn trd(&self) -> BigRational {
        BigRational::new(BigInt::from(2) * &self.num[0], self.den.clone())
    }
}

impl fmt::Debug for QuatElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for QuatElement {
    /// Text form `t,u,v,w` with rational entries.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.coeffs();
        write!(f, "{},{},{},{}", c[0], c[1], c[2], c[3])
    }
}

impl FromStr for QuatElement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(|p| p.trim()).collect();
        if parts.len() != 4 {
            return Err(Error::Parse(format!("element needs 4 coordinates: {s:?}")));
        }
        let mut c: [BigRational; 4] = [0; 4].map(|_| BigRational::zero());
        for (k, p) in parts.iter().enumerate() {
            c[k] = parse_rational(p)?;
        }
        Ok(QuatElement::from_rationals(&c))
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("bad rational {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// The quaternion algebra `(a,b/ℚ)`: `i² = a`, `j² = b`, `ij = −ji`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuatAlgebra {
    a: BigInt,
    b: BigInt,
    ramified: Vec<BigInt>,
    delta: BigInt,
}

fn is_squarefree(n: &BigInt) -> bool {
    match factor_integer(n) {
        Ok(f) => f.factors().iter().all(|(_, e)| *e == 1),
        Err(_) => false,
    }
}

impl QuatAlgebra {
    /// Indefinite algebra with squarefree parameters.
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>) -> Result<Self> {
        let a = a.into();
        let b = b.into();
        if a.is_zero() || b.is_zero() {
            return Err(Error::InvalidInput("algebra parameters must be nonzero".into()));
        }
        if !is_squarefree(&a) || !is_squarefree(&b) {
            return Err(Error::InvalidInput(format!("parameters ({a},{b}) must be squarefree")));
        }
        if a.is_negative() && b.is_negative() {
            return Err(Error::DefiniteAlgebra(a.to_string(), b.to_string()));
        }
        let ramified = ramified_primes(&a, &b);
        if !ramified.len().is_multiple_of(2) {
            return Err(Error::invariant("odd number of ramified places"));
        }
        let delta = ramified.iter().fold(BigInt::one(), |acc, p| acc * p);
        Ok(QuatAlgebra { a, b, ramified, delta })
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }

    pub fn b(&self) -> &BigInt {
        &self.b
    }

    pub fn ramified(&self) -> &[BigInt] {
        &self.ramified
    }

    pub fn is_ramified(&self, p: &BigInt) -> bool {
        self.ramified.contains(p)
    }

    /// Reduced discriminant δ, the product of the ramified primes.
    pub fn delta(&self) -> &BigInt {
        &self.delta
    }

    /// Absolute discriminant Δ = δ².
    pub fn disc(&self) -> BigInt {
        &self.delta * &self.delta
    }

    /// Product of integer coordinate vectors.
    pub fn mul_vec(&self, x: &Vec4, y: &Vec4) -> Vec4 {
        let (a, b) = (&self.a, &self.b);
        let [t1, u1, v1, w1] = x;
        let [t2, u2, v2, w2] = y;
        let ab = a * b;
        [
            t1 * t2 + a * u1 * u2 + b * v1 * v2 - &ab * w1 * w2,
            t1 * u2 + u1 * t2 - b * v1 * w2 + b * w1 * v2,
            t1 * v2 + v1 * t2 + a * u1 * w2 - a * w1 * u2,
            t1 * w2 + w1 * t2 + u1 * v2 - v1 * u2,
        ]
    }

    pub fn mul(&self, x: &QuatElement, y: &QuatElement) -> QuatElement {
        QuatElement::new(self.mul_vec(&x.num, &y.num), &x.den * &y.den)
    }

    pub fn mul_many(&self, xs: &[&QuatElement]) -> QuatElement {
        xs.iter().fold(QuatElement::one(), |acc, x| self.mul(&acc, x))
    }

    pub fn nrd(&self, x: &QuatElement) -> BigRational {
        let [t, u, v, w] = &x.num;
        let n = t * t - &self.a * u * u - &self.b * v * v + &self.a * &self.b * w * w;
        BigRational::new(n, &x.den * &x.den)
    }

    pub fn inverse(&self, x: &QuatElement) -> Result<QuatElement> {
        let n = self.nrd(x);
        if n.is_zero() {
            return Err(Error::InvalidInput(format!("{x} is not invertible")));
        }
        Ok(x.conj().scale(&n.recip()))
    }

    pub fn pow(&self, x: &QuatElement, e: u64) -> QuatElement {
        let mut acc = QuatElement::one();
        let mut base = x.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Integer associated to `x` when it lies in ℤ⁴ (coordinates w.r.t. 1,i,j,ij).
    pub fn is_integral_coords(x: &QuatElement) -> bool {
        x.den.is_one()
    }

    /// The form T₂ (sum of squares of matrix entries under a fixed real splitting).
    ///
    /// For `a > 0` the splitting is `i ↦ diag(√a, −√a)`, `j ↦ [[0,b],[1,0]]`;
    /// for `a < 0 < b` the roles of `i` and `j` are exchanged.
    pub fn t2_form(&self) -> GramForm {
        let (a, b) = (&self.a, &self.b);
        let mut ma = [zero4(), zero4(), zero4(), zero4()];
        let mut mb = [zero4(), zero4(), zero4(), zero4()];
        let one = BigInt::one();
        if a.is_positive() {
            let b2 = b * b;
            ma[0][0] = BigInt::from(2);
            ma[1][1] = BigInt::from(2) * a;
            ma[2][2] = &b2 + &one;
            ma[3][3] = a * (&b2 + &one);
            mb[2][3] = &b2 - &one;
            mb[3][2] = &b2 - &one;
            GramForm::new(ma, mb, a.clone(), one)
        } else {
            let a2 = a * a;
            ma[0][0] = BigInt::from(2);
            ma[1][1] = &a2 + &one;
            ma[2][2] = BigInt::from(2) * b;
            ma[3][3] = (&a2 + &one) * b;
            mb[1][3] = &one - &a2;
            mb[3][1] = &one - &a2;
            GramForm::new(ma, mb, b.clone(), one)
        }
    }

    /// Left multiplication of a lattice by an element.
    pub fn left_mul_lattice(&self, x: &QuatElement, l: &IntLattice) -> IntLattice {
        let rows: Vec<Vec4> = l.basis().iter().map(|r| self.mul_vec(&x.num, r)).collect();
        IntLattice::from_generators(&rows, &(l.den() * &x.den)).expect("x invertible")
    }

    /// Right multiplication of a lattice by an element.
    pub fn right_mul_lattice(&self, l: &IntLattice, x: &QuatElement) -> IntLattice {
        let rows: Vec<Vec4> = l.basis().iter().map(|r| self.mul_vec(r, &x.num)).collect();
        IntLattice::from_generators(&rows, &(l.den() * &x.den)).expect("x invertible")
    }

    /// Lattice generated by the 16 products of basis vectors.
    pub fn lattice_mul(&self, l1: &IntLattice, l2: &IntLattice) -> IntLattice {
        let mut rows = Vec::with_capacity(16);
        for r in l1.basis() {
            for s in l2.basis() {
                rows.push(self.mul_vec(r, s));
            }
        }
        IntLattice::from_generators(&rows, &(l1.den() * l2.den())).expect("product of full lattices")
    }

    pub fn lattice_elements(&self, l: &IntLattice) -> [QuatElement; 4] {
        let b = l.basis();
        [0, 1, 2, 3].map(|k| QuatElement::new(b[k].clone(), l.den().clone()))
    }

    pub fn lattice_contains(&self, l: &IntLattice, x: &QuatElement) -> bool {
        l.contains(&x.num, &x.den)
    }

    /// `{x : x·L ⊆ M}` (`left = true`) or `{x : L·x ⊆ M}` (`left = false`).
    fn colon(&self, l: &IntLattice, m: &IntLattice, left: bool) -> IntLattice {
        // x ↦ coordinate functionals of x·b, dualized
        let md = m.dual();
        let mut gens = Vec::with_capacity(16);
        for b in l.basis() {
            for u in md.basis() {
                let mut g = zero4();
                for (t, gt) in g.iter_mut().enumerate() {
                    let mut e = zero4();
                    e[t] = BigInt::one();
                    let prod = if left { self.mul_vec(&e, b) } else { self.mul_vec(b, &e) };
                    *gt = (0..4).map(|k| &prod[k] * &u[k]).sum();
                }
                gens.push(g);
            }
        }
        IntLattice::from_generators(&gens, &(l.den() * md.den()))
            .expect("full-rank colon lattice")
            .dual()
    }

    /// `{x : x·L ⊆ M}`.
    pub fn left_colon(&self, l: &IntLattice, m: &IntLattice) -> IntLattice {
        self.colon(l, m, true)
    }

    /// `{x : L·x ⊆ M}`.
    pub fn right_colon(&self, l: &IntLattice, m: &IntLattice) -> IntLattice {
        self.colon(l, m, false)
    }

    /// `{x : x·L ⊆ L}`.
    pub fn left_order(&self, l: &IntLattice) -> IntLattice {
        self.colon(l, l, true)
    }

    /// `{x : L·x ⊆ L}`.
    pub fn right_order(&self, l: &IntLattice) -> IntLattice {
        self.colon(l, l, false)
    }

    /// Lattice of conjugates.
    pub fn conj_lattice(&self, l: &IntLattice) -> IntLattice {
        let rows: Vec<Vec4> = l
            .basis()
            .iter()
            .map(|r| [r[0].clone(), -&r[1], -&r[2], -&r[3]])
            .collect();
        IntLattice::from_generators(&rows, l.den()).expect("full rank")
    }
}

impl FromStr for QuatAlgebra {
    type Err = Error;

    /// Parses `"a,b"`.
    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("algebra must be \"a,b\": {s:?}")))?;
        let a: BigInt = a.trim().parse().map_err(|_| Error::Parse(format!("bad integer {a:?}")))?;
        let b: BigInt = b.trim().parse().map_err(|_| Error::Parse(format!("bad integer {b:?}")))?;
        QuatAlgebra::new(a, b)
    }
}

impl fmt::Display for QuatAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.a, self.b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alg() -> QuatAlgebra {
        QuatAlgebra::new(3, -1).unwrap()
    }

    fn e(c: [i64; 4]) -> QuatElement {
        QuatElement::from_ints(c)
    }

    #[test]
    fn defining_relations() {
        let a = alg();
        let i = e([0, 1, 0, 0]);
        let j = e([0, 0, 1, 0]);
        assert_eq!(a.mul(&i, &j), e([0, 0, 0, 1]));
        assert_eq!(a.mul(&j, &i), e([0, 0, 0, -1]));
        assert_eq!(a.mul(&i, &i), e([3, 0, 0, 0]));
        assert_eq!(a.mul(&j, &j), e([-1, 0, 0, 0]));
        assert_eq!(a.mul(&e([2, 1, 0, 0]), &e([2, -1, 0, 0])), QuatElement::one());
    }

    #[test]
    fn example_norms() {
        let a = alg();
        let omega: QuatElement = "1/2,1/2,1/2,1/2".parse().unwrap();
        // 3 + 4i − 3j − 11ω
        let x = e([3, 4, -3, 0]).add(&omega.scale_int(&BigInt::from(-11)));
        assert_eq!(a.nrd(&x), BigRational::from_integer(BigInt::from(-19)));
        let y = e([-1, -2, -1, 0]).add(&omega);
        assert_eq!(a.nrd(&y), BigRational::from_integer(BigInt::from(-7)));
        assert!(a.nrd(&QuatElement::one()).is_one());
    }

    #[test]
    fn t2_values() {
        for (p, q) in [(3i64, -1i64), (5, 7), (-3, 7), (2, 3)] {
            let a = QuatAlgebra::new(p, q).unwrap();
            let f = a.t2_form();
            let one = e([1, 0, 0, 0]);
            assert_eq!(f.value(one.num(), one.den()).0, BigRational::from_integer(2.into()));
            if p > 0 {
                let i = e([0, 1, 0, 0]);
                let (r, s) = f.value(i.num(), i.den());
                assert_eq!(r, BigRational::from_integer(BigInt::from(2 * p)));
                assert!(s.is_zero());
            }
        }
    }

    #[test]
    fn rejects_definite() {
        assert!(matches!(QuatAlgebra::new(-2, -3), Err(Error::DefiniteAlgebra(_, _))));
        assert!(QuatAlgebra::new(4, 3).is_err());
    }

    #[test]
    fn parses_elements() {
        let x: QuatElement = "1/2, -3, 0, 5/4".parse().unwrap();
        assert_eq!(x.den(), &BigInt::from(4));
        assert_eq!(x.to_string(), "1/2,-3,0,5/4");
    }
}
