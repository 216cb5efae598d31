use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::lattice::{zero4, Vec4};

/// Sign of `p + q√d` for `d > 0` not a square (or `q = 0`).
pub fn sign_quad(p: &BigInt, q: &BigInt, d: &BigInt) -> Ordering {
    match (p.sign(), q.sign()) {
        (_, num_bigint::Sign::NoSign) => p.cmp(&BigInt::zero()),
        (num_bigint::Sign::NoSign, _) => q.cmp(&BigInt::zero()),
        (a, b) if a == b => p.cmp(&BigInt::zero()),
        _ => {
            // opposite signs: compare p² with q²d
            let lhs = p * p;
            let rhs = q * q * d;
            if p.is_positive() {
                lhs.cmp(&rhs)
            } else {
                rhs.cmp(&lhs)
            }
        }
    }
}

/// Exact value `a + b√d` of a quadratic form, scaled by the form's denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadKey {
    pub a: BigInt,
    pub b: BigInt,
}

impl QuadKey {
    pub fn cmp_with(&self, other: &QuadKey, d: &BigInt) -> Ordering {
        sign_quad(&(&self.a - &other.a), &(&self.b - &other.b), d)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn scaled(&self, k: &BigInt) -> QuadKey {
        QuadKey { a: &self.a * k, b: &self.b * k }
    }

    pub fn to_f64(&self, d: &BigInt) -> f64 {
        let sd = d.to_f64().unwrap().sqrt();
        big_to_f64(&self.a) + sd * big_to_f64(&self.b)
    }
}

pub fn big_to_f64(x: &BigInt) -> f64 {
    x.to_f64().unwrap_or(if x.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY })
}

/// Positive definite quadratic form `Q(x) = (xᵀAx + √d·xᵀBx)/den` on ℚ⁴, stored exactly.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GramForm {
    a: [Vec4; 4],
    b: [Vec4; 4],
    d: BigInt,
    den: BigInt,
}

fn bilinear(m: &[Vec4; 4], x: &Vec4, y: &Vec4) -> BigInt {
    let mut s = BigInt::zero();
    for i in 0..4 {
        if x[i].is_zero() {
            continue;
        }
        let mut t = BigInt::zero();
        for j in 0..4 {
            if !m[i][j].is_zero() && !y[j].is_zero() {
                t += &m[i][j] * &y[j];
            }
        }
        s += &x[i] * t;
    }
    s
}

impl GramForm {
    /// Form with integer matrices `a` and `b`; `d` is folded in when it is a square.
    pub fn new(a: [Vec4; 4], b: [Vec4; 4], d: BigInt, den: BigInt) -> Self {
        assert!(d.is_positive() && den.is_positive());
        let s = d.sqrt();
        if &s * &s == d {
            let mut a2 = a;
            for i in 0..4 {
                for j in 0..4 {
                    a2[i][j] += &s * &b[i][j];
                }
            }
            return GramForm { a: a2, b: [zero4(), zero4(), zero4(), zero4()], d: BigInt::one(), den };
        }
        GramForm { a, b, d, den }
    }

    pub fn identity() -> Self {
        let mut a = [zero4(), zero4(), zero4(), zero4()];
        for (i, r) in a.iter_mut().enumerate() {
            r[i] = BigInt::one();
        }
        GramForm::new(a, [zero4(), zero4(), zero4(), zero4()], BigInt::one(), BigInt::one())
    }

    /// Integer symmetric matrix as a rational form.
    pub fn from_integer_matrix(a: [Vec4; 4]) -> Self {
        GramForm::new(a, [zero4(), zero4(), zero4(), zero4()], BigInt::one(), BigInt::one())
    }

    pub fn d(&self) -> &BigInt {
        &self.d
    }

    pub fn den(&self) -> &BigInt {
        &self.den
    }

    pub fn a(&self) -> &[Vec4; 4] {
        &self.a
    }

    pub fn b(&self) -> &[Vec4; 4] {
        &self.b
    }

    /// Exact key of `x`: `Q(x/e)·den·e²` as `a + b√d`.
    pub fn key(&self, x: &Vec4) -> QuadKey {
        QuadKey { a: bilinear(&self.a, x, x), b: bilinear(&self.b, x, x) }
    }

    pub fn bilinear_key(&self, x: &Vec4, y: &Vec4) -> QuadKey {
        QuadKey { a: bilinear(&self.a, x, y), b: bilinear(&self.b, x, y) }
    }

    /// Exact value on a rational vector, as a pair `(p, q)` meaning `p + q√d`.
    pub fn value(&self, x: &Vec4, e: &BigInt) -> (BigRational, BigRational) {
        let k = self.key(x);
        let s = &self.den * e * e;
        (BigRational::new(k.a, s.clone()), BigRational::new(k.b, s))
    }

    pub fn value_f64(&self, x: &Vec4, e: &BigInt) -> f64 {
        let k = self.key(x);
        k.to_f64(&self.d) / big_to_f64(&(&self.den * e * e))
    }

    /// Floating Gram matrix of the given rows (entries divided by `den·e²`).
    pub fn gram_f64(&self, rows: &[Vec4], e: &BigInt) -> Vec<Vec<f64>> {
        let s = big_to_f64(&(&self.den * e * e));
        let n = rows.len();
        let mut g = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in i..n {
                let k = self.bilinear_key(&rows[i], &rows[j]);
                let v = k.to_f64(&self.d) / s;
                g[i][j] = v;
                g[j][i] = v;
            }
        }
        g
    }

    /// Integral Gram matrix approximating `2⁶⁴·(A + √d·B)` on the given rows.
    pub fn gram_integral(&self, rows: &[Vec4]) -> Vec<Vec<BigInt>> {
        let scale = BigInt::one() << 64u32;
        let r = (&self.d << 128u32).sqrt();
        let n = rows.len();
        let mut g = vec![vec![BigInt::zero(); n]; n];
        for i in 0..n {
            for j in i..n {
                let k = self.bilinear_key(&rows[i], &rows[j]);
                let v = k.a * &scale + k.b * &r;
                g[i][j] = v.clone();
                g[j][i] = v;
            }
        }
        g
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_of_quadratic_irrationals() {
        let b = BigInt::from;
        let d = b(3);
        assert_eq!(sign_quad(&b(2), &b(-1), &d), Ordering::Greater);
        assert_eq!(sign_quad(&b(1), &b(-1), &d), Ordering::Less);
        assert_eq!(sign_quad(&b(-2), &b(1), &d), Ordering::Less);
        assert_eq!(sign_quad(&b(-1), &b(1), &d), Ordering::Greater);
        assert_eq!(sign_quad(&b(0), &b(0), &d), Ordering::Equal);
    }
}
