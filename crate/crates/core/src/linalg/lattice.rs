use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Vec4 = [BigInt; 4];

pub fn zero4() -> Vec4 {
    [BigInt::zero(), BigInt::zero(), BigInt::zero(), BigInt::zero()]
}

fn axpy(y: &mut Vec4, a: &BigInt, x: &Vec4) {
    for i in 0..4 {
        y[i] += a * &x[i];
    }
}

/// Full-rank lattice in ℚ⁴: rows of `basis` divided by `den`, basis in row HNF.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntLattice {
    basis: [Vec4; 4],
    den: BigInt,
}

impl fmt::Debug for IntLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntLattice(")?;
        for (i, r) in self.basis.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{} {} {} {}", r[0], r[1], r[2], r[3])?;
        }
        write!(f, " / {})", self.den)
    }
}

/// Incremental row HNF over ℤ⁴ with modular reduction once full rank is reached.
struct HnfBuilder {
    piv: [Option<Vec4>; 4],
    modulus: Option<BigInt>,
}

impl HnfBuilder {
    fn new() -> Self {
        HnfBuilder { piv: [None, None, None, None], modulus: None }
    }

    fn update_modulus(&mut self) {
        if self.piv.iter().all(|p| p.is_some()) {
            let mut d = BigInt::one();
            for (c, p) in self.piv.iter().enumerate() {
                d *= &p.as_ref().unwrap()[c];
            }
            self.modulus = Some(d.abs());
        }
    }

    fn reduce_tail(&self, v: &mut Vec4, from: usize) {
        if let Some(m) = &self.modulus {
            for x in v.iter_mut().skip(from) {
                if x.abs() >= *m {
                    *x = x.mod_floor(m);
                }
            }
        }
    }

    fn insert(&mut self, mut v: Vec4) {
        self.reduce_tail(&mut v, 0);
        for c in 0..4 {
            if v[c].is_zero() {
                continue;
            }
            match self.piv[c].take() {
                None => {
                    if v[c].is_negative() {
                        for x in v.iter_mut() {
                            *x = -&*x;
                        }
                    }
                    self.piv[c] = Some(v);
                    self.update_modulus();
                    return;
                }
                Some(mut p) => {
                    let (q, r) = v[c].div_rem(&p[c]);
                    if r.is_zero() {
                        axpy(&mut v, &-q, &p);
                    } else {
                        let e = p[c].extended_gcd(&v[c]);
                        let pa = &p[c] / &e.gcd;
                        let va = &v[c] / &e.gcd;
                        let mut np = zero4();
                        let mut nv = zero4();
                        for i in 0..4 {
                            np[i] = &e.x * &p[i] + &e.y * &v[i];
                            nv[i] = &pa * &v[i] - &va * &p[i];
                        }
                        if np[c].is_negative() {
                            for x in np.iter_mut() {
                                *x = -&*x;
                            }
                        }
                        p = np;
                        v = nv;
                    }
                    self.piv[c] = Some(p);
                    self.update_modulus();
                    if let Some(mut p) = self.piv[c].take() {
                        self.reduce_tail(&mut p, c + 1);
                        self.piv[c] = Some(p);
                    }
                    self.reduce_tail(&mut v, c + 1);
                }
            }
        }
    }

    fn finish(self) -> Result<[Vec4; 4]> {
        let mut rows: Vec<Vec4> = Vec::with_capacity(4);
        for p in self.piv {
            rows.push(p.ok_or(Error::RankDeficient)?);
        }
        for c in 0..4 {
            let pc = rows[c].clone();
            for r in 0..c {
                let q = rows[r][c].div_floor(&pc[c]);
                if !q.is_zero() {
                    axpy(&mut rows[r], &-q, &pc);
                }
            }
        }
        Ok([rows[0].clone(), rows[1].clone(), rows[2].clone(), rows[3].clone()])
    }
}

/// Row HNF of the lattice generated by integer rows.
pub fn hnf_rows<'a>(rows: impl IntoIterator<Item = &'a Vec4>) -> Result<[Vec4; 4]> {
    let mut b = HnfBuilder::new();
    for r in rows {
        b.insert(r.clone());
    }
    b.finish()
}

impl IntLattice {
    /// HNF of integer generators over a common denominator.
    pub fn from_generators(rows: &[Vec4], den: &BigInt) -> Result<Self> {
        if !den.is_positive() {
            return Err(Error::InvalidInput("denominator must be positive".into()));
        }
        let basis = hnf_rows(rows.iter())?;
        Ok(IntLattice::normalized(basis, den.clone()))
    }

    /// HNF of rational generators `(numerators, denominator)`.
    pub fn from_rational_generators(gens: &[(Vec4, BigInt)]) -> Result<Self> {
        let mut l = BigInt::one();
        for (_, d) in gens {
            l = l.lcm(d);
        }
        let rows: Vec<Vec4> = gens
            .iter()
            .map(|(v, d)| {
                let s = &l / d;
                [&v[0] * &s, &v[1] * &s, &v[2] * &s, &v[3] * &s]
            })
            .collect();
        IntLattice::from_generators(&rows, &l.abs())
    }

    /// Builds from a matrix already in HNF (checked).
    pub fn from_hnf(basis: [Vec4; 4], den: BigInt) -> Result<Self> {
        let l = IntLattice::from_generators(&basis, &den)?;
        let n = IntLattice::normalized(basis, den);
        if l != n {
            return Err(Error::InvalidInput("matrix is not in canonical HNF".into()));
        }
        Ok(n)
    }

    fn normalized(basis: [Vec4; 4], den: BigInt) -> Self {
        let mut g = den.clone();
        for r in &basis {
            for x in r {
                g = g.gcd(x);
            }
        }
        if g.is_one() {
            return IntLattice { basis, den };
        }
        let basis = basis.map(|r| r.map(|x| x / &g));
        IntLattice { basis, den: den / &g }
    }

    /// The standard lattice ℤ⁴.
    pub fn standard() -> Self {
        let mut basis = [zero4(), zero4(), zero4(), zero4()];
        for (i, r) in basis.iter_mut().enumerate() {
            r[i] = BigInt::one();
        }
        IntLattice { basis, den: BigInt::one() }
    }

    pub fn basis(&self) -> &[Vec4; 4] {
        &self.basis
    }

    pub fn den(&self) -> &BigInt {
        &self.den
    }

    /// Covolume relative to ℤ⁴.
    pub fn det(&self) -> BigRational {
        let mut p = BigInt::one();
        for i in 0..4 {
            p *= &self.basis[i][i];
        }
        BigRational::new(p, self.den.pow(4))
    }

    /// Coordinates of `num/den` in the HNF basis, if it is a lattice vector.
    pub fn coords(&self, num: &Vec4, den: &BigInt) -> Option<Vec4> {
        // v = num·self.den/den must be integral
        let mut v = zero4();
        for i in 0..4 {
            let t = &num[i] * &self.den;
            let (q, r) = t.div_rem(den);
            if !r.is_zero() {
                return None;
            }
            v[i] = q;
        }
        let mut c = zero4();
        for i in 0..4 {
            let (q, r) = v[i].div_rem(&self.basis[i][i]);
            if !r.is_zero() {
                return None;
            }
            let row = self.basis[i].clone();
            axpy(&mut v, &-&q, &row);
            c[i] = q;
        }
        Some(c)
    }

    pub fn contains(&self, num: &Vec4, den: &BigInt) -> bool {
        self.coords(num, den).is_some()
    }

    pub fn contains_lattice(&self, other: &IntLattice) -> bool {
        other.basis.iter().all(|r| self.contains(r, &other.den))
    }

    /// Basis rows as rational generators.
    pub fn generators(&self) -> Vec<(Vec4, BigInt)> {
        self.basis.iter().map(|r| (r.clone(), self.den.clone())).collect()
    }

    pub fn sum(&self, other: &IntLattice) -> IntLattice {
        let mut g = self.generators();
        g.extend(other.generators());
        IntLattice::from_rational_generators(&g).expect("sum of full-rank lattices")
    }

    pub fn scale(&self, q: &BigRational) -> IntLattice {
        assert!(!q.is_zero());
        let n = q.numer().abs();
        let basis = self.basis.clone().map(|r| r.map(|x| x * &n));
        let den = &self.den * q.denom();
        let basis = hnf_rows(basis.iter()).expect("full rank");
        IntLattice::normalized(basis, den)
    }

    /// Dual lattice with respect to the standard dot product.
    pub fn dual(&self) -> IntLattice {
        // rows of den·(B⁻¹)ᵀ; X = P·B⁻¹ is integral for P = det B
        let mut p = BigInt::one();
        for i in 0..4 {
            p *= &self.basis[i][i];
        }
        let mut x = [zero4(), zero4(), zero4(), zero4()];
        for j in 0..4 {
            for i in (0..4).rev() {
                let mut s = if i == j { p.clone() } else { BigInt::zero() };
                for k in (i + 1)..4 {
                    s -= &self.basis[i][k] * &x[k][j];
                }
                x[i][j] = s / &self.basis[i][i];
            }
        }
        let rows: Vec<Vec4> = (0..4)
            .map(|j| [0, 1, 2, 3].map(|i| &x[i][j] * &self.den))
            .collect();
        IntLattice::from_generators(&rows, &p).expect("dual of full-rank lattice")
    }

    pub fn intersect(&self, other: &IntLattice) -> IntLattice {
        if self == other {
            return self.clone();
        }
        self.dual().sum(&other.dual()).dual()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: [i64; 4]) -> Vec4 {
        xs.map(BigInt::from)
    }

    fn diag(d: i64) -> IntLattice {
        let rows: Vec<Vec4> = (0..4)
            .map(|i| {
                let mut r = [0i64; 4];
                r[i] = d;
                v(r)
            })
            .collect();
        IntLattice::from_generators(&rows, &BigInt::one()).unwrap()
    }

    #[test]
    fn documented_hnf_cases() {
        let l = diag(2);
        for i in 0..4 {
            assert_eq!(l.basis()[i][i], BigInt::from(2));
        }
        let mut rows = Vec::new();
        for i in 0..4 {
            let mut r = [0i64; 4];
            r[i] = 1;
            rows.push(v(r));
            r[i] = 2;
            rows.push(v(r));
        }
        let l = IntLattice::from_generators(&rows, &BigInt::one()).unwrap();
        assert_eq!(l, IntLattice::standard());
    }

    #[test]
    fn rank_deficiency_is_reported() {
        let rows = vec![v([1, 0, 0, 0]), v([0, 1, 0, 0]), v([1, 1, 0, 0])];
        assert_eq!(
            IntLattice::from_generators(&rows, &BigInt::one()),
            Err(Error::RankDeficient)
        );
    }

    #[test]
    fn intersection_of_scalings() {
        let l = diag(2).intersect(&diag(3));
        assert_eq!(l, diag(6));
        assert_eq!(diag(5).intersect(&diag(5)), diag(5));
    }

    #[test]
    fn normalizes_denominator() {
        let rows = vec![v([2, 0, 0, 0]), v([0, 2, 0, 0]), v([0, 0, 2, 0]), v([0, 0, 0, 4])];
        let l = IntLattice::from_generators(&rows, &BigInt::from(2)).unwrap();
        assert_eq!(l.den(), &BigInt::one());
        assert_eq!(l.basis()[3][3], BigInt::from(2));
    }

    #[test]
    fn dual_of_dual() {
        let rows = vec![v([3, 1, 4, 1]), v([0, 5, 9, 2]), v([6, 5, 3, 5]), v([8, 9, 7, 9])];
        let l = IntLattice::from_generators(&rows, &BigInt::from(7)).unwrap();
        assert_eq!(l.dual().dual(), l);
        assert_eq!(l.det() * l.dual().det(), BigRational::one());
    }
}
