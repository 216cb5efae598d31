use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::algebra::{QuatAlgebra, QuatElement};
use crate::arith::{factor_integer, mod_inverse, quadratic_roots_mod_prime, valuation};
use crate::error::{Error, Result};
use crate::linalg::{det, hnf_rows, kernel_mod_p, zero4, GramForm, IntLattice, Matrix, Vec4};

/// An order of a quaternion algebra, stored as a lattice in the `(1,i,j,ij)` coordinates.
#[derive(Clone)]
pub struct Order {
    alg: Arc<QuatAlgebra>,
    lattice: IntLattice,
    disc: BigInt,
}

impl fmt::Debug for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Order({}; {:?})", self.alg, self.lattice)
    }
}

impl PartialEq for Order {
    fn eq(&self, other: &Self) -> bool {
        self.alg == other.alg && self.lattice == other.lattice
    }
}

impl Eq for Order {}

fn trd_matrix(alg: &QuatAlgebra, b: &[QuatElement; 4]) -> Matrix {
    (0..4)
        .map(|m| {
            (0..4)
                .map(|n| {
                    let t = alg.mul(&b[m], &b[n]).trd();
                    assert!(t.is_integer(), "order element with non-integral trace");
                    t.to_integer()
                })
                .collect()
        })
        .collect()
}

/// Reduced discriminant of an order lattice (assumed closed under products).
fn reduced_disc(alg: &QuatAlgebra, l: &IntLattice) -> BigInt {
    let d = det(&trd_matrix(alg, &alg.lattice_elements(l))).abs();
    let r = d.sqrt();
    assert_eq!(&r * &r, d, "order discriminant is not a square");
    r
}

impl Order {
    /// Validates the order axioms.
    pub fn new(alg: Arc<QuatAlgebra>, lattice: IntLattice) -> Result<Self> {
        let one = QuatElement::one();
        if !alg.lattice_contains(&lattice, &one) {
            return Err(Error::InvalidInput("order lattice does not contain 1".into()));
        }
        let b = alg.lattice_elements(&lattice);
        for x in &b {
            for y in &b {
                if !alg.lattice_contains(&lattice, &alg.mul(x, y)) {
                    return Err(Error::InvalidInput("lattice is not closed under multiplication".into()));
                }
            }
            if !x.trd().is_integer() || !alg.nrd(x).is_integer() {
                return Err(Error::InvalidInput("order element is not integral".into()));
            }
        }
        let disc = reduced_disc(&alg, &lattice);
        Ok(Order { alg, lattice, disc })
    }

    /// Skips the axiom checks; for lattices known to be orders.
    pub fn trusted(alg: Arc<QuatAlgebra>, lattice: IntLattice) -> Self {
        Order::unchecked(alg, lattice)
    }

    /// The radical of `O` at `p` (the prime `𝔓` when `p` is ramified and `O` maximal).
    pub fn radical(&self, p: &BigInt) -> IntLattice {
        radical_lattice(self, p)
    }

    fn unchecked(alg: Arc<QuatAlgebra>, lattice: IntLattice) -> Self {
        let disc = reduced_disc(&alg, &lattice);
        Order { alg, lattice, disc }
    }

    /// `ℤ⟨1,i,j,ij⟩`.
    pub fn standard(alg: Arc<QuatAlgebra>) -> Self {
        Order::unchecked(alg, IntLattice::standard())
    }

    pub fn alg(&self) -> &QuatAlgebra {
        &self.alg
    }

    pub fn alg_arc(&self) -> &Arc<QuatAlgebra> {
        &self.alg
    }

    pub fn lattice(&self) -> &IntLattice {
        &self.lattice
    }

    pub fn reduced_disc(&self) -> &BigInt {
        &self.disc
    }

    pub fn is_maximal(&self) -> bool {
        &self.disc == self.alg.delta()
    }

    /// HNF basis elements.
    pub fn basis(&self) -> [QuatElement; 4] {
        self.alg.lattice_elements(&self.lattice)
    }

    /// A basis in lower-triangular Hermite form, starting with 1 when possible.
    pub fn display_basis(&self) -> [QuatElement; 4] {
        let rev: Vec<Vec4> = self
            .lattice
            .basis()
            .iter()
            .map(|r| [r[3].clone(), r[2].clone(), r[1].clone(), r[0].clone()])
            .collect();
        let h = hnf_rows(rev.iter()).expect("full rank");
        let mut out: Vec<QuatElement> = h
            .iter()
            .map(|r| QuatElement::new([r[3].clone(), r[2].clone(), r[1].clone(), r[0].clone()], self.lattice.den().clone()))
            .collect();
        out.reverse();
        [out[0].clone(), out[1].clone(), out[2].clone(), out[3].clone()]
    }

    pub fn contains(&self, x: &QuatElement) -> bool {
        self.alg.lattice_contains(&self.lattice, x)
    }

    /// Coordinates of `x` in the HNF basis.
    pub fn coords(&self, x: &QuatElement) -> Option<Vec4> {
        self.lattice.coords(x.num(), x.den())
    }

    pub fn from_coords(&self, c: &Vec4) -> QuatElement {
        let mut v = zero4();
        for (ci, r) in c.iter().zip(self.lattice.basis()) {
            for t in 0..4 {
                v[t] += ci * &r[t];
            }
        }
        QuatElement::new(v, self.lattice.den().clone())
    }

    pub fn t2_form(&self) -> GramForm {
        self.alg.t2_form()
    }

    /// Exact determinant of the T₂ Gram matrix on the order basis, as `(p, q)` with value `p + q√d`.
    pub fn t2_gram_det(&self) -> (BigRational, BigRational) {
        let f = self.t2_form();
        let b = self.lattice.basis();
        let den = self.lattice.den();
        let d = BigRational::from_integer(f.d().clone());
        // entries as pairs in ℚ(√d)
        let scale = BigRational::new(BigInt::one(), f.den() * den * den);
        let mut m: Vec<Vec<(BigRational, BigRational)>> = Vec::new();
        for x in b {
            let mut row = Vec::new();
            for y in b {
                let k = f.bilinear_key(x, y);
                row.push((BigRational::from_integer(k.a) * &scale, BigRational::from_integer(k.b) * &scale));
            }
            m.push(row);
        }
        det_quadratic(&m, &d)
    }
}

type Qd = (BigRational, BigRational);

fn qd_mul(x: &Qd, y: &Qd, d: &BigRational) -> Qd {
    (&x.0 * &y.0 + &x.1 * &y.1 * d, &x.0 * &y.1 + &x.1 * &y.0)
}

fn det_quadratic(m: &[Vec<Qd>], d: &BigRational) -> Qd {
    // Laplace expansion; 4×4 only
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc: Qd = (BigRational::zero(), BigRational::zero());
    for c in 0..n {
        let minor: Vec<Vec<Qd>> = m[1..]
            .iter()
            .map(|r| r.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, x)| x.clone()).collect())
            .collect();
        let t = qd_mul(&m[0][c], &det_quadratic(&minor, d), d);
        if c % 2 == 0 {
            acc = (&acc.0 + &t.0, &acc.1 + &t.1);
        } else {
            acc = (&acc.0 - &t.0, &acc.1 - &t.1);
        }
    }
    acc
}

fn order_from_lattice(alg: &Arc<QuatAlgebra>, l: IntLattice) -> Order {
    Order::unchecked(alg.clone(), l)
}

/// Elements of `O/pO` as coordinate vectors mod `p`.
fn coords_mod(o: &Order, x: &QuatElement, p: &BigInt) -> Vec4 {
    o.coords(x).expect("element of the order").map(|c| c.mod_floor(p))
}

/// Lifted coordinate vectors spanning the radical of `O/pO`.
fn radical_mod_p(o: &Order, p: &BigInt) -> Vec<Vec4> {
    let alg = o.alg();
    let b = o.basis();
    if p != &BigInt::from(2) {
        let t = trd_matrix(alg, &b);
        return kernel_mod_p(&t, p)
            .into_iter()
            .map(|v| [v[0].clone(), v[1].clone(), v[2].clone(), v[3].clone()])
            .collect();
    }
    // p = 2: x is in the radical iff x·y is nilpotent for all y
    let all: Vec<Vec4> = (0..16u32)
        .map(|m| [0, 1, 2, 3].map(|k| BigInt::from((m >> k) & 1)))
        .collect();
    let nilpotent = |z: &QuatElement| {
        let z2 = alg.mul(z, z);
        let z4 = alg.mul(&z2, &z2);
        coords_mod(o, &z4, p).iter().all(|c| c.is_zero())
    };
    all.iter()
        .filter(|c| {
            let x = o.from_coords(c);
            all.iter().all(|d| nilpotent(&alg.mul(&x, &o.from_coords(d))))
        })
        .cloned()
        .collect()
}

fn radical_lattice(o: &Order, p: &BigInt) -> IntLattice {
    let mut gens: Vec<(Vec4, BigInt)> = o.lattice.generators().into_iter().map(|(v, d)| (v.map(|x| x * p), d)).collect();
    for c in radical_mod_p(o, p) {
        let x = o.from_coords(&c);
        gens.push((x.num().clone(), x.den().clone()));
    }
    IntLattice::from_rational_generators(&gens).expect("full rank")
}

/// Idempotent of `O/J ≅ 𝔽_p × 𝔽_p` in the Eichler case.
fn eichler_idempotent(o: &Order, p: &BigInt) -> Result<QuatElement> {
    let alg = o.alg();
    let b = o.basis();
    let range = [0i64, 1, -1, 2, -2];
    for c0 in range {
        for c1 in range {
            for c2 in range {
                for c3 in range {
                    let c = [c0, c1, c2, c3].map(BigInt::from);
                    let x = b
                        .iter()
                        .zip(c.iter())
                        .fold(QuatElement::zero(), |acc, (bi, ci)| acc.add(&bi.scale_int(ci)));
                    let t = x.trd().to_integer();
                    let n = alg.nrd(&x).to_integer();
                    let roots = quadratic_roots_mod_prime(&-t, &n, p);
                    if roots.len() == 2 {
                        let inv = mod_inverse(&(&roots[0] - &roots[1]), p).expect("distinct roots");
                        return Ok(x.sub(&QuatElement::integer(roots[1].clone())).scale_int(&inv));
                    }
                }
            }
        }
    }
    Err(Error::invariant("no element with split separable characteristic polynomial"))
}

/// A maximal order containing `ℤ⟨1,i,j,ij⟩`, via iterated radical idealizers.
pub fn maximal_order(alg: Arc<QuatAlgebra>) -> Result<Order> {
    let mut o = Order::standard(alg.clone());
    let f = factor_integer(o.reduced_disc())?;
    for (p, _) in f.factors() {
        let target = valuation(alg.delta(), p).0;
        let mut guard = 0;
        while valuation(o.reduced_disc(), p).0 > target {
            guard += 1;
            if guard > 64 {
                return Err(Error::invariant("maximal order iteration did not terminate"));
            }
            let j = radical_lattice(&o, p);
            let ol = alg.left_order(&j);
            if ol != o.lattice {
                o = order_from_lattice(&alg, ol);
                continue;
            }
            // hereditary but not maximal: Eichler of level p
            let e = eichler_idempotent(&o, p)?;
            let mut gens = j.generators();
            for b in o.basis() {
                let x = alg.mul(&e, &b);
                gens.push((x.num().clone(), x.den().clone()));
            }
            let r = alg.right_order(&IntLattice::from_rational_generators(&gens)?);
            o = order_from_lattice(&alg, r);
        }
    }
    if !o.is_maximal() {
        return Err(Error::invariant("order discriminant does not match the algebra"));
    }
    Order::new(alg, o.lattice)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max(a: i64, b: i64) -> Order {
        maximal_order(Arc::new(QuatAlgebra::new(a, b).unwrap())).unwrap()
    }

    #[test]
    fn example_order() {
        let o = max(3, -1);
        assert_eq!(o.reduced_disc(), &BigInt::from(6));
        let want = IntLattice::from_rational_generators(&[
            ([2, 0, 0, 0].map(BigInt::from), BigInt::from(2)),
            ([0, 2, 0, 0].map(BigInt::from), BigInt::from(2)),
            ([0, 0, 2, 0].map(BigInt::from), BigInt::from(2)),
            ([1, 1, 1, 1].map(BigInt::from), BigInt::from(2)),
        ])
        .unwrap();
        assert_eq!(o.lattice(), &want);
        let db = o.display_basis();
        assert!(db[0].is_one());
        assert_eq!(db[3].to_string(), "1/2,1/2,1/2,1/2");
        let (r, s) = o.t2_gram_det();
        assert_eq!(r, BigRational::from_integer(BigInt::from(36)));
        assert!(s.is_zero());
    }

    #[test]
    fn split_and_other_algebras() {
        for (a, b) in [(1, 1), (5, 7), (-1, 3), (2, 5), (-3, 7), (6, -5), (-10, 11), (15, 2), (1, -1), (7, 3)] {
            let o = max(a, b);
            assert!(o.is_maximal(), "({a},{b})");
            let (r, s) = o.t2_gram_det();
            assert_eq!(r, BigRational::from_integer(o.alg().disc()), "({a},{b})");
            assert!(s.is_zero());
        }
    }
}
