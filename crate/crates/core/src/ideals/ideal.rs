use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::{factor_integer, valuation, FactoredInteger};
use crate::error::{Error, Result};
use crate::linalg::{IntLattice, Vec4};
use crate::quat::{parse_rational, Order, QuatAlgebra, QuatElement};

fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    if &(&n * &n) == q.numer() && &(&d * &d) == q.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

/// `nrd` of a lattice with right (or left) order `o`, from the covolume ratio.
pub fn lattice_norm(l: &IntLattice, o: &Order) -> Result<BigRational> {
    let r = l.det() / o.lattice().det();
    rational_sqrt(&r).ok_or_else(|| Error::invariant("ideal index is not a square"))
}

/// A right ideal, stored as a lattice in the ambient `(1,i,j,ij)` coordinates.
#[derive(Clone)]
pub struct RightIdeal {
    order: Arc<Order>,
    lattice: IntLattice,
    norm: BigRational,
}

impl fmt::Debug for RightIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RightIdeal(nrd {}; {:?})", self.norm, self.lattice)
    }
}

impl PartialEq for RightIdeal {
    fn eq(&self, other: &Self) -> bool {
        self.lattice == other.lattice && self.order.lattice() == other.order.lattice()
    }
}

impl Eq for RightIdeal {}

impl RightIdeal {
    /// Checks that `lattice·O ⊆ lattice`.
    pub fn from_lattice(order: Arc<Order>, lattice: IntLattice) -> Result<Self> {
        let alg = order.alg();
        for x in alg.lattice_elements(&lattice) {
            for b in order.basis() {
                if !alg.lattice_contains(&lattice, &alg.mul(&x, &b)) {
                    return Err(Error::InvalidInput("lattice is not a right ideal of the order".into()));
                }
            }
        }
        Ok(RightIdeal::trusted(order, lattice))
    }

    pub(crate) fn trusted(order: Arc<Order>, lattice: IntLattice) -> Self {
        let norm = lattice_norm(&lattice, &order).expect("right ideal of a maximal order");
        RightIdeal { order, lattice, norm }
    }

    /// `Σ g·O` over the generators.
    pub fn from_generators(order: Arc<Order>, gens: &[QuatElement]) -> Result<Self> {
        if gens.is_empty() {
            return Err(Error::RankDeficient);
        }
        let alg = order.alg();
        let mut rows = Vec::with_capacity(4 * gens.len());
        for g in gens {
            for b in order.basis() {
                let x = alg.mul(g, &b);
                rows.push((x.num().clone(), x.den().clone()));
            }
        }
        let lattice = IntLattice::from_rational_generators(&rows).map_err(|_| Error::RankDeficient)?;
        Ok(RightIdeal::trusted(order, lattice))
    }

    pub fn principal(order: Arc<Order>, x: &QuatElement) -> Result<Self> {
        if order.alg().nrd(x).is_zero() {
            return Err(Error::InvalidInput(format!("{x} is a zero divisor")));
        }
        RightIdeal::from_generators(order, std::slice::from_ref(x))
    }

    pub fn unit(order: Arc<Order>) -> Self {
        let lattice = order.lattice().clone();
        RightIdeal { order, lattice, norm: BigRational::one() }
    }

    pub fn order(&self) -> &Arc<Order> {
        &self.order
    }

    pub fn alg(&self) -> &QuatAlgebra {
        self.order.alg()
    }

    pub fn lattice(&self) -> &IntLattice {
        &self.lattice
    }

    /// Positive generator of `nrd(I)`.
    pub fn norm(&self) -> &BigRational {
        &self.norm
    }

    /// `nrd(I)` as an integer, for integral ideals.
    pub fn norm_int(&self) -> Option<BigInt> {
        self.norm.is_integer().then(|| self.norm.to_integer())
    }

    pub fn norm_factored(&self) -> Result<FactoredInteger> {
        let n = self
            .norm_int()
            .ok_or_else(|| Error::Precondition("ideal norm is not integral".into()))?;
        factor_integer(&n)
    }

    pub fn is_integral(&self) -> bool {
        self.order.lattice().contains_lattice(&self.lattice)
    }

    pub fn is_unit(&self) -> bool {
        &self.lattice == self.order.lattice()
    }

    pub fn contains(&self, x: &QuatElement) -> bool {
        self.alg().lattice_contains(&self.lattice, x)
    }

    pub fn basis(&self) -> [QuatElement; 4] {
        self.alg().lattice_elements(&self.lattice)
    }

    pub fn left_order(&self) -> Order {
        let l = self.alg().left_order(&self.lattice);
        Order::trusted(self.order.alg_arc().clone(), l)
    }

    /// `x·I` for invertible `x`.
    pub fn left_mul(&self, x: &QuatElement) -> RightIdeal {
        let lattice = self.alg().left_mul_lattice(x, &self.lattice);
        let norm = &self.norm * self.alg().nrd(x).abs();
        RightIdeal { order: self.order.clone(), lattice, norm }
    }

    pub fn scale(&self, q: &BigRational) -> RightIdeal {
        let lattice = self.lattice.scale(q);
        let norm = &self.norm * q * q;
        RightIdeal { order: self.order.clone(), lattice, norm }
    }

    /// `I·J`, where `J` has left order `O_r(I)`.
    pub fn mul(&self, j: &RightIdeal) -> Result<RightIdeal> {
        let jl = self.alg().left_order(&j.lattice);
        if &jl != self.order.lattice() {
            return Err(Error::IncompatibleOrders);
        }
        let lattice = self.alg().lattice_mul(&self.lattice, &j.lattice);
        Ok(RightIdeal { order: j.order.clone(), lattice, norm: &self.norm * &j.norm })
    }

    /// `I⁻¹ = {x : x·I ⊆ O}`, a right ideal of `O_l(I)`.
    pub fn inverse(&self) -> RightIdeal {
        let lattice = self.alg().left_colon(&self.lattice, self.order.lattice());
        let ol = Arc::new(self.left_order());
        RightIdeal { order: ol, lattice, norm: self.norm.recip() }
    }

    /// The lattice `I⁻¹` alone (a left `O`-ideal).
    pub fn inverse_lattice(&self) -> IntLattice {
        self.alg().left_colon(&self.lattice, self.order.lattice())
    }

    /// `Ī`, a right ideal of `O_l(I)`.
    pub fn conj(&self) -> RightIdeal {
        let lattice = self.alg().conj_lattice(&self.lattice);
        let ol = Arc::new(self.left_order());
        RightIdeal { order: ol, lattice, norm: self.norm.clone() }
    }

    /// Largest `r` with `I ⊆ p^r·O`.
    pub fn p_part(&self, p: &BigInt) -> u32 {
        let mut r = 0;
        let mut cur = self.order.lattice().scale(&BigRational::from_integer(p.clone()));
        while cur.contains_lattice(&self.lattice) {
            r += 1;
            cur = cur.scale(&BigRational::from_integer(p.clone()));
        }
        r
    }

    /// `v_p(nrd I)`.
    pub fn norm_valuation(&self, p: &BigInt) -> i64 {
        i64::from(valuation(self.norm.numer(), p).0) - i64::from(valuation(self.norm.denom(), p).0)
    }

    /// `I·C` for a two-sided ideal `C` of `O`.
    pub fn mul_two_sided(&self, c: &TwoSidedIdeal) -> RightIdeal {
        let mut l = self.lattice.clone();
        for p in c.ramified.keys() {
            l = self.alg().lattice_mul(&l, &self.order.radical(p));
        }
        let lattice = l.scale(&c.scalar);
        RightIdeal { order: self.order.clone(), lattice, norm: &self.norm * c.norm() }
    }

    /// The two-sided ideal `𝔠 = O·I` and the quotient `I·𝔠⁻¹`.
    pub fn two_sided_generated(&self) -> Result<(TwoSidedIdeal, RightIdeal)> {
        let alg = self.alg();
        let mut rows = Vec::with_capacity(16);
        for b in self.order.basis() {
            for x in self.basis() {
                let y = alg.mul(&b, &x);
                rows.push((y.num().clone(), y.den().clone()));
            }
        }
        let c_lat = IntLattice::from_rational_generators(&rows)?;
        let n = lattice_norm(&c_lat, &self.order)?;
        let mut ram = BTreeMap::new();
        let mut rest = n.clone();
        for p in alg.ramified() {
            let v = i64::from(valuation(n.numer(), p).0) - i64::from(valuation(n.denom(), p).0);
            if v.rem_euclid(2) == 1 {
                ram.insert(p.clone(), 1u8);
                rest /= BigRational::from_integer(p.clone());
            }
        }
        let q = rational_sqrt(&rest).ok_or_else(|| Error::invariant("two-sided ideal has non-square scalar norm"))?;
        let c = TwoSidedIdeal { scalar: q, ramified: ram };
        if c.lattice(&self.order) != c_lat {
            return Err(Error::invariant("two-sided ideal not of the form q·∏𝔓"));
        }
        let j = self.mul_two_sided(&c.inverse());
        Ok((c, j))
    }
}

/// A two-sided ideal `q·∏𝔓_p` of a maximal order, `p` ramified.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TwoSidedIdeal {
    scalar: BigRational,
    ramified: BTreeMap<BigInt, u8>,
}

impl TwoSidedIdeal {
    pub fn one() -> Self {
        TwoSidedIdeal { scalar: BigRational::one(), ramified: BTreeMap::new() }
    }

    pub fn scalar(q: BigRational) -> Self {
        assert!(q.is_positive());
        TwoSidedIdeal { scalar: q, ramified: BTreeMap::new() }
    }

    pub fn new(q: BigRational, primes: impl IntoIterator<Item = BigInt>) -> Self {
        let ramified = primes.into_iter().map(|p| (p, 1u8)).collect();
        TwoSidedIdeal { scalar: q.abs(), ramified }
    }

    pub fn scalar_part(&self) -> &BigRational {
        &self.scalar
    }

    pub fn ramified_part(&self) -> impl Iterator<Item = &BigInt> {
        self.ramified.keys()
    }

    pub fn is_one(&self) -> bool {
        self.scalar.is_one() && self.ramified.is_empty()
    }

    /// `nrd = q²·∏p`.
    pub fn norm(&self) -> BigRational {
        let mut n = &self.scalar * &self.scalar;
        for p in self.ramified.keys() {
            n *= BigRational::from_integer(p.clone());
        }
        n
    }

    /// Product; uses `𝔓² = pO`.
    pub fn mul(&self, o: &TwoSidedIdeal) -> TwoSidedIdeal {
        let mut scalar = &self.scalar * &o.scalar;
        let mut ramified = self.ramified.clone();
        for p in o.ramified.keys() {
            if ramified.remove(p).is_some() {
                scalar *= BigRational::from_integer(p.clone());
            } else {
                ramified.insert(p.clone(), 1);
            }
        }
        TwoSidedIdeal { scalar, ramified }
    }

    pub fn scale(&self, q: &BigRational) -> TwoSidedIdeal {
        TwoSidedIdeal { scalar: &self.scalar * q.abs(), ramified: self.ramified.clone() }
    }

    /// `𝔓⁻¹ = p⁻¹𝔓`.
    pub fn inverse(&self) -> TwoSidedIdeal {
        let mut scalar = self.scalar.recip();
        for p in self.ramified.keys() {
            scalar /= BigRational::from_integer(p.clone());
        }
        TwoSidedIdeal { scalar, ramified: self.ramified.clone() }
    }

    pub fn lattice(&self, o: &Order) -> IntLattice {
        let mut l = o.lattice().clone();
        for p in self.ramified.keys() {
            l = o.alg().lattice_mul(&l, &o.radical(p));
        }
        l.scale(&self.scalar)
    }
}

impl fmt::Display for TwoSidedIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.scalar)?;
        for p in self.ramified.keys() {
            write!(f, "·P{p}")?;
        }
        write!(f, "·O")
    }
}

/// Parses `"gens: t,u,v,w ; ..."` or `"hnf: 16 ints / denom"` (ambient coordinates).
pub fn parse_ideal(order: Arc<Order>, s: &str) -> Result<RightIdeal> {
    let s = s.trim();
    if let Some(rest) = s.strip_prefix("gens:") {
        let gens = rest
            .split(';')
            .filter(|g| !g.trim().is_empty())
            .map(|g| g.trim().parse::<QuatElement>())
            .collect::<Result<Vec<_>>>()?;
        return RightIdeal::from_generators(order, &gens);
    }
    if let Some(rest) = s.strip_prefix("hnf:") {
        let (ints, den) = match rest.split_once('/') {
            Some((a, b)) => (a, parse_rational(b.trim())?),
            None => (rest, BigRational::one()),
        };
        if !den.is_integer() || !den.is_positive() {
            return Err(Error::Parse("hnf denominator must be a positive integer".into()));
        }
        let vals = ints
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<BigInt>().map_err(|_| Error::Parse(format!("bad integer {t:?}"))))
            .collect::<Result<Vec<_>>>()?;
        if vals.len() != 16 {
            return Err(Error::Parse(format!("hnf needs 16 integers, got {}", vals.len())));
        }
        let rows: Vec<Vec4> = vals.chunks(4).map(|c| [c[0].clone(), c[1].clone(), c[2].clone(), c[3].clone()]).collect();
        let lattice = IntLattice::from_generators(&rows, &den.to_integer()).map_err(|_| Error::RankDeficient)?;
        return RightIdeal::from_lattice(order, lattice);
    }
    Err(Error::Parse(format!("ideal must start with \"gens:\" or \"hnf:\": {s:?}")))
}
