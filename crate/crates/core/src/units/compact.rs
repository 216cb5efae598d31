use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};

use crate::error::{Error, Result};
use crate::ideals::RightIdeal;
use crate::quat::{QuatAlgebra, QuatElement};

use super::quadratic::{element_denominator, QuadElem, QuadraticContext};

/// A symbolic element: kept unexpanded so units with huge coefficients stay cheap.
#[derive(Clone, PartialEq, Eq)]
pub enum CompactRep {
    Leaf(QuatElement),
    /// `∏ yᵢ^{eᵢ}` inside one quadratic suborder; the product is a unit there.
    UnitPower { ctx: Arc<QuadraticContext>, factors: Vec<(QuadElem, BigInt)> },
    /// Ordered product, leftmost factor outermost.
    Product(Vec<CompactRep>),
    FormalScalar(BigRational),
}

impl fmt::Debug for CompactRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CompactRep::Leaf(x) => write!(f, "({x})"),
            CompactRep::UnitPower { ctx, factors } => {
                write!(f, "Q({})[", ctx.d())?;
                for (k, (y, e)) in factors.iter().enumerate() {
                    if k > 0 {
                        write!(f, "·")?;
                    }
                    write!(f, "({y})^{e}")?;
                }
                write!(f, "]")
            }
            CompactRep::Product(xs) => {
                write!(f, "<")?;
                for (k, x) in xs.iter().enumerate() {
                    if k > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{x:?}")?;
                }
                write!(f, ">")
            }
            CompactRep::FormalScalar(q) => write!(f, "{q}"),
        }
    }
}

impl CompactRep {
    pub fn one() -> Self {
        CompactRep::Product(Vec::new())
    }

    pub fn unit_power(ctx: Arc<QuadraticContext>, y: QuadElem, e: impl Into<BigInt>) -> Self {
        CompactRep::UnitPower { ctx, factors: vec![(y, e.into())] }
    }

    /// `self·other`, flattening nested products.
    pub fn then_left(&self, outer: &CompactRep) -> CompactRep {
        let mut items = Vec::new();
        outer.push_flat(&mut items);
        self.push_flat(&mut items);
        CompactRep::Product(items)
    }

    pub fn product(items: impl IntoIterator<Item = CompactRep>) -> CompactRep {
        let mut out = Vec::new();
        for x in items {
            x.push_flat(&mut out);
        }
        if out.len() == 1 {
            out.pop().unwrap()
        } else {
            CompactRep::Product(out)
        }
    }

    fn push_flat(&self, out: &mut Vec<CompactRep>) {
        match self {
            CompactRep::Product(xs) => {
                for x in xs {
                    x.push_flat(out);
                }
            }
            other => out.push(other.clone()),
        }
    }

    pub fn is_trivial(&self) -> bool {
        match self {
            CompactRep::Leaf(x) => x.is_one(),
            CompactRep::UnitPower { factors, .. } => factors.iter().all(|(_, e)| e.is_zero()),
            CompactRep::Product(xs) => xs.iter().all(|x| x.is_trivial()),
            CompactRep::FormalScalar(q) => q.is_one(),
        }
    }

    /// Number of leaves and unit powers.
    pub fn size(&self) -> usize {
        match self {
            CompactRep::Product(xs) => xs.iter().map(|x| x.size()).sum(),
            _ => 1,
        }
    }

    pub fn inverse(&self, alg: &QuatAlgebra) -> Result<CompactRep> {
        Ok(match self {
            CompactRep::Leaf(x) => CompactRep::Leaf(alg.inverse(x)?),
            CompactRep::UnitPower { ctx, factors } => CompactRep::UnitPower {
                ctx: ctx.clone(),
                factors: factors.iter().rev().map(|(y, e)| (y.clone(), -e)).collect(),
            },
            CompactRep::Product(xs) => {
                CompactRep::Product(xs.iter().rev().map(|x| x.inverse(alg)).collect::<Result<_>>()?)
            }
            CompactRep::FormalScalar(q) => CompactRep::FormalScalar(q.recip()),
        })
    }

    pub fn nrd(&self, alg: &QuatAlgebra) -> BigRational {
        match self {
            CompactRep::Leaf(x) => alg.nrd(x),
            CompactRep::UnitPower { ctx, factors } => {
                let mut acc = BigRational::one();
                for (y, e) in factors {
                    let n = BigRational::from_integer(ctx.norm(y));
                    let k: i32 = e.try_into().unwrap_or(if e.is_negative() { i32::MIN } else { i32::MAX });
                    if n.abs().is_one() {
                        if e.is_odd() {
                            acc *= n;
                        }
                    } else {
                        acc *= Pow::pow(&n, k);
                    }
                }
                acc
            }
            CompactRep::Product(xs) => xs.iter().fold(BigRational::one(), |acc, x| acc * x.nrd(alg)),
            CompactRep::FormalScalar(q) => q * q,
        }
    }

    /// `z` with `z ≡ y mod m·ℛ` in each suborder; products multiply the
    /// approximations, so the congruence holds modulo `m` times the ring
    /// generated by the factors.
    pub fn eval_cr(&self, alg: &QuatAlgebra, m: &BigInt) -> Result<QuatElement> {
        match self {
            CompactRep::Leaf(x) => Ok(x.clone()),
            CompactRep::FormalScalar(q) => Ok(QuatElement::scalar(q)),
            CompactRep::UnitPower { ctx, factors } => {
                let z = ctx.eval_product(factors, &(m * ctx.conductor()))?;
                Ok(ctx.embed(&z))
            }
            CompactRep::Product(xs) => {
                let mut acc = QuatElement::one();
                for x in xs {
                    acc = alg.mul(&acc, &x.eval_cr(alg, m)?);
                }
                Ok(acc)
            }
        }
    }

    /// The lattice `y·I`, without expanding unit powers.
    pub fn mul_cr(&self, i: &RightIdeal) -> Result<RightIdeal> {
        match self {
            CompactRep::Leaf(x) => Ok(i.left_mul(x)),
            CompactRep::FormalScalar(q) => Ok(i.scale(q)),
            CompactRep::Product(xs) => {
                let mut cur = i.clone();
                for x in xs.iter().rev() {
                    cur = x.mul_cr(&cur)?;
                }
                Ok(cur)
            }
            CompactRep::UnitPower { ctx, .. } => {
                // ℛ ⊆ q⁻¹O and I ⊆ t⁻¹O give y·I ⊆ (qt)⁻¹O, hence
                // y·I ⊇ qt·nrd(I)·O; z ≡ y mod q²t²·num(nrd I)·ℛ suffices
                let alg = i.alg();
                let o = i.order();
                let q = ctx.reference_denominator();
                let t = i.basis().iter().fold(BigInt::one(), |acc, b| acc.lcm(&element_denominator(b, o)));
                let n = i.norm();
                let m = q * q * &t * &t * n.numer();
                let z = self.eval_cr(alg, &m)?;
                let zi = alg.left_mul_lattice(&z, i.lattice());
                let floor = o.lattice().scale(&(BigRational::from_integer(q * &t) * n));
                let lattice = zi.sum(&floor);
                let out = RightIdeal::trusted(o.clone(), lattice);
                if out.lattice().det() != i.lattice().det() {
                    return Err(Error::invariant("unit power changed the ideal norm"));
                }
                Ok(out)
            }
        }
    }

    /// Exact value, refusing coefficients beyond `max_digits` digits.
    pub fn expand(&self, alg: &QuatAlgebra, max_digits: usize) -> Result<QuatElement> {
        match self {
            CompactRep::Leaf(x) => Ok(x.clone()),
            CompactRep::FormalScalar(q) => Ok(QuatElement::scalar(q)),
            CompactRep::UnitPower { ctx, factors } => {
                let (num, den) = ctx.expand(factors, max_digits)?;
                Ok(ctx.embed(&num).scale(&BigRational::new(BigInt::one(), den)))
            }
            CompactRep::Product(xs) => {
                let cap = (max_digits as f64 * std::f64::consts::LOG2_10) as u64 + 8;
                let mut acc = QuatElement::one();
                for x in xs {
                    acc = alg.mul(&acc, &x.expand(alg, max_digits)?);
                    let size = acc.num().iter().map(|c| c.bits()).max().unwrap_or(0).max(acc.den().bits());
                    if size > cap {
                        return Err(Error::SizeCap(format!("expansion exceeds {max_digits} digits")));
                    }
                }
                Ok(acc)
            }
        }
    }
}
