use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::bttree::preduce;
use crate::error::{Error, Result};
use crate::ideals::{ideal_is_smooth, RightIdeal, TwoSidedIdeal};
use crate::linalg::solve_left;
use crate::units::CompactRep;

use super::gbuild::GReductionStructure;

/// `g·I = J·C` with `J` integral.
#[derive(Clone, Debug)]
pub struct GReduceOutput {
    pub j: RightIdeal,
    pub g: CompactRep,
    pub c: TwoSidedIdeal,
}

impl GReduceOutput {
    pub fn is_trivial(&self) -> bool {
        self.j.is_unit() && self.c.is_one()
    }
}

fn l1(v: &[BigInt]) -> BigInt {
    v.iter().map(|x| x.abs()).sum()
}

/// Exponents `e` with `Σ e_x·v(nrd x) = −a`, greedily shortened in `L¹` by the kernel.
pub fn solve_exponents(s: &GReductionStructure, a: &[u32]) -> Result<Vec<BigInt>> {
    let target: Vec<BigInt> = a.iter().map(|x| -BigInt::from(*x)).collect();
    let (mut e, kernel) = solve_left(&s.valuation_matrix(), &target)
        .ok_or_else(|| Error::invariant("norm exponents outside the relation lattice"))?;
    let mut best = l1(&e);
    let mut improved = true;
    let mut rounds = 0;
    while improved && rounds < 1000 {
        improved = false;
        rounds += 1;
        for k in &kernel {
            for sign in [1i32, -1] {
                loop {
                    let cand: Vec<BigInt> = e.iter().zip(k).map(|(x, y)| x + y * sign).collect();
                    let n = l1(&cand);
                    if n < best {
                        best = n;
                        e = cand;
                        improved = true;
                    } else {
                        break;
                    }
                }
            }
        }
    }
    Ok(e)
}

/// Reduces a smooth integral ideal to `J·C` with `J` coprime to the split primes.
pub fn greduce(i: &RightIdeal, s: &GReductionStructure) -> Result<GReduceOutput> {
    if !i.is_integral() {
        return Err(Error::Precondition("greduce needs an integral ideal".into()));
    }
    let fb = s.factor_base();
    let a = ideal_is_smooth(i, fb.primes()).ok_or_else(|| Error::Precondition("ideal is not smooth".into()))?;
    let e = solve_exponents(s, &a)?;
    // e = 2⌊e/2⌋ + (e mod 2)
    let mut leaves = Vec::new();
    let mut f = BigRational::one();
    for (r, ex) in s.relations().iter().zip(&e) {
        let (half, bit) = ex.div_mod_floor(&BigInt::from(2));
        if !bit.is_zero() {
            leaves.push(CompactRep::Leaf(r.x.clone()));
        }
        if !half.is_zero() {
            let n = BigRational::from_integer(r.abs_norm(fb));
            let h: i32 = (&half).try_into().map_err(|_| Error::SizeCap("relation exponent".into()))?;
            f *= num_traits::Pow::pow(&n, h);
        }
    }
    // insertion order, leftmost outermost
    let c = CompactRep::product(leaves);
    let ci = c.mul_cr(i)?;
    let (two, mut j) = ci.two_sided_generated()?;
    let mut cc = two.scale(&f);
    let mut units: Vec<CompactRep> = Vec::new();
    for p in fb.split_primes() {
        if j.norm_valuation(p) < 2 && j.p_part(p) == 0 {
            continue;
        }
        let local = s.local(p).ok_or_else(|| Error::invariant(format!("no reduction structure at {p}")))?;
        let out = preduce(&j, local)?;
        if !out.c.is_trivial() {
            units.push(out.c);
        }
        cc = cc.scale(&BigRational::from_integer(p.pow(out.r)));
        j = out.j;
    }
    units.reverse();
    let mut parts = units;
    parts.push(c);
    parts.push(CompactRep::FormalScalar(f));
    let g = CompactRep::product(parts);
    Ok(GReduceOutput { j, g, c: cc })
}
