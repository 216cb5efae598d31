use num_bigint::BigInt;
use num_traits::Zero;

use crate::arith::rat_valuation;
use crate::error::{Error, Result};
use crate::ideals::{RightIdeal, SplittingMap};
use crate::linalg::lll_reduce;
use crate::quat::QuatElement;

use super::mat::{gcd_matrix, solve_membership};

/// Some `x ∈ I` with `I_p = x·O_p`, for integral `I` and split `p`.
///
/// `map` may have any precision; it is lifted to `e + 1` where `e` is the
/// valuation at `p` of the norm of a short basis vector.
pub fn local_generator(i: &RightIdeal, p: &BigInt, map: &SplittingMap) -> Result<QuatElement> {
    if !i.is_integral() {
        return Err(Error::Precondition("local generator of a non-integral ideal".into()));
    }
    let alg = i.alg();
    let target = rat_valuation(i.norm(), p);
    let red = lll_reduce(i.lattice(), &alg.t2_form())?;
    let mut basis: Vec<QuatElement> =
        red.rows.iter().map(|r| QuatElement::new(r.clone(), red.den.clone())).collect();
    // zero divisors can be short in a split algebra; lead with the
    // vector of least valuation among those of nonzero norm
    let val = |b: &QuatElement| {
        let n = alg.nrd(b);
        (!n.is_zero()).then(|| rat_valuation(&n, p))
    };
    let mut vals: Vec<Option<i64>> = basis.iter().map(val).collect();
    if vals.iter().all(Option::is_none) {
        // all four are zero divisors; the norm form is nondegenerate, so some
        // ±1 combination is not, and it can replace one of its summands
        let (k, y) = unit_combination(&basis, |y| val(y)).ok_or_else(|| Error::invariant("degenerate norm form"))?;
        vals[k] = val(&y);
        basis[k] = y;
    }
    let lead = (0..4)
        .filter_map(|k| vals[k].map(|v| (v, k)))
        .min()
        .map(|(_, k)| k)
        .ok_or_else(|| Error::invariant("ideal basis of norm zero elements"))?;
    basis.swap(0, lead);
    let e = vals[lead].unwrap();
    if e == target && e >= 0 {
        return Ok(basis[0].clone());
    }
    let map = map.at_precision(e as u32 + 1)?;
    let images: Vec<_> = basis
        .iter()
        .map(|b| map.image(b).ok_or_else(|| Error::invariant("ideal element outside the order")))
        .collect::<Result<_>>()?;
    let mut d = images[0].clone();
    for b in &images[1..] {
        d = gcd_matrix(&d, b);
    }
    let mu = solve_membership(&d, &images)
        .ok_or_else(|| Error::invariant("gcd outside the span of the basis images"))?;
    let mut x = QuatElement::zero();
    for (m, b) in mu.iter().zip(basis.iter()) {
        x = x.add(&b.scale_int(m));
    }
    let n = alg.nrd(&x);
    if n.is_zero() || rat_valuation(&n, p) != target {
        return Err(Error::invariant("local generator has the wrong valuation"));
    }
    Ok(x)
}

// the ±1 combination of least valuation among those of nonzero norm, and
// an index whose coefficient is ±1
fn unit_combination(basis: &[QuatElement], val: impl Fn(&QuatElement) -> Option<i64>) -> Option<(usize, QuatElement)> {
    let mut best: Option<(i64, usize, QuatElement)> = None;
    for code in 0..81u32 {
        let c: Vec<i64> = (0..4).map(|k| ((code / 3u32.pow(k)) % 3) as i64 - 1).collect();
        let Some(k) = c.iter().position(|x| *x != 0) else { continue };
        let mut y = QuatElement::zero();
        for (ck, b) in c.iter().zip(basis) {
            y = y.add(&b.scale_int(&BigInt::from(*ck)));
        }
        if let Some(v) = val(&y) {
            if best.as_ref().is_none_or(|(bv, _, _)| v < *bv) {
                best = Some((v, k, y));
            }
        }
    }
    best.map(|(_, k, y)| (k, y))
}
