use std::collections::{HashSet, VecDeque};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::arith::{pell_fundamental_unit_capped, DEFAULT_UNIT_DIGITS};
use crate::bttree::P1Point;
use crate::error::{Error, Result};
use crate::linalg::{coordinate_form, lll_reduce, Enumerator, Vec4};
use crate::localring::LocalMat;
use crate::quat::{Order, QuatElement};

use super::compact::CompactRep;
use super::quadratic::QuadraticContext;

/// Default number of enumerated elements before giving up.
pub const DEFAULT_SEARCH_BUDGET: u64 = 20_000;

/// Orbit of `start` under the matrices and their inverses.
pub fn orbit(start: P1Point, mats: &[LocalMat], p: u64) -> Vec<P1Point> {
    let inverses: Vec<LocalMat> = mats.iter().map(|m| m.adjugate()).collect();
    let mut seen = vec![false; p as usize + 1];
    let mut out = vec![start];
    seen[start.index() as usize] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(q) = queue.pop_front() {
        for h in mats.iter().chain(inverses.iter()) {
            let r = q.act(h);
            if !seen[r.index() as usize] {
                seen[r.index() as usize] = true;
                out.push(r);
                queue.push_back(r);
            }
        }
    }
    out
}

pub fn is_transitive(mats: &[LocalMat], p: u64) -> bool {
    orbit(P1Point::from_index(0, p), mats, p).len() as u64 == p + 1
}

fn is_scalar_mod_p(m: &LocalMat) -> bool {
    let p = m.p();
    let e = m.entries();
    (&e[1] % p).is_zero() && (&e[2] % p).is_zero() && ((&e[0] - &e[3]) % p).is_zero()
}

// primitive integer direction of the pure part, up to sign
fn pure_direction(x: &QuatElement) -> Vec4 {
    let mut v = x.num().clone();
    v[0] = BigInt::zero();
    let g = v.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    let mut v = v.map(|c| c / &g);
    if v.iter().find(|c| !c.is_zero()).is_some_and(|c| c.is_negative()) {
        v = v.map(|c| -c);
    }
    v
}

/// Fundamental units of real quadratic suborders of `host`, enumerated by
/// `T₂` (by an LLL coordinate form when the algebra is `M₂(ℚ)`), until the
/// action matrices (together with `seeds`) act transitively on `ℙ¹(𝔽_p)`. `action` maps a unit to its matrix mod p.
pub fn p1search(
    host: &Arc<Order>,
    reference: &Arc<Order>,
    p: u64,
    seeds: &[LocalMat],
    action: &dyn Fn(&CompactRep) -> Result<LocalMat>,
    budget: u64,
) -> Result<Vec<(CompactRep, LocalMat)>> {
    let alg = host.alg();
    let mut mats: Vec<LocalMat> = seeds.to_vec();
    let mut out = Vec::new();
    if is_transitive(&mats, p) {
        return Ok(out);
    }
    let mut seen: HashSet<Vec4> = HashSet::new();
    let t2 = alg.t2_form();
    // in M₂(ℚ) a skewed T₂ ball of O can hold ~10⁵ triangular zero divisors
    // before anything with a real quadratic field; balance it first
    let form = if alg.ramified().is_empty() { coordinate_form(&lll_reduce(host.lattice(), &t2)?) } else { t2 };
    let mut en = Enumerator::new(host.lattice(), &form)?;
    let mut fields = 0usize;
    while en.emitted() < budget {
        let v = en.next_element();
        let x = QuatElement::new(v, en.den().clone());
        if x.is_scalar() {
            continue;
        }
        let t = x.trd().to_integer();
        let n = alg.nrd(&x).to_integer();
        let disc = &t * &t - BigInt::from(4) * &n;
        if !disc.is_positive() || disc.sqrt().pow(2) == disc {
            continue;
        }
        if !seen.insert(pure_direction(&x)) {
            continue;
        }
        fields += 1;
        let ctx = QuadraticContext::from_element(&x, host, reference)?;
        let unit = match pell_fundamental_unit_capped(ctx.d(), ctx.conductor(), DEFAULT_UNIT_DIGITS) {
            Ok(u) => u,
            Err(Error::SizeCap(_)) => continue,
            Err(e) => return Err(e),
        };
        let y = ctx.from_unit(&unit)?;
        let g = CompactRep::unit_power(Arc::new(ctx), y, 1);
        let m = action(&g)?;
        if is_scalar_mod_p(&m) {
            continue;
        }
        let before = orbit(P1Point::from_index(0, p), &mats, p).len();
        mats.push(m.clone());
        if orbit(P1Point::from_index(0, p), &mats, p).len() == before {
            // the orbit only grows if some generator leaves it
            mats.pop();
            continue;
        }
        out.push((g, m));
        if is_transitive(&mats, p) {
            log::debug!("p1search: p = {p}, {fields} suborders, {} units", out.len());
            return Ok(out);
        }
    }
    Err(Error::BudgetExhausted(format!("no transitive unit set at p = {p} within {budget} elements")))
}

/// Breadth-first words: for every point `Q`, a word `w` with `w·Q = target`.
/// Letters are `(generator, inverted)`.
pub fn bfs_words(mats: &[LocalMat], target: P1Point, p: u64) -> Option<Vec<Vec<(usize, bool)>>> {
    let mut words: Vec<Option<Vec<(usize, bool)>>> = vec![None; p as usize + 1];
    words[target.index() as usize] = Some(vec![]);
    let mut queue = VecDeque::from([target]);
    let letters: Vec<(usize, bool, LocalMat)> = mats
        .iter()
        .enumerate()
        .flat_map(|(k, m)| [(k, false, m.clone()), (k, true, m.adjugate())])
        .collect();
    while let Some(q) = queue.pop_front() {
        let wq = words[q.index() as usize].clone().unwrap();
        for (k, inv, m) in &letters {
            // R = s⁻¹·Q gets w_R = w_Q·s
            let sinv = if *inv { mats[*k].clone() } else { m.adjugate() };
            let r = q.act(&sinv);
            if words[r.index() as usize].is_none() {
                let mut w = wq.clone();
                w.push((*k, *inv));
                words[r.index() as usize] = Some(w);
                queue.push_back(r);
            }
        }
    }
    words.into_iter().collect()
}

pub(crate) fn word_unit(word: &[(usize, bool)], gens: &[CompactRep], inverses: &[CompactRep]) -> CompactRep {
    CompactRep::product(word.iter().map(|(k, inv)| if *inv { inverses[*k].clone() } else { gens[*k].clone() }))
}

pub(crate) fn p_as_u64(p: &BigInt) -> Result<u64> {
    p.to_u64().filter(|q| *q < (1 << 20)).ok_or_else(|| Error::InvalidInput(format!("prime {p} too large for tree tables")))
}
