use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::bttree::PReductionStructure;
use crate::error::{Error, Result};
use crate::ideals::{local_right_ideal, smooth_exponents, RightIdeal, TwoSidedIdeal};
use crate::linalg::{smith, solve_left, Enumerator, Matrix};
use crate::localring::LocalMat;
use crate::quat::{Order, QuatElement};
use crate::units::{pbuild_with_budget, DEFAULT_SEARCH_BUDGET};

use super::factor_base::FactorBase;

/// An integral element with factor-base-smooth reduced norm.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub x: QuatElement,
    /// Sign of `nrd(x)`.
    pub sign: i8,
    /// Valuations of `nrd(x)` over the factor base.
    pub exponents: Vec<u32>,
}

impl Relation {
    pub fn new(o: &Order, x: QuatElement, fb: &FactorBase) -> Option<Relation> {
        if !o.contains(&x) {
            return None;
        }
        let n = o.alg().nrd(&x).to_integer();
        let exponents = smooth_exponents(&n, fb.primes())?;
        let sign = if n.is_negative() { -1 } else { 1 };
        Some(Relation { x, sign, exponents })
    }

    pub fn abs_norm(&self, fb: &FactorBase) -> BigInt {
        fb.primes().iter().zip(&self.exponents).fold(BigInt::from(1), |acc, (p, e)| acc * p.pow(*e))
    }
}

/// Budgets for [`gbuild`].
#[derive(Clone, Copy, Debug)]
pub struct BuildConfig {
    /// Elements enumerated per relation search.
    pub enum_budget: u64,
    /// Elements enumerated per unit search.
    pub unit_budget: u64,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig { enum_budget: 200_000, unit_budget: DEFAULT_SEARCH_BUDGET }
    }
}

/// Factor base, p-reduction structures at the split primes and relations
/// whose norms generate every factor base prime.
#[derive(Clone, Debug)]
pub struct GReductionStructure {
    pub(crate) order: Arc<Order>,
    pub(crate) fb: FactorBase,
    pub(crate) local: BTreeMap<BigInt, PReductionStructure>,
    pub(crate) relations: Vec<Relation>,
}

impl GReductionStructure {
    pub fn order(&self) -> &Arc<Order> {
        &self.order
    }

    pub fn factor_base(&self) -> &FactorBase {
        &self.fb
    }

    pub fn local(&self, p: &BigInt) -> Option<&PReductionStructure> {
        self.local.get(p)
    }

    pub fn local_structures(&self) -> impl Iterator<Item = &PReductionStructure> {
        self.local.values()
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    /// Rows are the valuation vectors of the relations.
    pub fn valuation_matrix(&self) -> Matrix {
        valuation_matrix(&self.relations)
    }

    /// Re-checks every stored invariant.
    pub fn check(&self) -> Result<()> {
        for s in self.local.values() {
            s.verify()?;
        }
        for (k, p) in self.fb.split_primes().enumerate() {
            if !self.local.contains_key(p) {
                return Err(Error::invariant(format!("missing reduction structure at {p} ({k})")));
            }
        }
        for r in &self.relations {
            let again = Relation::new(&self.order, r.x.clone(), &self.fb);
            if again.as_ref() != Some(r) {
                return Err(Error::invariant(format!("relation {} is not smooth and integral", r.x)));
            }
        }
        if !is_unimodular(&self.relations, self.fb.len()) {
            return Err(Error::invariant("relation norms do not generate the factor base"));
        }
        Ok(())
    }
}

fn valuation_matrix(rel: &[Relation]) -> Matrix {
    rel.iter().map(|r| r.exponents.iter().map(|e| BigInt::from(*e)).collect()).collect()
}

fn is_unimodular(rel: &[Relation], n: usize) -> bool {
    if n == 0 {
        return true;
    }
    if rel.is_empty() {
        return false;
    }
    smith(&valuation_matrix(rel)).is_unimodular(n)
}

fn in_row_span(rel: &[Relation], v: &[u32]) -> bool {
    if rel.is_empty() {
        return v.iter().all(|e| *e == 0);
    }
    let target: Vec<BigInt> = v.iter().map(|e| BigInt::from(*e)).collect();
    solve_left(&valuation_matrix(rel), &target).is_some()
}

/// First smooth element of `ideal` whose valuations are new to `rel`.
fn smooth_element(
    o: &Arc<Order>,
    ideal: &RightIdeal,
    fb: &FactorBase,
    rel: &[Relation],
    budget: u64,
) -> Result<Option<Relation>> {
    let alg = o.alg();
    let mut en = Enumerator::new(ideal.lattice(), &alg.t2_form())?;
    while en.emitted() < budget {
        let v = en.next_element();
        let x = QuatElement::new(v, en.den().clone());
        if alg.nrd(&x).is_zero() {
            continue;
        }
        if let Some(r) = Relation::new(o, x, fb) {
            if !in_row_span(rel, &r.exponents) {
                return Ok(Some(r));
            }
        }
    }
    Ok(None)
}

/// Builds the reduction structure for a maximal order.
pub fn gbuild(o: &Arc<Order>, fb: &FactorBase, config: &BuildConfig) -> Result<GReductionStructure> {
    let alg = o.alg();
    let split: Vec<BigInt> = fb.split_primes().cloned().collect();
    if split.is_empty() {
        return Err(Error::InsufficientSplitPrimes);
    }
    let mut local = BTreeMap::new();
    for p in &split {
        local.insert(p.clone(), pbuild_with_budget(o, p, config.unit_budget)?);
    }
    // −1 and the primes themselves
    let mut relations: Vec<Relation> = Vec::new();
    relations.push(Relation::new(o, QuatElement::integer(-1), fb).expect("−1 is a unit"));
    for p in fb.primes() {
        relations.push(Relation::new(o, QuatElement::integer(p.clone()), fb).expect("p is smooth"));
    }
    // one smooth element in an ideal of norm p for each prime
    for (k, p) in fb.primes().iter().enumerate() {
        let ideal = if fb.is_split(k) {
            let map = local[p].map().at_precision(1)?;
            local_right_ideal(&map, &LocalMat::new(p, 1, [1, 0, 0, 0].map(BigInt::from)))?
        } else {
            let c = TwoSidedIdeal::new(BigRational::from_integer(BigInt::from(1)), [p.clone()]);
            RightIdeal::from_lattice(o.clone(), c.lattice(o))?
        };
        debug_assert_eq!(ideal.norm_int().as_ref(), Some(p));
        // none at all means the span already has odd valuation at p
        if let Some(r) = smooth_element(o, &ideal, fb, &relations, config.enum_budget)? {
            relations.push(r);
        }
    }
    // more relations from O until the norms generate ⟨FB⟩
    let mut en = Enumerator::new(o.lattice(), &alg.t2_form())?;
    let mut done = is_unimodular(&relations, fb.len());
    while !done {
        if en.emitted() >= config.enum_budget {
            return Err(Error::BudgetExhausted("relation search did not reach a unimodular valuation matrix".into()));
        }
        let v = en.next_element();
        let x = QuatElement::new(v, en.den().clone());
        if alg.nrd(&x).is_zero() {
            continue;
        }
        if let Some(r) = Relation::new(o, x, fb) {
            if !in_row_span(&relations, &r.exponents) {
                relations.push(r);
                done = is_unimodular(&relations, fb.len());
            }
        }
    }
    log::debug!("gbuild: {} relations over {} primes", relations.len(), fb.len());
    let s = GReductionStructure { order: o.clone(), fb: fb.clone(), local, relations };
    s.check()?;
    Ok(s)
}
