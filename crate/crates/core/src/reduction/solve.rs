use num_traits::{Signed, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::ideals::{ideal_is_smooth, random_left_ideal, RightIdeal, SplittingMap, TwoSidedIdeal};
use crate::linalg::Enumerator;
use crate::quat::QuatElement;
use crate::units::CompactRep;

use super::gbuild::GReductionStructure;
use super::greduce::greduce;

/// Default digit cap for expanding a generator.
pub const DEFAULT_EXPAND_DIGITS: usize = 10_000;

/// Output of one successful attempt: `g·I = J·C`.
#[derive(Clone, Debug)]
pub struct SolveCertificate {
    pub j: RightIdeal,
    pub g: CompactRep,
    pub c: TwoSidedIdeal,
    pub principal: bool,
    pub expanded: Option<QuatElement>,
}

/// Budgets for [`principal_generator`].
#[derive(Clone, Copy, Debug)]
pub struct SolveConfig {
    pub attempts: u32,
    /// Elements of `R̄·I⁻¹` tried per attempt for a nonzero norm.
    pub enum_budget: u64,
    pub expand_digits: usize,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig { attempts: 1000, enum_budget: 1000, expand_digits: DEFAULT_EXPAND_DIGITS }
    }
}

/// A verified generator `w` with `w·O = I`.
#[derive(Clone, Debug)]
pub struct Solution {
    pub generator: CompactRep,
    pub expanded: Option<QuatElement>,
    pub attempts: u32,
    /// Smooth fraction of the attempts.
    pub smooth_rate: f64,
}

/// `w·O = I` by HNF equality.
pub fn verify_generator(i: &RightIdeal, w: &QuatElement) -> bool {
    if w.is_zero() || i.alg().nrd(w).is_zero() {
        return false;
    }
    let wo = i.order().lattice().clone();
    i.alg().left_mul_lattice(w, &wo) == *i.lattice()
}

fn maps(s: &GReductionStructure) -> Vec<SplittingMap> {
    s.local_structures().map(|l| l.map().clone()).collect()
}

/// One randomized attempt; `None` when the chosen `x·I` is not smooth.
pub fn is_principal_attempt<R: Rng + ?Sized>(
    i: &RightIdeal,
    s: &GReductionStructure,
    rng: &mut R,
    config: &SolveConfig,
) -> Result<Option<SolveCertificate>> {
    attempt_with_maps(i, s, &maps(s), rng, config)
}

fn attempt_with_maps<R: Rng + ?Sized>(
    i: &RightIdeal,
    s: &GReductionStructure,
    maps: &[SplittingMap],
    rng: &mut R,
    config: &SolveConfig,
) -> Result<Option<SolveCertificate>> {
    let alg = i.alg();
    let fb = s.factor_base();
    let r = random_left_ideal(s.order(), maps, &fb.max_prime(), rng)?;
    // x·I ⊆ R̄ for x ∈ R̄·I⁻¹, so nrd(x·I) = nrd(R)·m with m small
    let lattice = alg.lattice_mul(&alg.conj_lattice(&r.lattice), &i.inverse_lattice());
    let mut en = Enumerator::new(&lattice, &alg.t2_form())?;
    let mut x = None;
    while en.emitted() < config.enum_budget {
        let v = en.next_element();
        let y = QuatElement::new(v, en.den().clone());
        if !alg.nrd(&y).is_zero() {
            x = Some(y);
            break;
        }
    }
    let Some(x) = x else { return Ok(None) };
    let xi = i.left_mul(&x);
    if !xi.is_integral() {
        return Err(Error::invariant("element of I⁻¹ does not make I integral"));
    }
    if ideal_is_smooth(&xi, fb.primes()).is_none() {
        return Ok(None);
    }
    let out = greduce(&xi, s)?;
    let g = CompactRep::product([out.g, CompactRep::Leaf(x)]);
    if g.mul_cr(i)? != out.j.mul_two_sided(&out.c) {
        return Err(Error::invariant("g·I ≠ J·C"));
    }
    let principal = out.j.is_unit() && out.c.is_one();
    Ok(Some(SolveCertificate { j: out.j, g, c: out.c, principal, expanded: None }))
}

/// Retries [`is_principal_attempt`] until it succeeds, then returns
/// `w = g⁻¹` verified through `mul_cr` and, when it fits the digit cap, exactly.
pub fn principal_generator<R: Rng + ?Sized>(
    i: &RightIdeal,
    s: &GReductionStructure,
    rng: &mut R,
    config: &SolveConfig,
) -> Result<Solution> {
    if !i.is_integral() {
        return Err(Error::Precondition("ideal is not integral".into()));
    }
    if i.order().lattice() != s.order().lattice() {
        return Err(Error::IncompatibleOrders);
    }
    let alg = i.alg();
    let maps = maps(s);
    let mut smooth = 0u32;
    for attempt in 1..=config.attempts {
        let Some(cert) = attempt_with_maps(i, s, &maps, rng, config)? else { continue };
        smooth += 1;
        if !cert.principal {
            // impossible over ℚ: the class group of an indefinite algebra is trivial
            return Err(Error::invariant("reduction ended at a non-principal ideal"));
        }
        if !cert.g.mul_cr(i)?.is_unit() {
            return Err(Error::invariant("generator check g·I = O failed"));
        }
        let generator = cert.g.inverse(alg)?;
        let expanded = match generator.expand(alg, config.expand_digits) {
            Ok(w) => Some(w),
            Err(Error::SizeCap(_)) => None,
            Err(e) => return Err(e),
        };
        if let Some(w) = &expanded {
            if !verify_generator(i, w) || alg.nrd(w).abs() != *i.norm() {
                return Err(Error::invariant("expanded generator fails w·O = I"));
            }
        }
        log::debug!("solve: {attempt} attempts, {smooth} smooth");
        return Ok(Solution { generator, expanded, attempts: attempt, smooth_rate: f64::from(smooth) / f64::from(attempt) });
    }
    Err(Error::BudgetExhausted(format!("no smooth attempt in {} tries", config.attempts)))
}

/// Baseline: enumerate `I` by `T₂` until `|nrd x| = nrd(I)`.
pub fn naive_generator(i: &RightIdeal, budget: u64) -> Result<QuatElement> {
    let alg = i.alg();
    let target = i.norm().clone();
    let mut en = Enumerator::new(i.lattice(), &alg.t2_form())?;
    while en.emitted() < budget {
        let v = en.next_element();
        let x = QuatElement::new(v, en.den().clone());
        if alg.nrd(&x).abs() == target {
            return Ok(x);
        }
    }
    Err(Error::BudgetExhausted(format!("naive search: no generator within {budget} elements")))
}
