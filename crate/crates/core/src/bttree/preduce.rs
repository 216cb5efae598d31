use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::ideals::{RightIdeal, SplittingMap};
use crate::localring::{local_generator, LocalMat};
use crate::quat::{Order, QuatElement};
use crate::units::CompactRep;

use super::{content, divide_content, P1Point, TreeVertex};

/// A unit rotating one neighbor of `P_b` onto `P_{1−b}`, with its word in the
/// side-`b` generators (`true` marks an inverse).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableEntry {
    pub word: Vec<(usize, bool)>,
    pub unit: CompactRep,
}

/// Two adjacent vertices `P₀`, `P₁ = X₁·P₀` and unit tables turning every
/// neighbor of `P_b` into `P_{1−b}`.
#[derive(Clone, Debug)]
pub struct PReductionStructure {
    pub(crate) p: BigInt,
    pub(crate) map: SplittingMap,
    pub(crate) i1: RightIdeal,
    pub(crate) o1: Arc<Order>,
    pub(crate) x1: QuatElement,
    pub(crate) gens: [Vec<CompactRep>; 2],
    pub(crate) tables: [Vec<TableEntry>; 2],
    pub(crate) targets: [P1Point; 2],
}

/// Minimum precision of the stored splitting map.
pub(crate) const STRUCTURE_PRECISION: u32 = 3;

impl PReductionStructure {
    pub fn p(&self) -> &BigInt {
        &self.p
    }

    pub fn p_u64(&self) -> u64 {
        self.p.to_u64().expect("small prime")
    }

    pub fn map(&self) -> &SplittingMap {
        &self.map
    }

    pub fn i1(&self) -> &RightIdeal {
        &self.i1
    }

    pub fn o1(&self) -> &Arc<Order> {
        &self.o1
    }

    pub fn x1(&self) -> &QuatElement {
        &self.x1
    }

    pub fn generators(&self, side: usize) -> &[CompactRep] {
        &self.gens[side]
    }

    pub fn table(&self, side: usize) -> &[TableEntry] {
        &self.tables[side]
    }

    pub fn entry(&self, side: usize, pt: P1Point) -> &TableEntry {
        &self.tables[side][pt.index() as usize]
    }

    /// The label of `P_{1−b}` seen from `P_b`.
    pub fn target(&self, side: usize) -> P1Point {
        self.targets[side]
    }

    /// Action of a side-`b` unit on the labels around `P_b`, as a matrix mod p.
    pub fn action(&self, side: usize, g: &CompactRep) -> Result<LocalMat> {
        action_matrix(&self.map, &self.x1, side, g)
    }

    /// Checks every table entry through the splitting map.
    pub fn verify(&self) -> Result<()> {
        let p = self.p_u64();
        for side in 0..2 {
            if self.tables[side].len() as u64 != p + 1 {
                return Err(Error::invariant("incomplete reduction table"));
            }
            for pt in P1Point::all(p) {
                let e = self.entry(side, pt);
                if e.word.len() as u64 > p + 2 {
                    return Err(Error::invariant("table word longer than p + 2"));
                }
                if pt.act(&self.action(side, &e.unit)?) != self.targets[side] {
                    return Err(Error::invariant(format!("table entry {pt} on side {side} misses its target")));
                }
            }
        }
        Ok(())
    }
}

/// `ι(g) mod p` on side 0; on side 1 the conjugate `X₁⁻¹·ι(g)·X₁`, computed
/// as `adj(X₁)·ι(p·g)·X₁ / p²` since only `p·g` lies in `O`.
pub(crate) fn action_matrix(map: &SplittingMap, x1: &QuatElement, side: usize, g: &CompactRep) -> Result<LocalMat> {
    let alg = map.order().alg();
    let p = map.p().clone();
    if side == 0 {
        let z = g.eval_cr(alg, &p)?;
        let m = map.image(&z).ok_or_else(|| Error::invariant("side-0 unit outside the order"))?;
        return Ok(m.reduce(1));
    }
    let map = map.at_precision(STRUCTURE_PRECISION)?;
    let z = g.eval_cr(alg, &p.pow(STRUCTURE_PRECISION + 1))?.scale_int(&p);
    let gz = map.image(&z).ok_or_else(|| Error::invariant("side-1 unit with p·g outside the order"))?;
    let x = map.image(x1).expect("x₁ in the order");
    let h = x.adjugate().mul(&gz).mul(&x);
    let h = divide_content(&h, 2)?;
    if h.w() != Some(0) {
        return Err(Error::invariant("side-1 unit does not fix P₁"));
    }
    Ok(h.reduce(1))
}

/// Label of the neighbor of `P_b` on the segment from `P_b` to `Q`.
pub fn step_toward(side: usize, q: &TreeVertex, s: &PReductionStructure) -> Result<P1Point> {
    if side == 0 {
        return q.first_step();
    }
    let map = s.map.at_precision(q.precision())?;
    side_one_label(q.matrix(), &map.image(&s.x1).expect("x₁ in the order"))
}

fn side_one_label(m: &LocalMat, x: &LocalMat) -> Result<P1Point> {
    let a = x.adjugate().mul(m);
    let v = TreeVertex::new(&a)?;
    if v.distance_to_base()? == 0 {
        return Err(Error::Precondition("vertex is P₁".into()));
    }
    v.first_step()
}

/// Output of [`preduce`]: `c·I = J·p^r`.
#[derive(Clone, Debug)]
pub struct PReduceOutput {
    pub j: RightIdeal,
    pub c: CompactRep,
    pub r: u32,
    /// `(k, d(P₀, Q))` at every even loop boundary.
    pub trace: Vec<(u32, u32)>,
}

/// Reduces `v_p(nrd I)` to 0 or 1 by units of `O` and `O₁`.
pub fn preduce(i: &RightIdeal, s: &PReductionStructure) -> Result<PReduceOutput> {
    if !i.is_integral() {
        return Err(Error::Precondition("preduce needs an integral ideal".into()));
    }
    let p = s.p.clone();
    let alg = i.alg();
    let r0 = i.p_part(&p);
    let j0 = if r0 > 0 { i.scale(&BigRational::new(BigInt::one(), p.pow(r0))) } else { i.clone() };
    let mut k = j0.norm_valuation(&p) as u32;
    let mut trace = vec![];
    if k < 2 {
        trace.push((k, k));
        return Ok(PReduceOutput { j: j0, c: CompactRep::one(), r: r0, trace });
    }
    let top = k + 2;
    let map = s.map.at_precision(top.max(STRUCTURE_PRECISION))?;
    let x1_top = map.image(&s.x1).expect("x₁ in the order");
    let start = |ideal: &RightIdeal, kappa: u32| -> Result<LocalMat> {
        let x = local_generator(ideal, &p, &map)?;
        let m = map.image(&x).ok_or_else(|| Error::invariant("local generator outside the order"))?;
        Ok(m.reduce(kappa))
    };
    let mut kappa = k + 2;
    let mut m = start(&j0, kappa)?;
    // applied units, first to last
    let mut applied: Vec<CompactRep> = Vec::new();
    let mut r = r0;
    while k >= 2 {
        if kappa <= k + 1 {
            // not reached while κ = k + 2 holds; rebuild from the current ideal
            let cur = current_ideal(&applied, &j0, &p, r - r0)?;
            kappa = k + 2;
            m = start(&cur, kappa)?;
        }
        let q = TreeVertex::new(&m)?;
        let dist = q.distance_to_base()?;
        trace.push((k, dist));
        if dist != k {
            return Err(Error::invariant("vertex distance differs from the norm valuation"));
        }
        // side 0: rotate the first step onto P₁
        let label = q.first_step()?;
        let g = &s.entry(0, label).unit;
        if !g.is_trivial() {
            let z = g.eval_cr(alg, &p.pow(kappa))?;
            let gz = map.image(&z).ok_or_else(|| Error::invariant("side-0 unit outside the order"))?;
            m = gz.reduce(kappa).mul(&m);
        }
        applied.push(g.clone());
        if TreeVertex::new(&m)?.first_step()? != s.targets[0] {
            return Err(Error::invariant("side-0 rotation missed P₁"));
        }
        // side 1: from P₁, rotate the next step onto P₀
        let x = x1_top.reduce(kappa);
        let label = side_one_label(&m, &x)?;
        let g = &s.entry(1, label).unit;
        let z = g.eval_cr(alg, &p.pow(kappa + 2))?.scale_int(&p);
        let gz = map.image(&z).ok_or_else(|| Error::invariant("side-1 unit with p·g outside the order"))?;
        let moved = gz.reduce(kappa).mul(&m);
        if content(&moved) != Some(2) {
            return Err(Error::invariant("side-1 rotation did not move towards P₀"));
        }
        m = divide_content(&moved, 2)?;
        applied.push(g.clone());
        kappa -= 2;
        k -= 2;
        r += 1;
    }
    let q = TreeVertex::new(&m)?;
    trace.push((k, q.distance_to_base()?));
    let c = CompactRep::product(applied.iter().rev().cloned());
    let j = c.mul_cr(&j0)?.scale(&BigRational::new(BigInt::one(), p.pow(r - r0)));
    if !j.is_integral() || j.norm_valuation(&p) != i64::from(k) {
        return Err(Error::invariant("preduce output fails its norm postcondition"));
    }
    Ok(PReduceOutput { j, c, r, trace })
}

fn current_ideal(applied: &[CompactRep], j0: &RightIdeal, p: &BigInt, r: u32) -> Result<RightIdeal> {
    let c = CompactRep::product(applied.iter().rev().cloned());
    Ok(c.mul_cr(j0)?.scale(&BigRational::new(BigInt::one(), p.pow(r))))
}
