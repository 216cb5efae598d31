use std::sync::Arc;

use num_bigint::BigInt;

use crate::bttree::{P1Point, PReductionStructure, TableEntry, TreeVertex};
use crate::bttree::preduce::{action_matrix, STRUCTURE_PRECISION};
use crate::error::{Error, Result};
use crate::ideals::{local_right_ideal, SplittingMap};
use crate::localring::{local_generator, LocalMat};
use crate::quat::{Order, QuatElement};

use super::compact::CompactRep;
use super::p1search::{bfs_words, orbit, p1search, p_as_u64, word_unit, DEFAULT_SEARCH_BUDGET};

/// Builds the p-reduction structure at a split prime `p`.
pub fn pbuild(o: &Arc<Order>, p: &BigInt) -> Result<PReductionStructure> {
    pbuild_with_budget(o, p, DEFAULT_SEARCH_BUDGET)
}

pub fn pbuild_with_budget(o: &Arc<Order>, p: &BigInt, budget: u64) -> Result<PReductionStructure> {
    let pu = p_as_u64(p)?;
    let alg = o.alg();
    let map = SplittingMap::new(o.clone(), p, STRUCTURE_PRECISION)?;
    let e11 = LocalMat::new(p, 1, [1, 0, 0, 0].map(BigInt::from));
    let i1 = local_right_ideal(&map.at_precision(1)?, &e11)?;
    let x1 = local_generator(&i1, p, &map)?;
    let o1 = Arc::new(i1.left_order());
    let x1m = map.image(&x1).expect("x₁ in the order");
    let target0 = TreeVertex::new(&x1m)?.first_step()?;
    let target1 = TreeVertex::new(&x1m.adjugate())?.first_step()?;

    // side 0
    let act0 = |g: &CompactRep| action_matrix(&map, &x1, 0, g);
    let found0 = p1search(o, o, pu, &[], &act0, budget)?;
    let (gens0, mats0): (Vec<CompactRep>, Vec<LocalMat>) = found0.into_iter().unzip();
    let inv0 = inverses(&gens0, alg)?;
    let words0 = bfs_words(&mats0, target0, pu).ok_or_else(|| Error::invariant("side-0 units not transitive"))?;
    let table0: Vec<TableEntry> =
        words0.iter().map(|w| TableEntry { word: w.clone(), unit: word_unit(w, &gens0, &inv0) }).collect();

    // side 1, seeded with units of O fixing the edge: w_Q·s·w_R⁻¹ for R = s⁻¹·Q
    let act1 = |g: &CompactRep| action_matrix(&map, &x1, 1, g);
    let mut gens1: Vec<CompactRep> = Vec::new();
    let mut mats1: Vec<LocalMat> = Vec::new();
    let others = P1Point::all(pu).find(|q| *q != target1).expect("p ≥ 2");
    'seeds: for q in P1Point::all(pu) {
        for (k, m) in mats0.iter().enumerate() {
            for inv in [false, true] {
                if orbit(others, &mats1, pu).len() as u64 == pu {
                    break 'seeds;
                }
                let s = if inv { inv0[k].clone() } else { gens0[k].clone() };
                let sinv_m = if inv { m.clone() } else { m.adjugate() };
                let r = q.act(&sinv_m);
                let wq = &words0[q.index() as usize];
                let wr = &words0[r.index() as usize];
                let h = CompactRep::product([
                    word_unit(wq, &gens0, &inv0),
                    s,
                    word_unit(wr, &gens0, &inv0).inverse(alg)?,
                ]);
                let hm = act1(&h)?;
                let before = orbit(others, &mats1, pu).len();
                mats1.push(hm);
                if orbit(others, &mats1, pu).len() == before {
                    mats1.pop();
                } else {
                    gens1.push(h);
                }
            }
        }
    }
    let seeded = gens1.len();
    let found1 = p1search(&o1, o, pu, &mats1, &act1, budget)?;
    for (g, m) in found1 {
        gens1.push(g);
        mats1.push(m);
    }
    log::debug!("pbuild: p = {p}, {} side-0 units, {seeded} seeds + {} side-1 units", gens0.len(), gens1.len() - seeded);
    let inv1 = inverses(&gens1, alg)?;
    let words1 = bfs_words(&mats1, target1, pu).ok_or_else(|| Error::invariant("side-1 units not transitive"))?;
    let table1: Vec<TableEntry> =
        words1.iter().map(|w| TableEntry { word: w.clone(), unit: word_unit(w, &gens1, &inv1) }).collect();

    let s = PReductionStructure {
        p: p.clone(),
        map,
        i1,
        o1,
        x1,
        gens: [gens0, gens1],
        tables: [table0, table1],
        targets: [target0, target1],
    };
    s.verify()?;
    Ok(s)
}

fn inverses(gens: &[CompactRep], alg: &crate::quat::QuatAlgebra) -> Result<Vec<CompactRep>> {
    gens.iter().map(|g| g.inverse(alg)).collect()
}

/// Rebuilds a structure from stored generators (tables recomputed by BFS).
pub fn pstructure_from_generators(
    o: &Arc<Order>,
    p: &BigInt,
    x1: QuatElement,
    gens: [Vec<CompactRep>; 2],
) -> Result<PReductionStructure> {
    let pu = p_as_u64(p)?;
    let alg = o.alg();
    let map = SplittingMap::new(o.clone(), p, STRUCTURE_PRECISION)?;
    let i1 = crate::ideals::RightIdeal::from_generators(o.clone(), &[x1.clone(), QuatElement::integer(p.clone())])?;
    if i1.norm_int() != Some(p.clone()) {
        return Err(Error::invariant("stored x₁ does not have norm p"));
    }
    let o1 = Arc::new(i1.left_order());
    let x1m = map.image(&x1).ok_or_else(|| Error::invariant("stored x₁ outside the order"))?;
    let targets = [TreeVertex::new(&x1m)?.first_step()?, TreeVertex::new(&x1m.adjugate())?.first_step()?];
    let mut tables: [Vec<TableEntry>; 2] = [Vec::new(), Vec::new()];
    for side in 0..2 {
        let mats: Vec<LocalMat> =
            gens[side].iter().map(|g| action_matrix(&map, &x1, side, g)).collect::<Result<_>>()?;
        let inv = inverses(&gens[side], alg)?;
        let words = bfs_words(&mats, targets[side], pu).ok_or_else(|| Error::invariant("stored units not transitive"))?;
        tables[side] = words.iter().map(|w| TableEntry { word: w.clone(), unit: word_unit(w, &gens[side], &inv) }).collect();
    }
    let s = PReductionStructure { p: p.clone(), map, i1, o1, x1, gens, tables, targets };
    s.verify()?;
    Ok(s)
}
