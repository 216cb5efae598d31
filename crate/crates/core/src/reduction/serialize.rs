//! Versioned text format for [`GReductionStructure`].
//!
//! ```text
//! qpip-structure 1
//! algebra a,b
//! bound B
//! primes p1 p2 ...
//! order den
//! row c0 c1 c2 c3          (four rows, HNF)
//! elements n
//! e t,u,v,w                (indexed element pool)
//! prime p x1 <elem>
//! ctx d f <elem ω> q       (per-prime context pool)
//! side s n
//! <unit>                   (prefix form, one per line)
//! relations n
//! r <elem> sign e1 e2 ...
//! checksum <sha256 of every preceding byte>
//! ```
//!
//! Units are written in prefix form: `L e`, `U c n (a b k)*`, `P n ...`, `S q`.
//! Loading recomputes the tables and re-checks every invariant.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use num_bigint::BigInt;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::ideals::RightIdeal;
use crate::linalg::{IntLattice, Vec4};
use crate::quat::{parse_rational, Order, QuatAlgebra, QuatElement};
use crate::units::{pstructure_from_generators, CompactRep, QuadElem, QuadraticContext};

use super::factor_base::FactorBase;
use super::gbuild::{GReductionStructure, Relation};

const MAGIC: &str = "qpip-structure 1";

#[derive(Default)]
struct Pool {
    items: Vec<QuatElement>,
}

impl Pool {
    fn index(&mut self, x: &QuatElement) -> usize {
        if let Some(k) = self.items.iter().position(|y| y == x) {
            return k;
        }
        self.items.push(x.clone());
        self.items.len() - 1
    }
}

fn write_rep(out: &mut String, g: &CompactRep, pool: &mut Pool, ctxs: &mut Vec<Arc<QuadraticContext>>) {
    match g {
        CompactRep::Leaf(x) => {
            let _ = write!(out, " L {}", pool.index(x));
        }
        CompactRep::UnitPower { ctx, factors } => {
            let k = match ctxs.iter().position(|c| **c == **ctx) {
                Some(k) => k,
                None => {
                    ctxs.push(ctx.clone());
                    ctxs.len() - 1
                }
            };
            let _ = write!(out, " U {k} {}", factors.len());
            for (y, e) in factors {
                let _ = write!(out, " {} {} {e}", y.a, y.b);
            }
        }
        CompactRep::Product(xs) => {
            let _ = write!(out, " P {}", xs.len());
            for x in xs {
                write_rep(out, x, pool, ctxs);
            }
        }
        CompactRep::FormalScalar(q) => {
            let _ = write!(out, " S {q}");
        }
    }
}

/// Serializes `s`; the output is a pure function of the structure.
pub fn to_text(s: &GReductionStructure) -> String {
    let mut pool = Pool::default();
    let mut body = String::new();
    for (p, local) in &s.local {
        let mut ctxs: Vec<Arc<QuadraticContext>> = Vec::new();
        let mut units = String::new();
        for side in 0..2 {
            let gens = local.generators(side);
            let _ = writeln!(units, "side {side} {}", gens.len());
            for g in gens {
                let mut line = String::new();
                write_rep(&mut line, g, &mut pool, &mut ctxs);
                let _ = writeln!(units, "{}", line.trim_start());
            }
        }
        let _ = writeln!(body, "prime {p} x1 {}", pool.index(local.x1()));
        for c in &ctxs {
            let w = pool.index(c.omega());
            let _ = writeln!(body, "ctx {} {} {w} {}", c.d(), c.conductor(), c.reference_denominator());
        }
        body.push_str(&units);
    }
    let _ = writeln!(body, "relations {}", s.relations.len());
    for r in &s.relations {
        let _ = write!(body, "r {} {}", pool.index(&r.x), r.sign);
        for e in &r.exponents {
            let _ = write!(body, " {e}");
        }
        body.push('\n');
    }

    let mut head = String::new();
    let alg = s.order.alg();
    let _ = writeln!(head, "{MAGIC}");
    let _ = writeln!(head, "algebra {alg}");
    let _ = writeln!(head, "bound {}", s.fb.bound());
    let primes: Vec<String> = s.fb.primes().iter().map(|p| p.to_string()).collect();
    let _ = writeln!(head, "primes {}", primes.join(" "));
    let l = s.order.lattice();
    let _ = writeln!(head, "order {}", l.den());
    for row in l.basis() {
        let _ = writeln!(head, "row {} {} {} {}", row[0], row[1], row[2], row[3]);
    }
    let _ = writeln!(head, "elements {}", pool.items.len());
    for x in &pool.items {
        let _ = writeln!(head, "e {x}");
    }
    head.push_str(&body);
    let sum = checksum(&head);
    let _ = writeln!(head, "checksum {sum}");
    head
}

fn checksum(text: &str) -> String {
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Parse(format!("structure file: {}", msg.into()))
}

struct Lines<'a> {
    it: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    /// The next line, split into its keyword and the remaining tokens.
    fn expect(&mut self, key: &str) -> Result<Vec<&'a str>> {
        let (n, line) = self.it.next().ok_or_else(|| bad(format!("missing {key:?} line")))?;
        let mut toks = line.split_whitespace();
        match toks.next() {
            Some(k) if k == key => Ok(toks.collect()),
            _ => Err(bad(format!("line {}: expected {key:?}", n + 1))),
        }
    }
}

fn int<T: std::str::FromStr>(s: &str) -> Result<T> {
    s.parse().map_err(|_| bad(format!("bad integer {s:?}")))
}

fn count(toks: &[&str], k: usize) -> Result<usize> {
    toks.get(k).ok_or_else(|| bad("truncated line")).and_then(|t| int(t))
}

struct Tokens<'a> {
    toks: std::slice::Iter<'a, &'a str>,
}

impl Tokens<'_> {
    fn next(&mut self) -> Result<&str> {
        self.toks.next().copied().ok_or_else(|| bad("truncated unit"))
    }

    fn int<T: std::str::FromStr>(&mut self) -> Result<T> {
        int(self.next()?)
    }
}

fn read_rep(t: &mut Tokens, pool: &[QuatElement], ctxs: &[Arc<QuadraticContext>]) -> Result<CompactRep> {
    Ok(match t.next()? {
        "L" => {
            let k: usize = t.int()?;
            CompactRep::Leaf(pool.get(k).ok_or_else(|| bad("element index out of range"))?.clone())
        }
        "U" => {
            let k: usize = t.int()?;
            let ctx = ctxs.get(k).ok_or_else(|| bad("context index out of range"))?.clone();
            let n: usize = t.int()?;
            let mut factors = Vec::with_capacity(n);
            for _ in 0..n {
                let a: BigInt = t.int()?;
                let b: BigInt = t.int()?;
                let e: BigInt = t.int()?;
                factors.push((QuadElem::new(a, b), e));
            }
            CompactRep::UnitPower { ctx, factors }
        }
        "P" => {
            let n: usize = t.int()?;
            CompactRep::Product((0..n).map(|_| read_rep(t, pool, ctxs)).collect::<Result<_>>()?)
        }
        "S" => CompactRep::FormalScalar(parse_rational(t.next()?)?),
        other => return Err(bad(format!("unknown unit tag {other:?}"))),
    })
}

/// Parses, checksums and rebuilds a structure, then re-runs
/// [`GReductionStructure::check`].
pub fn from_text(text: &str) -> Result<GReductionStructure> {
    let body_end = text.rfind("checksum ").ok_or_else(|| bad("missing checksum"))?;
    let (body, tail) = text.split_at(body_end);
    let stored = tail.trim_start_matches("checksum ").trim_end();
    if stored != checksum(body) {
        return Err(bad("checksum mismatch"));
    }
    let mut lines = Lines { it: body.lines().enumerate() };
    match lines.it.next() {
        Some((_, l)) if l == MAGIC => {}
        _ => return Err(bad("unknown format version")),
    }
    let alg: QuatAlgebra = lines.expect("algebra")?.first().ok_or_else(|| bad("missing algebra"))?.parse()?;
    let alg = Arc::new(alg);
    let bound: u32 = count(&lines.expect("bound")?, 0)? as u32;
    let fb = FactorBase::new(&alg, Some(bound));
    let primes: Vec<BigInt> = lines.expect("primes")?.iter().map(|p| int(p)).collect::<Result<_>>()?;
    if primes != fb.primes() {
        return Err(bad("factor base does not match the bound"));
    }
    let den: BigInt = int(lines.expect("order")?.first().ok_or_else(|| bad("missing denominator"))?)?;
    let mut basis: Vec<Vec4> = Vec::new();
    for _ in 0..4 {
        let row = lines.expect("row")?;
        if row.len() != 4 {
            return Err(bad("order rows need 4 entries"));
        }
        let row: Vec<BigInt> = row.iter().map(|x| int(x)).collect::<Result<_>>()?;
        basis.push(row.try_into().expect("four entries"));
    }
    let basis: [Vec4; 4] = basis.try_into().expect("four rows");
    let o = Arc::new(Order::new(alg.clone(), IntLattice::from_hnf(basis, den)?)?);
    if !o.is_maximal() {
        return Err(bad("stored order is not maximal"));
    }

    let n = count(&lines.expect("elements")?, 0)?;
    let mut pool = Vec::with_capacity(n);
    for _ in 0..n {
        let e = lines.expect("e")?;
        pool.push(e.first().ok_or_else(|| bad("empty element"))?.parse::<QuatElement>()?);
    }
    let elem = |k: usize| pool.get(k).cloned().ok_or_else(|| bad("element index out of range"));

    let mut local = BTreeMap::new();
    let mut pending = lines.it.next();
    loop {
        let Some((_, line)) = pending else { return Err(bad("missing relations")) };
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.first() != Some(&"prime") {
            pending = Some((0, line));
            break;
        }
        if toks.len() != 4 || toks[2] != "x1" {
            return Err(bad("malformed prime line"));
        }
        let p: BigInt = int(toks[1])?;
        let x1 = elem(int(toks[3])?)?;
        let i1 = RightIdeal::from_generators(o.clone(), &[x1.clone(), QuatElement::integer(p.clone())])?;
        let o1 = i1.left_order();
        let mut ctxs = Vec::new();
        let mut next = lines.it.next();
        while let Some((_, l)) = next {
            let t: Vec<&str> = l.split_whitespace().collect();
            if t.first() != Some(&"ctx") {
                break;
            }
            if t.len() != 5 {
                return Err(bad("malformed context line"));
            }
            let (d, f, w, q): (BigInt, BigInt, usize, BigInt) = (int(t[1])?, int(t[2])?, int(t[3])?, int(t[4])?);
            let omega = elem(w)?;
            let ctx = QuadraticContext::from_parts(d.clone(), f.clone(), omega.clone(), q.clone(), &o, &o)
                .or_else(|_| QuadraticContext::from_parts(d, f, omega, q, &o1, &o))?;
            ctxs.push(Arc::new(ctx));
            next = lines.it.next();
        }
        let mut gens: [Vec<CompactRep>; 2] = [Vec::new(), Vec::new()];
        for (side, slot) in gens.iter_mut().enumerate() {
            let Some((_, l)) = next else { return Err(bad("missing side line")) };
            let t: Vec<&str> = l.split_whitespace().collect();
            if t.len() != 3 || t[0] != "side" || t[1] != side.to_string() {
                return Err(bad("malformed side line"));
            }
            for _ in 0..count(&t, 2)? {
                let (_, u) = lines.it.next().ok_or_else(|| bad("missing unit"))?;
                let toks: Vec<&str> = u.split_whitespace().collect();
                let mut tk = Tokens { toks: toks.iter() };
                slot.push(read_rep(&mut tk, &pool, &ctxs)?);
                if tk.toks.next().is_some() {
                    return Err(bad("trailing tokens after unit"));
                }
            }
            next = lines.it.next();
        }
        local.insert(p.clone(), pstructure_from_generators(&o, &p, x1, gens)?);
        pending = next;
    }

    let (_, line) = pending.expect("checked above");
    let t: Vec<&str> = line.split_whitespace().collect();
    if t.first() != Some(&"relations") {
        return Err(bad("expected relations"));
    }
    let mut relations = Vec::new();
    for _ in 0..count(&t, 1)? {
        let r = lines.expect("r")?;
        if r.len() != 2 + fb.len() {
            return Err(bad("relation has the wrong number of exponents"));
        }
        let x = elem(int(r[0])?)?;
        let sign: i8 = int(r[1])?;
        let exponents: Vec<u32> = r[2..].iter().map(|e| int(e)).collect::<Result<_>>()?;
        let rel = Relation::new(&o, x, &fb).ok_or_else(|| Error::invariant("stored relation is not smooth"))?;
        if rel.sign != sign || rel.exponents != exponents {
            return Err(Error::invariant("stored relation norm does not match its factorization"));
        }
        relations.push(rel);
    }
    if lines.it.next().is_some() {
        return Err(bad("trailing lines"));
    }
    let s = GReductionStructure { order: o, fb, local, relations };
    s.check()?;
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    #[test]
    fn rationals_round_trip_in_scalars() {
        let q = BigRational::new(BigInt::from(-7), BigInt::from(19));
        let g = CompactRep::Product(vec![CompactRep::FormalScalar(q), CompactRep::Leaf(QuatElement::from_ints([1, 2, 3, 4]))]);
        let mut pool = Pool::default();
        let mut out = String::new();
        write_rep(&mut out, &g, &mut pool, &mut Vec::new());
        let toks: Vec<&str> = out.split_whitespace().collect();
        let back = read_rep(&mut Tokens { toks: toks.iter() }, &pool.items, &[]).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn checksum_guards_the_body() {
        assert!(from_text("qpip-structure 1\nchecksum 00\n").is_err());
    }
}
