//! Navigation in the Bruhat–Tits tree at a split prime and local reduction.

pub(crate) mod preduce;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::arith::mod_inverse;
use crate::error::{Error, Result};
use crate::localring::{val_mod, LocalMat};

pub use preduce::{preduce, step_toward, PReduceOutput, PReductionStructure, TableEntry};

/// A point of `ℙ¹(𝔽_p)` in the form `(1 : y)` or `(0 : 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct P1Point {
    // y for (1 : y), p for (0 : 1)
    index: u64,
}

impl P1Point {
    pub fn from_index(index: u64, p: u64) -> Self {
        assert!(index <= p);
        P1Point { index }
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    /// The line spanned by a nonzero vector mod p.
    pub fn from_vector(x: &BigInt, y: &BigInt, p: &BigInt) -> Option<Self> {
        let (x, y) = (x.mod_floor(p), y.mod_floor(p));
        let pi = p.to_u64().expect("small prime");
        if !x.is_zero() {
            let inv = mod_inverse(&x, p)?;
            Some(P1Point { index: (y * inv).mod_floor(p).to_u64().unwrap() })
        } else if !y.is_zero() {
            Some(P1Point { index: pi })
        } else {
            None
        }
    }

    pub fn vector(&self, p: &BigInt) -> (BigInt, BigInt) {
        if BigInt::from(self.index) == *p {
            (BigInt::zero(), BigInt::from(1))
        } else {
            (BigInt::from(1), BigInt::from(self.index))
        }
    }

    /// `h·P` for `h` invertible mod p (any precision; only residues matter).
    pub fn act(&self, h: &LocalMat) -> P1Point {
        let p = h.p();
        let (x, y) = self.vector(p);
        let nx = h.entry(0, 0) * &x + h.entry(0, 1) * &y;
        let ny = h.entry(1, 0) * &x + h.entry(1, 1) * &y;
        P1Point::from_vector(&nx, &ny, p).expect("matrix invertible mod p")
    }

    pub fn all(p: u64) -> impl Iterator<Item = P1Point> {
        (0..=p).map(|index| P1Point { index })
    }
}

impl fmt::Display for P1Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.index)
    }
}

/// Least valuation of the entries, `None` for the zero matrix.
pub fn content(m: &LocalMat) -> Option<u32> {
    m.entries().iter().filter_map(|x| val_mod(x, m.p(), m.precision())).min()
}

/// `M / p^c` at precision `κ − c`.
pub fn divide_content(m: &LocalMat, c: u32) -> Result<LocalMat> {
    if c == 0 {
        return Ok(m.clone());
    }
    if c >= m.precision() {
        return Err(Error::PrecisionExhausted);
    }
    let pc = m.p().pow(c);
    let e = m.entries().clone().map(|x| {
        debug_assert!((&x % &pc).is_zero());
        x / &pc
    });
    Ok(LocalMat::new(m.p(), m.precision() - c, e))
}

/// The class of `M·P₀` for a primitive local matrix `M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeVertex {
    m: LocalMat,
}

impl TreeVertex {
    /// Normalizes by the content of `m`.
    pub fn new(m: &LocalMat) -> Result<Self> {
        let c = content(m).ok_or(Error::PrecisionExhausted)?;
        let m = divide_content(m, c)?;
        let v = TreeVertex { m };
        v.distance_to_base()?;
        Ok(v)
    }

    pub fn matrix(&self) -> &LocalMat {
        &self.m
    }

    pub fn precision(&self) -> u32 {
        self.m.precision()
    }

    /// `d(P₀, M·P₀) = v_p(det M)` for primitive `M`.
    pub fn distance_to_base(&self) -> Result<u32> {
        self.m.w().ok_or(Error::PrecisionExhausted)
    }

    /// Label of the neighbor of `P₀` towards this vertex: the column space mod p.
    pub fn first_step(&self) -> Result<P1Point> {
        if self.distance_to_base()? == 0 {
            return Err(Error::Precondition("vertex is the base vertex".into()));
        }
        let p = self.m.p();
        for c in 0..2 {
            if let Some(pt) = P1Point::from_vector(self.m.entry(0, c), self.m.entry(1, c), p) {
                return Ok(pt);
            }
        }
        unreachable!("primitive matrix has a nonzero column mod p")
    }

    /// Same homothety class, compared through `adj(B)·A` having unit determinant
    /// after removing its content.
    pub fn same_class(&self, other: &TreeVertex) -> Result<bool> {
        let j = self.precision().min(other.precision());
        let a = self.m.reduce(j);
        let b = other.m.reduce(j);
        let t = b.adjugate().mul(&a);
        let c = content(&t).ok_or(Error::PrecisionExhausted)?;
        let t = divide_content(&t, c)?;
        Ok(t.w() == Some(0))
    }
}
