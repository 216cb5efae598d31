use std::cmp::Ordering;
use std::collections::VecDeque;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::gram::{GramForm, QuadKey};
use super::lattice::{zero4, IntLattice, Vec4};
use super::lll::{lll_reduce, LatticeBasis};
use crate::error::Result;

/// Cholesky data `Q(x) = Σ q_ii (x_i + Σ_{j>i} q_ij x_j)²`.
#[derive(Clone, Debug)]
pub struct Cholesky {
    q: Vec<Vec<f64>>,
}

impl Cholesky {
    pub fn new(g: &[Vec<f64>]) -> Option<Self> {
        let n = g.len();
        let mut q = vec![vec![0.0; n]; n];
        for i in 0..n {
            let mut s = g[i][i];
            for k in 0..i {
                s -= q[k][k] * q[k][i] * q[k][i];
            }
            if s <= 0.0 || !s.is_finite() {
                return None;
            }
            q[i][i] = s;
            for j in (i + 1)..n {
                let mut t = g[i][j];
                for k in 0..i {
                    t -= q[k][k] * q[k][i] * q[k][j];
                }
                q[i][j] = t / s;
            }
        }
        Some(Cholesky { q })
    }

    /// All nonzero integer vectors `x` with `Q(x) ≤ bound` (both signs).
    pub fn ball(&self, bound: f64) -> Vec<Vec<i64>> {
        let n = self.q.len();
        let mut out = Vec::new();
        let mut x = vec![0i64; n];
        self.recurse(n, bound, &mut x, &mut out);
        out
    }

    fn recurse(&self, i: usize, rem: f64, x: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if i == 0 {
            if x.iter().any(|&c| c != 0) {
                out.push(x.clone());
            }
            return;
        }
        let i = i - 1;
        let n = self.q.len();
        let mut c = 0.0;
        for j in (i + 1)..n {
            c -= self.q[i][j] * x[j] as f64;
        }
        let r = (rem.max(0.0) / self.q[i][i]).sqrt();
        let lo = (c - r).ceil() as i64;
        let hi = (c + r).floor() as i64;
        for xi in lo..=hi {
            let t = xi as f64 - c;
            let used = self.q[i][i] * t * t;
            if used > rem {
                continue;
            }
            x[i] = xi;
            self.recurse(i, rem - used, x, out);
        }
        x[i] = 0;
    }
}

fn canonical_sign(v: &Vec4) -> bool {
    v.iter().find(|c| !c.is_zero()).is_some_and(|c| c.is_positive())
}

fn cmp_lex(a: &Vec4, b: &Vec4) -> Ordering {
    a.iter().cmp(b.iter())
}

/// Stateful enumeration of a lattice by increasing form value (`NextElement`).
pub struct Enumerator {
    basis: LatticeBasis,
    form: GramForm,
    chol: Cholesky,
    prev: Option<QuadKey>,
    radius: QuadKey,
    buffer: VecDeque<(QuadKey, Vec4)>,
    emitted: u64,
}

impl Enumerator {
    pub fn new(lattice: &IntLattice, form: &GramForm) -> Result<Self> {
        let basis = lll_reduce(lattice, form)?;
        Enumerator::from_basis(basis, form)
    }

    pub fn from_basis(basis: LatticeBasis, form: &GramForm) -> Result<Self> {
        let g = form.gram_f64(&basis.rows, &basis.den);
        let chol = Cholesky::new(&g)
            .ok_or_else(|| crate::Error::invariant("form not positive definite on lattice"))?;
        let radius = basis
            .rows
            .iter()
            .map(|r| form.key(r))
            .min_by(|a, b| a.cmp_with(b, form.d()))
            .expect("nonempty basis");
        Ok(Enumerator {
            basis,
            form: form.clone(),
            chol,
            prev: None,
            radius,
            buffer: VecDeque::new(),
            emitted: 0,
        })
    }

    pub fn basis(&self) -> &LatticeBasis {
        &self.basis
    }

    pub fn den(&self) -> &BigInt {
        &self.basis.den
    }

    pub fn emitted(&self) -> u64 {
        self.emitted
    }

    fn to_ambient(&self, c: &[i64]) -> Vec4 {
        let mut v = zero4();
        for (ci, r) in c.iter().zip(self.basis.rows.iter()) {
            if *ci == 0 {
                continue;
            }
            let b = BigInt::from(*ci);
            for t in 0..4 {
                v[t] += &b * &r[t];
            }
        }
        v
    }

    /// Lattice vectors with `lo < Q ≤ hi` (exact), one per sign pair, sorted.
    fn shell(&self, lo: Option<&QuadKey>, hi: &QuadKey) -> Vec<(QuadKey, Vec4)> {
        let d = self.form.d();
        let scale = super::gram::big_to_f64(&(self.form.den() * &self.basis.den * &self.basis.den));
        let bound = hi.to_f64(d) / scale * (1.0 + 1e-9) + 1e-12;
        let mut out: Vec<(QuadKey, Vec4)> = Vec::new();
        for c in self.chol.ball(bound) {
            let v = self.to_ambient(&c);
            if !canonical_sign(&v) {
                continue;
            }
            let k = self.form.key(&v);
            if k.cmp_with(hi, d) == Ordering::Greater {
                continue;
            }
            if let Some(lo) = lo {
                if k.cmp_with(lo, d) != Ordering::Greater {
                    continue;
                }
            }
            out.push((k, v));
        }
        out.sort_by(|(ka, va), (kb, vb)| ka.cmp_with(kb, d).then_with(|| cmp_lex(va, vb)));
        out
    }

    /// Next vector as `(numerators, exact key)`; the vector is `numerators/den`.
    pub fn next_with_key(&mut self) -> (Vec4, QuadKey) {
        while self.buffer.is_empty() {
            let shell = self.shell(self.prev.as_ref(), &self.radius);
            self.buffer.extend(shell);
            let next = self.radius.scaled(&BigInt::from(2));
            self.prev = Some(std::mem::replace(&mut self.radius, next));
        }
        let (k, v) = self.buffer.pop_front().unwrap();
        self.emitted += 1;
        (v, k)
    }

    pub fn next_element(&mut self) -> Vec4 {
        self.next_with_key().0
    }
}

impl Iterator for Enumerator {
    type Item = Vec4;

    fn next(&mut self) -> Option<Vec4> {
        Some(self.next_element())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn unit_vectors_come_first() {
        let mut e = Enumerator::new(&IntLattice::standard(), &GramForm::identity()).unwrap();
        for _ in 0..4 {
            let (v, k) = e.next_with_key();
            assert_eq!(k.a, BigInt::one());
            assert_eq!(v.iter().filter(|x| !x.is_zero()).count(), 1);
        }
    }

    #[test]
    fn first_sixteen_cover_radius_two() {
        let mut e = Enumerator::new(&IntLattice::standard(), &GramForm::identity()).unwrap();
        let got: Vec<Vec4> = (0..16).map(|_| e.next_element()).collect();
        let mut brute = Vec::new();
        for a in -1i64..=1 {
            for b in -1i64..=1 {
                for c in -1i64..=1 {
                    for d in -1i64..=1 {
                        let v = [a, b, c, d].map(BigInt::from);
                        let n: i64 = [a, b, c, d].iter().map(|x| x * x).sum();
                        if (1..=2).contains(&n) && canonical_sign(&v) {
                            brute.push(v);
                        }
                    }
                }
            }
        }
        assert_eq!(brute.len(), 16);
        for v in &brute {
            assert!(got.contains(v), "missing {v:?}");
        }
    }
}
