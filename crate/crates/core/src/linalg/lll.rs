use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::gram::GramForm;
use super::snf::det;
use super::lattice::{IntLattice, Vec4};
use crate::error::{Error, Result};

/// A (not necessarily HNF) basis of a lattice: rows divided by `den`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeBasis {
    pub rows: Vec<Vec4>,
    pub den: BigInt,
}

impl LatticeBasis {
    pub fn to_lattice(&self) -> IntLattice {
        IntLattice::from_generators(&self.rows, &self.den).expect("basis has full rank")
    }
}

fn round_div(a: &BigInt, b: &BigInt) -> BigInt {
    // nearest integer to a/b for b > 0
    let two = BigInt::from(2);
    (two * a + b).div_floor(&(BigInt::from(2) * b))
}

/// Integral LLL on a Gram matrix; returns the unimodular transform `H` (rows).
///
/// `delta = dn/dd`. Works on exact integers throughout.
pub fn lll_gram(g: &[Vec<BigInt>], dn: i64, dd: i64) -> Result<Vec<Vec<BigInt>>> {
    let n = g.len();
    let mut h: Vec<Vec<BigInt>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    if n == 0 {
        return Ok(h);
    }
    let inner = |h: &Vec<Vec<BigInt>>, i: usize, j: usize| -> BigInt {
        let mut s = BigInt::zero();
        for a in 0..n {
            if h[i][a].is_zero() {
                continue;
            }
            let mut t = BigInt::zero();
            for b in 0..n {
                if !h[j][b].is_zero() {
                    t += &g[a][b] * &h[j][b];
                }
            }
            s += &h[i][a] * t;
        }
        s
    };
    // d[0] = 1, d[i+1] = d_i in 1-based notation
    let mut d: Vec<BigInt> = vec![BigInt::zero(); n + 1];
    let mut lam: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); n]; n];
    d[0] = BigInt::one();
    d[1] = inner(&h, 0, 0);
    if !d[1].is_positive() {
        return Err(Error::invariant("Gram matrix not positive definite"));
    }
    let dnb = BigInt::from(dn);
    let ddb = BigInt::from(dd);
    let mut k = 1usize;
    let mut kmax = 0usize;
    while k < n {
        if k > kmax {
            kmax = k;
            for j in 0..=k {
                let mut u = inner(&h, k, j);
                for i in 0..j {
                    u = (&d[i + 1] * &u - &lam[k][i] * &lam[j][i]) / &d[i];
                }
                if j < k {
                    lam[k][j] = u;
                } else {
                    if !u.is_positive() {
                        return Err(Error::invariant("Gram matrix not positive definite"));
                    }
                    d[k + 1] = u;
                }
            }
        }
        loop {
            red(&mut h, &mut lam, &d, k, k - 1);
            let lhs = &ddb * &d[k + 1] * &d[k - 1];
            let rhs = &dnb * &d[k] * &d[k] - &ddb * &lam[k][k - 1] * &lam[k][k - 1];
            if lhs < rhs {
                swap(&mut h, &mut lam, &mut d, k, kmax);
                if k > 1 {
                    k -= 1;
                }
            } else {
                for l in (0..k.saturating_sub(1)).rev() {
                    red(&mut h, &mut lam, &d, k, l);
                }
                k += 1;
                break;
            }
        }
    }
    Ok(h)
}

fn red(h: &mut [Vec<BigInt>], lam: &mut [Vec<BigInt>], d: &[BigInt], k: usize, l: usize) {
    let dl = &d[l + 1];
    if BigInt::from(2) * lam[k][l].abs() > *dl {
        let q = round_div(&lam[k][l], dl);
        let hl = h[l].clone();
        for (x, y) in h[k].iter_mut().zip(hl.iter()) {
            *x -= &q * y;
        }
        lam[k][l] -= &q * dl;
        for i in 0..l {
            let t = &q * &lam[l][i];
            lam[k][i] -= t;
        }
    }
}

fn swap(h: &mut [Vec<BigInt>], lam: &mut [Vec<BigInt>], d: &mut [BigInt], k: usize, kmax: usize) {
    h.swap(k, k - 1);
    for j in 0..k.saturating_sub(1) {
        let t = lam[k][j].clone();
        lam[k][j] = lam[k - 1][j].clone();
        lam[k - 1][j] = t;
    }
    let l = lam[k][k - 1].clone();
    let b = (&d[k - 1] * &d[k + 1] + &l * &l) / &d[k];
    for i in (k + 1)..=kmax {
        let t = lam[i][k].clone();
        lam[i][k] = (&d[k + 1] * &lam[i][k - 1] - &l * &t) / &d[k];
        lam[i][k - 1] = (&b * &t + &l * &lam[i][k]) / &d[k + 1];
    }
    d[k] = b;
}

/// LLL-reduces a basis with respect to `form` (δ = 0.99 on the exact form).
pub fn lll_reduce_basis(rows: &[Vec4], den: &BigInt, form: &GramForm) -> Result<LatticeBasis> {
    // the integral Gram approximation has relative error ≤ 2⁻⁶⁰; running at
    // δ' = 0.995 leaves room for δ = 0.99 with respect to the exact form
    let mut cur: Vec<Vec4> = rows.to_vec();
    for _ in 0..4 {
        let g = form.gram_integral(&cur);
        let h = lll_gram(&g, 199, 200)?;
        let next: Vec<Vec4> = h
            .iter()
            .map(|hr| {
                let mut v: Vec4 = super::lattice::zero4();
                for (c, r) in hr.iter().zip(cur.iter()) {
                    if c.is_zero() {
                        continue;
                    }
                    for t in 0..4 {
                        v[t] += c * &r[t];
                    }
                }
                v
            })
            .collect();
        let changed = next != cur;
        cur = next;
        if !changed {
            break;
        }
    }
    Ok(LatticeBasis { rows: cur, den: den.clone() })
}

/// LLL-reduced basis of a lattice.
pub fn lll_reduce(lattice: &IntLattice, form: &GramForm) -> Result<LatticeBasis> {
    lll_reduce_basis(lattice.basis(), lattice.den(), form)
}

/// The form making `basis` orthonormal: `Q(x)` is the squared length of the
/// coordinate vector of `x` in `basis`.
pub fn coordinate_form(basis: &LatticeBasis) -> GramForm {
    let r: Vec<Vec<BigInt>> = basis.rows.iter().map(|v| v.to_vec()).collect();
    let minor = |i: usize, j: usize| -> BigInt {
        let m: Vec<Vec<BigInt>> = (0..4)
            .filter(|&a| a != i)
            .map(|a| (0..4).filter(|&b| b != j).map(|b| r[a][b].clone()).collect())
            .collect();
        det(&m)
    };
    // adj·adjᵀ over det² is R⁻¹R⁻ᵀ
    let mut adj = vec![vec![BigInt::zero(); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let m = minor(i, j);
            adj[j][i] = if (i + j) % 2 == 0 { m } else { -m };
        }
    }
    let mut a: [Vec4; 4] = std::array::from_fn(|_| std::array::from_fn(|_| BigInt::zero()));
    for i in 0..4 {
        for j in 0..4 {
            a[i][j] = (0..4).map(|k| &adj[i][k] * &adj[j][k]).sum();
        }
    }
    let d = det(&r);
    GramForm::new(a, std::array::from_fn(|_| std::array::from_fn(|_| BigInt::zero())), BigInt::one(), &d * &d)
}

/// Checks size reduction and the Lovász condition in floating point.
pub fn is_lll_reduced(basis: &LatticeBasis, form: &GramForm, delta: f64) -> bool {
    let g = form.gram_f64(&basis.rows, &basis.den);
    let n = g.len();
    let mut mu = vec![vec![0.0; n]; n];
    let mut bstar = vec![0.0; n];
    for i in 0..n {
        for j in 0..i {
            let mut s = g[i][j];
            for k in 0..j {
                s -= mu[j][k] * mu[i][k] * bstar[k];
            }
            mu[i][j] = s / bstar[j];
        }
        let mut s = g[i][i];
        for k in 0..i {
            s -= mu[i][k] * mu[i][k] * bstar[k];
        }
        bstar[i] = s;
    }
    for i in 1..n {
        for j in 0..i {
            if mu[i][j].abs() > 0.5 + 1e-9 {
                return false;
            }
        }
        if bstar[i] < (delta - mu[i][i - 1] * mu[i][i - 1]) * bstar[i - 1] * (1.0 - 1e-12) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: [i64; 4]) -> Vec4 {
        xs.map(BigInt::from)
    }

    #[test]
    fn reduces_skewed_basis() {
        let rows = vec![v([1, 0, 0, 0]), v([1, 1000, 0, 0]), v([0, 0, 1, 0]), v([0, 0, 0, 1])];
        let form = GramForm::identity();
        let b = lll_reduce_basis(&rows, &BigInt::one(), &form).unwrap();
        assert!(is_lll_reduced(&b, &form, 0.99));
        assert_eq!(form.key(&b.rows[0]).a, BigInt::one());
        let l = IntLattice::from_generators(&rows, &BigInt::one()).unwrap();
        assert_eq!(b.to_lattice(), l);
    }

    #[test]
    fn orthogonal_basis_unchanged_up_to_sign() {
        let rows = vec![v([1, 0, 0, 0]), v([0, 2, 0, 0]), v([0, 0, 3, 0]), v([0, 0, 0, 4])];
        let form = GramForm::identity();
        let b = lll_reduce_basis(&rows, &BigInt::one(), &form).unwrap();
        let mut got: Vec<Vec4> = b.rows.iter().map(|r| r.clone().map(|x| x.abs())).collect();
        got.sort();
        let mut want = rows.clone();
        want.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn coordinate_form_is_orthonormal_on_its_basis() {
        let b = LatticeBasis { rows: vec![v([2, 1, 0, 0]), v([0, 3, 1, 0]), v([1, 0, 0, 5]), v([0, 0, 7, 1])], den: BigInt::from(3) };
        let form = coordinate_form(&b);
        for i in 0..4 {
            for j in 0..4 {
                let k = form.bilinear_key(&b.rows[i], &b.rows[j]);
                let want = if i == j { form.den().clone() } else { BigInt::zero() };
                assert_eq!((k.a, k.b), (want, BigInt::zero()));
            }
        }
    }
}
