use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type Matrix = Vec<Vec<BigInt>>;

pub fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let m = b.first().map_or(0, |r| r.len());
    let k = b.len();
    let mut c = vec![vec![BigInt::zero(); m]; n];
    for i in 0..n {
        for t in 0..k {
            if a[i][t].is_zero() {
                continue;
            }
            for j in 0..m {
                if !b[t][j].is_zero() {
                    c[i][j] += &a[i][t] * &b[t][j];
                }
            }
        }
    }
    c
}

pub fn transpose(a: &Matrix) -> Matrix {
    let n = a.len();
    let m = a.first().map_or(0, |r| r.len());
    (0..m).map(|j| (0..n).map(|i| a[i][j].clone()).collect()).collect()
}

/// Smith normal form `U·A·V = D` with unimodular `U`, `V`.
#[derive(Clone, Debug)]
pub struct Smith {
    pub u: Matrix,
    pub v: Matrix,
    pub diag: Vec<BigInt>,
}

impl Smith {
    pub fn rank(&self) -> usize {
        self.diag.iter().filter(|d| !d.is_zero()).count()
    }

    /// True when every nonzero invariant factor is 1 and the rank is `n`.
    pub fn is_unimodular(&self, n: usize) -> bool {
        self.rank() == n && self.diag.iter().take(n).all(|d| d.is_one())
    }
}

fn row_combine(a: &mut Matrix, i: usize, j: usize, coeffs: [&BigInt; 4]) {
    // (row_i, row_j) ← (c0·row_i + c1·row_j, c2·row_i + c3·row_j)
    let m = a[i].len();
    for t in 0..m {
        let x = a[i][t].clone();
        let y = a[j][t].clone();
        a[i][t] = coeffs[0] * &x + coeffs[1] * &y;
        a[j][t] = coeffs[2] * &x + coeffs[3] * &y;
    }
}

fn col_combine(a: &mut Matrix, i: usize, j: usize, coeffs: [&BigInt; 4]) {
    for r in a.iter_mut() {
        let x = r[i].clone();
        let y = r[j].clone();
        r[i] = coeffs[0] * &x + coeffs[1] * &y;
        r[j] = coeffs[2] * &x + coeffs[3] * &y;
    }
}

/// Smith normal form of an `n × m` integer matrix.
pub fn smith(a: &Matrix) -> Smith {
    let n = a.len();
    let m = a.first().map_or(0, |r| r.len());
    let mut d = a.clone();
    let mut u = identity(n);
    let mut v = identity(m);
    let zero = BigInt::zero();
    let one = BigInt::one();
    for t in 0..n.min(m) {
        // pivot: smallest nonzero entry in the trailing block
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..n {
                for j in t..m {
                    if !d[i][j].is_zero()
                        && best.is_none_or(|(bi, bj)| d[i][j].abs() < d[bi][bj].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                let diag = (0..n.min(m)).map(|k| d[k][k].abs()).collect();
                return Smith { u, v, diag };
            };
            d.swap(t, pi);
            u.swap(t, pi);
            for r in d.iter_mut() {
                r.swap(t, pj);
            }
            for r in v.iter_mut() {
                r.swap(t, pj);
            }
            let mut clean = true;
            for i in (t + 1)..n {
                if d[i][t].is_zero() {
                    continue;
                }
                // exact quotients leave the pivot row alone, so the loop cannot cycle
                let (q, r) = d[i][t].div_rem(&d[t][t]);
                if r.is_zero() {
                    let nq = -q;
                    row_combine(&mut d, t, i, [&one, &zero, &nq, &one]);
                    row_combine(&mut u, t, i, [&one, &zero, &nq, &one]);
                    continue;
                }
                let e = d[t][t].extended_gcd(&d[i][t]);
                let a1 = &d[t][t] / &e.gcd;
                let b1 = &d[i][t] / &e.gcd;
                let nb1 = -&b1;
                row_combine(&mut d, t, i, [&e.x, &e.y, &nb1, &a1]);
                row_combine(&mut u, t, i, [&e.x, &e.y, &nb1, &a1]);
            }
            for j in (t + 1)..m {
                if d[t][j].is_zero() {
                    continue;
                }
                let (q, r) = d[t][j].div_rem(&d[t][t]);
                if r.is_zero() {
                    let nq = -q;
                    col_combine(&mut d, t, j, [&one, &zero, &nq, &one]);
                    col_combine(&mut v, t, j, [&one, &zero, &nq, &one]);
                    continue;
                }
                let e = d[t][t].extended_gcd(&d[t][j]);
                let a1 = &d[t][t] / &e.gcd;
                let b1 = &d[t][j] / &e.gcd;
                let nb1 = -&b1;
                col_combine(&mut d, t, j, [&e.x, &e.y, &nb1, &a1]);
                col_combine(&mut v, t, j, [&e.x, &e.y, &nb1, &a1]);
            }
            if (t + 1..n).any(|i| !d[i][t].is_zero()) {
                continue;
            }
            // divisibility of the trailing block
            let p = d[t][t].clone();
            'outer: for i in (t + 1)..n {
                for j in (t + 1)..m {
                    if !(&d[i][j] % &p).is_zero() {
                        row_combine(&mut d, t, i, [&one, &one, &zero, &one]);
                        row_combine(&mut u, t, i, [&one, &one, &zero, &one]);
                        clean = false;
                        break 'outer;
                    }
                }
            }
            if clean {
                break;
            }
        }
        if d[t][t].is_negative() {
            for x in d[t].iter_mut() {
                *x = -&*x;
            }
            for x in u[t].iter_mut() {
                *x = -&*x;
            }
        }
    }
    let diag = (0..n.min(m)).map(|k| d[k][k].abs()).collect();
    Smith { u, v, diag }
}

/// Integer solution `e` of `eᵀ·M = target`, plus a basis of the left kernel.
pub fn solve_left(m: &Matrix, target: &[BigInt]) -> Option<(Vec<BigInt>, Vec<Vec<BigInt>>)> {
    // Mᵀ e = t;  U Mᵀ V = D  ⇒  D y = U t, e = V y
    let mt = transpose(m);
    let s = smith(&mt);
    let rows = mt.len();
    let cols = m.len();
    let ut: Vec<BigInt> = (0..rows)
        .map(|i| {
            let mut acc = BigInt::zero();
            for (k, t) in target.iter().enumerate() {
                acc += &s.u[i][k] * t;
            }
            acc
        })
        .collect();
    let r = s.rank();
    let mut y = vec![BigInt::zero(); cols];
    for i in 0..rows {
        if i < r {
            let (q, rem) = ut[i].div_rem(&s.diag[i]);
            if !rem.is_zero() {
                return None;
            }
            y[i] = q;
        } else if !ut[i].is_zero() {
            return None;
        }
    }
    let e: Vec<BigInt> = (0..cols)
        .map(|i| {
            let mut acc = BigInt::zero();
            for (j, yj) in y.iter().enumerate() {
                if !yj.is_zero() {
                    acc += &s.v[i][j] * yj;
                }
            }
            acc
        })
        .collect();
    let kernel: Vec<Vec<BigInt>> = (r..cols).map(|j| (0..cols).map(|i| s.v[i][j].clone()).collect()).collect();
    Some((e, kernel))
}

/// Determinant by fraction-free elimination.
pub fn det(a: &Matrix) -> BigInt {
    let n = a.len();
    let mut m = a.clone();
    let mut sign = false;
    let mut prev = BigInt::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    sign = !sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in (k + 1)..n {
            for j in (k + 1)..n {
                m[i][j] = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    let d = if n == 0 { BigInt::one() } else { m[n - 1][n - 1].clone() };
    if sign {
        -d
    } else {
        d
    }
}

/// Basis of `{x : A·x ≡ 0 mod p}` for a prime `p`, entries in `[0, p)`.
pub fn kernel_mod_p(a: &Matrix, p: &BigInt) -> Vec<Vec<BigInt>> {
    let n = a.len();
    let m = a.first().map_or(0, |r| r.len());
    let mut r: Matrix = a.iter().map(|row| row.iter().map(|x| x.mod_floor(p)).collect()).collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..m {
        let Some(pr) = (row..n).find(|&i| !r[i][col].is_zero()) else {
            continue;
        };
        r.swap(row, pr);
        let inv = crate::arith::mod_inverse(&r[row][col], p).expect("prime modulus");
        for x in r[row].iter_mut() {
            *x = (&*x * &inv).mod_floor(p);
        }
        for i in 0..n {
            if i != row && !r[i][col].is_zero() {
                let f = r[i][col].clone();
                for j in 0..m {
                    let t = &r[row][j] * &f;
                    r[i][j] = (&r[i][j] - t).mod_floor(p);
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == n {
            break;
        }
    }
    let mut out = Vec::new();
    for free in (0..m).filter(|c| !pivots.contains(c)) {
        let mut v = vec![BigInt::zero(); m];
        v[free] = BigInt::one();
        for (i, &pc) in pivots.iter().enumerate() {
            v[pc] = (-&r[i][free]).mod_floor(p);
        }
        out.push(v);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> Matrix {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    #[test]
    fn smith_terminates_on_repeated_pivots() {
        let mut rows: Vec<Vec<i64>> = vec![vec![0; 8]];
        for k in 0..8 {
            let mut r = vec![0; 8];
            r[k] = 2;
            rows.push(r);
        }
        rows.push(vec![1, 0, 0, 0, 1, 0, 0, 0]);
        rows.push(vec![0, 1, 0, 0, 0, 1, 0, 0]);
        rows.push(vec![1, 0, 0, 1, 0, 0, 1, 0]);
        let a: Matrix = transpose(&rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect());
        let s = smith(&a);
        assert_eq!(s.rank(), 8);
        assert!(!s.is_unimodular(8));
    }

    #[test]
    fn smith_of_small_matrix() {
        let a = m(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        let s = smith(&a);
        assert_eq!(s.diag, vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]);
        let prod = mat_mul(&mat_mul(&s.u, &a), &s.v);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { s.diag[i].clone() } else { BigInt::zero() };
                assert_eq!(prod[i][j].abs(), want);
            }
        }
    }

    #[test]
    fn determinant_and_kernel() {
        let a = m(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        assert_eq!(det(&a), BigInt::from(18));
        assert_eq!(det(&m(&[&[0, 1], &[1, 0]])), BigInt::from(-1));
        let p = BigInt::from(3);
        let ker = kernel_mod_p(&a, &p);
        assert_eq!(ker.len(), 1);
        for i in 0..3 {
            let s: BigInt = (0..3).map(|j| &a[i][j] * &ker[0][j]).sum();
            assert!((s % &p).is_zero());
        }
    }

    #[test]
    fn solves_left_system() {
        let a = m(&[&[2, 0], &[0, 2], &[1, 1], &[3, 0]]);
        let t = vec![BigInt::from(5), BigInt::from(-3)];
        let (e, ker) = solve_left(&a, &t).unwrap();
        for j in 0..2 {
            let s: BigInt = (0..4).map(|i| &e[i] * &a[i][j]).sum();
            assert_eq!(s, t[j]);
        }
        assert_eq!(ker.len(), 2);
        for k in &ker {
            for j in 0..2 {
                let s: BigInt = (0..4).map(|i| &k[i] * &a[i][j]).sum();
                assert!(s.is_zero());
            }
        }
    }
}
