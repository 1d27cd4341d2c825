//! Integer matrices: Smith normal form, kernels, images and integral solving.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Dense integer matrix, row-major.
pub type Mat = Vec<Vec<BigInt>>;

pub fn from_i64(rows: &[Vec<i64>]) -> Mat {
    rows.iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect()
}

pub fn identity(n: usize) -> Mat {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

pub fn zeros(m: usize, n: usize) -> Mat {
    vec![vec![BigInt::zero(); n]; m]
}

pub fn cols(a: &Mat) -> usize {
    a.first().map_or(0, Vec::len)
}

pub fn mul(a: &Mat, b: &Mat) -> Mat {
    let (m, k, n) = (a.len(), b.len(), cols(b));
    let mut out = zeros(m, n);
    for i in 0..m {
        for l in 0..k {
            if a[i][l].is_zero() {
                continue;
            }
            for j in 0..n {
                out[i][j] += &a[i][l] * &b[l][j];
            }
        }
    }
    out
}

pub fn sub(a: &Mat, b: &Mat) -> Mat {
    a.iter()
        .zip(b)
        .map(|(r, s)| r.iter().zip(s).map(|(x, y)| x - y).collect())
        .collect()
}

pub fn add(a: &Mat, b: &Mat) -> Mat {
    a.iter()
        .zip(b)
        .map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect())
        .collect()
}

pub fn transpose(a: &Mat) -> Mat {
    let (m, n) = (a.len(), cols(a));
    (0..n).map(|j| (0..m).map(|i| a[i][j].clone()).collect()).collect()
}

pub fn column(a: &Mat, j: usize) -> Vec<BigInt> {
    a.iter().map(|r| r[j].clone()).collect()
}

/// Matrix whose columns are the given vectors; `len` rows when empty.
pub fn from_columns(columns: &[Vec<BigInt>], len: usize) -> Mat {
    let mut out = zeros(len, columns.len());
    for (j, c) in columns.iter().enumerate() {
        for i in 0..len {
            out[i][j] = c[i].clone();
        }
    }
    out
}

pub fn apply(a: &Mat, v: &[BigInt]) -> Vec<BigInt> {
    a.iter()
        .map(|r| r.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}

/// `u * a * v = s` with `u`, `v` unimodular and `s` diagonal, each diagonal
/// entry dividing the next.
#[derive(Debug, Clone)]
pub struct Smith {
    pub u: Mat,
    pub s: Mat,
    pub v: Mat,
    pub rank: usize,
}

impl Smith {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.rank).map(|i| self.s[i][i].clone()).collect()
    }
}

fn swap_cols(a: &mut Mat, i: usize, j: usize) {
    for r in a.iter_mut() {
        r.swap(i, j);
    }
}

/// row_i -= q * row_j
fn row_axpy(a: &mut Mat, i: usize, j: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    let src = a[j].clone();
    for (x, y) in a[i].iter_mut().zip(src.iter()) {
        *x -= q * y;
    }
}

/// col_i -= q * col_j
fn col_axpy(a: &mut Mat, i: usize, j: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    for r in a.iter_mut() {
        let y = r[j].clone();
        r[i] -= q * y;
    }
}

pub fn smith_normal_form(a: &Mat) -> Smith {
    let m = a.len();
    let n = cols(a);
    let mut s = a.clone();
    let mut u = identity(m);
    let mut v = identity(n);
    let mut t = 0;
    while t < m.min(n) {
        // pivot: smallest nonzero magnitude in the lower-right block
        let mut best: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                if !s[i][j].is_zero()
                    && best.map_or(true, |(bi, bj)| s[i][j].abs() < s[bi][bj].abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        s.swap(t, pi);
        u.swap(t, pi);
        swap_cols(&mut s, t, pj);
        swap_cols(&mut v, t, pj);
        loop {
            let mut dirty = false;
            for i in t + 1..m {
                if s[i][t].is_zero() {
                    continue;
                }
                let q = s[i][t].div_floor(&s[t][t]);
                row_axpy(&mut s, i, t, &q);
                row_axpy(&mut u, i, t, &q);
                if !s[i][t].is_zero() {
                    s.swap(t, i);
                    u.swap(t, i);
                    dirty = true;
                }
            }
            for j in t + 1..n {
                if s[t][j].is_zero() {
                    continue;
                }
                let q = s[t][j].div_floor(&s[t][t]);
                col_axpy(&mut s, j, t, &q);
                col_axpy(&mut v, j, t, &q);
                if !s[t][j].is_zero() {
                    swap_cols(&mut s, t, j);
                    swap_cols(&mut v, t, j);
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            // divisibility: fold an offending row into the pivot row and redo
            let mut offending = None;
            'scan: for i in t + 1..m {
                for j in t + 1..n {
                    if !(&s[i][j] % &s[t][t]).is_zero() {
                        offending = Some(i);
                        break 'scan;
                    }
                }
            }
            match offending {
                Some(i) => {
                    let minus_one = -BigInt::one();
                    row_axpy(&mut s, t, i, &minus_one);
                    row_axpy(&mut u, t, i, &minus_one);
                }
                None => break,
            }
        }
        if s[t][t].is_negative() {
            for x in s[t].iter_mut() {
                *x = -&*x;
            }
            for x in u[t].iter_mut() {
                *x = -&*x;
            }
        }
        t += 1;
    }
    Smith { u, s, v, rank: t }
}

/// Basis (as columns) of the integer kernel `{x : a x = 0}`; it is saturated.
pub fn kernel(a: &Mat, ncols: usize) -> Mat {
    if a.is_empty() {
        return identity(ncols);
    }
    let sm = smith_normal_form(a);
    let basis: Vec<Vec<BigInt>> = (sm.rank..ncols).map(|j| column(&sm.v, j)).collect();
    from_columns(&basis, ncols)
}

/// Basis (as columns) of the lattice spanned by the columns of `a`.
pub fn image(a: &Mat) -> Mat {
    let m = a.len();
    let sm = smith_normal_form(a);
    let av = mul(a, &sm.v);
    let basis: Vec<Vec<BigInt>> = (0..sm.rank).map(|j| column(&av, j)).collect();
    from_columns(&basis, m)
}

/// Integer solution of `a x = b`, if any.
pub fn solve(a: &Mat, b: &[BigInt]) -> Option<Vec<BigInt>> {
    let n = cols(a);
    let sm = smith_normal_form(a);
    let ub = apply(&sm.u, b);
    let mut y = vec![BigInt::zero(); n];
    for (i, val) in ub.iter().enumerate() {
        if i < sm.rank {
            let (q, r) = val.div_rem(&sm.s[i][i]);
            if !r.is_zero() {
                return None;
            }
            y[i] = q;
        } else if !val.is_zero() {
            return None;
        }
    }
    Some(apply(&sm.v, &y))
}

/// Whether the column lattices of `a` and `b` coincide.
pub fn same_lattice(a: &Mat, b: &Mat) -> bool {
    let within = |x: &Mat, y: &Mat| (0..cols(x)).all(|j| solve(y, &column(x, j)).is_some());
    if cols(a) == 0 || cols(b) == 0 {
        let zero_cols = |x: &Mat| (0..cols(x)).all(|j| column(x, j).iter().all(Zero::is_zero));
        return zero_cols(a) && zero_cols(b);
    }
    within(a, b) && within(b, a)
}

/// Intersection of two column lattices in `Z^n`, as a column basis.
pub fn intersect(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let (ka, kb) = (cols(a), cols(b));
    // [a | -b] (x; y) = 0  ->  a x lies in both
    let mut stacked = zeros(n, ka + kb);
    for i in 0..n {
        for j in 0..ka {
            stacked[i][j] = a[i][j].clone();
        }
        for j in 0..kb {
            stacked[i][ka + j] = -&b[i][j];
        }
    }
    let ker = kernel(&stacked, ka + kb);
    let xs: Mat = ker[..ka].to_vec();
    let vecs = mul(a, &xs);
    if cols(&vecs) == 0 {
        return zeros(n, 0);
    }
    image(&vecs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn is_diag_dividing(s: &Mat, rank: usize) -> bool {
        for i in 0..s.len() {
            for j in 0..cols(s) {
                if i != j && !s[i][j].is_zero() {
                    return false;
                }
            }
        }
        (1..rank).all(|i| (&s[i][i] % &s[i - 1][i - 1]).is_zero())
    }

    fn det(a: &Mat) -> BigInt {
        // cofactor expansion; test sizes are tiny
        let n = a.len();
        if n == 1 {
            return a[0][0].clone();
        }
        let mut total = BigInt::zero();
        for j in 0..n {
            let minor: Mat = a[1..]
                .iter()
                .map(|r| r.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, x)| x.clone()).collect())
                .collect();
            let term = &a[0][j] * det(&minor);
            total = if j % 2 == 0 { total + term } else { total - term };
        }
        total
    }

    #[test]
    fn known_forms() {
        let a = from_i64(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
        let sm = smith_normal_form(&a);
        assert_eq!(sm.diagonal(), vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]);
    }

    proptest! {
        #[test]
        fn smith_is_a_valid_factorisation(rows in 1usize..5, ncols in 1usize..5, seed in proptest::collection::vec(-9i64..10, 16)) {
            let a: Mat = (0..rows).map(|i| (0..ncols).map(|j| BigInt::from(seed[i * 4 + j])).collect()).collect();
            let sm = smith_normal_form(&a);
            prop_assert_eq!(mul(&mul(&sm.u, &a), &sm.v), sm.s.clone());
            prop_assert!(is_diag_dividing(&sm.s, sm.rank));
            prop_assert_eq!(det(&sm.u).abs(), BigInt::one());
            prop_assert_eq!(det(&sm.v).abs(), BigInt::one());
            let k = kernel(&a, ncols);
            for j in 0..cols(&k) {
                prop_assert!(apply(&a, &column(&k, j)).iter().all(Zero::is_zero));
            }
        }
    }
}
