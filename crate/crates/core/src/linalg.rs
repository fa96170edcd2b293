//! Dense exact linear algebra: Gaussian elimination over [`Scalar`] and the
//! integer Smith normal form.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::kernel::{Rational, Scalar};

pub type Matrix = Vec<Vec<Scalar>>;

/// Reduces `m` in place to reduced row echelon form and returns the pivot columns.
pub fn rref(m: &mut Matrix) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].inv().expect("pivot is a zero divisor");
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x = &*x - &(&f * p);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &[Vec<Scalar>]) -> usize {
    rref(&mut m.to_vec()).len()
}

/// Determinant by Gaussian elimination over the field.
pub fn determinant(m: &[Vec<Scalar>]) -> Scalar {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = Scalar::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return Scalar::zero();
        };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det = &det * &a[c][c];
        let inv = a[c][c].inv().expect("pivot is a zero divisor");
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] * &inv;
            for j in c..n {
                let t = &f * &a[c][j];
                a[i][j] = &a[i][j] - &t;
            }
        }
    }
    det
}

/// Inverse of a square matrix, or `None` if singular.
pub fn inverse(m: &[Vec<Scalar>]) -> Option<Matrix> {
    let n = m.len();
    let mut aug: Matrix = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }));
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Some solution of `a x = b` (free variables set to zero), or `None` when inconsistent.
pub fn solve(a: &[Vec<Scalar>], b: &[Scalar]) -> Option<Vec<Scalar>> {
    let cols = a.first().map_or(0, |r| r.len());
    let mut aug: Matrix = a
        .iter()
        .zip(b)
        .map(|(row, x)| {
            let mut r = row.clone();
            r.push(x.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.last() == Some(&cols) {
        return None;
    }
    let mut x = vec![Scalar::zero(); cols];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = aug[r][cols].clone();
    }
    Some(x)
}

pub fn rational_matrix(rows: &[Vec<Rational>]) -> Matrix {
    rows.iter().map(|r| r.iter().cloned().map(Scalar::rational).collect()).collect()
}

/// Incremental basis of a vector space, used to detect the first linear
/// dependency in a sequence of vectors.
#[derive(Clone, Debug, Default)]
pub struct EchelonBasis {
    // rows in echelon form with pivot column and the combination of inputs producing them
    rows: Vec<(usize, Vec<Scalar>, Vec<Scalar>)>,
    inputs: usize,
}

impl EchelonBasis {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Adds `v`. If `v` is dependent on previous inputs returns the
    /// coefficients `a` with `v = Σ a_k input_k`.
    pub fn insert(&mut self, v: &[Scalar]) -> Option<Vec<Scalar>> {
        let k = self.inputs;
        let mut v = v.to_vec();
        // combination expressing current v in terms of inputs (v = input_k - Σ ...)
        let mut comb = vec![Scalar::zero(); k + 1];
        comb[k] = Scalar::one();
        for (p, row, rc) in &self.rows {
            if v[*p].is_zero() {
                continue;
            }
            let f = v[*p].clone();
            for (x, y) in v.iter_mut().zip(row) {
                if !y.is_zero() {
                    *x = &*x - &(&f * y);
                }
            }
            for (x, y) in comb.iter_mut().zip(rc) {
                if !y.is_zero() {
                    *x = &*x - &(&f * y);
                }
            }
        }
        match v.iter().position(|x| !x.is_zero()) {
            None => {
                // 0 = input_k + Σ comb_j input_j
                Some(comb[..k].iter().map(|c| -c).collect())
            }
            Some(p) => {
                let inv = v[p].inv().expect("pivot is a zero divisor");
                let row: Vec<Scalar> = v.iter().map(|x| x * &inv).collect();
                let rc: Vec<Scalar> = comb.iter().map(|x| x * &inv).collect();
                self.rows.push((p, row, rc));
                self.inputs += 1;
                None
            }
        }
    }
}

/// `u * a * v = diag(d)` with `u`, `v` unimodular.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub u: Vec<Vec<BigInt>>,
    pub v: Vec<Vec<BigInt>>,
    /// Diagonal entries, `min(rows, cols)` of them, each dividing the next.
    pub d: Vec<BigInt>,
    pub rank: usize,
}

fn identity(n: usize) -> Vec<Vec<BigInt>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

fn row_axpy(m: &mut [Vec<BigInt>], dst: usize, src: usize, q: &BigInt) {
    let s = m[src].clone();
    for (x, y) in m[dst].iter_mut().zip(&s) {
        *x -= q * y;
    }
}

fn col_axpy(m: &mut [Vec<BigInt>], dst: usize, src: usize, q: &BigInt) {
    for row in m.iter_mut() {
        let y = row[src].clone();
        row[dst] -= q * y;
    }
}

fn swap_cols(m: &mut [Vec<BigInt>], a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

pub fn smith_normal_form(a: &[Vec<BigInt>]) -> SmithForm {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut s: Vec<Vec<BigInt>> = a.to_vec();
    let mut u = identity(rows);
    let mut v = identity(cols);
    let k = rows.min(cols);
    let mut rank = 0;
    for t in 0..k {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if !s[i][j].is_zero() && best.is_none_or(|(bi, bj)| s[i][j].abs() < s[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                break;
            };
            s.swap(t, pi);
            u.swap(t, pi);
            swap_cols(&mut s, t, pj);
            swap_cols(&mut v, t, pj);
            let mut clean = true;
            for i in t + 1..rows {
                if s[i][t].is_zero() {
                    continue;
                }
                let q = s[i][t].div_floor(&s[t][t]);
                row_axpy(&mut s, i, t, &q);
                row_axpy(&mut u, i, t, &q);
                clean &= s[i][t].is_zero();
            }
            for j in t + 1..cols {
                if s[t][j].is_zero() {
                    continue;
                }
                let q = s[t][j].div_floor(&s[t][t]);
                col_axpy(&mut s, j, t, &q);
                col_axpy(&mut v, j, t, &q);
                clean &= s[t][j].is_zero();
            }
            if !clean {
                continue;
            }
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !s[i][j].is_multiple_of(&s[t][t])));
            match bad {
                Some(i) => {
                    let minus_one = -BigInt::one();
                    row_axpy(&mut s, t, i, &minus_one);
                    row_axpy(&mut u, t, i, &minus_one);
                }
                None => break,
            }
        }
        if s[t][t].is_zero() {
            break;
        }
        if s[t][t].is_negative() {
            for x in s[t].iter_mut() {
                *x = -&*x;
            }
            for x in u[t].iter_mut() {
                *x = -&*x;
            }
        }
        rank += 1;
    }
    let d = (0..k).map(|i| s[i][i].clone()).collect();
    SmithForm { u, v, d, rank }
}

pub fn int_matrix(rows: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
    rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

pub fn int_matmul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let n = b.first().map_or(0, |r| r.len());
    a.iter().map(|row| (0..n).map(|j| row.iter().zip(b).map(|(x, brow)| x * &brow[j]).sum()).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::rat;
    use proptest::prelude::*;

    fn q(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    #[test]
    fn det_and_inverse() {
        let m = vec![vec![q(3), q(1)], vec![q(1), q(3)]];
        assert_eq!(determinant(&m), q(8));
        let inv = inverse(&m).unwrap();
        assert_eq!(inv[0][0], Scalar::rational(rat(3, 8)));
        assert_eq!(inv[0][1], Scalar::rational(rat(-1, 8)));
        assert!(inverse(&[vec![q(1), q(2)], vec![q(2), q(4)]]).is_none());
    }

    #[test]
    fn solve_consistent_and_not() {
        let a = vec![vec![q(2), q(0)], vec![q(1), q(3)]];
        let x = solve(&a, &[q(1), q(1)]).unwrap();
        assert_eq!(x, vec![Scalar::rational(rat(1, 2)), Scalar::rational(rat(1, 6))]);
        assert!(solve(&[vec![q(1)], vec![q(1)]], &[q(1), q(2)]).is_none());
    }

    #[test]
    fn echelon_dependency() {
        let mut e = EchelonBasis::new();
        assert!(e.insert(&[q(1), q(0)]).is_none());
        assert!(e.insert(&[q(1), q(1)]).is_none());
        let c = e.insert(&[q(3), q(2)]).unwrap();
        assert_eq!(c, vec![q(1), q(2)]);
    }

    #[test]
    fn smith_examples() {
        let a = int_matrix(&[vec![3, 1], vec![1, 3]]);
        let s = smith_normal_form(&a);
        assert_eq!(s.d, vec![BigInt::from(1), BigInt::from(8)]);
        let a = int_matrix(&[vec![2, 0], vec![1, 3], vec![0, 6]]);
        let s = smith_normal_form(&a);
        assert_eq!(s.rank, 2);
        assert_eq!(s.d, vec![BigInt::from(1), BigInt::from(6)]);
    }

    proptest! {
        #[test]
        fn smith_is_a_factorization(entries in prop::collection::vec(-6i64..7, 6), rows in 1usize..4) {
            let cols = 6 / rows.max(1);
            let rows = 6 / cols;
            let m: Vec<Vec<i64>> = (0..rows).map(|i| entries[i * cols..(i + 1) * cols].to_vec()).collect();
            let a = int_matrix(&m);
            let s = smith_normal_form(&a);
            let uav = int_matmul(&int_matmul(&s.u, &a), &s.v);
            for i in 0..rows {
                for j in 0..cols {
                    let expect = if i == j && i < s.d.len() { s.d[i].clone() } else { BigInt::zero() };
                    prop_assert_eq!(&uav[i][j], &expect);
                }
            }
            for w in s.d.windows(2) {
                if !w[1].is_zero() {
                    prop_assert!(w[1].is_multiple_of(&w[0]));
                }
            }
        }
    }
}
