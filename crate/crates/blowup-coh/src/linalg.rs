//! Dense linear algebra over `F_q` and over the rationals.

use crate::field::{Elem, Field};

pub type Matrix = Vec<Vec<Elem>>;

/// Reduced row echelon form. Returns the nonzero rows and their pivot columns.
pub fn rref(f: &Field, rows: &[Vec<Elem>]) -> (Matrix, Vec<usize>) {
    let mut m: Matrix = rows.to_vec();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(r, p);
        let inv = f.inv(m[r][c]);
        for x in m[r].iter_mut() {
            *x = f.mul(*x, inv);
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && row[c] != 0 {
                let factor = row[c];
                for (x, &y) in row.iter_mut().zip(&pivot_row) {
                    *x = f.sub(*x, f.mul(factor, y));
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    (m, pivots)
}

pub fn rank(f: &Field, rows: &[Vec<Elem>]) -> usize {
    rref(f, rows).1.len()
}

/// Basis of `{x : M x = 0}` for an `r x ncols` matrix.
pub fn kernel(f: &Field, rows: &[Vec<Elem>], ncols: usize) -> Matrix {
    let (m, pivots) = rref(f, rows);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![0; ncols];
            v[fc] = 1;
            for (row, &pc) in m.iter().zip(&pivots) {
                v[pc] = f.neg(row[fc]);
            }
            v
        })
        .collect()
}

/// Product `A B` of an `r x s` and an `s x t` matrix.
pub fn matmul(f: &Field, a: &[Vec<Elem>], b: &[Vec<Elem>]) -> Matrix {
    let t = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| (0..t).map(|j| row.iter().zip(b).fold(0, |acc, (&x, brow)| f.add(acc, f.mul(x, brow[j])))).collect())
        .collect()
}

pub fn identity(n: usize) -> Matrix {
    (0..n).map(|i| (0..n).map(|j| Elem::from(i == j)).collect()).collect()
}

pub fn transpose(a: &[Vec<Elem>], ncols: usize) -> Matrix {
    (0..ncols).map(|j| a.iter().map(|r| r[j]).collect()).collect()
}

/// Inverse of an upper unitriangular matrix.
pub fn unitriangular_inverse(f: &Field, u: &[Vec<Elem>]) -> Matrix {
    let n = u.len();
    let mut inv = identity(n);
    for j in 0..n {
        for i in (0..j).rev() {
            // (u * inv)[i][j] = 0 for i < j
            let mut s = 0;
            for k in i + 1..=j {
                s = f.add(s, f.mul(u[i][k], inv[k][j]));
            }
            inv[i][j] = f.neg(s);
        }
    }
    inv
}

/// Inverse of a square matrix, or `None` if it is singular.
pub fn inverse(f: &Field, a: &[Vec<Elem>]) -> Option<Matrix> {
    let n = a.len();
    let aug: Matrix = a.iter().zip(identity(n)).map(|(r, e)| r.iter().copied().chain(e).collect()).collect();
    let (m, pivots) = rref(f, &aug);
    if pivots.len() < n || pivots[n - 1] >= n {
        return None;
    }
    Some(m.iter().map(|r| r[n..].to_vec()).collect())
}

/// Rank of an integer matrix over the rationals, by fraction-free elimination.
pub fn rational_rank(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(r, p);
        let pivot_row = m[r].clone();
        for row in m.iter_mut().skip(r + 1) {
            if row[c] != 0 {
                let a = pivot_row[c];
                let b = row[c];
                let mut g = 0i128;
                for (x, &y) in row.iter_mut().zip(&pivot_row) {
                    *x = a * *x - b * y;
                    g = gcd(g, *x);
                }
                if g > 1 {
                    for x in row.iter_mut() {
                        *x /= g;
                    }
                }
            }
        }
        r += 1;
        if r == m.len() {
            break;
        }
    }
    r
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}
