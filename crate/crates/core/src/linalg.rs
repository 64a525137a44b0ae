//! Exact linear algebra over the rationals.
//!
//! Ranks use fraction-free (Bareiss) elimination on an integer-scaled copy of
//! the matrix; null spaces and spans use reduced row echelon form over `Q`.

use crate::rat::Q;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use std::collections::BTreeMap;

/// Dense row-major rational matrix.
pub type Matrix = Vec<Vec<Q>>;

pub fn zeros(rows: usize, cols: usize) -> Matrix {
    vec![vec![Q::zero(); cols]; rows]
}

pub fn identity(n: usize) -> Matrix {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Q::one();
    }
    m
}

pub fn transpose(m: &Matrix) -> Matrix {
    let cols = m.first().map_or(0, Vec::len);
    (0..cols)
        .map(|j| m.iter().map(|row| row[j].clone()).collect())
        .collect()
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    (0..inner)
                        .filter(|&k| !row[k].is_zero() && !b[k][j].is_zero())
                        .fold(Q::zero(), |acc, k| acc + &row[k] * &b[k][j])
                })
                .collect()
        })
        .collect()
}

pub fn mat_vec(a: &Matrix, v: &[Q]) -> Vec<Q> {
    a.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .filter(|(x, y)| !x.is_zero() && !y.is_zero())
                .fold(Q::zero(), |acc, (x, y)| acc + x * y)
        })
        .collect()
}

/// Scales a rational row to a primitive integer row.
fn integer_row(row: &[Q]) -> Vec<BigInt> {
    let lcm = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    row.iter().map(|x| x.numer() * (&lcm / x.denom())).collect()
}

/// Exact rank by fraction-free Gaussian elimination.
pub fn rank(m: &Matrix) -> usize {
    let mut a: Vec<Vec<BigInt>> = m.iter().map(|r| integer_row(r)).collect();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        for i in (r + 1)..rows {
            for j in (c + 1)..cols {
                let v = &a[r][c] * &a[i][j] - &a[i][c] * &a[r][j];
                // Bareiss: the division is exact.
                a[i][j] = v / &prev;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        r += 1;
    }
    r
}

/// Reduced row echelon form; returns the pivot columns.
pub fn rref(m: &mut Matrix) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
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
        let inv = Q::one() / &m[r][c];
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x = &*x - &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Basis of `{ v : m v = 0 }` with `cols` unknowns.
pub fn null_space(m: &Matrix, cols: usize) -> Vec<Vec<Q>> {
    let mut a = m.clone();
    let pivots = rref(&mut a);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Q::zero(); cols];
            v[f] = Q::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -a[r][f].clone();
            }
            v
        })
        .collect()
}

/// Basis of the span of the given vectors (rows of the reduced echelon form).
pub fn span_basis(vectors: &[Vec<Q>]) -> Vec<Vec<Q>> {
    let mut a: Matrix = vectors.to_vec();
    let pivots = rref(&mut a);
    a.truncate(pivots.len());
    a
}

/// Basis of the column space of `m`.
pub fn column_space(m: &Matrix) -> Vec<Vec<Q>> {
    span_basis(&transpose(m))
}

/// Basis of the intersection of two subspaces given by spanning sets of
/// vectors of length `dim`.
pub fn intersect(a: &[Vec<Q>], b: &[Vec<Q>], dim: usize) -> Vec<Vec<Q>> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    // Solve sum alpha_i a_i - sum beta_j b_j = 0.
    let na = a.len();
    let system: Matrix = (0..dim)
        .map(|row| {
            a.iter()
                .map(|v| v[row].clone())
                .chain(b.iter().map(|v| -v[row].clone()))
                .collect()
        })
        .collect();
    let kernel = null_space(&system, na + b.len());
    let images: Vec<Vec<Q>> = kernel
        .iter()
        .map(|coef| {
            (0..dim)
                .map(|row| {
                    (0..na)
                        .filter(|&i| !coef[i].is_zero())
                        .fold(Q::zero(), |acc, i| acc + &coef[i] * &a[i][row])
                })
                .collect()
        })
        .collect();
    span_basis(&images)
}

/// Incrementally maintained echelon basis over sparse vectors, used to drop
/// members that are exact linear combinations of earlier ones.
#[derive(Debug, Clone)]
pub struct SparseEchelon<K: Ord + Clone> {
    rows: Vec<(K, BTreeMap<K, Q>)>,
}

impl<K: Ord + Clone> Default for SparseEchelon<K> {
    fn default() -> Self {
        Self { rows: Vec::new() }
    }
}

impl<K: Ord + Clone> SparseEchelon<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, v: &BTreeMap<K, Q>) -> BTreeMap<K, Q> {
        let mut v = v.clone();
        for (pivot, row) in &self.rows {
            let Some(c) = v.get(pivot).cloned() else {
                continue;
            };
            for (k, x) in row {
                let e = v.entry(k.clone()).or_insert_with(Q::zero);
                *e = &*e - &c * x;
                if e.is_zero() {
                    v.remove(k);
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &BTreeMap<K, Q>) -> bool {
        self.reduce(v).is_empty()
    }

    /// Adds `v`; returns `false` when it already lies in the span.
    pub fn insert(&mut self, v: &BTreeMap<K, Q>) -> bool {
        let r = self.reduce(v);
        let Some((pivot, lead)) = r.iter().next().map(|(k, x)| (k.clone(), x.clone())) else {
            return false;
        };
        let inv = Q::one() / lead;
        let r: BTreeMap<K, Q> = r.into_iter().map(|(k, x)| (k, x * &inv)).collect();
        // Keep earlier rows reduced against the new pivot.
        for (_, row) in self.rows.iter_mut() {
            if let Some(c) = row.get(&pivot).cloned() {
                for (k, x) in &r {
                    let e = row.entry(k.clone()).or_insert_with(Q::zero);
                    *e = &*e - &c * x;
                    if e.is_zero() {
                        row.remove(k);
                    }
                }
            }
        }
        self.rows.push((pivot, r));
        true
    }
}
