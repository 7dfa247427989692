//! Exact linear algebra over the rationals: dense Gauss-Jordan for local
//! element matrices and a sparse fraction-free echelon form for global ranks.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::polycore::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn mul(&self, o: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, o.rows);
        let mut out = QMatrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(l, j);
                    if !b.is_zero() {
                        out.data[i * o.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    /// Reduced row echelon form; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self.get(i, c).is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..self.cols {
                    self.data.swap(p * self.cols + j, r * self.cols + j);
                }
            }
            let inv = self.get(r, c).recip();
            for j in c..self.cols {
                let v = self.get(r, j) * &inv;
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                if i == r || self.get(i, c).is_zero() {
                    continue;
                }
                let f = self.get(i, c).clone();
                for j in c..self.cols {
                    let pv = self.get(r, j);
                    if pv.is_zero() {
                        continue;
                    }
                    let v = self.get(i, j) - &f * pv;
                    self.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    pub fn inverse(&self) -> Option<QMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut aug = QMatrix::from_fn(n, 2 * n, |i, j| {
            if j < n {
                self.get(i, j).clone()
            } else if j - n == i {
                Rational::one()
            } else {
                Rational::zero()
            }
        });
        let piv = aug.rref();
        if piv.len() < n || piv[n - 1] != n - 1 {
            return None;
        }
        Some(QMatrix::from_fn(n, n, |i, j| aug.get(i, n + j).clone()))
    }

    /// Solves `self * x = b` for every column of `b`, if consistent.
    pub fn solve(&self, b: &QMatrix) -> Option<QMatrix> {
        assert_eq!(self.rows, b.rows);
        let (n, m) = (self.cols, b.cols);
        let mut aug = QMatrix::from_fn(self.rows, n + m, |i, j| {
            if j < n {
                self.get(i, j).clone()
            } else {
                b.get(i, j - n).clone()
            }
        });
        let piv = aug.rref();
        if piv.iter().any(|&c| c >= n) {
            return None;
        }
        let mut x = QMatrix::zeros(n, m);
        for (r, &c) in piv.iter().enumerate() {
            for j in 0..m {
                x.set(c, j, aug.get(r, n + j).clone());
            }
        }
        Some(x)
    }
}

/// Sparse integer matrix reduced by fraction-free elimination: every row is
/// kept primitive (content divided out), so no rationals appear.
#[derive(Clone, Debug, Default)]
pub struct SparseEchelon {
    pivots: HashMap<usize, BTreeMap<usize, BigInt>>,
}

impl SparseEchelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Inserts a row; returns true if it increased the rank.
    pub fn insert(&mut self, row: &BTreeMap<usize, Rational>) -> bool {
        let mut r = integer_row(row);
        loop {
            let Some((&lead, lc)) = r.iter().next() else {
                return false;
            };
            let Some(p) = self.pivots.get(&lead) else {
                make_primitive(&mut r);
                self.pivots.insert(lead, r);
                return true;
            };
            let pc = &p[&lead];
            let g = lc.gcd(pc);
            let a = pc / &g;
            let b = lc / &g;
            let mut out = BTreeMap::new();
            for (&j, v) in &r {
                if j != lead {
                    out.insert(j, v * &a);
                }
            }
            for (&j, v) in p.iter().skip(1) {
                let e = out.entry(j).or_insert_with(BigInt::zero);
                *e -= v * &b;
                if e.is_zero() {
                    out.remove(&j);
                }
            }
            make_primitive(&mut out);
            r = out;
        }
    }
}

fn integer_row(row: &BTreeMap<usize, Rational>) -> BTreeMap<usize, BigInt> {
    let mut l = BigInt::one();
    for v in row.values() {
        l = l.lcm(v.denom());
    }
    row.iter()
        .filter(|(_, v)| !v.is_zero())
        .map(|(&j, v)| (j, v.numer() * (&l / v.denom())))
        .collect()
}

fn make_primitive(r: &mut BTreeMap<usize, BigInt>) {
    let mut g = BigInt::zero();
    for v in r.values() {
        g = g.gcd(v);
        if g.is_one() {
            return;
        }
    }
    if g.is_zero() {
        return;
    }
    for v in r.values_mut() {
        *v /= &g;
    }
}

/// Rank of a sparse rational matrix given as rows.
pub fn sparse_rank(rows: &[BTreeMap<usize, Rational>]) -> usize {
    let mut e = SparseEchelon::new();
    for r in rows {
        e.insert(r);
    }
    e.rank()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::{int, rat};

    #[test]
    fn inverse_roundtrip() {
        let m = QMatrix::from_fn(3, 3, |i, j| rat((i * 3 + j) as i64 % 5 + 1, (j + 1) as i64) + int((i == j) as i64));
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), QMatrix::identity(3));
    }

    #[test]
    fn singular_has_no_inverse() {
        let m = QMatrix::from_fn(2, 2, |i, j| int(((i + 1) * (j + 1)) as i64));
        assert!(m.inverse().is_none());
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn sparse_rank_matches_dense() {
        let dense = QMatrix::from_fn(5, 6, |i, j| {
            if j < 3 {
                rat(((i * 7 + j * 3) % 5) as i64 - 2, ((i + j) % 3 + 1) as i64)
            } else {
                // columns 3..6 are combinations of 0..3
                int(0)
            }
        });
        let rows: Vec<BTreeMap<usize, Rational>> = (0..5)
            .map(|i| {
                (0..6)
                    .filter(|&j| !dense.get(i, j).is_zero())
                    .map(|j| (j, dense.get(i, j).clone()))
                    .collect()
            })
            .collect();
        assert_eq!(sparse_rank(&rows), dense.rank());
    }
}
