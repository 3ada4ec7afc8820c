//! Dense matrices over GF(2^m) with exact Gaussian elimination.

use std::ops::{Index, IndexMut};

use super::{Fe, FieldCtx, GaloisError};

/// Row-major dense matrix of field elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Fe>,
}

impl FieldMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        FieldMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = FieldMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Fe>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            data.extend_from_slice(row);
        }
        FieldMatrix { rows: r, cols: c, data }
    }

    /// n x n diagonal matrix from its diagonal entries.
    pub fn diag(entries: &[Fe]) -> Self {
        let n = entries.len();
        let mut m = FieldMatrix::zeros(n, n);
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = e;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[Fe] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Fe> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    /// [self | other] side by side.
    pub fn hstack(&self, other: &FieldMatrix) -> FieldMatrix {
        assert_eq!(self.rows, other.rows, "hstack row mismatch");
        let mut out = FieldMatrix::zeros(self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out[(r, c)] = self[(r, c)];
            }
            for c in 0..other.cols {
                out[(r, self.cols + c)] = other[(r, c)];
            }
        }
        out
    }

    pub fn add(&self, other: &FieldMatrix, _f: &FieldCtx) -> FieldMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "add shape mismatch");
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a ^ b).collect();
        FieldMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn mul(&self, other: &FieldMatrix, f: &FieldCtx) -> FieldMatrix {
        assert_eq!(self.cols, other.rows, "mul shape mismatch");
        let mut out = FieldMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self[(i, l)];
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] ^= f.mul(a, other[(l, j)]);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Fe], f: &FieldCtx) -> Vec<Fe> {
        assert_eq!(self.cols, v.len(), "mul_vec shape mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = 0;
                for (l, &x) in v.iter().enumerate() {
                    acc ^= f.mul(self[(i, l)], x);
                }
                acc
            })
            .collect()
    }

    /// Scale every entry by c.
    pub fn scale(&self, c: Fe, f: &FieldCtx) -> FieldMatrix {
        let data = self.data.iter().map(|&a| f.mul(a, c)).collect();
        FieldMatrix { rows: self.rows, cols: self.cols, data }
    }

    /// Exact rank by Gaussian elimination.
    pub fn rank(&self, f: &FieldCtx) -> usize {
        let mut work = self.clone();
        work.row_echelon(f, None)
    }

    /// Solves self * x = rhs for square full-rank self.
    pub fn solve(&self, rhs: &[Fe], f: &FieldCtx) -> Result<Vec<Fe>, GaloisError> {
        if self.rows != self.cols {
            return Err(GaloisError::DimensionMismatch(self.rows, self.cols, self.rows, 1));
        }
        assert_eq!(rhs.len(), self.rows, "solve rhs length mismatch");
        let mut work = self.clone();
        let mut aug = rhs.to_vec();
        let rank = work.row_echelon(f, Some(&mut aug));
        if rank < self.rows {
            return Err(GaloisError::Singular { achieved: rank, size: self.rows });
        }
        // back substitution on the upper triangle
        let n = self.rows;
        let mut x = vec![0; n];
        for i in (0..n).rev() {
            let mut acc = aug[i];
            for j in i + 1..n {
                acc ^= f.mul(work[(i, j)], x[j]);
            }
            x[i] = f.div(acc, work[(i, i)]).expect("pivot nonzero after elimination");
        }
        Ok(x)
    }

    pub fn inverse(&self, f: &FieldCtx) -> Result<FieldMatrix, GaloisError> {
        if self.rows != self.cols {
            return Err(GaloisError::DimensionMismatch(self.rows, self.cols, self.cols, self.rows));
        }
        let n = self.rows;
        // Gauss-Jordan on [self | I]
        let mut work = self.hstack(&FieldMatrix::identity(n));
        let mut rank = 0;
        for col in 0..n {
            let Some(pivot) = (rank..n).find(|&r| work[(r, col)] != 0) else {
                continue;
            };
            work.swap_rows(rank, pivot);
            let inv = f.inv(work[(rank, col)])?;
            for c in col..2 * n {
                work[(rank, c)] = f.mul(work[(rank, c)], inv);
            }
            for r in 0..n {
                if r != rank && work[(r, col)] != 0 {
                    let factor = work[(r, col)];
                    for c in col..2 * n {
                        let t = f.mul(factor, work[(rank, c)]);
                        work[(r, c)] ^= t;
                    }
                }
            }
            rank += 1;
        }
        if rank < n {
            return Err(GaloisError::Singular { achieved: rank, size: n });
        }
        let mut out = FieldMatrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                out[(r, c)] = work[(r, n + c)];
            }
        }
        Ok(out)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// In-place elimination to row echelon form; returns the rank. An
    /// optional right-hand side receives the same row operations.
    fn row_echelon(&mut self, f: &FieldCtx, mut aug: Option<&mut Vec<Fe>>) -> usize {
        let mut rank = 0;
        for col in 0..self.cols {
            if rank == self.rows {
                break;
            }
            let Some(pivot) = (rank..self.rows).find(|&r| self[(r, col)] != 0) else {
                continue;
            };
            self.swap_rows(rank, pivot);
            if let Some(aug) = aug.as_deref_mut() {
                aug.swap(rank, pivot);
            }
            let pv = self[(rank, col)];
            for r in rank + 1..self.rows {
                if self[(r, col)] != 0 {
                    let factor = f.div(self[(r, col)], pv).expect("pivot nonzero");
                    for c in col..self.cols {
                        let t = f.mul(factor, self[(rank, c)]);
                        self[(r, c)] ^= t;
                    }
                    if let Some(aug) = aug.as_deref_mut() {
                        let t = f.mul(factor, aug[rank]);
                        aug[r] ^= t;
                    }
                }
            }
            rank += 1;
        }
        rank
    }
}

impl Index<(usize, usize)> for FieldMatrix {
    type Output = Fe;
    fn index(&self, (r, c): (usize, usize)) -> &Fe {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for FieldMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Fe {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::galois::{dft_matrix, root_of_unity};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize, f: &FieldCtx) -> FieldMatrix {
        let mut m = FieldMatrix::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m[(r, c)] = rng.random_range(0..f.size());
            }
        }
        m
    }

    #[test]
    fn identity_multiplication() {
        let f = FieldCtx::new(16).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_matrix(&mut rng, 4, 6, &f);
        assert_eq!(FieldMatrix::identity(4).mul(&a, &f), a);
    }

    #[test]
    fn all_ones_rank_one() {
        let f = FieldCtx::new(2).unwrap();
        let ones = FieldMatrix::from_rows(&[vec![1, 1, 1], vec![1, 1, 1], vec![1, 1, 1]]);
        assert_eq!(ones.rank(&f), 1);
    }

    #[test]
    fn dft_matrices_full_rank() {
        let f = FieldCtx::new(16).unwrap();
        for k in [1usize, 3, 5, 15, 17] {
            let r = root_of_unity(&f, k).unwrap();
            let (fwd, _) = dft_matrix(&f, &r);
            assert_eq!(fwd.rank(&f), k);
        }
    }

    #[test]
    fn solve_roundtrip_random() {
        let f = FieldCtx::new(16).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in [1usize, 2, 5, 8] {
            let a = loop {
                let cand = random_matrix(&mut rng, n, n, &f);
                if cand.rank(&f) == n {
                    break cand;
                }
            };
            let x: Vec<Fe> = (0..n).map(|_| rng.random_range(0..f.size())).collect();
            let b = a.mul_vec(&x, &f);
            assert_eq!(a.solve(&b, &f).unwrap(), x);
            let inv = a.inverse(&f).unwrap();
            assert_eq!(a.mul(&inv, &f), FieldMatrix::identity(n));
        }
    }

    #[test]
    fn singular_reports_achieved_rank() {
        let f = FieldCtx::new(16).unwrap();
        let b = FieldMatrix::from_rows(&[vec![1, 2, 3], vec![1, 2, 3], vec![0, 0, 5]]);
        assert_eq!(b.rank(&f), 2);
        assert_eq!(
            b.inverse(&f).unwrap_err(),
            GaloisError::Singular { achieved: 2, size: 3 }
        );
        assert_eq!(
            b.solve(&[1, 1, 1], &f).unwrap_err(),
            GaloisError::Singular { achieved: 2, size: 3 }
        );
    }
}
