//! Symmetric matrices with an envelope (skyline) profile and their Cholesky
//! factorization.
//!
//! Row `i` of the lower triangle stores columns `first[i]..=i`. Cholesky
//! produces no fill outside the envelope, so banded systems cost
//! `O(n w^2)`, and cyclic-banded systems (closed curves) only widen the last
//! `w` rows.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SkylineMatrix {
    first: Vec<usize>,
    offsets: Vec<usize>,
    data: Vec<f64>,
}

impl SkylineMatrix {
    /// Zero matrix with the given first stored column per row.
    pub fn zeros(first: Vec<usize>) -> Self {
        let mut offsets = Vec::with_capacity(first.len() + 1);
        let mut total = 0;
        for (i, &f) in first.iter().enumerate() {
            assert!(f <= i, "envelope start beyond diagonal");
            offsets.push(total);
            total += i - f + 1;
        }
        offsets.push(total);
        SkylineMatrix {
            first,
            offsets,
            data: vec![0.0; total],
        }
    }

    pub fn dim(&self) -> usize {
        self.first.len()
    }

    pub fn first_column(&self, row: usize) -> usize {
        self.first[row]
    }

    pub fn stored_entries(&self) -> usize {
        self.data.len()
    }

    #[inline]
    fn index(&self, i: usize, j: usize) -> Option<usize> {
        let (i, j) = if j > i { (j, i) } else { (i, j) };
        if j < self.first[i] {
            None
        } else {
            Some(self.offsets[i] + j - self.first[i])
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.index(i, j).map_or(0.0, |k| self.data[k])
    }

    /// Adds `v` to entries `(i, j)` and `(j, i)`. Panics outside the envelope.
    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self.index(i, j).expect("entry outside envelope");
        self.data[k] += v;
    }

    pub fn add_diagonal(&mut self, v: f64) {
        for i in 0..self.dim() {
            let k = self.offsets[i] + i - self.first[i];
            self.data[k] += v;
        }
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.get(i, i)).sum()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut y = vec![0.0; n];
        for i in 0..n {
            let row = &self.data[self.offsets[i]..self.offsets[i + 1]];
            let f = self.first[i];
            for (k, &a) in row.iter().enumerate() {
                let j = f + k;
                y[i] += a * x[j];
                if j != i {
                    y[j] += a * x[i];
                }
            }
        }
        y
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        (0..n).map(|i| (0..n).map(|j| self.get(i, j)).collect()).collect()
    }

    /// In-place Cholesky `A = L L^T`; the envelope then holds `L`.
    pub fn cholesky(mut self) -> Result<CholeskyFactor> {
        let n = self.dim();
        for i in 0..n {
            let fi = self.first[i];
            let oi = self.offsets[i];
            for j in fi..=i {
                let fj = self.first[j];
                let oj = self.offsets[j];
                let start = fi.max(fj);
                let mut sum = self.data[oi + j - fi];
                for k in start..j {
                    sum -= self.data[oi + k - fi] * self.data[oj + k - fj];
                }
                if j == i {
                    if !(sum > 0.0) || !sum.is_finite() {
                        return Err(Error::Factorization { row: i, pivot: sum });
                    }
                    self.data[oi + i - fi] = sum.sqrt();
                } else {
                    self.data[oi + j - fi] = sum / self.data[oj + j - fj];
                }
            }
        }
        Ok(CholeskyFactor { l: self })
    }
}

#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    l: SkylineMatrix,
}

impl CholeskyFactor {
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let l = &self.l;
        let n = l.dim();
        let mut y = b.to_vec();
        for i in 0..n {
            let f = l.first[i];
            let row = &l.data[l.offsets[i]..l.offsets[i + 1]];
            let mut s = y[i];
            for (k, &a) in row[..i - f].iter().enumerate() {
                s -= a * y[f + k];
            }
            y[i] = s / row[i - f];
        }
        for i in (0..n).rev() {
            let f = l.first[i];
            let row = &l.data[l.offsets[i]..l.offsets[i + 1]];
            y[i] /= row[i - f];
            let yi = y[i];
            for (k, &a) in row[..i - f].iter().enumerate() {
                y[f + k] -= a * yi;
            }
        }
        y
    }
}
