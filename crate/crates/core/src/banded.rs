//! Band storage and LU factorization with partial pivoting inside the band.

use alloc::{vec, vec::Vec};

use crate::error::{Error, Result};

/// Square matrix with `kl` sub- and `ku` super-diagonals, stored row by row.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    data: Vec<f64>,
}

impl BandedMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        BandedMatrix {
            n,
            kl,
            ku,
            data: vec![0.0; n * (kl + ku + 1)],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = BandedMatrix::zeros(n, 0, 0);
        m.data.fill(1.0);
        m
    }

    pub fn rows(&self) -> usize {
        self.n
    }

    pub fn lower_bandwidth(&self) -> usize {
        self.kl
    }

    pub fn upper_bandwidth(&self) -> usize {
        self.ku
    }

    pub fn bandwidth(&self) -> usize {
        self.kl.max(self.ku)
    }

    #[inline]
    pub fn in_band(&self, i: usize, j: usize) -> bool {
        j + self.kl >= i && j <= i + self.ku && i < self.n && j < self.n
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        i * (self.kl + self.ku + 1) + (j + self.kl - i)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if self.in_band(i, j) {
            self.data[self.idx(i, j)]
        } else {
            0.0
        }
    }

    /// Panics if `(i, j)` is outside the band.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        assert!(self.in_band(i, j), "entry ({i}, {j}) outside band");
        let k = self.idx(i, j);
        self.data[k] = v;
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        assert!(self.in_band(i, j), "entry ({i}, {j}) outside band");
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    /// Replaces row `i` with the corresponding identity row.
    pub fn set_identity_row(&mut self, i: usize) {
        let lo = i.saturating_sub(self.kl);
        let hi = (i + self.ku).min(self.n - 1);
        for j in lo..=hi {
            let k = self.idx(i, j);
            self.data[k] = 0.0;
        }
        self.set(i, i, 1.0);
    }

    pub fn row_range(&self, i: usize) -> core::ops::RangeInclusive<usize> {
        i.saturating_sub(self.kl)..=(i + self.ku).min(self.n - 1)
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| self.row_range(i).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }

    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row_range(i).map(|j| self.get(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        self.row_range(i).map(|j| self.get(i, j)).sum()
    }

    /// Adds `s` to every diagonal entry.
    pub fn shift_diagonal(&mut self, s: f64) {
        for i in 0..self.n {
            self.add(i, i, s);
        }
    }

    /// `a * self + b * I`.
    pub fn scaled_plus_identity(&self, a: f64, b: f64) -> BandedMatrix {
        let mut m = self.clone();
        m.data.iter_mut().for_each(|v| *v *= a);
        m.shift_diagonal(b);
        m
    }

    pub fn factor(&self) -> Result<BandedLu> {
        BandedLu::new(self)
    }
}

/// LU factors of a banded matrix. Row interchanges widen the upper band of `U` to `kl + ku`.
#[derive(Debug, Clone)]
pub struct BandedLu {
    n: usize,
    kl: usize,
    width: usize,
    // row i holds columns i-kl ..= i+ku+kl
    data: Vec<f64>,
    pivots: Vec<usize>,
}

impl BandedLu {
    pub const PIVOT_THRESHOLD: f64 = 1e-14;

    pub fn new(a: &BandedMatrix) -> Result<Self> {
        let n = a.n;
        let kl = a.kl;
        let ku = a.ku;
        let width = 2 * kl + ku + 1;
        let mut data = vec![0.0; n * width];
        for i in 0..n {
            for j in a.row_range(i) {
                data[i * width + (j + kl - i)] = a.get(i, j);
            }
        }
        let tiny = Self::PIVOT_THRESHOLD * a.max_abs().max(f64::MIN_POSITIVE);
        let at = |i: usize, j: usize| i * width + (j + kl - i);
        let mut pivots = vec![0; n];
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = data[at(k, k)].abs();
            for r in k + 1..=last_row {
                let v = data[at(r, k)].abs();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if !(best > tiny) {
                return Err(Error::SingularPivot { row: k });
            }
            pivots[k] = p;
            let last_col = (k + ku + kl).min(n - 1);
            if p != k {
                for j in k..=last_col {
                    data.swap(at(k, j), at(p, j));
                }
            }
            let piv = data[at(k, k)];
            for r in k + 1..=last_row {
                let l = data[at(r, k)] / piv;
                data[at(r, k)] = l;
                if l != 0.0 {
                    for j in k + 1..=last_col {
                        data[at(r, j)] -= l * data[at(k, j)];
                    }
                }
            }
        }
        Ok(BandedLu {
            n,
            kl,
            width,
            data,
            pivots,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn solve_in_place(&self, b: &mut [f64]) {
        assert_eq!(b.len(), self.n);
        let (n, kl, width) = (self.n, self.kl, self.width);
        let at = |i: usize, j: usize| i * width + (j + kl - i);
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                b.swap(k, p);
            }
            let bk = b[k];
            if bk != 0.0 {
                for r in k + 1..=(k + kl).min(n - 1) {
                    b[r] -= self.data[at(r, k)] * bk;
                }
            }
        }
        let ku_eff = width - 1 - kl;
        for i in (0..n).rev() {
            let mut s = b[i];
            for j in i + 1..=(i + ku_eff).min(n - 1) {
                s -= self.data[at(i, j)] * b[j];
            }
            b[i] = s / self.data[at(i, i)];
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

/// Solves `A x = b` by banded LU with partial pivoting.
pub fn banded_lu_solve(a: &BandedMatrix, b: &[f64]) -> Result<Vec<f64>> {
    if b.len() != a.rows() {
        return Err(Error::LengthMismatch {
            expected: a.rows(),
            found: b.len(),
        });
    }
    Ok(a.factor()?.solve(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_solve() {
        let a = BandedMatrix::identity(7);
        let b = [1.0, -2.0, 3.5, 0.0, 9.0, -1.0, 2.0];
        assert_eq!(banded_lu_solve(&a, &b).unwrap(), b.to_vec());
    }

    #[test]
    fn laplacian_against_closed_form_inverse() {
        // tridiag(-1, 2, -1) on n nodes: (A^{-1})_{ij} = min(i,j) (n+1-max(i,j)) / (n+1), 1-based
        let n = 10;
        let mut a = BandedMatrix::zeros(n, 1, 1);
        for i in 0..n {
            a.set(i, i, 2.0);
            if i > 0 {
                a.set(i, i - 1, -1.0);
            }
            if i + 1 < n {
                a.set(i, i + 1, -1.0);
            }
        }
        let lu = a.factor().unwrap();
        for col in 0..n {
            let mut e = vec![0.0; n];
            e[col] = 1.0;
            let x = lu.solve(&e);
            for (row, v) in x.iter().enumerate() {
                let (i, j) = (row + 1, col + 1);
                let exact = (i.min(j) * (n + 1 - i.max(j))) as f64 / (n + 1) as f64;
                assert!((v - exact).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn pivoting_needed() {
        // zero leading pivot forces a row swap
        let mut a = BandedMatrix::zeros(3, 1, 1);
        a.set(0, 1, 1.0);
        a.set(1, 0, 1.0);
        a.set(1, 2, 1.0);
        a.set(2, 1, 1.0);
        a.set(2, 2, 1.0);
        let x = banded_lu_solve(&a, &[2.0, 4.0, 5.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-14 && (x[1] - 2.0).abs() < 1e-14 && (x[2] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn singular_detected() {
        let a = BandedMatrix::zeros(4, 1, 1);
        assert!(matches!(banded_lu_solve(&a, &[1.0; 4]), Err(Error::SingularPivot { row: 0 })));
    }

    #[test]
    #[should_panic]
    fn set_outside_band_panics() {
        let mut a = BandedMatrix::zeros(5, 1, 1);
        a.set(0, 3, 1.0);
    }
}
