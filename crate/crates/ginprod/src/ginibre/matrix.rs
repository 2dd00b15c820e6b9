//! Dense real square matrix, row-major.

use std::ops::{Index, IndexMut};

#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    dim: usize,
    values: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            values: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Build from row-major values; panics if the length is not dim².
    pub fn from_rows(dim: usize, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), dim * dim, "value length must be dim^2");
        Self { dim, values }
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |a, &v| a.max(v.abs()))
    }

    pub fn scale(&mut self, factor: f64) {
        for v in &mut self.values {
            *v *= factor;
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                let src = other.row(k);
                let dst = &mut out.values[i * n..(i + 1) * n];
                for j in 0..n {
                    dst[j] += a * src[j];
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    /// max-abs entry of self − other.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0f64, |a, (x, y)| a.max((x - y).abs()))
    }

    /// Left rotation on rows (i, i+1), columns col_from..:
    /// row_i ← c·row_i − s·row_j, row_j ← s·row_i + c·row_j.
    #[inline]
    pub(crate) fn rot_left(&mut self, c: f64, s: f64, i: usize, col_from: usize) {
        let n = self.dim;
        let (top, bot) = self.values.split_at_mut((i + 1) * n);
        let ri = &mut top[i * n + col_from..];
        let rj = &mut bot[col_from..n];
        for (a, b) in ri.iter_mut().zip(rj.iter_mut()) {
            let x = *a;
            let y = *b;
            *a = c * x - s * y;
            *b = s * x + c * y;
        }
    }

    /// Right rotation on columns (i, i+1), rows 0..row_to:
    /// col_i ← c·col_i − s·col_j, col_j ← s·col_i + c·col_j.
    #[inline]
    pub(crate) fn rot_right(&mut self, c: f64, s: f64, i: usize, row_to: usize) {
        let n = self.dim;
        for r in 0..row_to {
            let base = r * n + i;
            let x = self.values[base];
            let y = self.values[base + 1];
            self.values[base] = c * x - s * y;
            self.values[base + 1] = s * x + c * y;
        }
    }
}

impl Index<(usize, usize)> for SquareMatrix {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.values[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for SquareMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.values[i * self.dim + j]
    }
}
