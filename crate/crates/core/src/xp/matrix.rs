use std::ops::{Index, IndexMut};

use rayon::prelude::*;

use super::scalar::XpScalar;
use crate::error::{dim_mismatch, Result};
use crate::numeric::DenseMatrix;

/// Row-major matrix of double-word numbers.
#[derive(Clone, Debug, PartialEq)]
pub struct XpMatrix {
    rows: usize,
    cols: usize,
    data: Vec<XpScalar>,
}

impl XpMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        XpMatrix { rows, cols, data: vec![XpScalar::ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = XpScalar::ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> XpScalar) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        XpMatrix { rows, cols, data }
    }

    pub fn from_dense(a: &DenseMatrix) -> Self {
        XpMatrix {
            rows: a.n_rows(),
            cols: a.n_cols(),
            data: a.as_slice().iter().map(|&x| XpScalar::from_f64(x)).collect(),
        }
    }

    /// Rounds every entry to the nearest machine number.
    pub fn to_dense(&self) -> DenseMatrix {
        DenseMatrix::from_row_major(self.rows, self.cols, self.data.iter().map(|x| x.to_f64()).collect())
            .expect("finite double-word entries")
    }

    pub fn n_rows(&self) -> usize {
        self.rows
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[XpScalar] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [XpScalar] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[XpScalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [XpScalar] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        XpMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn map(&self, f: impl Fn(XpScalar) -> XpScalar) -> Self {
        XpMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&x| f(x)).collect() }
    }

    pub fn scaled(&self, s: f64) -> Self {
        self.map(|x| x.mul_f64(s))
    }

    pub fn mul(&self, b: &XpMatrix) -> Result<XpMatrix> {
        if self.cols != b.rows {
            return Err(dim_mismatch("xp_mul", self.cols, b.rows));
        }
        let bt = b.transpose();
        let (rows, cols, inner) = (self.rows, b.cols, self.cols);
        let data: Vec<XpScalar> = (0..rows)
            .into_par_iter()
            .flat_map_iter(|i| {
                let r = self.row(i);
                let bt = &bt;
                (0..cols).map(move |j| {
                    let c = bt.row(j);
                    let mut acc = XpScalar::ZERO;
                    for k in 0..inner {
                        acc += r[k] * c[k];
                    }
                    acc
                })
            })
            .collect();
        Ok(XpMatrix { rows, cols, data })
    }

    /// Largest `|a_ij|` (rounded).
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.to_f64().abs()).fold(0.0, f64::max)
    }
}

impl Index<(usize, usize)> for XpMatrix {
    type Output = XpScalar;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &XpScalar {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for XpMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut XpScalar {
        &mut self.data[i * self.cols + j]
    }
}
