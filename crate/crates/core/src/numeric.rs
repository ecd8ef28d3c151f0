//! Dense storage and deterministic binary-tree reductions.
//!
//! Every reduction in the crate (dot products, matrix products, norms) goes
//! through [`pairwise_sum_by`], which adds terms along a fixed binary tree
//! splitting at `m = ceil(n/2)`. For `n` nonnegative terms the relative
//! forward error of the tree is at most `ceil(log2 n) * eps` to first order,
//! against `(n - 1) * eps` for a running sum.

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{dim_mismatch, Error, Result};

/// `ceil(log2 n)`, with `ceil_log2(0) = ceil_log2(1) = 0`.
pub fn ceil_log2(n: usize) -> u32 {
    if n <= 1 {
        0
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}

/// Binary-tree sum of `f(0), ..., f(n-1)`.
///
/// Split point is `m = ceil(n/2)`: the left half holds the first `m` terms.
#[inline]
pub fn pairwise_sum_by<F: Fn(usize) -> f64>(n: usize, f: F) -> f64 {
    fn rec<F: Fn(usize) -> f64>(lo: usize, len: usize, f: &F) -> f64 {
        match len {
            0 => 0.0,
            1 => f(lo),
            2 => f(lo) + f(lo + 1),
            _ => {
                let m = len.div_ceil(2);
                rec(lo, m, f) + rec(lo + m, len - m, f)
            }
        }
    }
    rec(0, n, &f)
}

/// Same tree as [`pairwise_sum_by`]; debug builds assert every term is
/// nonnegative so that no two operands of opposite sign are ever added.
#[inline]
pub fn pairwise_sum_nonneg_by<F: Fn(usize) -> f64>(n: usize, f: F) -> f64 {
    pairwise_sum_by(n, |k| {
        let t = f(k);
        debug_assert!(t >= 0.0, "sign-pure summation received negative term {t}");
        t
    })
}

pub fn pairwise_sum(a: &[f64]) -> f64 {
    pairwise_sum_by(a.len(), |k| a[k])
}

/// Products are formed first, then summed with [`pairwise_sum`]'s tree.
pub fn pairwise_dot(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(dim_mismatch("pairwise_dot", a.len(), b.len()));
    }
    Ok(pairwise_sum_by(a.len(), |k| a[k] * b[k]))
}

/// Component-wise division `a ⊘ b`.
pub fn comp_div(a: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    if a.len() != b.len() {
        return Err(dim_mismatch("comp_div", a.len(), b.len()));
    }
    a.iter()
        .zip(b)
        .enumerate()
        .map(|(index, (x, y))| {
            if *y == 0.0 {
                Err(Error::ZeroDivisor { index })
            } else {
                Ok(x / y)
            }
        })
        .collect()
}

/// Row-major dense real matrix.
#[derive(Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_diag(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &x) in d.iter().enumerate() {
            m[(i, i)] = x;
        }
        m
    }

    /// Builds a matrix from row-major data, rejecting wrong lengths and
    /// non-finite entries.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(dim_mismatch("from_row_major", rows * cols, data.len()));
        }
        if let Some((index, &value)) = data.iter().enumerate().find(|(_, x)| !x.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != n_cols {
                return Err(dim_mismatch("from_rows", n_cols, r.len()));
            }
            data.extend_from_slice(r);
        }
        Self::from_row_major(n_rows, n_cols, data)
    }

    /// Column vector (`n x 1`).
    pub fn column(v: &[f64]) -> Self {
        DenseMatrix {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        DenseMatrix { rows, cols, data }
    }

    pub fn n_rows(&self) -> usize {
        self.rows
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        self.map(|x| x * s)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    /// Largest entry magnitude; 0 for an empty matrix.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Entry-wise `self - other`. Plain subtraction, used only for diagnostics
    /// and the conventional baselines.
    pub fn sub(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(dim_mismatch(
                "sub",
                format!("{}x{}", self.rows, self.cols),
                format!("{}x{}", other.rows, other.cols),
            ));
        }
        Ok(DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    /// `self * x` with each entry a [`pairwise_dot`].
    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(dim_mismatch("mul_vec", self.cols, x.len()));
        }
        Ok((0..self.rows)
            .map(|i| {
                let r = self.row(i);
                pairwise_sum_by(self.cols, |k| r[k] * x[k])
            })
            .collect())
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

/// Matrix product with every entry computed by [`pairwise_dot`].
pub fn mat_mul(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    if a.cols != b.rows {
        return Err(dim_mismatch(
            "mat_mul",
            format!("inner dimension {}", a.cols),
            format!("inner dimension {}", b.rows),
        ));
    }
    let bt = b.transpose();
    let inner = a.cols;
    Ok(DenseMatrix::from_fn(a.rows, b.cols, |i, j| {
        let r = a.row(i);
        let c = bt.row(j);
        pairwise_sum_by(inner, |k| r[k] * c[k])
    }))
}

/// Like [`mat_mul`] for two nonnegative factors; debug builds check that no
/// negative product enters a sum.
pub(crate) fn mat_mul_nonneg(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    debug_assert_eq!(a.cols, b.rows);
    let bt = b.transpose();
    let inner = a.cols;
    DenseMatrix::from_fn(a.rows, b.cols, |i, j| {
        let r = a.row(i);
        let c = bt.row(j);
        pairwise_sum_nonneg_by(inner, |k| r[k] * c[k])
    })
}

/// Infinity norm: largest pairwise-summed absolute row sum.
pub fn inf_norm(a: &DenseMatrix) -> f64 {
    (0..a.rows)
        .map(|i| {
            let r = a.row(i);
            pairwise_sum_by(r.len(), |k| r[k].abs())
        })
        .fold(0.0, f64::max)
}
