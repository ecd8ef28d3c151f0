//! Conventional baselines: Gaussian elimination with partial pivoting and
//! cyclic reduction on full signed matrices.
//!
//! Sums here are plain left-to-right loops, as in a textbook implementation.

use crate::error::{dim_mismatch, Error, Result};
use crate::numeric::DenseMatrix;
use crate::sqrt::{LinearDetector, SqrtOptions, SqrtResult, Status};

/// `P A = L U` stored in one matrix (`L` unit lower, below the diagonal).
#[derive(Clone, Debug, PartialEq)]
pub struct LuPivFactors {
    lu: DenseMatrix,
    perm: Vec<usize>,
}

impl LuPivFactors {
    pub fn factor(a: &DenseMatrix) -> Result<Self> {
        let (lu, perm, zero_col) = eliminate(a)?;
        match zero_col {
            Some(column) => Err(Error::SingularPivot { column }),
            None => Ok(LuPivFactors { lu, perm }),
        }
    }

    pub fn lu(&self) -> &DenseMatrix {
        &self.lu
    }

    /// Row `i` of `P A` is row `perm[i]` of `A`.
    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn solve_vec(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.perm.len();
        if b.len() != n {
            return Err(dim_mismatch("lu_piv_solve", n, b.len()));
        }
        let mut x: Vec<f64> = self.perm.iter().map(|&i| b[i]).collect();
        for i in 1..n {
            let r = self.lu.row(i);
            let mut acc = x[i];
            for k in 0..i {
                acc -= r[k] * x[k];
            }
            x[i] = acc;
        }
        for i in (0..n).rev() {
            let r = self.lu.row(i);
            let mut acc = x[i];
            for k in i + 1..n {
                acc -= r[k] * x[k];
            }
            x[i] = acc / r[i];
        }
        Ok(x)
    }

    pub fn solve(&self, b: &DenseMatrix) -> Result<DenseMatrix> {
        let n = self.perm.len();
        if b.n_rows() != n {
            return Err(dim_mismatch("lu_piv_solve", format!("{n} rows"), b.n_rows()));
        }
        let mut bt = b.transpose();
        for j in 0..bt.n_rows() {
            let x = self.solve_vec(bt.row(j))?;
            bt.row_mut(j).copy_from_slice(&x);
        }
        Ok(bt.transpose())
    }
}

/// Elimination that does not stop at a zero column; reports the first one.
fn eliminate(a: &DenseMatrix) -> Result<(DenseMatrix, Vec<usize>, Option<usize>)> {
    if !a.is_square() {
        return Err(dim_mismatch("lu_piv", "square matrix", format!("{}x{}", a.n_rows(), a.n_cols())));
    }
    let n = a.n_rows();
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut zero_col = None;
    for k in 0..n {
        let piv = (k..n)
            .max_by(|&i, &j| lu[(i, k)].abs().total_cmp(&lu[(j, k)].abs()))
            .unwrap_or(k);
        if lu[(piv, k)] == 0.0 {
            zero_col.get_or_insert(k);
            continue;
        }
        if piv != k {
            for j in 0..n {
                let tmp = lu[(k, j)];
                lu[(k, j)] = lu[(piv, j)];
                lu[(piv, j)] = tmp;
            }
            perm.swap(k, piv);
        }
        let d = lu[(k, k)];
        for i in k + 1..n {
            let l = lu[(i, k)] / d;
            lu[(i, k)] = l;
            if l != 0.0 {
                for j in k + 1..n {
                    let ukj = lu[(k, j)];
                    lu[(i, j)] -= l * ukj;
                }
            }
        }
    }
    Ok((lu, perm, zero_col))
}

/// Diagonal of `U` from partially pivoted elimination; exact zeros are
/// kept rather than reported.
pub fn lu_piv_pivots(a: &DenseMatrix) -> Vec<f64> {
    match eliminate(a) {
        Ok((lu, _, _)) => lu.diag(),
        Err(_) => Vec::new(),
    }
}

/// `X = A^{-1} B` by partially pivoted LU.
pub fn lu_piv_solve(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    LuPivFactors::factor(a)?.solve(b)
}

fn plain_mul(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    let (n, m, p) = (a.n_rows(), a.n_cols(), b.n_cols());
    let mut c = DenseMatrix::zeros(n, p);
    for i in 0..n {
        let ar = a.row(i);
        let cr = c.row_mut(i);
        for k in 0..m {
            let aik = ar[k];
            if aik == 0.0 {
                continue;
            }
            for (cj, bkj) in cr.iter_mut().zip(b.row(k)) {
                *cj += aik * bkj;
            }
        }
    }
    c
}

fn plain_inf_norm(a: &DenseMatrix) -> f64 {
    (0..a.n_rows()).map(|i| a.row(i).iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// Cyclic reduction `W+ = -W Z^{-1} W`, `Z+ = Z + 2 W+` on full signed
/// matrices with pivoted LU solves. The result carries no triplet.
///
/// Always stops normwise: the signed iterates carry rounding noise of order
/// `eps * ||Z||` in every entry, so a componentwise test would never pass.
pub fn cr_sqrt_standard(a: &DenseMatrix, opts: &SqrtOptions) -> Result<SqrtResult> {
    opts.validate()?;
    if !a.is_square() {
        return Err(dim_mismatch("cr_sqrt_standard", "square matrix", format!("{}x{}", a.n_rows(), a.n_cols())));
    }
    let n = a.n_rows();
    let dmax = a.diag().into_iter().fold(0.0, f64::max);
    if !(dmax > 0.0) {
        return Err(Error::ZeroMatrix);
    }
    let s = opts.gamma * dmax;
    let a1 = a.scaled(1.0 / s);
    let id = DenseMatrix::identity(n);
    let mut w = a1.sub(&id)?;
    let mut z = DenseMatrix::from_fn(n, n, |i, j| 2.0 * (id[(i, j)] + a1[(i, j)]));

    let mut trace = vec![plain_inf_norm(&w)];
    let mut detector = LinearDetector::default();
    let mut converged = trace[0] <= opts.tol * plain_inf_norm(&z);
    let mut iterations = 0;
    while !converged && iterations < opts.max_iter {
        let g = lu_piv_solve(&z, &w)?;
        let w_next = plain_mul(&w, &g).map(|x| -x);
        for (zi, wi) in z.as_mut_slice().iter_mut().zip(w_next.as_slice()) {
            *zi += 2.0 * wi;
        }
        w = w_next;
        iterations += 1;
        let wn = plain_inf_norm(&w);
        detector.push(*trace.last().unwrap_or(&0.0), wn);
        trace.push(wn);
        converged = wn <= opts.tol * plain_inf_norm(&z);
    }
    let result = SqrtResult {
        x: z.scaled(s.sqrt() / 4.0),
        triplet: None,
        residual_trace: trace,
        iterations,
        status: if converged { detector.status() } else { Status::MaxIter },
        scale: s,
    };
    if converged {
        Ok(result)
    } else {
        Err(Error::NotConverged { result: Box::new(result) })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_examples() {
        let b = DenseMatrix::from_rows(&[[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]]).unwrap();
        assert_eq!(lu_piv_solve(&DenseMatrix::identity(3), &b).unwrap(), b);

        let a = DenseMatrix::from_rows(&[[2.0, -1.0], [-1.0, 2.0]]).unwrap();
        let x = lu_piv_solve(&a, &DenseMatrix::column(&[1.0, 0.0])).unwrap();
        assert!((x[(0, 0)] - 2.0 / 3.0).abs() <= f64::EPSILON);
        assert!((x[(1, 0)] - 1.0 / 3.0).abs() <= f64::EPSILON);
    }

    #[test]
    fn hilbert_has_small_residual() {
        let n = 10;
        let h = DenseMatrix::from_fn(n, n, |i, j| 1.0 / (i + j + 1) as f64);
        let xs = vec![1.0; n];
        let b = h.mul_vec(&xs).unwrap();
        let x = LuPivFactors::factor(&h).unwrap().solve_vec(&b).unwrap();
        let r = h.mul_vec(&x).unwrap();
        let res = r.iter().zip(&b).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let fwd = x.iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max);
        assert!(res < 1e-14);
        assert!(fwd > 1e-8);
    }

    #[test]
    fn singular_is_reported() {
        let a = DenseMatrix::from_rows(&[[1.0, 2.0], [2.0, 4.0]]).unwrap();
        assert!(lu_piv_solve(&a, &DenseMatrix::identity(2)).is_err());
        assert_eq!(lu_piv_pivots(&a)[1], 0.0);
    }

    #[test]
    fn standard_cr_examples() {
        let a = DenseMatrix::from_rows(&[[2.0, -1.0], [-1.0, 2.0]]).unwrap();
        let r = cr_sqrt_standard(&a, &SqrtOptions::default()).unwrap();
        let d = (3f64.sqrt() + 1.0) / 2.0;
        assert!((r.x[(0, 0)] - d).abs() < 1e-15 * 2.0);
        assert!(r.triplet.is_none());
        let r = cr_sqrt_standard(&DenseMatrix::identity(4), &SqrtOptions::default()).unwrap();
        for (x, e) in r.x.as_slice().iter().zip(DenseMatrix::identity(4).as_slice()) {
            assert!((x - e).abs() <= 2.0 * f64::EPSILON);
        }
    }
}
