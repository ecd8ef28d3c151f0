//! GTH-like LU factorization of a nonsingular M-matrix given by a triplet.
//!
//! Every factor entry is stored as a nonnegative magnitude: `Z = L U` with
//! `L = I - L_off` and `U = diag(U_diag) - U_off`. Pivots are computed from
//! the triplet (`U_ll = (w_l + sum_k U_off[l,k] u_k) / u_l`), so elimination
//! only ever adds nonnegative numbers.

use crate::error::{dim_mismatch, Error, Result};
use crate::numeric::{pairwise_sum_by, pairwise_sum_nonneg_by, DenseMatrix};
use crate::triplet::TripletRep;

#[derive(Clone, Debug, PartialEq)]
pub struct GthFactors {
    l_off: DenseMatrix,
    u_diag: Vec<f64>,
    u_off: DenseMatrix,
}

impl GthFactors {
    pub fn n(&self) -> usize {
        self.u_diag.len()
    }

    /// Strictly lower magnitudes of `L`.
    pub fn l_off(&self) -> &DenseMatrix {
        &self.l_off
    }

    pub fn u_diag(&self) -> &[f64] {
        &self.u_diag
    }

    /// Strictly upper magnitudes of `U`.
    pub fn u_off(&self) -> &DenseMatrix {
        &self.u_off
    }

    /// Signed unit lower triangular `L`.
    pub fn l_signed(&self) -> DenseMatrix {
        let n = self.n();
        DenseMatrix::from_fn(n, n, |i, j| match i.cmp(&j) {
            std::cmp::Ordering::Equal => 1.0,
            std::cmp::Ordering::Greater => -self.l_off[(i, j)] + 0.0,
            std::cmp::Ordering::Less => 0.0,
        })
    }

    /// Signed upper triangular `U`.
    pub fn u_signed(&self) -> DenseMatrix {
        let n = self.n();
        DenseMatrix::from_fn(n, n, |i, j| match i.cmp(&j) {
            std::cmp::Ordering::Equal => self.u_diag[i],
            std::cmp::Ordering::Less => -self.u_off[(i, j)] + 0.0,
            std::cmp::Ordering::Greater => 0.0,
        })
    }

    /// `x = Z^{-1} b` in place. Sign-pure whenever `b >= 0`.
    pub fn solve_vec_in_place(&self, b: &mut [f64]) -> Result<()> {
        let n = self.n();
        if b.len() != n {
            return Err(dim_mismatch("solve_left", n, b.len()));
        }
        for i in 1..n {
            let l = self.l_off.row(i);
            b[i] = pairwise_sum_by(i + 1, |k| if k == 0 { b[i] } else { l[k - 1] * b[k - 1] });
        }
        for i in (0..n).rev() {
            let u = self.u_off.row(i);
            let m = n - i;
            let num = pairwise_sum_by(m, |k| if k == 0 { b[i] } else { u[i + k] * b[i + k] });
            b[i] = num / self.u_diag[i];
        }
        Ok(())
    }

    pub fn solve_vec(&self, b: &[f64]) -> Result<Vec<f64>> {
        let mut x = b.to_vec();
        self.solve_vec_in_place(&mut x)?;
        Ok(x)
    }

    /// `X = Z^{-1} B`.
    pub fn solve_left(&self, b: &DenseMatrix) -> Result<DenseMatrix> {
        let n = self.n();
        if b.n_rows() != n {
            return Err(dim_mismatch("solve_left", format!("{n} rows"), b.n_rows()));
        }
        // Work on columns of B as contiguous rows of B^T.
        let mut bt = b.transpose();
        for j in 0..bt.n_rows() {
            self.solve_vec_in_place(bt.row_mut(j))?;
        }
        Ok(bt.transpose())
    }

    /// `x^T = b^T Z^{-1}` in place: first `y^T U = b^T`, then `x^T L = y^T`.
    pub fn solve_right_vec_in_place(&self, b: &mut [f64]) -> Result<()> {
        let n = self.n();
        if b.len() != n {
            return Err(dim_mismatch("solve_right", n, b.len()));
        }
        for j in 0..n {
            let num = pairwise_sum_by(j + 1, |k| if k == j { b[j] } else { b[k] * self.u_off[(k, j)] });
            b[j] = num / self.u_diag[j];
        }
        for j in (0..n.saturating_sub(1)).rev() {
            let m = n - j;
            b[j] = pairwise_sum_by(m, |k| if k == 0 { b[j] } else { b[j + k] * self.l_off[(j + k, j)] });
        }
        Ok(())
    }

    /// `X = B Z^{-1}`. `B` may have mixed signs, in which case cancellation
    /// can occur.
    pub fn solve_right(&self, b: &DenseMatrix) -> Result<DenseMatrix> {
        let n = self.n();
        if b.n_cols() != n {
            return Err(dim_mismatch("solve_right", format!("{n} columns"), b.n_cols()));
        }
        let mut x = b.clone();
        for i in 0..x.n_rows() {
            self.solve_right_vec_in_place(x.row_mut(i))?;
        }
        Ok(x)
    }
}

/// Factorizes the matrix represented by `t`.
pub fn factorize(t: &TripletRep) -> Result<GthFactors> {
    factorize_parts(t.p(), t.u(), t.v(), &mut None)
}

/// Same as [`factorize`], also returning the number of floating-point
/// operations performed.
pub fn factorize_counted(t: &TripletRep) -> Result<(GthFactors, u64)> {
    let mut ops = Some(0u64);
    let f = factorize_parts(t.p(), t.u(), t.v(), &mut ops)?;
    Ok((f, ops.unwrap_or(0)))
}

/// Factorization from the raw parts of a triplet, used by the iterations
/// that keep `(Z_off, u, v)` without building a validated [`TripletRep`].
pub(crate) fn factorize_parts(
    p: &DenseMatrix,
    u: &[f64],
    v: &[f64],
    ops: &mut Option<u64>,
) -> Result<GthFactors> {
    let n = u.len();
    if !p.is_square() || p.n_rows() != n || v.len() != n {
        return Err(dim_mismatch(
            "factorize",
            format!("{n}x{n} P and v of length {n}"),
            format!("{}x{} P, v of length {}", p.n_rows(), p.n_cols(), v.len()),
        ));
    }
    let mut m = p.clone();
    let mut w = v.to_vec();
    let mut l_off = DenseMatrix::zeros(n, n);
    let mut u_diag = vec![0.0; n];
    let mut count = 0u64;

    for l in 0..n.saturating_sub(1) {
        let rest = n - l - 1;
        let row = m.row(l);
        let num = pairwise_sum_nonneg_by(rest + 1, |k| if k == 0 { w[l] } else { row[l + k] * u[l + k] });
        let piv = num / u[l];
        count += 2 * rest as u64 + 1;
        if !(piv > 0.0) {
            return Err(Error::StructuralBreakdown { step: l });
        }
        u_diag[l] = piv;

        let urow: Vec<f64> = m.row(l)[l + 1..].to_vec();
        let wl = w[l];
        for i in l + 1..n {
            let li = m[(i, l)] / piv;
            l_off[(i, l)] = li;
            m[(i, l)] = 0.0;
            if li == 0.0 {
                continue;
            }
            w[i] += li * wl;
            let mrow = &mut m.row_mut(i)[l + 1..];
            for (k, (mk, &uk)) in mrow.iter_mut().zip(&urow).enumerate() {
                if l + 1 + k != i {
                    *mk += li * uk;
                }
            }
        }
        count += 3 * rest as u64 + 2 * (rest * rest.saturating_sub(1)) as u64;
    }

    if n > 0 {
        let last = w[n - 1] / u[n - 1];
        count += 1;
        if !(last > 0.0) {
            return Err(Error::Singular);
        }
        u_diag[n - 1] = last;
    }
    if let Some(c) = ops.as_mut() {
        *c += count;
    }

    let u_off = DenseMatrix::from_fn(n, n, |i, j| if j > i { m[(i, j)] } else { 0.0 });
    Ok(GthFactors { l_off, u_diag, u_off })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::mat_mul;
    use crate::testgen;

    fn t2x2() -> TripletRep {
        TripletRep::from_full(&DenseMatrix::from_rows(&[[2.0, -1.0], [-1.0, 2.0]]).unwrap(), &[1.0, 1.0]).unwrap()
    }

    #[test]
    fn factorize_2x2() {
        let f = factorize(&t2x2()).unwrap();
        assert_eq!(f.l_off()[(1, 0)], 0.5);
        assert_eq!(f.u_diag(), &[2.0, 1.5]);
        assert_eq!(f.u_off()[(0, 1)], 1.0);
        let lu = mat_mul(&f.l_signed(), &f.u_signed()).unwrap();
        assert_eq!(lu, t2x2().reconstruct());
    }

    #[test]
    fn factorize_identity() {
        let t = TripletRep::from_full(&DenseMatrix::identity(4), &[1.0; 4]).unwrap();
        let f = factorize(&t).unwrap();
        assert_eq!(f.l_off(), &DenseMatrix::zeros(4, 4));
        assert_eq!(f.u_off(), &DenseMatrix::zeros(4, 4));
        assert_eq!(f.u_diag(), &[1.0; 4]);
    }

    #[test]
    fn singular_and_breakdown() {
        assert!(matches!(factorize(&testgen::gen_test1(10)), Err(Error::Singular)));
        // Zero first row: breakdown before the last pivot.
        let t = TripletRep::new(DenseMatrix::zeros(3, 3), vec![1.0; 3], vec![0.0, 1.0, 1.0]).unwrap();
        assert!(matches!(factorize(&t), Err(Error::StructuralBreakdown { step: 0 })));
    }

    #[test]
    fn solve_left_examples() {
        let f = factorize(&t2x2()).unwrap();
        let x = f.solve_left(&DenseMatrix::column(&[1.0, 0.0])).unwrap();
        assert!((x[(0, 0)] - 2.0 / 3.0).abs() <= f64::EPSILON);
        assert!((x[(1, 0)] - 1.0 / 3.0).abs() <= f64::EPSILON);

        let t = testgen::gen_test3(12);
        let f = factorize(&t).unwrap();
        let x = f.solve_vec(t.v()).unwrap();
        for (xi, ui) in x.iter().zip(t.u()) {
            assert!((xi - ui).abs() <= 1e-14 * ui);
        }
        let inv = f.solve_left(&DenseMatrix::identity(12)).unwrap();
        assert!(inv.as_slice().iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn solve_right_examples() {
        let t = testgen::gen_test3(10);
        let z = t.reconstruct();
        let f = factorize(&t).unwrap();
        let inv = f.solve_right(&DenseMatrix::identity(10)).unwrap();
        let prod = mat_mul(&inv, &z).unwrap();
        for i in 0..10 {
            for j in 0..10 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((prod[(i, j)] - e).abs() < 1e-13);
            }
        }
        let id = f.solve_right(&z).unwrap();
        for i in 0..10 {
            assert!((id[(i, i)] - 1.0).abs() < 1e-13);
        }
        let left = f.solve_left(&DenseMatrix::identity(10)).unwrap();
        for (a, b) in inv.as_slice().iter().zip(left.as_slice()) {
            assert!((a - b).abs() <= 1e-14 * b.abs().max(1e-300));
        }
    }

    #[test]
    fn op_count_is_two_thirds_n_cubed() {
        for n in [10usize, 20] {
            let (_, ops) = factorize_counted(&testgen::gen_test3(n)).unwrap();
            let model = 2.0 * (n as f64).powi(3) / 3.0;
            let ratio = ops as f64 / model;
            assert!((0.8..=1.2).contains(&ratio), "n={n} ops={ops} ratio={ratio}");
        }
    }

    #[test]
    fn dimension_errors() {
        let f = factorize(&t2x2()).unwrap();
        assert!(f.solve_left(&DenseMatrix::zeros(3, 1)).is_err());
        assert!(f.solve_right(&DenseMatrix::zeros(1, 3)).is_err());
    }
}
