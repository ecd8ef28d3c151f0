//! Double-word reference arithmetic and the reference square roots the
//! solvers are measured against.

mod matrix;
mod reference;
mod scalar;

pub use matrix::XpMatrix;
pub use reference::{
    xp_lu_solve, xp_sqrtm_reference, xp_triplet_solve, xp_sqrtm_reference_in, xp_sqrtm_reference_triplet,
    xp_sqrtm_reference_triplet_with, XpReference, REFERENCE_TOL,
};
pub use scalar::{two_prod, two_sum, xp_add, xp_div, xp_dot, xp_mul, xp_sqrt, xp_sub, xp_sum, XpScalar};

use crate::error::{dim_mismatch, Result};
use crate::numeric::DenseMatrix;

/// Reference entries at or below this magnitude are compared absolutely.
pub const TINY_REFERENCE: f64 = 1e-300;

#[derive(Clone, Debug, PartialEq)]
pub struct CompError {
    /// Largest `|x_ij - r_ij| / |r_ij|` over entries with `|r_ij| > 1e-300`.
    pub max_rel: f64,
    /// Entrywise errors; relative where the reference is not tiny, `|x_ij|`
    /// otherwise.
    pub error_matrix: DenseMatrix,
    /// Number of entries with a tiny reference.
    pub n_tiny: usize,
    /// Largest `|x_ij|` over tiny-reference entries.
    pub max_abs_tiny: f64,
}

/// Componentwise relative error of `x` against the reference `r`.
pub fn comp_error(x: &DenseMatrix, r: &XpMatrix) -> Result<CompError> {
    if x.n_rows() != r.n_rows() || x.n_cols() != r.n_cols() {
        return Err(dim_mismatch(
            "comp_error",
            format!("{}x{}", r.n_rows(), r.n_cols()),
            format!("{}x{}", x.n_rows(), x.n_cols()),
        ));
    }
    let mut max_rel = 0.0f64;
    let mut n_tiny = 0;
    let mut max_abs_tiny = 0.0f64;
    let errs: Vec<f64> = x
        .as_slice()
        .iter()
        .zip(r.as_slice())
        .map(|(&xi, &ri)| {
            if ri.abs().to_f64() <= TINY_REFERENCE {
                n_tiny += 1;
                max_abs_tiny = max_abs_tiny.max(xi.abs());
                xi.abs()
            } else {
                let e = ((XpScalar::from_f64(xi) - ri) / ri).abs().to_f64();
                max_rel = max_rel.max(e);
                e
            }
        })
        .collect();
    let error_matrix = DenseMatrix::from_row_major(x.n_rows(), x.n_cols(), errs)?;
    Ok(CompError { max_rel, error_matrix, n_tiny, max_abs_tiny })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comp_error_examples() {
        let third = XpScalar::ONE / XpScalar::from_f64(3.0);
        let r = XpMatrix::from_fn(2, 2, |i, j| if i == j { third } else { XpScalar::from_f64(2.0) });
        let x = r.to_dense();
        let e = comp_error(&x, &r).unwrap();
        assert!(e.max_rel <= f64::EPSILON / 2.0);

        let mut y = x.clone();
        y[(0, 1)] *= 2.0;
        let e = comp_error(&y, &r).unwrap();
        assert_eq!(e.max_rel, 1.0);
        assert_eq!(e.error_matrix[(0, 1)], 1.0);

        let r = XpMatrix::from_fn(1, 2, |_, j| XpScalar::from_f64(if j == 0 { 1e-310 } else { 1.0 }));
        let e = comp_error(&DenseMatrix::from_rows(&[[3e-310, 1.0]]).unwrap(), &r).unwrap();
        assert_eq!(e.n_tiny, 1);
        assert_eq!(e.max_abs_tiny, 3e-310);
        assert_eq!(e.max_rel, 0.0);
    }
}
