//! Build a triplet from a dense M-matrix, inspect it, and look at the block
//! structure of a reducible matrix.
//!
//! ```text
//! cargo run --example triplet_basics
//! ```

use tripsqrt::triplet::{frobenius_form, has_triplet};
use tripsqrt::{DenseMatrix, TripletRep};

fn main() -> tripsqrt::Result<()> {
    // A singular Laplacian: rows sum to zero, so u = 1 gives v = 0.
    let a = DenseMatrix::from_rows(&[[2.0, -1.0, -1.0], [-1.0, 1.0, 0.0], [-1.0, 0.0, 1.0]])?;
    let t = TripletRep::from_full(&a, &[1.0, 1.0, 1.0])?;
    println!("n = {}, nnz(P) = {}, v = {:?}", t.n(), t.nnz(), t.v());
    println!("kernel representation: {}", t.is_kernel_rep());

    // The diagonal is never stored: a_ii = (v_i + (P u)_i) / u_i.
    println!("diag from triplet: {:?}", t.diag());
    assert_eq!(t.reconstruct(), a);

    // Powers of two scale exactly.
    let half = t.scale(2.0)?;
    assert_eq!(half.reconstruct(), a.scaled(0.5));

    // A hand-built triplet: A = [[3, -1], [-2, 4]] with u = (1, 1).
    let p = DenseMatrix::from_rows(&[[0.0, 1.0], [2.0, 0.0]])?;
    let t = TripletRep::new(p, vec![1.0, 1.0], vec![2.0, 2.0])?;
    println!("reconstructed:\n{:?}", t.reconstruct());

    // Inconsistent data is rejected rather than silently fixed.
    let bad = TripletRep::new(DenseMatrix::zeros(2, 2), vec![1.0, -1.0], vec![0.0, 0.0]);
    println!("u with a negative entry: {}", bad.unwrap_err());

    // Row 2 depends on row 1, which depends on row 0. Blocks come out in
    // block upper-triangular order, so row 2 leads.
    let r = DenseMatrix::from_rows(&[[1.0, 0.0, 0.0], [-1.0, 1.0, 0.0], [0.0, -1.0, 0.0]])?;
    let ff = frobenius_form(&r)?;
    for k in 0..ff.n_blocks() {
        println!("block {k}: rows {:?}, singular {}", ff.block(k), ff.block_singular[k]);
    }
    println!("has a triplet: {}", has_triplet(&r)?);
    Ok(())
}
