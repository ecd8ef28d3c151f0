//! Square root by triplet cyclic reduction: the 2x2 closed form, then the
//! quadratic convergence trace on a nonsingular matrix.

use tripsqrt::sqrt::{cr_sqrt, SqrtOptions};
use tripsqrt::testgen::gen_test3;
use tripsqrt::{DenseMatrix, TripletRep};

fn main() -> tripsqrt::Result<()> {
    let a = DenseMatrix::from_rows(&[[2.0, -1.0], [-1.0, 2.0]])?;
    let t = TripletRep::from_full(&a, &[1.0, 1.0])?;
    let r = cr_sqrt(&t, &SqrtOptions::default())?;
    let s3 = 3f64.sqrt();
    println!("X = {:?}", r.x);
    println!("expected diagonal {:.16}, off-diagonal {:.16}", (s3 + 1.0) / 2.0, (1.0 - s3) / 2.0);

    // The output is itself a triplet: X u = w >= 0.
    let xt = r.triplet.as_ref().expect("triplet solvers return one");
    println!("triplet of X: u = {:?}, w = {:?}", xt.u(), xt.v());

    let t = gen_test3(40);
    let r = cr_sqrt(&t, &SqrtOptions::default())?;
    println!("test 3, n = 40: {} iterations, status {}", r.iterations, r.status);
    for (l, w) in r.residual_trace.iter().enumerate() {
        println!("  ||W_{l}|| = {w:.3e}");
    }

    // Smaller gamma means fewer iterations but one more subtraction near
    // cancellation in W_0 = A' - I.
    for gamma in [1.0, 4.0, 64.0] {
        let r = cr_sqrt(&t, &SqrtOptions { gamma, ..SqrtOptions::default() })?;
        println!("gamma {gamma:>4}: {} iterations", r.iterations);
    }
    Ok(())
}
