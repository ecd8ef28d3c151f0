//! Singular inputs: plain cyclic reduction converges linearly, the shifted
//! variant quadratically.

use tripsqrt::sqrt::{cr_sqrt, eigen_deflation_check, select_shift, shifted_cr_sqrt, SqrtOptions};
use tripsqrt::testgen::gen_test1;
use tripsqrt::{DenseMatrix, Error, Status};

fn main() -> tripsqrt::Result<()> {
    let t = gen_test1(30);
    let opts = SqrtOptions::default();

    let plain = cr_sqrt(&t, &opts)?;
    let shifted = shifted_cr_sqrt(&t, &opts)?;
    println!("cr:         {:>3} iterations ({})", plain.iterations, plain.status);
    println!("cr-shifted: {:>3} iterations ({})", shifted.iterations, shifted.status);
    if plain.status == Status::StagnatedLinear {
        let tail = &plain.residual_trace[plain.residual_trace.len() - 4..];
        println!("linear phase, last ratios: {:.3?}", tail.windows(2).map(|w| w[1] / w[0]).collect::<Vec<_>>());
    }

    // The shift moves the eigenvalue -1/2 of Z_0^{-1} W_0 to (sigma - 1)/(2 - sigma).
    let s = 4.0 * t.diag().into_iter().fold(0.0, f64::max);
    let a = t.reconstruct().scaled(1.0 / s);
    let c = DenseMatrix::from_fn(t.n(), t.n(), |i, j| if i == j { 1.0 } else { 0.0 } - a[(i, j)]);
    let (j, sigma, w) = select_shift(&c, t.u())?;
    let before = eigen_deflation_check(&a, t.u(), 0.0, &w)?;
    let after = eigen_deflation_check(&a, t.u(), sigma, &w)?;
    println!("shift column {j}, sigma {sigma:.4}: rho {:.4} -> {:.4}", before.rho, after.rho);

    // Nonsingular input is refused.
    let ns = tripsqrt::testgen::gen_test3(8);
    match shifted_cr_sqrt(&ns, &opts) {
        Err(e @ Error::NotSingularInput { .. }) => println!("test 3: {e}"),
        other => println!("unexpected: {other:?}"),
    }
    Ok(())
}
