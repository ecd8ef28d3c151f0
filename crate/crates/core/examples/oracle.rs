//! Double-word arithmetic and the reference square root used to measure
//! componentwise errors.

use tripsqrt::sqrt::{cr_sqrt, SqrtOptions};
use tripsqrt::testgen::gen_test2;
use tripsqrt::xp::{comp_error, xp_sqrtm_reference_triplet_with, XpScalar};

fn main() -> tripsqrt::Result<()> {
    let r2 = XpScalar::from_f64(2.0).sqrt()?;
    println!("sqrt(2) = {:.17} + {:e}", r2.hi, r2.lo);
    let third = XpScalar::ONE / XpScalar::from_f64(3.0);
    println!("1/3 * 3 - 1 = {:e}", (third * XpScalar::from_f64(3.0) - XpScalar::ONE).to_f64());

    // Test 2 has entries far below machine precision relative to the largest.
    let t = gen_test2(30, 1e-8);
    let reference = xp_sqrtm_reference_triplet_with(&t, 200)?;
    println!("reference converged in {} iterations", reference.iterations);
    let (lo, hi) = reference
        .x
        .as_slice()
        .iter()
        .map(|x| x.abs().to_f64())
        .filter(|&x| x > 0.0)
        .fold((f64::MAX, 0.0f64), |(a, b), x| (a.min(x), b.max(x)));
    println!("|entries| range from {lo:.2e} to {hi:.2e}");

    let x = cr_sqrt(&t, &SqrtOptions::default())?.x;
    let e = comp_error(&x, &reference.x)?;
    println!("cr: max componentwise relative error {:.2e} ({} tiny entries)", e.max_rel, e.n_tiny);
    Ok(())
}
