//! Where the conventional iteration loses the small entries: the same
//! cyclic reduction run on the signed matrix and on its triplet.

use tripsqrt::baseline::cr_sqrt_standard;
use tripsqrt::sqrt::{cr_sqrt, SqrtOptions};
use tripsqrt::testgen::gen_test1;
use tripsqrt::xp::{comp_error, xp_sqrtm_reference_triplet};

fn main() -> tripsqrt::Result<()> {
    let t = gen_test1(40);
    let reference = xp_sqrtm_reference_triplet(&t)?;
    let opts = SqrtOptions::default();

    let triplet = comp_error(&cr_sqrt(&t, &opts)?.x, &reference)?;
    let standard = match cr_sqrt_standard(&t.reconstruct(), &opts) {
        Ok(r) => r,
        Err(tripsqrt::Error::NotConverged { result }) => *result,
        Err(e) => return Err(e),
    };
    let standard = comp_error(&standard.x, &reference)?;

    // Find where the standard run is worst and show that entry's size.
    let e = &standard.error_matrix;
    let n = t.n();
    let (i, j) = (0..n * n).map(|k| (k / n, k % n)).fold((0, 0), |b, c| if e[c] > e[b] { c } else { b });
    println!("triplet cr max error  {:.2e}", triplet.max_rel);
    println!("standard cr max error {:.2e} at ({i}, {j}), |x_ij| = {:.2e}", standard.max_rel, reference[(i, j)].abs().to_f64());
    Ok(())
}
