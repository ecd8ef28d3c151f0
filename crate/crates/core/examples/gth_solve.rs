//! Solve linear systems with the GTH-like factorization and compare with
//! partially pivoted LU on a matrix whose inverse spans many magnitudes.

use tripsqrt::baseline::lu_piv_solve;
use tripsqrt::gth;
use tripsqrt::testgen::gen_test2;
use tripsqrt::xp::{comp_error, xp_triplet_solve, XpMatrix};
use tripsqrt::DenseMatrix;

fn main() -> tripsqrt::Result<()> {
    // Test 2 is singular; v = 1e-10 u shifts it to A + 1e-10 I, which is
    // nearly singular with an inverse spread over many magnitudes.
    let (p, u, _) = gen_test2(12, 1e-6).into_parts();
    let v = u.iter().map(|x| 1e-10 * x).collect();
    let t = tripsqrt::TripletRep::new(p, u, v)?;
    let a = t.reconstruct();

    let f = gth::factorize(&t)?;
    let d: Vec<String> = f.u_diag().iter().map(|x| format!("{x:.3e}")).collect();
    println!("U diagonal: {}", d.join(" "));

    let id = DenseMatrix::identity(t.n());
    let inv_gth = f.solve_left(&id)?;
    let inv_lu = lu_piv_solve(&a, &id)?;

    // Double-word reference inverse of the matrix the triplet represents.
    let reference = xp_triplet_solve(&t, &XpMatrix::identity(t.n()))?;
    let e_gth = comp_error(&inv_gth, &reference)?;
    let e_lu = comp_error(&inv_lu, &reference)?;
    println!("componentwise error of A^-1: gth {:.2e}, pivoted lu {:.2e}", e_gth.max_rel, e_lu.max_rel);

    // Row solves x^T A = b^T share the same factors.
    let b = DenseMatrix::from_fn(1, t.n(), |_, j| (j + 1) as f64);
    let x = f.solve_right(&b)?;
    println!("x^T A = b^T, x[0] = {:.6e}", x[(0, 0)]);

    let (_, ops) = gth::factorize_counted(&t)?;
    let n = t.n() as f64;
    println!("flops {ops}, (2/3) n^3 = {:.0}", 2.0 * n * n * n / 3.0);
    Ok(())
}
