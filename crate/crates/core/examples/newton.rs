//! Incremental Newton on triplets, stepped next to cyclic reduction: the two
//! are the same iteration up to the factors 4 X = Z and 2 F = -W.

use tripsqrt::sqrt::{cr_init, cr_step, in_init, in_sqrt, in_state_crosscheck, SqrtOptions};
use tripsqrt::testgen::gen_test3;

fn main() -> tripsqrt::Result<()> {
    let t = gen_test3(10);
    let r = in_sqrt(&t, &SqrtOptions::default())?;
    println!("in: {} iterations, status {}", r.iterations, r.status);

    let (mut nw, _) = in_init(&t, 4.0)?;
    let (mut cr, _) = cr_init(&t, 4.0)?;
    for _ in 0..6 {
        let dev = in_state_crosscheck(&nw, &cr)?;
        println!("step {}: max deviation {dev:.2e}, ||F|| = {:.3e}", nw.step(), nw.f_norm());
        nw = nw.advance()?;
        cr = cr_step(&cr)?;
    }
    Ok(())
}
