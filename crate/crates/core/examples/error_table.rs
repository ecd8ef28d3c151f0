//! Error tables for the three test families, as CSV on stdout.
//!
//! ```text
//! cargo run --release --example error_table -- 2 100
//! ```
//! Arguments: family (1, 2 or 3, default 1) and size (default 50). Test 2
//! sweeps eps over 1e-2, 1e-5, 1e-8, 1e-11, 1e-14.

use tripsqrt::experiment::{run_experiment, write_csv, Alg};
use tripsqrt::sqrt::SqrtOptions;
use tripsqrt::testgen::{Family, TestSpec};

fn main() -> tripsqrt::Result<()> {
    let mut args = std::env::args().skip(1);
    let family: Family = args.next().as_deref().unwrap_or("1").parse()?;
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(50);

    let specs: Vec<TestSpec> = if family == Family::Test2 {
        [1e-2, 1e-5, 1e-8, 1e-11, 1e-14].iter().map(|&eps| TestSpec { eps, ..TestSpec::new(family, n) }).collect()
    } else {
        vec![TestSpec::new(family, n)]
    };
    let out = run_experiment(&specs, &Alg::ALL, &SqrtOptions::default())?;
    let rows: Vec<_> = out.into_iter().map(|o| o.row).collect();
    write_csv(std::io::stdout().lock(), &rows, true)
}
