//! Generate the test families and round-trip them through the text formats.

use tripsqrt::io;
use tripsqrt::testgen::{gen_random, Family, TestSpec};

fn main() -> tripsqrt::Result<()> {
    let dir = std::env::temp_dir().join("tripsqrt-example");
    std::fs::create_dir_all(&dir)?;

    for spec in [
        TestSpec::new(Family::Test1, 6),
        TestSpec { eps: 1e-8, ..TestSpec::new(Family::Test2, 6) },
        TestSpec::new(Family::Test3, 8),
        TestSpec { seed: 42, singular: true, ..TestSpec::new(Family::Random, 6) },
    ] {
        let t = spec.generate()?;
        let path = dir.join(format!("{}.trip", spec.family.as_str()));
        io::write_triplet_file(&path, &t)?;
        let back = io::read_triplet_file(&path)?;
        assert_eq!(back, t);
        println!("{:<7} n={} nnz={:<3} -> {}", spec.family.as_str(), t.n(), t.nnz(), path.display());
    }

    // Dense matrices use the Matrix Market array layout.
    let a = gen_random(4, 7, false).reconstruct();
    let mut buf = Vec::new();
    io::write_matrix_market(&mut buf, &a)?;
    print!("{}", String::from_utf8_lossy(&buf));

    // Parse errors carry a location.
    let bad = "%%TripletRep 1.0\n2 1\n1 1 0.5\n1 1\n0 0\n";
    println!("{}", io::parse_triplet(bad).unwrap_err());
    Ok(())
}
