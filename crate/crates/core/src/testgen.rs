//! Generators for the three experiment families and for random M-matrix
//! triplets.
//!
//! Random triplets come from `ChaCha8Rng` seeded with `seed_from_u64`, which
//! is portable and stable across platforms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::numeric::DenseMatrix;
use crate::triplet::TripletRep;

/// Off-diagonal density used by [`gen_random`].
pub const DEFAULT_DENSITY: f64 = 0.3;

/// Test 1: the graph Laplacian `A = diag(C 1) - C` of the companion pattern
/// `C` (ones on the subdiagonal and in the last column). Triplet `(offdiag C, 1, 0)`.
pub fn gen_test1(n: usize) -> TripletRep {
    assert!(n >= 2, "test 1 needs n >= 2");
    let p = DenseMatrix::from_fn(n, n, |i, j| if i != j && (j + 1 == i || j == n - 1) { 1.0 } else { 0.0 });
    TripletRep::new_unchecked(p, vec![1.0; n], vec![0.0; n])
}

/// Test 2: `A = diag(B u ⊘ u) - B` with `B` upper Hessenberg of ones
/// (`b_ij = 1` for `i <= j + 1`) and `u = (eps, 1, ..., 1)`, so `A u = 0` and
/// `min u / max u = eps`.
pub fn gen_test2(n: usize, eps: f64) -> TripletRep {
    assert!(n >= 2, "test 2 needs n >= 2");
    assert!(eps > 0.0 && eps <= 1.0, "test 2 needs eps in (0, 1]");
    let p = DenseMatrix::from_fn(n, n, |i, j| if i != j && i <= j + 1 { 1.0 } else { 0.0 });
    let mut u = vec![1.0; n];
    u[0] = eps;
    TripletRep::new_unchecked(p, u, vec![0.0; n])
}

/// Test 3: `a_ii = n`, `a_ij = -1` above the diagonal and for
/// `0 < i - j < n/4`, `u = 1`. Nonsingular with `cond_2(A) < 4`.
pub fn gen_test3(n: usize) -> TripletRep {
    assert!(n >= 4, "test 3 needs n >= 4");
    let band = |i: usize, j: usize| i > j && ((i - j) as f64) < n as f64 / 4.0;
    let p = DenseMatrix::from_fn(n, n, |i, j| if j > i || band(i, j) { 1.0 } else { 0.0 });
    // Row sums in integers: n - (upper count) - (lower band count).
    let v = (0..n)
        .map(|i| {
            let upper = n - 1 - i;
            let lower = (0..i).filter(|&j| band(i, j)).count();
            (n - upper - lower) as f64
        })
        .collect();
    TripletRep::new_unchecked(p, vec![1.0; n], v)
}

/// Random triplet with off-diagonal density [`DEFAULT_DENSITY`],
/// `p_ij` in `(0, 1)`, `u` in `(0.5, 2)`, and either `v = 0` or `v` in
/// `(0.01, 1)`.
pub fn gen_random(n: usize, seed: u64, singular: bool) -> TripletRep {
    gen_random_with(n, seed, singular, DEFAULT_DENSITY)
}

pub fn gen_random_with(n: usize, seed: u64, singular: bool, density: f64) -> TripletRep {
    assert!(n >= 1, "n must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.gen::<f64>() < density {
                p[(i, j)] = rng.gen_range(f64::MIN_POSITIVE..1.0);
            }
        }
    }
    let u = (0..n).map(|_| rng.gen_range(0.5..2.0)).collect();
    let v = if singular { vec![0.0; n] } else { (0..n).map(|_| rng.gen_range(0.01..1.0)).collect() };
    TripletRep::new_unchecked(p, u, v)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Test1,
    Test2,
    Test3,
    Random,
}

impl Family {
    pub fn as_str(&self) -> &'static str {
        match self {
            Family::Test1 => "test1",
            Family::Test2 => "test2",
            Family::Test3 => "test3",
            Family::Random => "random",
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1" | "test1" => Ok(Family::Test1),
            "2" | "test2" => Ok(Family::Test2),
            "3" | "test3" => Ok(Family::Test3),
            "random" => Ok(Family::Random),
            _ => Err(Error::InvalidParameter(format!("unknown test family {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TestSpec {
    pub family: Family,
    pub n: usize,
    /// Unbalancing factor, Test 2 only.
    pub eps: f64,
    /// Random family only.
    pub seed: u64,
    /// Random family only.
    pub singular: bool,
}

impl TestSpec {
    pub fn new(family: Family, n: usize) -> Self {
        TestSpec { family, n, eps: 1.0, seed: 0, singular: false }
    }

    pub fn validate(&self) -> Result<()> {
        let min_n = if self.family == Family::Test3 { 4 } else { 2 };
        if self.n < min_n {
            return Err(Error::InvalidParameter(format!("{} needs n >= {min_n}, got {}", self.family.as_str(), self.n)));
        }
        if !(self.eps > 0.0 && self.eps <= 1.0) {
            return Err(Error::InvalidParameter(format!("eps must be in (0, 1], got {}", self.eps)));
        }
        Ok(())
    }

    pub fn generate(&self) -> Result<TripletRep> {
        self.validate()?;
        Ok(match self.family {
            Family::Test1 => gen_test1(self.n),
            Family::Test2 => gen_test2(self.n, self.eps),
            Family::Test3 => gen_test3(self.n),
            Family::Random => gen_random(self.n, self.seed, self.singular),
        })
    }
}
