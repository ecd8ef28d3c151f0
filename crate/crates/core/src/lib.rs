//! Principal square roots of M-matrices computed from triplet
//! representations `(P, u, v)`, where `A = diag(a) - P`, `u > 0` and
//! `A u = v >= 0`.
//!
//! Working with the triplet instead of `A` itself lets every diagonal entry
//! be formed as a sum of nonnegative terms, so no subtraction ever cancels.
//! The solvers here ([`sqrt::cr_sqrt`], [`sqrt::in_sqrt`],
//! [`sqrt::shifted_cr_sqrt`]) deliver every entry of `A^{1/2}` with a small
//! relative error, tiny entries included, regardless of the condition of `A`.
//!
//! ```
//! use tripsqrt::{sqrt::{cr_sqrt, SqrtOptions}, DenseMatrix, TripletRep};
//!
//! // A = [[2, -1], [-1, 2]], u = (1, 1), v = A u = (1, 1).
//! let p = DenseMatrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap();
//! let t = TripletRep::new(p, vec![1.0, 1.0], vec![1.0, 1.0]).unwrap();
//! let r = cr_sqrt(&t, &SqrtOptions::default()).unwrap();
//! let d = (1.0 + 3f64.sqrt()) / 2.0;
//! assert!((r.x[(0, 0)] - d).abs() <= 4.0 * f64::EPSILON);
//! ```

pub mod baseline;
pub mod cli;
pub mod error;
pub mod experiment;
pub mod gth;
pub mod io;
pub mod numeric;
pub mod sqrt;
pub mod testgen;
pub mod triplet;
pub mod xp;

pub use error::{Error, Result};
pub use numeric::DenseMatrix;
pub use sqrt::{SqrtOptions, SqrtResult, Status, StopRule};
pub use triplet::TripletRep;
