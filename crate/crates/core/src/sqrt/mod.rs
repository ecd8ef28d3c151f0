//! Square-root iterations on triplets.

mod cr;
mod newton;
mod shifted;

pub use cr::{cr_init, cr_sqrt, cr_step, CrState};
pub use newton::{in_init, in_sqrt, in_state_crosscheck, InState};
pub use shifted::{
    eigen_deflation_check, select_shift, shifted_cr_sqrt, shifted_scalars, DeflationEstimate, ShiftedCrState,
};

use crate::error::{Error, Result};
use crate::numeric::{pairwise_sum_nonneg_by, DenseMatrix};
use crate::triplet::TripletRep;

/// When to stop iterating. `W` stands for the correction (`W` in cyclic
/// reduction, `F` in Newton) and `Z` for the iterate it corrects.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum StopRule {
    /// `|w_ij| <= tol * |z_ij|` for every entry. Entries of `Z` below
    /// `1e-280` are skipped.
    #[default]
    Componentwise,
    /// `||W|| <= tol * ||Z||` in the infinity norm. Cheaper to state, but on
    /// badly scaled inputs it stops before the small entries have settled.
    Normwise,
}

impl StopRule {
    pub fn as_str(&self) -> &'static str {
        match self {
            StopRule::Componentwise => "componentwise",
            StopRule::Normwise => "normwise",
        }
    }
}

impl std::str::FromStr for StopRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "componentwise" | "comp" => Ok(StopRule::Componentwise),
            "normwise" | "norm" => Ok(StopRule::Normwise),
            _ => Err(Error::InvalidParameter(format!("unknown stop rule {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SqrtOptions {
    /// Scaling factor: the iteration runs on `A / s` with `s = gamma * max a_ii`.
    pub gamma: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub stop: StopRule,
}

impl Default for SqrtOptions {
    fn default() -> Self {
        SqrtOptions { gamma: 4.0, tol: f64::EPSILON / 2.0, max_iter: 120, stop: StopRule::Componentwise }
    }
}

impl SqrtOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma >= 1.0) || !self.gamma.is_finite() {
            return Err(Error::InvalidParameter(format!("gamma must be >= 1, got {}", self.gamma)));
        }
        if !(self.tol > 0.0) || !self.tol.is_finite() {
            return Err(Error::InvalidParameter(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Converged,
    MaxIter,
    /// Converged, but only after a long phase of linear convergence with
    /// rate about 1/2, the signature of a singular input.
    StagnatedLinear,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Converged => "converged",
            Status::MaxIter => "max_iter",
            Status::StagnatedLinear => "stagnated_linear",
        }
    }
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug)]
pub struct SqrtResult {
    pub x: DenseMatrix,
    /// `None` for the conventional baseline, which does not track one.
    pub triplet: Option<TripletRep>,
    /// Norm of the correction term (`W` or `F`) at every iterate, starting
    /// with the initial one.
    pub residual_trace: Vec<f64>,
    pub iterations: usize,
    pub status: Status,
    /// The scale `s` the iteration ran with.
    pub scale: f64,
}

/// `s = gamma * max_i a_ii` for the matrix represented by `t`.
pub(crate) fn scale_factor(t: &TripletRep, gamma: f64) -> Result<f64> {
    let dmax = t.diag().into_iter().fold(0.0, f64::max);
    if dmax == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    let s = gamma * dmax;
    if !s.is_finite() {
        return Err(Error::InvalidScale(s));
    }
    Ok(s)
}

/// The 1x1 case has a closed form.
pub(crate) fn scalar_sqrt(t: &TripletRep) -> SqrtResult {
    let a = t.diag()[0];
    let x = a.sqrt();
    let u = t.u().to_vec();
    let v = vec![x * u[0]];
    SqrtResult {
        x: DenseMatrix::from_diag(&[x]),
        triplet: Some(TripletRep::new_unchecked(DenseMatrix::zeros(1, 1), u, v)),
        residual_trace: vec![0.0],
        iterations: 0,
        status: Status::Converged,
        scale: 1.0,
    }
}

/// `||Z||_inf` for `Z = diag(d) - Z_off` with `d` recovered from the triplet.
pub(crate) fn triplet_inf_norm(z_off: &DenseMatrix, u: &[f64], v: &[f64]) -> f64 {
    let d = crate::triplet::diag_from_parts(z_off, u, v);
    let n = u.len();
    (0..n)
        .map(|i| {
            let r = z_off.row(i);
            pairwise_sum_nonneg_by(n + 1, |k| if k == 0 { d[i] } else { r[k - 1] })
        })
        .fold(0.0, f64::max)
}

/// Entries of the iterate below this are left out of the componentwise test.
const STOP_FLOOR: f64 = 1e-280;

/// Stopping test for a correction `wmag >= 0` (with infinity norm `w_norm`)
/// against the iterate with triplet `(z_off, u, v)`.
pub(crate) fn stop_reached(opts: &SqrtOptions, wmag: &DenseMatrix, w_norm: f64, z_off: &DenseMatrix, u: &[f64], v: &[f64]) -> bool {
    match opts.stop {
        StopRule::Normwise => w_norm <= opts.tol * triplet_inf_norm(z_off, u, v),
        StopRule::Componentwise => {
            let d = crate::triplet::diag_from_parts(z_off, u, v);
            (0..u.len()).all(|i| {
                let (wr, zr) = (wmag.row(i), z_off.row(i));
                (0..u.len()).all(|j| {
                    let z = if i == j { d[i] } else { zr[j] };
                    z < STOP_FLOOR || wr[j] <= opts.tol * z
                })
            })
        }
    }
}

/// `out_i = a_i + c * sum_k m_ik x_k` as one nonnegative binary-tree sum.
pub(crate) fn add_scaled_mul_vec(a: &[f64], c: f64, m: &DenseMatrix, x: &[f64]) -> Vec<f64> {
    let n = x.len();
    (0..a.len())
        .map(|i| {
            let r = m.row(i);
            pairwise_sum_nonneg_by(n + 1, |k| if k == 0 { a[i] } else { c * r[k - 1] * x[k - 1] })
        })
        .collect()
}

/// `z_off += c * offdiag(w)` for nonnegative `w`.
pub(crate) fn add_offdiag(z_off: &mut DenseMatrix, c: f64, w: &DenseMatrix) {
    let n = z_off.n_rows();
    for i in 0..n {
        let wr = w.row(i);
        for (j, z) in z_off.row_mut(i).iter_mut().enumerate() {
            if i != j {
                *z += c * wr[j];
            }
        }
    }
}

/// Tracks the ratio of consecutive correction norms and flags a run of
/// `LINEAR_RUN` ratios within `[0.4, 0.6]`.
#[derive(Clone, Debug, Default)]
pub(crate) struct LinearDetector {
    run: usize,
    pub(crate) tripped: bool,
}

const LINEAR_RUN: usize = 8;

impl LinearDetector {
    pub(crate) fn push(&mut self, prev: f64, next: f64) {
        let ratio = if prev > 0.0 { next / prev } else { 0.0 };
        if (0.4..=0.6).contains(&ratio) {
            self.run += 1;
            if self.run >= LINEAR_RUN {
                self.tripped = true;
            }
        } else {
            self.run = 0;
        }
    }

    pub(crate) fn status(&self) -> Status {
        if self.tripped {
            Status::StagnatedLinear
        } else {
            Status::Converged
        }
    }
}
