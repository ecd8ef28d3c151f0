//! Shifted cyclic reduction for singular irreducible M-matrices with `A u = 0`.
//!
//! The rank-one shift `Q = sigma u w^T` deflates the eigenvalue `-1/2` of
//! `Z_0^{-1} W_0` that makes plain CR converge linearly. Since `W u = omega u`
//! and `Z u = zeta u` along the iteration, `(Z_off, u, zeta u)` is a triplet
//! for `Z`, and two scalars replace the `p`/`v` recursions.

use super::{add_offdiag, scale_factor, stop_reached, triplet_inf_norm, SqrtOptions, SqrtResult, Status};
use crate::baseline::lu_piv_solve;
use crate::error::{Error, Result};
use crate::gth::factorize_parts;
use crate::numeric::{inf_norm, mat_mul_nonneg, DenseMatrix};
use crate::triplet::{frobenius_form, TripletRep};

/// Largest shift used; keeps `sigma` safely below 1.
const SIGMA_CAP: f64 = 15.0 / 16.0;

/// Picks the first column `j` of `C` with all entries positive and the
/// largest `sigma <= 15/16` with `C - sigma u e_j^T / u_j >= 0`.
///
/// Returns `(j, sigma, w)` with `w = e_j / u_j`.
pub fn select_shift(c: &DenseMatrix, u: &[f64]) -> Result<(usize, f64, Vec<f64>)> {
    let n = u.len();
    let j = (0..n).find(|&j| (0..n).all(|i| c[(i, j)] > 0.0)).ok_or(Error::NoShiftColumn)?;
    let gamma = (0..n).map(|i| c[(i, j)] * u[j] / u[i]).fold(f64::INFINITY, f64::min);
    let sigma = gamma.min(SIGMA_CAP);
    let mut w = vec![0.0; n];
    w[j] = 1.0 / u[j];
    Ok((j, sigma, w))
}

/// The scalar recursion `omega+ = -omega^2 / zeta`, `zeta+ = zeta + 2 omega+`
/// from `omega_0 = sigma - 1`, `zeta_0 = 2 - sigma`, for `steps` steps.
pub fn shifted_scalars(sigma: f64, steps: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(steps + 1);
    let (mut omega, mut zeta) = (sigma - 1.0, 2.0 - sigma);
    out.push((omega, zeta));
    for _ in 0..steps {
        omega = -(omega * omega) / zeta;
        zeta += 2.0 * omega;
        out.push((omega, zeta));
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShiftedCrState {
    wmag: DenseMatrix,
    z_off: DenseMatrix,
    u: Vec<f64>,
    omega: f64,
    zeta: f64,
    sigma: f64,
    shift_col: usize,
    step: usize,
}

impl ShiftedCrState {
    /// Scales `t` and builds `W_0 = -C + Q`, `Z_0 = 2(I + A') - Q`.
    ///
    /// `sigma = None` selects the shift with [`select_shift`]. A fixed
    /// `sigma` must lie in `[0, 1)` and keep `C - Q >= 0`; `Some(0.0)` runs
    /// unshifted CR in this state layout.
    pub fn init(t: &TripletRep, gamma: f64, sigma: Option<f64>) -> Result<(Self, f64)> {
        if !(gamma >= 1.0) || !gamma.is_finite() {
            return Err(Error::InvalidParameter(format!("gamma must be >= 1, got {gamma}")));
        }
        if let Some((index, &value)) = t.v().iter().enumerate().find(|(_, &x)| x != 0.0) {
            return Err(Error::NotSingularInput { index, value });
        }
        let s = scale_factor(t, gamma)?;
        let ts = t.scale(s)?;
        let n = ts.n();
        let u = ts.u().to_vec();
        let c = one_minus(&ts);

        let (j, sigma) = match (select_shift(&c, &u), sigma) {
            (Ok((j, auto, _)), None) => (j, auto),
            (Err(e), None) => return Err(e),
            (Ok((j, _, _)), Some(sig)) => (j, check_fixed_shift(&c, &u, j, sig)?),
            (Err(_), Some(0.0)) => (0, 0.0),
            (Err(e), Some(_)) => return Err(e),
        };

        let q = |i: usize| sigma * u[i] / u[j];
        let mut wmag = c;
        for i in 0..n {
            // sigma <= c_ij u_j / u_i, up to rounding of the quotient.
            wmag[(i, j)] = (wmag[(i, j)] - q(i)).max(0.0);
        }
        let mut z_off = ts.p().map(|x| 2.0 * x);
        for i in 0..n {
            if i != j {
                z_off[(i, j)] += q(i);
            }
        }
        let state = ShiftedCrState {
            wmag,
            z_off,
            u,
            omega: sigma - 1.0,
            zeta: 2.0 - sigma,
            sigma,
            shift_col: j,
            step: 0,
        };
        Ok((state, s))
    }

    pub fn step(&self) -> Result<Self> {
        let zu: Vec<f64> = self.u.iter().map(|x| self.zeta * x).collect();
        let f = factorize_parts(&self.z_off, &self.u, &zu, &mut None)?;
        let g = f.solve_left(&self.wmag)?;
        let wmag = mat_mul_nonneg(&self.wmag, &g);
        let mut z_off = self.z_off.clone();
        add_offdiag(&mut z_off, 2.0, &wmag);
        let omega = -(self.omega * self.omega) / self.zeta;
        let zeta = self.zeta + 2.0 * omega;
        Ok(ShiftedCrState { wmag, z_off, u: self.u.clone(), omega, zeta, step: self.step + 1, ..*self })
    }

    pub fn w_mag(&self) -> &DenseMatrix {
        &self.wmag
    }

    pub fn w(&self) -> DenseMatrix {
        self.wmag.map(|x| -x + 0.0)
    }

    pub fn z_off(&self) -> &DenseMatrix {
        &self.z_off
    }

    /// Signed `Z_l` from the triplet `(Z_off, u, zeta u)`.
    pub fn z(&self) -> DenseMatrix {
        self.triplet().reconstruct()
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn shift_col(&self) -> usize {
        self.shift_col
    }

    pub fn step_index(&self) -> usize {
        self.step
    }

    pub fn w_norm(&self) -> f64 {
        inf_norm(&self.wmag)
    }

    pub fn z_norm(&self) -> f64 {
        let zu: Vec<f64> = self.u.iter().map(|x| self.zeta * x).collect();
        triplet_inf_norm(&self.z_off, &self.u, &zu)
    }

    fn triplet(&self) -> TripletRep {
        let zu = self.u.iter().map(|x| self.zeta * x).collect();
        TripletRep::new_unchecked(self.z_off.clone(), self.u.clone(), zu)
    }

    /// `A'^{1/2} = 4 A' Z^{-1}` for the scaled matrix `a_scaled`.
    pub fn recover(&self, a_scaled: &DenseMatrix) -> Result<DenseMatrix> {
        let zu: Vec<f64> = self.u.iter().map(|x| self.zeta * x).collect();
        let f = factorize_parts(&self.z_off, &self.u, &zu, &mut None)?;
        Ok(f.solve_right(a_scaled)?.scaled(4.0))
    }
}

/// `C = I - A'` as a nonnegative matrix (off-diagonal `P'`, diagonal `1 - a'_ii`).
fn one_minus(ts: &TripletRep) -> DenseMatrix {
    let d = ts.diag();
    let p = ts.p();
    DenseMatrix::from_fn(ts.n(), ts.n(), |i, j| if i == j { 1.0 - d[i] } else { p[(i, j)] })
}

fn check_fixed_shift(c: &DenseMatrix, u: &[f64], j: usize, sigma: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&sigma) {
        return Err(Error::InvalidShift(format!("sigma = {sigma} is outside [0, 1)")));
    }
    for i in 0..u.len() {
        if sigma * u[i] / u[j] > c[(i, j)] {
            return Err(Error::InvalidShift(format!("sigma = {sigma} makes C - Q negative at ({i}, {j})")));
        }
    }
    Ok(sigma)
}

/// Principal square root of a singular irreducible M-matrix with `A u = 0`.
pub fn shifted_cr_sqrt(t: &TripletRep, opts: &SqrtOptions) -> Result<SqrtResult> {
    opts.validate()?;
    if let Some((index, &value)) = t.v().iter().enumerate().find(|(_, &x)| x != 0.0) {
        return Err(Error::NotSingularInput { index, value });
    }
    let a = t.reconstruct();
    let blocks = frobenius_form(&a)?.n_blocks();
    if blocks != 1 {
        return Err(Error::Reducible { blocks });
    }
    if t.n() == 1 {
        return Ok(super::scalar_sqrt(t));
    }

    let (mut state, s) = ShiftedCrState::init(t, opts.gamma, None)?;
    let mut trace = vec![state.w_norm()];
    let done = |st: &ShiftedCrState, wn: f64| {
        let zu: Vec<f64> = st.u.iter().map(|x| st.zeta * x).collect();
        stop_reached(opts, &st.wmag, wn, &st.z_off, &st.u, &zu)
    };
    let mut converged = done(&state, trace[0]);
    while !converged && state.step < opts.max_iter {
        state = state.step()?;
        let wn = state.w_norm();
        trace.push(wn);
        converged = done(&state, wn);
    }

    let a_scaled = t.scale(s)?.reconstruct();
    let xs = state.recover(&a_scaled)?.scaled(s.sqrt());
    // The off-diagonal of the recovered matrix carries rounding from the
    // final signed solve; clamp any positive entries to keep a valid triplet.
    let n = t.n();
    let p = DenseMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { (-xs[(i, j)]).max(0.0) });
    let triplet = TripletRep::new_unchecked(p, t.u().to_vec(), vec![0.0; n]);
    let result = SqrtResult {
        x: triplet.reconstruct(),
        triplet: Some(triplet),
        residual_trace: trace,
        iterations: state.step,
        status: if converged { Status::Converged } else { Status::MaxIter },
        scale: s,
    };
    if converged {
        Ok(result)
    } else {
        Err(Error::NotConverged { result: Box::new(result) })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeflationEstimate {
    /// Spectral radius estimate of `Z_0^{-1} W_0`.
    pub rho: f64,
    /// False when power iteration hit its step limit; `rho` is then the last
    /// estimate.
    pub converged: bool,
}

/// Spectral radius of `Z_0^{-1} W_0` with `W_0 = A - I + Q`,
/// `Z_0 = 2(A + I) - Q`, `Q = sigma u w^T`, for an already scaled `A`.
///
/// Power iteration runs on the square of the matrix so that a dominant pair
/// `+-rho` still converges.
pub fn eigen_deflation_check(a: &DenseMatrix, u: &[f64], sigma: f64, w: &[f64]) -> Result<DeflationEstimate> {
    const MAX_STEPS: usize = 500;
    let n = u.len();
    if !a.is_square() || a.n_rows() != n || w.len() != n {
        return Err(crate::error::dim_mismatch("eigen_deflation_check", n, a.n_rows()));
    }
    let q = |i: usize, j: usize| sigma * u[i] * w[j];
    let id = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
    let w0 = DenseMatrix::from_fn(n, n, |i, j| a[(i, j)] - id(i, j) + q(i, j));
    let z0 = DenseMatrix::from_fn(n, n, |i, j| 2.0 * (a[(i, j)] + id(i, j)) - q(i, j));
    let m = lu_piv_solve(&z0, &w0)?;

    let norm = |x: &[f64]| x.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let mut x: Vec<f64> = (0..n).map(|i| 1.0 + (i as f64 + 1.0) / (2.0 * n as f64)).collect();
    let mut rho = 0.0;
    for _ in 0..MAX_STEPS {
        let y = m.mul_vec(&m.mul_vec(&x)?)?;
        let (nx, ny) = (norm(&x), norm(&y));
        if ny == 0.0 {
            return Ok(DeflationEstimate { rho: 0.0, converged: true });
        }
        let next = (ny / nx).sqrt();
        x = y.iter().map(|v| v / ny).collect();
        if (next - rho).abs() <= 1e-13 * next {
            return Ok(DeflationEstimate { rho: next, converged: true });
        }
        rho = next;
    }
    Ok(DeflationEstimate { rho, converged: false })
}
