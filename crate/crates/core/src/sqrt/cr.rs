//! Cyclic reduction on triplets.
//!
//! `W` is kept as its magnitude `-W >= 0` and `Z` only through its
//! off-diagonal magnitudes plus `v = Z u`, so every step adds nonnegative
//! numbers. The diagonal of `Z` is recomputed from the triplet whenever it
//! is needed.

use super::{
    add_offdiag, add_scaled_mul_vec, scalar_sqrt, scale_factor, stop_reached, triplet_inf_norm, LinearDetector,
    SqrtOptions, SqrtResult, Status,
};
use crate::error::{Error, Result};
use crate::gth::factorize_parts;
use crate::numeric::{inf_norm, mat_mul_nonneg, DenseMatrix};
use crate::triplet::{diag_from_parts, TripletRep};

#[derive(Clone, Debug, PartialEq)]
pub struct CrState {
    wmag: DenseMatrix,
    z_off: DenseMatrix,
    u: Vec<f64>,
    v: Vec<f64>,
    p: Vec<f64>,
    step: usize,
}

impl CrState {
    /// `-W_l`, entrywise nonnegative.
    pub fn w_mag(&self) -> &DenseMatrix {
        &self.wmag
    }

    /// Signed `W_l`.
    pub fn w(&self) -> DenseMatrix {
        self.wmag.map(|x| -x + 0.0)
    }

    pub fn z_off(&self) -> &DenseMatrix {
        &self.z_off
    }

    /// Diagonal of `Z_l`, from `(v + Z_off u) / u`.
    pub fn z_diag(&self) -> Vec<f64> {
        diag_from_parts(&self.z_off, &self.u, &self.v)
    }

    /// Signed `Z_l`.
    pub fn z(&self) -> DenseMatrix {
        let d = self.z_diag();
        let n = self.u.len();
        DenseMatrix::from_fn(n, n, |i, j| if i == j { d[i] } else { -self.z_off[(i, j)] + 0.0 })
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn step(&self) -> usize {
        self.step
    }

    pub fn w_norm(&self) -> f64 {
        inf_norm(&self.wmag)
    }

    pub fn z_norm(&self) -> f64 {
        triplet_inf_norm(&self.z_off, &self.u, &self.v)
    }

    /// `A^{1/2}` (of the scaled input, times `sqrt(s)`) and its triplet.
    fn finalize(&self, s: f64) -> (DenseMatrix, TripletRep) {
        let c = s.sqrt() / 4.0;
        let t = TripletRep::new_unchecked(
            self.z_off.map(|x| x * c),
            self.u.clone(),
            self.v.iter().map(|x| x * c).collect(),
        );
        (t.reconstruct(), t)
    }
}

/// Scales `t` by `s = gamma * max a_ii` and sets up `W_0 = A' - I`,
/// `Z_0 = 2(I + A')`, `p_0 = 4 v'`, `v_0 = 2(u + v')`.
pub fn cr_init(t: &TripletRep, gamma: f64) -> Result<(CrState, f64)> {
    if !(gamma >= 1.0) || !gamma.is_finite() {
        return Err(Error::InvalidParameter(format!("gamma must be >= 1, got {gamma}")));
    }
    let s = scale_factor(t, gamma)?;
    let ts = t.scale(s)?;
    let n = ts.n();
    let d = ts.diag();
    let p = ts.p();
    // The only subtraction: 1 - a'_ii, with a'_ii <= 1/gamma.
    let wmag = DenseMatrix::from_fn(n, n, |i, j| if i == j { 1.0 - d[i] } else { p[(i, j)] });
    let z_off = p.map(|x| 2.0 * x);
    let v = ts.u().iter().zip(ts.v()).map(|(u, v)| 2.0 * (u + v)).collect();
    let pv = ts.v().iter().map(|v| 4.0 * v).collect();
    Ok((CrState { wmag, z_off, u: ts.u().to_vec(), v, p: pv, step: 0 }, s))
}

/// One step: `W+ = -W Z^{-1} W`, `Z+ = Z + 2 W+`, `p+ = p - 2 W Z^{-1} p`,
/// `v+ = p+ - 2 W+ u`.
pub fn cr_step(state: &CrState) -> Result<CrState> {
    let f = factorize_parts(&state.z_off, &state.u, &state.v, &mut None)?;
    let g = f.solve_left(&state.wmag)?;
    let t = f.solve_vec(&state.p)?;
    let wmag = mat_mul_nonneg(&state.wmag, &g);
    let mut z_off = state.z_off.clone();
    add_offdiag(&mut z_off, 2.0, &wmag);
    let p = add_scaled_mul_vec(&state.p, 2.0, &state.wmag, &t);
    let v = add_scaled_mul_vec(&p, 2.0, &wmag, &state.u);
    Ok(CrState { wmag, z_off, u: state.u.clone(), v, p, step: state.step + 1 })
}

/// Principal square root by triplet cyclic reduction.
pub fn cr_sqrt(t: &TripletRep, opts: &SqrtOptions) -> Result<SqrtResult> {
    opts.validate()?;
    if t.n() == 1 {
        return Ok(scalar_sqrt(t));
    }
    let (mut state, s) = cr_init(t, opts.gamma)?;
    let mut trace = vec![state.w_norm()];
    let mut detector = LinearDetector::default();
    let done = |st: &CrState, wn: f64| stop_reached(opts, &st.wmag, wn, &st.z_off, &st.u, &st.v);
    let mut converged = done(&state, trace[0]);
    while !converged && state.step < opts.max_iter {
        state = cr_step(&state)?;
        let wn = state.w_norm();
        detector.push(*trace.last().unwrap_or(&0.0), wn);
        trace.push(wn);
        converged = done(&state, wn);
    }
    let (x, triplet) = state.finalize(s);
    let result = SqrtResult {
        x,
        triplet: Some(triplet),
        residual_trace: trace,
        iterations: state.step,
        status: if converged { detector.status() } else { Status::MaxIter },
        scale: s,
    };
    if converged {
        Ok(result)
    } else {
        Err(Error::NotConverged { result: Box::new(result) })
    }
}
