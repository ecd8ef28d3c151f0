//! Incremental Newton on triplets.
//!
//! `X_{l+1} = X_l + F_l`, `F_{l+1} = -1/2 F_l X_{l+1}^{-1} F_l` with
//! `X_0 = A'`, `F_0 = (I - A') / 2`. State `k` holds `X_{k+1}` through its
//! triplet `(X_off, u, v)`, the magnitude `|F_k|` and the vector `p_k`, so
//! that `4 X_{k+1} = Z_k`, `2 |F_k| = -W_k` and `p_k` coincide with the
//! cyclic reduction state `k`.

use super::{
    add_offdiag, add_scaled_mul_vec, scalar_sqrt, scale_factor, stop_reached, triplet_inf_norm, CrState,
    LinearDetector, SqrtOptions, SqrtResult, Status,
};
use crate::error::{Error, Result};
use crate::gth::factorize_parts;
use crate::numeric::{inf_norm, mat_mul_nonneg, DenseMatrix};
use crate::triplet::{diag_from_parts, TripletRep};

#[derive(Clone, Debug, PartialEq)]
pub struct InState {
    x_off: DenseMatrix,
    u: Vec<f64>,
    v: Vec<f64>,
    fmag: DenseMatrix,
    p: Vec<f64>,
    step: usize,
}

impl InState {
    /// Off-diagonal magnitudes of `X_{k+1}`.
    pub fn x_off(&self) -> &DenseMatrix {
        &self.x_off
    }

    /// Signed `X_{k+1}`.
    pub fn x(&self) -> DenseMatrix {
        let d = diag_from_parts(&self.x_off, &self.u, &self.v);
        let n = self.u.len();
        DenseMatrix::from_fn(n, n, |i, j| if i == j { d[i] } else { -self.x_off[(i, j)] + 0.0 })
    }

    /// `|F_k|`. `F_0 >= 0`, every later `F_k <= 0`.
    pub fn f_mag(&self) -> &DenseMatrix {
        &self.fmag
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    /// `X_{k+1} u`.
    pub fn v(&self) -> &[f64] {
        &self.v
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn step(&self) -> usize {
        self.step
    }

    pub fn f_norm(&self) -> f64 {
        inf_norm(&self.fmag)
    }

    pub fn x_norm(&self) -> f64 {
        triplet_inf_norm(&self.x_off, &self.u, &self.v)
    }

    /// Moves from state `k` to `k + 1`, i.e. computes `F_{k+1}` and
    /// `X_{k+2} = X_{k+1} + F_{k+1}`.
    pub fn advance(&self) -> Result<InState> {
        let f = factorize_parts(&self.x_off, &self.u, &self.v, &mut None)?;
        let g = f.solve_left(&self.fmag)?;
        let gp = f.solve_vec(&self.p)?;
        let fmag = mat_mul_nonneg(&self.fmag, &g).map(|x| 0.5 * x);
        // p_1 = 8 (I + A')^{-1} v' = X_1^{-1} p_0, since X_1 = (I + A') / 2.
        let p = if self.step == 0 { gp } else { add_scaled_mul_vec(&self.p, 1.0, &self.fmag, &gp) };
        let mut x_off = self.x_off.clone();
        add_offdiag(&mut x_off, 1.0, &fmag);
        let quarter_p: Vec<f64> = p.iter().map(|x| 0.25 * x).collect();
        let v = add_scaled_mul_vec(&quarter_p, 1.0, &fmag, &self.u);
        Ok(InState { x_off, u: self.u.clone(), v, fmag, p, step: self.step + 1 })
    }

    fn finalize(&self, s: f64) -> (DenseMatrix, TripletRep) {
        let c = s.sqrt();
        let t = TripletRep::new_unchecked(
            self.x_off.map(|x| x * c),
            self.u.clone(),
            self.v.iter().map(|x| x * c).collect(),
        );
        (t.reconstruct(), t)
    }
}

/// Scales `t` and sets up state 0: `X_1 = (I + A') / 2` with triplet
/// `(P'/2, u, (u + v')/2)`, `F_0 = (I - A') / 2`, `p_0 = 4 v'`.
pub fn in_init(t: &TripletRep, gamma: f64) -> Result<(InState, f64)> {
    if !(gamma >= 1.0) || !gamma.is_finite() {
        return Err(Error::InvalidParameter(format!("gamma must be >= 1, got {gamma}")));
    }
    let s = scale_factor(t, gamma)?;
    let ts = t.scale(s)?;
    let n = ts.n();
    let d = ts.diag();
    let p = ts.p();
    let fmag = DenseMatrix::from_fn(n, n, |i, j| if i == j { 0.5 * (1.0 - d[i]) } else { 0.5 * p[(i, j)] });
    let x_off = p.map(|x| 0.5 * x);
    let v = ts.u().iter().zip(ts.v()).map(|(u, v)| 0.5 * (u + v)).collect();
    let pv = ts.v().iter().map(|v| 4.0 * v).collect();
    Ok((InState { x_off, u: ts.u().to_vec(), v, fmag, p: pv, step: 0 }, s))
}

/// Principal square root by triplet incremental Newton.
pub fn in_sqrt(t: &TripletRep, opts: &SqrtOptions) -> Result<SqrtResult> {
    opts.validate()?;
    if t.n() == 1 {
        return Ok(scalar_sqrt(t));
    }
    let (mut state, s) = in_init(t, opts.gamma)?;
    let mut trace = vec![state.f_norm()];
    let mut detector = LinearDetector::default();
    let done = |st: &InState, fnorm: f64| stop_reached(opts, &st.fmag, fnorm, &st.x_off, &st.u, &st.v);
    let mut converged = done(&state, trace[0]);
    while !converged && state.step < opts.max_iter {
        state = state.advance()?;
        let fnorm = state.f_norm();
        detector.push(*trace.last().unwrap_or(&0.0), fnorm);
        trace.push(fnorm);
        converged = done(&state, fnorm);
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

/// Largest componentwise relative deviation between the Newton state `k`
/// and the cyclic reduction state `k` run on the same input: `4 X_{k+1}`
/// against `Z_k`, `2 F` against `W_k` (in magnitude) and `p_k` against `p_k`.
///
/// Entries whose reference magnitude is below `1e-280` are compared
/// absolutely.
pub fn in_state_crosscheck(newton: &InState, cr: &CrState) -> Result<f64> {
    if newton.step != cr.step() {
        return Err(Error::StepMismatch { newton: newton.step, cr: cr.step() });
    }
    const FLOOR: f64 = 1e-280;
    let dev = |a: f64, b: f64| {
        let d = (a - b).abs();
        if b.abs() > FLOOR {
            d / b.abs()
        } else {
            d
        }
    };
    let x4 = newton.x().scaled(4.0);
    let z = cr.z();
    let mut worst = 0.0f64;
    for (a, b) in x4.as_slice().iter().zip(z.as_slice()) {
        worst = worst.max(dev(*a, *b));
    }
    for (a, b) in newton.fmag.as_slice().iter().zip(cr.w_mag().as_slice()) {
        worst = worst.max(dev(2.0 * a, *b));
    }
    for (a, b) in newton.p.iter().zip(cr.p()) {
        worst = worst.max(dev(*a, *b));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sqrt::{cr_init, cr_step};
    use crate::testgen;

    #[test]
    fn identity_with_unit_scale() {
        // gamma = 1 gives s = 1, A' = I and F_0 = 0.
        let t = TripletRep::from_full(&DenseMatrix::identity(3), &[1.0; 3]).unwrap();
        let opts = SqrtOptions { gamma: 1.0, ..SqrtOptions::default() };
        let r = in_sqrt(&t, &opts).unwrap();
        assert_eq!(r.x, DenseMatrix::identity(3));
        assert_eq!(r.iterations, 0);
    }

    #[test]
    fn two_by_two() {
        let a = DenseMatrix::from_rows(&[[2.0, -1.0], [-1.0, 2.0]]).unwrap();
        let t = TripletRep::from_full(&a, &[1.0, 1.0]).unwrap();
        let r = in_sqrt(&t, &SqrtOptions::default()).unwrap();
        let d = (3f64.sqrt() + 1.0) / 2.0;
        let o = (1.0 - 3f64.sqrt()) / 2.0;
        assert!((r.x[(0, 0)] - d).abs() <= 1e-14 * d);
        assert!((r.x[(0, 1)] - o).abs() <= 1e-14 * o.abs());
    }

    #[test]
    fn matches_cyclic_reduction_stepwise() {
        let a = DenseMatrix::from_rows(&[[0.5, -0.25], [-0.25, 0.5]]).unwrap();
        let t = TripletRep::from_full(&a, &[1.0, 1.0]).unwrap();
        let (mut nw, _) = in_init(&t, 2.0).unwrap();
        let (mut cr, _) = cr_init(&t, 2.0).unwrap();
        assert!(in_state_crosscheck(&nw, &cr).unwrap() <= 1e-15);
        nw = nw.advance().unwrap();
        cr = cr_step(&cr).unwrap();
        assert!(in_state_crosscheck(&nw, &cr).unwrap() <= 1e-14);

        let t = testgen::gen_test1(10);
        let (mut nw, _) = in_init(&t, 4.0).unwrap();
        let (mut cr, _) = cr_init(&t, 4.0).unwrap();
        for _ in 0..5 {
            nw = nw.advance().unwrap();
            cr = cr_step(&cr).unwrap();
            assert!(in_state_crosscheck(&nw, &cr).unwrap() <= 1e-13);
        }
        assert!(matches!(in_state_crosscheck(&nw.advance().unwrap(), &cr), Err(Error::StepMismatch { .. })));
    }

    #[test]
    fn singular_kernel_relations() {
        // With v = 0: p = 0, X_l u = 2^-l u and F_l u = -2^-(l+1) u.
        let t = testgen::gen_test1(8);
        let (mut st, _) = in_init(&t, 4.0).unwrap();
        for k in 1..=10 {
            st = st.advance().unwrap();
            assert!(st.p().iter().all(|&x| x == 0.0));
            let xu = st.x().mul_vec(st.u()).unwrap();
            let fu = st.f_mag().mul_vec(st.u()).unwrap();
            for i in 0..8 {
                assert!((xu[i] - 2f64.powi(-(k + 1))).abs() <= 1e-12 * 2f64.powi(-(k + 1)));
                assert!((fu[i] - 2f64.powi(-(k + 1))).abs() <= 1e-12 * 2f64.powi(-(k + 1)));
            }
        }
    }
}
