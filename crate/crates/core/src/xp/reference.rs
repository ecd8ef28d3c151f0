//! Double-word reference square roots.
//!
//! Two routes are available. [`xp_sqrtm_reference`] runs cyclic reduction on
//! full signed matrices with pivoted solves; its error grows with the
//! condition of the iterates. On singular input `Z` tends to a singular
//! limit and the update stalls near `1e-17`, so this route reports
//! non-convergence there.
//! [`xp_sqrtm_reference_triplet`] runs the sign-pure triplet iteration in
//! double-word arithmetic, so every entry, however small, is computed to
//! about 30 digits. All experiments use the triplet route.
//!
//! Both scale by a power of 4 so that the final `sqrt(s)` is exact, and both
//! stop componentwise: every entry of the update `2 W` must be below `1e-27`
//! times the matching entry of `Z`.

use rayon::prelude::*;

use super::matrix::XpMatrix;
use super::scalar::XpScalar;
use crate::error::{dim_mismatch, Error, Result};
use crate::numeric::DenseMatrix;
use crate::triplet::TripletRep;

pub const REFERENCE_TOL: f64 = 1e-27;

/// Entries of `Z` at or below this magnitude are left out of the stopping test.
const TINY: f64 = 1e-300;

fn max_iter_for(singular: bool) -> usize {
    if singular {
        200
    } else {
        60
    }
}

/// `4^k >= 4 * dmax` with the smallest such `k >= 0`; returns `(4^k, 2^k)`.
fn power_of_four_scale(dmax: f64) -> Result<(f64, f64)> {
    if !(dmax > 0.0) || !dmax.is_finite() {
        return Err(Error::ZeroMatrix);
    }
    let target = 4.0 * dmax;
    let mut k: i32 = 0;
    while 4f64.powi(k) < target {
        k += 1;
    }
    while k > 0 && 4f64.powi(k - 1) >= target {
        k -= 1;
    }
    Ok((4f64.powi(k), 2f64.powi(k)))
}

/// Reference square root of `a` by cyclic reduction on full double-word
/// matrices with partially pivoted solves. `singular_hint` raises the
/// iteration cap from 60 to 200 for the linear phase of singular inputs.
pub fn xp_sqrtm_reference(a: &DenseMatrix, singular_hint: bool) -> Result<XpMatrix> {
    if !a.is_square() {
        return Err(dim_mismatch("xp_sqrtm_reference", "square matrix", format!("{}x{}", a.n_rows(), a.n_cols())));
    }
    let n = a.n_rows();
    let (s, root) = power_of_four_scale(a.diag().into_iter().fold(0.0, f64::max))?;
    let a1 = XpMatrix::from_dense(a).scaled(1.0 / s);
    let id = XpMatrix::identity(n);
    let mut w = XpMatrix::from_fn(n, n, |i, j| a1[(i, j)] - id[(i, j)]);
    let mut z = XpMatrix::from_fn(n, n, |i, j| (a1[(i, j)] + id[(i, j)]).mul_f64(2.0));
    let max_iter = max_iter_for(singular_hint);
    for _ in 0..max_iter {
        let g = xp_lu_solve(&z, &w)?;
        w = w.mul(&g)?.map(|x| -x);
        for (zi, wi) in z.data_mut().iter_mut().zip(w.as_slice()) {
            *zi += wi.mul_f64(2.0);
        }
        if converged(&w, |i, j| z[(i, j)].abs().to_f64()) {
            return Ok(z.scaled(root / 4.0));
        }
    }
    Err(Error::ReferenceNotConverged { iterations: max_iter })
}

/// Same as [`xp_sqrtm_reference`] through the incremental Newton
/// recurrence `X+ = X + F`, `F+ = -F X+^{-1} F / 2`.
pub fn xp_sqrtm_reference_in(a: &DenseMatrix, singular_hint: bool) -> Result<XpMatrix> {
    if !a.is_square() {
        return Err(dim_mismatch("xp_sqrtm_reference_in", "square matrix", format!("{}x{}", a.n_rows(), a.n_cols())));
    }
    let n = a.n_rows();
    let (s, root) = power_of_four_scale(a.diag().into_iter().fold(0.0, f64::max))?;
    let mut x = XpMatrix::from_dense(a).scaled(1.0 / s);
    let id = XpMatrix::identity(n);
    let mut f = XpMatrix::from_fn(n, n, |i, j| (id[(i, j)] - x[(i, j)]).mul_f64(0.5));
    let max_iter = max_iter_for(singular_hint);
    for _ in 0..max_iter {
        for (xi, fi) in x.data_mut().iter_mut().zip(f.as_slice()) {
            *xi += *fi;
        }
        let g = xp_lu_solve(&x, &f)?;
        f = f.mul(&g)?.map(|v| v.mul_f64(-0.5));
        // Compare 2F with 4X so the test matches the CR route.
        if converged(&f, |i, j| 2.0 * x[(i, j)].abs().to_f64()) {
            for (xi, fi) in x.data_mut().iter_mut().zip(f.as_slice()) {
                *xi += *fi;
            }
            return Ok(x.scaled(root));
        }
    }
    Err(Error::ReferenceNotConverged { iterations: max_iter })
}

fn converged(w: &XpMatrix, z: impl Fn(usize, usize) -> f64) -> bool {
    let n = w.n_rows();
    (0..n).all(|i| {
        (0..w.n_cols()).all(|j| {
            let zi = z(i, j);
            zi <= TINY || 2.0 * w[(i, j)].abs().to_f64() <= REFERENCE_TOL * zi
        })
    })
}

/// `A^{-1} B` by partially pivoted elimination in double-word arithmetic.
pub fn xp_lu_solve(a: &XpMatrix, b: &XpMatrix) -> Result<XpMatrix> {
    let n = a.n_rows();
    if a.n_cols() != n || b.n_rows() != n {
        return Err(dim_mismatch("xp_lu_solve", n, b.n_rows()));
    }
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let piv = (k..n)
            .max_by(|&i, &j| lu[(i, k)].abs().partial_cmp(&lu[(j, k)].abs()).unwrap_or(std::cmp::Ordering::Equal))
            .unwrap_or(k);
        if lu[(piv, k)].is_zero() {
            return Err(Error::SingularPivot { column: k });
        }
        if piv != k {
            for j in 0..n {
                let t = lu[(k, j)];
                lu[(k, j)] = lu[(piv, j)];
                lu[(piv, j)] = t;
            }
            perm.swap(k, piv);
        }
        let d = lu[(k, k)];
        let urow: Vec<XpScalar> = lu.row(k)[k + 1..].to_vec();
        for i in k + 1..n {
            let l = lu[(i, k)] / d;
            lu[(i, k)] = l;
            for (x, &ukj) in lu.row_mut(i)[k + 1..].iter_mut().zip(&urow) {
                *x = *x - l * ukj;
            }
        }
    }
    let bt = b.transpose();
    let cols: Vec<Vec<XpScalar>> = (0..bt.n_rows())
        .into_par_iter()
        .map(|c| {
            let col = bt.row(c);
            let mut x: Vec<XpScalar> = perm.iter().map(|&i| col[i]).collect();
            for i in 1..n {
                let r = lu.row(i);
                let mut acc = x[i];
                for k in 0..i {
                    acc = acc - r[k] * x[k];
                }
                x[i] = acc;
            }
            for i in (0..n).rev() {
                let r = lu.row(i);
                let mut acc = x[i];
                for k in i + 1..n {
                    acc = acc - r[k] * x[k];
                }
                x[i] = acc / r[i];
            }
            x
        })
        .collect();
    Ok(XpMatrix::from_fn(n, b.n_cols(), |i, j| cols[j][i]))
}

/// GTH factors in double-word arithmetic, all entries magnitudes.
struct XpGth {
    l_off: XpMatrix,
    u_diag: Vec<XpScalar>,
    u_off: XpMatrix,
}

impl XpGth {
    fn factor(p: &XpMatrix, u: &[XpScalar], v: &[XpScalar]) -> Result<Self> {
        let n = u.len();
        let mut m = p.clone();
        let mut w = v.to_vec();
        let mut l_off = XpMatrix::zeros(n, n);
        let mut u_diag = vec![XpScalar::ZERO; n];
        for l in 0..n {
            let mut num = w[l];
            for k in l + 1..n {
                num += m[(l, k)] * u[k];
            }
            let piv = num / u[l];
            if !(piv.hi > 0.0) {
                return Err(if l + 1 < n { Error::StructuralBreakdown { step: l } } else { Error::Singular });
            }
            u_diag[l] = piv;
            let urow: Vec<XpScalar> = m.row(l)[l + 1..].to_vec();
            for i in l + 1..n {
                let li = m[(i, l)] / piv;
                l_off[(i, l)] = li;
                if li.is_zero() {
                    continue;
                }
                let wl = w[l];
                w[i] += li * wl;
                for (k, (x, &ulk)) in m.row_mut(i)[l + 1..].iter_mut().zip(&urow).enumerate() {
                    if l + 1 + k != i {
                        *x += li * ulk;
                    }
                }
            }
        }
        let u_off = XpMatrix::from_fn(n, n, |i, j| if j > i { m[(i, j)] } else { XpScalar::ZERO });
        Ok(XpGth { l_off, u_diag, u_off })
    }

    fn solve_vec(&self, b: &[XpScalar]) -> Vec<XpScalar> {
        let n = b.len();
        let mut x = b.to_vec();
        for i in 1..n {
            let r = self.l_off.row(i);
            let mut acc = x[i];
            for k in 0..i {
                acc += r[k] * x[k];
            }
            x[i] = acc;
        }
        for i in (0..n).rev() {
            let r = self.u_off.row(i);
            let mut acc = x[i];
            for k in i + 1..n {
                acc += r[k] * x[k];
            }
            x[i] = acc / self.u_diag[i];
        }
        x
    }

    fn solve(&self, b: &XpMatrix) -> XpMatrix {
        let bt = b.transpose();
        let cols: Vec<Vec<XpScalar>> = (0..bt.n_rows()).into_par_iter().map(|c| self.solve_vec(bt.row(c))).collect();
        XpMatrix::from_fn(b.n_rows(), b.n_cols(), |i, j| cols[j][i])
    }
}

fn mul_vec(a: &XpMatrix, x: &[XpScalar]) -> Vec<XpScalar> {
    (0..a.n_rows())
        .map(|i| {
            let mut acc = XpScalar::ZERO;
            for (aik, xk) in a.row(i).iter().zip(x) {
                acc += *aik * *xk;
            }
            acc
        })
        .collect()
}

/// `A^{-1} B` for the matrix represented by `t`, by the GTH-like
/// elimination in double-word arithmetic. The triplet data enter exactly, so
/// this is the reference for solves whose input is the triplet itself.
pub fn xp_triplet_solve(t: &TripletRep, b: &XpMatrix) -> Result<XpMatrix> {
    if b.n_rows() != t.n() {
        return Err(dim_mismatch("xp_triplet_solve", t.n(), b.n_rows()));
    }
    let u: Vec<XpScalar> = t.u().iter().map(|&x| XpScalar::from_f64(x)).collect();
    let v: Vec<XpScalar> = t.v().iter().map(|&x| XpScalar::from_f64(x)).collect();
    Ok(XpGth::factor(&XpMatrix::from_dense(t.p()), &u, &v)?.solve(b))
}

fn triplet_diag(p: &XpMatrix, u: &[XpScalar], v: &[XpScalar]) -> Vec<XpScalar> {
    let pu = mul_vec(p, u);
    (0..u.len()).map(|i| (v[i] + pu[i]) / u[i]).collect()
}

/// Outcome of the triplet reference iteration.
#[derive(Clone, Debug)]
pub struct XpReference {
    pub x: XpMatrix,
    pub iterations: usize,
}

/// Reference square root of the matrix represented by `t`, by sign-pure
/// triplet cyclic reduction in double-word arithmetic. The iteration cap is
/// 200 when `v = 0` and 60 otherwise.
pub fn xp_sqrtm_reference_triplet(t: &TripletRep) -> Result<XpMatrix> {
    let cap = max_iter_for(t.is_kernel_rep());
    Ok(xp_sqrtm_reference_triplet_with(t, cap)?.x)
}

pub fn xp_sqrtm_reference_triplet_with(t: &TripletRep, max_iter: usize) -> Result<XpReference> {
    let n = t.n();
    let u: Vec<XpScalar> = t.u().iter().map(|&x| XpScalar::from_f64(x)).collect();
    let p0 = XpMatrix::from_dense(t.p());
    let v0: Vec<XpScalar> = t.v().iter().map(|&x| XpScalar::from_f64(x)).collect();
    let d0 = triplet_diag(&p0, &u, &v0);
    let dmax = d0.iter().map(|x| x.to_f64()).fold(0.0, f64::max);
    let (s, root) = power_of_four_scale(dmax)?;

    let inv_s = 1.0 / s;
    let ps = p0.scaled(inv_s);
    let vs: Vec<XpScalar> = v0.iter().map(|x| x.mul_f64(inv_s)).collect();
    let ds: Vec<XpScalar> = d0.iter().map(|x| x.mul_f64(inv_s)).collect();
    let mut wmag = XpMatrix::from_fn(n, n, |i, j| if i == j { XpScalar::ONE - ds[i] } else { ps[(i, j)] });
    let mut z_off = ps.scaled(2.0);
    let mut v: Vec<XpScalar> = u.iter().zip(&vs).map(|(a, b)| (*a + *b).mul_f64(2.0)).collect();
    let mut p: Vec<XpScalar> = vs.iter().map(|x| x.mul_f64(4.0)).collect();

    for it in 1..=max_iter {
        let f = XpGth::factor(&z_off, &u, &v)?;
        let g = f.solve(&wmag);
        let tv = f.solve_vec(&p);
        let w_next = wmag.mul(&g)?;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    z_off[(i, j)] += w_next[(i, j)].mul_f64(2.0);
                }
            }
        }
        let wt = mul_vec(&wmag, &tv);
        p = p.iter().zip(&wt).map(|(a, b)| *a + b.mul_f64(2.0)).collect();
        let wu = mul_vec(&w_next, &u);
        v = p.iter().zip(&wu).map(|(a, b)| *a + b.mul_f64(2.0)).collect();
        wmag = w_next;

        let d = triplet_diag(&z_off, &u, &v);
        let done = converged(&wmag, |i, j| if i == j { d[i].to_f64() } else { z_off[(i, j)].to_f64() });
        if done {
            let c = root / 4.0;
            let x = XpMatrix::from_fn(n, n, |i, j| if i == j { d[i].mul_f64(c) } else { -z_off[(i, j)].mul_f64(c) });
            return Ok(XpReference { x, iterations: it });
        }
    }
    Err(Error::ReferenceNotConverged { iterations: max_iter })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_rel(x: &XpMatrix, r: &XpMatrix) -> f64 {
        x.as_slice()
            .iter()
            .zip(r.as_slice())
            .map(|(a, b)| if b.is_zero() { a.abs().to_f64() } else { ((*a - *b) / *b).abs().to_f64() })
            .fold(0.0, f64::max)
    }

    #[test]
    fn scale_is_power_of_four() {
        assert_eq!(power_of_four_scale(1.0).unwrap(), (4.0, 2.0));
        assert_eq!(power_of_four_scale(3.0).unwrap(), (16.0, 4.0));
        assert_eq!(power_of_four_scale(0.01).unwrap(), (1.0, 1.0));
        assert!(power_of_four_scale(0.0).is_err());
    }

    #[test]
    fn closed_forms() {
        let id = DenseMatrix::identity(3);
        assert!(max_rel(&xp_sqrtm_reference(&id, false).unwrap(), &XpMatrix::identity(3)) <= 1e-31);

        let a = DenseMatrix::from_rows(&[[2.0, -1.0], [-1.0, 2.0]]).unwrap();
        let r3 = XpScalar::from_f64(3.0).sqrt().unwrap();
        let half = 0.5;
        let d = (r3 + XpScalar::ONE).mul_f64(half);
        let o = (XpScalar::ONE - r3).mul_f64(half);
        let exact = XpMatrix::from_fn(2, 2, |i, j| if i == j { d } else { o });
        assert!(max_rel(&xp_sqrtm_reference(&a, false).unwrap(), &exact) <= 1e-24);
        assert!(max_rel(&xp_sqrtm_reference_in(&a, false).unwrap(), &exact) <= 1e-24);
        let t = TripletRep::from_full(&a, &[1.0, 1.0]).unwrap();
        assert!(max_rel(&xp_sqrtm_reference_triplet(&t).unwrap(), &exact) <= 1e-24);

        let a = DenseMatrix::from_rows(&[[1.0, -1.0], [-1.0, 1.0]]).unwrap();
        let h = XpScalar::ONE.checked_div(XpScalar::from_f64(2.0).sqrt().unwrap()).unwrap();
        let exact = XpMatrix::from_fn(2, 2, |i, j| if i == j { h } else { -h });
        // The signed route stalls near sqrt(1e-32) on singular input and says so.
        assert!(matches!(xp_sqrtm_reference(&a, true), Err(Error::ReferenceNotConverged { iterations: 200 })));
        let t = TripletRep::from_full(&a, &[1.0, 1.0]).unwrap();
        assert!(max_rel(&xp_sqrtm_reference_triplet(&t).unwrap(), &exact) <= 1e-24);
    }
}
