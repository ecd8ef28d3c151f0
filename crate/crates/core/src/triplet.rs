//! Triplet representations `(P, u, v)` of M-matrices.
//!
//! `P >= 0` holds the magnitudes of the off-diagonal entries of `A`
//! (`p_ij = -a_ij`, `p_ii = 0`), `u > 0` and `v = A u >= 0`. The diagonal of
//! `A` is never stored: it is recovered as `a_ii = (v_i + (P u)_i) / u_i`,
//! which only adds and divides nonnegative numbers.

use crate::baseline;
use crate::error::{dim_mismatch, Error, Result};
use crate::numeric::{ceil_log2, inf_norm, pairwise_sum_by, pairwise_sum_nonneg_by, DenseMatrix};

#[derive(Clone, Debug, PartialEq)]
pub struct TripletRep {
    p: DenseMatrix,
    u: Vec<f64>,
    v: Vec<f64>,
}

impl TripletRep {
    /// Checks the structural invariants (`P >= 0` with zero diagonal,
    /// `u > 0`, `v >= 0`, all finite) and the consistency of `A u = v`.
    pub fn new(p: DenseMatrix, u: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        let t = TripletRep { p, u, v };
        t.validate()?;
        Ok(t)
    }

    /// Skips validation; callers guarantee the invariants by construction.
    pub(crate) fn new_unchecked(p: DenseMatrix, u: Vec<f64>, v: Vec<f64>) -> Self {
        debug_assert!(p.is_square() && p.n_rows() == u.len() && u.len() == v.len());
        TripletRep { p, u, v }
    }

    pub fn n(&self) -> usize {
        self.u.len()
    }

    pub fn p(&self) -> &DenseMatrix {
        &self.p
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }

    pub fn into_parts(self) -> (DenseMatrix, Vec<f64>, Vec<f64>) {
        (self.p, self.u, self.v)
    }

    /// True when `v = 0`, i.e. `A u = 0` and `A` is singular.
    pub fn is_kernel_rep(&self) -> bool {
        self.v.iter().all(|&x| x == 0.0)
    }

    /// Number of strictly positive entries of `P`.
    pub fn nnz(&self) -> usize {
        self.p.as_slice().iter().filter(|&&x| x > 0.0).count()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.u.len();
        if !self.p.is_square() || self.p.n_rows() != n {
            return Err(dim_mismatch(
                "triplet",
                format!("{n}x{n} P"),
                format!("{}x{} P", self.p.n_rows(), self.p.n_cols()),
            ));
        }
        if self.v.len() != n {
            return Err(dim_mismatch("triplet", format!("v of length {n}"), self.v.len()));
        }
        for i in 0..n {
            for j in 0..n {
                let x = self.p[(i, j)];
                if !x.is_finite() {
                    return Err(Error::NonFinite { index: i * n + j, value: x });
                }
                if i == j && x != 0.0 {
                    return Err(Error::InvalidTriplet(format!(
                        "diagonal entry P[{i},{i}] = {x} must be zero"
                    )));
                }
                if x < 0.0 {
                    return Err(Error::InvalidTriplet(format!("P[{i},{j}] = {x} is negative")));
                }
            }
        }
        for (index, &value) in self.u.iter().enumerate() {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::NonPositiveU { index, value });
            }
        }
        for (i, &x) in self.v.iter().enumerate() {
            if !(x >= 0.0) || !x.is_finite() {
                return Err(Error::InvalidTriplet(format!("v[{i}] = {x} must be nonnegative")));
            }
        }

        // A u = v by construction of the diagonal; check it survives rounding.
        let a = self.reconstruct();
        let tol = consistency_tol(n);
        for i in 0..n {
            let row = a.row(i);
            let r = pairwise_sum_by(n, |k| row[k] * self.u[k]);
            let scale = pairwise_sum_by(n, |k| (row[k] * self.u[k]).abs());
            if (r - self.v[i]).abs() > tol * scale {
                return Err(Error::InvalidTriplet(format!(
                    "A u differs from v in row {i}: {r} vs {}",
                    self.v[i]
                )));
            }
        }
        Ok(())
    }

    /// Builds the triplet of a Z-matrix `A` from a positive vector `u`,
    /// setting `v = A u`. Slightly negative components of `A u` that are
    /// explained by rounding are clamped to zero.
    pub fn from_full(a: &DenseMatrix, u: &[f64]) -> Result<Self> {
        let n = u.len();
        if !a.is_square() || a.n_rows() != n {
            return Err(dim_mismatch(
                "from_full",
                format!("{n}x{n}"),
                format!("{}x{}", a.n_rows(), a.n_cols()),
            ));
        }
        check_z_matrix(a)?;
        for (index, &value) in u.iter().enumerate() {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::NonPositiveU { index, value });
            }
        }
        let p = DenseMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { -a[(i, j)] + 0.0 });
        let tol = consistency_tol(n);
        let mut v = Vec::with_capacity(n);
        for i in 0..n {
            let row = a.row(i);
            let vi = pairwise_sum_by(n, |k| row[k] * u[k]);
            if vi < 0.0 {
                let tolerance = tol * pairwise_sum_by(n, |k| (row[k] * u[k]).abs());
                if vi < -tolerance {
                    return Err(Error::NegativeV { index: i, value: vi, tolerance });
                }
                v.push(0.0);
            } else {
                v.push(vi);
            }
        }
        Ok(TripletRep { p, u: u.to_vec(), v })
    }

    /// `y = P u`.
    pub fn pu(&self) -> Vec<f64> {
        let n = self.n();
        (0..n)
            .map(|i| {
                let r = self.p.row(i);
                pairwise_sum_nonneg_by(n, |k| r[k] * self.u[k])
            })
            .collect()
    }

    /// Diagonal of the represented matrix, `a_ii = (v_i + y_i) / u_i`.
    pub fn diag(&self) -> Vec<f64> {
        diag_from_parts(&self.p, &self.u, &self.v)
    }

    /// The represented matrix `A`.
    pub fn reconstruct(&self) -> DenseMatrix {
        let d = self.diag();
        let n = self.n();
        DenseMatrix::from_fn(n, n, |i, j| if i == j { d[i] } else { -self.p[(i, j)] + 0.0 })
    }

    /// Triplet of `A / s`: `(P / s, u, v / s)`.
    pub fn scale(&self, s: f64) -> Result<Self> {
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::InvalidScale(s));
        }
        Ok(TripletRep {
            p: self.p.map(|x| x / s),
            u: self.u.clone(),
            v: self.v.iter().map(|x| x / s).collect(),
        })
    }
}

/// `d_i = (v_i + (P u)_i) / u_i` evaluated as one sign-pure binary-tree sum
/// over `[v_i, p_i1 u_1, ..., p_in u_n]` and a single division.
pub(crate) fn diag_from_parts(p: &DenseMatrix, u: &[f64], v: &[f64]) -> Vec<f64> {
    let n = u.len();
    (0..n)
        .map(|i| {
            let r = p.row(i);
            let num = pairwise_sum_nonneg_by(n + 1, |k| if k == 0 { v[i] } else { r[k - 1] * u[k - 1] });
            num / u[i]
        })
        .collect()
}

fn consistency_tol(n: usize) -> f64 {
    (n as f64) * f64::from(ceil_log2(n).max(1)) * f64::EPSILON
}

pub(crate) fn check_z_matrix(a: &DenseMatrix) -> Result<()> {
    for i in 0..a.n_rows() {
        for j in 0..a.n_cols() {
            if i != j && a[(i, j)] > 0.0 {
                return Err(Error::NotZMatrix { row: i, col: j, value: a[(i, j)] });
            }
        }
    }
    Ok(())
}

/// Block upper-triangular permutation with irreducible diagonal blocks.
///
/// Block `k` holds `permutation[block_boundaries[k]..block_boundaries[k+1]]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrobeniusForm {
    pub permutation: Vec<usize>,
    pub block_boundaries: Vec<usize>,
    pub block_singular: Vec<bool>,
}

impl FrobeniusForm {
    pub fn n_blocks(&self) -> usize {
        self.block_singular.len()
    }

    pub fn block(&self, k: usize) -> &[usize] {
        &self.permutation[self.block_boundaries[k]..self.block_boundaries[k + 1]]
    }

    /// Block index of every original row/column.
    pub fn block_of(&self) -> Vec<usize> {
        let mut out = vec![0; self.permutation.len()];
        for k in 0..self.n_blocks() {
            for &i in self.block(k) {
                out[i] = k;
            }
        }
        out
    }
}

/// Strongly connected components of the digraph with an edge `i -> j` for
/// every nonzero off-diagonal `a_ij`, listed sources first.
pub fn frobenius_form(a: &DenseMatrix) -> Result<FrobeniusForm> {
    if !a.is_square() {
        return Err(dim_mismatch("frobenius_form", "square matrix", format!("{}x{}", a.n_rows(), a.n_cols())));
    }
    let n = a.n_rows();
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| j != i && a[(i, j)] != 0.0).collect())
        .collect();
    // Tarjan emits components sinks first.
    let mut comps = tarjan_scc(&adj);
    comps.reverse();

    let mut permutation = Vec::with_capacity(n);
    let mut block_boundaries = vec![0];
    let mut block_singular = Vec::with_capacity(comps.len());
    for mut c in comps {
        c.sort_unstable();
        let m = c.len();
        let block = DenseMatrix::from_fn(m, m, |i, j| a[(c[i], c[j])]);
        block_singular.push(block_is_singular(&block));
        permutation.extend_from_slice(&c);
        block_boundaries.push(permutation.len());
    }
    Ok(FrobeniusForm { permutation, block_boundaries, block_singular })
}

/// Smallest partially-pivoted LU pivot against `m * eps * ||block||_inf`.
fn block_is_singular(block: &DenseMatrix) -> bool {
    let m = block.n_rows();
    let threshold = m as f64 * f64::EPSILON * inf_norm(block);
    let pivots = baseline::lu_piv_pivots(block);
    pivots.iter().any(|p| p.abs() <= threshold)
}

/// Iterative Tarjan: explicit call stack so deep graphs do not overflow.
pub(crate) fn tarjan_scc(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    const UNVISITED: usize = usize::MAX;
    let n = adj.len();
    let mut index = vec![UNVISITED; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comps = Vec::new();
    let mut next = 0;
    // (node, position in its adjacency list)
    let mut call: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != UNVISITED {
            continue;
        }
        call.push((root, 0));
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if *pos < adj[v].len() {
                let w = adj[v][*pos];
                *pos += 1;
                if index[w] == UNVISITED {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comps.push(comp);
                }
            }
        }
    }
    comps
}

/// Whether the M-matrix `A` admits a triplet representation: every singular
/// diagonal block of its Frobenius form must have zero off-diagonal blocks in
/// its block row.
pub fn has_triplet(a: &DenseMatrix) -> Result<bool> {
    check_z_matrix(a)?;
    let ff = frobenius_form(a)?;
    let block_of = ff.block_of();
    let n = a.n_rows();
    for k in 0..ff.n_blocks() {
        if !ff.block_singular[k] {
            continue;
        }
        for &i in ff.block(k) {
            if (0..n).any(|j| block_of[j] != k && a[(i, j)] != 0.0) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testgen;

    fn m(rows: &[&[f64]]) -> DenseMatrix {
        DenseMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn from_full_examples() {
        let t = TripletRep::from_full(&m(&[&[1.0, -1.0], &[0.0, 0.0]]), &[1.0, 1.0]).unwrap();
        assert_eq!(t.p(), &m(&[&[0.0, 1.0], &[0.0, 0.0]]));
        assert_eq!(t.v(), &[0.0, 0.0]);

        let t = TripletRep::from_full(&DenseMatrix::identity(3), &[1.0; 3]).unwrap();
        assert_eq!(t.p(), &DenseMatrix::zeros(3, 3));
        assert_eq!(t.v(), &[1.0; 3]);

        let t = TripletRep::from_full(&m(&[&[2.0, -1.0], &[-1.0, 2.0]]), &[1.0, 1.0]).unwrap();
        assert_eq!(t.p(), &m(&[&[0.0, 1.0], &[1.0, 0.0]]));
        assert_eq!(t.v(), &[1.0, 1.0]);
    }

    #[test]
    fn from_full_errors() {
        assert!(matches!(
            TripletRep::from_full(&m(&[&[1.0, 0.5], &[0.0, 1.0]]), &[1.0, 1.0]),
            Err(Error::NotZMatrix { row: 0, col: 1, .. })
        ));
        assert!(matches!(
            TripletRep::from_full(&DenseMatrix::identity(2), &[1.0, 0.0]),
            Err(Error::NonPositiveU { index: 1, .. })
        ));
        assert!(matches!(
            TripletRep::from_full(&m(&[&[1.0, -2.0], &[0.0, 1.0]]), &[1.0, 1.0]),
            Err(Error::NegativeV { index: 0, .. })
        ));
    }

    #[test]
    fn from_full_clamps_rounding_negatives() {
        // 0.1 + 0.2 - 0.3 rounds to a tiny positive; flipping gives tiny negative.
        let a = m(&[&[0.3, -0.1, -0.2], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]]);
        let t = TripletRep::from_full(&a, &[1.0; 3]).unwrap();
        assert!(t.v()[0] >= 0.0 && t.v()[0] < 1e-15);
    }

    #[test]
    fn reconstruct_examples() {
        let t = TripletRep::new(m(&[&[0.0, 1.0], &[0.0, 0.0]]), vec![1.0, 1.0], vec![0.0, 0.0]).unwrap();
        assert_eq!(t.pu(), vec![1.0, 0.0]);
        assert_eq!(t.reconstruct(), m(&[&[1.0, -1.0], &[0.0, 0.0]]));

        let t = TripletRep::new(DenseMatrix::zeros(3, 3), vec![0.5, 2.0, 7.0], vec![0.0; 3]).unwrap();
        assert_eq!(t.reconstruct(), DenseMatrix::zeros(3, 3));

        let t = TripletRep::new(m(&[&[0.0, 1.0], &[1.0, 0.0]]), vec![1.0, 1.0], vec![1.0, 1.0]).unwrap();
        assert_eq!(t.reconstruct(), m(&[&[2.0, -1.0], &[-1.0, 2.0]]));
    }

    #[test]
    fn new_rejects_invalid() {
        assert!(TripletRep::new(m(&[&[1.0, 0.0], &[0.0, 0.0]]), vec![1.0; 2], vec![0.0; 2]).is_err());
        assert!(TripletRep::new(m(&[&[0.0, -1.0], &[0.0, 0.0]]), vec![1.0; 2], vec![0.0; 2]).is_err());
        assert!(TripletRep::new(DenseMatrix::zeros(2, 2), vec![1.0, -1.0], vec![0.0; 2]).is_err());
        assert!(TripletRep::new(DenseMatrix::zeros(2, 2), vec![1.0; 2], vec![0.0, -1.0]).is_err());
        assert!(TripletRep::new(DenseMatrix::zeros(2, 2), vec![1.0; 3], vec![0.0; 2]).is_err());
    }

    #[test]
    fn scale_examples() {
        let t = TripletRep::new(m(&[&[0.0, 1.0], &[1.0, 0.0]]), vec![1.0, 1.0], vec![1.0, 1.0]).unwrap();
        assert_eq!(t.scale(1.0).unwrap(), t);
        let s = t.scale(4.0).unwrap();
        assert_eq!(s.p(), &m(&[&[0.0, 0.25], &[0.25, 0.0]]));
        assert_eq!(s.v(), &[0.25, 0.25]);
        assert!(matches!(t.scale(0.0), Err(Error::InvalidScale(_))));
        assert!(t.scale(-2.0).is_err());

        let t1 = testgen::gen_test1(10);
        let a = t1.reconstruct();
        let a8 = t1.scale(8.0).unwrap().reconstruct();
        assert_eq!(a8, a.scaled(1.0 / 8.0));
    }

    #[test]
    fn frobenius_examples() {
        let ff = frobenius_form(&testgen::gen_test1(10).reconstruct()).unwrap();
        assert_eq!(ff.n_blocks(), 1);
        assert_eq!(ff.block_singular, vec![true]);

        let ff = frobenius_form(&m(&[&[1.0, -1.0], &[0.0, 0.0]])).unwrap();
        assert_eq!(ff.n_blocks(), 2);
        assert_eq!(ff.permutation, vec![0, 1]);
        assert_eq!(ff.block_singular, vec![false, true]);

        let ff = frobenius_form(&DenseMatrix::identity(4)).unwrap();
        assert_eq!(ff.n_blocks(), 4);
        assert!(ff.block_singular.iter().all(|&s| !s));
    }

    #[test]
    fn frobenius_is_block_upper_triangular() {
        // 0 -> 1 -> 2 -> 0 cycle feeding 3 <-> 4, plus isolated 5 feeding 0.
        let mut a = DenseMatrix::identity(6).scaled(3.0);
        for &(i, j) in &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 3), (5, 0)] {
            a[(i, j)] = -1.0;
        }
        let ff = frobenius_form(&a).unwrap();
        assert_eq!(ff.n_blocks(), 3);
        let block_of = ff.block_of();
        for i in 0..6 {
            for j in 0..6 {
                if a[(i, j)] != 0.0 {
                    assert!(block_of[i] <= block_of[j], "entry ({i},{j}) below the block diagonal");
                }
            }
        }
    }

    #[test]
    fn tarjan_handles_long_paths() {
        let n = 20_000;
        let adj: Vec<Vec<usize>> = (0..n).map(|i| if i + 1 < n { vec![i + 1] } else { vec![0] }).collect();
        assert_eq!(tarjan_scc(&adj).len(), 1);
        let adj: Vec<Vec<usize>> = (0..n).map(|i| if i + 1 < n { vec![i + 1] } else { vec![] }).collect();
        assert_eq!(tarjan_scc(&adj).len(), n);
    }

    #[test]
    fn has_triplet_examples() {
        assert!(has_triplet(&m(&[&[1.0, -1.0], &[0.0, 0.0]])).unwrap());
        assert!(!has_triplet(&m(&[&[1.0, 0.0], &[-1.0, 0.0]])).unwrap());
        assert!(has_triplet(&DenseMatrix::identity(3)).unwrap());
        assert!(has_triplet(&m(&[&[1.0, 1.0], &[0.0, 1.0]])).is_err());
    }
}
