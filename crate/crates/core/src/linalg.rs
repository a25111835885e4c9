//! Small linear-algebra helpers: matrix-free conjugate gradients and sparse
//! symmetric assembly on top of `sprs`.

use sprs::{CsMat, TriMat};

/// Outcome of a conjugate-gradient solve.
#[derive(Debug, Clone)]
pub struct CgOutcome {
    pub solution: Vec<f64>,
    pub iterations: usize,
    pub relative_residual: f64,
}

/// Jacobi-preconditioned conjugate gradients for an SPD operator given as a closure.
///
/// Stops at `rel_tol` relative residual or after `max_iter` iterations; the
/// returned iterate is always usable as an approximate solution.
pub fn conjugate_gradient<A>(apply: A, diag: &[f64], rhs: &[f64], rel_tol: f64, max_iter: usize) -> CgOutcome
where
    A: Fn(&[f64], &mut [f64]),
{
    let n = rhs.len();
    let mut x = vec![0.0; n];
    let mut r = rhs.to_vec();
    let rhs_norm = dot(rhs, rhs).sqrt();
    if rhs_norm == 0.0 {
        return CgOutcome { solution: x, iterations: 0, relative_residual: 0.0 };
    }
    let precond = |r: &[f64], z: &mut [f64]| {
        for i in 0..n {
            z[i] = if diag[i] > 0.0 { r[i] / diag[i] } else { r[i] };
        }
    };
    let mut z = vec![0.0; n];
    precond(&r, &mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    let mut iterations = 0;
    let mut rel = 1.0;
    for k in 0..max_iter {
        apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            break;
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        iterations = k + 1;
        rel = dot(&r, &r).sqrt() / rhs_norm;
        if rel < rel_tol {
            break;
        }
        precond(&r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    CgOutcome { solution: x, iterations, relative_residual: rel }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Accumulates symmetric entries as triplets; duplicates are summed on build.
#[derive(Debug, Clone)]
pub struct SymmetricAssembler {
    n: usize,
    rows: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SymmetricAssembler {
    pub fn new(n: usize) -> Self {
        Self { n, rows: Vec::new(), cols: Vec::new(), vals: Vec::new() }
    }

    /// Adds `v` at (i, j) and, when `i != j`, at (j, i).
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        self.rows.push(i);
        self.cols.push(j);
        self.vals.push(v);
        if i != j {
            self.rows.push(j);
            self.cols.push(i);
            self.vals.push(v);
        }
    }

    pub fn add_diagonal(&mut self, i: usize, v: f64) {
        self.add(i, i, v);
    }

    pub fn build(&self) -> CsMat<f64> {
        let mut tri = TriMat::new((self.n, self.n));
        for k in 0..self.vals.len() {
            tri.add_triplet(self.rows[k], self.cols[k], self.vals[k]);
        }
        tri.to_csr()
    }
}

/// `y = A x` for a CSR matrix.
pub fn csr_mul(a: &CsMat<f64>, x: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; a.rows()];
    for (i, row) in a.outer_iterator().enumerate() {
        y[i] = row.iter().map(|(j, v)| v * x[j]).sum();
    }
    y
}

/// Quadratic form `xᵀ A x`.
pub fn quadratic_form(a: &CsMat<f64>, x: &[f64]) -> f64 {
    dot(x, &csr_mul(a, x))
}
