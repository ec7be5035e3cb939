//! Cyclic Jacobi eigensolver for Hermitian complex matrices.
//!
//! Each rotation first removes the phase of the pivot `a_pq`, then applies
//! the classical real Jacobi rotation to the resulting real symmetric 2x2
//! block. Dimensions here are small (tens), where Jacobi is accurate to
//! working precision and needs no external LAPACK.

use num_complex::Complex64 as C64;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-12;
pub const SWEEP_CAP: usize = 100;
/// Input hermiticity tolerance (max-abs of `M - M^dagger`).
pub const HERMITIAN_TOL: f64 = 1e-9;
/// Components below this modulus are skipped when fixing eigenvector phases.
const PHASE_EPS: f64 = 1e-8;

/// Eigenvalues in ascending order with orthonormal eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct EigenSystem {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `V diag(f(lambda)) V^dagger`
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let mapped: Vec<f64> = self.values.iter().map(|&x| f(x)).collect();
        self.reconstruct_from(&mapped)
    }

    /// `V diag(fl) V^dagger` for replacement eigenvalues `fl`.
    pub fn reconstruct_from(&self, fl: &[f64]) -> ComplexMatrix {
        assert_eq!(fl.len(), self.dim());
        let n = self.dim();
        let v = &self.vectors;
        let mut out = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut acc = C64::new(0.0, 0.0);
                for k in 0..n {
                    if fl[k] != 0.0 {
                        acc += v[(i, k)] * v[(j, k)].conj() * fl[k];
                    }
                }
                out[(i, j)] = acc;
                out[(j, i)] = acc.conj();
            }
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_with(|x| x)
    }

    /// `|<i|v_k>|^2`, the overlap of basis vector `i` with eigenvector `k`.
    #[inline]
    pub fn weight(&self, i: usize, k: usize) -> f64 {
        self.vectors[(i, k)].norm_sqr()
    }
}

fn off_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Diagonalizes a Hermitian matrix. Termination requires the off-diagonal
/// Frobenius residual to drop below `tol * max(1, ||M||_F)`.
pub fn hermitian_eig(m: &ComplexMatrix, tol: f64) -> Result<EigenSystem> {
    if !m.is_square() {
        return Err(Error::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    let defect = m.hermitian_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian(defect));
    }
    let n = m.rows();
    let mut a = m.hermitian_part();
    for i in 0..n {
        a[(i, i)].im = 0.0;
    }
    let mut v = ComplexMatrix::identity(n);
    let threshold = tol * a.frobenius_norm().max(1.0);

    let mut converged = false;
    let mut residual = off_norm(&a);
    for _ in 0..SWEEP_CAP {
        if residual <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        residual = off_norm(&a);
    }
    if !converged && residual > threshold {
        return Err(Error::Convergence { sweeps: SWEEP_CAP, residual });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values: Vec<f64> = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        let pivot = (0..n).map(|i| v[(i, src)]).find(|z| z.norm() > PHASE_EPS);
        let phase = pivot.map_or(C64::new(1.0, 0.0), |z| z.conj() / z.norm());
        for i in 0..n {
            vectors[(i, col)] = v[(i, src)] * phase;
        }
    }
    Ok(EigenSystem { values, vectors })
}

fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let h = a[(p, q)];
    let habs = h.norm();
    if habs == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let ph_conj = h.conj() / habs;
    let theta = (aqq - app) / (2.0 * habs);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        let sgn = if theta >= 0.0 { 1.0 } else { -1.0 };
        sgn / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let g_pp = C64::new(c, 0.0);
    let g_pq = C64::new(s, 0.0);
    let g_qp = ph_conj * (-s);
    let g_qq = ph_conj * c;

    let n = a.rows();
    for k in 0..n {
        let ap = a[(k, p)];
        let aq = a[(k, q)];
        a[(k, p)] = ap * g_pp + aq * g_qp;
        a[(k, q)] = ap * g_pq + aq * g_qq;
    }
    for k in 0..n {
        let ap = a[(p, k)];
        let aq = a[(q, k)];
        a[(p, k)] = g_pp.conj() * ap + g_qp.conj() * aq;
        a[(q, k)] = g_pq.conj() * ap + g_qq.conj() * aq;
    }
    a[(p, p)] = C64::new(app - t * habs, 0.0);
    a[(q, q)] = C64::new(aqq + t * habs, 0.0);
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    for k in 0..n {
        let vp = v[(k, p)];
        let vq = v[(k, q)];
        v[(k, p)] = vp * g_pp + vq * g_qp;
        v[(k, q)] = vp * g_pq + vq * g_qq;
    }
}
