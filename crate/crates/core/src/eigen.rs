//! Cyclic Jacobi eigensolver for real symmetric matrices.

use crate::error::LinalgError;
use crate::matrix::Matrix;

pub const MAX_SWEEPS: usize = 100;
/// Convergence target for the off-diagonal Frobenius norm, relative to
/// `max(1, ||C||_F)`.
pub const OFF_DIAGONAL_TOLERANCE: f64 = 1e-12;
/// Largest tolerated `|c_ij - c_ji|`, relative to `max(1, ||C||_inf)`.
pub const SYMMETRY_TOLERANCE: f64 = 1e-10;

/// Full spectral decomposition `C = V diag(λ) Vᵀ`.
///
/// Eigenvalues are sorted in non-increasing order and column `i` of
/// `eigenvectors` belongs to `eigenvalues[i]`. Each eigenvector is signed so
/// that its largest-magnitude entry (the first one, on ties) is positive.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Matrix,
    pub sweeps: usize,
}

impl EigenDecomposition {
    pub fn eigenvector(&self, i: usize) -> Vec<f64> {
        self.eigenvectors.column(i)
    }
}

pub fn eigendecompose_symmetric(c: &Matrix) -> Result<EigenDecomposition, LinalgError> {
    let (rows, cols) = c.shape();
    if rows != cols {
        return Err(LinalgError::NotSquare { rows, cols });
    }
    c.check_finite()?;
    let n = rows;
    let sym_tol = SYMMETRY_TOLERANCE * c.norm_inf().max(1.0);
    for i in 0..n {
        for j in i + 1..n {
            let gap = (c[(i, j)] - c[(j, i)]).abs();
            if gap > sym_tol {
                return Err(LinalgError::NotSymmetric {
                    row: i,
                    col: j,
                    gap,
                });
            }
        }
    }

    // work on the exactly symmetrized copy
    let mut a = Matrix::from_fn(n, n, |i, j| 0.5 * (c[(i, j)] + c[(j, i)]));
    let mut v = Matrix::identity(n);
    let target = OFF_DIAGONAL_TOLERANCE * a.norm_frobenius().max(1.0);

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&a);
        if off <= target {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(LinalgError::NoConvergence {
                sweeps,
                residual: off,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    // stable: equal eigenvalues keep the solver's order
    order.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]));
    let eigenvalues = order.iter().map(|&i| a[(i, i)]).collect();
    let mut eigenvectors = Matrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = v.column(src);
        apply_sign_convention(&mut col);
        for (r, x) in col.into_iter().enumerate() {
            eigenvectors[(r, dst)] = x;
        }
    }
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
        sweeps,
    })
}

fn off_diagonal_norm(a: &Matrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    s.sqrt()
}

/// One Jacobi rotation annihilating `a[p][q]`, accumulated into `v`.
fn rotate(a: &mut Matrix, v: &mut Matrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    if apq == 0.0 {
        return;
    }
    let n = a.rows();
    let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        let t = 1.0 / (theta.abs() + (theta * theta + 1.0).sqrt());
        if theta < 0.0 {
            -t
        } else {
            t
        }
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        let new_kp = c * akp - s * akq;
        let new_kq = s * akp + c * akq;
        a[(k, p)] = new_kp;
        a[(p, k)] = new_kp;
        a[(k, q)] = new_kq;
        a[(q, k)] = new_kq;
    }
    a[(p, p)] -= t * apq;
    a[(q, q)] += t * apq;
    a[(p, q)] = 0.0;
    a[(q, p)] = 0.0;

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = c * vkp - s * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
}

/// Flips `x` so that its largest-magnitude entry is positive.
pub(crate) fn apply_sign_convention(x: &mut [f64]) {
    let mut best = 0;
    for (i, xi) in x.iter().enumerate() {
        if xi.abs() > x[best].abs() {
            best = i;
        }
    }
    if x.get(best).is_some_and(|&b| b < 0.0) {
        x.iter_mut().for_each(|e| *e = -*e);
    }
}
