//! Small dense linear algebra for n ≤ 8: Cholesky, symmetric solves,
//! cyclic Jacobi eigen-decomposition and the generalized symmetric problem.

use ndarray::{Array1, Array2};

/// Lower-triangular Cholesky factor `L` with `a = L Lᵀ`, or `None` when a
/// pivot is not strictly positive.
pub fn cholesky(a: &Array2<f64>) -> Option<Array2<f64>> {
    let n = a.nrows();
    let mut l = Array2::<f64>::zeros((n, n));
    for j in 0..n {
        let mut d = a[[j, j]];
        for k in 0..j {
            d -= l[[j, k]] * l[[j, k]];
        }
        if !(d > 0.0) {
            return None;
        }
        let d = d.sqrt();
        l[[j, j]] = d;
        for i in j + 1..n {
            let mut s = a[[i, j]];
            for k in 0..j {
                s -= l[[i, k]] * l[[j, k]];
            }
            l[[i, j]] = s / d;
        }
    }
    Some(l)
}

/// Inverse of a lower-triangular matrix.
pub fn lower_inverse(l: &Array2<f64>) -> Array2<f64> {
    let n = l.nrows();
    let mut inv = Array2::<f64>::zeros((n, n));
    for col in 0..n {
        for i in col..n {
            let mut s = if i == col { 1.0 } else { 0.0 };
            for k in col..i {
                s -= l[[i, k]] * inv[[k, col]];
            }
            inv[[i, col]] = s / l[[i, i]];
        }
    }
    inv
}

/// Inverse of a symmetric positive definite matrix, exactly symmetric.
pub fn spd_inverse(a: &Array2<f64>) -> Option<Array2<f64>> {
    let l = cholesky(a)?;
    let li = lower_inverse(&l);
    let n = a.nrows();
    let mut inv = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        for j in i..n {
            let mut s = 0.0;
            for k in j..n {
                s += li[[k, i]] * li[[k, j]];
            }
            inv[[i, j]] = s;
            inv[[j, i]] = s;
        }
    }
    Some(inv)
}

/// Solve `a x = b` for symmetric positive definite `a`.
pub fn spd_solve(a: &Array2<f64>, b: &[f64]) -> Option<Vec<f64>> {
    let l = cholesky(a)?;
    let n = b.len();
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[[i, k]] * y[k];
        }
        y[i] = s / l[[i, i]];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in i + 1..n {
            s -= l[[k, i]] * x[k];
        }
        x[i] = s / l[[i, i]];
    }
    Some(x)
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn determinant(a: &Array2<f64>) -> f64 {
    let n = a.nrows();
    let mut m = a.clone();
    let mut det = 1.0;
    for c in 0..n {
        let mut p = c;
        for r in c + 1..n {
            if m[[r, c]].abs() > m[[p, c]].abs() {
                p = r;
            }
        }
        if m[[p, c]] == 0.0 {
            return 0.0;
        }
        if p != c {
            for k in 0..n {
                m.swap([p, k], [c, k]);
            }
            det = -det;
        }
        let piv = m[[c, c]];
        det *= piv;
        for r in c + 1..n {
            let f = m[[r, c]] / piv;
            if f != 0.0 {
                for k in c..n {
                    m[[r, k]] -= f * m[[c, k]];
                }
            }
        }
    }
    det
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Eigenvalues ascending; column `k` of the returned matrix is the
/// eigenvector of eigenvalue `k`.
pub fn jacobi_eigen(a: &Array2<f64>) -> (Array1<f64>, Array2<f64>) {
    let n = a.nrows();
    let mut m = a.clone();
    for i in 0..n {
        for j in i + 1..n {
            let s = 0.5 * (m[[i, j]] + m[[j, i]]);
            m[[i, j]] = s;
            m[[j, i]] = s;
        }
    }
    let mut v = Array2::<f64>::eye(n);
    for _sweep in 0..100 {
        let mut off = 0.0;
        let mut scale = 0.0;
        for i in 0..n {
            scale += m[[i, i]] * m[[i, i]];
            for j in i + 1..n {
                off += m[[i, j]] * m[[i, j]];
            }
        }
        if off <= 1e-30 * scale.max(1e-300) || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[[p, q]];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[[q, q]] - m[[p, p]]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[[k, p]];
                    let mkq = m[[k, q]];
                    m[[k, p]] = c * mkp - s * mkq;
                    m[[k, q]] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[[p, k]];
                    let mqk = m[[q, k]];
                    m[[p, k]] = c * mpk - s * mqk;
                    m[[q, k]] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[[k, p]];
                    let vkq = v[[k, q]];
                    v[[k, p]] = c * vkp - s * vkq;
                    v[[k, q]] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| m[[a, a]].total_cmp(&m[[b, b]]));
    let values = Array1::from_iter(order.iter().map(|&k| m[[k, k]]));
    let mut vectors = Array2::<f64>::zeros((n, n));
    for (col, &k) in order.iter().enumerate() {
        for r in 0..n {
            vectors[[r, col]] = v[[r, k]];
        }
    }
    (values, vectors)
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(a: &Array2<f64>) -> f64 {
    let (vals, _) = jacobi_eigen(a);
    vals.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Generalized symmetric problem `h v = κ g v` with `g` positive definite,
/// reduced through the Cholesky factor of `g`. Eigenvectors are
/// g-orthonormal columns; eigenvalues ascending.
pub fn generalized_eigen(h: &Array2<f64>, g: &Array2<f64>) -> Option<(Array1<f64>, Array2<f64>)> {
    let l = cholesky(g)?;
    let li = lower_inverse(&l);
    let reduced = li.dot(h).dot(&li.t());
    let (vals, w) = jacobi_eigen(&reduced);
    let vecs = li.t().dot(&w);
    Some((vals, vecs))
}

/// `L⁻¹ t L⁻ᵀ` where `g = L Lᵀ`: components of a bilinear form in the
/// g-orthonormal frame built from the Cholesky factor.
pub fn to_orthonormal_frame(t: &Array2<f64>, g: &Array2<f64>) -> Option<Array2<f64>> {
    let l = cholesky(g)?;
    let li = lower_inverse(&l);
    Some(li.dot(t).dot(&li.t()))
}

pub fn max_abs(a: &Array2<f64>) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}
