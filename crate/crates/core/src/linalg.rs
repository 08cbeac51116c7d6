//! Small dense helpers on top of `nalgebra` that the samplers and the mode
//! finder share.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Lower Cholesky factor. On failure reports the 1-based order of the first
/// leading minor that is not positive.
pub fn cholesky(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let p = a.nrows();
    if a.ncols() != p {
        return Err(Error::DimensionMismatch(format!(
            "cholesky of a {}x{} matrix",
            p,
            a.ncols()
        )));
    }
    let mut l = DMatrix::zeros(p, p);
    for j in 0..p {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::NotPositiveDefinite { minor: j + 1 });
        }
        let djj = d.sqrt();
        l[(j, j)] = djj;
        for i in (j + 1)..p {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / djj;
        }
    }
    Ok(l)
}

/// Solves `L x = b` in place for lower-triangular `L`.
pub fn forward_solve(l: &DMatrix<f64>, b: &mut [f64]) {
    let p = l.nrows();
    for i in 0..p {
        let mut s = b[i];
        for k in 0..i {
            s -= l[(i, k)] * b[k];
        }
        b[i] = s / l[(i, i)];
    }
}

/// Solves `Lᵀ x = b` in place for lower-triangular `L`.
pub fn backward_solve_transpose(l: &DMatrix<f64>, b: &mut [f64]) {
    let p = l.nrows();
    for i in (0..p).rev() {
        let mut s = b[i];
        for k in (i + 1)..p {
            s -= l[(k, i)] * b[k];
        }
        b[i] = s / l[(i, i)];
    }
}

/// Solves `A x = b` given the Cholesky factor of `A`.
pub fn cholesky_solve(l: &DMatrix<f64>, b: &[f64]) -> Vec<f64> {
    let mut x = b.to_vec();
    forward_solve(l, &mut x);
    backward_solve_transpose(l, &mut x);
    x
}

/// Inverse of an SPD matrix.
pub fn spd_inverse(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let l = cholesky(a)?;
    let p = a.nrows();
    let mut inv = DMatrix::zeros(p, p);
    let mut e = vec![0.0; p];
    for j in 0..p {
        e.iter_mut().for_each(|v| *v = 0.0);
        e[j] = 1.0;
        let col = cholesky_solve(&l, &e);
        for i in 0..p {
            inv[(i, j)] = col[i];
        }
    }
    Ok(inv)
}

/// `log det A` from its Cholesky factor.
pub fn log_det_from_cholesky(l: &DMatrix<f64>) -> f64 {
    2.0 * l.diagonal().iter().map(|d| d.ln()).sum::<f64>()
}

pub fn quad_form(a: &DMatrix<f64>, v: &[f64]) -> f64 {
    let v = DVector::from_column_slice(v);
    v.dot(&(a * &v))
}
