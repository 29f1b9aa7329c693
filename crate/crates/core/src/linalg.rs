//! Small dense linear-algebra helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative diagonal jitter used when deciding positive semidefiniteness.
pub const PSD_JITTER: f64 = 1e-10;

/// Largest condition number accepted before inverting a covariance matrix.
pub const MAX_CONDITION: f64 = 1e12;

pub fn check_symmetric(m: &DMatrix<f64>) -> Result<()> {
    if !m.is_square() {
        return Err(Error::Dimension { expected: m.nrows(), got: m.ncols() });
    }
    for r in 0..m.nrows() {
        for c in (r + 1)..m.ncols() {
            if m[(r, c)] != m[(c, r)] {
                return Err(Error::NotSymmetric { row: r, col: c });
            }
        }
    }
    Ok(())
}

/// Lower-triangular `L` with `L Lᵀ = A` for a symmetric PSD matrix.
///
/// Pivots below `PSD_JITTER * max|A_kk|` are treated as zero and their
/// column is dropped, so exactly singular directions stay exactly zero.
pub fn psd_factor(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    check_symmetric(a)?;
    let n = a.nrows();
    let scale = (0..n).map(|k| a[(k, k)].abs()).fold(0.0, f64::max);
    let tol = PSD_JITTER * scale;
    let mut l = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if d > tol {
            let pivot = d.sqrt();
            l[(j, j)] = pivot;
            for i in (j + 1)..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / pivot;
            }
        } else if d < -tol {
            return Err(Error::NotPsd);
        } else {
            // zero pivot: by Cauchy-Schwarz the rest of the column must be
            // at most sqrt(tol * scale) for a PSD input
            let bound = 10.0 * (tol * scale).sqrt();
            for i in (j + 1)..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                if s.abs() > bound {
                    return Err(Error::NotPsd);
                }
            }
        }
    }
    Ok(l)
}

pub fn check_psd(a: &DMatrix<f64>) -> Result<()> {
    psd_factor(a).map(|_| ())
}

/// Inverse and determinant of a symmetric positive definite matrix,
/// rejecting anything with condition number above [`MAX_CONDITION`].
pub fn spd_inverse(a: &DMatrix<f64>) -> Result<(DMatrix<f64>, f64)> {
    check_symmetric(a)?;
    let eig = a.clone().symmetric_eigen();
    let max = eig.eigenvalues.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(min > 0.0) || max / min > MAX_CONDITION {
        let condition = if min > 0.0 { max / min } else { f64::INFINITY };
        return Err(Error::Singular { condition });
    }
    let det: f64 = eig.eigenvalues.iter().product();
    let inv_diag = DMatrix::from_diagonal(&eig.eigenvalues.map(|v| 1.0 / v));
    let inv = &eig.eigenvectors * inv_diag * eig.eigenvectors.transpose();
    Ok((inv, det))
}

/// `x M yᵀ` for row vectors `x`, `y`.
pub fn bilinear(x: &[f64], m: &DMatrix<f64>, y: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (r, xr) in x.iter().enumerate() {
        if *xr == 0.0 {
            continue;
        }
        for (c, yc) in y.iter().enumerate() {
            acc += xr * m[(r, c)] * yc;
        }
    }
    acc
}

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub fn norm(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

/// `out += L z` for lower-triangular `L`.
pub fn add_lower_mul(out: &mut [f64], l: &DMatrix<f64>, z: &[f64], scale: f64) {
    let n = z.len();
    for i in 0..n {
        let mut s = 0.0;
        for k in 0..=i {
            s += l[(i, k)] * z[k];
        }
        out[i] += scale * s;
    }
}

pub fn submatrix(m: &DMatrix<f64>, idx: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(idx.len(), idx.len(), |r, c| m[(idx[r], idx[c])])
}

pub fn to_dvector(x: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(x)
}
