//! Small dense helpers on row-major `d x d` matrices stored in flat slices.

/// Lower Cholesky factor of a symmetric positive-definite matrix, or `None`
/// when a pivot is not strictly positive.
pub(crate) fn cholesky(a: &[f64], d: usize) -> Option<Vec<f64>> {
    debug_assert_eq!(a.len(), d * d);
    let mut l = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..=i {
            let mut sum = a[i * d + j];
            for k in 0..j {
                sum -= l[i * d + k] * l[j * d + k];
            }
            if i == j {
                if !(sum > 0.0) || !sum.is_finite() {
                    return None;
                }
                l[i * d + i] = sum.sqrt();
            } else {
                l[i * d + j] = sum / l[j * d + j];
            }
        }
    }
    Some(l)
}

/// `sum(log(diag(L)))`, i.e. half the log-determinant of `L L^T`.
pub(crate) fn half_log_det(l: &[f64], d: usize) -> f64 {
    (0..d).map(|i| l[i * d + i].ln()).sum()
}

/// Squared Mahalanobis norm `|L^{-1} x|^2` by forward substitution.
/// `scratch` must hold `d` values.
pub(crate) fn mahalanobis_sq(l: &[f64], d: usize, x: &[f64], scratch: &mut [f64]) -> f64 {
    let mut acc = 0.0;
    for i in 0..d {
        let mut s = x[i];
        let row = &l[i * d..i * d + i];
        for (k, lik) in row.iter().enumerate() {
            s -= lik * scratch[k];
        }
        let y = s / l[i * d + i];
        scratch[i] = y;
        acc += y * y;
    }
    acc
}

/// `L z` for lower-triangular `L`.
pub(crate) fn lower_mul(l: &[f64], d: usize, z: &[f64]) -> Vec<f64> {
    (0..d)
        .map(|i| (0..=i).map(|k| l[i * d + k] * z[k]).sum())
        .collect()
}

/// Projects a symmetric matrix onto `{ S : eigenvalues(S) >= floor }` by
/// clamping its spectrum. This is the maximizer of the Gaussian expected
/// log-likelihood under the eigenvalue constraint.
pub(crate) fn clamp_spectrum(a: &mut [f64], d: usize, floor: f64) {
    // Fast path: S - floor*I positive definite means nothing to clamp.
    let mut shifted = a.to_vec();
    for i in 0..d {
        shifted[i * d + i] -= floor;
    }
    if cholesky(&shifted, d).is_some() {
        return;
    }
    let (values, vecs) = symmetric_eigen(a, d);
    for i in 0..d {
        for j in 0..=i {
            let v: f64 = (0..d)
                .map(|k| vecs[i * d + k] * values[k].max(floor) * vecs[j * d + k])
                .sum();
            a[i * d + j] = v;
            a[j * d + i] = v;
        }
    }
}

/// Eigenvalues and row-major eigenvectors (as columns) of a symmetric
/// matrix, by cyclic Jacobi rotations.
///
/// Jacobi is used rather than a tridiagonal QR solver because it resolves
/// tiny eigenvalues to high relative accuracy even next to huge ones, which
/// the spectrum clamp depends on: covariances here routinely mix a reward
/// axis of variance ~1e3 with parameter axes near the floor.
pub(crate) fn symmetric_eigen(a: &[f64], d: usize) -> (Vec<f64>, Vec<f64>) {
    let mut m = a.to_vec();
    let mut v = vec![0.0; d * d];
    for i in 0..d {
        v[i * d + i] = 1.0;
    }
    for _sweep in 0..64 {
        let mut rotated = false;
        for p in 0..d {
            for q in p + 1..d {
                let apq = m[p * d + q];
                let (app, aqq) = (m[p * d + p], m[q * d + q]);
                if apq == 0.0 || apq.abs() <= f64::EPSILON * (app.abs() * aqq.abs()).sqrt() {
                    m[p * d + q] = 0.0;
                    m[q * d + p] = 0.0;
                    continue;
                }
                rotated = true;
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + theta.hypot(1.0));
                let c = 1.0 / t.hypot(1.0);
                let s = t * c;
                for k in 0..d {
                    let (akp, akq) = (m[k * d + p], m[k * d + q]);
                    m[k * d + p] = c * akp - s * akq;
                    m[k * d + q] = s * akp + c * akq;
                }
                for k in 0..d {
                    let (apk, aqk) = (m[p * d + k], m[q * d + k]);
                    m[p * d + k] = c * apk - s * aqk;
                    m[q * d + k] = s * apk + c * aqk;
                }
                m[p * d + q] = 0.0;
                m[q * d + p] = 0.0;
                for k in 0..d {
                    let (vkp, vkq) = (v[k * d + p], v[k * d + q]);
                    v[k * d + p] = c * vkp - s * vkq;
                    v[k * d + q] = s * vkp + c * vkq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    ((0..d).map(|i| m[i * d + i]).collect(), v)
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(a: &[f64], d: usize) -> f64 {
    symmetric_eigen(a, d)
        .0
        .into_iter()
        .fold(f64::INFINITY, f64::min)
}
