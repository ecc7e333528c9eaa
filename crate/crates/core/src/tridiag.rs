//! Banded elimination for tridiagonal systems.

use alloc::vec::Vec;

use num_complex::Complex64;

/// Failure of [`solve_tridiagonal`] at a numerically zero pivot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroPivot {
    pub row: usize,
    pub magnitude: f64,
}

/// Solves `T x = rhs` for a tridiagonal `T` given by its `lower`, `diag` and
/// `upper` diagonals, using Gaussian elimination with partial (row) pivoting.
///
/// Row interchanges create one extra superdiagonal, as in LAPACK `gtsv`.
pub fn solve_tridiagonal(
    lower: &[Complex64],
    diag: &[Complex64],
    upper: &[Complex64],
    rhs: &[Complex64],
) -> Result<Vec<Complex64>, ZeroPivot> {
    let n = diag.len();
    assert!(lower.len() + 1 == n && upper.len() + 1 == n && rhs.len() == n);
    let zero = Complex64::new(0.0, 0.0);
    let mut d: Vec<Complex64> = diag.to_vec();
    let mut du: Vec<Complex64> = upper.to_vec();
    let mut du2: Vec<Complex64> = alloc::vec![zero; n.saturating_sub(2)];
    let mut dl: Vec<Complex64> = lower.to_vec();
    let mut b: Vec<Complex64> = rhs.to_vec();
    let scale = diag.iter().chain(lower).chain(upper).map(|z| z.norm()).fold(0.0, f64::max);
    let tiny = f64::EPSILON * f64::EPSILON * scale.max(f64::MIN_POSITIVE);

    for i in 0..n - 1 {
        if d[i].l1_norm() >= dl[i].l1_norm() {
            // No interchange.
            if d[i].norm() <= tiny {
                return Err(ZeroPivot { row: i, magnitude: d[i].norm() });
            }
            let fact = dl[i] / d[i];
            dl[i] = fact;
            d[i + 1] -= fact * du[i];
            b[i + 1] = b[i + 1] - fact * b[i];
            if i + 2 < n {
                du2[i] = zero;
            }
        } else {
            // Interchange rows i and i+1.
            let fact = d[i] / dl[i];
            d[i] = dl[i];
            dl[i] = fact;
            let temp = d[i + 1];
            d[i + 1] = du[i] - fact * temp;
            du[i] = temp;
            if i + 2 < n {
                du2[i] = du[i + 1];
                du[i + 1] = -fact * du2[i];
            }
            b.swap(i, i + 1);
            b[i + 1] = b[i + 1] - fact * b[i];
        }
    }
    if d[n - 1].norm() <= tiny {
        return Err(ZeroPivot { row: n - 1, magnitude: d[n - 1].norm() });
    }

    let mut x = b;
    x[n - 1] /= d[n - 1];
    if n > 1 {
        x[n - 2] = (x[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
    }
    for i in (0..n.saturating_sub(2)).rev() {
        x[i] = (x[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
    }
    Ok(x)
}

/// `T x` for a tridiagonal `T`.
pub fn tridiagonal_apply(
    lower: &[Complex64],
    diag: &[Complex64],
    upper: &[Complex64],
    x: &[Complex64],
) -> Vec<Complex64> {
    let n = diag.len();
    (0..n)
        .map(|i| {
            let mut v = diag[i] * x[i];
            if i > 0 {
                v += lower[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                v += upper[i] * x[i + 1];
            }
            v
        })
        .collect()
}
