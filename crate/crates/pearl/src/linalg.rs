//! Small dense linear algebra: just enough for the regressions used here.
//!
//! Systems are tiny (quadratic fits are 3x3, weight regressions are
//! n_p+1 wide with n_p <= 5), so plain Gaussian elimination with partial
//! pivoting on `Vec<Vec<f64>>` is the right tool.

use crate::error::{Error, Result};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Squared Euclidean norm.
pub fn norm_sq(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    norm_sq(a).sqrt()
}

/// Solve `A x = b` in place for a small square system.
pub fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = b.len();
    debug_assert!(a.len() == n && a.iter().all(|r| r.len() == n));
    let scale = a
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0_f64, |m, v| m.max(v.abs()));
    let tol = scale.max(1e-300) * 1e-12;

    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if a[pivot][col].abs() <= tol {
            return Err(Error::SingularRegression { rows: n, cols: n });
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Ok(x)
}

/// Ordinary least squares via normal equations: minimize ||X w - y||^2.
///
/// `rows` yields one design row per sample. Errors if the normal matrix is
/// singular (fewer independent samples than coefficients).
pub fn least_squares(rows: &[Vec<f64>], y: &[f64]) -> Result<Vec<f64>> {
    let m = rows.len();
    if m == 0 || m != y.len() {
        return Err(Error::DimensionMismatch {
            what: "least squares samples",
            expected: m,
            got: y.len(),
        });
    }
    let n = rows[0].len();
    if m < n {
        return Err(Error::SingularRegression { rows: m, cols: n });
    }
    let mut xtx = vec![vec![0.0; n]; n];
    let mut xty = vec![0.0; n];
    for (row, &yi) in rows.iter().zip(y) {
        for i in 0..n {
            xty[i] += row[i] * yi;
            for j in i..n {
                xtx[i][j] += row[i] * row[j];
            }
        }
    }
    for i in 0..n {
        for j in 0..i {
            xtx[i][j] = xtx[j][i];
        }
    }
    solve(xtx, xty).map_err(|_| Error::SingularRegression { rows: m, cols: n })
}

/// Least-squares line fit `y = slope*x + intercept`, returning (slope,
/// intercept, r_squared). Used for scaling-exponent fits on log-log data.
pub fn fit_line(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        sxx += (xi - mx) * (xi - mx);
        sxy += (xi - mx) * (yi - my);
        syy += (yi - my) * (yi - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, intercept, r2)
}
