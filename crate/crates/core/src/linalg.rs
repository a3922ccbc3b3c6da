//! Small dense linear-algebra helpers shared by the lattice and gate modules.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::{Error, Result};

pub type IntMatrix = DMatrix<i64>;

/// The `2N × 2N` symplectic form `[[0, I], [-I, 0]]`.
pub fn omega(modes: usize) -> DMatrix<f64> {
    let mut w = DMatrix::zeros(2 * modes, 2 * modes);
    for i in 0..modes {
        w[(i, modes + i)] = 1.0;
        w[(modes + i, i)] = -1.0;
    }
    w
}

pub fn omega_int(modes: usize) -> IntMatrix {
    omega(modes).map(|x| x as i64)
}

pub fn to_f64(m: &IntMatrix) -> DMatrix<f64> {
    m.map(|x| x as f64)
}

/// Round every entry to the nearest integer, failing if any entry is further
/// than `tol` from it.
pub fn round_integral(m: &DMatrix<f64>, tol: f64) -> std::result::Result<IntMatrix, (usize, usize, f64)> {
    let mut out = IntMatrix::zeros(m.nrows(), m.ncols());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let x = m[(i, j)];
            let r = x.round();
            if !x.is_finite() || (x - r).abs() > tol {
                return Err((i, j, x));
            }
            out[(i, j)] = r as i64;
        }
    }
    Ok(out)
}

/// Exact determinant of an integer matrix by fraction-free (Bareiss) elimination.
pub fn int_det(m: &IntMatrix) -> i128 {
    let n = m.nrows();
    assert_eq!(n, m.ncols());
    if n == 0 {
        return 1;
    }
    let mut a: Vec<Vec<i128>> = (0..n).map(|i| (0..n).map(|j| m[(i, j)] as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&r| a[r][k] != 0) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

/// Express the rows of `target` as real combinations of the rows of `basis`
/// (`target = C · basis`) and return `C` when it is integral within `tol`.
pub fn integer_coordinates(basis: &DMatrix<f64>, target: &DMatrix<f64>, tol: f64) -> Result<Option<IntMatrix>> {
    let inv = basis
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Singular("lattice basis".into()))?;
    let c = target * inv;
    Ok(round_integral(&c, tol).ok())
}

/// LLL reduction (δ = 0.99) of the rows of `basis`. Returns the reduced basis and
/// the unimodular `U` with `reduced = U · basis`.
pub fn lll_reduce(basis: &DMatrix<f64>) -> (DMatrix<f64>, IntMatrix) {
    let n = basis.nrows();
    let mut b = basis.clone();
    let mut u = IntMatrix::identity(n, n);
    let delta = 0.99;
    let mut k = 1;
    while k < n {
        for j in (0..k).rev() {
            let (mu, _) = gram_schmidt(&b);
            let q = mu[(k, j)].round();
            if q != 0.0 {
                let bj = b.row(j).clone_owned();
                let mut bk = b.row_mut(k);
                bk -= bj * q;
                let uj = u.row(j).clone_owned();
                let mut uk = u.row_mut(k);
                uk -= uj * (q as i64);
            }
        }
        let (mu, bstar2) = gram_schmidt(&b);
        if bstar2[k] >= (delta - mu[(k, k - 1)].powi(2)) * bstar2[k - 1] {
            k += 1;
        } else {
            b.swap_rows(k, k - 1);
            u.swap_rows(k, k - 1);
            k = (k - 1).max(1);
        }
    }
    (b, u)
}

/// Gram–Schmidt coefficients `mu` (lower triangular, unit diagonal) and the squared
/// norms of the orthogonalised rows.
pub fn gram_schmidt(b: &DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>) {
    let n = b.nrows();
    let mut mu = DMatrix::identity(n, n);
    let mut star: Vec<nalgebra::RowDVector<f64>> = Vec::with_capacity(n);
    let mut norms = Vec::with_capacity(n);
    for i in 0..n {
        let mut v = b.row(i).clone_owned();
        for j in 0..i {
            let m = b.row(i).dot(&star[j]) / norms[j];
            mu[(i, j)] = m;
            v -= &star[j] * m;
        }
        norms.push(v.norm_squared());
        star.push(v);
    }
    (mu, norms)
}

/// Matrix exponential by scaling and squaring with a truncated Taylor series.
/// The series is summed until terms fall below `tol` relative to the partial sum.
pub fn expm_complex(a: &DMatrix<Complex64>, tol: f64) -> DMatrix<Complex64> {
    let n = a.nrows();
    let norm1 = (0..n)
        .map(|j| (0..n).map(|i| a[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let squarings = if norm1 > 0.5 { (norm1 / 0.5).log2().ceil() as u32 } else { 0 };
    let scale = 2f64.powi(squarings as i32);
    let x = a.map(|z| z / scale);
    let mut result = DMatrix::<Complex64>::identity(n, n);
    let mut term = DMatrix::<Complex64>::identity(n, n);
    for k in 1..64 {
        term = &term * &x / Complex64::new(k as f64, 0.0);
        result += &term;
        let tn: f64 = term.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let rn: f64 = result.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if tn <= tol * rn {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}
