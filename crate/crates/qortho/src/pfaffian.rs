//! Pfaffians by skew-symmetric Gaussian elimination with full pivoting,
//! and determinants by LU with partial pivoting, over real or complex
//! scalars.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Field operations needed by the elimination routines.
pub trait Scalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self> + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn modulus(&self) -> f64;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn modulus(&self) -> f64 {
        self.abs()
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn modulus(&self) -> f64 {
        self.norm()
    }
}

/// Dense square matrix stored as rows.
pub type Matrix<T> = Vec<Vec<T>>;

fn max_modulus<T: Scalar>(a: &Matrix<T>) -> f64 {
    a.iter().flat_map(|r| r.iter()).map(|v| v.modulus()).fold(0.0, f64::max)
}

/// Largest `|a_ij + a_ji|`, zero for an exactly skew matrix.
pub fn skew_defect<T: Scalar>(a: &Matrix<T>) -> f64 {
    let n = a.len();
    let mut d: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            d = d.max((a[i][j] + a[j][i]).modulus());
        }
    }
    d
}

fn check_square<T>(a: &Matrix<T>) -> Result<usize> {
    let n = a.len();
    if a.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidParameter("matrix is not square".into()));
    }
    Ok(n)
}

fn swap_index<T: Scalar>(a: &mut Matrix<T>, i: usize, j: usize) {
    if i == j {
        return;
    }
    a.swap(i, j);
    for row in a.iter_mut() {
        row.swap(i, j);
    }
}

/// Pfaffian of a skew-symmetric matrix of even dimension.
///
/// Each step moves the largest remaining entry to position `(k,k+1)`; a
/// symmetric row/column swap flips the sign of the Pfaffian. The trailing
/// block is replaced by its Schur complement, so `Pf(A) = a_{k,k+1}·Pf(S)`.
pub fn pfaffian<T: Scalar>(a: &Matrix<T>) -> Result<T> {
    let n = check_square(a)?;
    if n % 2 == 1 {
        return Err(Error::OddDimension(n));
    }
    let scale = max_modulus(a);
    let defect = skew_defect(a);
    if defect > 1e-12 * scale {
        return Err(Error::NotSkew(defect / scale.max(f64::MIN_POSITIVE)));
    }
    let mut m = a.clone();
    let mut pf = T::one();
    let mut k = 0;
    while k < n {
        let (mut pi, mut pj, mut best) = (k, k + 1, -1.0);
        for i in k..n {
            for j in i + 1..n {
                let v = m[i][j].modulus();
                if v > best {
                    best = v;
                    pi = i;
                    pj = j;
                }
            }
        }
        if best == 0.0 {
            return Ok(T::zero());
        }
        if pi != k {
            swap_index(&mut m, k, pi);
            pf = -pf;
            if pj == k {
                pj = pi;
            }
        }
        if pj != k + 1 {
            swap_index(&mut m, k + 1, pj);
            pf = -pf;
        }
        let piv = m[k][k + 1];
        pf = pf * piv;
        for i in k + 2..n {
            let (aik, aik1) = (m[i][k], m[i][k + 1]);
            for j in k + 2..n {
                let upd = (aik1 * m[k][j] - aik * m[k + 1][j]) / piv;
                m[i][j] = m[i][j] - upd;
            }
        }
        k += 2;
    }
    Ok(pf)
}

/// Determinant by LU with partial pivoting.
pub fn det<T: Scalar>(a: &Matrix<T>) -> Result<T> {
    let n = check_square(a)?;
    let mut m = a.clone();
    let mut d = T::one();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| m[i][k].modulus().total_cmp(&m[j][k].modulus())).unwrap_or(k);
        if m[p][k].modulus() == 0.0 {
            return Ok(T::zero());
        }
        if p != k {
            m.swap(p, k);
            d = -d;
        }
        let piv = m[k][k];
        d = d * piv;
        for i in k + 1..n {
            let f = m[i][k] / piv;
            for j in k + 1..n {
                m[i][j] = m[i][j] - f * m[k][j];
            }
        }
    }
    Ok(d)
}

/// Principal submatrix on the given index list, in that order.
pub fn submatrix<T: Scalar>(a: &Matrix<T>, idx: &[usize]) -> Matrix<T> {
    idx.iter().map(|&i| idx.iter().map(|&j| a[i][j]).collect()).collect()
}

/// `Bᵀ A B`.
pub fn congruence(a: &Matrix<f64>, b: &Matrix<f64>) -> Matrix<f64> {
    let n = a.len();
    let mut ab = vec![vec![0.0; n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] != 0.0 {
                for j in 0..n {
                    ab[i][j] += a[i][k] * b[k][j];
                }
            }
        }
    }
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for k in 0..n {
            for j in 0..n {
                out[i][j] += b[k][i] * ab[k][j];
            }
        }
    }
    out
}
