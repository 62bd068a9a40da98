//! Quaternions with complex coefficients, their 2×2 matrix representation,
//! and quaternion determinants of self-dual matrices.

use crate::error::{Error, Result};
use crate::pfaffian::{pfaffian, Matrix};
use num_complex::Complex64;
use std::ops::{Add, Mul, Neg, Sub};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `a0·1 + a1·e1 + a2·e2 + a3·e3` with `e1 = iσ_z`, `e2 = iσ_y`, `e3 = iσ_x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quaternion {
    pub a0: Complex64,
    pub a1: Complex64,
    pub a2: Complex64,
    pub a3: Complex64,
}

impl Quaternion {
    pub fn new(a0: Complex64, a1: Complex64, a2: Complex64, a3: Complex64) -> Self {
        Quaternion { a0, a1, a2, a3 }
    }

    pub fn real(a0: f64, a1: f64, a2: f64, a3: f64) -> Self {
        Self::new(a0.into(), a1.into(), a2.into(), a3.into())
    }

    pub fn scalar(a: f64) -> Self {
        Self::real(a, 0.0, 0.0, 0.0)
    }

    pub fn zero() -> Self {
        Self::scalar(0.0)
    }

    /// `[[u, v], [w, z]] = [[a0 + i a1, a2 + i a3], [−a2 + i a3, a0 − i a1]]`.
    pub fn to_matrix(&self) -> [[Complex64; 2]; 2] {
        [[self.a0 + I * self.a1, self.a2 + I * self.a3], [-self.a2 + I * self.a3, self.a0 - I * self.a1]]
    }

    /// Inverse of [`to_matrix`](Self::to_matrix); every complex 2×2 matrix is representable.
    pub fn from_matrix(m: [[Complex64; 2]; 2]) -> Self {
        let [[u, v], [w, z]] = m;
        Quaternion { a0: (u + z) / 2.0, a1: (u - z) / (2.0 * I), a2: (v - w) / 2.0, a3: (v + w) / (2.0 * I) }
    }

    /// From a real block `[[u, v], [w, z]]`.
    pub fn from_real_block(u: f64, v: f64, w: f64, z: f64) -> Self {
        Self::from_matrix([[u.into(), v.into()], [w.into(), z.into()]])
    }

    pub fn dual(&self) -> Self {
        Quaternion { a0: self.a0, a1: -self.a1, a2: -self.a2, a3: -self.a3 }
    }

    /// `q·dual(q) = a0² + a1² + a2² + a3²`, a scalar quaternion.
    pub fn norm_sqr(&self) -> Complex64 {
        self.a0 * self.a0 + self.a1 * self.a1 + self.a2 * self.a2 + self.a3 * self.a3
    }

    /// Scalar part, `½ tr` of the matrix representation.
    pub fn scalar_part(&self) -> Complex64 {
        self.a0
    }

    pub fn max_abs(&self) -> f64 {
        [self.a0, self.a1, self.a2, self.a3].iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

impl Add for Quaternion {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Quaternion { a0: self.a0 + o.a0, a1: self.a1 + o.a1, a2: self.a2 + o.a2, a3: self.a3 + o.a3 }
    }
}

impl Sub for Quaternion {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Neg for Quaternion {
    type Output = Self;
    fn neg(self) -> Self {
        Quaternion { a0: -self.a0, a1: -self.a1, a2: -self.a2, a3: -self.a3 }
    }
}

impl Mul for Quaternion {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let (a, b) = (self.to_matrix(), o.to_matrix());
        let mut c = [[Complex64::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Quaternion::from_matrix(c)
    }
}

/// Largest `|M_ij − dual(M_ji)|` relative to the largest entry.
pub fn self_dual_defect(m: &[Vec<Quaternion>]) -> f64 {
    let n = m.len();
    let scale = m.iter().flatten().map(|q| q.max_abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut d: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            d = d.max((m[i][j] - m[j][i].dual()).max_abs());
        }
    }
    d / scale
}

pub(crate) fn require_self_dual(m: &[Vec<Quaternion>]) -> Result<()> {
    if m.iter().any(|r| r.len() != m.len()) {
        return Err(Error::InvalidParameter("quaternion matrix is not square".into()));
    }
    let d = self_dual_defect(m);
    if d > 1e-12 {
        return Err(Error::NotSelfDual(d));
    }
    Ok(())
}

/// `Q̂ Z`: each block `[[u,v],[w,z]]` becomes `[[−v, u], [−z, w]]`.
/// Skew-symmetric exactly when `Q` is self-dual.
pub fn expand_z(m: &[Vec<Quaternion>]) -> Matrix<Complex64> {
    let n = m.len();
    let mut out = vec![vec![Complex64::new(0.0, 0.0); 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            let [[u, v], [w, z]] = m[i][j].to_matrix();
            out[2 * i][2 * j] = -v;
            out[2 * i][2 * j + 1] = u;
            out[2 * i + 1][2 * j] = -z;
            out[2 * i + 1][2 * j + 1] = w;
        }
    }
    out
}

/// `qdet Q = Pf(Q̂ Z)` with `Z = ⊕[[0,1],[−1,0]]`, normalised so that
/// `qdet(a·𝟏) = a`.
pub fn qdet(m: &[Vec<Quaternion>]) -> Result<Complex64> {
    require_self_dual(m)?;
    pfaffian(&expand_z(m))
}
