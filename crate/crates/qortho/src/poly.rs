//! Dense real polynomials in the monomial basis.

use std::ops::{Add, Mul, Sub};

/// Coefficients `c[i]` of `xⁱ`, lowest degree first. Trailing zeros are
/// trimmed, so `deg` is the index of the last stored coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct PolySeries {
    coeffs: Vec<f64>,
}

impl PolySeries {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && *coeffs.last().unwrap() == 0.0 {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        PolySeries { coeffs }
    }

    pub fn zero() -> Self {
        PolySeries { coeffs: vec![0.0] }
    }

    pub fn one() -> Self {
        PolySeries { coeffs: vec![1.0] }
    }

    pub fn monomial(n: usize) -> Self {
        let mut c = vec![0.0; n + 1];
        c[n] = 1.0;
        PolySeries { coeffs: c }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> f64 {
        self.coeffs.get(i).copied().unwrap_or(0.0)
    }

    pub fn deg(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_monic(&self) -> bool {
        *self.coeffs.last().unwrap() == 1.0
    }

    /// Horner evaluation; the only evaluation path.
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn scale(&self, s: f64) -> Self {
        PolySeries::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Multiplication by `x`.
    pub fn shift(&self) -> Self {
        let mut c = Vec::with_capacity(self.coeffs.len() + 1);
        c.push(0.0);
        c.extend_from_slice(&self.coeffs);
        PolySeries::new(c)
    }

    /// `self + s·other`.
    pub fn axpy(&self, s: f64, other: &PolySeries) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        PolySeries::new((0..n).map(|i| self.coeff(i) + s * other.coeff(i)).collect())
    }

    /// Forces the leading coefficient to exactly 1.
    pub fn into_monic(mut self) -> Self {
        let last = self.coeffs.len() - 1;
        self.coeffs[last] = 1.0;
        self
    }

    /// Largest coefficient difference, each scaled by `max(1, |c_i|)`.
    pub fn scaled_distance(&self, other: &PolySeries) -> f64 {
        let n = self.coeffs.len().max(other.coeffs.len());
        (0..n)
            .map(|i| {
                let (a, b) = (self.coeff(i), other.coeff(i));
                (a - b).abs() / 1f64.max(a.abs()).max(b.abs())
            })
            .fold(0.0, f64::max)
    }
}

impl Add for &PolySeries {
    type Output = PolySeries;
    fn add(self, rhs: &PolySeries) -> PolySeries {
        self.axpy(1.0, rhs)
    }
}

impl Sub for &PolySeries {
    type Output = PolySeries;
    fn sub(self, rhs: &PolySeries) -> PolySeries {
        self.axpy(-1.0, rhs)
    }
}

impl Mul for &PolySeries {
    type Output = PolySeries;
    fn mul(self, rhs: &PolySeries) -> PolySeries {
        let mut c = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        PolySeries::new(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn horner_and_arithmetic() {
        let p = PolySeries::new(vec![1.0, -2.0, 1.0]);
        assert_eq!(p.eval(3.0), 4.0);
        assert_eq!(p.deg(), 2);
        assert!(p.is_monic());
        let q = &p * &PolySeries::new(vec![1.0, 1.0]);
        assert_eq!(q.coeffs(), &[1.0, -1.0, -1.0, 1.0]);
        assert_eq!((&q - &q).deg(), 0);
        assert_eq!(p.shift().coeffs(), &[0.0, 1.0, -2.0, 1.0]);
    }
}
