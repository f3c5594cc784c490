//! Spin-1 matrices and the helicity basis that diagonalizes `k̂·s`.
//!
//! With `(s_j)_{ab} = -i ε_{jab}` the matrices satisfy `(k·s) v = i k × v`, so
//! the curl of a plane-wave mode is `k·s` acting on its polarization.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::ComplexVec3;

pub type ComplexMat3 = Matrix3<Complex64>;

/// The three spin-1 matrices `s_x`, `s_y`, `s_z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinTriple {
    pub x: ComplexMat3,
    pub y: ComplexMat3,
    pub z: ComplexMat3,
}

impl SpinTriple {
    pub fn as_array(&self) -> [ComplexMat3; 3] {
        [self.x, self.y, self.z]
    }

    /// `s_x² + s_y² + s_z²`.
    pub fn casimir(&self) -> ComplexMat3 {
        self.x * self.x + self.y * self.y + self.z * self.z
    }
}

pub fn spin_matrices() -> SpinTriple {
    let o = Complex64::ZERO;
    let i = Complex64::I;
    #[rustfmt::skip]
    let triple = SpinTriple {
        x: Matrix3::new(o, o, o,
                        o, o, -i,
                        o, i, o),
        y: Matrix3::new(o, o, i,
                        o, o, o,
                        -i, o, o),
        z: Matrix3::new(o, -i, o,
                        i, o, o,
                        o, o, o),
    };
    triple
}

/// `k_x s_x + k_y s_y + k_z s_z`.
pub fn k_dot_s(k: &Vector3<f64>) -> ComplexMat3 {
    let s = spin_matrices();
    s.x * Complex64::from(k.x) + s.y * Complex64::from(k.y) + s.z * Complex64::from(k.z)
}

/// Orthonormal eigenvectors of `k̂·s` for eigenvalues `+1`, `-1` and `0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HelicityBasis {
    pub plus: ComplexVec3,
    pub minus: ComplexVec3,
    pub zero: ComplexVec3,
}

/// Real orthonormal frame `(u, w, k̂)` with `u × w = k̂`.
///
/// `u` is the coordinate axis least aligned with `k̂` (ties go x, then y, then z)
/// with its `k̂` component removed.
pub(crate) fn transverse_frame(k_unit: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let mut axis = 0;
    for a in 1..3 {
        if k_unit[a].abs() < k_unit[axis].abs() {
            axis = a;
        }
    }
    let mut aux = Vector3::zeros();
    aux[axis] = 1.0;
    let u = (aux - k_unit * k_unit[axis]).normalize();
    let w = k_unit.cross(&u);
    (u, w)
}

/// Helicity basis for a unit wavevector direction.
///
/// `e_± = (u ± i w)/√2` and `e_0 = k̂`, with `(u, w)` from a deterministic
/// auxiliary axis. For `k̂ = ẑ` this gives `e_± = (1, ±i, 0)/√2`.
pub fn helicity_basis(k_unit: &Vector3<f64>) -> Result<HelicityBasis> {
    let norm = k_unit.norm();
    if !((norm - 1.0).abs() <= 1e-12) {
        return Err(Error::Domain(format!("|k̂| = {norm} is not 1 within 1e-12")));
    }
    let (u, w) = transverse_frame(k_unit);
    let s = Complex64::from(FRAC_1_SQRT_2);
    let uc = u.map(Complex64::from);
    let wc = w.map(|x| Complex64::new(0.0, x));
    Ok(HelicityBasis { plus: (uc + wc) * s, minus: (uc - wc) * s, zero: k_unit.map(Complex64::from) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn entries_are_exact() {
        let s = spin_matrices();
        assert_eq!(s.z[(0, 1)], c(0.0, -1.0));
        assert_eq!(s.z[(1, 0)], c(0.0, 1.0));
        assert_eq!(s.x[(1, 2)], c(0.0, -1.0));
        assert_eq!(s.x[(2, 1)], c(0.0, 1.0));
        assert_eq!(s.y[(0, 2)], c(0.0, 1.0));
        assert_eq!(s.y[(2, 0)], c(0.0, -1.0));
    }

    #[test]
    fn casimir_is_two() {
        let s = spin_matrices();
        assert_eq!(s.casimir(), ComplexMat3::identity() * c(2.0, 0.0));
        for m in s.as_array() {
            assert_eq!(m, m.adjoint());
            assert_eq!(m.trace(), Complex64::ZERO);
        }
    }

    #[test]
    fn sz_on_circular_vector() {
        let v = ComplexVec3::new(c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0)) * c(FRAC_1_SQRT_2, 0.0);
        let s = spin_matrices();
        assert!((s.z * v - v).norm() < 1e-16);
        assert!((k_dot_s(&Vector3::z()) * v - v).norm() < 1e-16);
        assert_eq!(k_dot_s(&Vector3::zeros()), ComplexMat3::zeros());
    }

    #[test]
    fn canonical_axes() {
        let b = helicity_basis(&Vector3::z()).unwrap();
        let s = FRAC_1_SQRT_2;
        assert!((b.plus - ComplexVec3::new(c(s, 0.0), c(0.0, s), c(0.0, 0.0))).norm() < 1e-15);
        assert!((b.minus - ComplexVec3::new(c(s, 0.0), c(0.0, -s), c(0.0, 0.0))).norm() < 1e-15);
        assert_eq!(b.zero, ComplexVec3::new(c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)));
        let b = helicity_basis(&Vector3::x()).unwrap();
        assert_eq!(b.zero, ComplexVec3::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)));
    }

    #[test]
    fn rejects_non_unit() {
        assert!(helicity_basis(&Vector3::new(1.0, 1.0, 0.0)).is_err());
        assert!(helicity_basis(&Vector3::zeros()).is_err());
    }
}
