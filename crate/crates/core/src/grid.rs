//! Periodic rectangular grids and their reciprocal modes.
//!
//! Points are stored x-fastest, z-slowest. Real-space samples sit at cell
//! centres `r = (j + ½)·Δ` so that a uniform field has its centroid exactly at
//! the box centre. Reciprocal modes use the symmetric alias-free range; on
//! even-sized axes the Nyquist mode carries the signed value `-n/2`.

use std::f64::consts::PI;

use nalgebra::Vector3;

use crate::error::{Error, Result};

/// A periodic box sampled on `nx × ny × nz` points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    dims: [usize; 3],
    lengths: [f64; 3],
}

impl Grid {
    pub fn new(dims: [usize; 3], lengths: [f64; 3]) -> Result<Self> {
        if dims.contains(&0) {
            return Err(Error::Domain(format!("grid extents must be >= 1, got {dims:?}")));
        }
        if lengths.iter().any(|&l| !(l.is_finite() && l > 0.0)) {
            return Err(Error::Domain(format!("grid lengths must be finite and > 0, got {lengths:?}")));
        }
        Ok(Self { dims, lengths })
    }

    /// One-dimensional grid along x with unit extent along y and z.
    pub fn line(n: usize, length: f64) -> Result<Self> {
        Self::new([n, 1, 1], [length, 1.0, 1.0])
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn lengths(&self) -> [f64; 3] {
        self.lengths
    }

    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> [f64; 3] {
        [0, 1, 2].map(|a| self.lengths[a] / self.dims[a] as f64)
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().iter().product()
    }

    pub fn volume(&self) -> f64 {
        self.lengths.iter().product()
    }

    #[inline]
    pub fn index(&self, i: [usize; 3]) -> usize {
        i[0] + self.dims[0] * (i[1] + self.dims[1] * i[2])
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> [usize; 3] {
        let [nx, ny, _] = self.dims;
        [idx % nx, (idx / nx) % ny, idx / (nx * ny)]
    }

    /// Cell-centre position of a point.
    pub fn position(&self, idx: usize) -> Vector3<f64> {
        let c = self.coords(idx);
        let h = self.spacing();
        Vector3::new((c[0] as f64 + 0.5) * h[0], (c[1] as f64 + 0.5) * h[1], (c[2] as f64 + 0.5) * h[2])
    }

    /// Signed mode number of FFT bin `j` along an axis of `n` points.
    #[inline]
    pub fn signed_mode(j: usize, n: usize) -> i64 {
        if j < n.div_ceil(2) {
            j as i64
        } else {
            j as i64 - n as i64
        }
    }

    /// Wavevector `2π m / L` of the reciprocal point at flat index `idx`.
    pub fn wavevector(&self, idx: usize) -> Vector3<f64> {
        let c = self.coords(idx);
        Vector3::from_fn(|a, _| 2.0 * PI * Self::signed_mode(c[a], self.dims[a]) as f64 / self.lengths[a])
    }

    /// Flat reciprocal index of integer mode numbers, if representable.
    ///
    /// On even axes both `+n/2` and `-n/2` name the Nyquist bin.
    pub fn mode_index(&self, m: [i64; 3]) -> Option<usize> {
        let mut bins = [0usize; 3];
        for a in 0..3 {
            let n = self.dims[a] as i64;
            let (lo, hi) = if n % 2 == 0 { (-n / 2, n / 2) } else { (-(n - 1) / 2, (n - 1) / 2) };
            if m[a] < lo || m[a] > hi {
                return None;
            }
            bins[a] = m[a].rem_euclid(n) as usize;
        }
        Some(self.index(bins))
    }

    /// Integer mode numbers of a wavevector, or a domain error when `k` is not
    /// within 1e-9 (relative) of a representable mode.
    pub fn mode_of(&self, k: &Vector3<f64>) -> Result<[i64; 3]> {
        let mut m = [0i64; 3];
        for a in 0..3 {
            let x = k[a] * self.lengths[a] / (2.0 * PI);
            let r = x.round();
            if (x - r).abs() > 1e-9 * r.abs().max(1.0) {
                return Err(Error::Domain(format!("wavevector component {a} = {} is not a grid mode (m = {x})", k[a])));
            }
            m[a] = r as i64;
        }
        if self.mode_index(m).is_none() {
            return Err(Error::Domain(format!(
                "mode {m:?} is outside the representable range for dims {:?}",
                self.dims
            )));
        }
        Ok(m)
    }

    pub fn check_same(&self, other: &Grid) -> Result<()> {
        if self != other {
            return Err(Error::Shape(format!(
                "grid {:?}/{:?} does not match {:?}/{:?}",
                self.dims, self.lengths, other.dims, other.lengths
            )));
        }
        Ok(())
    }
}
