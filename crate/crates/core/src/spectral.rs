//! Reciprocal-space operators.
//!
//! The discrete transform is unitary: `ψ̂_m = N^{-1/2} Σ_j ψ_j exp(-2πi m·j/N)`
//! on the index lattice, so `Σ|ψ̂|² = Σ|ψ|²` and the derivative `∂ ↦ i k` holds
//! mode by mode. The `k = 0` mode has no transverse/longitudinal split and is
//! passed through every projection unchanged.

use std::sync::Arc;

use nalgebra::Vector3;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::Result;
use crate::field::{ComplexVec3, Space, VectorField};
use crate::grid::Grid;
use crate::spin::k_dot_s;

/// Cached FFT plans for one grid.
#[derive(Clone)]
pub struct Transform {
    grid: Grid,
    forward: [Option<Arc<dyn Fft<f64>>>; 3],
    inverse: [Option<Arc<dyn Fft<f64>>>; 3],
}

impl std::fmt::Debug for Transform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Transform").field("grid", &self.grid).finish()
    }
}

impl Transform {
    pub fn new(grid: Grid) -> Self {
        let mut planner = FftPlanner::new();
        let dims = grid.dims();
        let plan = |planner: &mut FftPlanner<f64>, n: usize, fwd: bool| {
            (n > 1).then(|| if fwd { planner.plan_fft_forward(n) } else { planner.plan_fft_inverse(n) })
        };
        let forward = [0, 1, 2].map(|a| plan(&mut planner, dims[a], true));
        let inverse = [0, 1, 2].map(|a| plan(&mut planner, dims[a], false));
        Self { grid, forward, inverse }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    fn transform_plane(&self, data: &mut [Complex64], plans: &[Option<Arc<dyn Fft<f64>>>; 3]) {
        let [nx, ny, nz] = self.grid.dims();
        if let Some(fft) = &plans[0] {
            fft.process(data);
        }
        if let Some(fft) = &plans[1] {
            let mut buf = vec![Complex64::ZERO; nx * ny];
            for z in 0..nz {
                let slab = &mut data[z * nx * ny..(z + 1) * nx * ny];
                transpose(slab, &mut buf, nx, ny);
                fft.process(&mut buf);
                transpose(&buf, slab, ny, nx);
            }
        }
        if let Some(fft) = &plans[2] {
            let plane = nx * ny;
            let mut buf = vec![Complex64::ZERO; plane * nz];
            transpose(data, &mut buf, plane, nz);
            fft.process(&mut buf);
            transpose(&buf, data, nz, plane);
        }
        let s = 1.0 / (self.grid.len() as f64).sqrt();
        data.iter_mut().for_each(|v| *v *= s);
    }

    /// Forward transform of one scalar plane in place.
    pub fn forward_plane(&self, data: &mut [Complex64]) {
        self.transform_plane(data, &self.forward);
    }

    /// Inverse transform of one scalar plane in place.
    pub fn inverse_plane(&self, data: &mut [Complex64]) {
        self.transform_plane(data, &self.inverse);
    }

    /// Real → reciprocal, in place.
    pub fn forward(&self, field: &mut VectorField) -> Result<()> {
        field.require_space(Space::Real)?;
        self.grid.check_same(field.grid())?;
        field.components_mut().par_iter_mut().for_each(|c| self.forward_plane(c));
        field.set_space(Space::Reciprocal);
        Ok(())
    }

    /// Reciprocal → real, in place.
    pub fn inverse(&self, field: &mut VectorField) -> Result<()> {
        field.require_space(Space::Reciprocal)?;
        self.grid.check_same(field.grid())?;
        field.components_mut().par_iter_mut().for_each(|c| self.inverse_plane(c));
        field.set_space(Space::Real);
        Ok(())
    }
}

/// `dst[c * rows + r] = src[c + cols * r]` for a `rows × cols` row-major
/// `src`, in cache-sized tiles.
fn transpose(src: &[Complex64], dst: &mut [Complex64], cols: usize, rows: usize) {
    const TILE: usize = 32;
    for r0 in (0..rows).step_by(TILE) {
        for c0 in (0..cols).step_by(TILE) {
            for r in r0..(r0 + TILE).min(rows) {
                for c in c0..(c0 + TILE).min(cols) {
                    dst[c * rows + r] = src[c + cols * r];
                }
            }
        }
    }
}

pub fn to_reciprocal(field: &VectorField) -> Result<VectorField> {
    let mut out = field.clone();
    Transform::new(*field.grid()).forward(&mut out)?;
    Ok(out)
}

pub fn to_real(field: &VectorField) -> Result<VectorField> {
    let mut out = field.clone();
    Transform::new(*field.grid()).inverse(&mut out)?;
    Ok(out)
}

/// Wavevector, magnitude and direction of every reciprocal grid point.
#[derive(Debug, Clone)]
pub struct ModeTable {
    k: Vec<Vector3<f64>>,
    norm: Vec<f64>,
}

impl ModeTable {
    pub fn new(grid: &Grid) -> Self {
        let k: Vec<_> = (0..grid.len()).map(|i| grid.wavevector(i)).collect();
        let norm = k.iter().map(|k| k.norm()).collect();
        Self { k, norm }
    }

    pub fn len(&self) -> usize {
        self.k.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k.is_empty()
    }

    #[inline]
    pub fn k(&self, idx: usize) -> &Vector3<f64> {
        &self.k[idx]
    }

    #[inline]
    pub fn norm(&self, idx: usize) -> f64 {
        self.norm[idx]
    }

    /// `k̂`, undefined (`None`) at `k = 0`.
    #[inline]
    pub fn unit(&self, idx: usize) -> Option<Vector3<f64>> {
        let n = self.norm[idx];
        (n > 0.0).then(|| self.k[idx] / n)
    }
}

#[inline]
fn cross_rc(k: &Vector3<f64>, v: &ComplexVec3) -> ComplexVec3 {
    ComplexVec3::new(v[2] * k.y - v[1] * k.z, v[0] * k.z - v[2] * k.x, v[1] * k.x - v[0] * k.y)
}

#[inline]
fn dot_rc(k: &Vector3<f64>, v: &ComplexVec3) -> Complex64 {
    v[0] * k.x + v[1] * k.y + v[2] * k.z
}

/// `i k × v` for a single mode.
#[inline]
pub fn curl_mode(k: &Vector3<f64>, v: &ComplexVec3) -> ComplexVec3 {
    cross_rc(k, v) * Complex64::I
}

/// Longitudinal part `k̂ (k̂·v)` of a single mode (zero at `k = 0`).
#[inline]
pub fn longitudinal_mode(k_unit: Option<&Vector3<f64>>, v: &ComplexVec3) -> ComplexVec3 {
    match k_unit {
        Some(u) => u.map(Complex64::from) * dot_rc(u, v),
        None => ComplexVec3::zeros(),
    }
}

fn map_modes(field: &VectorField, f: impl Fn(&ModeTable, usize, ComplexVec3) -> ComplexVec3) -> Result<VectorField> {
    field.require_space(Space::Reciprocal)?;
    let modes = ModeTable::new(field.grid());
    let mut out = field.clone();
    out.map_points(|idx, v| f(&modes, idx, v));
    Ok(out)
}

/// `v(k) ↦ i k × v(k)`: the curl in reciprocal space.
pub fn curl_k(field: &VectorField) -> Result<VectorField> {
    map_modes(field, |m, idx, v| curl_mode(m.k(idx), &v))
}

/// `v(k) ↦ (k·s) v(k)`; identical to [`curl_k`] up to rounding.
pub fn curl_via_spin(field: &VectorField) -> Result<VectorField> {
    map_modes(field, |m, idx, v| k_dot_s(m.k(idx)) * v)
}

/// `v ↦ v − k̂(k̂·v)`; the `k = 0` mode is left unchanged.
pub fn transverse_project(field: &VectorField) -> Result<VectorField> {
    map_modes(field, |m, idx, v| v - longitudinal_mode(m.unit(idx).as_ref(), &v))
}

/// The `ψ = ψ_T + ψ_L` decomposition of a reciprocal field.
#[derive(Debug, Clone)]
pub struct TransverseSplit {
    pub transverse: VectorField,
    pub longitudinal: VectorField,
    /// `|ψ(k = 0)|`, which belongs to neither part and is kept in `transverse`.
    pub dc_magnitude: f64,
}

pub fn split_transverse(field: &VectorField) -> Result<TransverseSplit> {
    let longitudinal = map_modes(field, |m, idx, v| longitudinal_mode(m.unit(idx).as_ref(), &v))?;
    let transverse = field.combine(Complex64::ONE, &longitudinal, -Complex64::ONE)?;
    let dc_magnitude = field.grid().mode_index([0, 0, 0]).map(|i| field.get(i).norm()).unwrap_or(0.0);
    Ok(TransverseSplit { transverse, longitudinal, dc_magnitude })
}

/// `max_{k≠0} |k̂·ψ(k)| / max_k |ψ(k)|` for a reciprocal field; 0 for a zero field.
pub fn transversality_residual(field: &VectorField) -> Result<f64> {
    field.require_space(Space::Reciprocal)?;
    let modes = ModeTable::new(field.grid());
    Ok(transversality_residual_with(field, &modes))
}

pub(crate) fn transversality_residual_with(field: &VectorField, modes: &ModeTable) -> f64 {
    let mut num = 0.0f64;
    let mut den = 0.0f64;
    for idx in 0..field.len() {
        let v = field.get(idx);
        den = den.max(v.norm());
        if let Some(u) = modes.unit(idx) {
            num = num.max(dot_rc(&u, &v).norm());
        }
    }
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

/// Real-space curl `∇×ψ` evaluated spectrally.
pub fn curl_real(field: &VectorField, transform: &Transform) -> Result<VectorField> {
    let mut f = field.clone();
    transform.forward(&mut f)?;
    let mut c = curl_k(&f)?;
    transform.inverse(&mut c)?;
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::plane_wave;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn constant_field_maps_to_dc() {
        let g = Grid::new([4, 3, 2], [1.0, 1.0, 1.0]).unwrap();
        let v = ComplexVec3::new(c(1.0, 0.0), c(0.0, 2.0), c(-1.0, 1.0));
        let f = to_reciprocal(&VectorField::uniform(g, v)).unwrap();
        let dc = g.mode_index([0, 0, 0]).unwrap();
        let scale = (g.len() as f64).sqrt();
        for i in 0..g.len() {
            let want = if i == dc { v * c(scale, 0.0) } else { ComplexVec3::zeros() };
            assert!((f.get(i) - want).norm() < 1e-12);
        }
    }

    #[test]
    fn plane_wave_is_single_mode() {
        let g = Grid::new([8, 4, 1], [2.0, 1.0, 1.0]).unwrap();
        let k = Vector3::new(2.0 * PI * 3.0 / 2.0, -2.0 * PI / 1.0, 0.0);
        let pol = ComplexVec3::new(c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0));
        let f = to_reciprocal(&plane_wave(g, k, pol, Complex64::ONE).unwrap()).unwrap();
        let target = g.mode_index([3, -1, 0]).unwrap();
        for i in 0..g.len() {
            let n = f.get(i).norm();
            if i == target {
                assert!((n - (g.len() as f64).sqrt()).abs() < 1e-12);
            } else {
                assert!(n < 1e-12, "mode {i} has {n}");
            }
        }
    }

    #[test]
    fn representation_is_checked() {
        let g = Grid::line(4, 1.0).unwrap();
        let real = VectorField::zeros(g, Space::Real);
        assert!(matches!(to_real(&real), Err(crate::Error::State { .. })));
        assert!(curl_k(&real).is_err());
        assert!(transverse_project(&real).is_err());
        assert!(curl_via_spin(&real).is_err());
    }

    #[test]
    fn projection_examples() {
        let g = Grid::line(4, 1.0).unwrap();
        let m1 = g.mode_index([1, 0, 0]).unwrap();
        let mut f = VectorField::zeros(g, Space::Reciprocal);
        f.set(m1, ComplexVec3::new(c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)));
        let p = transverse_project(&f).unwrap();
        assert_eq!(p.get(m1), ComplexVec3::new(c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)));

        let mut f = VectorField::zeros(g, Space::Reciprocal);
        f.set(m1, ComplexVec3::new(c(2.0, 1.0), c(0.0, 0.0), c(0.0, 0.0)));
        assert!(transverse_project(&f).unwrap().max_norm() < 1e-16);
        assert!(curl_k(&f).unwrap().max_norm() < 1e-16);
    }

    #[test]
    fn dc_mode_passes_through_projection() {
        let g = Grid::line(4, 1.0).unwrap();
        let dc = g.mode_index([0, 0, 0]).unwrap();
        let mut f = VectorField::zeros(g, Space::Reciprocal);
        f.set(dc, ComplexVec3::new(c(3.0, 0.0), c(0.0, 0.0), c(4.0, 0.0)));
        let split = split_transverse(&f).unwrap();
        assert_eq!(split.transverse.get(dc), f.get(dc));
        assert!((split.dc_magnitude - 5.0).abs() < 1e-15);
    }

    #[test]
    fn helicity_mode_curl() {
        let k = Vector3::new(0.0, 0.0, 2.0);
        let v = ComplexVec3::new(c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0));
        assert!((curl_mode(&k, &v) - v * c(2.0, 0.0)).norm() < 1e-15);
    }
}
