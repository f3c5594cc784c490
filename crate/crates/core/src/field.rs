//! Three-component complex fields on a periodic grid.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use nalgebra::Vector3;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::Grid;

/// Complex amplitude `(v_x, v_y, v_z)` at one grid point.
pub type ComplexVec3 = Vector3<Complex64>;

/// Representation a [`VectorField`] is currently stored in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Space {
    Real,
    Reciprocal,
}

impl Space {
    pub fn name(self) -> &'static str {
        match self {
            Space::Real => "real",
            Space::Reciprocal => "reciprocal",
        }
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A complex three-vector per grid point, stored as three component planes in
/// x-fastest order.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    grid: Grid,
    space: Space,
    data: [Vec<Complex64>; 3],
}

impl VectorField {
    pub fn zeros(grid: Grid, space: Space) -> Self {
        let n = grid.len();
        Self { grid, space, data: [vec![Complex64::ZERO; n], vec![Complex64::ZERO; n], vec![Complex64::ZERO; n]] }
    }

    pub fn from_fn(grid: Grid, space: Space, mut f: impl FnMut(usize) -> ComplexVec3) -> Self {
        let mut out = Self::zeros(grid, space);
        for idx in 0..grid.len() {
            out.set(idx, f(idx));
        }
        out
    }

    /// Builds a field from three component planes.
    pub fn from_components(grid: Grid, space: Space, data: [Vec<Complex64>; 3]) -> Result<Self> {
        if data.iter().any(|c| c.len() != grid.len()) {
            return Err(Error::Shape(format!(
                "component lengths {:?} do not match grid size {}",
                data.iter().map(Vec::len).collect::<Vec<_>>(),
                grid.len()
            )));
        }
        Ok(Self { grid, space, data })
    }

    /// A real-representation field with the same value at every point.
    pub fn uniform(grid: Grid, value: ComplexVec3) -> Self {
        Self::from_fn(grid, Space::Real, |_| value)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub(crate) fn set_space(&mut self, space: Space) {
        self.space = space;
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn component(&self, axis: usize) -> &[Complex64] {
        &self.data[axis]
    }

    pub fn component_mut(&mut self, axis: usize) -> &mut [Complex64] {
        &mut self.data[axis]
    }

    pub fn components_mut(&mut self) -> &mut [Vec<Complex64>; 3] {
        &mut self.data
    }

    #[inline]
    pub fn get(&self, idx: usize) -> ComplexVec3 {
        ComplexVec3::new(self.data[0][idx], self.data[1][idx], self.data[2][idx])
    }

    #[inline]
    pub fn set(&mut self, idx: usize, v: ComplexVec3) {
        self.data[0][idx] = v[0];
        self.data[1][idx] = v[1];
        self.data[2][idx] = v[2];
    }

    /// Applies `f` to every point in place.
    pub fn map_points(&mut self, mut f: impl FnMut(usize, ComplexVec3) -> ComplexVec3) {
        for idx in 0..self.len() {
            let v = f(idx, self.get(idx));
            self.set(idx, v);
        }
    }

    pub fn require_space(&self, expected: Space) -> Result<()> {
        if self.space != expected {
            return Err(Error::State { expected: expected.name(), found: self.space.name() });
        }
        Ok(())
    }

    fn check_compatible(&self, other: &VectorField) -> Result<()> {
        self.grid.check_same(&other.grid)?;
        if self.space != other.space {
            return Err(Error::State { expected: self.space.name(), found: other.space.name() });
        }
        Ok(())
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: Complex64, other: &VectorField, b: Complex64) -> Result<VectorField> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for c in 0..3 {
            for (o, (x, y)) in out.data[c].iter_mut().zip(self.data[c].iter().zip(&other.data[c])) {
                *o = a * x + b * y;
            }
        }
        Ok(out)
    }

    pub fn scale(&mut self, s: Complex64) {
        for c in &mut self.data {
            c.iter_mut().for_each(|v| *v *= s);
        }
    }

    /// `Σ |ψ|²` over points, without the cell-volume factor.
    pub fn sum_sq(&self) -> f64 {
        self.data.iter().flatten().map(Complex64::norm_sqr).sum()
    }

    /// `Σ ψ*·φ` over points.
    pub fn inner(&self, other: &VectorField) -> Result<Complex64> {
        self.check_compatible(other)?;
        let mut acc = Complex64::ZERO;
        for c in 0..3 {
            for (x, y) in self.data[c].iter().zip(&other.data[c]) {
                acc += x.conj() * y;
            }
        }
        Ok(acc)
    }

    /// Largest pointwise `|ψ|`.
    pub fn max_norm(&self) -> f64 {
        (0..self.len()).map(|i| self.get(i).norm()).fold(0.0, f64::max)
    }

    /// Largest pointwise `|ψ − φ|`.
    pub fn max_diff(&self, other: &VectorField) -> Result<f64> {
        self.check_compatible(other)?;
        Ok((0..self.len()).map(|i| (self.get(i) - other.get(i)).norm()).fold(0.0, f64::max))
    }

    /// `‖ψ − φ‖₂ / ‖φ‖₂` (absolute when `φ` vanishes).
    pub fn rel_l2_diff(&self, reference: &VectorField) -> Result<f64> {
        let d = self.combine(Complex64::ONE, reference, -Complex64::ONE)?;
        let r = reference.sum_sq().sqrt();
        let e = d.sum_sq().sqrt();
        Ok(if r > 0.0 { e / r } else { e })
    }
}

/// Photon wave function `ψ = 2^{-1/2} (E + iH)` from real electric and magnetic
/// fields.
pub fn from_eh(e_field: &VectorField, h_field: &VectorField) -> Result<VectorField> {
    e_field.grid().check_same(h_field.grid())?;
    e_field.require_space(Space::Real)?;
    h_field.require_space(Space::Real)?;
    for (name, f) in [("E", e_field), ("H", h_field)] {
        if f.data.iter().flatten().any(|v| v.im != 0.0) {
            return Err(Error::Domain(format!("{name} field has a nonzero imaginary part")));
        }
    }
    let i = Complex64::I;
    let mut out = e_field.combine(Complex64::ONE, h_field, i)?;
    out.scale(Complex64::from(FRAC_1_SQRT_2));
    Ok(out)
}

/// Mean photon energy `⟨E⟩ = ΔV Σ ψ*·ψ`.
///
/// The DFT in [`crate::spectral`] is unitary, so the same sum gives the same
/// value in either representation.
pub fn norm_energy(field: &VectorField) -> f64 {
    field.grid().cell_volume() * field.sum_sq()
}

/// Plane wave `amplitude · ê · exp(i k·r)` with `ê` the normalized polarization.
pub fn plane_wave(grid: Grid, k: Vector3<f64>, polarization: ComplexVec3, amplitude: Complex64) -> Result<VectorField> {
    grid.mode_of(&k)?;
    let norm = polarization.norm();
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::Domain("polarization must be nonzero and finite".into()));
    }
    let pol = polarization.unscale(norm) * amplitude;
    Ok(VectorField::from_fn(grid, Space::Real, |idx| {
        let phase = Complex64::from_polar(1.0, k.dot(&grid.position(idx)));
        pol * phase
    }))
}
