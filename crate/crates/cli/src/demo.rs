//! Two-slit interference behind an absorbing screen.

use std::f64::consts::PI;

use nalgebra::Vector3;
use photon_core::evolve::{mode_wavevector, wave_packet, EvolutionState, Helicity};
use photon_core::media::{potential_energy, Convention, PotentialField};
use photon_core::Complex64;

use crate::error::CliError;
use crate::scenario::SlitSpec;

/// Scenario run by `photon demo` when no file is given.
pub const DEFAULT_SCENARIO: &str = "\
kind = demo-double-slit
convention = paper-literal
grid_dims = 512,256,1
box = 64,64,1
wavelength = 1
source_x = 8
source_width = 2.5
screen_x = 18
screen_thickness = 2
screen_index = 1+1i
slit_separation = 6
slit_width = 1
detector_x = 60
t_end = 70
dt = 0.1
";

#[derive(Debug, Clone)]
pub struct SlitResult {
    /// Cell-centre `y` of each detector sample.
    pub y: Vec<f64>,
    /// `∫|ψ|² dt` on the detector column.
    pub intensity: Vec<f64>,
    /// Refined positions of the significant maxima, ascending.
    pub maxima: Vec<f64>,
    pub spacing: f64,
    pub expected: f64,
    pub detector_x: f64,
    pub initial_norm: f64,
    pub final_norm: f64,
}

impl SlitResult {
    pub fn relative_error(&self) -> f64 {
        (self.spacing - self.expected).abs() / self.expected
    }
}

/// Screen potential: absorbing slab with two open slits.
pub fn screen_potential(spec: &SlitSpec, convention: Convention) -> Result<PotentialField, CliError> {
    let grid = spec.grid;
    let k0 = 2.0 * PI / spec.wavelength;
    let v = potential_energy(k0, spec.screen_index, convention)?;
    let mid = 0.5 * grid.lengths()[1];
    let half = 0.5 * spec.slit_separation;
    let values = (0..grid.len())
        .map(|i| {
            let r = grid.position(i);
            let in_slab = r.x >= spec.screen_x && r.x < spec.screen_x + spec.screen_thickness;
            let open = [mid - half, mid + half].iter().any(|c| (r.y - c).abs() < 0.5 * spec.slit_width);
            if in_slab && !open {
                v
            } else {
                Complex64::ZERO
            }
        })
        .collect();
    Ok(PotentialField::new(grid, values)?)
}

/// Sends a plus-helicity slab packet at the screen and accumulates the
/// intensity at the detector column up to `t_end`.
pub fn run_double_slit(spec: &SlitSpec, convention: Convention) -> Result<SlitResult, CliError> {
    let grid = spec.grid;
    let [lx, ly, lz] = grid.lengths();
    let [_, ny, _] = grid.dims();
    let m = (lx / spec.wavelength).round() as i64;
    let packet = wave_packet(
        grid,
        Vector3::new(spec.source_x, 0.5 * ly, 0.5 * lz),
        Vector3::new(spec.source_width, 1e6 * ly, 1e6 * lz),
        mode_wavevector(&grid, [m, 0, 0]),
        Helicity::Plus,
    )?;
    let dt = spec.dt.unwrap_or_else(|| photon_core::evolve::default_step(&grid));
    let steps = (spec.t_end / dt).round() as u64;
    let mut state = EvolutionState::new(packet, dt, Some(screen_potential(spec, convention)?))?;
    let initial_norm = state.diagnostics().next().map_or(1.0, |s| s.norm);

    let hx = grid.spacing()[0];
    let ix = ((spec.detector_x / hx).floor() as usize).min(grid.dims()[0] - 1);
    let column: Vec<usize> = (0..ny).map(|iy| grid.index([ix, iy, 0])).collect();
    let mut intensity = vec![0.0; ny];
    for _ in 0..steps {
        state.advance(1)?;
        let f = state.field();
        for (acc, &idx) in intensity.iter_mut().zip(&column) {
            *acc += f.get(idx).norm_squared() * dt;
        }
    }
    let y: Vec<f64> = column.iter().map(|&idx| grid.position(idx).y).collect();
    let maxima = significant_maxima(&y, &intensity, 0.1);
    let spacing = central_spacing(&maxima, 0.5 * ly).ok_or_else(|| {
        CliError::Check(format!("fewer than three fringes found at the detector ({} maxima)", maxima.len()))
    })?;
    Ok(SlitResult {
        y,
        intensity,
        maxima,
        spacing,
        expected: spec.expected_spacing(),
        detector_x: grid.position(column[0]).x,
        initial_norm,
        final_norm: state.diagnostics().last().map_or(0.0, |s| s.norm),
    })
}

/// Interior local maxima above `floor · max`, refined by a parabola through
/// the three neighbouring samples.
pub fn significant_maxima(y: &[f64], v: &[f64], floor: f64) -> Vec<f64> {
    let top = v.iter().copied().fold(0.0, f64::max);
    let mut out = Vec::new();
    for i in 1..v.len().saturating_sub(1) {
        let (a, b, c) = (v[i - 1], v[i], v[i + 1]);
        if b > a && b >= c && b >= floor * top {
            let curv = a - 2.0 * b + c;
            let shift = if curv < 0.0 { 0.5 * (a - c) / curv } else { 0.0 };
            out.push(y[i] + shift * (y[i + 1] - y[i]));
        }
    }
    out
}

/// Half the distance between the two maxima flanking the one nearest `center`.
pub fn central_spacing(maxima: &[f64], center: f64) -> Option<f64> {
    let i = (0..maxima.len()).min_by(|&a, &b| (maxima[a] - center).abs().total_cmp(&(maxima[b] - center).abs()))?;
    if i == 0 || i + 1 >= maxima.len() {
        return None;
    }
    Some(0.5 * (maxima[i + 1] - maxima[i - 1]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parabolic_refinement_finds_cosine_peaks() {
        let y: Vec<f64> = (0..400).map(|i| 0.05 * i as f64 + 0.013).collect();
        let v: Vec<f64> = y.iter().map(|t| 1.0 + (2.0 * PI * (t - 10.0) / 3.0).cos()).collect();
        let m = significant_maxima(&y, &v, 0.1);
        assert!(m.iter().any(|p| (p - 10.0).abs() < 1e-3));
        let s = central_spacing(&m, 10.0).unwrap();
        assert!((s - 3.0).abs() < 1e-3);
    }

    #[test]
    fn spacing_needs_neighbours() {
        assert_eq!(central_spacing(&[1.0, 2.0], 1.0), None);
        assert_eq!(central_spacing(&[], 1.0), None);
        assert_eq!(central_spacing(&[1.0, 2.0, 4.0], 2.1), Some(1.5));
    }
}
