//! Time evolution of the transverse photon field.
//!
//! The curl term is integrated exactly per reciprocal mode: on the transverse
//! plane `exp(-iθ k̂·s)` with `θ = c|k|Δt` is the rotation
//! `v ↦ cos θ v + sin θ (k̂ × v)`, which multiplies helicity `±1` amplitudes by
//! `exp(∓iθ)`. A spatially varying potential is added by Strang splitting,
//! with a transverse re-projection after every potential phase.
//!
//! Projecting after a pointwise phase `Φ = exp(-iVτ)` is not the same as
//! evolving under the projected potential: for transverse `ψ`,
//! `PΦψ = exp(-iτPVP)ψ − (τ²/2) PVQVψ + O(τ³)` with `Q = 1 − P`. Left alone
//! that defect makes the scheme first order. Since the removed part is
//! `w = QΦψ = −iτ QVψ + O(τ²)`, adding `(iτ/2) P(V w)` after each projection
//! cancels it and restores second order. For a uniform potential `w = 0`.

use std::collections::VecDeque;
use std::f64::consts::PI;

use nalgebra::Vector3;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{norm_energy, ComplexVec3, Space, VectorField};
use crate::grid::Grid;
use crate::media::PotentialField;
use crate::spectral::{longitudinal_mode, transversality_residual_with, ModeTable, Transform};
use crate::spin::helicity_basis;
use crate::C;

/// Default time step `0.1 · Δx / c` on the finest resolved axis.
pub fn default_step(grid: &Grid) -> f64 {
    let h = grid.spacing();
    let dims = grid.dims();
    let finest = (0..3).filter(|&a| dims[a] > 1).map(|a| h[a]).fold(f64::INFINITY, f64::min);
    let finest = if finest.is_finite() { finest } else { h[0] };
    0.1 * finest / C
}

/// Exact free rotation of one mode after dropping its longitudinal part.
#[inline]
fn rotate_mode(k_unit: Option<&Vector3<f64>>, k_norm: f64, v: ComplexVec3, dt: f64) -> ComplexVec3 {
    match k_unit {
        None => v,
        Some(u) => {
            let vt = v - longitudinal_mode(Some(u), &v);
            let (s, c) = (C * k_norm * dt).sin_cos();
            let cross =
                ComplexVec3::new(vt[2] * u.y - vt[1] * u.z, vt[0] * u.z - vt[2] * u.x, vt[1] * u.x - vt[0] * u.y);
            vt * Complex64::from(c) + cross * Complex64::from(s)
        }
    }
}

/// Cached transform and mode table for repeated steps on one grid.
#[derive(Debug, Clone)]
pub struct Propagator {
    transform: Transform,
    modes: ModeTable,
}

impl Propagator {
    pub fn new(grid: Grid) -> Self {
        Self { transform: Transform::new(grid), modes: ModeTable::new(&grid) }
    }

    pub fn grid(&self) -> &Grid {
        self.transform.grid()
    }

    pub fn transform(&self) -> &Transform {
        &self.transform
    }

    pub fn modes(&self) -> &ModeTable {
        &self.modes
    }

    /// Projects onto the transverse subspace in reciprocal space and returns
    /// `Σ|ψ_L|²` that was removed.
    fn project_reciprocal(&self, field: &mut VectorField) -> f64 {
        let mut removed = 0.0;
        let modes = &self.modes;
        field.map_points(|idx, v| {
            let l = longitudinal_mode(modes.unit(idx).as_ref(), &v);
            removed += l.norm_squared();
            v - l
        });
        removed
    }

    /// Projects a reciprocal field that has just received the phase
    /// `exp(-iVτ)`, adding the correction `(iτ/2) P(V w)` built from the
    /// removed part `w`. Returns `Σ|w|²`.
    fn project_after_phase(&self, field: &mut VectorField, potential: &[Complex64], tau: f64) -> Result<f64> {
        let modes = &self.modes;
        let mut removed = VectorField::zeros(*self.grid(), Space::Reciprocal);
        let mut sum = 0.0;
        for idx in 0..field.len() {
            let v = field.get(idx);
            let l = longitudinal_mode(modes.unit(idx).as_ref(), &v);
            sum += l.norm_squared();
            field.set(idx, v - l);
            removed.set(idx, l);
        }
        self.transform.inverse(&mut removed)?;
        let coef = Complex64::new(0.0, 0.5 * tau);
        removed.map_points(|idx, w| w * (potential[idx] * coef));
        self.transform.forward(&mut removed)?;
        self.project_reciprocal(&mut removed);
        for (dst, src) in field.components_mut().iter_mut().zip(removed.components_mut().iter()) {
            for (x, y) in dst.iter_mut().zip(src) {
                *x += y;
            }
        }
        Ok(sum)
    }

    /// Free evolution by `dt` of a real-representation field, in place.
    pub fn free_in_place(&self, field: &mut VectorField, dt: f64) -> Result<()> {
        self.transform.forward(field)?;
        let modes = &self.modes;
        field.map_points(|idx, v| rotate_mode(modes.unit(idx).as_ref(), modes.norm(idx), v, dt));
        self.transform.inverse(field)
    }

    /// Transverse projection of a real-representation field; returns the
    /// removed `Σ|ψ_L|²`.
    pub fn project_in_place(&self, field: &mut VectorField) -> Result<f64> {
        self.transform.forward(field)?;
        let removed = self.project_reciprocal(field);
        self.transform.inverse(field)?;
        Ok(removed)
    }

    /// `max_{k≠0} |k̂·ψ(k)| / max_k |ψ(k)|` of a real-representation field.
    pub fn transversality(&self, field: &VectorField) -> Result<f64> {
        let mut f = field.clone();
        self.transform.forward(&mut f)?;
        Ok(transversality_residual_with(&f, &self.modes))
    }
}

/// Exact solution of the free equation `i ∂ψ/∂t = c ∇×ψ` over `dt`.
///
/// The input is projected onto its transverse part first; the `k = 0` mode is
/// left unchanged. Any `dt` is allowed, including negative values.
pub fn free_propagator(field: &VectorField, dt: f64) -> Result<VectorField> {
    field.require_space(Space::Real)?;
    let mut out = field.clone();
    Propagator::new(*field.grid()).free_in_place(&mut out, dt)?;
    Ok(out)
}

/// Pointwise `ψ ↦ exp(-i V Δt) ψ`.
pub fn potential_phase(field: &VectorField, potential: &PotentialField, dt: f64) -> Result<VectorField> {
    field.grid().check_same(potential.grid())?;
    field.require_space(Space::Real)?;
    let mut out = field.clone();
    apply_phase(&mut out, &phase_factors(potential, dt));
    Ok(out)
}

fn phase_factors(potential: &PotentialField, dt: f64) -> Vec<Complex64> {
    potential.values().iter().map(|v| (-Complex64::I * v * dt).exp()).collect()
}

fn apply_phase(field: &mut VectorField, factors: &[Complex64]) {
    for c in field.components_mut() {
        for (x, f) in c.iter_mut().zip(factors) {
            *x *= f;
        }
    }
}

/// One diagnostics record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub step: u64,
    pub time: f64,
    pub norm: f64,
    /// `‖ψ_L‖/‖ψ‖` removed by re-projection during the last step.
    pub projected_out: f64,
}

/// Field, clock and potential of one running simulation.
#[derive(Debug, Clone)]
pub struct EvolutionState {
    field: VectorField,
    time: f64,
    steps_taken: u64,
    dt: f64,
    potential: Option<PotentialField>,
    half_phase: Option<(f64, Vec<Complex64>)>,
    propagator: Propagator,
    diagnostics: VecDeque<Sample>,
    capacity: usize,
    last_projected_out: f64,
    max_projected_out: f64,
}

impl EvolutionState {
    pub const DEFAULT_CAPACITY: usize = 1 << 16;

    /// A state at `t = 0`. The field must be in real representation.
    pub fn new(field: VectorField, dt: f64, potential: Option<PotentialField>) -> Result<Self> {
        field.require_space(Space::Real)?;
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::Domain(format!("time step must be > 0, got {dt}")));
        }
        if let Some(p) = &potential {
            field.grid().check_same(p.grid())?;
        }
        let propagator = Propagator::new(*field.grid());
        let mut state = Self {
            field,
            time: 0.0,
            steps_taken: 0,
            dt,
            potential,
            half_phase: None,
            propagator,
            diagnostics: VecDeque::new(),
            capacity: Self::DEFAULT_CAPACITY,
            last_projected_out: 0.0,
            max_projected_out: 0.0,
        };
        state.record();
        Ok(state)
    }

    /// Keeps at most `capacity` diagnostics records, dropping the oldest.
    pub fn with_capacity(mut self, capacity: usize) -> Self {
        self.capacity = capacity.max(1);
        while self.diagnostics.len() > self.capacity {
            self.diagnostics.pop_front();
        }
        self
    }

    pub fn field(&self) -> &VectorField {
        &self.field
    }

    pub fn into_field(self) -> VectorField {
        self.field
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn step(&self) -> f64 {
        self.dt
    }

    pub fn steps_taken(&self) -> u64 {
        self.steps_taken
    }

    pub fn potential(&self) -> Option<&PotentialField> {
        self.potential.as_ref()
    }

    pub fn propagator(&self) -> &Propagator {
        &self.propagator
    }

    pub fn diagnostics(&self) -> impl Iterator<Item = &Sample> {
        self.diagnostics.iter()
    }

    /// Largest `‖ψ_L‖/‖ψ‖` removed in any single step so far.
    pub fn max_projected_out(&self) -> f64 {
        self.max_projected_out
    }

    fn record(&mut self) {
        if self.diagnostics.len() == self.capacity {
            self.diagnostics.pop_front();
        }
        self.diagnostics.push_back(Sample {
            step: self.steps_taken,
            time: self.time,
            norm: norm_energy(&self.field),
            projected_out: self.last_projected_out,
        });
    }

    fn has_potential(&self) -> bool {
        self.potential.as_ref().is_some_and(|p| p.values().iter().any(|v| *v != Complex64::ZERO))
    }

    fn one_step(&mut self, dt: f64) -> Result<()> {
        if !self.has_potential() {
            self.propagator.free_in_place(&mut self.field, dt)?;
            self.last_projected_out = 0.0;
            return Ok(());
        }
        let stale = self.half_phase.as_ref().is_none_or(|(h, _)| *h != dt);
        if stale {
            let p = self.potential.as_ref().expect("checked above");
            self.half_phase = Some((dt, phase_factors(p, 0.5 * dt)));
        }
        let (_, half) = self.half_phase.as_ref().expect("set above");
        let prop = &self.propagator;
        let field = &mut self.field;
        let potential = self.potential.as_ref().expect("checked above");
        let project = |field: &mut VectorField| -> Result<f64> {
            if potential.is_uniform() {
                Ok(prop.project_reciprocal(field))
            } else {
                prop.project_after_phase(field, potential.values(), 0.5 * dt)
            }
        };

        apply_phase(field, half);
        prop.transform.forward(field)?;
        let norm_a = field.sum_sq();
        let removed_a = project(field)?;
        let modes = &prop.modes;
        field.map_points(|idx, v| rotate_mode(modes.unit(idx).as_ref(), modes.norm(idx), v, dt));
        prop.transform.inverse(field)?;

        apply_phase(field, half);
        prop.transform.forward(field)?;
        let norm_b = field.sum_sq();
        let removed_b = project(field)?;
        prop.transform.inverse(field)?;

        let rel = |removed: f64, norm: f64| if norm > 0.0 { (removed / norm).sqrt() } else { 0.0 };
        self.last_projected_out = rel(removed_a, norm_a).max(rel(removed_b, norm_b));
        self.max_projected_out = self.max_projected_out.max(self.last_projected_out);
        Ok(())
    }

    /// Advances `n_steps` Strang steps, recording diagnostics every `stride`
    /// steps (and after the last one).
    pub fn advance_recording(&mut self, n_steps: u64, stride: u64) -> Result<()> {
        let stride = stride.max(1);
        for i in 0..n_steps {
            self.one_step(self.dt)?;
            self.steps_taken += 1;
            self.time = self.steps_taken as f64 * self.dt;
            if (i + 1) % stride == 0 || i + 1 == n_steps {
                self.record();
            }
        }
        Ok(())
    }

    pub fn advance(&mut self, n_steps: u64) -> Result<()> {
        self.advance_recording(n_steps, 1)
    }

    /// Runs `n_steps` steps backwards in time (`Δt → −Δt`).
    pub fn rewind(&mut self, n_steps: u64) -> Result<()> {
        for _ in 0..n_steps {
            self.one_step(-self.dt)?;
            self.steps_taken = self.steps_taken.saturating_sub(1);
            self.time -= self.dt;
            self.record();
        }
        Ok(())
    }
}

/// Strang split-step evolution: half potential phase, exact free step, half
/// potential phase, with transverse re-projection (and its second-order
/// correction) after each phase. Without a potential each step is the exact
/// free propagator.
pub fn split_step(mut state: EvolutionState, n_steps: u64) -> Result<EvolutionState> {
    state.advance(n_steps)?;
    Ok(state)
}

/// Evolves `field` for time `t` and returns
/// `max_r |ψ(t) − ψ(0) e^{-iEt}| / max_r |ψ(0)|` (0 for a zero field).
pub fn stationary_phase_check(
    field: &VectorField,
    energy: f64,
    t: f64,
    potential: Option<&PotentialField>,
) -> Result<f64> {
    field.require_space(Space::Real)?;
    let scale = field.max_norm();
    if scale == 0.0 {
        return Ok(0.0);
    }
    let evolved = match potential {
        None => free_propagator(field, t)?,
        Some(p) => {
            let n = (t.abs() / default_step(field.grid())).ceil().max(1.0) as u64;
            let mut state = EvolutionState::new(field.clone(), t.abs() / n as f64, Some(p.clone()))?;
            if t >= 0.0 {
                state.advance_recording(n, n)?;
            } else {
                state.rewind(n)?;
            }
            state.into_field()
        }
    };
    let mut expected = field.clone();
    expected.scale(Complex64::from_polar(1.0, -energy * t));
    Ok(evolved.max_diff(&expected)? / scale)
}

/// Diagnostics of the current state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observables {
    /// `⟨E⟩` as computed by [`norm_energy`].
    pub norm: f64,
    pub transversality: f64,
    /// `Σ r|ψ|² / Σ|ψ|²` over cell centres (box centre for a zero field).
    pub centroid: Vector3<f64>,
    /// Phase of the largest component at the dominant reciprocal mode.
    pub carrier_phase: f64,
    pub dominant_mode: [i64; 3],
}

pub fn observables(state: &EvolutionState) -> Result<Observables> {
    field_observables(state.field(), state.propagator())
}

pub fn field_observables(field: &VectorField, propagator: &Propagator) -> Result<Observables> {
    field.require_space(Space::Real)?;
    let grid = *field.grid();
    let mut total = 0.0;
    let mut moment = Vector3::zeros();
    for idx in 0..field.len() {
        let w = field.get(idx).norm_squared();
        total += w;
        moment += grid.position(idx) * w;
    }
    let centroid = if total > 0.0 { moment / total } else { Vector3::from(grid.lengths()) * 0.5 };

    let mut rec = field.clone();
    propagator.transform().forward(&mut rec)?;
    let transversality = transversality_residual_with(&rec, propagator.modes());
    let mut best = (0usize, -1.0f64);
    for idx in 0..rec.len() {
        let w = rec.get(idx).norm_squared();
        if w > best.1 {
            best = (idx, w);
        }
    }
    let v = rec.get(best.0);
    // Equal-magnitude components (circular polarization) must not swap between samples.
    let mut comp = 0;
    for c in 1..3 {
        if v[c].norm() > v[comp].norm() * (1.0 + 1e-6) {
            comp = c;
        }
    }
    let coords = grid.coords(best.0);
    let dims = grid.dims();
    Ok(Observables {
        norm: norm_energy(field),
        transversality,
        centroid,
        carrier_phase: v[comp].arg(),
        dominant_mode: [0, 1, 2].map(|a| Grid::signed_mode(coords[a], dims[a])),
    })
}

/// Helicity of a wave packet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Helicity {
    Plus,
    Minus,
}

impl Helicity {
    pub fn sign(self) -> i32 {
        match self {
            Helicity::Plus => 1,
            Helicity::Minus => -1,
        }
    }
}

/// Transverse Gaussian wave packet of definite helicity.
///
/// Each reciprocal mode gets `exp(-Σ_a σ_a²(k_a − k0_a)²/2) e^{-ik·r0} e_h(k̂)`, so
/// the packet is exactly transverse and centred on `center` with envelope
/// widths `sigma` (use a very large width for axes it should be uniform along).
pub fn wave_packet(
    grid: Grid,
    center: Vector3<f64>,
    sigma: Vector3<f64>,
    carrier: Vector3<f64>,
    helicity: Helicity,
) -> Result<VectorField> {
    if sigma.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
        return Err(Error::Domain("packet widths must be finite and > 0".into()));
    }
    let modes = ModeTable::new(&grid);
    let h = grid.spacing();
    let shift = Vector3::new(0.5 * h[0], 0.5 * h[1], 0.5 * h[2]) - center;
    let mut rec = VectorField::zeros(grid, Space::Reciprocal);
    for idx in 0..grid.len() {
        let Some(u) = modes.unit(idx) else { continue };
        let k = modes.k(idx);
        let d = k - carrier;
        let env = (-0.5 * (0..3).map(|a| (sigma[a] * d[a]).powi(2)).sum::<f64>()).exp();
        if env < 1e-300 {
            continue;
        }
        let basis = helicity_basis(&u)?;
        let pol = match helicity {
            Helicity::Plus => basis.plus,
            Helicity::Minus => basis.minus,
        };
        rec.set(idx, pol * Complex64::from_polar(env, k.dot(&shift)));
    }
    Transform::new(grid).inverse(&mut rec)?;
    let norm = norm_energy(&rec);
    if norm == 0.0 {
        return Err(Error::Domain("packet has no representable modes".into()));
    }
    rec.scale(Complex64::from(norm.sqrt().recip()));
    Ok(rec)
}

/// Carrier wavevector `2π m / L` for integer mode numbers.
pub fn mode_wavevector(grid: &Grid, m: [i64; 3]) -> Vector3<f64> {
    let l = grid.lengths();
    Vector3::new(2.0 * PI * m[0] as f64 / l[0], 2.0 * PI * m[1] as f64 / l[1], 2.0 * PI * m[2] as f64 / l[2])
}
